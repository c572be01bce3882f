//! Error-rate trends: codes whose rates sit inside the achievability budget
//! against codes that overrun it, across block lengths, with paired seeds.

use icregions::codec::toy_interference_code;

fn main() {
    let q = 3u8;
    let (p0, p1) = (0.02, 0.01);
    println!("n,variant,l_f,l_g,seed,error_rate");
    for &n in &[4usize, 6, 8] {
        let l_f = n / 2;
        for seed in 0..5u64 {
            for (variant, l_g) in [("within-budget", 1usize), ("over-budget", 2 * n)] {
                let code = toy_interference_code(n, q, l_f, l_g.min(2 * n), p0, p1, false, seed);
                let prepared = code.prepare().unwrap();
                let sim = prepared.simulate(2000, 1000 + seed);
                println!("{n},{variant},{l_f},{l_g},{seed},{:.5}", sim.error_rate);
            }
        }
    }
}
