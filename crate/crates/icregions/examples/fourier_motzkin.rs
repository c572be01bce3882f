//! Projects the binning rates out of the subset system by Fourier-Motzkin
//! elimination and cross-checks the projection against LP feasibility.

use icregions::channel::build;
use icregions::polytope::{fm_eliminate, lp_feasible, support};
use icregions::regions::{build_crng, CrngVariant, RatePoint};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let spec = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
    let ch = build::random_channel(&mut rng, 2, 2, 2, 2);
    let base = build_crng(&spec, &ch, CrngVariant::Base).unwrap();

    let aux = base.aux_vars.clone();
    let raw = fm_eliminate(&base, &aux, false).unwrap();
    let pruned = fm_eliminate(&base, &aux, true).unwrap();
    println!(
        "base: {} rows; projected: {} rows; after LP pruning: {} rows",
        base.num_inequalities(),
        raw.num_inequalities(),
        pruned.num_inequalities()
    );

    // Membership agreement between the projection and the LP oracle.
    let hi: Vec<f64> = base
        .rate_vars
        .iter()
        .map(|v| {
            let dir = [(*v, 1.0)].into_iter().collect();
            support(&base, &dir).unwrap() * 1.2 + 1e-6
        })
        .collect();
    let mut checked = 0;
    let mut agreements = 0;
    for _ in 0..500 {
        let pt = RatePoint::from_pairs(
            &base
                .rate_vars
                .iter()
                .zip(&hi)
                .map(|(v, h)| (*v, rng.gen::<f64>() * h))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let direct = lp_feasible(&base, &pt).unwrap();
        let loose = pruned.is_member(&pt, 1e-7).unwrap();
        let tight = pruned.is_member(&pt, -1e-7).unwrap();
        if loose == tight {
            checked += 1;
            if direct == loose {
                agreements += 1;
            }
        }
    }
    println!("{agreements}/{checked} membership agreements away from the boundary");
}
