//! Builds every region variant for one random input and prints the
//! inequality counts plus a few sample rows.

use icregions::channel::build;
use icregions::regions::{build_cmg, build_crng, build_hk, build_jxg, CrngVariant, JxgForm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ch = build::random_channel(&mut rng, 2, 2, 2, 2);

    let hk = build::random_hk(&mut rng, 2, (2, 2, 2), (2, 2, 2));
    let cmg = build::random_cmg(&mut rng, 2, (2, 2), (2, 2));
    let crng = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
    let full = icregions::regions::embed_in_full(&crng).unwrap();

    let systems = [
        ("HK", build_hk(&hk, &ch).unwrap()),
        ("CMG", build_cmg(&cmg, &ch).unwrap()),
        ("JXG raw", build_jxg(&cmg, &ch, JxgForm::Raw).unwrap()),
        ("JXG reduced", build_jxg(&cmg, &ch, JxgForm::Reduced).unwrap()),
        ("CRNG base", build_crng(&crng, &ch, CrngVariant::Base).unwrap()),
        ("CRNG full", build_crng(&full, &ch, CrngVariant::Full).unwrap()),
        ("CRNG tilde", build_crng(&crng, &ch, CrngVariant::Tilde).unwrap()),
        (
            "CRNG eliminated0",
            build_crng(&crng, &ch, CrngVariant::Eliminated0).unwrap(),
        ),
    ];

    for (name, sys) in &systems {
        println!(
            "{name:<17} {:>3} inequalities over ({}) aux ({})",
            sys.num_inequalities(),
            sys.rate_vars
                .iter()
                .map(|v| v.as_str())
                .collect::<Vec<_>>()
                .join(","),
            sys.aux_vars
                .iter()
                .map(|v| v.as_str())
                .collect::<Vec<_>>()
                .join(","),
        );
    }

    println!("\nfirst rows of the base CRNG system:");
    for iq in systems[4].1.ineqs.iter().take(5) {
        println!("  [{}] bound {:.6}", iq.tag, iq.bound);
    }
}
