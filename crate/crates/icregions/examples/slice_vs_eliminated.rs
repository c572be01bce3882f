//! The subset system sliced at `R10 = R20 = 0` (feasibility over the binning
//! rates decided by LP) accepts exactly the same `(R0, R1, R2)` points as the
//! closed eliminated system.

use icregions::channel::build;
use icregions::polytope::{compare_regions, lp_feasible};
use icregions::regions::{build_crng, CrngVariant, RatePoint, RateVar, MEMBER_TOL};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_disagreements = 0usize;
    for trial in 0..5 {
        let sizes = |rng: &mut ChaCha8Rng| {
            (
                rng.gen_range(2..=3usize),
                rng.gen_range(2..=3usize),
                rng.gen_range(2..=3usize),
            )
        };
        let s1 = sizes(&mut rng);
        let s2 = sizes(&mut rng);
        let n0 = rng.gen_range(2..=3);
        let spec = build::random_crng(&mut rng, n0, s1, s2);
        let ch = build::random_channel(&mut rng, s1.2, s2.2, 2, 2);

        let base = build_crng(&spec, &ch, CrngVariant::Base).unwrap();
        let sliced = base.slice(&[RateVar::R10, RateVar::R20]).unwrap();
        let eliminated = build_crng(&spec, &ch, CrngVariant::Eliminated0).unwrap();

        // Membership agreement on random points in a support-scaled box.
        let hi: Vec<f64> = [RateVar::R0, RateVar::R1, RateVar::R2]
            .iter()
            .map(|v| {
                let dir = [(*v, 1.0)].into_iter().collect();
                icregions::polytope::support(&eliminated, &dir).unwrap() * 1.2 + 1e-6
            })
            .collect();
        let mut disagreements = 0;
        let mut inside = 0;
        for _ in 0..400 {
            let pt = RatePoint::from_pairs(&[
                (RateVar::R0, rng.gen::<f64>() * hi[0]),
                (RateVar::R1, rng.gen::<f64>() * hi[1]),
                (RateVar::R2, rng.gen::<f64>() * hi[2]),
            ])
            .unwrap();
            let a = lp_feasible(&sliced, &pt).unwrap();
            let b = eliminated.is_member(&pt, MEMBER_TOL).unwrap();
            if a != b {
                disagreements += 1;
            }
            if a {
                inside += 1;
            }
        }
        worst_disagreements = worst_disagreements.max(disagreements);
        println!(
            "spec {trial}: {} inside of 400 sampled, {} disagreements",
            inside, disagreements
        );

        let report = compare_regions(&sliced, &eliminated, 16, 100, 7 + trial).unwrap();
        println!(
            "  support gap {:.3e}, A-only {}, B-only {}",
            report.max_support_gap, report.a_only, report.b_only
        );
    }
    println!("worst disagreement count: {worst_disagreements}");
}
