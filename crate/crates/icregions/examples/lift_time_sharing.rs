//! Takes points of the aggregate (R0, R1, R2) system and lifts them onto
//! enlarged alphabets where the subset system accepts them with explicit
//! binning rates.

use icregions::channel::build;
use icregions::polytope::{lp_feasible, support_point};
use icregions::regions::{build_crng, lift_with_time_sharing, CrngVariant, RatePoint, RateVar};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // Shared bit Z00, private layers carrying the channel inputs directly.
    let branch = |zi0_dep: f64| -> Vec<f64> {
        // p(z_i0, z_ii, x_i | z00) with x_i = z_ii and z_i0 weakly z00-dependent.
        let mut b = vec![0.0; 2 * 8];
        for z00 in 0..2usize {
            for zi0 in 0..2usize {
                let p0 = if zi0 == z00 { zi0_dep } else { 1.0 - zi0_dep };
                for zii in 0..2usize {
                    b[z00 * 8 + (zi0 * 2 + zii) * 2 + zii] = 0.5 * p0;
                }
            }
        }
        b
    };
    let spec = build::crng_from_factors(&[0.5, 0.5], (2, 2, 2), &branch(0.7), (2, 2, 2), &branch(0.6))
        .unwrap();
    let ch = icregions::channel::ChannelSpec::binary_symmetric_product(0.03, 0.08);
    let tilde = build_crng(&spec, &ch, CrngVariant::Tilde).unwrap();

    for trial in 0..5 {
        // Interior point: a scaled support maximizer.
        let dir = [
            (RateVar::R0, rng.gen::<f64>()),
            (RateVar::R1, rng.gen::<f64>()),
            (RateVar::R2, rng.gen::<f64>()),
        ]
        .into_iter()
        .collect();
        let (_, apex) = support_point(&tilde, &dir).unwrap();
        let scale = 0.9 * rng.gen::<f64>();
        let pt = RatePoint::from_pairs(
            &apex
                .values()
                .iter()
                .map(|(v, x)| (*v, x * scale))
                .collect::<Vec<_>>(),
        )
        .unwrap();

        let qbits = 2;
        let lifted = lift_with_time_sharing(&spec, &ch, &pt, qbits).unwrap();
        let base = build_crng(&lifted, &ch, CrngVariant::Base).unwrap();
        let quintuple = RatePoint::from_pairs(&[
            (RateVar::R00, pt.get(RateVar::R0).unwrap()),
            (RateVar::R10, 0.0),
            (RateVar::R11, pt.get(RateVar::R1).unwrap()),
            (RateVar::R20, 0.0),
            (RateVar::R22, pt.get(RateVar::R2).unwrap()),
        ])
        .unwrap();
        let ok = lp_feasible(&base, &quintuple).unwrap();
        println!(
            "trial {trial}: (R0,R1,R2) = ({:.4}, {:.4}, {:.4}) lifted with {qbits} q-bits -> {}",
            pt.get(RateVar::R0).unwrap(),
            pt.get(RateVar::R1).unwrap(),
            pt.get(RateVar::R2).unwrap(),
            if ok { "feasible" } else { "INFEASIBLE" }
        );
    }
}
