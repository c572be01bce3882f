//! Boundary sweep of a 2-D region slice, printed as plot-ready CSV.

use icregions::channel::{build, ChannelSpec};
use icregions::polytope::support_point;
use icregions::regions::{build_crng, CrngVariant, RateVar};
use std::collections::BTreeMap;

fn main() {
    let spec = build::crng_trivial_uniform();
    let ch = ChannelSpec::noiseless_binary();
    let sliced = build_crng(&spec, &ch, CrngVariant::Tilde)
        .unwrap()
        .slice(&[RateVar::R0])
        .unwrap();

    println!("theta,support,R1,R2");
    let angles = 33;
    for k in 0..angles {
        let theta = k as f64 * std::f64::consts::FRAC_PI_2 / (angles - 1) as f64;
        let dir: BTreeMap<RateVar, f64> = [
            (RateVar::R1, theta.cos()),
            (RateVar::R2, theta.sin()),
        ]
        .into_iter()
        .collect();
        let (value, pt) = support_point(&sliced, &dir).unwrap();
        println!(
            "{theta:.6},{value:.9},{:.9},{:.9}",
            pt.get(RateVar::R1).unwrap(),
            pt.get(RateVar::R2).unwrap()
        );
    }
}
