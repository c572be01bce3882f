//! Point membership (direct and LP-backed) and support-function queries.

use icregions::channel::{build, ChannelSpec};
use icregions::polytope::{lp_feasible, support_point};
use icregions::regions::{build_crng, CrngVariant, RatePoint, RateVar, MEMBER_TOL};

fn main() {
    let spec = build::crng_trivial_uniform();
    let ch = ChannelSpec::noiseless_binary();

    // The aggregate system has no auxiliary rates: membership is direct.
    let tilde = build_crng(&spec, &ch, CrngVariant::Tilde).unwrap();
    for raw in ["R0=0,R1=1,R2=1", "R0=0.2,R1=1,R2=1", "R0=0,R1=1.2,R2=0.3"] {
        let pt = RatePoint::parse(raw).unwrap();
        let inside = tilde.is_member(&pt, MEMBER_TOL).unwrap();
        println!("tilde {} -> {}", raw, if inside { "ACCEPT" } else { "REJECT" });
        if !inside {
            for tag in tilde.violated_tags(&pt, MEMBER_TOL) {
                println!("        violates {tag}");
            }
        }
    }

    // The subset system needs feasible binning rates: an LP decides.
    let base = build_crng(&spec, &ch, CrngVariant::Base).unwrap();
    for raw in [
        "R00=0,R10=0,R11=1,R20=0,R22=1",
        "R00=0,R10=0,R11=1.01,R20=0,R22=1",
    ] {
        let pt = RatePoint::parse(raw).unwrap();
        println!(
            "base  {} -> {}",
            raw,
            if lp_feasible(&base, &pt).unwrap() {
                "ACCEPT"
            } else {
                "REJECT"
            }
        );
    }

    // Support functions with maximizing points.
    for (d1, d2) in [(1.0, 0.0), (1.0, 1.0), (0.3, 0.7)] {
        let dir = [(RateVar::R1, d1), (RateVar::R2, d2)].into_iter().collect();
        let (value, pt) = support_point(&tilde, &dir).unwrap();
        println!(
            "support along ({d1},{d2}) = {value:.6} at R1={:.3}, R2={:.3}",
            pt.get(RateVar::R1).unwrap(),
            pt.get(RateVar::R2).unwrap()
        );
    }
}
