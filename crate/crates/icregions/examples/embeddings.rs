//! Region embeddings: relabeling a CMG/JXG input as a CRNG input, and
//! extending a CRNG input with constant layers of the full message set.

use icregions::channel::build;
use icregions::polytope::{lp_feasible, support_point};
use icregions::regions::{
    build_crng, build_jxg, embed_in_full, jxg_to_crng_embed, CrngVariant, JxgForm, RatePoint,
    RateVar, MEMBER_TOL,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ch = build::random_channel(&mut rng, 2, 2, 2, 2);

    // JXG -> CRNG: reduced-system points stay feasible in the aggregate system.
    let jxg_spec = build::random_cmg(&mut rng, 2, (2, 2), (2, 2));
    let reduced = build_jxg(&jxg_spec, &ch, JxgForm::Reduced).unwrap();
    let crng_spec = jxg_to_crng_embed(&jxg_spec).unwrap();
    let tilde = build_crng(&crng_spec, &ch, CrngVariant::Tilde).unwrap();
    let mut preserved = 0;
    for _ in 0..100 {
        let dir = [
            (RateVar::R0, rng.gen::<f64>()),
            (RateVar::R1, rng.gen::<f64>()),
            (RateVar::R2, rng.gen::<f64>()),
        ]
        .into_iter()
        .collect();
        let (_, apex) = support_point(&reduced, &dir).unwrap();
        let s = rng.gen::<f64>();
        let pt = RatePoint::from_pairs(
            &apex.values().iter().map(|(v, x)| (*v, x * s)).collect::<Vec<_>>(),
        )
        .unwrap();
        if tilde.is_member(&pt, MEMBER_TOL).unwrap() {
            preserved += 1;
        }
    }
    println!("JXG -> CRNG: {preserved}/100 reduced-system points remain feasible");

    // CRNG -> full: base-feasible quintuples stay feasible after embedding.
    let spec = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
    let base = build_crng(&spec, &ch, CrngVariant::Base).unwrap();
    let full_spec = embed_in_full(&spec).unwrap();
    let full = build_crng(&full_spec, &ch, CrngVariant::Full).unwrap();
    let mut preserved = 0;
    for _ in 0..50 {
        let dir = base
            .rate_vars
            .iter()
            .map(|v| (*v, rng.gen::<f64>()))
            .collect();
        let (_, apex) = support_point(&base, &dir).unwrap();
        let s = rng.gen::<f64>();
        let mut pairs: Vec<(RateVar, f64)> = apex
            .values()
            .iter()
            .map(|(v, x)| (*v, x * s))
            .collect();
        for extra in [RateVar::R01, RateVar::R02, RateVar::R12, RateVar::R21] {
            pairs.push((extra, 0.0));
        }
        let pt = RatePoint::from_pairs(&pairs).unwrap();
        if lp_feasible(&full, &pt).unwrap() {
            preserved += 1;
        }
    }
    println!("CRNG -> full: {preserved}/50 base-system points remain feasible");
}
