//! Joint distributions, entropy and mutual information in bits.

use icregions::prob::{var, EntropyQuery, JointDistribution};

fn main() {
    // A pair of correlated bits: B is A passed through a 10% flip.
    let dist = JointDistribution::new(
        vec![(var("A"), 2), (var("B"), 2)],
        vec![0.45, 0.05, 0.05, 0.45],
    )
    .unwrap();

    let h_a = dist.h(&["A"], &[]).unwrap();
    let h_b_given_a = dist.h(&["B"], &["A"]).unwrap();
    let h_ab = dist.h(&["A", "B"], &[]).unwrap();
    let mi = dist.mi(&["A"], &["B"], &[]).unwrap();

    println!("H(A)     = {h_a:.6} bits");
    println!("H(B|A)   = {h_b_given_a:.6} bits");
    println!("H(A,B)   = {h_ab:.6} bits");
    println!("I(A;B)   = {mi:.6} bits");
    println!(
        "chain rule residual = {:.3e}",
        (h_ab - h_a - h_b_given_a).abs()
    );

    // Queries work over sets of variables.
    let three = JointDistribution::uniform(vec![(var("A"), 2), (var("B"), 2), (var("C"), 3)])
        .unwrap();
    let q = EntropyQuery::from_names(&["A", "B"], &["C"]).unwrap();
    println!("uniform H(A,B|C) = {:.6} bits", three.entropy(&q).unwrap());

    // Serialization uses the documented schema.
    println!("json: {}", serde_json::to_string(&dist).unwrap());
}
