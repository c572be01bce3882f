//! Two-user interference channel specifications and the auxiliary-input
//! factorizations used by each region family.
//!
//! A [`ChannelSpec`] is the conditional law `W(y1,y2|x1,x2)`. An
//! [`AuxInputSpec`] is a joint distribution over a family's auxiliary
//! variables and channel inputs, validated numerically (mutual information
//! below `1e-9`) against the family's factorization. [`compose`] chains the
//! two into one joint distribution that the region builders query.

use crate::prob::{var, JointDistribution, ProbError, VariableId};
use serde::{Deserialize, Serialize};

/// Tolerance for the numeric conditional-independence checks.
pub const FACTORIZATION_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ChannelError {
    #[error("conditional row {row} sums to {sum}, expected 1 within 1e-12")]
    BadRow { row: usize, sum: f64 },
    #[error("channel tensor has {got} entries, expected {want}")]
    BadShape { got: usize, want: usize },
    #[error(
        "input spec variables do not match family {family}: expected [{expected}], got [{got}]"
    )]
    VariableSetMismatch {
        family: String,
        expected: String,
        got: String,
    },
    #[error("alphabet mismatch for {0}: spec has {1}, channel has {2}")]
    AlphabetMismatch(String, usize, usize),
    #[error("factorization check failed: {0}")]
    ValidationFailed(String),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// Conditional law of a two-user interference channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
    /// Flat tensor `w[((x1*|X2|+x2)*|Y1|+y1)*|Y2|+y2]`.
    pub w: Vec<f64>,
}

impl ChannelSpec {
    pub fn new(x1: usize, x2: usize, y1: usize, y2: usize, w: Vec<f64>) -> Result<Self, ChannelError> {
        let want = x1 * x2 * y1 * y2;
        if w.len() != want {
            return Err(ChannelError::BadShape { got: w.len(), want });
        }
        for xi1 in 0..x1 {
            for xi2 in 0..x2 {
                let row = xi1 * x2 + xi2;
                let mut sum = 0.0;
                for k in 0..y1 * y2 {
                    let p = w[row * y1 * y2 + k];
                    if !(p >= 0.0) {
                        return Err(ChannelError::BadRow { row, sum: f64::NAN });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(ChannelError::BadRow { row, sum });
                }
            }
        }
        Ok(ChannelSpec { x1, x2, y1, y2, w })
    }

    pub fn w_of(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> f64 {
        self.w[((x1 * self.x2 + x2) * self.y1 + y1) * self.y2 + y2]
    }

    /// Noiseless product channel `Y_i = X_i` over binary inputs and outputs.
    pub fn noiseless_binary() -> Self {
        let mut w = vec![0.0; 16];
        for x1 in 0..2 {
            for x2 in 0..2 {
                w[((x1 * 2 + x2) * 2 + x1) * 2 + x2] = 1.0;
            }
        }
        ChannelSpec::new(2, 2, 2, 2, w).unwrap()
    }

    /// Channel whose output is uniform regardless of the inputs.
    pub fn uninformative(x1: usize, x2: usize, y1: usize, y2: usize) -> Self {
        let p = 1.0 / (y1 * y2) as f64;
        ChannelSpec::new(x1, x2, y1, y2, vec![p; x1 * x2 * y1 * y2]).unwrap()
    }

    /// Two independent binary symmetric links: `Y_i = X_i` flipped with
    /// probability `eps_i`.
    pub fn binary_symmetric_product(eps1: f64, eps2: f64) -> Self {
        let mut w = vec![0.0; 16];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for y1 in 0..2usize {
                    for y2 in 0..2usize {
                        let p1 = if y1 == x1 { 1.0 - eps1 } else { eps1 };
                        let p2 = if y2 == x2 { 1.0 - eps2 } else { eps2 };
                        w[((x1 * 2 + x2) * 2 + y1) * 2 + y2] = p1 * p2;
                    }
                }
            }
        }
        ChannelSpec::new(2, 2, 2, 2, w).unwrap()
    }
}

/// Auxiliary-input family of a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Han-Kobayashi: `(U0, U10, U11, X1, U20, U22, X2)`, deterministic `X_i`.
    #[serde(rename = "HK")]
    Hk,
    /// Chong-Motani-Garg / Jiang-Xin-Garg: `(U0, U1, X1, U2, X2)`.
    #[serde(rename = "CMG/JXG", alias = "CMG", alias = "JXG")]
    CmgJxg,
    /// Constrained-random-number-generator region: `(Z00, Z10, Z11, X1, Z20, Z22, X2)`.
    #[serde(rename = "CRNG")]
    Crng,
    /// Extended region with side messages: eleven variables.
    #[serde(rename = "CRNG_FULL")]
    CrngFull,
}

impl Family {
    pub fn variables(&self) -> &'static [&'static str] {
        match self {
            Family::Hk => &["U0", "U10", "U11", "X1", "U20", "U22", "X2"],
            Family::CmgJxg => &["U0", "U1", "X1", "U2", "X2"],
            Family::Crng => &["Z00", "Z10", "Z11", "X1", "Z20", "Z22", "X2"],
            Family::CrngFull => &[
                "Z00", "Z01", "Z02", "Z10", "Z11", "Z12", "X1", "Z20", "Z22", "Z21", "X2",
            ],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Hk => "HK",
            Family::CmgJxg => "CMG/JXG",
            Family::Crng => "CRNG",
            Family::CrngFull => "CRNG_FULL",
        }
    }
}

/// One numeric conditional-independence (or determinism) check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

/// Outcome of [`AuxInputSpec::validate_factorization`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub family: Family,
    pub checks: Vec<FactorizationCheck>,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// A family tag plus a joint distribution over that family's variable list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxInputSpec {
    pub family: Family,
    pub dist: JointDistribution,
}

impl AuxInputSpec {
    /// Wraps a distribution after checking that its variables are exactly the
    /// family's, in canonical order.
    pub fn new(family: Family, dist: JointDistribution) -> Result<Self, ChannelError> {
        let expected = family.variables();
        let got: Vec<&str> = dist.vars().iter().map(|(v, _)| v.name()).collect();
        if got != expected {
            return Err(ChannelError::VariableSetMismatch {
                family: family.name().to_string(),
                expected: expected.join(", "),
                got: got.join(", "),
            });
        }
        Ok(AuxInputSpec { family, dist })
    }

    pub fn x_size(&self, i: usize) -> usize {
        let name = if i == 1 { "X1" } else { "X2" };
        self.dist.size_of(&var(name)).unwrap()
    }

    /// Computes the family's defining conditional independences as mutual
    /// informations and reports pass/fail at `1e-9`.
    pub fn validate_factorization(&self) -> Result<FactorizationReport, ChannelError> {
        let d = &self.dist;
        let mut checks = Vec::new();
        fn mi_check(checks: &mut Vec<FactorizationCheck>, name: String, value: f64) {
            checks.push(FactorizationCheck {
                name,
                value,
                pass: value <= FACTORIZATION_TOL,
            });
        }
        match self.family {
            Family::Crng => {
                let v = d.mi(
                    &["Z10", "Z11", "X1"],
                    &["Z20", "Z22", "X2"],
                    &["Z00"],
                )?;
                mi_check(&mut checks, "I(Z10,Z11,X1;Z20,Z22,X2|Z00)".into(), v);
            }
            Family::CrngFull => {
                let v = d.mi(
                    &["Z10", "Z11", "Z12", "X1"],
                    &["Z20", "Z22", "Z21", "X2"],
                    &["Z00", "Z01", "Z02"],
                )?;
                mi_check(&mut checks, "I(Z10,Z11,Z12,X1;Z20,Z22,Z21,X2|Z00,Z01,Z02)".into(), v);
            }
            Family::CmgJxg => {
                let v = d.mi(&["U1", "X1"], &["U2", "X2"], &["U0"])?;
                mi_check(&mut checks, "I(U1,X1;U2,X2|U0)".into(), v);
            }
            Family::Hk => {
                let v = d.mi(
                    &["U10", "U11", "X1"],
                    &["U20", "U22", "X2"],
                    &["U0"],
                )?;
                mi_check(&mut checks, "I(U10,U11,X1;U20,U22,X2|U0)".into(), v);
                for i in [1usize, 2] {
                    let ui0 = if i == 1 { "U10" } else { "U20" };
                    let uii = if i == 1 { "U11" } else { "U22" };
                    let v = d.mi(&[ui0], &[uii], &["U0"])?;
                    mi_check(&mut checks, format!("I({ui0};{uii}|U0)"), v);
                    let dev = self.x_determinism_deviation(i)?;
                    checks.push(FactorizationCheck {
                        name: format!("X{i} deterministic given (U0,{ui0},{uii})"),
                        value: dev,
                        pass: dev <= FACTORIZATION_TOL,
                    });
                }
            }
        }
        Ok(FactorizationReport {
            family: self.family,
            checks,
        })
    }

    /// Largest deviation of `p(x_i | u0, u_i0, u_ii)` from `{0, 1}`.
    fn x_determinism_deviation(&self, i: usize) -> Result<f64, ChannelError> {
        let (ui0, uii, xi) = if i == 1 {
            ("U10", "U11", "X1")
        } else {
            ("U20", "U22", "X2")
        };
        let keep: std::collections::BTreeSet<VariableId> =
            [var("U0"), var(ui0), var(uii), var(xi)].into_iter().collect();
        let m = self.dist.marginal(&keep)?;
        // m's variables follow family order: U0, ui0, uii, xi.
        let sizes: Vec<usize> = m.vars().iter().map(|(_, s)| *s).collect();
        let nx = sizes[3];
        let mut worst: f64 = 0.0;
        let ncond = sizes[0] * sizes[1] * sizes[2];
        for c in 0..ncond {
            let base = c * nx;
            let total: f64 = (0..nx).map(|x| m.probs()[base + x]).sum();
            if total <= 0.0 {
                continue;
            }
            for x in 0..nx {
                let p = m.probs()[base + x] / total;
                worst = worst.max(p.min(1.0 - p));
            }
        }
        Ok(worst)
    }
}

/// Joint distribution `P(aux, x) * W(y | x)` over the family variables plus
/// `Y1, Y2`, in that order.
pub fn compose(spec: &AuxInputSpec, ch: &ChannelSpec) -> Result<JointDistribution, ChannelError> {
    for (i, (have, want)) in [(1, (spec.x_size(1), ch.x1)), (2, (spec.x_size(2), ch.x2))] {
        if have != want {
            return Err(ChannelError::AlphabetMismatch(format!("X{i}"), have, want));
        }
    }
    let d = &spec.dist;
    let x1_axis = d
        .vars()
        .iter()
        .position(|(v, _)| v.name() == "X1")
        .expect("family has X1");
    let x2_axis = d
        .vars()
        .iter()
        .position(|(v, _)| v.name() == "X2")
        .expect("family has X2");
    let mut vars = d.vars().to_vec();
    vars.push((var("Y1"), ch.y1));
    vars.push((var("Y2"), ch.y2));

    let ny = ch.y1 * ch.y2;
    let mut probs = vec![0.0f64; d.num_cells() * ny];
    let sizes: Vec<usize> = d.vars().iter().map(|(_, s)| *s).collect();
    let mut digits = vec![0usize; sizes.len()];
    for (idx, &p) in d.probs().iter().enumerate() {
        if p > 0.0 {
            let (x1v, x2v) = (digits[x1_axis], digits[x2_axis]);
            let row = (x1v * ch.x2 + x2v) * ny;
            let base = idx * ny;
            for k in 0..ny {
                probs[base + k] = p * ch.w[row + k];
            }
        }
        if idx + 1 == d.num_cells() {
            break;
        }
        for k in (0..sizes.len()).rev() {
            digits[k] += 1;
            if digits[k] < sizes[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    Ok(JointDistribution::new(vars, probs)?)
}

/// JSON input for the region commands: a channel plus an auxiliary-input spec.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub channel: ChannelSpec,
    pub input: AuxInputSpec,
}

/// Structural constructors that produce valid specs by building the joint
/// from the defining factors, plus seeded random samplers for experiments.
pub mod build {
    use super::*;
    use rand::Rng;

    fn normalize(row: &mut [f64]) {
        let s: f64 = row.iter().sum();
        for p in row.iter_mut() {
            *p /= s;
        }
    }

    fn dirichlet_row<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
        let mut row: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().ln()).collect();
        normalize(&mut row);
        row
    }

    /// CRNG joint from `p(z00)` and per-branch conditionals
    /// `branch_i[(z00, z_i0, z_ii, x_i)] = p(z_i0, z_ii, x_i | z00)`.
    pub fn crng_from_factors(
        p0: &[f64],
        sizes1: (usize, usize, usize),
        branch1: &[f64],
        sizes2: (usize, usize, usize),
        branch2: &[f64],
    ) -> Result<AuxInputSpec, ChannelError> {
        let n0 = p0.len();
        let (a1, b1, c1) = sizes1;
        let (a2, b2, c2) = sizes2;
        assert_eq!(branch1.len(), n0 * a1 * b1 * c1);
        assert_eq!(branch2.len(), n0 * a2 * b2 * c2);
        let vars = vec![
            (var("Z00"), n0),
            (var("Z10"), a1),
            (var("Z11"), b1),
            (var("X1"), c1),
            (var("Z20"), a2),
            (var("Z22"), b2),
            (var("X2"), c2),
        ];
        let cells = n0 * a1 * b1 * c1 * a2 * b2 * c2;
        let mut probs = vec![0.0; cells];
        let mut idx = 0usize;
        for z00 in 0..n0 {
            for i1 in 0..a1 * b1 * c1 {
                let q1 = p0[z00] * branch1[z00 * a1 * b1 * c1 + i1];
                for i2 in 0..a2 * b2 * c2 {
                    probs[idx] = q1 * branch2[z00 * a2 * b2 * c2 + i2];
                    idx += 1;
                }
            }
        }
        let s: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= s;
        }
        AuxInputSpec::new(Family::Crng, JointDistribution::new(vars, probs)?)
    }

    /// CMG/JXG joint from `p(u0)` and `branch_i[(u0, u_i, x_i)] = p(u_i, x_i | u0)`.
    pub fn cmg_from_factors(
        p0: &[f64],
        sizes1: (usize, usize),
        branch1: &[f64],
        sizes2: (usize, usize),
        branch2: &[f64],
    ) -> Result<AuxInputSpec, ChannelError> {
        let n0 = p0.len();
        let (a1, c1) = sizes1;
        let (a2, c2) = sizes2;
        let vars = vec![
            (var("U0"), n0),
            (var("U1"), a1),
            (var("X1"), c1),
            (var("U2"), a2),
            (var("X2"), c2),
        ];
        let mut probs = vec![0.0; n0 * a1 * c1 * a2 * c2];
        let mut idx = 0usize;
        for u0 in 0..n0 {
            for i1 in 0..a1 * c1 {
                let q1 = p0[u0] * branch1[u0 * a1 * c1 + i1];
                for i2 in 0..a2 * c2 {
                    probs[idx] = q1 * branch2[u0 * a2 * c2 + i2];
                    idx += 1;
                }
            }
        }
        let s: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= s;
        }
        AuxInputSpec::new(Family::CmgJxg, JointDistribution::new(vars, probs)?)
    }

    /// HK joint from `p(u0)`, per-branch `p(u_i0|u0)`, `p(u_ii|u0)` and a
    /// deterministic map `x_i = xfun_i(u0, u_i0, u_ii)`.
    #[allow(clippy::too_many_arguments)]
    pub fn hk_from_factors(
        p0: &[f64],
        u10: &[f64],
        u11: &[f64],
        x1_size: usize,
        xfun1: &dyn Fn(usize, usize, usize) -> usize,
        u20: &[f64],
        u22: &[f64],
        x2_size: usize,
        xfun2: &dyn Fn(usize, usize, usize) -> usize,
    ) -> Result<AuxInputSpec, ChannelError> {
        let n0 = p0.len();
        let (a1, b1) = (u10.len() / n0, u11.len() / n0);
        let (a2, b2) = (u20.len() / n0, u22.len() / n0);
        let vars = vec![
            (var("U0"), n0),
            (var("U10"), a1),
            (var("U11"), b1),
            (var("X1"), x1_size),
            (var("U20"), a2),
            (var("U22"), b2),
            (var("X2"), x2_size),
        ];
        let cells = n0 * a1 * b1 * x1_size * a2 * b2 * x2_size;
        let mut probs = vec![0.0; cells];
        let mut idx = 0usize;
        for z0 in 0..n0 {
            for v10 in 0..a1 {
                for v11 in 0..b1 {
                    let x1 = xfun1(z0, v10, v11);
                    assert!(x1 < x1_size);
                    for x1v in 0..x1_size {
                        let q1 = if x1v == x1 {
                            p0[z0] * u10[z0 * a1 + v10] * u11[z0 * b1 + v11]
                        } else {
                            0.0
                        };
                        for v20 in 0..a2 {
                            for v22 in 0..b2 {
                                let x2 = xfun2(z0, v20, v22);
                                for x2v in 0..x2_size {
                                    probs[idx] = if x2v == x2 {
                                        q1 * u20[z0 * a2 + v20] * u22[z0 * b2 + v22]
                                    } else {
                                        0.0
                                    };
                                    idx += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        let s: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= s;
        }
        AuxInputSpec::new(Family::Hk, JointDistribution::new(vars, probs)?)
    }

    /// CRNG_FULL joint from `p(z00,z01,z02)` and per-branch conditionals
    /// `branch_i[(s0cell, z_i0, z_ii, z_ii', x_i)]`.
    pub fn full_from_factors(
        s0_sizes: (usize, usize, usize),
        p0: &[f64],
        sizes1: (usize, usize, usize, usize),
        branch1: &[f64],
        sizes2: (usize, usize, usize, usize),
        branch2: &[f64],
    ) -> Result<AuxInputSpec, ChannelError> {
        let (n00, n01, n02) = s0_sizes;
        let n0 = n00 * n01 * n02;
        assert_eq!(p0.len(), n0);
        let (a1, b1, e1, c1) = sizes1;
        let (a2, b2, e2, c2) = sizes2;
        let vars = vec![
            (var("Z00"), n00),
            (var("Z01"), n01),
            (var("Z02"), n02),
            (var("Z10"), a1),
            (var("Z11"), b1),
            (var("Z12"), e1),
            (var("X1"), c1),
            (var("Z20"), a2),
            (var("Z22"), b2),
            (var("Z21"), e2),
            (var("X2"), c2),
        ];
        let m1 = a1 * b1 * e1 * c1;
        let m2 = a2 * b2 * e2 * c2;
        let mut probs = vec![0.0; n0 * m1 * m2];
        let mut idx = 0usize;
        for s0 in 0..n0 {
            for i1 in 0..m1 {
                let q1 = p0[s0] * branch1[s0 * m1 + i1];
                for i2 in 0..m2 {
                    probs[idx] = q1 * branch2[s0 * m2 + i2];
                    idx += 1;
                }
            }
        }
        let s: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= s;
        }
        AuxInputSpec::new(Family::CrngFull, JointDistribution::new(vars, probs)?)
    }

    /// Random CRNG spec with the given alphabet sizes, factor rows Dirichlet.
    pub fn random_crng<R: Rng>(
        rng: &mut R,
        n0: usize,
        sizes1: (usize, usize, usize),
        sizes2: (usize, usize, usize),
    ) -> AuxInputSpec {
        let p0 = dirichlet_row(rng, n0);
        let m1 = sizes1.0 * sizes1.1 * sizes1.2;
        let m2 = sizes2.0 * sizes2.1 * sizes2.2;
        let mut b1 = Vec::with_capacity(n0 * m1);
        let mut b2 = Vec::with_capacity(n0 * m2);
        for _ in 0..n0 {
            b1.extend(dirichlet_row(rng, m1));
            b2.extend(dirichlet_row(rng, m2));
        }
        crng_from_factors(&p0, sizes1, &b1, sizes2, &b2).unwrap()
    }

    /// Random CMG/JXG spec.
    pub fn random_cmg<R: Rng>(
        rng: &mut R,
        n0: usize,
        sizes1: (usize, usize),
        sizes2: (usize, usize),
    ) -> AuxInputSpec {
        let p0 = dirichlet_row(rng, n0);
        let m1 = sizes1.0 * sizes1.1;
        let m2 = sizes2.0 * sizes2.1;
        let mut b1 = Vec::with_capacity(n0 * m1);
        let mut b2 = Vec::with_capacity(n0 * m2);
        for _ in 0..n0 {
            b1.extend(dirichlet_row(rng, m1));
            b2.extend(dirichlet_row(rng, m2));
        }
        cmg_from_factors(&p0, sizes1, &b1, sizes2, &b2).unwrap()
    }

    /// Random HK spec with deterministic `X_i` tables.
    pub fn random_hk<R: Rng>(
        rng: &mut R,
        n0: usize,
        sizes1: (usize, usize, usize),
        sizes2: (usize, usize, usize),
    ) -> AuxInputSpec {
        let p0 = dirichlet_row(rng, n0);
        let (a1, b1, x1) = sizes1;
        let (a2, b2, x2) = sizes2;
        let mut u10 = Vec::new();
        let mut u11 = Vec::new();
        let mut u20 = Vec::new();
        let mut u22 = Vec::new();
        for _ in 0..n0 {
            u10.extend(dirichlet_row(rng, a1));
            u11.extend(dirichlet_row(rng, b1));
            u20.extend(dirichlet_row(rng, a2));
            u22.extend(dirichlet_row(rng, b2));
        }
        let t1: Vec<usize> = (0..n0 * a1 * b1).map(|_| rng.gen_range(0..x1)).collect();
        let t2: Vec<usize> = (0..n0 * a2 * b2).map(|_| rng.gen_range(0..x2)).collect();
        hk_from_factors(
            &p0,
            &u10,
            &u11,
            x1,
            &|u0, v10, v11| t1[(u0 * a1 + v10) * b1 + v11],
            &u20,
            &u22,
            x2,
            &|u0, v20, v22| t2[(u0 * a2 + v20) * b2 + v22],
        )
        .unwrap()
    }

    /// Random channel with Dirichlet rows.
    pub fn random_channel<R: Rng>(
        rng: &mut R,
        x1: usize,
        x2: usize,
        y1: usize,
        y2: usize,
    ) -> ChannelSpec {
        let mut w = Vec::with_capacity(x1 * x2 * y1 * y2);
        for _ in 0..x1 * x2 {
            w.extend(dirichlet_row(rng, y1 * y2));
        }
        ChannelSpec::new(x1, x2, y1, y2, w).unwrap()
    }

    /// CRNG spec with constant `Z00, Z10, Z20` and `Z_ii = X_i` uniform bits.
    pub fn crng_trivial_uniform() -> AuxInputSpec {
        // branch: p(z_i0, z_ii, x_i | z00) with z_i0 constant and x_i = z_ii.
        let branch = vec![0.5, 0.0, 0.0, 0.5];
        crng_from_factors(&[1.0], (1, 2, 2), &branch, (1, 2, 2), &branch).unwrap()
    }

    /// CMG/JXG spec with constant `U0, U1, U2` and uniform bits `X_i`.
    pub fn cmg_trivial_uniform() -> AuxInputSpec {
        let branch = vec![0.5, 0.5];
        cmg_from_factors(&[1.0], (1, 2), &branch, (1, 2), &branch).unwrap()
    }

    /// HK spec with constant `U0, U10, U20` and `X_i = U_ii` uniform bits.
    pub fn hk_trivial_uniform() -> AuxInputSpec {
        hk_from_factors(
            &[1.0],
            &[1.0],
            &[0.5, 0.5],
            2,
            &|_, _, u11| u11,
            &[1.0],
            &[0.5, 0.5],
            2,
            &|_, _, u22| u22,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_independent_bits_pass_validation() {
        let d = JointDistribution::uniform(
            Family::Crng
                .variables()
                .iter()
                .map(|n| (var(n), 2))
                .collect(),
        )
        .unwrap();
        let spec = AuxInputSpec::new(Family::Crng, d).unwrap();
        let report = spec.validate_factorization().unwrap();
        assert!(report.passed());
    }

    #[test]
    fn correlated_branches_fail_with_one_bit() {
        // Z10 = Z20 fair bit, Z00 constant, everything else constant.
        let vars: Vec<_> = Family::Crng
            .variables()
            .iter()
            .map(|n| (var(n), if *n == "Z10" || *n == "Z20" { 2 } else { 1 }))
            .collect();
        let probs = vec![0.5, 0.0, 0.0, 0.5];
        let d = JointDistribution::new(vars, probs).unwrap();
        let spec = AuxInputSpec::new(Family::Crng, d).unwrap();
        let report = spec.validate_factorization().unwrap();
        assert!(!report.passed());
        assert_abs_diff_eq!(report.checks[0].value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn construct_then_check_random_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let spec = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 3, 2));
            let report = spec.validate_factorization().unwrap();
            assert!(report.passed());
            assert!(report.checks[0].value < 1e-10);
        }
        for _ in 0..5 {
            let spec = build::random_hk(&mut rng, 2, (2, 2, 2), (2, 2, 2));
            assert!(spec.validate_factorization().unwrap().passed());
        }
        for _ in 0..5 {
            let spec = build::random_cmg(&mut rng, 2, (2, 2), (3, 2));
            assert!(spec.validate_factorization().unwrap().passed());
        }
    }

    #[test]
    fn compose_identity_channel_gives_full_mi() {
        let spec = build::crng_trivial_uniform();
        let joint = compose(&spec, &ChannelSpec::noiseless_binary()).unwrap();
        assert_abs_diff_eq!(joint.mi(&["X1"], &["Y1"], &[]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            joint.mi(&["X1", "X2"], &["Y1", "Y2"], &[]).unwrap(),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn compose_uninformative_channel_gives_zero_mi() {
        let spec = build::crng_trivial_uniform();
        let joint = compose(&spec, &ChannelSpec::uninformative(2, 2, 2, 2)).unwrap();
        assert_abs_diff_eq!(
            joint.mi(&["X1", "X2"], &["Y1", "Y2"], &[]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn compose_matches_product_oracle_cell_by_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
        let ch = build::random_channel(&mut rng, 2, 2, 2, 3);
        let joint = compose(&spec, &ch).unwrap();
        // Cross-check every cell against the explicit product.
        let sizes: Vec<usize> = joint.vars().iter().map(|(_, s)| *s).collect();
        let total: usize = sizes.iter().product();
        let mut digits = vec![0usize; sizes.len()];
        for idx in 0..total {
            let aux: Vec<usize> = digits[..7].to_vec();
            let p_aux = spec.dist.prob_of(&aux);
            let w = ch.w_of(digits[3], digits[6], digits[7], digits[8]);
            let p = joint.probs()[idx];
            assert_abs_diff_eq!(p, p_aux * w, epsilon = 1e-15);
            for k in (0..sizes.len()).rev() {
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        // Input marginal preserved.
        let keep = spec.dist.vars().iter().map(|(v, _)| v.clone()).collect();
        let m = joint.marginal(&keep).unwrap();
        for (a, b) in m.probs().iter().zip(spec.dist.probs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn no_interference_product_channel_has_zero_cross_mi() {
        let spec = build::crng_trivial_uniform();
        let joint = compose(&spec, &ChannelSpec::noiseless_binary()).unwrap();
        assert_abs_diff_eq!(
            joint.mi(&["X2"], &["Y1"], &["X1"]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let spec = build::crng_trivial_uniform();
        let ch = ChannelSpec::uninformative(3, 2, 2, 2);
        assert!(matches!(
            compose(&spec, &ch),
            Err(ChannelError::AlphabetMismatch(_, 2, 3))
        ));
    }
}

#[cfg(test)]
mod row_extraction_tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Re-extracting W(y1,y2|x1,x2) from the composed joint returns the
    /// channel spec on every input pair with positive mass.
    #[test]
    fn composed_law_reextracts_the_channel_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let spec = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
        let ch = build::random_channel(&mut rng, 2, 2, 3, 2);
        let joint = compose(&spec, &ch).unwrap();
        let keep: std::collections::BTreeSet<_> =
            ["X1", "X2", "Y1", "Y2"].iter().map(|n| var(n)).collect();
        let m = joint.marginal(&keep).unwrap();
        // m variables follow joint order: X1, X2, Y1, Y2.
        for x1 in 0..2 {
            for x2 in 0..2 {
                let mass: f64 = (0..3)
                    .flat_map(|y1| (0..2).map(move |y2| (y1, y2)))
                    .map(|(y1, y2)| m.prob_of(&[x1, x2, y1, y2]))
                    .sum();
                assert!(mass > 0.0);
                for y1 in 0..3 {
                    for y2 in 0..2 {
                        assert_abs_diff_eq!(
                            m.prob_of(&[x1, x2, y1, y2]) / mass,
                            ch.w_of(x1, x2, y1, y2),
                            epsilon = 1e-12
                        );
                    }
                }
            }
        }
    }
}
