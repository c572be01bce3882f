//! Constructors turning a validated `(input distribution, channel)` pair into
//! the inequality system of each region family.
//!
//! Bound constants are conditional entropies and mutual informations of the
//! composed joint distribution; every inequality carries a tag naming the
//! template it instantiates.

use super::{InequalitySystem, LinearInequality, RateVar, RegionError};
use crate::channel::{compose, AuxInputSpec, ChannelSpec, Family};
use crate::prob::JointDistribution;

/// Which form of the JXG system to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JxgForm {
    /// Quintuple bounds over `(R00, R10, R11, R20, R22)`.
    Raw,
    /// Triplet bounds over `(R0, R1, R2)` after rate splitting.
    Reduced,
}

/// Which CRNG system to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrngVariant {
    /// Subset bounds with auxiliary binning rates, 37 inequalities.
    Base,
    /// Extended message set, 147 inequalities.
    Full,
    /// Aggregate-rate system over `(R0, R1, R2)` without auxiliary rates.
    Tilde,
    /// The Fourier-Motzkin eliminated form of the `R10 = R20 = 0` slice.
    Eliminated0,
}

fn check_family(spec: &AuxInputSpec, expected: Family) -> Result<(), RegionError> {
    if spec.family != expected {
        return Err(RegionError::FamilyMismatch {
            expected: expected.name().to_string(),
            got: spec.family.name().to_string(),
        });
    }
    let report = spec.validate_factorization()?;
    if !report.passed() {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {:.3e}", c.name, c.value))
            .collect();
        return Err(RegionError::ValidationFailed(failed.join("; ")));
    }
    Ok(())
}

/// Composed joint plus infallible entropy/MI accessors for builder templates.
struct Bounds {
    joint: JointDistribution,
}

impl Bounds {
    fn new(spec: &AuxInputSpec, ch: &ChannelSpec) -> Result<Self, RegionError> {
        Ok(Bounds {
            joint: compose(spec, ch)?,
        })
    }

    fn h(&self, target: &[&str], given: &[&str]) -> f64 {
        self.joint.h(target, given).expect("template variable names")
    }

    fn mi(&self, a: &[&str], b: &[&str], given: &[&str]) -> f64 {
        self.joint.mi(a, b, given).expect("template variable names")
    }
}

fn other(i: usize) -> usize {
    3 - i
}

fn y(i: usize) -> &'static str {
    if i == 1 {
        "Y1"
    } else {
        "Y2"
    }
}

/// Han-Kobayashi system: seven templates instantiated for each `i`.
pub fn build_hk(spec: &AuxInputSpec, ch: &ChannelSpec) -> Result<InequalitySystem, RegionError> {
    check_family(spec, Family::Hk)?;
    let b = Bounds::new(spec, ch)?;
    let u0 = "U0";
    let u = |i: usize, j: usize| -> &'static str {
        match (i, j) {
            (1, 0) => "U10",
            (1, 1) => "U11",
            (2, 0) => "U20",
            (2, 2) => "U22",
            _ => unreachable!(),
        }
    };
    let mut ineqs = Vec::new();
    for i in [1usize, 2] {
        let o = other(i);
        let (ui0, uii, uo0, yi) = (u(i, 0), u(i, i), u(o, 0), y(i));
        let r = |a: usize, c: usize| RateVar::msg(a, c);
        ineqs.push(LinearInequality::le(
            vec![(r(i, 0), 1.0)],
            b.mi(&[ui0], &[yi], &[u0, uo0, uii]),
            format!("hk-Ri0[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(r(o, 0), 1.0)],
            b.mi(&[uo0], &[yi], &[u0, ui0, uii]),
            format!("hk-Ri'0[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(r(i, i), 1.0)],
            b.mi(&[uii], &[yi], &[u0, "U10", "U20"]),
            format!("hk-Rii[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(r(1, 0), 1.0), (r(2, 0), 1.0)],
            b.mi(&["U10", "U20"], &[yi], &[u0, uii]),
            format!("hk-R10+R20[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(r(i, 0), 1.0), (r(i, i), 1.0)],
            b.mi(&[ui0, uii], &[yi], &[u0, uo0]),
            format!("hk-Ri0+Rii[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(r(o, 0), 1.0), (r(i, i), 1.0)],
            b.mi(&[uo0, uii], &[yi], &[u0, ui0]),
            format!("hk-Ri'0+Rii[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(r(1, 0), 1.0), (r(2, 0), 1.0), (r(i, i), 1.0)],
            b.mi(&["U10", "U20", uii], &[yi], &[u0]),
            format!("hk-R10+R20+Rii[i={i}]"),
        ));
    }
    InequalitySystem::new(
        vec![RateVar::R10, RateVar::R11, RateVar::R20, RateVar::R22],
        vec![],
        ineqs,
    )
}

/// Chong-Motani-Garg system over `(R1, R2)`: four templates per `i`.
pub fn build_cmg(spec: &AuxInputSpec, ch: &ChannelSpec) -> Result<InequalitySystem, RegionError> {
    check_family(spec, Family::CmgJxg)?;
    let b = Bounds::new(spec, ch)?;
    let mut ineqs = Vec::new();
    for i in [1usize, 2] {
        let o = other(i);
        let (xi, xo) = (if i == 1 { "X1" } else { "X2" }, if i == 1 { "X2" } else { "X1" });
        let (ui, uo) = (if i == 1 { "U1" } else { "U2" }, if i == 1 { "U2" } else { "U1" });
        let (yi, yo) = (y(i), y(o));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::agg(i), 1.0)],
            b.mi(&[xi], &[yi], &["U0", uo]),
            format!("cmg-Ri[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::R1, 1.0), (RateVar::R2, 1.0)],
            b.mi(&[xi], &[yi], &["U0", "U1", "U2"]) + b.mi(&[ui, xo], &[yo], &["U0"]),
            format!("cmg-R1+R2-a[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::R1, 1.0), (RateVar::R2, 1.0)],
            b.mi(&["U2", "X1"], &["Y1"], &["U0", "U1"]) + b.mi(&["U1", "X2"], &["Y2"], &["U0", "U2"]),
            format!("cmg-R1+R2-b[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::agg(i), 2.0), (RateVar::agg(o), 1.0)],
            b.mi(&[uo, xi], &[yi], &["U0"])
                + b.mi(&[xi], &[yi], &["U0", "U1", "U2"])
                + b.mi(&[ui, xo], &[yo], &["U0", uo]),
            format!("cmg-2Ri+Ri'[i={i}]"),
        ));
    }
    InequalitySystem::new(vec![RateVar::R1, RateVar::R2], vec![], ineqs)
}

/// Jiang-Xin-Garg system, raw quintuple or reduced triplet form.
pub fn build_jxg(
    spec: &AuxInputSpec,
    ch: &ChannelSpec,
    form: JxgForm,
) -> Result<InequalitySystem, RegionError> {
    check_family(spec, Family::CmgJxg)?;
    let b = Bounds::new(spec, ch)?;
    let mut ineqs = Vec::new();
    for i in [1usize, 2] {
        let o = other(i);
        let (xi, xo) = (if i == 1 { "X1" } else { "X2" }, if i == 1 { "X2" } else { "X1" });
        let (ui, uo) = (if i == 1 { "U1" } else { "U2" }, if i == 1 { "U2" } else { "U1" });
        let (yi, yo) = (y(i), y(o));
        match form {
            JxgForm::Raw => {
                let r = RateVar::msg;
                // Bounds at decoder i over the quintuple; the fourth and
                // fifth rows share one mutual-information constant.
                let d_i = b.mi(&[xi, uo], &[yi], &["U0"]);
                ineqs.push(LinearInequality::le(
                    vec![(r(i, i), 1.0)],
                    b.mi(&[xi], &[yi], &["U0", "U1", "U2"]),
                    format!("jxg-raw-Rii[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(r(i, 0), 1.0), (r(i, i), 1.0)],
                    b.mi(&[xi], &[yi], &["U0", uo]),
                    format!("jxg-raw-Ri0+Rii[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(r(i, i), 1.0), (r(o, 0), 1.0)],
                    b.mi(&[xi, uo], &[yi], &["U0", ui]),
                    format!("jxg-raw-Rii+Ri'0[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(r(i, 0), 1.0), (r(i, i), 1.0), (r(o, 0), 1.0)],
                    d_i,
                    format!("jxg-raw-Ri0+Rii+Ri'0-a[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(r(i, 0), 1.0), (r(i, i), 1.0), (r(o, 0), 1.0)],
                    d_i,
                    format!("jxg-raw-Ri0+Rii+Ri'0-b[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(r(0, 0), 1.0), (r(i, 0), 1.0), (r(i, i), 1.0), (r(o, 0), 1.0)],
                    b.mi(&["U0", xi, uo], &[yi], &[]),
                    format!("jxg-raw-R00+Ri0+Rii+Ri'0[i={i}]"),
                ));
            }
            JxgForm::Reduced => {
                let (ri, ro) = (RateVar::agg(i), RateVar::agg(o));
                ineqs.push(LinearInequality::le(
                    vec![(ri, 1.0)],
                    b.mi(&[xi], &[yi], &["U0", uo]),
                    format!("jxg-Ri[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(RateVar::R0, 1.0), (ri, 1.0)],
                    b.mi(&["U0", xi, uo], &[yi], &[]),
                    format!("jxg-R0+Ri[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(RateVar::R1, 1.0), (RateVar::R2, 1.0)],
                    b.mi(&["U2", "X1"], &["Y1"], &["U0", "U1"])
                        + b.mi(&["U1", "X2"], &["Y2"], &["U0", "U2"]),
                    format!("jxg-R1+R2-a[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(RateVar::R1, 1.0), (RateVar::R2, 1.0)],
                    b.mi(&[uo, xi], &[yi], &["U0"]) + b.mi(&[xo], &[yo], &["U0", "U1", "U2"]),
                    format!("jxg-R1+R2-b[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(RateVar::R0, 1.0), (RateVar::R1, 1.0), (RateVar::R2, 1.0)],
                    b.mi(&["U0", uo, xi], &[yi], &[]) + b.mi(&[xo], &[yo], &["U0", "U1", "U2"]),
                    format!("jxg-R0+R1+R2[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(ri, 2.0), (ro, 1.0)],
                    b.mi(&[uo, xi], &[yi], &["U0"])
                        + b.mi(&[xi], &[yi], &["U0", "U1", "U2"])
                        + b.mi(&[ui, xo], &[yo], &["U0", uo]),
                    format!("jxg-2Ri+Ri'[i={i}]"),
                ));
                ineqs.push(LinearInequality::le(
                    vec![(RateVar::R0, 1.0), (ri, 2.0), (ro, 1.0)],
                    b.mi(&["U0", uo, xi], &[yi], &[])
                        + b.mi(&[xi], &[yi], &["U0", "U1", "U2"])
                        + b.mi(&[ui, xo], &[yo], &["U0", uo]),
                    format!("jxg-R0+2Ri+Ri'[i={i}]"),
                ));
            }
        }
    }
    let rate_vars = match form {
        JxgForm::Raw => vec![
            RateVar::R00,
            RateVar::R10,
            RateVar::R11,
            RateVar::R20,
            RateVar::R22,
        ],
        JxgForm::Reduced => vec![RateVar::R0, RateVar::R1, RateVar::R2],
    };
    InequalitySystem::new(rate_vars, vec![], ineqs)
}

/// Nonempty subsets of `items` as index masks, in ascending mask order.
fn subsets<T: Copy>(items: &[T]) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for mask in 1usize..(1 << items.len()) {
        out.push(
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, v)| *v)
                .collect(),
        );
    }
    out
}

fn z_name(i: usize, j: usize) -> &'static str {
    match (i, j) {
        (0, 0) => "Z00",
        (0, 1) => "Z01",
        (0, 2) => "Z02",
        (1, 0) => "Z10",
        (1, 1) => "Z11",
        (1, 2) => "Z12",
        (2, 0) => "Z20",
        (2, 1) => "Z21",
        (2, 2) => "Z22",
        _ => unreachable!(),
    }
}

fn subset_tag(members: &[(usize, usize)]) -> String {
    members
        .iter()
        .map(|(i, j)| format!("{i}{j}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// CRNG systems: subset form (base/full), aggregate form (tilde), and the
/// eliminated form of the `R10 = R20 = 0` slice.
pub fn build_crng(
    spec: &AuxInputSpec,
    ch: &ChannelSpec,
    variant: CrngVariant,
) -> Result<InequalitySystem, RegionError> {
    let family = match variant {
        CrngVariant::Full => Family::CrngFull,
        _ => Family::Crng,
    };
    check_family(spec, family)?;
    let b = Bounds::new(spec, ch)?;
    match variant {
        CrngVariant::Base => build_crng_subsets(
            &b,
            vec![(0, 0)],
            |i| vec![(i, 0), (i, i)],
            |j| vec![(0, 0), (1, 0), (2, 0), (j, j)],
        ),
        CrngVariant::Full => build_crng_subsets(
            &b,
            vec![(0, 0), (0, 1), (0, 2)],
            |i| vec![(i, 0), (i, i), (i, other(i))],
            |j| vec![(0, 0), (0, j), (1, 0), (2, 0), (j, j), (other(j), j)],
        ),
        CrngVariant::Tilde => build_crng_tilde(&b),
        CrngVariant::Eliminated0 => build_crng_eliminated0(&b),
    }
}

fn build_crng_subsets(
    b: &Bounds,
    s0: Vec<(usize, usize)>,
    s_i: impl Fn(usize) -> Vec<(usize, usize)>,
    d_j: impl Fn(usize) -> Vec<(usize, usize)>,
) -> Result<InequalitySystem, RegionError> {
    let mut ineqs = Vec::new();
    let s0_names: Vec<&str> = s0.iter().map(|&(i, j)| z_name(i, j)).collect();
    // Shared-message layer: sum over each nonempty subset of S0.
    for sub in subsets(&s0) {
        let names: Vec<&str> = sub.iter().map(|&(i, j)| z_name(i, j)).collect();
        let mut coeffs = Vec::new();
        for &(i, j) in &sub {
            coeffs.push((RateVar::msg(i, j), 1.0));
            coeffs.push((RateVar::aux(i, j), 1.0));
        }
        let tag = if s0.len() == 1 {
            "crng-R0+r0".to_string()
        } else {
            format!("crngfull-sum-S0[S={{{}}}]", subset_tag(&sub))
        };
        ineqs.push(LinearInequality::le(coeffs, b.h(&names, &[]), tag));
    }
    // Per-encoder layers, conditioned on the whole shared layer.
    for i in [1usize, 2] {
        let si = s_i(i);
        for sub in subsets(&si) {
            let names: Vec<&str> = sub.iter().map(|&(a, c)| z_name(a, c)).collect();
            let mut coeffs = Vec::new();
            for &(a, c) in &sub {
                coeffs.push((RateVar::msg(a, c), 1.0));
                coeffs.push((RateVar::aux(a, c), 1.0));
            }
            let prefix = if s0.len() == 1 { "crng" } else { "crngfull" };
            ineqs.push(LinearInequality::le(
                coeffs,
                b.h(&names, &s0_names),
                format!("{prefix}-sum-Rj+rj[i={i},S={{{}}}]", subset_tag(&sub)),
            ));
        }
    }
    // Decoder layers: binning-rate lower bounds for each nonempty subset.
    for j in [1usize, 2] {
        let dj = d_j(j);
        for sub in subsets(&dj) {
            let names: Vec<&str> = sub.iter().map(|&(a, c)| z_name(a, c)).collect();
            let rest: Vec<&str> = dj
                .iter()
                .filter(|m| !sub.contains(m))
                .map(|&(a, c)| z_name(a, c))
                .collect();
            let mut given = vec![y(j)];
            given.extend(rest);
            let coeffs: Vec<(RateVar, f64)> = sub
                .iter()
                .map(|&(a, c)| (RateVar::aux(a, c), 1.0))
                .collect();
            let prefix = if s0.len() == 1 { "crng" } else { "crngfull" };
            ineqs.push(LinearInequality::ge(
                coeffs,
                b.h(&names, &given),
                format!("{prefix}-sum-rj[j={j},D={{{}}}]", subset_tag(&sub)),
            ));
        }
    }
    let mut rate_vars = Vec::new();
    let mut aux_vars = Vec::new();
    for &(i, j) in s0.iter().chain(&s_i(1)).chain(&s_i(2)) {
        rate_vars.push(RateVar::msg(i, j));
        aux_vars.push(RateVar::aux(i, j));
    }
    InequalitySystem::new(rate_vars, aux_vars, ineqs)
}

fn build_crng_tilde(b: &Bounds) -> Result<InequalitySystem, RegionError> {
    let mut ineqs = Vec::new();
    for i in [1usize, 2] {
        let o = other(i);
        let (zi0, zii) = (z_name(i, 0), z_name(i, i));
        let (zo0, zoo) = (z_name(o, 0), z_name(o, o));
        let (yi, yo) = (y(i), y(o));
        let (ri, ro) = (RateVar::agg(i), RateVar::agg(o));
        ineqs.push(LinearInequality::le(
            vec![(ri, 1.0)],
            b.mi(&[zi0, zii], &[yi], &["Z00", zo0]),
            format!("crng-Ri[i={i}]"),
        ));
        // R0 alone is bounded by the same constant as R0 + Ri; kept as its
        // own row so the aggregate system is closed over (R0, R1, R2).
        let full_i = b.mi(&["Z00", "Z10", "Z20", zii], &[yi], &[]);
        ineqs.push(LinearInequality::le(
            vec![(RateVar::R0, 1.0)],
            full_i,
            format!("crng-R0[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::R0, 1.0), (ri, 1.0)],
            full_i,
            format!("crng-R0+Ri[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::R1, 1.0), (RateVar::R2, 1.0)],
            b.mi(&["Z20", "Z11"], &["Y1"], &["Z00", "Z10"])
                + b.mi(&["Z10", "Z22"], &["Y2"], &["Z00", "Z20"]),
            format!("crng-R1+R2-1[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::R1, 1.0), (RateVar::R2, 1.0)],
            b.mi(&["Z10", "Z20", zii], &[yi], &["Z00"])
                + b.mi(&[zoo], &[yo], &["Z00", "Z10", "Z20"]),
            format!("crng-R1+R2-2[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::R0, 1.0), (RateVar::R1, 1.0), (RateVar::R2, 1.0)],
            full_i + b.mi(&[zoo], &[yo], &["Z00", "Z10", "Z20"]),
            format!("crng-R0+R1+R2[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(ri, 2.0), (ro, 1.0)],
            b.mi(&["Z10", "Z20", zii], &[yi], &["Z00"])
                + b.mi(&[zii], &[yi], &["Z00", "Z10", "Z20"])
                + b.mi(&[zi0, zoo], &[yo], &["Z00", zo0]),
            format!("crng-2Ri+Ri'[i={i}]"),
        ));
        ineqs.push(LinearInequality::le(
            vec![(RateVar::R0, 1.0), (ri, 2.0), (ro, 1.0)],
            full_i
                + b.mi(&[zii], &[yi], &["Z00", "Z10", "Z20"])
                + b.mi(&[zi0, zoo], &[yo], &["Z00", zo0]),
            format!("crng-R0+2Ri+Ri'[i={i}]"),
        ));
    }
    InequalitySystem::new(vec![RateVar::R0, RateVar::R1, RateVar::R2], vec![], ineqs)
}

/// The 37 eliminated templates, instantiated for each `i`.
fn build_crng_eliminated0(b: &Bounds) -> Result<InequalitySystem, RegionError> {
    let mut ineqs = Vec::new();
    for i in [1usize, 2] {
        let o = other(i);
        let (zi0, zii) = (z_name(i, 0), z_name(i, i));
        let (zo0, zoo) = (z_name(o, 0), z_name(o, o));
        let (yi, yo) = (y(i), y(o));
        let (ri, ro) = (RateVar::agg(i), RateVar::agg(o));
        let r0 = RateVar::R0;

        // Shared mutual-information constants.
        let i_corr_i = b.mi(&[zi0], &[zii], &["Z00"]);
        let i_corr_1 = b.mi(&["Z10"], &["Z11"], &["Z00"]);
        let i_corr_2 = b.mi(&["Z20"], &["Z22"], &["Z00"]);
        let a4 = b.mi(&[zii], &[yi, "Z10", "Z20"], &["Z00"]);
        let a5 = b.mi(&[zi0, zii], &[yi, zo0], &["Z00"]);
        let a7 = b.mi(&["Z00", zii], &[yi, "Z10", "Z20"], &[]);
        let a8 = b.mi(&["Z00", zi0, zii], &[yi, zo0], &[]);
        let a9 = b.mi(&["Z00", zo0, zii], &[yi, zi0], &[]);
        let a10 = b.mi(&["Z00", "Z10", "Z20", zii], &[yi], &[]);
        let side_i0 = b.mi(&[zi0], &[yo, zo0, zoo], &["Z00"]);
        let side_00_i0 = b.mi(&["Z00", zi0], &[yo, zo0, zoo], &[]);
        let side_common = b.mi(&["Z00", "Z10", "Z20"], &[yo, zoo], &[]);
        let pair_o = b.mi(&[zi0, zoo], &[yo, zo0], &["Z00"]);
        let pair_o_00 = b.mi(&["Z00", zi0, zoo], &[yo, zo0], &[]);
        let tri_o = b.mi(&["Z10", "Z20", zoo], &[yo], &["Z00"]);
        let tri_o_00 = b.mi(&["Z00", "Z10", "Z20", zoo], &[yo], &[]);
        let own_tri = b.mi(&["Z10", "Z20", zii], &[yi], &["Z00"]);

        let mut push = |coeffs: Vec<(RateVar, f64)>, bound: f64, k: usize| {
            ineqs.push(LinearInequality::le(
                coeffs,
                bound,
                format!("crng-fme{k}[i={i}]"),
            ));
        };

        push(vec![(r0, 1.0)], b.mi(&["Z00"], &[yi, "Z10", "Z20", zii], &[]), 0);
        push(vec![(r0, 1.0)], b.mi(&["Z00", zi0], &[yi, zo0, zii], &[]), 1);
        push(vec![(r0, 1.0)], b.mi(&["Z00", zo0], &[yi, zi0, zii], &[]), 2);
        push(vec![(r0, 1.0)], b.mi(&["Z00", "Z10", "Z20"], &[yi, zii], &[]), 3);
        push(vec![(ri, 1.0)], a4, 4);
        push(vec![(ri, 1.0)], a5, 5);
        push(vec![(ri, 1.0)], a4 + side_i0 - i_corr_i, 6);
        push(vec![(r0, 1.0), (ri, 1.0)], a7, 7);
        push(vec![(r0, 1.0), (ri, 1.0)], a8, 8);
        push(vec![(r0, 1.0), (ri, 1.0)], a9, 9);
        push(vec![(r0, 1.0), (ri, 1.0)], a10, 10);
        push(vec![(r0, 1.0), (ri, 1.0)], a4 + side_00_i0 - i_corr_i, 11);
        push(vec![(r0, 1.0), (ri, 1.0)], a4 + side_common - i_corr_i, 12);
        push(vec![(r0, 1.0), (ri, 1.0)], a7 + side_i0 - i_corr_i, 13);
        push(vec![(r0, 1.0), (ri, 1.0)], a9 + side_i0 - i_corr_i, 14);
        push(vec![(ri, 1.0), (ro, 1.0)], a4 + pair_o - i_corr_i, 15);
        push(vec![(ri, 1.0), (ro, 1.0)], a4 + tri_o - i_corr_i, 16);
        push(
            vec![(RateVar::R1, 1.0), (RateVar::R2, 1.0)],
            b.mi(&["Z20", "Z11"], &["Y1", "Z10"], &["Z00"])
                + b.mi(&["Z10", "Z22"], &["Y2", "Z20"], &["Z00"])
                - i_corr_1
                - i_corr_2,
            17,
        );
        push(vec![(r0, 2.0), (ri, 1.0)], a7 + side_00_i0 - i_corr_i, 18);
        push(vec![(r0, 2.0), (ri, 1.0)], a7 + side_common - i_corr_i, 19);
        push(vec![(r0, 2.0), (ri, 1.0)], a9 + side_00_i0 - i_corr_i, 20);
        push(vec![(r0, 2.0), (ri, 1.0)], a9 + side_common - i_corr_i, 21);
        push(
            vec![(ri, 2.0), (ro, 1.0)],
            own_tri + a4 + pair_o - i_corr_1 - i_corr_2,
            22,
        );
        push(
            vec![(r0, 1.0), (ri, 1.0), (ro, 1.0)],
            a4 + pair_o_00 - i_corr_i,
            23,
        );
        push(
            vec![(r0, 1.0), (ri, 1.0), (ro, 1.0)],
            a4 + tri_o_00 - i_corr_i,
            24,
        );
        push(
            vec![(r0, 1.0), (ri, 1.0), (ro, 1.0)],
            a7 + pair_o - i_corr_i,
            25,
        );
        push(
            vec![(r0, 1.0), (ri, 1.0), (ro, 1.0)],
            a7 + tri_o - i_corr_i,
            26,
        );
        push(
            vec![(r0, 1.0), (ri, 1.0), (ro, 1.0)],
            a9 + pair_o - i_corr_1 - i_corr_2,
            27,
        );
        push(
            vec![(r0, 2.0), (ri, 1.0), (ro, 1.0)],
            a7 + pair_o_00 - i_corr_i,
            28,
        );
        push(
            vec![(r0, 2.0), (ri, 1.0), (ro, 1.0)],
            a7 + tri_o_00 - i_corr_i,
            29,
        );
        push(
            vec![(r0, 2.0), (ri, 1.0), (ro, 1.0)],
            a9 + tri_o_00 - i_corr_i,
            30,
        );
        push(
            vec![(r0, 2.0), (RateVar::R1, 1.0), (RateVar::R2, 1.0)],
            b.mi(&["Z00", "Z20", "Z11"], &["Y1", "Z10"], &[])
                + b.mi(&["Z00", "Z10", "Z22"], &["Y2", "Z20"], &[])
                - i_corr_1
                - i_corr_2,
            31,
        );
        push(
            vec![(r0, 1.0), (ri, 2.0), (ro, 1.0)],
            own_tri + a4 + pair_o_00 - i_corr_1 - i_corr_2,
            32,
        );
        push(
            vec![(r0, 1.0), (ri, 2.0), (ro, 1.0)],
            a10 + a4 + pair_o - i_corr_1 - i_corr_2,
            33,
        );
        push(
            vec![(r0, 2.0), (ri, 2.0), (ro, 1.0)],
            a10 + a4 + pair_o_00 - i_corr_1 - i_corr_2,
            34,
        );
        push(
            vec![(r0, 2.0), (ri, 2.0), (ro, 1.0)],
            a10 + a7 + pair_o - i_corr_1 - i_corr_2,
            35,
        );
        push(
            vec![(r0, 3.0), (ri, 2.0), (ro, 1.0)],
            a10 + a7 + pair_o_00 - i_corr_1 - i_corr_2,
            36,
        );
    }
    InequalitySystem::new(vec![RateVar::R0, RateVar::R1, RateVar::R2], vec![], ineqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::build;
    use crate::regions::{RatePoint, MEMBER_TOL};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn system_sizes_match_the_enumerations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = build::random_channel(&mut rng, 2, 2, 2, 2);
        let hk = build::random_hk(&mut rng, 2, (2, 2, 2), (2, 2, 2));
        let cmg = build::random_cmg(&mut rng, 2, (2, 2), (2, 2));
        let crng = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
        let full = crate::regions::embed_in_full(&crng).unwrap();
        assert_eq!(build_hk(&hk, &ch).unwrap().num_inequalities(), 14);
        assert_eq!(build_cmg(&cmg, &ch).unwrap().num_inequalities(), 8);
        assert_eq!(
            build_jxg(&cmg, &ch, JxgForm::Raw).unwrap().num_inequalities(),
            12
        );
        assert_eq!(
            build_jxg(&cmg, &ch, JxgForm::Reduced)
                .unwrap()
                .num_inequalities(),
            14
        );
        assert_eq!(
            build_crng(&crng, &ch, CrngVariant::Base)
                .unwrap()
                .num_inequalities(),
            37
        );
        assert_eq!(
            build_crng(&full, &ch, CrngVariant::Full)
                .unwrap()
                .num_inequalities(),
            147
        );
        assert_eq!(
            build_crng(&crng, &ch, CrngVariant::Tilde)
                .unwrap()
                .num_inequalities(),
            16
        );
        assert_eq!(
            build_crng(&crng, &ch, CrngVariant::Eliminated0)
                .unwrap()
                .num_inequalities(),
            74
        );
    }

    #[test]
    fn family_mismatch_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = build::random_channel(&mut rng, 2, 2, 2, 2);
        let cmg = build::random_cmg(&mut rng, 2, (2, 2), (2, 2));
        assert!(matches!(
            build_hk(&cmg, &ch),
            Err(RegionError::FamilyMismatch { .. })
        ));
        let crng = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
        assert!(matches!(
            build_crng(&crng, &ch, CrngVariant::Full),
            Err(RegionError::FamilyMismatch { .. })
        ));
    }

    #[test]
    fn noiseless_channel_gives_unit_private_bounds() {
        let ch = crate::channel::ChannelSpec::noiseless_binary();
        let hk = build_hk(&build::hk_trivial_uniform(), &ch).unwrap();
        let r11_cap = hk
            .ineqs
            .iter()
            .find(|iq| iq.tag == "hk-Rii[i=1]")
            .unwrap();
        assert_abs_diff_eq!(r11_cap.bound, 1.0, epsilon = 1e-12);

        let cmg = build_cmg(&build::cmg_trivial_uniform(), &ch).unwrap();
        for i in [1, 2] {
            let cap = cmg
                .ineqs
                .iter()
                .find(|iq| iq.tag == format!("cmg-Ri[i={i}]"))
                .unwrap();
            assert_abs_diff_eq!(cap.bound, 1.0, epsilon = 1e-12);
        }

        let reduced = build_jxg(&build::cmg_trivial_uniform(), &ch, JxgForm::Reduced).unwrap();
        let pt = RatePoint::parse("R0=0,R1=1,R2=1").unwrap();
        assert!(reduced.is_member(&pt, MEMBER_TOL).unwrap());
    }

    #[test]
    fn bounds_equal_direct_entropy_recomputation() {
        // Every bound constant is a +/- combination of conditional entropies;
        // recompute a few templates through the entropy route.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
        let ch = build::random_channel(&mut rng, 2, 2, 2, 2);
        let joint = crate::channel::compose(&spec, &ch).unwrap();
        let sys = build_crng(&spec, &ch, CrngVariant::Tilde).unwrap();
        let ri = sys.ineqs.iter().find(|iq| iq.tag == "crng-Ri[i=1]").unwrap();
        let oracle = joint.h(&["Z10", "Z11"], &["Z00", "Z20"]).unwrap()
            - joint.h(&["Z10", "Z11"], &["Y1", "Z00", "Z20"]).unwrap();
        assert_abs_diff_eq!(ri.bound, oracle, epsilon = 1e-10);

        let base = build_crng(&spec, &ch, CrngVariant::Base).unwrap();
        let row = base
            .ineqs
            .iter()
            .find(|iq| iq.tag == "crng-sum-rj[j=1,D={00,11}]")
            .unwrap();
        let oracle = joint.h(&["Z00", "Z11"], &["Y1", "Z10", "Z20"]).unwrap();
        assert_abs_diff_eq!(row.bound, oracle, epsilon = 1e-10);

        let cmg_spec = build::random_cmg(&mut rng, 2, (2, 2), (2, 2));
        let cmg = build_cmg(&cmg_spec, &ch).unwrap();
        let joint = crate::channel::compose(&cmg_spec, &ch).unwrap();
        let cap = cmg.ineqs.iter().find(|iq| iq.tag == "cmg-Ri[i=2]").unwrap();
        let oracle = joint.h(&["X2"], &["U0", "U1"]).unwrap()
            - joint.h(&["X2"], &["Y2", "U0", "U1"]).unwrap();
        assert_abs_diff_eq!(cap.bound, oracle, epsilon = 1e-10);
    }

    #[test]
    fn jxg_reduced_slice_matches_cmg_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3 {
            let spec = build::random_cmg(&mut rng, 2, (2, 2), (2, 2));
            let ch = build::random_channel(&mut rng, 2, 2, 2, 2);
            let cmg = build_cmg(&spec, &ch).unwrap();
            let sliced = build_jxg(&spec, &ch, JxgForm::Reduced)
                .unwrap()
                .slice(&[crate::regions::RateVar::R0])
                .unwrap();
            let hi: Vec<f64> = [crate::regions::RateVar::R1, crate::regions::RateVar::R2]
                .iter()
                .map(|v| {
                    let dir = [(*v, 1.0)].into_iter().collect();
                    crate::polytope::support(&cmg, &dir).unwrap() * 1.2 + 1e-6
                })
                .collect();
            for _ in 0..200 {
                let pt = RatePoint::from_pairs(&[
                    (crate::regions::RateVar::R1, rng.gen::<f64>() * hi[0]),
                    (crate::regions::RateVar::R2, rng.gen::<f64>() * hi[1]),
                ])
                .unwrap();
                assert_eq!(
                    cmg.is_member(&pt, MEMBER_TOL).unwrap(),
                    sliced.is_member(&pt, MEMBER_TOL).unwrap()
                );
            }
        }
    }

    #[test]
    fn tilde_slice_drops_aggregate_only_rows() {
        let spec = build::crng_trivial_uniform();
        let ch = crate::channel::ChannelSpec::noiseless_binary();
        let tilde = build_crng(&spec, &ch, CrngVariant::Tilde).unwrap();
        let sliced = tilde.slice(&[crate::regions::RateVar::R0]).unwrap();
        // The two R0-only rows become vacuous at R0 = 0.
        assert_eq!(sliced.num_inequalities(), 14);
    }

    #[test]
    fn monotone_under_bound_enlargement() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = build::random_crng(&mut rng, 2, (2, 2, 2), (2, 2, 2));
        let ch = build::random_channel(&mut rng, 2, 2, 2, 2);
        let sys = build_crng(&spec, &ch, CrngVariant::Eliminated0).unwrap();
        let mut enlarged = sys.clone();
        for iq in &mut enlarged.ineqs {
            iq.bound += 0.05;
        }
        for _ in 0..100 {
            let pt = RatePoint::from_pairs(&[
                (crate::regions::RateVar::R0, rng.gen::<f64>() * 1.5),
                (crate::regions::RateVar::R1, rng.gen::<f64>() * 1.5),
                (crate::regions::RateVar::R2, rng.gen::<f64>() * 1.5),
            ])
            .unwrap();
            if sys.is_member(&pt, MEMBER_TOL).unwrap() {
                assert!(enlarged.is_member(&pt, MEMBER_TOL).unwrap());
            }
        }
    }
}
