//! Polytope operations on rate-region inequality systems: LP membership,
//! support functions, Fourier-Motzkin projection and region comparison.

mod simplex;

use crate::regions::{InequalitySystem, LinearInequality, RatePoint, RateVar, Sense};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use simplex::{LpOutcome, Rel, Row, Simplex};
use std::collections::BTreeMap;

/// Constraint-violation tolerance for feasibility checks.
pub const FEAS_TOL: f64 = 1e-9;

/// Default cap on intermediate Fourier-Motzkin system size.
pub const FM_CAP: usize = 20_000;

#[derive(Debug, thiserror::Error)]
pub enum PolytopeError {
    #[error("no value assigned to rate variable `{0}`")]
    MissingAssignment(RateVar),
    #[error("variable sets do not match: {0}")]
    VariableSetMismatch(String),
    #[error("region is empty")]
    Infeasible,
    #[error("support function is unbounded in the given direction")]
    UnboundedSystem,
    #[error("Fourier-Motzkin blowup: {rows} intermediate rows exceed the cap of {cap}")]
    BlowupCapExceeded { rows: usize, cap: usize },
    #[error("unknown variable `{0}` for this system")]
    UnknownVariable(String),
}

/// Column layout shared by the LP-backed operations: rate vars then aux vars.
fn column_order(sys: &InequalitySystem) -> Vec<RateVar> {
    sys.rate_vars
        .iter()
        .chain(&sys.aux_vars)
        .copied()
        .collect()
}

fn to_rows(sys: &InequalitySystem, cols: &[RateVar]) -> Vec<Row> {
    sys.ineqs
        .iter()
        .map(|iq| {
            let mut coeffs = vec![0.0; cols.len()];
            for (v, c) in &iq.coeffs {
                let k = cols.iter().position(|w| w == v).expect("validated system");
                coeffs[k] = *c;
            }
            Row {
                coeffs,
                rel: match iq.sense {
                    Sense::Le => Rel::Le,
                    Sense::Ge => Rel::Ge,
                },
                rhs: iq.bound,
            }
        })
        .collect()
}

/// True iff some assignment of the auxiliary variables (all `>= 0`) satisfies
/// every inequality once the rate variables are fixed to `fixed`.
///
/// Constraint violations up to [`FEAS_TOL`] are accepted.
pub fn lp_feasible(sys: &InequalitySystem, fixed: &RatePoint) -> Result<bool, PolytopeError> {
    let mut values = Vec::with_capacity(sys.rate_vars.len());
    for v in &sys.rate_vars {
        values.push(
            fixed
                .get(*v)
                .ok_or(PolytopeError::MissingAssignment(*v))?,
        );
    }
    let mut rows = Vec::new();
    for iq in &sys.ineqs {
        let mut rhs = iq.bound;
        let mut coeffs = vec![0.0; sys.aux_vars.len()];
        let mut any_aux = false;
        for (v, c) in &iq.coeffs {
            if let Some(k) = sys.aux_vars.iter().position(|w| w == v) {
                coeffs[k] = *c;
                any_aux = true;
            } else {
                let k = sys.rate_vars.iter().position(|w| w == v).unwrap();
                rhs -= c * values[k];
            }
        }
        let ok = match iq.sense {
            Sense::Le => 0.0 <= rhs + FEAS_TOL,
            Sense::Ge => 0.0 >= rhs - FEAS_TOL,
        };
        if !any_aux {
            if !ok {
                return Ok(false);
            }
            continue;
        }
        // Relax by the tolerance so boundary points are accepted.
        let (rel, rhs) = match iq.sense {
            Sense::Le => (Rel::Le, rhs + FEAS_TOL),
            Sense::Ge => (Rel::Ge, rhs - FEAS_TOL),
        };
        rows.push(Row { coeffs, rel, rhs });
    }
    if rows.is_empty() {
        return Ok(true);
    }
    let objective = vec![0.0; sys.aux_vars.len()];
    Ok(matches!(
        Simplex::maximize(sys.aux_vars.len(), &objective, &rows),
        LpOutcome::Optimal { .. }
    ))
}

/// Maximum of `direction . R` over the region (auxiliary variables free).
pub fn support(
    sys: &InequalitySystem,
    direction: &BTreeMap<RateVar, f64>,
) -> Result<f64, PolytopeError> {
    support_point(sys, direction).map(|(v, _)| v)
}

/// Support value together with a maximizing rate point.
pub fn support_point(
    sys: &InequalitySystem,
    direction: &BTreeMap<RateVar, f64>,
) -> Result<(f64, RatePoint), PolytopeError> {
    let cols = column_order(sys);
    for v in direction.keys() {
        if !sys.rate_vars.contains(v) {
            return Err(PolytopeError::UnknownVariable(v.to_string()));
        }
    }
    let objective: Vec<f64> = cols
        .iter()
        .map(|v| direction.get(v).copied().unwrap_or(0.0))
        .collect();
    let rows = to_rows(sys, &cols);
    match Simplex::maximize(cols.len(), &objective, &rows) {
        LpOutcome::Optimal { value, x } => {
            let values: BTreeMap<RateVar, f64> = sys
                .rate_vars
                .iter()
                .enumerate()
                .map(|(k, v)| (*v, x[k].max(0.0)))
                .collect();
            Ok((value, RatePoint::new(values).expect("nonnegative LP solution")))
        }
        LpOutcome::Infeasible => Err(PolytopeError::Infeasible),
        LpOutcome::Unbounded => Err(PolytopeError::UnboundedSystem),
    }
}

/// Internal float form of a `<=` inequality used during elimination.
#[derive(Clone, Debug)]
struct FmRow {
    coeffs: Vec<f64>,
    rhs: f64,
    tag: Option<String>,
}

impl FmRow {
    fn normalize(&mut self) {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale > 1e-12 {
            for c in &mut self.coeffs {
                *c /= scale;
            }
            self.rhs /= scale;
        }
    }

    fn key(&self) -> Vec<i64> {
        self.coeffs
            .iter()
            .map(|c| (c / 1e-9).round() as i64)
            .collect()
    }
}

/// Projects the system onto the complement of `vars` by Fourier-Motzkin
/// elimination.
///
/// The implicit nonnegativity of each eliminated variable is part of the
/// system being projected. With `prune`, LP-redundant rows are removed after
/// elimination; the projection property is unaffected.
pub fn fm_eliminate(
    sys: &InequalitySystem,
    vars: &[RateVar],
    prune: bool,
) -> Result<InequalitySystem, PolytopeError> {
    fm_eliminate_with_cap(sys, vars, prune, FM_CAP)
}

pub fn fm_eliminate_with_cap(
    sys: &InequalitySystem,
    vars: &[RateVar],
    prune: bool,
    cap: usize,
) -> Result<InequalitySystem, PolytopeError> {
    let cols = column_order(sys);
    for v in vars {
        if !cols.contains(v) {
            return Err(PolytopeError::UnknownVariable(v.to_string()));
        }
    }
    let mut rows: Vec<FmRow> = sys
        .ineqs
        .iter()
        .map(|iq| {
            let mut coeffs = vec![0.0; cols.len()];
            for (v, c) in &iq.coeffs {
                let k = cols.iter().position(|w| w == v).unwrap();
                coeffs[k] = *c;
            }
            let (coeffs, rhs) = match iq.sense {
                Sense::Le => (coeffs, iq.bound),
                Sense::Ge => (coeffs.into_iter().map(|c| -c).collect(), -iq.bound),
            };
            let mut row = FmRow {
                coeffs,
                rhs,
                tag: Some(iq.tag.clone()),
            };
            row.normalize();
            row
        })
        .collect();
    // Nonnegativity of each eliminated variable joins the row set.
    for v in vars {
        let k = cols.iter().position(|w| w == v).unwrap();
        let mut coeffs = vec![0.0; cols.len()];
        coeffs[k] = -1.0;
        rows.push(FmRow {
            coeffs,
            rhs: 0.0,
            tag: None,
        });
    }

    for v in vars {
        let axis = cols.iter().position(|w| w == v).unwrap();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for row in rows.drain(..) {
            let a = row.coeffs[axis];
            if a > 1e-12 {
                pos.push(row);
            } else if a < -1e-12 {
                neg.push(row);
            } else {
                zero.push(row);
            }
        }
        let mut next = zero;
        for p in &pos {
            let ap = p.coeffs[axis];
            for n in &neg {
                let an = n.coeffs[axis];
                // (-an) * p + ap * n cancels the axis coefficient.
                let mut coeffs: Vec<f64> = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(pc, nc)| -an * pc + ap * nc)
                    .collect();
                coeffs[axis] = 0.0;
                let mut row = FmRow {
                    coeffs,
                    rhs: -an * p.rhs + ap * n.rhs,
                    tag: None,
                };
                row.normalize();
                next.push(row);
            }
        }
        // Duplicate removal: identical coefficient patterns keep the tightest bound.
        let mut best: BTreeMap<Vec<i64>, FmRow> = BTreeMap::new();
        let mut trivial = Vec::new();
        for row in next {
            let scale = row.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if scale <= 1e-12 {
                // Variable-free row: keep only if it witnesses infeasibility.
                if row.rhs < -1e-12 {
                    trivial.push(row);
                }
                continue;
            }
            match best.entry(row.key()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(row);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    if row.rhs < e.get().rhs {
                        e.insert(row);
                    }
                }
            }
        }
        rows = best.into_values().chain(trivial).collect();
        if rows.len() > cap {
            return Err(PolytopeError::BlowupCapExceeded {
                rows: rows.len(),
                cap,
            });
        }
    }

    let keep: Vec<usize> = (0..cols.len())
        .filter(|&k| !vars.contains(&cols[k]))
        .collect();
    if prune {
        rows = prune_redundant(rows, &keep);
    }
    let mut ineqs = Vec::new();
    for row in &rows {
        let coeffs: Vec<(RateVar, f64)> = keep
            .iter()
            .filter(|&&k| row.coeffs[k].abs() > 1e-12)
            .map(|&k| (cols[k], row.coeffs[k]))
            .collect();
        if coeffs.is_empty() && row.rhs >= -1e-12 {
            continue;
        }
        let tag = row.tag.clone().unwrap_or_else(|| "fm".into());
        if coeffs.is_empty() {
            // Infeasibility witness: encode as 0 >= positive on some survivor.
            let anchor = keep.first().map(|&k| cols[k]);
            if let Some(v) = anchor {
                ineqs.push(LinearInequality::le(vec![(v, 0.0)], row.rhs, tag));
                // A zero-coefficient row is rejected by the constructor; use
                // the first surviving variable with coefficient zero replaced
                // by a contradiction row: v <= rhs and v >= 0 with rhs < 0.
                let last = ineqs.len() - 1;
                ineqs[last] = LinearInequality::le(vec![(v, 1.0)], row.rhs, ineqs[last].tag.clone());
            }
            continue;
        }
        ineqs.push(LinearInequality::le(coeffs, row.rhs, tag));
    }
    let rate_vars: Vec<RateVar> = sys
        .rate_vars
        .iter()
        .filter(|v| !vars.contains(v))
        .copied()
        .collect();
    let aux_vars: Vec<RateVar> = sys
        .aux_vars
        .iter()
        .filter(|v| !vars.contains(v))
        .copied()
        .collect();
    InequalitySystem::new(rate_vars, aux_vars, ineqs)
        .map_err(|e| PolytopeError::VariableSetMismatch(e.to_string()))
}

/// Drops rows whose bound cannot be attained given the remaining rows and
/// the nonnegativity of the surviving variables.
fn prune_redundant(rows: Vec<FmRow>, keep: &[usize]) -> Vec<FmRow> {
    let mut alive: Vec<bool> = vec![true; rows.len()];
    for r in 0..rows.len() {
        let others: Vec<Row> = rows
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != r && alive[*k])
            .map(|(_, row)| Row {
                coeffs: keep.iter().map(|&k| row.coeffs[k]).collect(),
                rel: Rel::Le,
                rhs: row.rhs,
            })
            .collect();
        let objective: Vec<f64> = keep.iter().map(|&k| rows[r].coeffs[k]).collect();
        match Simplex::maximize(keep.len(), &objective, &others) {
            LpOutcome::Optimal { value, .. } if value <= rows[r].rhs + FEAS_TOL => {
                alive[r] = false;
            }
            _ => {}
        }
    }
    rows.into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(r, _)| r)
        .collect()
}

/// Numeric comparison of two regions over the same rate variables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n_dirs: usize,
    pub n_points: usize,
    pub seed: u64,
    /// Largest `|h_A - h_B|` over the sampled directions.
    pub max_support_gap: f64,
    /// Largest `h_A - h_B` (positive when A pokes out of B).
    pub max_a_minus_b: f64,
    pub max_b_minus_a: f64,
    pub a_only: usize,
    pub b_only: usize,
    pub both: usize,
    pub neither: usize,
    pub witnesses_a_only: Vec<BTreeMap<String, f64>>,
    pub witnesses_b_only: Vec<BTreeMap<String, f64>>,
}

fn membership(sys: &InequalitySystem, pt: &RatePoint) -> Result<bool, PolytopeError> {
    if sys.has_aux() {
        lp_feasible(sys, pt)
    } else {
        Ok(sys
            .is_member(pt, FEAS_TOL)
            .expect("point assigns all rate variables"))
    }
}

/// Samples random support directions and random box points and cross-tables
/// membership between two systems; deterministic for a given seed.
pub fn compare_regions(
    sys_a: &InequalitySystem,
    sys_b: &InequalitySystem,
    n_dirs: usize,
    n_points: usize,
    seed: u64,
) -> Result<ComparisonReport, PolytopeError> {
    let mut vars_a = sys_a.rate_vars.clone();
    let mut vars_b = sys_b.rate_vars.clone();
    vars_a.sort();
    vars_b.sort();
    if vars_a != vars_b {
        return Err(PolytopeError::VariableSetMismatch(format!(
            "A has [{}], B has [{}]",
            sys_a
                .rate_vars
                .iter()
                .map(|v| v.as_str())
                .collect::<Vec<_>>()
                .join(","),
            sys_b
                .rate_vars
                .iter()
                .map(|v| v.as_str())
                .collect::<Vec<_>>()
                .join(","),
        )));
    }
    let vars = sys_a.rate_vars.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Bounding box: per-axis support of either region, with headroom so
    // points outside both regions are sampled too. Axes with zero support
    // are pinned at zero, otherwise no sampled point could be a member.
    let mut hi = vec![0.0f64; vars.len()];
    for (k, v) in vars.iter().enumerate() {
        let dir: BTreeMap<RateVar, f64> = [(*v, 1.0)].into_iter().collect();
        let a = support(sys_a, &dir)?;
        let b = support(sys_b, &dir)?;
        let cap = a.max(b);
        hi[k] = if cap < FEAS_TOL { 0.0 } else { cap * 1.1 };
    }

    let dirs: Vec<Vec<f64>> = (0..n_dirs)
        .map(|_| {
            let mut d: Vec<f64> = (0..vars.len())
                .map(|_| {
                    // Box-Muller from two uniforms; components i.i.d. normal.
                    let u1: f64 = rng.gen::<f64>().max(1e-12);
                    let u2: f64 = rng.gen();
                    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                })
                .collect();
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            for x in &mut d {
                *x /= norm;
            }
            d
        })
        .collect();
    let points: Vec<Vec<f64>> = (0..n_points)
        .map(|_| hi.iter().map(|&h| rng.gen::<f64>() * h).collect())
        .collect();

    let gaps: Vec<(f64, f64)> = dirs
        .par_iter()
        .map(|d| {
            let dir: BTreeMap<RateVar, f64> =
                vars.iter().zip(d).map(|(v, c)| (*v, *c)).collect();
            let ha = support(sys_a, &dir).expect("bounded region");
            let hb = support(sys_b, &dir).expect("bounded region");
            (ha, hb)
        })
        .collect();
    let memberships: Vec<(bool, bool)> = points
        .par_iter()
        .map(|p| {
            let pt = RatePoint::from_pairs(
                &vars.iter().zip(p).map(|(v, x)| (*v, *x)).collect::<Vec<_>>(),
            )
            .expect("box points are nonnegative");
            let ma = membership(sys_a, &pt).expect("complete assignment");
            let mb = membership(sys_b, &pt).expect("complete assignment");
            (ma, mb)
        })
        .collect();

    let mut report = ComparisonReport {
        n_dirs,
        n_points,
        seed,
        max_support_gap: 0.0,
        max_a_minus_b: f64::NEG_INFINITY,
        max_b_minus_a: f64::NEG_INFINITY,
        a_only: 0,
        b_only: 0,
        both: 0,
        neither: 0,
        witnesses_a_only: Vec::new(),
        witnesses_b_only: Vec::new(),
    };
    for (ha, hb) in &gaps {
        report.max_support_gap = report.max_support_gap.max((ha - hb).abs());
        report.max_a_minus_b = report.max_a_minus_b.max(ha - hb);
        report.max_b_minus_a = report.max_b_minus_a.max(hb - ha);
    }
    if gaps.is_empty() {
        report.max_a_minus_b = 0.0;
        report.max_b_minus_a = 0.0;
    }
    for ((ma, mb), p) in memberships.iter().zip(&points) {
        match (ma, mb) {
            (true, true) => report.both += 1,
            (false, false) => report.neither += 1,
            (true, false) => {
                report.a_only += 1;
                if report.witnesses_a_only.len() < 5 {
                    report.witnesses_a_only.push(witness(&vars, p));
                }
            }
            (false, true) => {
                report.b_only += 1;
                if report.witnesses_b_only.len() < 5 {
                    report.witnesses_b_only.push(witness(&vars, p));
                }
            }
        }
    }
    Ok(report)
}

fn witness(vars: &[RateVar], p: &[f64]) -> BTreeMap<String, f64> {
    vars.iter()
        .zip(p)
        .map(|(v, x)| (v.as_str().to_string(), *x))
        .collect()
}
