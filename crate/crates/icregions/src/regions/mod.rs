//! Linear inequality systems describing achievable rate regions, and the
//! constructions that map one region family into another (slices of the
//! common-rate layers, embeddings into the extended message set, and the
//! time-sharing lift).

mod builders;
mod transform;

pub use builders::{build_cmg, build_crng, build_hk, build_jxg, CrngVariant, JxgForm};
pub use transform::{embed_in_full, jxg_to_crng_embed, lift_with_time_sharing};

use crate::channel::ChannelError;
use crate::prob::ProbError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Membership tolerance: a point is inside when every inequality is satisfied
/// within this slack.
pub const MEMBER_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum RegionError {
    #[error("family mismatch: expected {expected}, got {got}")]
    FamilyMismatch { expected: String, got: String },
    #[error("input distribution failed factorization validation: {0}")]
    ValidationFailed(String),
    #[error("unknown rate variable `{0}`")]
    UnknownVariable(String),
    #[error("substitution makes inequality `{tag}` unsatisfiable (bound {bound})")]
    InfeasibleSubstitution { tag: String, bound: f64 },
    #[error("H(Q) = {qbits} bits is too small; the lift needs at least {needed:.6} bits")]
    QTooSmall { qbits: u32, needed: f64 },
    #[error("rate point is outside the region required by this construction: {0}")]
    PointOutsideRegion(String),
    #[error("invalid rate point: {0}")]
    InvalidPoint(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// Closed vocabulary of rate variables.
///
/// `R..` are message rates (two-digit per-message rates and the aggregate
/// `R0, R1, R2`), `r..` are the auxiliary binning rates internal to the
/// constrained-random-number-generator construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
#[allow(clippy::upper_case_acronyms)]
pub enum RateVar {
    R00,
    R01,
    R02,
    R10,
    R11,
    R12,
    R20,
    R21,
    R22,
    R0,
    R1,
    R2,
    Aux00,
    Aux01,
    Aux02,
    Aux10,
    Aux11,
    Aux12,
    Aux20,
    Aux21,
    Aux22,
}

impl RateVar {
    pub const ALL: [RateVar; 21] = [
        RateVar::R00,
        RateVar::R01,
        RateVar::R02,
        RateVar::R10,
        RateVar::R11,
        RateVar::R12,
        RateVar::R20,
        RateVar::R21,
        RateVar::R22,
        RateVar::R0,
        RateVar::R1,
        RateVar::R2,
        RateVar::Aux00,
        RateVar::Aux01,
        RateVar::Aux02,
        RateVar::Aux10,
        RateVar::Aux11,
        RateVar::Aux12,
        RateVar::Aux20,
        RateVar::Aux21,
        RateVar::Aux22,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RateVar::R00 => "R00",
            RateVar::R01 => "R01",
            RateVar::R02 => "R02",
            RateVar::R10 => "R10",
            RateVar::R11 => "R11",
            RateVar::R12 => "R12",
            RateVar::R20 => "R20",
            RateVar::R21 => "R21",
            RateVar::R22 => "R22",
            RateVar::R0 => "R0",
            RateVar::R1 => "R1",
            RateVar::R2 => "R2",
            RateVar::Aux00 => "r00",
            RateVar::Aux01 => "r01",
            RateVar::Aux02 => "r02",
            RateVar::Aux10 => "r10",
            RateVar::Aux11 => "r11",
            RateVar::Aux12 => "r12",
            RateVar::Aux20 => "r20",
            RateVar::Aux21 => "r21",
            RateVar::Aux22 => "r22",
        }
    }

    pub fn is_aux(&self) -> bool {
        matches!(
            self,
            RateVar::Aux00
                | RateVar::Aux01
                | RateVar::Aux02
                | RateVar::Aux10
                | RateVar::Aux11
                | RateVar::Aux12
                | RateVar::Aux20
                | RateVar::Aux21
                | RateVar::Aux22
        )
    }

    /// Message rate `R_{ij}`.
    pub fn msg(i: usize, j: usize) -> RateVar {
        match (i, j) {
            (0, 0) => RateVar::R00,
            (0, 1) => RateVar::R01,
            (0, 2) => RateVar::R02,
            (1, 0) => RateVar::R10,
            (1, 1) => RateVar::R11,
            (1, 2) => RateVar::R12,
            (2, 0) => RateVar::R20,
            (2, 1) => RateVar::R21,
            (2, 2) => RateVar::R22,
            _ => panic!("no rate variable R{i}{j}"),
        }
    }

    /// Auxiliary binning rate `r_{ij}`.
    pub fn aux(i: usize, j: usize) -> RateVar {
        match (i, j) {
            (0, 0) => RateVar::Aux00,
            (0, 1) => RateVar::Aux01,
            (0, 2) => RateVar::Aux02,
            (1, 0) => RateVar::Aux10,
            (1, 1) => RateVar::Aux11,
            (1, 2) => RateVar::Aux12,
            (2, 0) => RateVar::Aux20,
            (2, 1) => RateVar::Aux21,
            (2, 2) => RateVar::Aux22,
            _ => panic!("no rate variable r{i}{j}"),
        }
    }

    /// Aggregate rate `R_k` for `k` in `0..=2`.
    pub fn agg(k: usize) -> RateVar {
        match k {
            0 => RateVar::R0,
            1 => RateVar::R1,
            2 => RateVar::R2,
            _ => panic!("no rate variable R{k}"),
        }
    }
}

impl fmt::Display for RateVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RateVar {
    type Err = RegionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RateVar::ALL
            .iter()
            .find(|v| v.as_str() == s)
            .copied()
            .ok_or_else(|| RegionError::UnknownVariable(s.to_string()))
    }
}

impl From<RateVar> for String {
    fn from(v: RateVar) -> String {
        v.as_str().to_string()
    }
}

impl TryFrom<String> for RateVar {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse().map_err(|_| format!("unknown rate variable `{s}`"))
    }
}

/// Direction of a linear inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

/// One linear inequality over rate variables with a numeric entropy bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearInequality {
    pub coeffs: BTreeMap<RateVar, f64>,
    pub sense: Sense,
    pub bound: f64,
    pub tag: String,
}

impl LinearInequality {
    pub fn le(coeffs: Vec<(RateVar, f64)>, bound: f64, tag: impl Into<String>) -> Self {
        LinearInequality {
            coeffs: coeffs.into_iter().filter(|(_, c)| *c != 0.0).collect(),
            sense: Sense::Le,
            bound,
            tag: tag.into(),
        }
    }

    pub fn ge(coeffs: Vec<(RateVar, f64)>, bound: f64, tag: impl Into<String>) -> Self {
        LinearInequality {
            sense: Sense::Ge,
            ..LinearInequality::le(coeffs, bound, tag)
        }
    }

    /// Left-hand side evaluated at a full assignment; unassigned variables
    /// count as zero.
    pub fn lhs_at(&self, pt: &RatePoint) -> f64 {
        self.coeffs
            .iter()
            .map(|(v, c)| c * pt.get(*v).unwrap_or(0.0))
            .sum()
    }

    /// Whether the inequality holds at `pt` within `tol`.
    pub fn holds_at(&self, pt: &RatePoint, tol: f64) -> bool {
        let lhs = self.lhs_at(pt);
        match self.sense {
            Sense::Le => lhs <= self.bound + tol,
            Sense::Ge => lhs >= self.bound - tol,
        }
    }
}

/// A system of linear inequalities over rate variables, with implicit
/// nonnegativity of every variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalitySystem {
    #[serde(rename = "vars")]
    pub rate_vars: Vec<RateVar>,
    #[serde(rename = "aux")]
    pub aux_vars: Vec<RateVar>,
    pub ineqs: Vec<LinearInequality>,
}

impl InequalitySystem {
    pub fn new(
        rate_vars: Vec<RateVar>,
        aux_vars: Vec<RateVar>,
        ineqs: Vec<LinearInequality>,
    ) -> Result<Self, RegionError> {
        let sys = InequalitySystem {
            rate_vars,
            aux_vars,
            ineqs,
        };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<(), RegionError> {
        let mut seen = std::collections::BTreeSet::new();
        for v in self.rate_vars.iter().chain(&self.aux_vars) {
            if !seen.insert(*v) {
                return Err(RegionError::InvalidPoint(format!(
                    "variable {v} declared twice"
                )));
            }
        }
        for ineq in &self.ineqs {
            if !ineq.bound.is_finite() {
                return Err(RegionError::InvalidPoint(format!(
                    "inequality `{}` has non-finite bound",
                    ineq.tag
                )));
            }
            for v in ineq.coeffs.keys() {
                if !seen.contains(v) {
                    return Err(RegionError::UnknownVariable(v.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn num_inequalities(&self) -> usize {
        self.ineqs.len()
    }

    pub fn has_aux(&self) -> bool {
        !self.aux_vars.is_empty()
    }

    /// Direct membership test for systems without auxiliary variables.
    ///
    /// Systems with auxiliary variables need an LP feasibility check; see
    /// `polytope::lp_feasible`.
    pub fn is_member(&self, pt: &RatePoint, tol: f64) -> Result<bool, RegionError> {
        if self.has_aux() {
            return Err(RegionError::InvalidPoint(
                "system has auxiliary variables; use lp_feasible".into(),
            ));
        }
        self.require_assignment(pt)?;
        Ok(self.ineqs.iter().all(|iq| iq.holds_at(pt, tol)))
    }

    /// Tags of inequalities violated at `pt`, ignoring rows that involve
    /// auxiliary variables.
    pub fn violated_tags(&self, pt: &RatePoint, tol: f64) -> Vec<String> {
        self.ineqs
            .iter()
            .filter(|iq| iq.coeffs.keys().all(|v| !v.is_aux()))
            .filter(|iq| !iq.holds_at(pt, tol))
            .map(|iq| iq.tag.clone())
            .collect()
    }

    pub fn require_assignment(&self, pt: &RatePoint) -> Result<(), RegionError> {
        for v in &self.rate_vars {
            if pt.get(*v).is_none() {
                return Err(RegionError::InvalidPoint(format!("missing value for {v}")));
            }
        }
        Ok(())
    }

    /// Substitutes zero for `fixed` rate variables, dropping vacuous rows and
    /// renaming the survivors to the aggregate-rate convention when the
    /// per-encoder common rates were sliced away.
    pub fn slice(&self, fixed: &[RateVar]) -> Result<InequalitySystem, RegionError> {
        for v in fixed {
            if !self.rate_vars.contains(v) {
                return Err(RegionError::UnknownVariable(v.to_string()));
            }
        }
        let rename_layer = fixed.contains(&RateVar::R10) && fixed.contains(&RateVar::R20);
        let rename = |v: RateVar| -> RateVar {
            if !rename_layer {
                return v;
            }
            match v {
                RateVar::R00 => RateVar::R0,
                RateVar::R11 => RateVar::R1,
                RateVar::R22 => RateVar::R2,
                other => other,
            }
        };
        let mut ineqs = Vec::new();
        for iq in &self.ineqs {
            let coeffs: BTreeMap<RateVar, f64> = iq
                .coeffs
                .iter()
                .filter(|(v, _)| !fixed.contains(v))
                .map(|(v, c)| (rename(*v), *c))
                .collect();
            if coeffs.is_empty() {
                let ok = match iq.sense {
                    Sense::Le => 0.0 <= iq.bound + MEMBER_TOL,
                    Sense::Ge => 0.0 >= iq.bound - MEMBER_TOL,
                };
                if ok {
                    continue;
                }
                return Err(RegionError::InfeasibleSubstitution {
                    tag: iq.tag.clone(),
                    bound: iq.bound,
                });
            }
            ineqs.push(LinearInequality {
                coeffs,
                sense: iq.sense,
                bound: iq.bound,
                tag: iq.tag.clone(),
            });
        }
        let rate_vars: Vec<RateVar> = self
            .rate_vars
            .iter()
            .filter(|v| !fixed.contains(v))
            .map(|v| rename(*v))
            .collect();
        InequalitySystem::new(rate_vars, self.aux_vars.clone(), ineqs)
    }
}

/// Assignment of nonnegative rates (bits per symbol) to rate variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatePoint {
    values: BTreeMap<RateVar, f64>,
}

impl RatePoint {
    pub fn new(values: BTreeMap<RateVar, f64>) -> Result<Self, RegionError> {
        for (v, x) in &values {
            if !(x.is_finite() && *x >= 0.0) {
                return Err(RegionError::InvalidPoint(format!("{v} = {x}")));
            }
        }
        Ok(RatePoint { values })
    }

    pub fn from_pairs(pairs: &[(RateVar, f64)]) -> Result<Self, RegionError> {
        RatePoint::new(pairs.iter().copied().collect())
    }

    /// Parses `R0=0.5,R1=1` style assignments.
    pub fn parse(s: &str) -> Result<Self, RegionError> {
        let mut values = BTreeMap::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| RegionError::InvalidPoint(format!("expected NAME=VALUE in `{part}`")))?;
            let v: RateVar = name.trim().parse()?;
            let x: f64 = value
                .trim()
                .parse()
                .map_err(|_| RegionError::InvalidPoint(format!("bad number in `{part}`")))?;
            values.insert(v, x);
        }
        if values.is_empty() {
            return Err(RegionError::InvalidPoint("empty rate point".into()));
        }
        RatePoint::new(values)
    }

    pub fn get(&self, v: RateVar) -> Option<f64> {
        self.values.get(&v).copied()
    }

    pub fn values(&self) -> &BTreeMap<RateVar, f64> {
        &self.values
    }
}
