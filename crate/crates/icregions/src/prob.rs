//! Finite discrete probability: joint distributions over named variables,
//! marginalization, conditioning, entropy and mutual information in bits.
//!
//! All logs are base 2 and `0 log(1/0) = 0`. Distributions are dense tensors
//! in row-major order over the declared variable list.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Hard cap on the number of tensor cells (desk-scale guard).
pub const MAX_CELLS: usize = 1 << 26;

/// Normalization tolerance at construction time.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("empty variable selection")]
    EmptySelection,
    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("state space of {cells} cells exceeds the cap of {cap}")]
    StateSpaceTooLarge { cells: usize, cap: usize },
}

/// Name of one finite random variable inside a joint distribution.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: impl Into<String>) -> Result<Self, ProbError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ProbError::InvalidDistribution(
                "variable name must be nonempty".into(),
            ));
        }
        Ok(VariableId(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for VariableId {
    fn from(s: &str) -> Self {
        VariableId::new(s).expect("variable name must be nonempty")
    }
}

impl From<String> for VariableId {
    fn from(s: String) -> Self {
        VariableId::new(s).expect("variable name must be nonempty")
    }
}

/// Shorthand used all over the region builders and tests.
pub fn var(name: &str) -> VariableId {
    VariableId::from(name)
}

#[derive(Serialize, Deserialize)]
struct VarDecl {
    name: String,
    size: usize,
}

#[derive(Serialize, Deserialize)]
struct JointDistributionJson {
    vars: Vec<VarDecl>,
    probs: Vec<f64>,
}

/// Dense joint probability tensor over an ordered list of named variables.
///
/// Immutable after construction; all operations are pure.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointDistributionJson", into = "JointDistributionJson")]
pub struct JointDistribution {
    vars: Vec<(VariableId, usize)>,
    probs: Vec<f64>,
}

impl fmt::Debug for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JointDistribution(")?;
        for (k, (v, s)) in self.vars.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}:{s}")?;
        }
        write!(f, "; {} cells)", self.probs.len())
    }
}

impl TryFrom<JointDistributionJson> for JointDistribution {
    type Error = ProbError;
    fn try_from(j: JointDistributionJson) -> Result<Self, ProbError> {
        let vars = j
            .vars
            .into_iter()
            .map(|d| Ok((VariableId::new(d.name)?, d.size)))
            .collect::<Result<Vec<_>, ProbError>>()?;
        JointDistribution::new(vars, j.probs)
    }
}

impl From<JointDistribution> for JointDistributionJson {
    fn from(d: JointDistribution) -> Self {
        JointDistributionJson {
            vars: d
                .vars
                .iter()
                .map(|(v, s)| VarDecl {
                    name: v.name().to_string(),
                    size: *s,
                })
                .collect(),
            probs: d.probs,
        }
    }
}

impl JointDistribution {
    /// Builds a distribution, validating sizes, uniqueness, nonnegativity and
    /// normalization (within `1e-12`).
    pub fn new(vars: Vec<(VariableId, usize)>, probs: Vec<f64>) -> Result<Self, ProbError> {
        let mut cells: usize = 1;
        let mut seen = BTreeSet::new();
        for (v, size) in &vars {
            if *size == 0 {
                return Err(ProbError::InvalidDistribution(format!(
                    "variable `{v}` has empty alphabet"
                )));
            }
            if !seen.insert(v.clone()) {
                return Err(ProbError::InvalidDistribution(format!(
                    "duplicate variable `{v}`"
                )));
            }
            cells = cells
                .checked_mul(*size)
                .ok_or(ProbError::StateSpaceTooLarge {
                    cells: usize::MAX,
                    cap: MAX_CELLS,
                })?;
            if cells > MAX_CELLS {
                return Err(ProbError::StateSpaceTooLarge {
                    cells,
                    cap: MAX_CELLS,
                });
            }
        }
        if probs.len() != cells {
            return Err(ProbError::InvalidDistribution(format!(
                "tensor has {} entries, expected {}",
                probs.len(),
                cells
            )));
        }
        let mut total = 0.0;
        for &p in &probs {
            if !(p >= 0.0) {
                return Err(ProbError::InvalidDistribution(format!(
                    "negative or NaN entry {p}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(ProbError::InvalidDistribution(format!(
                "entries sum to {total}, expected 1 within {NORM_TOL:e}"
            )));
        }
        Ok(JointDistribution { vars, probs })
    }

    /// Uniform distribution over the product alphabet.
    pub fn uniform(vars: Vec<(VariableId, usize)>) -> Result<Self, ProbError> {
        let cells: usize = vars.iter().map(|(_, s)| *s).product();
        let p = 1.0 / cells as f64;
        JointDistribution::new(vars, vec![p; cells])
    }

    pub fn vars(&self) -> &[(VariableId, usize)] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_cells(&self) -> usize {
        self.probs.len()
    }

    pub fn size_of(&self, v: &VariableId) -> Option<usize> {
        self.vars.iter().find(|(w, _)| w == v).map(|(_, s)| *s)
    }

    fn axis(&self, v: &VariableId) -> Result<usize, ProbError> {
        self.vars
            .iter()
            .position(|(w, _)| w == v)
            .ok_or_else(|| ProbError::UnknownVariable(v.name().to_string()))
    }

    /// Row-major strides for the current variable order.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.vars.len()];
        for k in (0..self.vars.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.vars[k + 1].1;
        }
        strides
    }

    /// Probability of a full assignment given as one value per variable, in order.
    pub fn prob_of(&self, assignment: &[usize]) -> f64 {
        debug_assert_eq!(assignment.len(), self.vars.len());
        let strides = self.strides();
        let idx: usize = assignment
            .iter()
            .zip(&strides)
            .map(|(a, s)| a * s)
            .sum();
        self.probs[idx]
    }

    /// Marginal over `keep`, preserving this distribution's variable order.
    pub fn marginal(&self, keep: &BTreeSet<VariableId>) -> Result<JointDistribution, ProbError> {
        if keep.is_empty() {
            return Err(ProbError::EmptySelection);
        }
        for v in keep {
            self.axis(v)?;
        }
        let kept: Vec<usize> = (0..self.vars.len())
            .filter(|&k| keep.contains(&self.vars[k].0))
            .collect();
        let out_vars: Vec<(VariableId, usize)> =
            kept.iter().map(|&k| self.vars[k].clone()).collect();
        let out_cells: usize = out_vars.iter().map(|(_, s)| *s).product();

        let mut out_strides = vec![0usize; self.vars.len()];
        let mut acc = 1usize;
        for &k in kept.iter().rev() {
            out_strides[k] = acc;
            acc *= self.vars[k].1;
        }

        let mut out = vec![0.0f64; out_cells];
        // Walk every cell once, mapping it to its projection.
        let mut digits = vec![0usize; self.vars.len()];
        let mut out_idx = 0usize;
        for (idx, &p) in self.probs.iter().enumerate() {
            if p != 0.0 {
                out[out_idx] += p;
            }
            if idx + 1 == self.probs.len() {
                break;
            }
            // Increment mixed-radix counter and maintain out_idx incrementally.
            for k in (0..self.vars.len()).rev() {
                digits[k] += 1;
                out_idx += out_strides[k];
                if digits[k] < self.vars[k].1 {
                    break;
                }
                digits[k] = 0;
                out_idx -= out_strides[k] * self.vars[k].1;
            }
        }
        Ok(JointDistribution {
            vars: out_vars,
            probs: out,
        })
    }

    fn check_query(&self, q: &EntropyQuery) -> Result<(), ProbError> {
        if q.target.is_empty() {
            return Err(ProbError::EmptySelection);
        }
        for v in &q.target {
            self.axis(v)?;
            if q.given.contains(v) {
                return Err(ProbError::OverlappingSets(v.name().to_string()));
            }
        }
        for v in &q.given {
            self.axis(v)?;
        }
        Ok(())
    }

    /// Conditional entropy `H(target | given)` in bits.
    pub fn entropy(&self, q: &EntropyQuery) -> Result<f64, ProbError> {
        self.check_query(q)?;
        let mut all = q.target.clone();
        all.extend(q.given.iter().cloned());
        let m_tg = self.marginal(&all)?;
        if q.given.is_empty() {
            let mut h = 0.0;
            for &p in &m_tg.probs {
                if p > 0.0 {
                    h -= p * p.log2();
                }
            }
            return Ok(h.max(0.0));
        }
        // Derive the conditioning marginal from m_tg so that p(g) >= p(t,g)
        // holds exactly in floating point.
        let m_g = m_tg.marginal(&q.given)?;
        let g_axes: Vec<usize> = (0..m_tg.vars.len())
            .filter(|&k| q.given.contains(&m_tg.vars[k].0))
            .collect();
        let mut g_strides = vec![0usize; m_tg.vars.len()];
        let mut acc = 1usize;
        for &k in g_axes.iter().rev() {
            g_strides[k] = acc;
            acc *= m_tg.vars[k].1;
        }
        let mut h = 0.0;
        let mut digits = vec![0usize; m_tg.vars.len()];
        let mut g_idx = 0usize;
        for (idx, &p) in m_tg.probs.iter().enumerate() {
            if p > 0.0 {
                let pg = m_g.probs[g_idx];
                if pg > 0.0 {
                    h += p * (pg / p).log2();
                }
            }
            if idx + 1 == m_tg.probs.len() {
                break;
            }
            for k in (0..m_tg.vars.len()).rev() {
                digits[k] += 1;
                g_idx += g_strides[k];
                if digits[k] < m_tg.vars[k].1 {
                    break;
                }
                digits[k] = 0;
                g_idx -= g_strides[k] * m_tg.vars[k].1;
            }
        }
        Ok(h.max(0.0))
    }

    /// Conditional mutual information `I(a; b | given)` in bits.
    ///
    /// Tiny negative values from floating-point cancellation are clamped to 0.
    pub fn mutual_info(
        &self,
        a: &BTreeSet<VariableId>,
        b: &BTreeSet<VariableId>,
        given: &BTreeSet<VariableId>,
    ) -> Result<f64, ProbError> {
        if a.is_empty() || b.is_empty() {
            return Err(ProbError::EmptySelection);
        }
        for v in a {
            if b.contains(v) || given.contains(v) {
                return Err(ProbError::OverlappingSets(v.name().to_string()));
            }
        }
        for v in b {
            if given.contains(v) {
                return Err(ProbError::OverlappingSets(v.name().to_string()));
            }
        }
        let h_a_g = self.entropy(&EntropyQuery::new(a.clone(), given.clone())?)?;
        let mut bg = b.clone();
        bg.extend(given.iter().cloned());
        let h_a_bg = self.entropy(&EntropyQuery::new(a.clone(), bg)?)?;
        let mi = h_a_g - h_a_bg;
        debug_assert!(mi > -1e-9, "mutual information {mi} below -1e-9");
        Ok(if mi < 0.0 { 0.0 } else { mi })
    }

    /// `H(target | given)` with string names; convenience for builders and tests.
    pub fn h(&self, target: &[&str], given: &[&str]) -> Result<f64, ProbError> {
        self.entropy(&EntropyQuery::from_names(target, given)?)
    }

    /// `I(a; b | given)` with string names.
    pub fn mi(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64, ProbError> {
        let to_set = |names: &[&str]| names.iter().map(|n| var(n)).collect::<BTreeSet<_>>();
        self.mutual_info(&to_set(a), &to_set(b), &to_set(given))
    }
}

/// A conditional-entropy query `H(target | given)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyQuery {
    pub target: BTreeSet<VariableId>,
    pub given: BTreeSet<VariableId>,
}

impl EntropyQuery {
    pub fn new(
        target: BTreeSet<VariableId>,
        given: BTreeSet<VariableId>,
    ) -> Result<Self, ProbError> {
        if target.is_empty() {
            return Err(ProbError::EmptySelection);
        }
        for v in &target {
            if given.contains(v) {
                return Err(ProbError::OverlappingSets(v.name().to_string()));
            }
        }
        Ok(EntropyQuery { target, given })
    }

    pub fn from_names(target: &[&str], given: &[&str]) -> Result<Self, ProbError> {
        EntropyQuery::new(
            target.iter().map(|n| var(n)).collect(),
            given.iter().map(|n| var(n)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn bit(name: &str) -> (VariableId, usize) {
        (var(name), 2)
    }

    pub(crate) fn random_joint(rng: &mut ChaCha8Rng, sizes: &[(&str, usize)]) -> JointDistribution {
        let vars: Vec<_> = sizes.iter().map(|(n, s)| (var(n), *s)).collect();
        let cells: usize = sizes.iter().map(|(_, s)| *s).product();
        let mut probs: Vec<f64> = (0..cells).map(|_| -rng.gen::<f64>().ln()).collect();
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        // Renormalize exactly enough for the 1e-12 construction gate.
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        JointDistribution::new(vars, probs).unwrap()
    }

    #[test]
    fn fair_coin_has_one_bit() {
        let d = JointDistribution::uniform(vec![bit("A")]).unwrap();
        assert_abs_diff_eq!(d.h(&["A"], &[]).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn skewed_coin_matches_formula() {
        let d = JointDistribution::new(vec![bit("A")], vec![0.25, 0.75]).unwrap();
        let expect = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert_abs_diff_eq!(d.h(&["A"], &[]).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn copy_has_zero_conditional_entropy_and_one_bit_mi() {
        let d = JointDistribution::new(
            vec![bit("A"), bit("B")],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        assert_abs_diff_eq!(d.h(&["A"], &["B"]).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.mi(&["A"], &["B"], &[]).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn independent_bits_have_zero_mi() {
        let d = JointDistribution::uniform(vec![bit("A"), bit("B")]).unwrap();
        assert_abs_diff_eq!(d.mi(&["A"], &["B"], &[]).unwrap(), 0.0, epsilon = 1e-12);
        let m = d.marginal(&[var("A")].into_iter().collect()).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn marginal_keeps_declaration_order_and_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = random_joint(&mut rng, &[("A", 3), ("B", 2), ("C", 4)]);
        let keep: BTreeSet<_> = [var("C"), var("A")].into_iter().collect();
        let m = d.marginal(&keep).unwrap();
        assert_eq!(m.vars()[0].0.name(), "A");
        assert_eq!(m.vars()[1].0.name(), "C");
        // Explicit double sum over B.
        for a in 0..3 {
            for c in 0..4 {
                let mut want = 0.0;
                for b in 0..2 {
                    want += d.prob_of(&[a, b, c]);
                }
                assert_abs_diff_eq!(m.prob_of(&[a, c]), want, epsilon = 1e-14);
            }
        }
        let total: f64 = m.probs().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mi_matches_identity_oracle_on_random_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let d = random_joint(&mut rng, &[("A", 2), ("B", 3), ("C", 2), ("D", 2)]);
            let mi = d.mi(&["A"], &["B"], &["C"]).unwrap();
            let oracle = d.h(&["A"], &["C"]).unwrap() + d.h(&["B"], &["C"]).unwrap()
                - d.h(&["A", "B"], &["C"]).unwrap();
            assert_abs_diff_eq!(mi, oracle, epsilon = 1e-10);
        }
    }

    #[test]
    fn chain_rule_and_xor_bound_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let d = random_joint(&mut rng, &[("A", 2), ("B", 2), ("C", 3)]);
            let lhs = d.h(&["A", "B"], &["C"]).unwrap();
            let chain = d.h(&["A"], &["B", "C"]).unwrap() + d.h(&["B"], &["C"]).unwrap();
            assert_abs_diff_eq!(lhs, chain, epsilon = 1e-10);
            let xor = d.h(&["A"], &["B", "C"]).unwrap() + d.h(&["B"], &["A", "C"]).unwrap();
            assert!(lhs >= xor - 1e-10);
        }
    }

    #[test]
    fn entropy_bounded_by_log_alphabet() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let d = random_joint(&mut rng, &[("A", 3), ("B", 4)]);
            let h = d.h(&["A", "B"], &[]).unwrap();
            assert!(h >= 0.0 && h <= (12f64).log2() + 1e-12);
        }
    }

    #[test]
    fn query_validation_errors() {
        let d = JointDistribution::uniform(vec![bit("A"), bit("B")]).unwrap();
        assert!(matches!(
            d.h(&["Z"], &[]),
            Err(ProbError::UnknownVariable(_))
        ));
        assert!(matches!(
            d.marginal(&BTreeSet::new()),
            Err(ProbError::EmptySelection)
        ));
        assert!(matches!(
            d.mi(&["A"], &["A"], &[]),
            Err(ProbError::OverlappingSets(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let d = JointDistribution::new(
            vec![(var("Z00"), 2), (var("X1"), 2)],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"Z00\""));
        let back: JointDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"vars":[{"name":"A","size":2}],"probs":[0.5,0.6]}"#;
        assert!(serde_json::from_str::<JointDistribution>(bad).is_err());
    }
}
