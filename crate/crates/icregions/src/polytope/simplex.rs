//! Dense two-phase simplex for small region problems.
//!
//! All structural variables are nonnegative. Rows are normalized so the
//! largest coefficient magnitude is one, and pivoting follows Bland's rule,
//! which rules out cycling.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rel {
    Le,
    Ge,
}

#[derive(Clone, Debug)]
pub(crate) struct Row {
    pub coeffs: Vec<f64>,
    pub rel: Rel,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-9;
// Rows are scaled to unit max coefficient, so the phase-1 residual of a
// feasible system sits at rounding level; anything above this is a genuine
// constraint violation.
const PHASE1_TOL: f64 = 1e-9;
const MAX_ITERS: usize = 200_000;

pub(crate) struct Simplex {
    ncols: usize,
    nstructural: usize,
    artificial_start: usize,
    tableau: Vec<Vec<f64>>, // m rows of length ncols + 1 (rhs last)
    basis: Vec<usize>,
}

impl Simplex {
    /// Maximizes `objective . x` over `rows` with `x >= 0`.
    pub(crate) fn maximize(nvars: usize, objective: &[f64], rows: &[Row]) -> LpOutcome {
        assert_eq!(objective.len(), nvars);
        // Normalize and orient rows so every RHS is nonnegative.
        let mut prepared: Vec<Row> = Vec::with_capacity(rows.len());
        for row in rows {
            let mut r = row.clone();
            let scale = r.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if scale <= PIVOT_TOL {
                // No variables: a pure bound check.
                let ok = match r.rel {
                    Rel::Le => 0.0 <= r.rhs + COST_TOL,
                    Rel::Ge => 0.0 >= r.rhs - COST_TOL,
                };
                if ok {
                    continue;
                }
                return LpOutcome::Infeasible;
            }
            for c in &mut r.coeffs {
                *c /= scale;
            }
            r.rhs /= scale;
            if r.rhs < 0.0 {
                for c in &mut r.coeffs {
                    *c = -*c;
                }
                r.rhs = -r.rhs;
                r.rel = match r.rel {
                    Rel::Le => Rel::Ge,
                    Rel::Ge => Rel::Le,
                };
            }
            prepared.push(r);
        }
        let m = prepared.len();
        let nslack = m;
        let nartificial = prepared.iter().filter(|r| r.rel == Rel::Ge).count();
        let ncols = nvars + nslack + nartificial;
        let artificial_start = nvars + nslack;

        let mut tableau = vec![vec![0.0; ncols + 1]; m];
        let mut basis = vec![0usize; m];
        let mut art = artificial_start;
        for (r, row) in prepared.iter().enumerate() {
            tableau[r][..nvars].copy_from_slice(&row.coeffs);
            tableau[r][ncols] = row.rhs;
            match row.rel {
                Rel::Le => {
                    tableau[r][nvars + r] = 1.0;
                    basis[r] = nvars + r;
                }
                Rel::Ge => {
                    tableau[r][nvars + r] = -1.0;
                    tableau[r][art] = 1.0;
                    basis[r] = art;
                    art += 1;
                }
            }
        }

        let mut s = Simplex {
            ncols,
            nstructural: nvars,
            artificial_start,
            tableau,
            basis,
        };

        if nartificial > 0 {
            // Phase 1: maximize -(sum of artificials).
            let mut cost = vec![0.0; s.ncols + 1];
            for j in s.artificial_start..s.ncols {
                cost[j] = -1.0;
            }
            s.price_out(&mut cost);
            if !s.iterate(&mut cost, s.ncols) {
                return LpOutcome::Unbounded; // cannot happen: bounded below by 0
            }
            // The rhs slot carries the negated objective, here sum of artificials.
            if cost[s.ncols] > PHASE1_TOL {
                return LpOutcome::Infeasible;
            }
            s.evict_artificials();
        }

        // Phase 2 over real objective; artificial columns are frozen.
        let mut cost = vec![0.0; s.ncols + 1];
        cost[..nvars].copy_from_slice(objective);
        s.price_out(&mut cost);
        if !s.iterate(&mut cost, s.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; s.nstructural];
        for (r, &b) in s.basis.iter().enumerate() {
            if b < s.nstructural {
                x[b] = s.tableau[r][s.ncols];
            }
        }
        LpOutcome::Optimal {
            value: -cost[s.ncols],
            x,
        }
    }

    /// Subtracts basic rows from the cost row so basic columns read zero;
    /// afterwards the rhs slot holds the negated objective value.
    fn price_out(&self, cost: &mut [f64]) {
        for (r, &b) in self.basis.iter().enumerate() {
            let c = cost[b];
            if c != 0.0 {
                for j in 0..=self.ncols {
                    cost[j] -= c * self.tableau[r][j];
                }
            }
        }
    }

    /// Pivots until optimal. Entering columns are restricted to `< col_limit`.
    /// Returns false when unbounded.
    fn iterate(&mut self, cost: &mut [f64], col_limit: usize) -> bool {
        for _ in 0..MAX_ITERS {
            // Bland: entering = lowest-index improving column.
            let entering = (0..col_limit).find(|&j| cost[j] > COST_TOL);
            let Some(j) = entering else {
                return true;
            };
            // Ratio test; ties resolved by lowest basis variable index.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.tableau.len() {
                let a = self.tableau[r][j];
                if a > PIVOT_TOL {
                    let ratio = self.tableau[r][self.ncols] / a;
                    match leave {
                        None => leave = Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - PIVOT_TOL
                                || (ratio < lratio + PIVOT_TOL && self.basis[r] < self.basis[lr])
                            {
                                leave = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, j, cost);
        }
        // Bland's rule terminates in exact arithmetic; treat exhaustion as
        // optimality of the best basis found, which the tolerances absorb.
        true
    }

    fn pivot(&mut self, r: usize, j: usize, cost: &mut [f64]) {
        let piv = self.tableau[r][j];
        for v in &mut self.tableau[r] {
            *v /= piv;
        }
        let pivot_row = self.tableau[r].clone();
        for (rr, row) in self.tableau.iter_mut().enumerate() {
            if rr != r && row[j].abs() > 0.0 {
                let f = row[j];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[j] = 0.0;
            }
        }
        let f = cost[j];
        if f != 0.0 {
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            cost[j] = 0.0;
        }
        self.basis[r] = j;
    }

    /// Pivots artificial variables out of the basis where possible; rows that
    /// cannot be pivoted are redundant and are dropped.
    fn evict_artificials(&mut self) {
        let mut r = 0;
        while r < self.tableau.len() {
            if self.basis[r] >= self.artificial_start {
                let col = (0..self.artificial_start)
                    .find(|&j| self.tableau[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => {
                        let mut dummy = vec![0.0; self.ncols + 1];
                        self.pivot(r, j, &mut dummy);
                        r += 1;
                    }
                    None => {
                        self.tableau.swap_remove(r);
                        self.basis.swap_remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(coeffs: &[f64], rhs: f64) -> Row {
        Row {
            coeffs: coeffs.to_vec(),
            rel: Rel::Le,
            rhs,
        }
    }

    fn ge(coeffs: &[f64], rhs: f64) -> Row {
        Row {
            coeffs: coeffs.to_vec(),
            rel: Rel::Ge,
            rhs,
        }
    }

    #[test]
    fn simple_box_maximum() {
        let out = Simplex::maximize(2, &[1.0, 1.0], &[le(&[1.0, 0.0], 1.0), le(&[0.0, 1.0], 2.0)]);
        match out {
            LpOutcome::Optimal { value, x } => {
                assert!((value - 3.0).abs() < 1e-9);
                assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 2.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let out = Simplex::maximize(1, &[0.0], &[le(&[1.0], 1.0), ge(&[1.0], 2.0)]);
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let out = Simplex::maximize(2, &[1.0, 0.0], &[ge(&[1.0, 1.0], 1.0)]);
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // x >= 0, -x <= -0.5 means x >= 0.5; maximize -x -> value -0.5.
        let out = Simplex::maximize(1, &[-1.0], &[le(&[-1.0], -0.5)]);
        match out {
            LpOutcome::Optimal { value, .. } => assert!((value + 0.5).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_ties_terminate() {
        let rows = vec![
            le(&[1.0, 1.0, 0.0], 1.0),
            le(&[1.0, 0.0, 1.0], 1.0),
            le(&[0.0, 1.0, 1.0], 1.0),
            ge(&[1.0, 1.0, 1.0], 1.5),
        ];
        let out = Simplex::maximize(3, &[1.0, 1.0, 1.0], &rows);
        match out {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.5).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }
}
