//! Two-phase tableau simplex with Bland's rule.
//!
//! Variables are shifted to `x = u - l`, so `0 <= x <= h - l`; the upper
//! bounds become ordinary rows. Rows whose shifted right-hand side is
//! negative are sign-flipped and given an artificial variable, which phase 1
//! drives to zero.

use super::{dot, LinearProgram, LpError, LpSolution, OPTIMALITY_EPS};

const PIVOT_EPS: f64 = 1e-11;

struct Tableau {
    /// Constraint rows, each `ncols + 1` long (last entry is the rhs).
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    pivots: usize,
    budget: usize,
}

enum Phase {
    Optimal,
    /// No row limits the entering column. Impossible with boxed variables,
    /// reported as a numerical failure if it ever happens.
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Reduced costs `c_j - c_B B^-1 A_j` for the current basis.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut red = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (r, a) in red.iter_mut().zip(row) {
                    *r -= cb * a;
                }
            }
        }
        red
    }

    /// Maximizes `cost . x` over columns `< enter_limit`, starting from the
    /// current (primal feasible) basis.
    fn optimize(&mut self, cost: &[f64], enter_limit: usize) -> Result<Phase, LpError> {
        loop {
            if self.pivots >= self.budget {
                return Err(LpError::PivotBudgetExhausted {
                    pivots: self.pivots,
                });
            }
            let red = self.reduced_costs(cost);
            // Bland: lowest-index improving column.
            let Some(enter) = (0..enter_limit).find(|&j| red[j] > OPTIMALITY_EPS) else {
                return Ok(Phase::Optimal);
            };
            // Ratio test, ties to the lowest basic variable index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Ok(Phase::Unbounded),
            }
        }
    }
}

/// Solves `lp` to an optimal vertex, or reports an empty feasible region.
///
/// Deterministic: the same program always produces the same bits.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let d = lp.num_vars();
    let m = lp.num_constraints();
    let lower = lp.lower_bounds();
    let range: Vec<f64> = lp
        .upper_bounds()
        .iter()
        .zip(lower)
        .map(|(h, l)| h - l)
        .collect();

    // Rows in shifted variables: A x <= b - A l, then x_j <= h_j - l_j.
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(m + d);
    let mut rhs: Vec<f64> = Vec::with_capacity(m + d);
    for (a, b) in lp.constraints().iter().zip(lp.rhs()) {
        coeffs.push(a.clone());
        rhs.push(b - dot(a, lower));
    }
    for (j, r) in range.iter().enumerate() {
        let mut row = vec![0.0; d];
        row[j] = 1.0;
        coeffs.push(row);
        rhs.push(*r);
    }
    let nrows = coeffs.len();
    let needs_artificial: Vec<usize> = (0..nrows).filter(|&i| rhs[i] < 0.0).collect();
    let n_art = needs_artificial.len();
    let slack0 = d;
    let art0 = d + nrows;
    let ncols = art0 + n_art;

    let mut rows = Vec::with_capacity(nrows);
    let mut basis = Vec::with_capacity(nrows);
    let mut art_iter = 0;
    for i in 0..nrows {
        let mut row = vec![0.0; ncols + 1];
        let flip = rhs[i] < 0.0;
        let s = if flip { -1.0 } else { 1.0 };
        for j in 0..d {
            row[j] = s * coeffs[i][j];
        }
        row[slack0 + i] = s;
        row[ncols] = s * rhs[i];
        if flip {
            row[art0 + art_iter] = 1.0;
            basis.push(art0 + art_iter);
            art_iter += 1;
        } else {
            basis.push(slack0 + i);
        }
        rows.push(row);
    }

    let budget = 200 * (nrows + ncols) + 10_000;
    let mut tab = Tableau {
        rows,
        basis,
        ncols,
        pivots: 0,
        budget,
    };

    let tol = lp.feasibility_tol();
    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(art0) {
            *c = -1.0;
        }
        if let Phase::Unbounded = tab.optimize(&cost, ncols)? {
            return Err(LpError::Numerical {
                violation: f64::INFINITY,
            });
        }
        let infeasibility: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art0)
            .map(|(i, _)| tab.rhs(i).abs())
            .sum();
        if infeasibility > tol {
            log::debug!("phase 1 residual {infeasibility:e} > {tol:e}: infeasible");
            return Ok(LpSolution::Infeasible);
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..nrows {
            if tab.basis[i] < art0 {
                continue;
            }
            if let Some(j) = (0..art0).find(|&j| tab.rows[i][j].abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    cost[..d].copy_from_slice(lp.objective());
    if let Phase::Unbounded = tab.optimize(&cost, art0)? {
        return Err(LpError::Numerical {
            violation: f64::INFINITY,
        });
    }
    log::debug!("simplex finished after {} pivots", tab.pivots);

    let mut x = vec![0.0; d];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < d {
            x[b] = tab.rhs(i);
        }
    }
    let point: Vec<f64> = (0..d)
        .map(|j| lower[j] + x[j].clamp(0.0, range[j]))
        .collect();
    let violation = lp.max_violation(&point);
    if violation > tol {
        return Err(LpError::Numerical { violation });
    }
    let value = lp.objective_at(&point);
    Ok(LpSolution::Optimal { point, value })
}
