//! Dense linear programs with finite box bounds on every variable.
//!
//! ```text
//!     maximize    c . u
//!     subject to  A u <= b
//!                 l <= u <= h
//! ```
//!
//! Because every variable is boxed the feasible region is a polytope, so a
//! solve ends either at an optimal vertex or with an empty region. There is no
//! unbounded outcome.

mod brute;
mod simplex;

pub use brute::{brute_force_solve, BRUTE_FORCE_MAX_DIM, BRUTE_FORCE_MAX_FACETS};
pub use simplex::solve;

use thiserror::Error;

/// Relative feasibility tolerance; scaled by `1 + max|b|`.
pub const FEASIBILITY_EPS: f64 = 1e-8;
/// Reduced-cost threshold for entering variables.
pub const OPTIMALITY_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("program has no variables")]
    Empty,
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("lower bound exceeds upper bound for variable {0}")]
    InvertedBounds(usize),
    #[error("simplex stopped after {pivots} pivots without reaching optimality (numerically singular basis?)")]
    PivotBudgetExhausted { pivots: usize },
    #[error("simplex ended at a point violating feasibility by {violation:e}")]
    Numerical { violation: f64 },
    #[error("brute force limited to {max_dim} variables and {max_facets} facets, got {dim} and {facets}")]
    TooLarge {
        dim: usize,
        facets: usize,
        max_dim: usize,
        max_facets: usize,
    },
}

/// `maximize c.u  s.t.  A u <= b,  l <= u <= h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    pub fn new(
        objective: Vec<f64>,
        constraints: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self, LpError> {
        let d = objective.len();
        if d == 0 {
            return Err(LpError::Empty);
        }
        if lower.len() != d || upper.len() != d {
            return Err(LpError::Dimension(format!(
                "{d} objective coefficients but {} lower / {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        if constraints.len() != rhs.len() {
            return Err(LpError::Dimension(format!(
                "{} constraint rows but {} right-hand sides",
                constraints.len(),
                rhs.len()
            )));
        }
        if let Some(i) = constraints.iter().position(|r| r.len() != d) {
            return Err(LpError::Dimension(format!(
                "row {i} has {} entries, expected {d}",
                constraints[i].len()
            )));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&objective) {
            return Err(LpError::NonFinite("objective"));
        }
        if !constraints.iter().all(|r| finite(r)) {
            return Err(LpError::NonFinite("constraint matrix"));
        }
        if !finite(&rhs) {
            return Err(LpError::NonFinite("right-hand side"));
        }
        if !finite(&lower) || !finite(&upper) {
            return Err(LpError::NonFinite("bounds"));
        }
        if let Some(j) = (0..d).find(|&j| lower[j] > upper[j]) {
            return Err(LpError::InvertedBounds(j));
        }
        Ok(Self {
            objective,
            constraints,
            rhs,
            lower,
            upper,
        })
    }

    /// Same bounds `[-bound, bound]` on every variable.
    pub fn with_symmetric_box(
        objective: Vec<f64>,
        constraints: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        bound: f64,
    ) -> Result<Self, LpError> {
        let d = objective.len();
        Self::new(objective, constraints, rhs, vec![-bound; d], vec![bound; d])
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Vec<f64>] {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Absolute feasibility tolerance for this program.
    pub fn feasibility_tol(&self) -> f64 {
        let scale = self.rhs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        FEASIBILITY_EPS * (1.0 + scale)
    }

    pub fn objective_at(&self, u: &[f64]) -> f64 {
        dot(&self.objective, u)
    }

    /// Largest violation of any row or bound at `u` (0 when feasible).
    pub fn max_violation(&self, u: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| dot(a, u) - b);
        let lows = self.lower.iter().zip(u).map(|(l, x)| l - x);
        let highs = u.iter().zip(&self.upper).map(|(x, h)| x - h);
        rows.chain(lows).chain(highs).fold(0.0f64, f64::max)
    }

    pub fn is_feasible(&self, u: &[f64]) -> bool {
        u.len() == self.num_vars() && self.max_violation(u) <= self.feasibility_tol()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { point: Vec<f64>, value: f64 },
    Infeasible,
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal { .. } => LpStatus::Optimal,
            LpSolution::Infeasible => LpStatus::Infeasible,
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            LpSolution::Optimal { point, .. } => Some(point),
            LpSolution::Infeasible => None,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LpSolution::Optimal { value, .. } => Some(*value),
            LpSolution::Infeasible => None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, LpSolution::Optimal { .. })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(
            LinearProgram::new(vec![], vec![], vec![], vec![], vec![]),
            Err(LpError::Empty)
        );
        assert!(matches!(
            LinearProgram::new(vec![1.0], vec![vec![1.0, 2.0]], vec![0.0], vec![0.0], vec![1.0]),
            Err(LpError::Dimension(_))
        ));
        assert!(matches!(
            LinearProgram::new(vec![1.0], vec![], vec![], vec![2.0], vec![1.0]),
            Err(LpError::InvertedBounds(0))
        ));
        assert!(matches!(
            LinearProgram::new(vec![f64::NAN], vec![], vec![], vec![0.0], vec![1.0]),
            Err(LpError::NonFinite(_))
        ));
    }

    #[test]
    fn violation_measure() {
        let lp = LinearProgram::new(
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0]],
            vec![1.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(lp.max_violation(&[0.5, 0.5]), 0.0);
        assert!((lp.max_violation(&[1.0, 0.5]) - 0.5).abs() < 1e-15);
        assert!((lp.max_violation(&[-0.25, 0.0]) - 0.25).abs() < 1e-15);
    }
}
