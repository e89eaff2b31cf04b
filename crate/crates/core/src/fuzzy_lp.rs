//! Linear programs with fuzzy resources, solved by the max-min method.
//!
//! Each row `(A u)_k <= b_k` may be violated by up to its tolerance `t_k`,
//! with satisfaction falling linearly from 1 at `b_k` to 0 at `b_k + t_k`.
//! The objective gets a similar membership between the optimum of the tight
//! program (`z_lower`, resources `b`) and of the fully relaxed one
//! (`z_upper`, resources `b + t`). The solution maximizes the smallest of all
//! memberships, which is one more crisp LP over `(alpha, u)`:
//!
//! ```text
//!     maximize   alpha
//!     s.t.       (z_upper - z_lower) alpha - c.u   <= -z_lower
//!                t_k alpha + (A u)_k               <= b_k + t_k
//!                0 <= alpha <= 1,   -bound <= u_j <= bound
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, dot, LinearProgram, LpError, LpSolution};

/// Brackets narrower than this (relative) count as degenerate.
pub const DEGENERATE_BRACKET_EPS: f64 = 1e-12;
const BRACKET_ORDER_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("invalid fuzzy problem: {0}")]
    Invalid(String),
    #[error("constraint index {index} out of range ({rows} rows)")]
    IndexOutOfRange { index: usize, rows: usize },
    #[error("the tight program (resources b) has an empty feasible region")]
    CrispInfeasible,
    #[error("the relaxed program (resources b + t) has an empty feasible region")]
    RelaxedInfeasible,
    #[error("bracket inverted: z_lower {z_lower} > z_upper {z_upper}")]
    InvertedBracket { z_lower: f64, z_upper: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyLpProblem {
    objective: Vec<f64>,
    constraints: Vec<Vec<f64>>,
    resources: Vec<f64>,
    tolerances: Vec<f64>,
    bound: f64,
}

impl FuzzyLpProblem {
    pub fn new(
        objective: Vec<f64>,
        constraints: Vec<Vec<f64>>,
        resources: Vec<f64>,
        tolerances: Vec<f64>,
        bound: f64,
    ) -> Result<Self, FuzzyError> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(FuzzyError::Invalid(format!("box bound must be positive, got {bound}")));
        }
        if tolerances.len() != constraints.len() {
            return Err(FuzzyError::Invalid(format!(
                "{} tolerances for {} rows",
                tolerances.len(),
                constraints.len()
            )));
        }
        if let Some(k) = tolerances.iter().position(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(FuzzyError::Invalid(format!(
                "tolerance {k} must be finite and non-negative, got {}",
                tolerances[k]
            )));
        }
        // Reuse the crisp validation for shapes and finiteness.
        LinearProgram::with_symmetric_box(
            objective.clone(),
            constraints.clone(),
            resources.clone(),
            bound,
        )?;
        Ok(Self {
            objective,
            constraints,
            resources,
            tolerances,
            bound,
        })
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Vec<f64>] {
        &self.constraints
    }

    pub fn resources(&self) -> &[f64] {
        &self.resources
    }

    pub fn tolerances(&self) -> &[f64] {
        &self.tolerances
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Copy with every tolerance multiplied by `factor`.
    pub fn with_scaled_tolerances(&self, factor: f64) -> Result<Self, FuzzyError> {
        Self::new(
            self.objective.clone(),
            self.constraints.clone(),
            self.resources.clone(),
            self.tolerances.iter().map(|t| t * factor).collect(),
            self.bound,
        )
    }

    /// Crisp program with resources `b + theta t`.
    pub fn crisp_program(&self, theta: f64) -> LinearProgram {
        let rhs = self
            .resources
            .iter()
            .zip(&self.tolerances)
            .map(|(b, t)| b + theta * t)
            .collect();
        LinearProgram::with_symmetric_box(
            self.objective.clone(),
            self.constraints.clone(),
            rhs,
            self.bound,
        )
        .expect("validated at construction")
    }

    /// Degree to which `u` satisfies row `k`.
    pub fn constraint_membership(&self, k: usize, u: &[f64]) -> Result<f64, FuzzyError> {
        let row = self.constraints.get(k).ok_or(FuzzyError::IndexOutOfRange {
            index: k,
            rows: self.constraints.len(),
        })?;
        Ok(linear_membership(
            dot(row, u),
            self.resources[k],
            self.tolerances[k],
        ))
    }

    /// Smallest constraint membership at `u` (1 when there are no rows).
    pub fn min_constraint_membership(&self, u: &[f64]) -> f64 {
        self.constraints
            .iter()
            .zip(self.resources.iter().zip(&self.tolerances))
            .map(|(row, (&b, &t))| linear_membership(dot(row, u), b, t))
            .fold(1.0, f64::min)
    }

    /// Solves the tight and the fully relaxed crisp programs.
    pub fn solve_crisp_bracket(&self) -> Result<CrispBracket, FuzzyError> {
        let tight = lp::solve(&self.crisp_program(0.0))?;
        let relaxed = lp::solve(&self.crisp_program(1.0))?;
        let (lower_point, z_lower) = match tight {
            LpSolution::Optimal { point, value } => (point, value),
            LpSolution::Infeasible if relaxed.is_optimal() => {
                return Err(FuzzyError::CrispInfeasible)
            }
            LpSolution::Infeasible => return Err(FuzzyError::RelaxedInfeasible),
        };
        let (upper_point, z_upper) = match relaxed {
            LpSolution::Optimal { point, value } => (point, value),
            // The relaxed region contains the tight one, so this is a
            // solver inconsistency rather than a modelling outcome.
            LpSolution::Infeasible => return Err(FuzzyError::RelaxedInfeasible),
        };
        if z_lower > z_upper + BRACKET_ORDER_EPS * (1.0 + z_upper.abs()) {
            return Err(FuzzyError::InvertedBracket { z_lower, z_upper });
        }
        Ok(CrispBracket {
            z_lower,
            z_upper: z_upper.max(z_lower),
            lower_point,
            upper_point,
        })
    }

    /// Max-min solution of the fuzzy program.
    pub fn solve_maxmin(&self) -> Result<FuzzySolution, FuzzyError> {
        let bracket = self.solve_crisp_bracket()?;
        let CrispBracket {
            z_lower,
            z_upper,
            lower_point,
            upper_point,
        } = bracket;

        if is_degenerate_bracket(z_lower, z_upper) {
            // The objective membership is identically 1, and the tight
            // optimum already satisfies every row crisply, so it attains
            // alpha = 1 and is also the best objective among such points.
            return Ok(FuzzySolution {
                point: lower_point.clone(),
                alpha: 1.0,
                z_lower,
                z_upper,
                crisp_lower_point: lower_point,
                crisp_upper_point: upper_point,
                status: FuzzyStatus::DegenerateBracket,
            });
        }

        let d = self.num_vars();
        let mut rows = Vec::with_capacity(self.num_constraints() + 1);
        let mut rhs = Vec::with_capacity(self.num_constraints() + 1);
        let mut objective_row = Vec::with_capacity(d + 1);
        objective_row.push(z_upper - z_lower);
        objective_row.extend(self.objective.iter().map(|c| -c));
        rows.push(objective_row);
        rhs.push(-z_lower);
        for ((a, &b), &t) in self.constraints.iter().zip(&self.resources).zip(&self.tolerances) {
            let mut row = Vec::with_capacity(d + 1);
            row.push(t);
            row.extend_from_slice(a);
            rows.push(row);
            rhs.push(b + t);
        }
        let mut objective = vec![0.0; d + 1];
        objective[0] = 1.0;
        let mut lower = vec![-self.bound; d + 1];
        let mut upper = vec![self.bound; d + 1];
        lower[0] = 0.0;
        upper[0] = 1.0;
        let program = LinearProgram::new(objective, rows, rhs, lower, upper)?;

        let solution = lp::solve(&program)?;
        let Some(x) = solution.point() else {
            // alpha = 0 at the relaxed optimum is always feasible.
            return Err(FuzzyError::RelaxedInfeasible);
        };
        let alpha = x[0].clamp(0.0, 1.0);
        Ok(FuzzySolution {
            point: x[1..].to_vec(),
            alpha,
            z_lower,
            z_upper,
            crisp_lower_point: lower_point,
            crisp_upper_point: upper_point,
            status: FuzzyStatus::Ok,
        })
    }

    /// `min(mu_0, min_k mu_k)` at `u` for the given bracket.
    pub fn min_membership(&self, u: &[f64], z_lower: f64, z_upper: f64) -> Result<f64, FuzzyError> {
        let mu0 = optimality_membership(dot(&self.objective, u), z_lower, z_upper)?;
        Ok(mu0.min(self.min_constraint_membership(u)))
    }
}

/// Membership of a row value `au` against resource `b` with tolerance `t`:
/// 1 up to `b`, linear down to 0 at `b + t`, 0 beyond. A zero tolerance is
/// the crisp indicator of `au <= b`.
pub fn linear_membership(au: f64, b: f64, t: f64) -> f64 {
    if au <= b {
        1.0
    } else if t == 0.0 || au >= b + t {
        0.0
    } else {
        1.0 - (au - b) / t
    }
}

/// Degree of optimality of objective value `cu` within `[z_lower, z_upper]`.
/// A degenerate bracket gives 1 for every value.
pub fn optimality_membership(cu: f64, z_lower: f64, z_upper: f64) -> Result<f64, FuzzyError> {
    if z_lower > z_upper + BRACKET_ORDER_EPS * (1.0 + z_upper.abs()) {
        return Err(FuzzyError::InvertedBracket { z_lower, z_upper });
    }
    if is_degenerate_bracket(z_lower, z_upper) || cu >= z_upper {
        return Ok(1.0);
    }
    if cu <= z_lower {
        return Ok(0.0);
    }
    Ok((cu - z_lower) / (z_upper - z_lower))
}

pub fn is_degenerate_bracket(z_lower: f64, z_upper: f64) -> bool {
    z_upper - z_lower < DEGENERATE_BRACKET_EPS * (1.0 + z_upper.abs())
}

/// Optima of the tight and the relaxed crisp programs.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispBracket {
    pub z_lower: f64,
    pub z_upper: f64,
    pub lower_point: Vec<f64>,
    pub upper_point: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FuzzyStatus {
    Ok,
    /// `z_lower == z_upper`: the objective row was dropped and the tight
    /// optimum returned with alpha = 1.
    DegenerateBracket,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySolution {
    pub point: Vec<f64>,
    pub alpha: f64,
    pub z_lower: f64,
    pub z_upper: f64,
    pub crisp_lower_point: Vec<f64>,
    pub crisp_upper_point: Vec<f64>,
    pub status: FuzzyStatus,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_row(t: f64) -> FuzzyLpProblem {
        // maximize u1 s.t. u1 <= 1, box 10
        FuzzyLpProblem::new(vec![1.0], vec![vec![1.0]], vec![1.0], vec![t], 10.0).unwrap()
    }

    #[test]
    fn constraint_membership_branches() {
        let p = FuzzyLpProblem::new(vec![1.0], vec![vec![1.0]], vec![0.0], vec![1.0], 5.0).unwrap();
        assert_eq!(p.constraint_membership(0, &[-0.5]).unwrap(), 1.0);
        assert_eq!(p.constraint_membership(0, &[0.5]).unwrap(), 0.5);
        assert_eq!(p.constraint_membership(0, &[1.5]).unwrap(), 0.0);
        assert!(matches!(
            p.constraint_membership(1, &[0.0]),
            Err(FuzzyError::IndexOutOfRange { index: 1, rows: 1 })
        ));
    }

    #[test]
    fn zero_tolerance_is_crisp() {
        assert_eq!(linear_membership(0.0, 0.0, 0.0), 1.0);
        assert_eq!(linear_membership(-1.0, 0.0, 0.0), 1.0);
        assert_eq!(linear_membership(1e-300, 0.0, 0.0), 0.0);
    }

    #[test]
    fn optimality_membership_examples() {
        assert_eq!(optimality_membership(5.0, 0.0, 10.0).unwrap(), 0.5);
        assert_eq!(optimality_membership(12.0, 0.0, 10.0).unwrap(), 1.0);
        assert_eq!(optimality_membership(-1.0, 0.0, 10.0).unwrap(), 0.0);
        assert_eq!(optimality_membership(3.0, 3.0, 3.0).unwrap(), 1.0);
        assert!(matches!(
            optimality_membership(0.0, 2.0, 1.0),
            Err(FuzzyError::InvertedBracket { .. })
        ));
    }

    #[test]
    fn bracket_examples() {
        let b = one_row(1.0).solve_crisp_bracket().unwrap();
        assert_eq!((b.z_lower, b.z_upper), (1.0, 2.0));

        let b = one_row(0.0).solve_crisp_bracket().unwrap();
        assert_eq!(b.z_lower, b.z_upper);
        assert_eq!(b.lower_point, b.upper_point);
    }

    #[test]
    fn one_dimensional_maxmin() {
        let s = one_row(1.0).solve_maxmin().unwrap();
        assert_eq!(s.status, FuzzyStatus::Ok);
        assert!((s.point[0] - 1.5).abs() < 1e-12);
        assert!((s.alpha - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_tolerance_reduces_to_crisp() {
        let s = one_row(0.0).solve_maxmin().unwrap();
        assert_eq!(s.status, FuzzyStatus::DegenerateBracket);
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.point, vec![1.0]);
    }

    #[test]
    fn infeasibility_is_classified() {
        // u1 <= -20 is outside the box; relaxing by 5 is not enough.
        let p = FuzzyLpProblem::new(vec![1.0], vec![vec![1.0]], vec![-20.0], vec![5.0], 10.0).unwrap();
        assert_eq!(p.solve_crisp_bracket().unwrap_err(), FuzzyError::RelaxedInfeasible);
        // Relaxing by 15 reaches the box.
        let p = FuzzyLpProblem::new(vec![1.0], vec![vec![1.0]], vec![-20.0], vec![15.0], 10.0).unwrap();
        assert_eq!(p.solve_maxmin().unwrap_err(), FuzzyError::CrispInfeasible);
    }

    #[test]
    fn rejects_negative_tolerance() {
        assert!(matches!(
            FuzzyLpProblem::new(vec![1.0], vec![vec![1.0]], vec![0.0], vec![-0.1], 1.0),
            Err(FuzzyError::Invalid(_))
        ));
        assert!(matches!(
            FuzzyLpProblem::new(vec![1.0], vec![vec![1.0]], vec![0.0], vec![0.1], 0.0),
            Err(FuzzyError::Invalid(_))
        ));
    }
}
