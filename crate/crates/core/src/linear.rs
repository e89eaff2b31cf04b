//! Shared view of a trained linear decision function `g(x) = w0 + w . x`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ClassIndex;

/// Decision values within `SIGN_EPS * |v| * |(1, x)|` of zero are ties.
/// LP vertices routinely put a training sample exactly on the boundary, and
/// the solver only reproduces that zero up to rounding.
pub const SIGN_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("expected {expected} features, got {got}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: ClassIndex,
    /// `g(x)`.
    pub decision: f64,
    /// `g(x)` is zero up to [`SIGN_EPS`]; such points go to class 1.
    pub tie: bool,
}

pub trait LinearDiscriminant {
    /// Augmented weights `(w0, w1, ..., wp)`, unit Euclidean norm.
    fn augmented(&self) -> &[f64];

    /// Weights at the scale the trainer produced them.
    fn raw_augmented(&self) -> &[f64] {
        self.augmented()
    }

    /// Feature dimension `p`.
    fn dim(&self) -> usize {
        self.augmented().len() - 1
    }

    fn decision(&self, x: &[f64]) -> Result<f64, DimensionMismatch> {
        decision_value(self.augmented(), x)
    }

    fn predict(&self, x: &[f64]) -> Result<Prediction, DimensionMismatch> {
        let g = self.decision(x)?;
        let tie = is_tie(g, self.augmented(), x);
        Ok(Prediction {
            class: if g < 0.0 && !tie { ClassIndex::Two } else { ClassIndex::One },
            decision: g,
            tie,
        })
    }
}

/// `v0 + sum_j v_{j+1} x_j`.
pub fn decision_value(v: &[f64], x: &[f64]) -> Result<f64, DimensionMismatch> {
    if v.len() != x.len() + 1 {
        return Err(DimensionMismatch {
            expected: v.len().saturating_sub(1),
            got: x.len(),
        });
    }
    Ok(v[0] + v[1..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
}

/// `g = v . (1, x)` is zero up to rounding.
fn is_tie(g: f64, v: &[f64], x: &[f64]) -> bool {
    let y_norm = (1.0 + x.iter().map(|a| a * a).sum::<f64>()).sqrt();
    g.abs() <= SIGN_EPS * euclidean_norm(v) * y_norm
}

/// `v . y < 0` beyond rounding, for an augmented pattern `y`.
pub fn strictly_negative(v: &[f64], y: &[f64]) -> bool {
    let s: f64 = v.iter().zip(y).map(|(a, b)| a * b).sum();
    s < -SIGN_EPS * euclidean_norm(v) * euclidean_norm(y)
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
