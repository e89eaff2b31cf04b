//! Ordinary (Fisher) linear discriminant, the comparison baseline.
//!
//! `w` is proportional to `S_w^-1 (mu_1 - mu_2)` with `S_w` the pooled
//! within-class scatter, and the threshold sits halfway between the
//! projected class means (equal priors).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::dataset::{BinaryDataset, ClassIndex};
use crate::linear::{euclidean_norm, LinearDiscriminant};

/// Ridge added to a singular scatter, relative to `trace(S_w) / p`.
pub const RIDGE_FACTOR: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OldaError {
    #[error("within-class scatter is singular even after ridge regularization")]
    SingularScatter,
    #[error("class means coincide; no discriminant direction")]
    IdenticalMeans,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherModel {
    w: Vec<f64>,
    w0: f64,
    class_means: [Vec<f64>; 2],
    pooled_scatter: DMatrix<f64>,
    ridge: f64,
    augmented: Vec<f64>,
    raw: Vec<f64>,
}

impl FisherModel {
    /// Unit-norm projection direction.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn class_means(&self) -> &[Vec<f64>; 2] {
        &self.class_means
    }

    pub fn pooled_scatter(&self) -> &DMatrix<f64> {
        &self.pooled_scatter
    }

    /// Ridge that had to be added to the scatter (0 when none).
    pub fn ridge(&self) -> f64 {
        self.ridge
    }
}

impl LinearDiscriminant for FisherModel {
    fn augmented(&self) -> &[f64] {
        &self.augmented
    }

    /// `(w0, w)` with `|w| = 1`.
    fn raw_augmented(&self) -> &[f64] {
        &self.raw
    }
}

pub fn fit_fisher(ds: &BinaryDataset) -> Result<FisherModel, OldaError> {
    let p = ds.dim();
    let mean_of = |class: ClassIndex| {
        let mut m = DVector::<f64>::zeros(p);
        let mut n = 0usize;
        for x in ds.class_samples(class) {
            m += DVector::from_column_slice(x);
            n += 1;
        }
        m / n as f64
    };
    let mu1 = mean_of(ClassIndex::One);
    let mu2 = mean_of(ClassIndex::Two);

    let mut scatter = DMatrix::<f64>::zeros(p, p);
    for (x, &class) in ds.samples().iter().zip(ds.classes()) {
        let mu = if class == ClassIndex::One { &mu1 } else { &mu2 };
        let d = DVector::from_column_slice(x) - mu;
        scatter += &d * d.transpose();
    }
    // Exact symmetry regardless of summation order.
    let scatter = (&scatter + scatter.transpose()) * 0.5;

    let diff = &mu1 - &mu2;
    if diff.norm() == 0.0 {
        return Err(OldaError::IdenticalMeans);
    }

    let trace = scatter.trace();
    let (direction, ridge) = match solve_spd(&scatter, &diff) {
        Some(w) => (w, 0.0),
        None => {
            let ridge = RIDGE_FACTOR * trace.max(f64::MIN_POSITIVE) / p as f64;
            let regularized = &scatter + DMatrix::<f64>::identity(p, p) * ridge;
            let w = solve_spd(&regularized, &diff).ok_or(OldaError::SingularScatter)?;
            log::warn!("within-class scatter singular; added ridge {ridge:e}");
            (w, ridge)
        }
    };
    let norm = direction.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(OldaError::SingularScatter);
    }
    let w = direction / norm;
    let w0 = -w.dot(&(&mu1 + &mu2)) / 2.0;

    let w: Vec<f64> = w.iter().copied().collect();
    let raw: Vec<f64> = std::iter::once(w0).chain(w.iter().copied()).collect();
    let n = euclidean_norm(&raw);
    let augmented = raw.iter().map(|x| x / n).collect();
    Ok(FisherModel {
        w,
        w0,
        class_means: [
            mu1.iter().copied().collect(),
            mu2.iter().copied().collect(),
        ],
        pooled_scatter: scatter,
        ridge,
        augmented,
        raw,
    })
}

/// Cholesky solve; `None` when the matrix is not safely positive definite.
fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = a.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let chol = a.clone().cholesky()?;
    let l = chol.l();
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v * v));
    if min_pivot.is_nan() || min_pivot <= 1e-13 * scale {
        return None;
    }
    Some(chol.solve(b))
}
