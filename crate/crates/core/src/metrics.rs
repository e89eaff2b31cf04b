//! Noise margins and error counts.
//!
//! The noise margin of a class is the harmonic-style aggregate
//! `1 / sum_i 1 / g(x_i)` over that class's samples, where
//! `g(x) = v . (1, x)` is evaluated WITHOUT the class-2 sign flip. A class
//! sitting entirely on the positive side gives a positive value, one
//! entirely on the negative side a negative value, and the magnitude is
//! dominated by the samples closest to the boundary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{BinaryDataset, ClassIndex};
use crate::linear::{decision_value, DimensionMismatch, LinearDiscriminant};

/// Margins below this magnitude make the noise margin degenerate.
pub const NEAR_ZERO_MARGIN: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
    #[error("class {0} has no samples")]
    EmptyClass(u8),
}

/// Which weight vector the margins are measured with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginScale {
    /// Unit Euclidean norm, margins are signed distances in augmented space.
    #[default]
    Normalized,
    /// The trainer's own scale (the LP point for fuzzy models).
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseMargin {
    pub value: f64,
    /// Some sample had `|g(x)| < 1e-12`; `value` is then 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub class_one: usize,
    pub class_two: usize,
}

impl ErrorCounts {
    pub fn total(&self) -> usize {
        self.class_one + self.class_two
    }

    pub fn get(&self, class: ClassIndex) -> usize {
        match class {
            ClassIndex::One => self.class_one,
            ClassIndex::Two => self.class_two,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub nm_right: NoiseMargin,
    pub nm_left: NoiseMargin,
    pub misclassified: ErrorCounts,
    pub per_sample_margins: Vec<f64>,
    pub alpha: Option<f64>,
    pub scale: MarginScale,
}

fn weights<M: LinearDiscriminant + ?Sized>(model: &M, scale: MarginScale) -> &[f64] {
    match scale {
        MarginScale::Normalized => model.augmented(),
        MarginScale::Raw => model.raw_augmented(),
    }
}

/// `1 / sum 1/g(x_i)` over the samples of `class`.
pub fn noise_margin<M: LinearDiscriminant + ?Sized>(
    model: &M,
    ds: &BinaryDataset,
    class: ClassIndex,
    scale: MarginScale,
) -> Result<NoiseMargin, MetricsError> {
    let v = weights(model, scale);
    let margins = ds
        .class_samples(class)
        .map(|x| decision_value(v, x))
        .collect::<Result<Vec<_>, _>>()?;
    harmonic_margin(&margins).ok_or(MetricsError::EmptyClass(class.number()))
}

/// `1 / sum 1/m_i`; `None` for an empty slice.
pub fn harmonic_margin(margins: &[f64]) -> Option<NoiseMargin> {
    if margins.is_empty() {
        return None;
    }
    if margins.iter().any(|m| m.abs() < NEAR_ZERO_MARGIN) {
        return Some(NoiseMargin {
            value: 0.0,
            degenerate: true,
        });
    }
    let s: f64 = margins.iter().map(|m| 1.0 / m).sum();
    Some(NoiseMargin {
        value: 1.0 / s,
        degenerate: false,
    })
}

/// Samples whose predicted class differs from their label, per class.
pub fn misclassification_count<M: LinearDiscriminant + ?Sized>(
    model: &M,
    ds: &BinaryDataset,
) -> Result<ErrorCounts, MetricsError> {
    let mut counts = ErrorCounts::default();
    for (x, &class) in ds.samples().iter().zip(ds.classes()) {
        if model.predict(x)?.class != class {
            match class {
                ClassIndex::One => counts.class_one += 1,
                ClassIndex::Two => counts.class_two += 1,
            }
        }
    }
    Ok(counts)
}

pub fn margin_report<M: LinearDiscriminant + ?Sized>(
    model: &M,
    ds: &BinaryDataset,
    scale: MarginScale,
    alpha: Option<f64>,
) -> Result<MarginReport, MetricsError> {
    let v = weights(model, scale);
    let per_sample_margins = ds
        .samples()
        .iter()
        .map(|x| decision_value(v, x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MarginReport {
        nm_right: noise_margin(model, ds, ClassIndex::One, scale)?,
        nm_left: noise_margin(model, ds, ClassIndex::Two, scale)?,
        misclassified: misclassification_count(model, ds)?,
        per_sample_margins,
        alpha,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;

    struct Fixed(Vec<f64>);

    impl LinearDiscriminant for Fixed {
        fn augmented(&self) -> &[f64] {
            &self.0
        }
    }

    fn data(rows: &[(f64, &str)]) -> BinaryDataset {
        let ds = Dataset::new(
            rows.iter().map(|(x, _)| vec![*x]).collect(),
            rows.iter().map(|(_, l)| l.to_string()).collect(),
            vec!["x".into()],
        )
        .unwrap();
        BinaryDataset::new(ds, "a", "b").unwrap()
    }

    #[test]
    fn noise_margin_examples() {
        let ds = data(&[(1.0, "a"), (1.0, "a"), (-3.0, "b")]);
        let m = Fixed(vec![0.0, 1.0]);
        let nm = noise_margin(&m, &ds, ClassIndex::One, MarginScale::Normalized).unwrap();
        assert_eq!(nm.value, 0.5);
        assert!(!nm.degenerate);

        let ds = data(&[(2.0, "a"), (-3.0, "b")]);
        let nm = noise_margin(&m, &ds, ClassIndex::One, MarginScale::Normalized).unwrap();
        assert_eq!(nm.value, 2.0);
        // correctly classified class 2 stays negative under the unreflected convention
        let nm = noise_margin(&m, &ds, ClassIndex::Two, MarginScale::Normalized).unwrap();
        assert_eq!(nm.value, -3.0);
    }

    #[test]
    fn degenerate_margin_is_flagged() {
        let ds = data(&[(0.0, "a"), (1.0, "a"), (-3.0, "b")]);
        let nm = noise_margin(&Fixed(vec![0.0, 1.0]), &ds, ClassIndex::One, MarginScale::Normalized)
            .unwrap();
        assert!(nm.degenerate);
        assert_eq!(nm.value, 0.0);
    }

    #[test]
    fn error_counts_flip_with_sign() {
        let ds = data(&[(1.0, "a"), (2.0, "a"), (-1.0, "a"), (-2.0, "b"), (0.5, "b")]);
        let m = Fixed(vec![0.0, 1.0]);
        let c = misclassification_count(&m, &ds).unwrap();
        assert_eq!((c.class_one, c.class_two), (1, 1));
        let neg = Fixed(vec![0.0, -1.0]);
        let c = misclassification_count(&neg, &ds).unwrap();
        assert_eq!((c.class_one, c.class_two), (3 - 1, 2 - 1));

        let sep = data(&[(1.0, "a"), (-1.0, "b")]);
        assert_eq!(misclassification_count(&m, &sep).unwrap().total(), 0);
    }

    #[test]
    fn report_shapes() {
        let ds = data(&[(1.0, "a"), (2.0, "a"), (-2.0, "b")]);
        let r = margin_report(&Fixed(vec![0.5, 1.0]), &ds, MarginScale::Raw, Some(0.3)).unwrap();
        assert_eq!(r.per_sample_margins, vec![1.5, 2.5, -1.5]);
        assert_eq!(r.alpha, Some(0.3));
        assert!(r.nm_right.value > 0.0 && r.nm_left.value < 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let ds = data(&[(1.0, "a"), (-1.0, "b")]);
        assert!(matches!(
            misclassification_count(&Fixed(vec![0.0, 1.0, 2.0]), &ds),
            Err(MetricsError::Dimension(_))
        ));
    }
}
