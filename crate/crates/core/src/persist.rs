//! JSON model documents.
//!
//! Field order is fixed by the struct layout, so two identical fits produce
//! byte-identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::BinaryDataset;
use crate::discriminant::DiscriminantModel;
use crate::fuzzy_lp::FuzzyStatus;
use crate::linear::LinearDiscriminant;
use crate::olda::FisherModel;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model document: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Modified,
    Perceptron,
    Olda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelStatus {
    Ok,
    DegenerateBracket,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub criterion: ModelKind,
    pub v: Weights,
    pub alpha: Option<f64>,
    pub z_lower: Option<f64>,
    pub z_upper: Option<f64>,
    pub theta: Option<f64>,
    pub mode: Option<String>,
    pub iterations: Option<usize>,
    pub status: ModelStatus,
    pub feature_names: Vec<String>,
    pub class_labels: [String; 2],
}

impl ModelDocument {
    /// `converged = false` marks the best iterate of a perceptron fit that
    /// never settled.
    pub fn from_fclda(model: &DiscriminantModel, ds: &BinaryDataset, converged: bool) -> Self {
        let status = match (converged, model.status()) {
            (false, _) => ModelStatus::NotConverged,
            (true, FuzzyStatus::Ok) => ModelStatus::Ok,
            (true, FuzzyStatus::DegenerateBracket) => ModelStatus::DegenerateBracket,
        };
        Self {
            criterion: match model.criterion() {
                crate::discriminant::Criterion::Modified => ModelKind::Modified,
                crate::discriminant::Criterion::Perceptron => ModelKind::Perceptron,
            },
            v: Weights {
                raw: model.raw().to_vec(),
                normalized: model.v().to_vec(),
            },
            alpha: Some(model.alpha()),
            z_lower: Some(model.z_lower()),
            z_upper: Some(model.z_upper()),
            theta: Some(model.tolerance().theta()),
            mode: Some(model.tolerance().mode().name().to_string()),
            iterations: Some(model.iterations()),
            status,
            feature_names: ds.feature_names().to_vec(),
            class_labels: ds.class_labels().clone(),
        }
    }

    pub fn from_fisher(model: &FisherModel, ds: &BinaryDataset) -> Self {
        Self {
            criterion: ModelKind::Olda,
            v: Weights {
                raw: model.raw_augmented().to_vec(),
                normalized: model.augmented().to_vec(),
            },
            alpha: None,
            z_lower: None,
            z_upper: None,
            theta: None,
            mode: None,
            iterations: None,
            status: ModelStatus::Ok,
            feature_names: ds.feature_names().to_vec(),
            class_labels: ds.class_labels().clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, PersistError> {
        let doc: Self = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), PersistError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| PersistError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PersistError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| PersistError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<(), PersistError> {
        let d = self.feature_names.len() + 1;
        if self.v.raw.len() != d || self.v.normalized.len() != d {
            return Err(PersistError::Invalid(format!(
                "weight vectors must have {d} entries for {} features",
                d - 1
            )));
        }
        if self.v.raw.iter().chain(&self.v.normalized).any(|x| !x.is_finite()) {
            return Err(PersistError::Invalid("non-finite weight".into()));
        }
        if self.v.normalized.iter().all(|x| *x == 0.0) {
            return Err(PersistError::Invalid("zero weight vector".into()));
        }
        Ok(())
    }
}

impl LinearDiscriminant for ModelDocument {
    fn augmented(&self) -> &[f64] {
        &self.v.normalized
    }

    fn raw_augmented(&self) -> &[f64] {
        &self.v.raw
    }
}
