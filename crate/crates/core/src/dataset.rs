//! Tabular samples, two-class selection and the augmented, sign-reflected
//! pattern set used by the discriminant trainer.
//!
//! A class-1 sample `x` becomes `y = (1, x)`, a class-2 sample becomes
//! `y = (-1, -x)`, so that a weight vector `v = (w0, w)` classifies every
//! training sample correctly exactly when `v . y > 0` for all of them.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Label column of CSV files unless told otherwise.
pub const DEFAULT_LABEL_COLUMN: &str = "label";

/// Label column of the embedded Iris table.
pub const IRIS_LABEL_COLUMN: &str = "species";

const IRIS_CSV: &str = include_str!("../data/iris.csv");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("CSV has no header row")]
    MissingHeader,
    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    BadNumber {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column `{column}`: value is not finite")]
    NonFinite { row: usize, column: String },
    #[error("sample {row} has {got} features, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("{samples} samples but {labels} labels")]
    LabelCount { samples: usize, labels: usize },
    #[error("dataset needs at least one feature")]
    NoFeatures,
    #[error("unknown class label `{0}`")]
    UnknownLabel(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("class `{0}` has no rows")]
    EmptyClass(String),
    #[error("the two class labels must differ")]
    SameClass,
    #[error("standard deviation must be positive, got {0}")]
    BadStddev(f64),
    #[error("need at least one sample per class")]
    NoSamples,
    #[error("class means must have the same non-zero dimension")]
    MeanDimension,
}

/// Raw labeled samples. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<Vec<f64>>,
    labels: Vec<String>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        samples: Vec<Vec<f64>>,
        labels: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self, DatasetError> {
        let p = feature_names.len();
        if p == 0 {
            return Err(DatasetError::NoFeatures);
        }
        if samples.len() != labels.len() {
            return Err(DatasetError::LabelCount {
                samples: samples.len(),
                labels: labels.len(),
            });
        }
        for (row, x) in samples.iter().enumerate() {
            if x.len() != p {
                return Err(DatasetError::Ragged {
                    row,
                    got: x.len(),
                    expected: p,
                });
            }
            if let Some(j) = x.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite {
                    row,
                    column: feature_names[j].clone(),
                });
            }
        }
        Ok(Self {
            samples,
            labels,
            feature_names,
        })
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Feature dimension `p`.
    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// Distinct labels in sorted order.
    pub fn distinct_labels(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.labels.iter().map(String::as_str).collect();
        set.into_iter().collect()
    }

    /// Writes the dataset as CSV: features first, then the label column.
    /// Numbers use Rust's shortest round-trip formatting so that reading the
    /// file back yields identical bits.
    pub fn write_csv<W: Write>(&self, out: W, label_column: &str) -> Result<(), DatasetError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push(label_column);
        w.write_record(&header)?;
        for (x, label) in self.samples.iter().zip(&self.labels) {
            let mut record: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
            record.push(label.clone());
            w.write_record(&record)?;
        }
        w.flush().map_err(|source| DatasetError::Io {
            path: "<writer>".into(),
            source,
        })?;
        Ok(())
    }
}

/// Reads a headed CSV file. Every column except `label_column` must be numeric.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
    parse_csv(text.as_bytes(), label_column)
}

/// Same as [`load_csv`] but over any reader.
pub fn parse_csv<R: Read>(input: R, label_column: &str) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers()?.clone();
    if header.is_empty() {
        return Err(DatasetError::MissingHeader);
    }
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DatasetError::MissingLabelColumn(label_column.to_string()))?;
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&i| i != label_idx).collect();
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| header[i].to_string()).collect();

    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let mut x = Vec::with_capacity(feature_cols.len());
        for &col in &feature_cols {
            let cell = record.get(col).unwrap_or("");
            let value: f64 = cell.parse().map_err(|_| DatasetError::BadNumber {
                row,
                column: header[col].to_string(),
                value: cell.to_string(),
            })?;
            x.push(value);
        }
        samples.push(x);
        labels.push(record.get(label_idx).unwrap_or("").to_string());
    }
    Dataset::new(samples, labels, feature_names)
}

/// The canonical 150-row Iris table shipped with the crate.
pub fn iris() -> Dataset {
    parse_csv(IRIS_CSV.as_bytes(), IRIS_LABEL_COLUMN).expect("embedded iris table is well formed")
}

/// Which side of the discriminant a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassIndex {
    /// Positive side, `g(x) > 0`.
    One,
    /// Negative side, `g(x) < 0`.
    Two,
}

impl ClassIndex {
    pub fn number(self) -> u8 {
        match self {
            ClassIndex::One => 1,
            ClassIndex::Two => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            ClassIndex::One => ClassIndex::Two,
            ClassIndex::Two => ClassIndex::One,
        }
    }

    /// `+1` for class 1, `-1` for class 2.
    pub fn sign(self) -> f64 {
        match self {
            ClassIndex::One => 1.0,
            ClassIndex::Two => -1.0,
        }
    }

    fn slot(self) -> usize {
        match self {
            ClassIndex::One => 0,
            ClassIndex::Two => 1,
        }
    }
}

/// A dataset restricted to two labels, each row tagged with its class index.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDataset {
    data: Dataset,
    classes: Vec<ClassIndex>,
    class_labels: [String; 2],
}

impl BinaryDataset {
    /// Builds a binary view directly; rows with a label other than the two
    /// given are rejected.
    pub fn new(data: Dataset, class_a: &str, class_b: &str) -> Result<Self, DatasetError> {
        if class_a == class_b {
            return Err(DatasetError::SameClass);
        }
        let mut classes = Vec::with_capacity(data.len());
        for label in data.labels() {
            if label == class_a {
                classes.push(ClassIndex::One);
            } else if label == class_b {
                classes.push(ClassIndex::Two);
            } else {
                return Err(DatasetError::UnknownLabel(label.clone()));
            }
        }
        let out = Self {
            data,
            classes,
            class_labels: [class_a.to_string(), class_b.to_string()],
        };
        for class in [ClassIndex::One, ClassIndex::Two] {
            if out.class_count(class) == 0 {
                return Err(DatasetError::EmptyClass(out.class_label(class).to_string()));
            }
        }
        Ok(out)
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        self.data.samples()
    }

    pub fn classes(&self) -> &[ClassIndex] {
        &self.classes
    }

    pub fn class_labels(&self) -> &[String; 2] {
        &self.class_labels
    }

    pub fn class_label(&self, class: ClassIndex) -> &str {
        &self.class_labels[class.slot()]
    }

    pub fn feature_names(&self) -> &[String] {
        self.data.feature_names()
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn class_count(&self, class: ClassIndex) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// Samples of one class, in original order.
    pub fn class_samples(&self, class: ClassIndex) -> impl Iterator<Item = &[f64]> {
        self.samples()
            .iter()
            .zip(&self.classes)
            .filter(move |(_, &c)| c == class)
            .map(|(x, _)| x.as_slice())
    }

    /// Same rows with the two class labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            data: self.data.clone(),
            classes: self.classes.iter().map(|c| c.other()).collect(),
            class_labels: [self.class_labels[1].clone(), self.class_labels[0].clone()],
        }
    }
}

/// Keeps the rows labeled `class_a` (class 1) or `class_b` (class 2) and the
/// named feature columns, preserving row order.
pub fn select_binary<S: AsRef<str>>(
    ds: &Dataset,
    class_a: &str,
    class_b: &str,
    features: &[S],
) -> Result<BinaryDataset, DatasetError> {
    if class_a == class_b {
        return Err(DatasetError::SameClass);
    }
    for label in [class_a, class_b] {
        if !ds.labels().iter().any(|l| l == label) {
            return Err(DatasetError::UnknownLabel(label.to_string()));
        }
    }
    let cols = features
        .iter()
        .map(|f| {
            let f = f.as_ref();
            ds.feature_names()
                .iter()
                .position(|n| n == f)
                .ok_or_else(|| DatasetError::UnknownFeature(f.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if cols.is_empty() {
        return Err(DatasetError::NoFeatures);
    }

    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (x, label) in ds.samples().iter().zip(ds.labels()) {
        if label == class_a || label == class_b {
            samples.push(cols.iter().map(|&j| x[j]).collect());
            labels.push(label.clone());
        }
    }
    let names = cols.iter().map(|&j| ds.feature_names()[j].clone()).collect();
    BinaryDataset::new(Dataset::new(samples, labels, names)?, class_a, class_b)
}

/// Augmented and sign-reflected patterns `y_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedDataset {
    reflected: Vec<Vec<f64>>,
    class_of: Vec<ClassIndex>,
    source: BinaryDataset,
}

impl ReflectedDataset {
    pub fn reflected(&self) -> &[Vec<f64>] {
        &self.reflected
    }

    pub fn class_of(&self) -> &[ClassIndex] {
        &self.class_of
    }

    /// The binary dataset the patterns were built from.
    pub fn originals(&self) -> &BinaryDataset {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.reflected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reflected.is_empty()
    }

    /// Length of each pattern, `p + 1`.
    pub fn augmented_dim(&self) -> usize {
        self.source.dim() + 1
    }
}

/// Augments every sample with a leading 1 and negates class-2 patterns.
pub fn augment_reflect(ds: &BinaryDataset) -> Result<ReflectedDataset, DatasetError> {
    for class in [ClassIndex::One, ClassIndex::Two] {
        if ds.class_count(class) == 0 {
            return Err(DatasetError::EmptyClass(ds.class_label(class).to_string()));
        }
    }
    let reflected = ds
        .samples()
        .iter()
        .zip(ds.classes())
        .map(|(x, &c)| reflect_one(x, c))
        .collect();
    Ok(ReflectedDataset {
        reflected,
        class_of: ds.classes().to_vec(),
        source: ds.clone(),
    })
}

/// `(1, x)` for class 1, `(-1, -x)` for class 2.
pub fn reflect_one(x: &[f64], class: ClassIndex) -> Vec<f64> {
    let s = class.sign();
    std::iter::once(s).chain(x.iter().map(|v| s * v)).collect()
}

/// Two isotropic Gaussian clouds labeled `class1` / `class2`, features
/// `x1..xp`. Deterministic for a fixed seed.
pub fn synthetic_two_gaussians(
    n_per_class: usize,
    mean1: &[f64],
    mean2: &[f64],
    stddev: f64,
    seed: u64,
) -> Result<Dataset, DatasetError> {
    if !(stddev > 0.0 && stddev.is_finite()) {
        return Err(DatasetError::BadStddev(stddev));
    }
    if n_per_class == 0 {
        return Err(DatasetError::NoSamples);
    }
    if mean1.is_empty() || mean1.len() != mean2.len() {
        return Err(DatasetError::MeanDimension);
    }
    let normal = Normal::new(0.0, stddev).map_err(|_| DatasetError::BadStddev(stddev))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for (mean, label) in [(mean1, "class1"), (mean2, "class2")] {
        for _ in 0..n_per_class {
            samples.push(mean.iter().map(|m| m + normal.sample(&mut rng)).collect());
            labels.push(label.to_string());
        }
    }
    let names = (1..=mean1.len()).map(|j| format!("x{j}")).collect();
    Dataset::new(samples, labels, names)
}
