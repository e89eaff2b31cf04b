//! The fuzzy-constraint discriminant trainer.
//!
//! Every reflected pattern `y_k` contributes the fuzzy row `-y_k . v <= 0`
//! with tolerance `t_k`, i.e. the sample may sit up to `t_k` on the wrong
//! side of the boundary with linearly decreasing satisfaction. Two objectives
//! are supported:
//!
//! * [`Criterion::Modified`]: maximize `sum_i v . y_i` over all samples, one
//!   fuzzy LP.
//! * [`Criterion::Perceptron`]: maximize `sum v . y_i` over the currently
//!   misclassified samples only. The selection depends on `v`, so the fit
//!   starts from the modified solution and re-solves until the misclassified
//!   set stops changing.
//!
//! Each `v_j` is boxed to `[-1, 1]`; the returned weights are rescaled to
//! unit Euclidean norm, the LP point is kept as [`DiscriminantModel::raw`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ReflectedDataset;
use crate::fuzzy_lp::{FuzzyError, FuzzyLpProblem, FuzzySolution, FuzzyStatus};
use crate::linear::{euclidean_norm, strictly_negative, LinearDiscriminant};
use crate::lp::dot;

/// Box bound on every component of the LP point.
pub const WEIGHT_BOX: f64 = 1.0;
/// Perceptron re-solve budget.
pub const MAX_PERCEPTRON_ITERATIONS: usize = 50;
const ZERO_WEIGHTS_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("no training samples")]
    Empty,
    #[error("theta must lie in [0, 1], got {0}")]
    BadTheta(f64),
    #[error("perceptron criterion needs a non-zero weight vector")]
    ZeroWeights,
    #[error("the fuzzy program returned the zero vector; no discriminant direction")]
    ZeroDiscriminant,
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error("misclassified set did not settle after {iterations} perceptron iterations")]
    NotConverged {
        iterations: usize,
        /// Iterate with the smallest perceptron criterion value.
        best: Box<DiscriminantModel>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Modified,
    Perceptron,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Modified => "modified",
            Criterion::Perceptron => "perceptron",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceMode {
    /// `t_k = theta * |y_k|`.
    PerSample,
    /// `t_k = theta * max_i |y_i|`.
    GlobalMax,
}

impl ToleranceMode {
    pub fn name(self) -> &'static str {
        match self {
            ToleranceMode::PerSample => "per-sample",
            ToleranceMode::GlobalMax => "global-max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    theta: f64,
    mode: ToleranceMode,
}

impl ToleranceConfig {
    pub fn new(theta: f64, mode: ToleranceMode) -> Result<Self, FitError> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(FitError::BadTheta(theta));
        }
        Ok(Self { theta, mode })
    }

    pub fn per_sample(theta: f64) -> Result<Self, FitError> {
        Self::new(theta, ToleranceMode::PerSample)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn mode(&self) -> ToleranceMode {
        self.mode
    }
}

/// One solved fuzzy LP inside a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Misclassified training samples at the weights that fed the objective.
    pub misclassified_in: usize,
    pub alpha: f64,
    pub z_lower: f64,
    pub z_upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantModel {
    v: Vec<f64>,
    raw: Vec<f64>,
    alpha: f64,
    z_lower: f64,
    z_upper: f64,
    objective: Vec<f64>,
    criterion: Criterion,
    tolerance: ToleranceConfig,
    iterations: usize,
    status: FuzzyStatus,
    zero_objective: bool,
    trace: Vec<IterationRecord>,
}

impl DiscriminantModel {
    /// Unit-norm `(w0, w1, ..., wp)`.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// The LP point before normalization.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z_lower(&self) -> f64 {
        self.z_lower
    }

    pub fn z_upper(&self) -> f64 {
        self.z_upper
    }

    /// Objective coefficients of the final fuzzy LP.
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn tolerance(&self) -> ToleranceConfig {
        self.tolerance
    }

    /// Fuzzy LPs solved for this model (1 for the modified criterion).
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn status(&self) -> FuzzyStatus {
        self.status
    }

    /// The objective vector was all zeros.
    pub fn zero_objective(&self) -> bool {
        self.zero_objective
    }

    /// Every fuzzy LP solved during the fit, in order.
    pub fn trace(&self) -> &[IterationRecord] {
        &self.trace
    }

    /// The final fuzzy LP, rebuilt from the training patterns.
    pub fn fuzzy_problem(&self, rd: &ReflectedDataset) -> Result<FuzzyLpProblem, FitError> {
        build_problem(rd, self.objective.clone(), compute_tolerances(rd, &self.tolerance))
    }

    /// `min(mu_0, min_k mu_k)` at the raw LP point.
    pub fn min_membership(&self, rd: &ReflectedDataset) -> Result<f64, FitError> {
        let p = self.fuzzy_problem(rd)?;
        Ok(p.min_membership(&self.raw, self.z_lower, self.z_upper)?)
    }
}

impl LinearDiscriminant for DiscriminantModel {
    fn augmented(&self) -> &[f64] {
        &self.v
    }

    fn raw_augmented(&self) -> &[f64] {
        &self.raw
    }
}

/// `sum_i y_i` over all patterns.
pub fn objective_modified(rd: &ReflectedDataset) -> Result<Vec<f64>, FitError> {
    if rd.is_empty() {
        return Err(FitError::Empty);
    }
    Ok(sum_rows(rd.reflected().iter()))
}

/// `sum y_i` over the patterns with `v . y_i < 0` (beyond rounding).
pub fn objective_perceptron(rd: &ReflectedDataset, v: &[f64]) -> Result<Vec<f64>, FitError> {
    if v.iter().all(|x| *x == 0.0) {
        return Err(FitError::ZeroWeights);
    }
    let mut c = sum_rows(rd.reflected().iter().filter(|y| strictly_negative(v, y)));
    c.resize(rd.augmented_dim(), 0.0);
    Ok(c)
}

/// Tolerance per fuzzy row.
pub fn compute_tolerances(rd: &ReflectedDataset, cfg: &ToleranceConfig) -> Vec<f64> {
    let norms: Vec<f64> = rd.reflected().iter().map(|y| euclidean_norm(y)).collect();
    match cfg.mode {
        ToleranceMode::PerSample => norms.iter().map(|n| cfg.theta * n).collect(),
        ToleranceMode::GlobalMax => {
            let max = norms.iter().copied().fold(0.0, f64::max);
            vec![cfg.theta * max; norms.len()]
        }
    }
}

/// Indices with `v . y_i < 0` (beyond rounding), as a mask.
pub fn misclassified_mask(rd: &ReflectedDataset, v: &[f64]) -> Vec<bool> {
    rd.reflected().iter().map(|y| strictly_negative(v, y)).collect()
}

/// Perceptron criterion `sum max(0, -v.y_i)` at unit-norm `v`.
pub fn perceptron_loss(rd: &ReflectedDataset, v: &[f64]) -> f64 {
    rd.reflected().iter().map(|y| (-dot(y, v)).max(0.0)).sum()
}

pub fn fit(
    rd: &ReflectedDataset,
    criterion: Criterion,
    cfg: ToleranceConfig,
) -> Result<DiscriminantModel, FitError> {
    if rd.is_empty() {
        return Err(FitError::Empty);
    }
    let tolerances = compute_tolerances(rd, &cfg);
    let c = objective_modified(rd)?;
    let seed = solve_step(rd, c, &tolerances, 0)?;
    let seed = seed.into_model(Criterion::Modified, cfg, 1, Vec::new());
    match criterion {
        Criterion::Modified => Ok(seed),
        Criterion::Perceptron => fit_perceptron(rd, cfg, &tolerances, seed),
    }
}

fn fit_perceptron(
    rd: &ReflectedDataset,
    cfg: ToleranceConfig,
    tolerances: &[f64],
    seed: DiscriminantModel,
) -> Result<DiscriminantModel, FitError> {
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut current = seed;
    let mut seen: Vec<Vec<bool>> = Vec::new();
    let mut iterates: Vec<DiscriminantModel> = Vec::new();

    loop {
        let mask = misclassified_mask(rd, &current.v);
        let n_wrong = mask.iter().filter(|&&m| m).count();
        let solved = iterates.len();

        if n_wrong == 0 {
            // Nothing drives the objective: c = 0, the bracket is [0, 0] and
            // the current point satisfies every row crisply, so alpha = 1.
            log::info!("perceptron: no misclassified samples after {solved} iterations");
            let d = rd.augmented_dim();
            return Ok(DiscriminantModel {
                alpha: 1.0,
                z_lower: 0.0,
                z_upper: 0.0,
                objective: vec![0.0; d],
                criterion: Criterion::Perceptron,
                iterations: solved,
                status: FuzzyStatus::DegenerateBracket,
                zero_objective: true,
                trace,
                ..current
            });
        }
        if solved > 0 && seen.last() == Some(&mask) {
            log::info!("perceptron: misclassified set stable after {solved} iterations");
            return Ok(DiscriminantModel {
                iterations: solved,
                trace,
                ..current
            });
        }
        if seen.contains(&mask) || solved >= MAX_PERCEPTRON_ITERATIONS {
            // A repeated set means the deterministic sequence has entered a
            // cycle; further iterations would only replay it.
            log::warn!("perceptron: no fixed point after {solved} iterations ({n_wrong} misclassified)");
            let best = iterates
                .into_iter()
                .min_by(|a, b| perceptron_loss(rd, &a.v).total_cmp(&perceptron_loss(rd, &b.v)))
                .expect("at least one iterate");
            return Err(FitError::NotConverged {
                iterations: solved,
                best: Box::new(DiscriminantModel {
                    iterations: solved,
                    trace,
                    ..best
                }),
            });
        }
        seen.push(mask);

        let c = objective_perceptron(rd, &current.v)?;
        let step = solve_step(rd, c, tolerances, n_wrong)?;
        log::debug!(
            "perceptron iteration {}: {n_wrong} misclassified in, alpha {:.6}",
            solved + 1,
            step.solution.alpha
        );
        trace.push(step.record.clone());
        current = step.into_model(Criterion::Perceptron, cfg, solved + 1, Vec::new());
        iterates.push(current.clone());
    }
}

struct Step {
    solution: FuzzySolution,
    objective: Vec<f64>,
    v: Vec<f64>,
    record: IterationRecord,
}

impl Step {
    fn into_model(
        self,
        criterion: Criterion,
        tolerance: ToleranceConfig,
        iterations: usize,
        mut trace: Vec<IterationRecord>,
    ) -> DiscriminantModel {
        if trace.is_empty() {
            trace.push(self.record);
        }
        let zero_objective = self.objective.iter().all(|c| *c == 0.0);
        DiscriminantModel {
            v: self.v,
            raw: self.solution.point,
            alpha: self.solution.alpha,
            z_lower: self.solution.z_lower,
            z_upper: self.solution.z_upper,
            objective: self.objective,
            criterion,
            tolerance,
            iterations,
            status: self.solution.status,
            zero_objective,
            trace,
        }
    }
}

fn solve_step(
    rd: &ReflectedDataset,
    objective: Vec<f64>,
    tolerances: &[f64],
    misclassified_in: usize,
) -> Result<Step, FitError> {
    let problem = build_problem(rd, objective.clone(), tolerances.to_vec())?;
    let solution = problem.solve_maxmin()?;
    let norm = euclidean_norm(&solution.point);
    if norm < ZERO_WEIGHTS_EPS {
        return Err(FitError::ZeroDiscriminant);
    }
    let v = solution.point.iter().map(|x| x / norm).collect();
    let record = IterationRecord {
        misclassified_in,
        alpha: solution.alpha,
        z_lower: solution.z_lower,
        z_upper: solution.z_upper,
    };
    Ok(Step {
        solution,
        objective,
        v,
        record,
    })
}

/// Rows `-y_k . v <= 0` with tolerances, box `[-1, 1]`.
fn build_problem(
    rd: &ReflectedDataset,
    objective: Vec<f64>,
    tolerances: Vec<f64>,
) -> Result<FuzzyLpProblem, FitError> {
    let rows = rd
        .reflected()
        .iter()
        .map(|y| y.iter().map(|v| -v).collect())
        .collect();
    Ok(FuzzyLpProblem::new(
        objective,
        rows,
        vec![0.0; rd.len()],
        tolerances,
        WEIGHT_BOX,
    )?)
}

fn sum_rows<'a>(rows: impl Iterator<Item = &'a Vec<f64>>) -> Vec<f64> {
    let mut acc: Vec<f64> = Vec::new();
    for y in rows {
        if acc.is_empty() {
            acc = vec![0.0; y.len()];
        }
        for (a, v) in acc.iter_mut().zip(y) {
            *a += v;
        }
    }
    acc
}
