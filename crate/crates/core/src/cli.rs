//! The `fclda` command.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dataset::{
    augment_reflect, iris, load_csv, select_binary, synthetic_two_gaussians, BinaryDataset,
    DatasetError, DEFAULT_LABEL_COLUMN,
};
use crate::discriminant::{fit, Criterion, FitError, ToleranceConfig, ToleranceMode};
use crate::metrics::{margin_report, MarginReport, MarginScale, MetricsError, NoiseMargin};
use crate::olda::{fit_fisher, OldaError};
use crate::persist::{ModelDocument, ModelStatus, PersistError};
use crate::plot::{render, PlotError};

pub const LOG_ENV: &str = "FCLDA_LOG";

const IRIS_CLASSES: [&str; 2] = ["versicolor", "virginica"];
const IRIS_FEATURES: [&str; 2] = ["sepal_width", "petal_width"];
const SYNTHETIC_PER_CLASS: usize = 50;
const SYNTHETIC_MEANS: [[f64; 2]; 2] = [[2.0, 0.0], [-2.0, 0.0]];
const SYNTHETIC_STDDEV: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(name = "fclda", version, about = "Fuzzy-constrained linear discriminant analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a discriminant and write the model document.
    Train(TrainArgs),
    /// Report margins and error counts of a saved model.
    Evaluate(EvaluateArgs),
    /// Both criteria at theta 0.1 and 0.2 on the Iris pair, plus OLDA.
    ReproduceIris(ReproduceArgs),
    /// Scatter plot with the decision line (two features only).
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// `iris`, `synthetic`, or a CSV file with a `label` column.
    #[arg(long, default_value = "iris")]
    pub data: String,
    /// Class pair, first one is class 1.
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Seed for `--data synthetic`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Modified,
    Perceptron,
    Olda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToleranceModeArg {
    PerSample,
    GlobalMax,
}

impl From<ToleranceModeArg> for ToleranceMode {
    fn from(m: ToleranceModeArg) -> Self {
        match m {
            ToleranceModeArg::PerSample => ToleranceMode::PerSample,
            ToleranceModeArg::GlobalMax => ToleranceMode::GlobalMax,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "modified")]
    pub criterion: CriterionArg,
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    #[arg(long, value_enum, default_value = "per-sample")]
    pub tolerance_mode: ToleranceModeArg,
    #[arg(long, default_value = "model.json")]
    pub out: PathBuf,
    /// Measure margins with the unnormalized weights.
    #[arg(long)]
    pub raw_margins: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Also write the full margin report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub raw_margins: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(long, default_value = "iris-reproduction")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "per-sample")]
    pub tolerance_mode: ToleranceModeArg,
    #[arg(long)]
    pub raw_margins: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// SVG path; the companion CSV goes next to it. Defaults to the model
    /// path with an `.svg` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Persist(#[from] PersistError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("training failed: {0}")]
    Fit(FitError),
    #[error("training failed: {0}")]
    Olda(#[from] OldaError),
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Fit(_) | CliError::Olda(_) | CliError::NotConverged(_) => 2,
            _ => 1,
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::BadTheta(_) => CliError::Config(e.to_string()),
            e => CliError::Fit(e),
        }
    }
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => cmd_train(&a, out),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::ReproduceIris(a) => cmd_reproduce_iris(&a, out),
        Command::Plot(a) => cmd_plot(&a, out),
    }
}

/// Defaults for class pair and features when the flags are absent.
struct Defaults<'a> {
    classes: Option<[&'a str; 2]>,
    features: Option<Vec<&'a str>>,
}

pub fn load_data(args: &DataArgs) -> Result<BinaryDataset, CliError> {
    load_data_with(args, None)
}

fn load_data_with(args: &DataArgs, model: Option<&ModelDocument>) -> Result<BinaryDataset, CliError> {
    let (ds, builtin) = match args.data.as_str() {
        "iris" => (
            iris(),
            Defaults {
                classes: Some(IRIS_CLASSES),
                features: Some(IRIS_FEATURES.to_vec()),
            },
        ),
        "synthetic" => (
            synthetic_two_gaussians(
                SYNTHETIC_PER_CLASS,
                &SYNTHETIC_MEANS[0],
                &SYNTHETIC_MEANS[1],
                SYNTHETIC_STDDEV,
                args.seed,
            )?,
            Defaults {
                classes: Some(["class1", "class2"]),
                features: None,
            },
        ),
        path => (
            load_csv(path, DEFAULT_LABEL_COLUMN)?,
            Defaults {
                classes: None,
                features: None,
            },
        ),
    };

    let classes: [String; 2] = match (&args.classes, model) {
        (Some(c), _) => c.clone().try_into().map_err(|c: Vec<String>| {
            CliError::Config(format!("--classes needs exactly two labels, got {}", c.len()))
        })?,
        (None, Some(doc)) => doc.class_labels.clone(),
        (None, None) => match builtin.classes {
            Some([a, b]) => [a.to_string(), b.to_string()],
            None => {
                let labels = ds.distinct_labels();
                match labels.as_slice() {
                    [a, b] => [a.to_string(), b.to_string()],
                    _ => {
                        return Err(CliError::Config(format!(
                            "data has {} labels; choose two with --classes",
                            labels.len()
                        )))
                    }
                }
            }
        },
    };
    let features: Vec<String> = match (&args.features, model) {
        (Some(f), _) => f.clone(),
        (None, Some(doc)) => doc.feature_names.clone(),
        (None, None) => match builtin.features {
            Some(f) => f.iter().map(|s| s.to_string()).collect(),
            None => ds.feature_names().to_vec(),
        },
    };
    Ok(select_binary(&ds, &classes[0], &classes[1], &features)?)
}

fn scale(raw: bool) -> MarginScale {
    if raw {
        MarginScale::Raw
    } else {
        MarginScale::Normalized
    }
}

/// Up to six decimals, trailing zeros dropped: `1`, `0.7345`.
pub fn fmt_fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn fmt_margin(nm: &NoiseMargin) -> String {
    if nm.degenerate {
        "0 (degenerate)".into()
    } else {
        format!("{:.4e}", nm.value)
    }
}

/// Fitted model plus whether it came out of a settled fit.
pub struct Trained {
    pub document: ModelDocument,
    pub converged: bool,
    pub iterations_used: usize,
}

pub fn train(
    bds: &BinaryDataset,
    criterion: CriterionArg,
    tolerance: ToleranceConfig,
) -> Result<Trained, CliError> {
    let crit = match criterion {
        CriterionArg::Olda => {
            let m = fit_fisher(bds)?;
            return Ok(Trained {
                document: ModelDocument::from_fisher(&m, bds),
                converged: true,
                iterations_used: 0,
            });
        }
        CriterionArg::Modified => Criterion::Modified,
        CriterionArg::Perceptron => Criterion::Perceptron,
    };
    let rd = augment_reflect(bds)?;
    match fit(&rd, crit, tolerance) {
        Ok(m) => Ok(Trained {
            document: ModelDocument::from_fclda(&m, bds, true),
            converged: true,
            iterations_used: m.iterations(),
        }),
        Err(FitError::NotConverged { iterations, best }) => Ok(Trained {
            document: ModelDocument::from_fclda(&best, bds, false),
            converged: false,
            iterations_used: iterations,
        }),
        Err(e) => Err(e.into()),
    }
}

fn write_summary(
    out: &mut dyn Write,
    doc: &ModelDocument,
    report: &MarginReport,
) -> std::io::Result<()> {
    let crit = match doc.criterion {
        crate::persist::ModelKind::Modified => "modified",
        crate::persist::ModelKind::Perceptron => "perceptron",
        crate::persist::ModelKind::Olda => "olda",
    };
    match (doc.theta, &doc.mode) {
        (Some(t), Some(m)) => writeln!(out, "criterion = {crit}, theta = {}, mode = {m}", fmt_fixed(t))?,
        _ => writeln!(out, "criterion = {crit}")?,
    }
    writeln!(
        out,
        "classes = {} (class 1), {} (class 2); features = {}",
        doc.class_labels[0],
        doc.class_labels[1],
        doc.feature_names.join(",")
    )?;
    if let Some(a) = doc.alpha {
        writeln!(out, "alpha = {}", fmt_fixed(a))?;
    }
    if let (Some(zl), Some(zu)) = (doc.z_lower, doc.z_upper) {
        writeln!(out, "z_lower = {zl:.6e}, z_upper = {zu:.6e}")?;
    }
    let v: Vec<String> = doc.v.normalized.iter().map(|x| format!("{x:.6}")).collect();
    writeln!(out, "v = ({})", v.join(", "))?;
    writeln!(
        out,
        "NM_R = {}, NM_L = {} ({} margins)",
        fmt_margin(&report.nm_right),
        fmt_margin(&report.nm_left),
        match report.scale {
            MarginScale::Normalized => "normalized",
            MarginScale::Raw => "raw",
        }
    )?;
    writeln!(
        out,
        "misclassified = {} ({}: {}, {}: {})",
        report.misclassified.total(),
        doc.class_labels[0],
        report.misclassified.class_one,
        doc.class_labels[1],
        report.misclassified.class_two
    )?;
    let status = status_name(doc.status);
    match doc.iterations {
        Some(n) => writeln!(out, "status = {status}, iterations = {n}"),
        None => writeln!(out, "status = {status}"),
    }
}

fn status_name(s: ModelStatus) -> &'static str {
    match s {
        ModelStatus::Ok => "ok",
        ModelStatus::DegenerateBracket => "degenerate-bracket",
        ModelStatus::NotConverged => "not-converged",
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source,
    }
}

pub fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tolerance = ToleranceConfig::new(args.theta, args.tolerance_mode.into())?;
    let bds = load_data(&args.data)?;
    log::info!(
        "training {:?} on {} samples ({} vs {})",
        args.criterion,
        bds.len(),
        bds.class_labels()[0],
        bds.class_labels()[1]
    );
    let trained = train(&bds, args.criterion, tolerance)?;
    let doc = &trained.document;
    let report = margin_report(doc, &bds, scale(args.raw_margins), doc.alpha)?;
    write_summary(out, doc, &report).map_err(stdout_err)?;
    doc.save(&args.out)?;
    writeln!(out, "model written to {}", args.out.display()).map_err(stdout_err)?;
    if !trained.converged {
        return Err(CliError::NotConverged(format!(
            "perceptron iteration found no stable misclassified set after {} iterations; \
             the written model is the best iterate",
            trained.iterations_used
        )));
    }
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let doc = ModelDocument::load(&args.model)?;
    let bds = load_data_with(&args.data, Some(&doc))?;
    let report = margin_report(&doc, &bds, scale(args.raw_margins), doc.alpha)?;
    write_summary(out, &doc, &report).map_err(stdout_err)?;
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&report).expect("reports always serialize") + "\n";
        fs::write(path, text).map_err(io_err(path))?;
    }
    Ok(())
}

pub fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let doc = ModelDocument::load(&args.model)?;
    let bds = load_data_with(&args.data, Some(&doc))?;
    let svg_path = args
        .out
        .clone()
        .unwrap_or_else(|| args.model.with_extension("svg"));
    let title = format!("{} vs {}", bds.class_labels()[0], bds.class_labels()[1]);
    write_plot(&doc, &bds, &title, &svg_path)?;
    writeln!(out, "plot written to {}", svg_path.display()).map_err(stdout_err)?;
    Ok(())
}

fn write_plot(
    doc: &ModelDocument,
    bds: &BinaryDataset,
    title: &str,
    svg_path: &Path,
) -> Result<(), CliError> {
    let plot = render(doc, bds, title)?;
    if let Some(w) = &plot.warning {
        log::warn!("{}: {w}", svg_path.display());
        eprintln!("warning: {w}");
    }
    fs::write(svg_path, &plot.svg).map_err(io_err(svg_path))?;
    let csv_path = svg_path.with_extension("csv");
    fs::write(&csv_path, &plot.csv).map_err(io_err(&csv_path))?;
    Ok(())
}

/// One row of the reproduction table.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub name: String,
    pub criterion: CriterionArg,
    pub theta: Option<f64>,
    pub document: ModelDocument,
    pub report: MarginReport,
    pub converged: bool,
}

/// The five Iris fits; run concurrently, returned in a fixed order.
pub fn reproduce_iris(mode: ToleranceMode, margins: MarginScale) -> Result<Vec<RunRow>, CliError> {
    let data = DataArgs {
        data: "iris".into(),
        classes: None,
        features: None,
        seed: 0,
    };
    let bds = load_data(&data)?;
    let mut jobs: Vec<(CriterionArg, Option<f64>)> = Vec::new();
    for theta in [0.1, 0.2] {
        jobs.push((CriterionArg::Modified, Some(theta)));
        jobs.push((CriterionArg::Perceptron, Some(theta)));
    }
    jobs.push((CriterionArg::Olda, None));

    let results: Vec<Result<RunRow, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(criterion, theta)| {
                let bds = &bds;
                s.spawn(move || {
                    let tolerance = ToleranceConfig::new(theta.unwrap_or(0.0), mode)?;
                    let trained = train(bds, criterion, tolerance)?;
                    let report = margin_report(&trained.document, bds, margins, trained.document.alpha)?;
                    let name = match (criterion, theta) {
                        (CriterionArg::Modified, Some(t)) => format!("modified-{t}"),
                        (CriterionArg::Perceptron, Some(t)) => format!("perceptron-{t}"),
                        _ => "olda".to_string(),
                    };
                    Ok(RunRow {
                        name,
                        criterion,
                        theta,
                        document: trained.document,
                        report,
                        converged: trained.converged,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fit thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}

pub fn table_csv(rows: &[RunRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ok = "writing to memory";
    w.write_record([
        "run", "criterion", "theta", "alpha", "nm_r", "nm_l", "misclassified", "status",
    ])
    .expect(ok);
    for r in rows {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
        w.write_record([
            r.name.clone(),
            format!("{:?}", r.criterion).to_lowercase(),
            opt(r.theta),
            opt(r.document.alpha),
            format!("{:?}", r.report.nm_right.value),
            format!("{:?}", r.report.nm_left.value),
            r.report.misclassified.total().to_string(),
            status_name(r.document.status).to_string(),
        ])
        .expect(ok);
    }
    String::from_utf8(w.into_inner().expect(ok)).expect("csv output is UTF-8")
}

fn table_text(rows: &[RunRow]) -> String {
    let mut s = format!(
        "{:<16} {:>6} {:>10} {:>12} {:>12} {:>6}  {}\n",
        "run", "theta", "alpha", "NM_R", "NM_L", "errors", "status"
    );
    for r in rows {
        s += &format!(
            "{:<16} {:>6} {:>10} {:>12} {:>12} {:>6}  {}\n",
            r.name,
            r.theta.map(fmt_fixed).unwrap_or_else(|| "-".into()),
            r.document.alpha.map(fmt_fixed).unwrap_or_else(|| "-".into()),
            fmt_margin(&r.report.nm_right),
            fmt_margin(&r.report.nm_left),
            r.report.misclassified.total(),
            status_name(r.document.status)
        );
    }
    s
}

pub fn cmd_reproduce_iris(args: &ReproduceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = reproduce_iris(args.tolerance_mode.into(), scale(args.raw_margins))?;
    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let bds = load_data(&DataArgs {
        data: "iris".into(),
        classes: None,
        features: None,
        seed: 0,
    })?;
    for r in &rows {
        let json = args.out.join(format!("{}.json", r.name));
        r.document.save(&json)?;
        let title = match r.theta {
            Some(t) => format!("{:?} criterion, theta = {t}", r.criterion).to_lowercase(),
            None => "ordinary LDA".into(),
        };
        write_plot(&r.document, &bds, &title, &args.out.join(format!("{}.svg", r.name)))?;
    }
    let table = args.out.join("table.csv");
    fs::write(&table, table_csv(&rows)).map_err(io_err(&table))?;
    out.write_all(table_text(&rows).as_bytes()).map_err(stdout_err)?;
    writeln!(out, "results written to {}", args.out.display()).map_err(stdout_err)?;

    let stuck: Vec<&str> = rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| r.name.as_str())
        .collect();
    if !stuck.is_empty() {
        return Err(CliError::NotConverged(format!(
            "no stable misclassified set for {}; their rows report the best iterate",
            stuck.join(", ")
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_formatting() {
        assert_eq!(fmt_fixed(1.0), "1");
        assert_eq!(fmt_fixed(0.73450001), "0.7345");
        assert_eq!(fmt_fixed(-0.0000001), "0");
        assert_eq!(fmt_fixed(0.2), "0.2");
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "fclda",
            "train",
            "--data",
            "iris",
            "--classes",
            "versicolor,virginica",
            "--features",
            "sepal_width,petal_width",
            "--criterion",
            "perceptron",
            "--theta",
            "0.2",
            "--tolerance-mode",
            "global-max",
            "--seed",
            "3",
            "--out",
            "m.json",
            "--raw-margins",
        ])
        .unwrap();
        let Command::Train(a) = cli.command else {
            panic!("expected train")
        };
        assert_eq!(a.data.classes.unwrap(), ["versicolor", "virginica"]);
        assert_eq!(a.criterion, CriterionArg::Perceptron);
        assert_eq!(a.tolerance_mode, ToleranceModeArg::GlobalMax);
        assert!(a.raw_margins);
    }

    #[test]
    fn class_pair_must_have_two_entries() {
        let args = DataArgs {
            data: "iris".into(),
            classes: Some(vec!["setosa".into()]),
            features: None,
            seed: 0,
        };
        assert!(matches!(load_data(&args), Err(CliError::Config(_))));
    }

    #[test]
    fn iris_defaults() {
        let args = DataArgs {
            data: "iris".into(),
            classes: None,
            features: None,
            seed: 0,
        };
        let bds = load_data(&args).unwrap();
        assert_eq!(bds.len(), 100);
        assert_eq!(bds.feature_names(), ["sepal_width", "petal_width"]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
        assert_eq!(CliError::from(FitError::BadTheta(2.0)).exit_code(), 1);
        assert_eq!(CliError::Fit(FitError::Empty).exit_code(), 2);
        assert_eq!(CliError::NotConverged("x".into()).exit_code(), 2);
    }
}
