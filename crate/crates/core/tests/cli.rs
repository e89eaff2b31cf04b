use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fclda::persist::{ModelDocument, ModelStatus};

fn fclda(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fclda"))
        .args(args)
        .current_dir(dir)
        .env("FCLDA_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn synthetic_training_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let o = fclda(
            &["train", "--data", "synthetic", "--seed", "7", "--criterion", "modified", "--out", name],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    let b = fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let other = fclda(
        &["train", "--data", "synthetic", "--seed", "8", "--out", "c.json"],
        dir.path(),
    );
    assert_eq!(other.status.code(), Some(0));
    assert_ne!(a, fs::read(dir.path().join("c.json")).unwrap());
}

#[test]
fn missing_data_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = fclda(&["train", "--data", "no-such-file.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-such-file.csv"));
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["train", "--theta", "1.5"],
        vec!["train", "--criterion", "bogus"],
        vec!["train", "--classes", "versicolor"],
        vec!["train", "--features", "petal_girth"],
        vec!["frobnicate"],
    ] {
        let o = fclda(&args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(fclda(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn perceptron_summary_and_exit_code_follow_the_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = fclda(
        &[
            "train", "--data", "iris", "--classes", "versicolor,virginica", "--features",
            "sepal_width,petal_width", "--criterion", "perceptron", "--theta", "0.2",
        ],
        dir.path(),
    );
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("alpha = ")), "{out}");
    assert!(out.contains("NM_R = ") && out.contains("misclassified = "));
    let doc = ModelDocument::load(dir.path().join("model.json")).unwrap();
    let expected = if doc.status == ModelStatus::NotConverged { 2 } else { 0 };
    assert_eq!(o.status.code(), Some(expected));
    if doc.alpha == Some(1.0) {
        assert!(out.contains("alpha = 1\n"));
    }
}

#[test]
fn evaluate_reuses_the_model_columns() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fclda(&["train", "--criterion", "olda"], dir.path()).status.code(), Some(0));
    let o = fclda(&["evaluate", "model.json", "--out", "report.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("misclassified = 5"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["per_sample_margins"].as_array().unwrap().len(), 100);
    let raw = fclda(&["evaluate", "model.json", "--raw-margins"], dir.path());
    assert!(stdout(&raw).contains("(raw margins)"));
}

#[test]
fn plot_counts_markers_and_line() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fclda(&["train"], dir.path()).status.code(), Some(0));
    let o = fclda(&["plot", "model.json", "--out", "iris.svg"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let svg = fs::read_to_string(dir.path().join("iris.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 100);
    assert_eq!(svg.matches("<line").count(), 1);
    let csv = fs::read_to_string(dir.path().join("iris.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("line,")).count(), 2);
    assert_eq!(csv.lines().filter(|l| l.starts_with("point,")).count(), 100);
}

#[test]
fn plot_rejects_other_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let o = fclda(
        &["train", "--features", "sepal_width,petal_width,petal_length"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let o = fclda(&["plot", "model.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2 features"));
}

#[test]
fn csv_data_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("d.csv"),
        "u,v,label\n1,0,p\n2,1,p\n-1,0,q\n-2,-1,q\n",
    )
    .unwrap();
    let o = fclda(&["train", "--data", "d.csv", "--criterion", "modified"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = ModelDocument::load(dir.path().join("model.json")).unwrap();
    assert_eq!(doc.class_labels, ["p".to_string(), "q".to_string()]);
    assert_eq!(doc.feature_names, ["u", "v"]);
}

#[test]
fn reproduce_iris_writes_table_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let o = fclda(&["reproduce-iris", "--out", "rep"], dir.path());
    let code = o.status.code().unwrap();
    assert!(code == 0 || code == 2);
    let table = fs::read_to_string(dir.path().join("rep/table.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows.iter().filter(|r| r.contains(",olda,")).count(), 1);
    let stuck = rows.iter().filter(|r| r.ends_with("not-converged")).count();
    assert_eq!(code == 2, stuck > 0);
    for name in ["modified-0.1", "perceptron-0.1", "modified-0.2", "perceptron-0.2", "olda"] {
        let svg = fs::read_to_string(dir.path().join(format!("rep/{name}.svg"))).unwrap();
        assert_eq!(svg.matches("<circle").count(), 100);
        assert!(dir.path().join(format!("rep/{name}.json")).exists());
    }
}
