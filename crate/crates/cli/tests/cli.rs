//! Black-box tests of the CLI binary: file outputs, determinism, and the
//! exit-code contract (1 = data error, 2 = config error, 3 = degenerate).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lossprov"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lossprov-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn simulate_writes_expected_row_count_and_is_deterministic() {
    let dir = tmpdir("simulate");
    let a = dir.join("a");
    let b = dir.join("b");
    for out in [&a, &b] {
        let output = run(&[
            "simulate",
            "--seed",
            "7",
            "--samples-per-category",
            "50",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    let losses = read(&a.join("losses.csv"));
    assert_eq!(losses.lines().count(), 1 + 6 * 50);
    assert!(losses.starts_with("id,category,loss,seed\n"));
    assert_eq!(losses, read(&b.join("losses.csv")));
    assert!(a.join("manifest.json").exists());
}

#[test]
fn simulate_without_out_exits_2() {
    let output = run(&["simulate", "--seed", "7"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("--out"));
}

#[test]
fn overlap_single_category_writes_one_by_one_matrix() {
    let dir = tmpdir("overlap1");
    write(
        &dir.join("losses.csv"),
        "id,category,loss,seed\na,gen,0.1,\nb,gen,0.2,\nc,gen,0.3,\n",
    );
    let output = run(&[
        "overlap",
        "--input",
        dir.join("losses.csv").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let csv = read(&dir.join("overlap.csv"));
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with(",gen\ngen,"));
}

#[test]
fn overlap_matrix_file_is_symmetric() {
    let dir = tmpdir("overlap10");
    let mut lines = vec!["id,category,loss,seed".to_string()];
    for cat in 0..10 {
        for i in 0..20 {
            lines.push(format!(
                "s{cat}-{i},c{cat},{},",
                0.01 + 0.013 * cat as f64 + 0.002 * i as f64
            ));
        }
    }
    write(&dir.join("losses.csv"), &(lines.join("\n") + "\n"));
    let output = run(&[
        "overlap",
        "--input",
        dir.join("losses.csv").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--json",
    ]);
    assert!(output.status.success());
    let csv = read(&dir.join("overlap.csv"));
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11);
    for i in 1..11 {
        for j in 1..11 {
            assert_eq!(rows[i][j], rows[j][i], "cell ({i},{j})");
        }
        assert_eq!(rows[i][i], "1.0000");
    }
    assert!(dir.join("overlap.json").exists());
}

#[test]
fn bad_csv_exits_1_with_line_number() {
    let dir = tmpdir("badcsv");
    write(&dir.join("losses.csv"), "id,category,loss,seed\na,gen,-0.5,\n");
    let output = run(&[
        "overlap",
        "--input",
        dir.join("losses.csv").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn transform_skew_target_curve_matches_direct_objective() {
    let dir = tmpdir("transform");
    let mut lines = vec!["id,category,loss,seed".to_string()];
    for i in 0..40 {
        lines.push(format!("s{i},gen,{},", 0.01 + 0.004 * (i as f64) * (i as f64)));
    }
    write(&dir.join("losses.csv"), &(lines.join("\n") + "\n"));
    let output = run(&[
        "transform",
        "--input",
        dir.join("losses.csv").to_str().unwrap(),
        "--strategy",
        "skew",
        "--target",
        "1",
        "--grid-min",
        "-2",
        "--grid-max",
        "2",
        "--grid-step",
        "0.5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let curve: serde_json::Value =
        serde_json::from_str(&read(&dir.join("lambda_curve.json"))).unwrap();
    assert_eq!(curve["strategy"], "skewness");
    assert_eq!(curve["target"], 1.0);
    let points = curve["objective_curve"].as_array().unwrap();
    assert_eq!(points.len(), 9);

    // recompute |skewness(T_λ(x)) − 1| for one grid point through the library
    let losses: Vec<f64> = (0..40).map(|i| 0.01 + 0.004 * (i as f64) * (i as f64)).collect();
    let shifted = lossprov::transform::shift_positive(&losses, 1e-8).unwrap();
    let at_half = lossprov::transform::boxcox_apply(&shifted, 0.5).unwrap();
    let expected = (lossprov::transform::skewness(&at_half).unwrap() - 1.0).abs();
    let lambda_half = points.iter().find(|p| p[0] == 0.5).unwrap();
    assert!((lambda_half[1].as_f64().unwrap() - expected).abs() < 1e-12);

    assert!(dir.join("transformed.csv").exists());
}

fn drift_group_json() -> &'static str {
    r#"{ "name": "drift", "positive": ["gen"], "negative": ["edit-1", "edit-2", "edit-3", "edit-4", "edit-5"] }"#
}

#[test]
fn train_on_single_label_data_exits_1() {
    let dir = tmpdir("train1");
    write(
        &dir.join("losses.csv"),
        "id,category,loss,seed\na,gen,0.1,\nb,gen,0.2,\nc,gen,0.3,\n",
    );
    write(
        &dir.join("group.json"),
        r#"{ "name": "g", "positive": ["gen"], "negative": ["edit-1"] }"#,
    );
    let output = run(&[
        "train",
        "--input",
        dir.join("losses.csv").to_str().unwrap(),
        "--group",
        dir.join("group.json").to_str().unwrap(),
        "--seed",
        "1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn train_evaluate_report_round_trip() {
    let dir = tmpdir("trainflow");
    let sim = run(&[
        "simulate",
        "--seed",
        "3",
        "--samples-per-category",
        "40",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(sim.status.success());
    write(&dir.join("group.json"), drift_group_json());

    let train = run(&[
        "train",
        "--input",
        dir.join("losses.csv").to_str().unwrap(),
        "--group",
        dir.join("group.json").to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(train.status.success());
    let model: serde_json::Value = serde_json::from_str(&read(&dir.join("model.json"))).unwrap();
    assert!(model["weight"].is_f64() || model["weight"].is_i64());
    assert_eq!(model["lambda_spec"]["kind"], "boxcox");

    let eval = run(&[
        "evaluate",
        "--model",
        dir.join("model.json").to_str().unwrap(),
        "--input",
        dir.join("losses.csv").to_str().unwrap(),
        "--group",
        dir.join("group.json").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(eval.status.success());
    let report = read(&dir.join("report.csv"));
    assert!(report
        .starts_with("group,subset,precision,recall,f1,accuracy,tp,fp,fn,tn,lambda_star,strategy"));
    assert_eq!(report.lines().count(), 1 + 7); // 5 iteration rows + aggregate + overall

    let summary = run(&[
        "report",
        "--input",
        dir.join("report.json").to_str().unwrap(),
    ]);
    assert!(summary.status.success());
    let text = String::from_utf8_lossy(&summary.stdout);
    assert!(text.contains("Aggregate Iteration"));
    assert!(text.contains("group: drift"));
}

#[test]
fn pipeline_runs_on_loaded_file() {
    let dir = tmpdir("pipefile");
    let sim = run(&[
        "simulate",
        "--seed",
        "5",
        "--samples-per-category",
        "40",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(sim.status.success());
    write(&dir.join("group.json"), drift_group_json());
    let out = dir.join("run");
    let pipe = run(&[
        "pipeline",
        "--input",
        dir.join("losses.csv").to_str().unwrap(),
        "--group",
        dir.join("group.json").to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(pipe.status.success(), "{}", String::from_utf8_lossy(&pipe.stderr));
    for file in ["model.json", "lambda_curve.json", "report.csv", "report.json", "overlap.csv", "summary.txt"] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    // loaded-file runs must not re-emit dataset files
    assert!(!out.join("losses.csv").exists());
    let summary = read(&out.join("summary.txt"));
    assert!(summary.contains("train"));
    assert!(summary.contains("test"));
}

#[test]
fn pipeline_alt_identity_skips_lambda_search() {
    let dir = tmpdir("pipealt");
    let out = dir.join("run");
    let pipe = run(&[
        "pipeline",
        "--simulate",
        "--samples-per-category",
        "40",
        "--alt",
        "identity",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(pipe.status.success());
    let curve: serde_json::Value =
        serde_json::from_str(&read(&out.join("lambda_curve.json"))).unwrap();
    assert_eq!(curve["strategy"], "fixed:identity");
    assert!(curve["lambda_star"].is_null());
    let report = read(&out.join("report.csv"));
    assert!(report.lines().nth(1).unwrap().ends_with(",fixed:identity"));
}
