use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use classdist::model::{class_probabilities, ModelParams};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_classdist"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("RUST_LOG", "error").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn english() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/letter_frequency_en.csv")
        .to_string_lossy()
        .into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path: PathBuf = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_curve(path: &Path) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn exit_code_for_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "label,count\na,1\nb,oops\n");
    let out = run(&["fit", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = run(&["fit", &dir.path().join("missing.csv").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["fit", &english(), "--z-step", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_for_degenerate_input() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.csv", "label,count\na,0\nb,0\n");
    assert_eq!(run(&["fit", &zero]).status.code(), Some(3));
    let neg = write(dir.path(), "neg.csv", "label,count\na,4\nb,-1\n");
    assert_eq!(run(&["fit", &neg]).status.code(), Some(3));
}

#[test]
fn exit_code_without_element_count() {
    let out = run(&["pvalue", &english(), "--trials", "10"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn fit_json_matches_text_report() {
    let v = json(&["fit", &english(), "--json"]);
    assert_eq!(v["m"], 26);
    assert_eq!(v["classes"].as_array().unwrap().len(), 26);
    let error = v["error"].as_f64().unwrap();
    assert!((error - 0.033).abs() < 0.005);
    let text = String::from_utf8(run(&["fit", &english()]).stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("error")).unwrap();
    let shown: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((shown - error).abs() < 5e-6 * error);
}

#[test]
fn emitted_curves_agree_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let curves = dir.path().to_string_lossy().into_owned();
    let v = json(&["fit", &english(), "--json", "--emit-curves", &curves]);
    let error = v["error"].as_f64().unwrap();
    let n0 = v["params"]["n0"].as_u64().unwrap() as f64;
    let z = v["params"]["z"].as_f64().unwrap();

    let by_z = read_curve(&dir.path().join("letter_frequency_en_error_vs_z.csv"));
    let best = by_z.iter().min_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert_eq!(best[2], error);
    assert_eq!(best[0], z);
    assert_eq!(best[1], n0);

    let by_n0 = read_curve(&dir.path().join("letter_frequency_en_error_vs_n0.csv"));
    let row = by_n0.iter().find(|r| r[0] == n0).unwrap();
    assert_eq!(row[1], error);
}

#[test]
fn single_trial_p_value_is_zero_or_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.csv", "# elements=200\nlabel,count\na,90\nb,60\nc,30\nd,20\n");
    for seed in ["0", "1", "2"] {
        let v = json(&["pvalue", &f, "--trials", "1", "--seed", seed, "--json"]);
        let p = v["p_value"].as_f64().unwrap();
        assert!(p == 0.0 || p == 1.0);
        assert_eq!(v["m_elements"], 200);
    }
}

#[test]
fn model_generated_data_is_fitted_best_by_the_model() {
    let p = class_probabilities(&ModelParams::new(4, 0.3).unwrap(), 20).unwrap();
    let mut text = String::from("label,count\n");
    for (i, x) in p.iter().enumerate() {
        text.push_str(&format!("c{i},{:e}\n", x * 1e6));
    }
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "model.csv", &text);
    let v = json(&["compare", &f, "--json"]);
    let main = v["main"]["error"].as_f64().unwrap();
    assert!(main < 1e-6, "main error {main}");
    for b in v["baselines"].as_array().unwrap() {
        assert!(b["error"].as_f64().unwrap() > main, "{}", b["method"]);
    }
}

#[test]
fn compare_dir_reports_every_dataset() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.csv", "label,count\nx,50\ny,30\nz,15\nw,5\n");
    write(dir.path(), "b.csv", "label,count\nx,40\ny,35\nz,20\nw,5\nv,1\n");
    write(dir.path(), "broken.csv", "label,count\nx,1,2\n");
    let out = run(&["compare", "--dir", &dir.path().to_string_lossy(), "--refine-rounds", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("a") && text.contains("b"));
    assert!(text.contains("broken"));
}
