use std::path::PathBuf;
use std::process::{Command, Output};

use bweibull::report::Report;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bweibull"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn bweibull")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bweibull-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn fit_reports_estimates_and_gof() {
    let out = stdout(&run(&["fit", "carbon_fibers", "--q", "1", "--seed", "42"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    let m = &v["models"][v["selected"].as_u64().unwrap() as usize];
    let fit = &m["fit"];
    assert!(fit["log_likelihood"].as_f64().unwrap() >= -48.7597067 - 1e-3);
    assert_eq!(fit["q"].as_f64(), Some(1.0));
    for key in ["alpha", "beta", "delta"] {
        assert!(fit["theta_hat"][key].as_f64().unwrap().is_finite());
    }
    assert_eq!(fit["standard_errors"].as_array().unwrap().len(), 3);
    let gof = m["gof"].as_array().unwrap();
    assert_eq!(gof.len(), 2);
    for g in gof {
        for key in ["ks_stat", "ks_pvalue", "cvm_stat", "cvm_pvalue"] {
            assert!(g[key].as_f64().is_some(), "{key} missing");
        }
    }
    assert!(v.get("timing").is_none_or(Value::is_null));
}

#[test]
fn reports_are_reproducible_and_typed() {
    let args = [
        "fit",
        "carbon_fibers",
        "--q",
        "0.8",
        "--seed",
        "7",
        "--iterations",
        "3000",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let r: Report = serde_json::from_str(&a).unwrap();
    assert_eq!(r.seed, 7);
    assert_eq!(r.selected_model().fit.q, 0.8);
    assert_eq!(serde_json::to_string_pretty(&r).unwrap().trim_end(), a.trim_end());
}

#[test]
fn q_scan_selects_from_the_grid() {
    let out = stdout(&run(&[
        "fit",
        "carbon_fibers",
        "--q",
        "scan",
        "--grid",
        "0.8,0.9,1",
        "--iterations",
        "2000",
    ]));
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.q_grid, vec![0.8, 0.9, 1.0]);
    assert_eq!(r.models.len(), 3);
    assert!(r.selected < 3);
    let same = stdout(&run(&[
        "qscan",
        "carbon_fibers",
        "--grid",
        "0.8,0.9,1",
        "--iterations",
        "2000",
    ]));
    assert_eq!(out, same);
}

#[test]
fn fit_csv_has_one_row_per_model() {
    let out = stdout(&run(&[
        "fit",
        "wheaton_river",
        "--q",
        "1",
        "--iterations",
        "2000",
        "--format",
        "csv",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("model,q,alpha,beta,delta"));
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

#[test]
fn empty_file_is_an_input_error() {
    let path = scratch("empty.txt", "");
    let o = run(&["fit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty dataset"));
}

#[test]
fn bad_line_is_reported() {
    let path = scratch("bad.txt", "1.2\n3.4\nabc\n");
    let o = run(&["fit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains('3'),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn missing_file_is_an_input_error() {
    let o = run(&["fit", "/nonexistent/nothing.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_is_seeded() {
    let args = [
        "sample", "--alpha", "2", "--beta", "1.5", "--delta", "-0.4", "-n", "25", "--seed", "9",
    ];
    let a = stdout(&run(&args));
    assert_eq!(a, stdout(&run(&args)));
    let xs: Vec<f64> = a.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(xs.len(), 25);
    assert!(xs.iter().all(|x| *x > 0.0));
    assert_ne!(
        a,
        stdout(&run(&[
            "sample", "--alpha", "2", "--beta", "1.5", "--delta", "-0.4", "-n", "25", "--seed", "10"
        ]))
    );
}

#[test]
fn zero_sample_size_is_rejected() {
    let o = run(&["sample", "--alpha", "2", "--beta", "1", "--delta", "0", "-n", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_parameters_are_rejected() {
    let o = run(&["sample", "--alpha", "-1", "--beta", "1", "--delta", "0", "-n", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

fn table(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn describe_tabulates_a_distribution() {
    let rows = table(&stdout(&run(&[
        "describe", "--alpha", "2", "--beta", "2", "--delta", "1.2", "--points", "200",
    ])));
    assert_eq!(rows.len(), 200);
    assert!(rows.windows(2).all(|w| w[1][2] >= w[0][2]));
    assert!(rows.last().unwrap()[2] > 0.99);
}

#[test]
fn describe_reduces_to_weibull() {
    let rows = table(&stdout(&run(&[
        "describe", "--alpha", "1.7", "--beta", "0.8", "--delta", "0",
    ])));
    for r in rows {
        assert!((r[1] - r[4]).abs() <= 1e-12 * r[4].max(1.0), "{r:?}");
        assert!((r[2] - r[5]).abs() <= 1e-12, "{r:?}");
    }
}

#[test]
fn gof_reports_both_conventions() {
    let out = stdout(&run(&[
        "gof",
        "carbon_fibers",
        "--alpha",
        "3.7",
        "--beta",
        "2.75",
        "--delta",
        "2.3",
        "--format",
        "csv",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "convention,ks,p_ks,cvm,p_cvm");
    assert_eq!(lines.len(), 3);
    let paper: Vec<f64> = lines[1].split(',').skip(1).map(|c| c.parse().unwrap()).collect();
    assert!(paper[3] <= 1.0 / 6.0);
    let json = stdout(&run(&[
        "gof",
        "carbon_fibers",
        "--alpha",
        "3.7",
        "--beta",
        "2.75",
        "--delta",
        "2.3",
        "--convention",
        "standard",
    ]));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert!(v.is_array() || v.is_object());
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("bweibull-cli-out-{}.json", std::process::id()));
    let args = ["fit", "carbon_fibers", "--iterations", "1500"];
    let direct = stdout(&run(&args));
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    stdout(&run(&with_out));
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim_end(), direct.trim_end());
    std::fs::remove_file(path).ok();
}
