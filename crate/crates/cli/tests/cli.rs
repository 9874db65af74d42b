use std::fs;
use std::process::{Command, Output};

use maxassign_core::{predicted_max, ExperimentReport, GammaModel, MODEL_SPEC_GRAMMAR};

fn maxassign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxassign"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV table, split into fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn predict_constant_ten() {
    let out = maxassign(&["predict", "constant:1", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,g_numeric,g_asymptotic,predicted_numeric,predicted_asymptotic\n"));
    let r = &rows(&text)[0];
    let predicted: f64 = r[3].parse().unwrap();
    assert!((predicted - 10.0 * 10f64.ln().ln_1p()).abs() < 1e-8);
}

#[test]
fn predict_pareto_asymptotic_column() {
    let out = maxassign(&["predict", "pareto:3", "100"]);
    let r = &rows(&stdout(&out))[0];
    let asy: f64 = r[4].parse().unwrap();
    assert!((asy - 230.258_509_299_404_6).abs() < 1e-9);
}

#[test]
fn predict_matches_library() {
    let out = maxassign(&["predict", "exp", "1000"]);
    let r = &rows(&stdout(&out))[0];
    let cli: f64 = r[3].parse().unwrap();
    assert_eq!(
        cli,
        predicted_max(&GammaModel::StdExponential, 1000).unwrap()
    );
}

#[test]
fn predict_json_keys_follow_csv_columns() {
    let out = maxassign(&["predict", "uniform", "20,40", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let keys: Vec<&str> = v[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(
        keys,
        [
            "n",
            "g_numeric",
            "g_asymptotic",
            "predicted_numeric",
            "predicted_asymptotic"
        ]
    );
    assert_eq!(v[1]["n"], 40);
}

#[test]
fn bad_arguments_exit_two() {
    for args in [
        &["predict", "gauss", "10"][..],
        &["predict", "exp", "1"],
        &["predict", "constant:-1", "10"],
        &["simulate", "exp", "--sizes", "10,5"],
        &["simulate", "exp", "--sizes", "10", "--replicates", "1"],
        &["simulate", "exp", "--sizes", "10", "--mode", "both"],
        &["tail-check", "exp", "--samples", "100"],
        &["tail-check", "exp", "--r", "-1"],
    ] {
        assert_eq!(maxassign(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn simulate_is_byte_deterministic_and_round_trips() {
    let args = [
        "simulate",
        "constant:1",
        "--sizes",
        "10,20",
        "--replicates",
        "50",
        "--seed",
        "7",
    ];
    let a = maxassign(&args);
    let b = maxassign(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report = ExperimentReport::read_csv(&a.stdout[..]).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.replicates, 50);
    assert_eq!(report.to_csv_string().as_bytes(), &a.stdout[..]);

    let json = maxassign(&[&args[..], &["--format", "json"]].concat());
    let from_json = ExperimentReport::from_json_str(&stdout(&json)).unwrap();
    assert_eq!(from_json, report);
}

#[test]
fn simulate_writes_file_and_compare_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let p = path.to_str().unwrap();
    let sim = maxassign(&["simulate", "exp", "--sizes", "5..15:5", "-m", "20", "-o", p]);
    assert!(sim.status.success());
    assert!(sim.stdout.is_empty());
    let cmp = maxassign(&["compare", p]);
    assert!(cmp.status.success());
    let text = stdout(&cmp);
    assert!(text.contains("# max rel_err_numeric"), "{text}");
    assert!(text.contains("# rel_err_asymptotic range"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);

    let missing = maxassign(&["compare", dir.path().join("nope.csv").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn tail_check_closed_form_and_zero_level() {
    let r = std::f64::consts::LN_2.to_string();
    let out = maxassign(&[
        "tail-check",
        "constant:1",
        "--r",
        &format!("0,{r}"),
        "--samples",
        "100000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&stdout(&out));
    let parse = |s: &str| s.parse::<f64>().unwrap();
    assert_eq!(parse(&table[0][1]), 1.0);
    assert_eq!(parse(&table[0][2]), 1.0);
    assert_eq!(parse(&table[0][3]), 0.0);
    assert!((parse(&table[1][2]) - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn tail_check_exponential_levels() {
    let out = maxassign(&["tail-check", "exp", "--r", "1,2,3", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    for row in rows(&stdout(&out)) {
        assert!(row[3].parse::<f64>().unwrap().abs() <= 4.0);
    }
}

#[test]
fn solve_examples() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    };
    let out = maxassign(&["solve", &write("a.csv", "1,2,0\n0,5,1\n2,0,3\n")]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().parse::<f64>().unwrap(), 9.0);
    assert_eq!(lines.next().unwrap(), "0 1 2");

    let out = maxassign(&["solve", &write("b.csv", "5")]);
    assert_eq!(stdout(&out), "5.0000000000000000e0\n0\n");

    let out = maxassign(&["solve", &write("c.csv", "1,2,3\n4,5,6\n")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_model_grammar() {
    for sub in ["predict", "simulate", "compare", "tail-check", "solve"] {
        let out = maxassign(&[sub, "--help"]);
        assert!(out.status.success());
        assert!(stdout(&out).contains(MODEL_SPEC_GRAMMAR), "{sub}");
    }
}
