use std::io::Write as _;
use std::process::{Command, Output};

use betawl::quadrature::adaptive;
use betawl::{build_density, EigenDensity, EnsembleParams};
use num_rational::BigRational;
use serde_json::Value;

fn betawl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betawl"))
        .args(args)
        .env_remove("BETAWL_FLOAT_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = betawl(args);
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn envelope(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

/// Independent canonical renderer: sorted keys, integers as-is, floats as
/// 17 significant digits.
fn render(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap()),
        Value::Array(a) => format!("[{}]", a.iter().map(render).collect::<Vec<_>>().join(",")),
        Value::Object(m) => {
            let mut keys: Vec<_> = m.keys().collect();
            keys.sort();
            let body: Vec<String> = keys
                .iter()
                .map(|k| format!("{}:{}", Value::String((*k).clone()), render(&m[*k])))
                .collect();
            format!("{{{}}}", body.join(","))
        }
        other => other.to_string(),
    }
}

#[test]
fn coefficients_of_the_five_two_two_density() {
    let rows = csv_rows(&stdout(&["density", "5", "2", "2", "--format", "coeffs"]));
    let kappa: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(kappa, ["35/2", "35", "91/3", "14", "15/4", "43/72", "1/18", "1/360", "1/17280"]);
    assert_eq!(rows[0][0], "2");
}

#[test]
fn fixed_trace_grid_has_compact_support() {
    let rows = csv_rows(&stdout(&["density", "5", "2", "2", "--fixed-trace", "--grid", "0:0.2:100"]));
    assert_eq!(rows.len(), 100);
    let last: f64 = rows[99][1].parse().unwrap();
    assert_eq!(last, 0.0);
    let beyond = csv_rows(&stdout(&["density", "5", "2", "2", "--fixed-trace", "--grid", "0.2:0.3:5"]));
    assert!(beyond.iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn irrational_beta_coefficients() {
    let rows = csv_rows(&stdout(&["density", "3", "2", "e", "--format", "coeffs"]));
    let e = std::f64::consts::E;
    let den = 64.0 * (e + 1.0) * (e + 2.0).powi(2) * (e + 4.0);
    let top = 3.0 * e.powi(7) / den;
    let got: f64 = rows[4][1].parse().unwrap();
    assert!((got - top).abs() <= 1e-10 * top);
    let v = envelope(&["density", "3", "2", "e"]);
    assert_eq!(v["precision_mode"], "float(256)");
}

#[test]
fn moments_exact_and_trivial() {
    let v = envelope(&["moments", "2", "1", "2", "1", "0"]);
    let m = &v["payload"]["moments"];
    assert_eq!(m[0]["value"], "9/8");
    assert_eq!(m[1]["value"], "1");
    let neg = envelope(&["moments", "2", "1", "2", "-1"]);
    assert_eq!(neg["payload"]["moments"][0]["value"], "7/4");
    assert_eq!(betawl(&["moments", "2", "1", "2", "-2"]).status.code(), Some(2));
}

#[test]
fn moments_match_quadrature() {
    let v = envelope(&["moments", "5", "2", "2", "1", "2", "3"]);
    let p = EnsembleParams::new(5, 2, "2".parse().unwrap()).unwrap();
    let d = build_density::<BigRational>(&p, &()).unwrap();
    for (k, eta) in [1, 2, 3].into_iter().enumerate() {
        let got = v["payload"]["moments"][k]["approx"].as_f64().unwrap();
        // The density is below e^{-300} past x = 60.
        let want = adaptive(0.0, 60.0, 1e-14, |x| x.powi(eta) * d.pdf(x));
        assert!((got - want).abs() <= 1e-10 * want, "eta={eta}: {got} vs {want}");
    }
}

#[test]
fn hypergeometric_values() {
    for (args, want) in [(["3", "6", "1/3", "10"], 22.6555), (["7", "3", "4", "1"], 72.2218)] {
        let mut full = vec!["hyp1f1"];
        full.extend(args);
        let v = envelope(&full);
        let got = v["payload"]["values"][0]["approx"].as_f64().unwrap();
        assert!((got - want).abs() <= 1e-4 * want);
    }
    let v = envelope(&["hyp1f1", "4", "5", "1", "0"]);
    assert_eq!(v["payload"]["values"][0]["value"], "1");
}

#[test]
fn simulation_is_deterministic_and_fits() {
    let args = ["simulate", "5", "2", "2", "50000", "42", "--ks"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert!(v["payload"]["ks"]["statistic"].as_f64().unwrap() < 0.01);
    let other = stdout(&["simulate", "5", "2", "2", "50000", "43", "--ks"]);
    assert_ne!(a, other);
}

#[test]
fn delay_time_simulation() {
    let v = envelope(&["simulate", "8", "8", "2", "50000", "7", "--delay-time", "1", "--ks"]);
    assert!(v["payload"]["ks"]["statistic"].as_f64().unwrap() < 0.01);
    // α must equal βn/2.
    assert_eq!(betawl(&["simulate", "8", "3", "2", "100", "7", "--delay-time", "1"]).status.code(), Some(2));
}

#[test]
fn simulation_csv_and_histogram() {
    let rows = csv_rows(&stdout(&["simulate", "3", "1", "1", "1000", "1", "--format", "csv"]));
    assert_eq!(rows.len(), 1000);
    let vals: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    let v = envelope(&["simulate", "3", "1", "1", "1000", "1", "--hist"]);
    assert_eq!(v["payload"]["histogram"].as_array().unwrap().len(), 60);
}

#[test]
fn large_deviation_rates_are_anchored() {
    let rows = csv_rows(&stdout(&["asymptotics", "25", "225", "2", "--large-dev", "0:2:50"]));
    assert_eq!(rows.len(), 50);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.0);
    assert!(rows.iter().skip(1).all(|r| r[1].parse::<f64>().unwrap() > 0.0 && r[2].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn tracy_widom_table_ingestion() {
    let mut table = tempfile::NamedTempFile::new().unwrap();
    writeln!(table, "s,density\n-8,0\n0,0.5\n8,0").unwrap();
    let path = table.path().to_str().unwrap();
    let rows = csv_rows(&stdout(&["asymptotics", "10", "20", "2", "--tw-transform", "-3:3:7", "--tw-table", path]));
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[3][0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[3][2].parse::<f64>().unwrap(), 0.5);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() >= 0.0));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.csv");
    let out = betawl(&[
        "asymptotics",
        "10",
        "20",
        "2",
        "--tw-transform",
        "-3:3:7",
        "--tw-table",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Tracy-Widom table"));
}

#[test]
fn verify_suites_pass() {
    for suite in ["appendixB", "tables", "small"] {
        let v = envelope(&["verify", "--suite", suite]);
        assert_eq!(v["payload"]["passed"], true, "{suite}");
    }
    let v = envelope(&["verify", "--suite", "appendixB"]);
    assert_eq!(v["payload"]["checks"][0]["actual"], "159/16");
}

#[test]
fn envelopes_are_canonical() {
    for args in [
        &["density", "3", "2", "1/2", "--grid", "0:2:5", "--format", "json"][..],
        &["hyp1f1", "3", "2", "5pi", "7"][..],
        &["asymptotics", "25", "225", "2"][..],
    ] {
        let text = stdout(args);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(format!("{}\n", render(&v)), text, "{args:?}");
        for key in ["command", "params", "precision_mode", "payload", "version"] {
            assert!(v.get(key).is_some(), "{key} missing");
        }
    }
}

#[test]
fn parameter_errors_exit_with_two() {
    for args in [
        &["density", "3", "1.5", "2"][..],
        &["density", "3", "2", "-1"][..],
        &["density", "3", "2", "banana"][..],
        &["density", "3", "2", "2", "--grid", "0:1"][..],
        &["density", "3", "2", "pi", "--precision", "exact"][..],
        &["density", "1", "2", "2", "--fixed-trace"][..],
        &["verify", "--suite", "nope"][..],
    ] {
        assert_eq!(betawl(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn precision_environment_variable() {
    let out = Command::new(env!("CARGO_BIN_EXE_betawl"))
        .args(["density", "3", "2", "pi"])
        .env("BETAWL_FLOAT_BITS", "300")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["precision_mode"], "float(300)");
    let bad = Command::new(env!("CARGO_BIN_EXE_betawl"))
        .args(["density", "3", "2", "pi"])
        .env("BETAWL_FLOAT_BITS", "few")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
