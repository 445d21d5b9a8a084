use std::path::Path;
use std::process::{Command, Output};

use calabi_core::report::{ReportEnvelope, RunResults};

fn calabi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_calabi"))
        .args(args)
        .env("CALABI_LOG_LEVEL", "error")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_then_verify_then_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = calabi(&["solve-conical", "--m", "1", "--beta0", "1", "-o", path_str(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let env = ReportEnvelope::read(&report).unwrap();
    let RunResults::Conical(run) = &env.results else { panic!("wrong kind") };
    assert!(run.solve.spec.alpha < 0.0);
    assert!(run.paper_targets.contains_key("logbf_conical"));

    assert_eq!(calabi(&["verify", "--input", path_str(&report)]).status.code(), Some(0));

    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    for x in json["results"]["profile"]["phi"].as_array_mut().unwrap() {
        *x = serde_json::json!(x.as_f64().unwrap() * 1.01);
    }
    let tampered = dir.path().join("t.json");
    std::fs::write(&tampered, serde_json::to_string(&json).unwrap()).unwrap();
    assert_eq!(calabi(&["verify", "--input", path_str(&tampered)]).status.code(), Some(2));
}

#[test]
fn sweep_csv_has_six_sorted_rows() {
    let out = calabi(&["sweep", "--m", "2,0.5,1", "--beta0", "1,0.5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "m", "beta0", "beta_inf", "alpha_star", "C_m", "residual_bvp", "logbf_conical", "line_residual",
            "chern_integral", "lambda0", "lambda1", "status"
        ]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    let key = |r: &csv::StringRecord| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap());
    assert!(rows.windows(2).all(|w| key(&w[0]) < key(&w[1])));
    for r in &rows {
        let beta0: f64 = r[1].parse().unwrap();
        let beta_inf: f64 = r[2].parse().unwrap();
        let alpha: f64 = r[3].parse().unwrap();
        assert!(beta_inf > beta0 && alpha < 0.0);
        assert!(!r[7].is_empty(), "line residual reported");
        assert_eq!(&r[11], "ok");
    }
    // byte-identical on repeat
    let again = calabi(&["sweep", "--m", "2,0.5,1", "--beta0", "1,0.5", "--format", "csv"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn line_at_one() {
    let out = calabi(&["line", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let env = ReportEnvelope::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let RunResults::Line(l) = env.results else { panic!() };
    assert!((l.line.coef_beta_inf - 8.0 / 3.0).abs() < 1e-15);
    assert!((l.line.coef_beta0 + 10.0 / 3.0).abs() < 1e-15);
    assert!((l.line.rhs - (13.0 / 16.0 * l.c_star - 27.0 / 8.0)).abs() < 1e-13);
}

#[test]
fn probe_reports_both_beta_inf() {
    let out = calabi(&["probe", "--m", "1", "--beta0", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let env = ReportEnvelope::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let RunResults::Probe(p) = env.results else { panic!() };
    assert!(p.probe.beta_inf_shooting > 1.0);
    assert!(p.probe.beta_inf_line.is_finite());
    assert!(p.tolerance_shift < 1e-6);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(calabi(&["solve-conical", "--m", "1"]).status.code(), Some(3));
    assert_eq!(calabi(&["solve-conical", "--m", "-1", "--beta0", "1"]).status.code(), Some(3));
    assert_eq!(calabi(&["bogus"]).status.code(), Some(3));
    assert_eq!(calabi(&["line", "--m", "1", "--format", "csv"]).status.code(), Some(3));
    assert_eq!(calabi(&["verify", "--input", "/nonexistent/report.json"]).status.code(), Some(3));
    assert_eq!(calabi(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "m = [2.0]\ntol = 1e-9\ngrid_n = 513\n").unwrap();
    let out = calabi(&["--config", path_str(&cfg), "solve-smooth", "--grid-n", "1025"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let env = ReportEnvelope::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(env.inputs.m, vec![2.0]);
    assert_eq!(env.inputs.tol, 1e-9);
    assert_eq!(env.inputs.grid_n, 1025);
    let RunResults::Smooth(s) = env.results else { panic!() };
    assert_eq!(s.profile.gamma.len(), 1025);
    assert!(s.solve.c_star > 2.0);
}

#[test]
fn plot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let out = calabi(&["solve-conical", "--m", "2", "--beta0", "0.5", "--plot-dir", path_str(&plots), "-o", path_str(&dir.path().join("r.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let read = |name: &str| -> Vec<(f64, f64)> {
        std::fs::read_to_string(plots.join(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split('\t').map(|x| x.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect()
    };
    assert_eq!(read("v.tsv")[0], (1.0, 2.0));
    let phi = read("phi.tsv");
    assert!(phi[0].1.abs() < 1e-8 && phi.last().unwrap().1.abs() < 1e-8);
    let lambda = read("lambda.tsv");
    let first = lambda[0].1;
    assert!(lambda.iter().all(|(_, l)| (l - first).abs() < 1e-6 * first.abs()));
    let s = read("s.tsv");
    assert!(s.windows(2).all(|w| w[1].1 > w[0].1));
}
