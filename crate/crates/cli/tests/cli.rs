use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lrpulse(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrpulse")).args(args).current_dir(dir).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn table(path: &Path) -> Vec<(f64, f64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,omega_t_over_pi"));
    lines
        .map(|l| {
            let (p, x) = l.split_once(',').unwrap();
            (p.parse().unwrap(), x.parse().unwrap())
        })
        .collect()
}

fn has_row(rows: &[(f64, f64)], param: f64, value: f64) -> bool {
    rows.iter().any(|&(p, x)| (p - param).abs() < 1e-12 && (x - value).abs() < 0.01)
}

#[test]
fn tables_contain_reference_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = lrpulse(&["tables", "--which", "I", "--out", "t1.csv"], dir.path());
    assert!(out.status.success());
    let rows = table(&dir.path().join("t1.csv"));
    assert_eq!(rows.len(), 6);
    assert!(has_row(&rows, 0.3, 80.28));

    let out = lrpulse(&["tables", "--which", "II", "--out", "t2.csv"], dir.path());
    assert!(out.status.success());
    let rows = table(&dir.path().join("t2.csv"));
    assert_eq!(rows.len(), 4);
    assert!(has_row(&rows, 0.6, 8.09));
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["x.csv", "y.csv"] {
        let out = lrpulse(&["synth", "--strategy", "b", "--b", "0.6", "--out", name], dir.path());
        assert!(out.status.success());
        let out = lrpulse(
            &["simulate", "--strategy", "a", "--a", "0.6", "--out", &format!("sim_{name}"), "--summary", "s.json"],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("x.csv"), read("y.csv"));
    assert_eq!(read("sim_x.csv"), read("sim_y.csv"));
}

#[test]
fn zero_reverse_schedule_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = lrpulse(
        &["synth", "--strategy", "c", "--omega0-over-omega", "0", "--n-periods", "2", "--out", "z.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("z.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert!(rows.len() > 100);
    for row in rows {
        let values: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(values[1..].iter().all(|&v| v == 0.0), "{row}");
    }
    let out = lrpulse(&["verify", "--schedule", "z.csv"], dir.path());
    assert!(out.status.success());
}

#[test]
fn simulate_smooth_transfers() {
    let dir = tempfile::tempdir().unwrap();
    let out = lrpulse(&["simulate", "--strategy", "a", "--a", "0.4", "--out", "p.csv"], dir.path());
    assert!(out.status.success());
    let s = json(&out);
    assert_eq!(s["schema_version"], 1);
    assert!(s["final_p3"].as_f64().unwrap() > 0.999);
    assert!(s["norm_drift"].as_f64().unwrap() < 1e-9);
    assert!(s["analytic"]["deviation"].as_f64().unwrap() < 1e-4);
    let text = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(text.starts_with("t,P1,P2,P3,norm\n"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
}

#[test]
fn singular_schedule_fidelities() {
    let dir = tempfile::tempdir().unwrap();
    let out = lrpulse(&["simulate", "--strategy", "b", "--b", "0.5", "--delta-t", "0.01", "--out", "b.csv"], dir.path());
    assert!(out.status.success());
    assert!((json(&out)["final_p3"].as_f64().unwrap() - 0.8516).abs() < 0.02);
    let out = lrpulse(
        &["simulate", "--strategy", "b", "--b", "0.5", "--delta-t", "0.005", "--neglect-imag", "--out", "b.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!((json(&out)["final_p3"].as_f64().unwrap() - 0.9680).abs() < 0.02);
}

#[test]
fn neglect_imag_writes_both_variants() {
    let dir = tempfile::tempdir().unwrap();
    let out = lrpulse(
        &["synth", "--strategy", "b", "--b", "0.5", "--neglect-imag", "--out", "b.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let full = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let real = fs::read_to_string(dir.path().join("b_neglect_imag.csv")).unwrap();
    assert!(full.lines().next().unwrap().contains("\"neglect_imag\":false"));
    assert!(real.lines().next().unwrap().contains("\"neglect_imag\":true"));
    assert!(real.lines().skip(2).all(|l| l.split(',').nth(2) == Some("0")));
}

#[test]
fn verify_passes_on_configured_schedules() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "--strategy", "a", "--a", "0.5"][..],
        &["verify", "--strategy", "c", "--target", "1/6"][..],
        &["verify", "--strategy", "c", "--omega0-over-omega", "0", "--n-periods", "3"][..],
    ] {
        let out = lrpulse(args, dir.path());
        let report = json(&out);
        assert!(out.status.success(), "{args:?}: {report}");
        assert_eq!(report["passed"], true);
    }
}

#[test]
fn corrupted_schedule_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = lrpulse(&["synth", "--strategy", "a", "--a", "0.5", "--out", "s.csv"], dir.path());
    assert!(out.status.success());
    let out = lrpulse(&["verify", "--schedule", "s.csv"], dir.path());
    assert!(out.status.success(), "{}", json(&out));

    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mid = lines.len() / 2;
    let mut fields: Vec<String> = lines[mid].split(',').map(String::from).collect();
    let re: f64 = fields[1].parse().unwrap();
    fields[1] = (re * 1.1 + 0.1).to_string();
    lines[mid] = fields.join(",");
    fs::write(dir.path().join("bad.csv"), lines.join("\n")).unwrap();

    let out = lrpulse(&["verify", "--schedule", "bad.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let residual = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "invariance_residual").unwrap();
    assert_eq!(residual["passed"], false);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| lrpulse(args, dir.path()).status.code();
    assert_eq!(code(&["synth", "--strategy", "a", "--out", "x.csv"]), Some(1));
    assert_eq!(code(&["synth", "--strategy", "a", "--a", "0.5", "--delta-t", "0.01", "--out", "x.csv"]), Some(1));
    assert_eq!(code(&["nonsense"]), Some(1));
    assert_eq!(code(&["calibrate-c", "--target", "1"]), Some(2));
    assert_eq!(code(&["tables", "--which", "II", "--out", "missing/dir/t.csv"]), Some(3));
    assert_eq!(code(&["verify", "--schedule", "missing.csv"]), Some(3));
    fs::write(dir.path().join("junk.csv"), "not a schedule\n").unwrap();
    assert_eq!(code(&["verify", "--schedule", "junk.csv"]), Some(1));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.json"), r#"{"strategy": "a", "a": 0.3, "omega_t_over_pi": 80.28}"#).unwrap();
    let out = lrpulse(&["synth", "--config", "run.json", "--out", "f.csv"], dir.path());
    assert!(out.status.success());
    assert_eq!(json(&out)["header"]["a"], 0.3);
    let out = lrpulse(&["synth", "--config", "run.json", "--a", "0.4", "--omega-t", "45.72", "--out", "f.csv"], dir.path());
    assert!(out.status.success());
    let s = json(&out);
    assert_eq!(s["header"]["a"], 0.4);
    assert!((s["omega_t_over_pi"].as_f64().unwrap() - 45.72).abs() < 1e-9);

    fs::write(dir.path().join("bad.json"), r#"{"strategy": "a", "amplitude": 0.3}"#).unwrap();
    assert_eq!(lrpulse(&["synth", "--config", "bad.json", "--out", "f.csv"], dir.path()).status.code(), Some(1));
}

#[test]
fn calibrate_c_reports_six_periods() {
    let dir = tempfile::tempdir().unwrap();
    let out = lrpulse(&["calibrate-c", "--target", "1/6"], dir.path());
    assert!(out.status.success());
    let s = json(&out);
    assert!((s["omega0_over_omega"].as_f64().unwrap() - 0.3396).abs() < 5e-4);
    assert_eq!(s["periods_needed"], 6);
}

/// `ε(T)/π` for strategy A by the trapezoid rule on `u = ωt`, which
/// converges spectrally for this periodic integrand.
fn oracle_epsilon(a: f64, wt: f64) -> f64 {
    let n = (wt * 64.0) as usize;
    let h = wt / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let u = k as f64 * h;
        let beta = 0.5 * a * (1.0 - (2.0 * std::f64::consts::PI * u / wt).cos()) * u.cos().powi(2);
        sum += beta.sin().powi(2);
    }
    sum * h / std::f64::consts::PI
}

#[test]
fn table_one_matches_brute_force_oracle() {
    let dir = tempfile::tempdir().unwrap();
    assert!(lrpulse(&["tables", "--which", "I", "--out", "t1.csv"], dir.path()).status.success());
    for (a, got) in table(&dir.path().join("t1.csv")) {
        let pi = std::f64::consts::PI;
        let (mut lo, mut hi) = (pi, pi);
        while oracle_epsilon(a, hi) < 1.0 {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > 1e-7 * pi {
            let mid = 0.5 * (lo + hi);
            if oracle_epsilon(a, mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let want = 0.5 * (lo + hi) / pi;
        assert!((got - want).abs() < 1e-4, "A={a}: {got} vs {want}");
    }
}
