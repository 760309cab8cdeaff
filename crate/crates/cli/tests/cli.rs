use std::fs;
use std::process::{Command, Output};

fn qnd_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnd-lab"))
        .args(args)
        .env("QND_LAB_THREADS", "2")
        .output()
        .expect("spawn qnd-lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn failing_ids(report: &str) -> Vec<u32> {
    report
        .lines()
        .filter_map(|l| {
            let mut w = l.split_whitespace();
            (w.next() == Some("criterion")).then_some(())?;
            let id = w.next()?.parse().ok()?;
            (w.next() == Some("FAIL")).then_some(id)
        })
        .collect()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn kernels_csv_shape() {
    let o = qnd_lab(&["kernels", "--r", "0.4", "--t-max", "2", "--points", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("t,eta,eta_dot,gamma,gamma_dot"));
    let data = rows(&text);
    assert_eq!(data.len(), 11);
    assert!(data.iter().all(|r| r.len() == 5));
    assert_eq!(data[10][0], 2.0);
    // every value is written in {:.16e}
    let cell = text.lines().nth(3).unwrap().split(',').next().unwrap();
    assert_eq!(cell.split('e').next().unwrap().split('.').nth(1).unwrap().len(), 16);
}

#[test]
fn entropy_and_bloch_headers() {
    let o = qnd_lab(&["entropy", "--t-max", "10", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("t,S,C"));
    for r in rows(&stdout(&o)) {
        assert!((r[1] + r[2] - 1.0).abs() < 1e-12);
    }

    let o = qnd_lab(&["bloch", "--channel", "lindblad", "--gamma0", "0.6", "--T", "5", "--points", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("t,sx,sy,sz"));
}

#[test]
fn qfunc_grid_output() {
    let o = qnd_lab(&["qfunc", "--t-max", "1", "--points", "2", "--n-xi", "4", "--n-theta", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("t,xi,theta,q"));
    let data = rows(&text);
    assert_eq!(data.len(), 2 * 4 * 8);
    assert!(data.iter().all(|r| r[3] >= 0.0));
}

#[test]
fn out_file_and_config_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    fs::write(&cfg, "[bath]\ngamma0 = 0.3\nomega-c = 40\n[time]\nt_max = 1\npoints = 3\n").unwrap();
    let out = dir.path().join("k.csv");

    let o = qnd_lab(&["kernels", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let base = rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(base.len(), 3);
    let expected = -0.3 / std::f64::consts::PI * 40.0;
    assert!((base[0][2] - expected).abs() < 1e-12);

    let o = qnd_lab(&[
        "kernels",
        "--config",
        cfg.to_str().unwrap(),
        "--gamma0",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let over = rows(&fs::read_to_string(&out).unwrap());
    assert!((over[0][2] - expected / 3.0).abs() < 1e-12);
}

#[test]
fn config_errors_are_validation_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.ini");
    fs::write(&cfg, "gamma0 = 0.1\nbogus = 3\n").unwrap();
    let o = qnd_lab(&["kernels", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"));

    let missing = dir.path().join("missing.ini");
    let o = qnd_lab(&["kernels", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validation_exit_code() {
    for args in [
        &["kernels", "--gamma0", "-1"][..],
        &["kernels", "--temp-mode", "lukewarm"],
        &["kernels", "--temp-mode", "high"],
        &["kernels", "--a", "0.5", "--t-min", "0.5"],
        &["kernels", "--points", "0"],
        &["figure", "fig9"],
        &["frobnicate"],
        &["verify", "--level", "medium"],
    ] {
        let o = qnd_lab(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn zero_threads_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_qnd-lab"))
        .args(["kernels", "--points", "3"])
        .env("QND_LAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn truncation_is_numerical_failure() {
    let o = qnd_lab(&["entropy", "--alpha-sq", "50", "--n-max", "10", "--points", "3"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("n_max"));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["entropy", "--r", "0.4", "--t-max", "50", "--points", "64"];
    let one = Command::new(env!("CARGO_BIN_EXE_qnd-lab"))
        .args(args)
        .env("QND_LAB_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_qnd-lab"))
        .args(args)
        .env("QND_LAB_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn figure_writes_one_file_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    let o = qnd_lab(&["figure", "fig3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3, "{names:?}");
    for n in &names {
        let text = fs::read_to_string(dir.path().join(n)).unwrap();
        assert_eq!(text.lines().next(), Some("t,S,C"));
        assert_eq!(text.lines().count(), 1002);
    }

    let o = qnd_lab(&["figure", "fig5c", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cloud = fs::read_to_string(dir.path().join("fig5c.csv")).unwrap();
    assert_eq!(cloud.lines().next(), Some("t,sx,sy,sz,sx0,sy0,sz0"));
}

#[test]
fn verify_reports_known_failures() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("verify.csv");
    let o = qnd_lab(&["verify", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(failing_ids(&text), [3, 8], "{text}");
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 8);
    let csv = fs::read_to_string(&report).unwrap();
    assert_eq!(csv.lines().next(), Some("criterion,name,check,measured,tolerance,pass"));
}

#[test]
fn injected_fault_is_caught() {
    let o = qnd_lab(&["verify", "--inject-fault", "flip-gamma-dot-sign"]);
    assert_eq!(o.status.code(), Some(3));
    let failing = failing_ids(&stdout(&o));
    assert!(failing.contains(&1) && failing.contains(&5), "{failing:?}");
    let o = qnd_lab(&["verify", "--inject-fault", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}
