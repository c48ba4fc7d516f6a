use std::path::Path;
use std::process::{Command, Output};

fn isac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isac")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn op_user_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scheme = sjb\nb1 = 1\ngamma = 5, 20, 40\n");
    let out = dir.path().join("user.csv");
    let o = isac(&["op-user", "--config", &cfg, "--out", out.to_str().unwrap(), "--emit-plots"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let table = rows(&text);
    assert_eq!(table.len(), 4);
    let probs: Vec<f64> = table[1..].iter().map(|r| r.last().unwrap().parse().unwrap()).collect();
    assert!(probs.windows(2).all(|w| w[0] <= w[1]));
    assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
    let gp = std::fs::read_to_string(out.with_extension("gp")).unwrap();
    assert!(gp.contains("user.csv"));
}

#[test]
fn stdout_when_no_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scheme = lb\nc1_sq = 2\ndpc = true\ngamma = 10\n");
    let o = isac(&["op-user", "--config", &cfg]);
    assert!(o.status.success());
    let table = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(table.len(), 2);
}

#[test]
fn empty_epsilon_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "epsilon =\n");
    let o = isac(&["op-target", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
}

#[test]
fn bad_config_line_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_tx = 15\nthis line is wrong\n");
    let o = isac(&["op-user", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains('2'));
}

#[test]
fn emit_plots_needs_out() {
    assert_eq!(isac(&["op-user", "--emit-plots"]).status.code(), Some(1));
}

#[test]
fn mc_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scheme = sjb\nb1 = 2\nmetric = user_op\ngamma = 20\n");
    let a = isac(&["mc", "--config", &cfg, "--samples", "5000", "--seed", "9"]);
    let b = isac(&["mc", "--config", &cfg, "--samples", "5000", "--seed", "9"]);
    let c = isac(&["mc", "--config", &cfg, "--samples", "5000", "--seed", "10"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn region_marks_pareto_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scheme = sjb\ngamma = 20\nepsilon = 1e-6\ngrid = 0.01, 0.1, 1, 10, 100\nts_steps = 5\n");
    let o = isac(&["region", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(table[0], ["scheme", "control", "p_target", "p_user", "dpc", "pareto"]);
    assert_eq!(table.iter().filter(|r| r[0] == "sjb").count(), 5);
    assert_eq!(table.iter().filter(|r| r[0] == "time_sharing").count(), 5);
    assert!(table.iter().any(|r| r[0] == "sjb" && r[5] == "1"));
}

#[test]
fn validate_exit_codes() {
    assert_eq!(isac(&["validate", "--criteria", "13"]).status.code(), Some(1));
    let o = isac(&["validate", "--criteria", "6", "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    let table = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(table[0], ["criterion", "check", "param", "value", "reference", "measure", "tolerance", "pass"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS C6"));
}
