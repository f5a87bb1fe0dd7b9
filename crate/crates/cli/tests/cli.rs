use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn betti(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betti"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn unknown_subcommand_and_flag_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(betti(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(betti(&["verify", "--bogus"], dir.path()).status.code(), Some(2));
}

#[test]
fn simulate_writes_csv_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "-d", "2", "--lambda", "400", "-R", "6", "--seed", "7", "--eta-points", "12"];
    let run = |name: &str| {
        let mut a = args.to_vec();
        a.extend(["-o", name]);
        let out = betti(&a, dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(dir.path().join(name)).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "eta,alpha,beta0_mean,beta0_sem,beta1_mean,beta1_sem,chi_mean,chi_theory"
    );
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "d = 3\nlambda = 300\nrealizations = 2\nseed = 1\neta_points = 5\nout = from_cfg.csv\n",
    )
    .unwrap();
    let out = betti(&["simulate", "--config", "run.cfg", "--eta-points", "7"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("from_cfg.csv")).unwrap();
    assert!(text.starts_with("eta,alpha,beta0_mean,beta0_sem,beta1_mean,beta1_sem,beta2_mean,beta2_sem,"));
    assert_eq!(text.lines().count(), 8);

    fs::write(dir.path().join("bad.cfg"), "lambda = 300\nwhat = 1\n").unwrap();
    let out = betti(&["simulate", "--config", "bad.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = betti(&["verify", "--instances", "8", "--max-n", "14", "--seed", "3"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn analytic_then_log_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = betti(&["analytic", "-d", "3", "--eta-max", "10", "-o", "ref.csv"], dir.path());
    assert!(out.status.success());
    let out = betti(&["plot", "ref.csv", "--log"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(dir.path().join("ref.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("1e-3") && svg.contains("1e1"));
    assert!(svg.matches("<polyline").count() >= 3);
}

#[test]
fn signature_of_a_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pts.txt"), "0.0 0.0\n1.0 0.0\n1.0 1.0\n0.0 1.0\n").unwrap();
    let out = betti(&["signature", "pts.txt", "--dump", "f.txt", "-o", "sig.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sig = fs::read_to_string(dir.path().join("sig.csv")).unwrap();
    let lines: Vec<&str> = sig.lines().collect();
    assert_eq!(lines[0], "alpha,eta,beta0,beta1,beta2");
    // four points, then one square with a hole, filled at the circumradius
    assert!(lines[1].ends_with(",4,0,0"));
    assert!(lines[2].starts_with("0.500000000,") && lines[2].ends_with(",1,1,0"));
    assert!(lines[3].starts_with("0.707106781,") && lines[3].ends_with(",1,0,0"));
    assert!(lines[4].starts_with("inf,") && lines[4].ends_with(",1,0,1"));
    assert!(fs::read_to_string(dir.path().join("f.txt")).unwrap().lines().count() > 10);

    fs::write(dir.path().join("bad.txt"), "0.1 0.2\n0.3\n").unwrap();
    let out = betti(&["signature", "bad.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = betti(&["signature", "pts.txt", "--torus"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pdc_report_without_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let out = betti(&["pdc", "--no-sample"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0.03200"));
    assert!(text.contains("closed 0.57472"));
}

#[test]
fn pdc_histogram_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = betti(&["pdc", "--n-points", "20000", "--seed", "2", "-o", "h.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert_eq!(h.lines().next().unwrap(), "theta_lo,theta_hi,density");
    assert!(String::from_utf8_lossy(&out.stdout).contains("I = "));
}
