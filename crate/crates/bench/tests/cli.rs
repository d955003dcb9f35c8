use std::process::Command;

fn gdaam() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gdaam"))
}

#[test]
fn explicit_run_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = gdaam()
        .args(["run", "--problem", "bilinear", "--n", "6", "--kappa", "3", "--method", "alt-gda-am,eg"])
        .args(["--p", "4", "--eta", "0.5", "--max-iters", "400", "--seed", "1,2", "--jobs", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("method,seed,status,iters,final_dist,wall_ms"));
    let run_dir = dir.path().join("run");
    for f in ["summary.csv", "alt-gda-am_seed1.csv", "eg_seed2.csv"] {
        assert!(run_dir.join(f).exists(), "{f}");
    }
    let traj = std::fs::read_to_string(run_dir.join("alt-gda-am_seed1.csv")).unwrap();
    assert!(traj.starts_with("iter,time_ns,dist_to_opt,grad_norm,residual_norm\n"));
}

#[test]
fn config_file_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.ini");
    std::fs::write(&cfg, "[defaults]\nmax_iters = 50\n\n[run]\nn = 5\nmethods = sim-gda\n").unwrap();
    let out = gdaam()
        .args(["sweep", "--param", "eta", "--values", "0.1,0.2", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("run_eta0.1/summary.csv").exists());
    assert!(dir.path().join("run_eta0.2/sim-gda_seed0.csv").exists());
}

#[test]
fn invalid_input_exits_with_one() {
    for args in [
        vec!["run", "--preset", "fig99"],
        vec!["run", "--problem", "bilinear", "--method", "adam"],
        vec!["run", "--problem", "scalar", "--method", "eg"],
        vec!["verify", "--suite", "nothing"],
        vec!["frobnicate"],
    ] {
        let status = gdaam().args(&args).status().unwrap();
        assert_eq!(status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn verify_suites_report_exit_codes() {
    let ok = gdaam().args(["verify", "--suite", "scalar_games"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8(ok.stdout).unwrap().contains("scalar_games: 7/7"));
}
