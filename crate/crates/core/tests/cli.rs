use std::path::PathBuf;

use matroid_bandit::cli::main_with_args;

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mbandit-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("mbandit").chain(args.iter().copied()))
}

#[test]
fn run_writes_csv_and_summary_reproducibly() {
    let dir = tmp("run");
    let out = dir.join("nested/run.csv");
    let out_s = out.to_str().unwrap();
    let args = ["run", "--matroid", "uniform 6 2", "--algo", "cucb", "--T", "2000", "--seed", "3", "--out", out_s];
    assert_eq!(run(&args), 0);
    let first = std::fs::read_to_string(&out).unwrap();
    assert!(first.starts_with("round,cum_regret,round_nanos\n1,"));
    assert_eq!(first.lines().count(), 2001);
    let summary = std::fs::read_to_string(dir.join("nested/run.csv.summary")).unwrap();
    for key in ["final_regret=", "regret_over_logT=", "theorem_bound=", "T0=", "delta_min=", "N_0=", "N_5="] {
        assert!(summary.contains(key), "{key} missing");
    }
    // refuses to overwrite without --force
    assert_ne!(run(&args), 0);
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(run(&forced), 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tmp("cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, "matroid = partition 4 \"0,0,1,1\"\nalgo=fastercucb\nT=500 # horizon\nseed=1\n").unwrap();
    let out = dir.join("o.csv");
    assert_eq!(run(&["run", "--config", cfg.to_str().unwrap(), "--T", "800", "--out", out.to_str().unwrap()]), 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 801);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sweep_seeds_single_seed_matches_run() {
    let dir = tmp("sweep");
    let run_out = dir.join("r.csv");
    let sweep_out = dir.join("s.csv");
    let common = ["--matroid", "uniform 5 2", "--algo", "cucb", "--T", "1500", "--seed", "9"];
    let mut a = vec!["run"];
    a.extend(common);
    a.extend(["--out", run_out.to_str().unwrap()]);
    assert_eq!(run(&a), 0);
    let mut b = vec!["sweep-seeds"];
    b.extend(common);
    b.extend(["--seeds", "1", "--out", sweep_out.to_str().unwrap()]);
    assert_eq!(run(&b), 0);
    let final_run = std::fs::read_to_string(dir.join("r.csv.summary")).unwrap();
    let final_run = final_run.lines().next().unwrap().trim_start_matches("final_regret=").to_string();
    let sweep = std::fs::read_to_string(&sweep_out).unwrap();
    assert_eq!(sweep.lines().nth(1).unwrap().split(',').nth(1).unwrap(), final_run);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn zero_gap_sweep_has_zero_spread() {
    let dir = tmp("zero");
    let out = dir.join("z.csv");
    let args = ["sweep-seeds", "--matroid", "uniform 4 2", "--algo", "cucb", "--T", "300", "--means", "const:0.5", "--seeds", "4", "--out", out.to_str().unwrap()];
    assert_eq!(run(&args), 0);
    let summary = std::fs::read_to_string(dir.join("z.csv.summary")).unwrap();
    assert!(summary.contains("mean=0\n") && summary.contains("stddev=0\n"), "{summary}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn scaling_echoes_k_in_order() {
    let dir = tmp("scaling");
    let out = dir.join("t.csv");
    assert_eq!(run(&["scaling", "--ks", "64,128", "--d", "4", "--T", "400", "--out", out.to_str().unwrap()]), 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    let ks: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert!(csv.starts_with("K,algo,mean_ns,p50_ns,p99_ns\n"));
    assert_eq!(ks, ["64", "64", "128", "128"]);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_filter_and_fault() {
    assert_eq!(run(&["verify", "--suite", "rounding"]), 0);
    assert_eq!(run(&["verify", "--suite", "greedy", "--inject-fault", "tie-break"]), 1);
    assert_ne!(run(&["verify", "--suite", "nope"]), 0);
}

#[test]
fn bad_configs_exit_nonzero() {
    assert_ne!(run(&["run", "--T", "5", "--matroid", "uniform 8 3"]), 0);
    assert_ne!(run(&["run", "--T", "100", "--matroid", "uniform 8 3", "--epsilon", "1.5"]), 0);
    assert_ne!(run(&["run", "--frobnicate"]), 0);
}
