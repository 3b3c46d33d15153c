use std::process::Command;

use parapam::solver::{Checkpoint, Solver};
use parapam_cli::{resume, run_plan, ExperimentPlan, Manifest, RunOptions};

const PLAN: &str = r#"
kind = "norm_tracking"
checkpoint_every = 10

[base]
n = 16
t_final = 0.05
dt = 2e-3
monitor_every = 5

[sweep]
seeds = [3, 4]
"#;

fn opts(dir: &std::path::Path, workers: usize) -> RunOptions {
    RunOptions { out: dir.to_path_buf(), workers, seed_offset: 0 }
}

#[test]
fn worker_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = ExperimentPlan::from_toml(PLAN).unwrap();
    let a = run_plan(&plan, &opts(&tmp.path().join("a"), 1)).unwrap();
    let b = run_plan(&plan, &opts(&tmp.path().join("b"), 3)).unwrap();
    assert!(a.ok());
    assert_eq!(a.manifest, b.manifest);
    let csv = std::fs::read_to_string(tmp.path().join("a/report.csv")).unwrap();
    assert!(csv.starts_with("time,metric,value,seed,eps,dt,n\n"));
    assert!(csv.lines().any(|l| l.contains(",u_linf,") && l.contains(",4,")));
}

#[test]
fn manifest_replays_plan() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = ExperimentPlan::from_toml(PLAN).unwrap();
    let first = run_plan(&plan, &opts(&tmp.path().join("a"), 1)).unwrap();
    let m = Manifest::load(&tmp.path().join("a/manifest.json")).unwrap();
    assert_eq!(m, first.manifest);
    let again = run_plan(&m.plan, &opts(&tmp.path().join("b"), 1)).unwrap();
    assert_eq!(again.manifest.content_hash, m.content_hash);
    assert_eq!(std::fs::read(tmp.path().join("a/manifest.json")).unwrap(), std::fs::read(tmp.path().join("b/manifest.json")).unwrap());
}

#[test]
fn empty_axis_is_rejected_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = ExperimentPlan::from_toml("kind = \"convergence\"\n[sweep]\neps = []\n");
    let err = match plan {
        Err(e) => e,
        Ok(p) => run_plan(&p, &opts(tmp.path(), 1)).unwrap_err(),
    };
    assert!(format!("{err:#}").contains("empty"), "{err:#}");
    assert!(!tmp.path().join("report.csv").exists());
}

#[test]
fn invalid_point_is_rejected_at_load() {
    let err = ExperimentPlan::from_toml(&PLAN.replace("seeds = [3, 4]", "n = [16, 10]")).unwrap_err();
    assert!(format!("{err:#}").contains("grid size 10"), "{err:#}");
}

#[test]
fn failing_point_is_listed_and_others_survive() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = ExperimentPlan::from_toml(&PLAN.replace("seeds = [3, 4]", "eps = [0.1, -0.5]")).unwrap();
    let s = run_plan(&plan, &opts(tmp.path(), 1)).unwrap();
    assert!(!s.ok());
    assert_eq!(s.manifest.failures.len(), 1);
    assert!(s.manifest.failures[0].point.contains("eps=-0.5"));
    let csv = std::fs::read_to_string(tmp.path().join("report.csv")).unwrap();
    assert!(csv.lines().count() > 1);
    assert!(csv.lines().skip(1).all(|l| l.contains(",0.1,")));
}

#[test]
fn blow_up_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let mut plan = ExperimentPlan::from_toml(PLAN).unwrap();
    plan.base.initial = parapam::solver::InitialData::Constant { value: f64::NAN };
    let s = run_plan(&plan, &opts(tmp.path(), 1)).unwrap();
    assert_eq!(s.manifest.failures.len(), 2);
    assert!(s.manifest.failures[0].error.contains("blow-up"), "{}", s.manifest.failures[0].error);
    assert!(tmp.path().join("manifest.json").exists());
}

#[test]
fn resume_matches_straight_run() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = ExperimentPlan::from_toml(PLAN).unwrap();
    run_plan(&plan, &opts(tmp.path(), 1)).unwrap();
    // the plan keeps the latest checkpoint of each point: the final state
    let done = Checkpoint::load(tmp.path().join("checkpoints/point_0000.json")).unwrap();
    let mut s = Solver::from_config(done.config.clone()).unwrap();
    assert_eq!(done.state.step, s.n_steps());
    let mut st = s.initial_state().unwrap();
    s.run_until(&mut st, 10, None).unwrap();
    let mid = tmp.path().join("mid.json");
    Checkpoint::new(&done.config, &st).save(&mid).unwrap();
    let out = tmp.path().join("resumed");
    resume(&mid, &out).unwrap();
    let fin = Checkpoint::load(out.join("final_checkpoint.json")).unwrap();
    assert_eq!(fin.state.step, s.n_steps());
    assert_eq!(fin.state.solution(), done.state.solution());

    let straight: Vec<String> = std::fs::read_to_string(tmp.path().join("report.csv"))
        .unwrap()
        .lines()
        .filter(|l| l.ends_with(",3,0.1,0.002,16") && l.starts_with("0.05,"))
        .map(String::from)
        .collect();
    let resumed = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(!straight.is_empty());
    for line in straight {
        assert!(resumed.contains(&line), "{line} missing from resumed report");
    }
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let plan_path = tmp.path().join("plan.toml");
    std::fs::write(&plan_path, PLAN).unwrap();
    let bin = env!("CARGO_BIN_EXE_parapam");
    let ok = Command::new(bin).args(["--plan", plan_path.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]).status().unwrap();
    assert_eq!(ok.code(), Some(0));
    std::fs::write(&plan_path, "kind = \"bogus\"\n").unwrap();
    let bad = Command::new(bin).args(["--plan", plan_path.to_str().unwrap(), "--out", tmp.path().join("p").to_str().unwrap()]).status().unwrap();
    assert_eq!(bad.code(), Some(2));
}

#[test]
fn shipped_plans_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("plans");
    let mut count = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let plan = ExperimentPlan::load(&p).unwrap_or_else(|e| panic!("{}: {e:#}", p.display()));
        assert!(plan.output.is_some());
        count += 1;
    }
    assert_eq!(count, 5);
}
