use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use parapam::calibration::{self, ConstantsFile, RunConstant};
use parapam::solver::{envelope_ratio, uniqueness_diagnostic, Checkpoint, InitialData, Solver, SolverConfig, SolverState, Trajectory};
use parapam::spectral::SpectralField;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::plan::{ExperimentKind, ExperimentPlan, SweepPoint};
use crate::report::{write_csv, Row};
use crate::svg::line_plot;

pub const REPORT_FILE: &str = "report.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONSTANTS_FILE: &str = "constants.json";
pub const MANIFEST_FORMAT: &str = "parapam-manifest v1";

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub workers: usize,
    pub seed_offset: u64,
}

/// A sweep point that failed, with its error chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub point: String,
    pub error: String,
}

/// Everything needed to reproduce a plan's outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub plan: ExperimentPlan,
    pub seed_offset: u64,
    pub points: Vec<String>,
    pub frozen_constants: ConstantsFile,
    /// sha256 of every output file other than the manifest
    pub files: BTreeMap<String, String>,
    pub failures: Vec<Failure>,
    /// sha256 over the sorted `name  hash` lines of `files`
    pub content_hash: String,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let m: Manifest = serde_json::from_str(&std::fs::read_to_string(path)?).context("parsing manifest")?;
        if m.format != MANIFEST_FORMAT {
            return Err(anyhow!("unknown manifest format {:?}", m.format));
        }
        Ok(m)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

/// Final fields and rows produced by one sweep point.
struct PointOutput {
    rows: Vec<Row>,
    finals: Vec<SpectralField>,
}

fn checkpoint_path(out: &Path, index: usize) -> PathBuf {
    out.join("checkpoints").join(format!("point_{index:04}.json"))
}

/// Run a configuration to t_final, checkpointing every `every` steps.
fn run_config(cfg: &SolverConfig, ckpt: Option<(&Path, u64)>, snapshot_every: Option<u64>) -> Result<(SolverState, Vec<(f64, SpectralField)>, f64)> {
    let mut s = Solver::from_config(cfg.clone())?;
    let mut st = s.initial_state()?;
    let snaps = continue_run(&mut s, &mut st, cfg, ckpt, snapshot_every)?;
    Ok((st, snaps, s.dt()))
}

fn continue_run(
    s: &mut Solver,
    st: &mut SolverState,
    cfg: &SolverConfig,
    ckpt: Option<(&Path, u64)>,
    snapshot_every: Option<u64>,
) -> Result<Vec<(f64, SpectralField)>> {
    match ckpt {
        None => Ok(s.run(st, snapshot_every)?),
        Some((path, every)) => {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            let mut snaps = Vec::new();
            while st.step < s.n_steps() {
                let next = (st.step / every + 1) * every;
                let mut chunk = s.run_until(st, next, snapshot_every)?;
                // run_until repeats the starting snapshot of every chunk after the first
                if !snaps.is_empty() && !chunk.is_empty() {
                    chunk.remove(0);
                }
                snaps.extend(chunk);
                Checkpoint::new(cfg, st).save(path)?;
            }
            Ok(snaps)
        }
    }
}

fn report_rows(p: &SweepPoint, st: &SolverState) -> Vec<Row> {
    let r = &st.report;
    let mut rows = Vec::with_capacity(r.times.len() * r.series.len());
    for (i, &t) in r.times.iter().enumerate() {
        for s in &r.series {
            rows.push(Row::new(p, t, s.name.clone(), s.values[i]));
        }
    }
    rows
}

fn run_point(plan: &ExperimentPlan, p: &SweepPoint, out: &Path, growth: f64) -> Result<PointOutput> {
    let ckpt_path = checkpoint_path(out, p.index);
    let ckpt = plan.checkpoint_every.map(|e| (ckpt_path.as_path(), e));
    let cfg = &p.config;
    let t = cfg.t_final;
    match plan.kind {
        ExperimentKind::NormTracking => {
            let (st, _, _) = run_config(cfg, ckpt, None)?;
            Ok(PointOutput { rows: report_rows(p, &st), finals: vec![st.solution()] })
        }
        ExperimentKind::Convergence => {
            let (st, _, _) = run_config(cfg, ckpt, None)?;
            let u = st.solution();
            Ok(PointOutput { rows: vec![Row::new(p, t, "u_linf", u.linf_norm())], finals: vec![u] })
        }
        ExperimentKind::RenormNecessity => {
            let mut on = cfg.clone();
            on.noise.options.renormalize = true;
            let mut off = cfg.clone();
            off.noise.options.renormalize = false;
            let (a, _, _) = run_config(&on, ckpt, None)?;
            let (b, _, _) = run_config(&off, None, None)?;
            let (ua, ub) = (a.solution(), b.solution());
            Ok(PointOutput {
                rows: vec![Row::new(p, t, "u_linf_renorm", ua.linf_norm()), Row::new(p, t, "u_linf_raw", ub.linf_norm())],
                finals: vec![ua, ub],
            })
        }
        ExperimentKind::Uniqueness => {
            let pert = SolverConfig {
                initial: InitialData::Perturbed {
                    base: Box::new(cfg.initial.clone()),
                    seed: p.seed + 1_000_000,
                    delta0: 0.01,
                    amplitude: plan.perturbation,
                },
                ..cfg.clone()
            };
            let (_, sa, dt) = run_config(cfg, ckpt, Some(plan.snapshot_every))?;
            let (_, sb, _) = run_config(&pert, None, Some(plan.snapshot_every))?;
            let part = parapam::besov::DyadicPartition::build(cfg.grid()?, parapam::besov::CutoffProfile { steepness: cfg.cutoff_steepness })?;
            let r = uniqueness_diagnostic(&part, &Trajectory::new(cfg, dt, sa), &Trajectory::new(&pert, dt, sb), cfg.alpha, growth)?;
            let mut rows = Vec::new();
            for (i, &time) in r.times.iter().enumerate() {
                for s in &r.series {
                    rows.push(Row::new(p, time, s.name.clone(), s.values[i]));
                }
            }
            rows.push(Row::new(p, t, "envelope_ratio", envelope_ratio(&r)));
            Ok(PointOutput { rows, finals: vec![] })
        }
        ExperimentKind::Calibrate => unreachable!("calibrate has no sweep points"),
    }
}

/// Consecutive-ε differences within each (seed, dt, N) group, in plan order.
fn cauchy_rows(points: &[SweepPoint], outputs: &[Option<PointOutput>], slot: usize, metric: &str) -> Vec<Row> {
    let mut groups: BTreeMap<(u64, String, usize), Vec<usize>> = BTreeMap::new();
    for p in points {
        groups.entry((p.seed, format!("{:?}", p.dt), p.n)).or_default().push(p.index);
    }
    let mut rows = Vec::new();
    for idx in groups.values() {
        for w in idx.windows(2) {
            let (a, b) = (&points[w[0]], &points[w[1]]);
            if let (Some(oa), Some(ob)) = (&outputs[w[0]], &outputs[w[1]]) {
                let d = (&oa.finals[slot] - &ob.finals[slot]).linf_norm();
                rows.push(Row::new(a, a.config.t_final, metric, d));
                if metric == "cauchy_linf_raw" {
                    let g = ob.finals[slot].linf_norm() / oa.finals[slot].linf_norm();
                    rows.push(Row::new(b, b.config.t_final, "growth_raw", g));
                }
            }
        }
    }
    rows
}

fn plots(kind: ExperimentKind, points: &[SweepPoint], rows: &[Row]) -> Vec<(String, String)> {
    let mut by_metric: BTreeMap<&str, BTreeMap<usize, Vec<(f64, f64)>>> = BTreeMap::new();
    let key = |r: &Row| points.iter().position(|p| p.seed == r.seed && p.eps == r.eps && p.dt == r.dt && p.n == r.n).unwrap_or(0);
    for r in rows {
        let x = match kind {
            ExperimentKind::Convergence | ExperimentKind::RenormNecessity => r.eps,
            _ => r.time,
        };
        let line = match kind {
            ExperimentKind::Convergence | ExperimentKind::RenormNecessity => 0,
            _ => key(r),
        };
        by_metric.entry(r.metric.as_str()).or_default().entry(line).or_default().push((x, r.value));
    }
    by_metric
        .into_iter()
        .map(|(metric, lines)| {
            let series: Vec<(String, Vec<(f64, f64)>)> = lines
                .into_iter()
                .map(|(i, mut v)| {
                    v.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let label = if matches!(kind, ExperimentKind::Convergence | ExperimentKind::RenormNecessity) { metric.to_string() } else { points[i].label() };
                    (label, v)
                })
                .collect();
            (format!("plot_{metric}.svg"), line_plot(metric, &series))
        })
        .collect()
}

/// Result of a plan run.
#[derive(Debug)]
pub struct RunSummary {
    pub manifest: Manifest,
    pub out: PathBuf,
}

impl RunSummary {
    pub fn ok(&self) -> bool {
        self.manifest.failures.is_empty()
    }
}

/// Execute a plan, write the report, plots and manifest. Failing sweep points
/// are listed in the manifest; the other points' rows are still written.
pub fn run_plan(plan: &ExperimentPlan, opts: &RunOptions) -> Result<RunSummary> {
    plan.validate()?;
    std::fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    let frozen = ConstantsFile::frozen();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.workers.max(1)).build()?;
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut failures = Vec::new();
    let points = if plan.kind == ExperimentKind::Calibrate { vec![] } else { plan.points(opts.seed_offset)? };

    let rows = if plan.kind == ExperimentKind::Calibrate {
        let fitted = pool.install(|| calibration::calibrate_all(plan.include_runs))?;
        files.push((CONSTANTS_FILE.into(), fitted.to_json()?.into_bytes()));
        let p = SweepPoint { index: 0, seed: calibration::CALIBRATION_BASE, eps: plan.base.noise.options.eps, dt: plan.base.dt, n: plan.base.n, config: plan.base.clone() };
        fitted.constants.iter().map(|(name, c)| Row::new(&p, 0.0, name.clone(), c.value)).collect()
    } else {
        let growth = match plan.growth {
            Some(g) => g,
            None => {
                let c = frozen.get(RunConstant::UniquenessGrowth.name()).map(|c| c.value).unwrap_or(0.0);
                if c > 0.0 {
                    frozen.margin * c
                } else {
                    c / frozen.margin
                }
            }
        };
        let results: Vec<Result<PointOutput>> = pool.install(|| points.par_iter().map(|p| run_point(plan, p, &opts.out, growth)).collect());
        let mut outputs = Vec::with_capacity(results.len());
        let mut rows = Vec::new();
        for (p, r) in points.iter().zip(results) {
            match r {
                Ok(o) => {
                    rows.extend(o.rows.iter().cloned());
                    outputs.push(Some(o));
                }
                Err(e) => {
                    failures.push(Failure { point: p.label(), error: format!("{e:#}") });
                    outputs.push(None);
                }
            }
        }
        match plan.kind {
            ExperimentKind::Convergence => rows.extend(cauchy_rows(&points, &outputs, 0, "cauchy_linf")),
            ExperimentKind::RenormNecessity => {
                rows.extend(cauchy_rows(&points, &outputs, 0, "cauchy_linf_renorm"));
                rows.extend(cauchy_rows(&points, &outputs, 1, "cauchy_linf_raw"));
            }
            _ => {}
        }
        rows
    };

    let report = opts.out.join(REPORT_FILE);
    write_csv(&report, &rows)?;
    files.push((REPORT_FILE.into(), std::fs::read(&report)?));
    if plan.plots && plan.kind != ExperimentKind::Calibrate {
        for (name, svg) in plots(plan.kind, &points, &rows) {
            files.push((name, svg.into_bytes()));
        }
    }
    let mut hashes = BTreeMap::new();
    for (name, bytes) in &files {
        if name != REPORT_FILE {
            std::fs::write(opts.out.join(name), bytes)?;
        }
        hashes.insert(name.clone(), sha256_hex(bytes));
    }
    let listing: String = hashes.iter().map(|(n, h)| format!("{n}  {h}\n")).collect();
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        plan: plan.clone(),
        seed_offset: opts.seed_offset,
        points: points.iter().map(|p| p.label()).collect(),
        frozen_constants: frozen,
        files: hashes,
        failures,
        content_hash: sha256_hex(listing.as_bytes()),
    };
    std::fs::write(opts.out.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(RunSummary { manifest, out: opts.out.clone() })
}

/// Continue a checkpointed run to its t_final and write its monitor report.
pub fn resume(checkpoint: &Path, out: &Path) -> Result<PathBuf> {
    let ck = Checkpoint::load(checkpoint).with_context(|| format!("loading {}", checkpoint.display()))?;
    let cfg = ck.config.clone();
    let mut s = Solver::from_config(cfg.clone())?;
    let mut st = ck.state;
    s.run(&mut st, None)?;
    std::fs::create_dir_all(out)?;
    let p = SweepPoint { index: 0, seed: cfg.noise.seed, eps: cfg.noise.options.eps, dt: cfg.dt, n: cfg.n, config: cfg.clone() };
    let path = out.join(REPORT_FILE);
    write_csv(&path, &report_rows(&p, &st))?;
    Checkpoint::new(&cfg, &st).save(out.join("final_checkpoint.json"))?;
    Ok(path)
}
