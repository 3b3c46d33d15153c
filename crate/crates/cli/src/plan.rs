use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use parapam::solver::SolverConfig;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Cauchy differences ‖u_ε − u_{ε/2}‖_{L^∞} at t_final along the ε axis
    Convergence,
    /// all monitor series of each run
    NormTracking,
    /// final ‖u_ε‖_{L^∞} with and without C_ε, plus Cauchy differences
    RenormNecessity,
    /// ‖ζ‖_{H^{α−1}} between a run and a perturbed copy, with envelope
    Uniqueness,
    /// fit every ensemble constant
    Calibrate,
}

/// Sweep axes. An omitted axis keeps the base value; a present axis must
/// not be empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub eps: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
    pub dt: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
}

/// One experiment as read from a plan file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub kind: ExperimentKind,
    /// used when --out is not given
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub base: SolverConfig,
    #[serde(default)]
    pub sweep: Sweep,
    /// write SVG line plots next to the CSV
    #[serde(default)]
    pub plots: bool,
    /// uniqueness: amplitude of the initial perturbation
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
    /// uniqueness: envelope growth rate; the frozen constant (with margin)
    /// when omitted
    #[serde(default)]
    pub growth: Option<f64>,
    /// snapshot cadence in steps for uniqueness runs
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: u64,
    /// calibrate: also fit the solver-level constants (slow)
    #[serde(default)]
    pub include_runs: bool,
    /// write a checkpoint for every sweep point this many steps apart
    #[serde(default)]
    pub checkpoint_every: Option<u64>,
}

fn default_perturbation() -> f64 {
    1e-6
}

fn default_snapshot_every() -> u64 {
    100
}

/// One point of the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub seed: u64,
    pub eps: f64,
    pub dt: Option<f64>,
    pub n: usize,
    pub config: SolverConfig,
}

impl SweepPoint {
    pub fn label(&self) -> String {
        let dt = self.dt.map(|d| format!("{d}")).unwrap_or_else(|| "auto".into());
        format!("seed={} eps={} dt={} n={}", self.seed, self.eps, dt, self.n)
    }
}

fn axis<T: Clone>(name: &str, axis: &Option<Vec<T>>, base: T) -> Result<Vec<T>> {
    match axis {
        None => Ok(vec![base]),
        Some(v) if v.is_empty() => bail!("sweep axis `{name}` is empty"),
        Some(v) => Ok(v.clone()),
    }
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: Self = toml::from_str(text).context("parsing plan")?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    /// Reject empty axes and invalid configurations before any compute.
    pub fn validate(&self) -> Result<()> {
        if self.kind != ExperimentKind::Calibrate {
            for p in self.points(0)? {
                p.config.validate().with_context(|| format!("sweep point {}", p.label()))?;
            }
        }
        if !(self.perturbation > 0.0 && self.perturbation.is_finite()) {
            bail!("perturbation must be positive");
        }
        if self.snapshot_every == 0 {
            bail!("snapshot_every must be at least 1");
        }
        if self.checkpoint_every == Some(0) {
            bail!("checkpoint_every must be at least 1");
        }
        Ok(())
    }

    /// Cartesian product seeds × ε × dt × N in that nesting order. The seed
    /// offset is added to every noise seed.
    pub fn points(&self, seed_offset: u64) -> Result<Vec<SweepPoint>> {
        let b = &self.base;
        let seeds = axis("seeds", &self.sweep.seeds, b.noise.seed)?;
        let epss = axis("eps", &self.sweep.eps, b.noise.options.eps)?;
        let dts = axis("dt", &self.sweep.dt.as_ref().map(|v| v.iter().map(|d| Some(*d)).collect()), b.dt)?;
        let ns = axis("n", &self.sweep.n, b.n)?;
        let mut out = Vec::new();
        for &seed in &seeds {
            for &eps in &epss {
                for &dt in &dts {
                    for &n in &ns {
                        let mut config = b.clone();
                        config.noise.seed = seed + seed_offset;
                        config.noise.options.eps = eps;
                        config.dt = dt;
                        config.n = n;
                        out.push(SweepPoint { index: out.len(), seed: seed + seed_offset, eps, dt, n, config });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_plan() {
        let p = ExperimentPlan::from_toml("kind = \"norm_tracking\"\n[base]\nn = 16\n").unwrap();
        assert_eq!(p.base.n, 16);
        assert_eq!(p.points(0).unwrap().len(), 1);
    }

    #[test]
    fn empty_sweep_rejected() {
        let err = ExperimentPlan::from_toml("kind = \"convergence\"\n[sweep]\neps = []\n").unwrap_err();
        assert!(format!("{err:#}").contains("empty"));
    }

    #[test]
    fn product_order_and_offset() {
        let p = ExperimentPlan::from_toml("kind = \"convergence\"\n[base]\nn = 16\n[sweep]\nseeds = [1, 2]\neps = [0.2, 0.1]\n").unwrap();
        let pts = p.points(10).unwrap();
        let keys: Vec<_> = pts.iter().map(|p| (p.seed, p.eps)).collect();
        assert_eq!(keys, vec![(11, 0.2), (11, 0.1), (12, 0.2), (12, 0.1)]);
        assert_eq!(pts[3].config.noise.seed, 12);
    }

    #[test]
    fn bad_config_rejected() {
        assert!(ExperimentPlan::from_toml("kind = \"convergence\"\n[base]\nalpha = 0.5\n").is_err());
        assert!(ExperimentPlan::from_toml("kind = \"convergence\"\nbogus = 1\n").is_err());
    }
}
