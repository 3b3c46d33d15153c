//! Solver experiments behind the run-level frozen constants.

use rayon::prelude::*;

use crate::error::Result;
use crate::solver::{envelope_ratio, uniqueness_diagnostic, InitialData, Mode, Solver, SolverConfig, Trajectory};

/// Direct mode and split mode with the same noise and data:
/// N = 64, ε = 0.05, f(s) = −s³, T = 0.5.
pub fn cross_mode_config(seed: u64) -> SolverConfig {
    let mut cfg = SolverConfig {
        n: 64,
        t_final: 0.5,
        dt: Some(5e-3),
        initial: InitialData::Rough { seed, delta0: 0.01, amplitude: 1.0 },
        monitor_every: 1_000_000,
        ..SolverConfig::default()
    };
    cfg.noise.seed = seed;
    cfg.noise.options.eps = 0.05;
    cfg
}

/// ‖(φ+ψ) − u‖_{L^∞} at T.
pub fn cross_mode_discrepancy(seed: u64) -> Result<f64> {
    let cfg = cross_mode_config(seed);
    let direct = run_to_end(cfg.clone())?;
    let split = run_to_end(SolverConfig { mode: Mode::Split, ..cfg })?;
    Ok((&direct - &split).linf_norm())
}

fn run_to_end(cfg: SolverConfig) -> Result<crate::spectral::SpectralField> {
    let mut s = Solver::from_config(cfg)?;
    let mut st = s.initial_state()?;
    s.run(&mut st, None)?;
    Ok(st.solution())
}

/// Split-mode run to T = 10 on N = 32 with ε = 0.1.
pub fn coercive_config(seed: u64) -> SolverConfig {
    let mut cfg = SolverConfig {
        n: 32,
        t_final: 10.0,
        dt: Some(2e-3),
        mode: Mode::Split,
        initial: InitialData::Rough { seed, delta0: 0.01, amplitude: 1.0 },
        monitor_every: 25,
        ..SolverConfig::default()
    };
    cfg.noise.seed = seed;
    cfg
}

/// Largest ratio τ^{1/(k−2)}‖ψ‖_{L^∞} / (1 + sup(τ^{1+1/(k−2)}‖Ψ‖_{L^∞})^{1/(k−1)})
/// over the monitored times. A blow-up propagates as an error.
pub fn coercive_ratio(seed: u64) -> Result<f64> {
    let mut s = Solver::from_config(coercive_config(seed))?;
    let mut st = s.initial_state()?;
    s.run(&mut st, None)?;
    let r = &st.report;
    let weighted = r.series("psi_weighted_linf").expect("split monitor");
    let bound = r.series("coercive_bound").expect("split monitor");
    Ok(weighted.values.iter().zip(&bound.values).map(|(w, b)| w / b).fold(0.0, f64::max))
}

/// Direct-mode pair to T = 2 on N = 32, ε = 0.1, the second run started
/// from a 10⁻⁶ perturbation of the first one's data.
pub fn uniqueness_configs(seed: u64) -> (SolverConfig, SolverConfig) {
    let mut base = SolverConfig {
        n: 32,
        t_final: 2.0,
        initial: InitialData::Rough { seed, delta0: 0.01, amplitude: 1.0 },
        monitor_every: 1_000_000,
        ..SolverConfig::default()
    };
    base.noise.seed = seed;
    let pert = SolverConfig {
        initial: InitialData::Perturbed { base: Box::new(base.initial.clone()), seed: seed + 1_000_000, delta0: 0.01, amplitude: 1e-6 },
        ..base.clone()
    };
    (base, pert)
}

/// Snapshot cadence of the uniqueness runs, in steps.
pub const UNIQUENESS_SNAPSHOT_EVERY: u64 = 100;

/// The two trajectories of a uniqueness pair.
pub fn uniqueness_pair(seed: u64) -> Result<(crate::besov::DyadicPartition, Trajectory, Trajectory)> {
    let (a, b) = uniqueness_configs(seed);
    let run = |cfg: SolverConfig| -> Result<(Solver, Trajectory)> {
        let mut s = Solver::from_config(cfg.clone())?;
        let mut st = s.initial_state()?;
        let snaps = s.run(&mut st, Some(UNIQUENESS_SNAPSHOT_EVERY))?;
        let dt = s.dt();
        Ok((s, Trajectory::new(&cfg, dt, snaps)))
    };
    let (s, ta) = run(a)?;
    let (_, tb) = run(b)?;
    Ok((s.partition().clone(), ta, tb))
}

/// Growth rate sup_{t>0} log(‖ζ(t)‖/‖ζ(0)‖)/t in H^{α−1}.
pub fn uniqueness_growth(seed: u64) -> Result<f64> {
    let (part, a, b) = uniqueness_pair(seed)?;
    let alpha = uniqueness_configs(seed).0.alpha;
    let r = uniqueness_diagnostic(&part, &a, &b, alpha, 0.0)?;
    let z = &r.series("zeta_h").expect("diagnostic series").values;
    Ok(r.times.iter().zip(z).skip(1).map(|(t, v)| (v / z[0]).ln() / t).fold(f64::NEG_INFINITY, f64::max))
}

/// sup_t ‖ζ(t)‖ / (e^{C t}‖ζ(0)‖) for a given growth constant C.
pub fn uniqueness_envelope_ratio(seed: u64, growth: f64) -> Result<f64> {
    let (part, a, b) = uniqueness_pair(seed)?;
    let alpha = uniqueness_configs(seed).0.alpha;
    Ok(envelope_ratio(&uniqueness_diagnostic(&part, &a, &b, alpha, growth)?))
}

/// Run-level constants and their samplers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunConstant {
    CrossMode,
    Coercive,
    UniquenessGrowth,
}

impl RunConstant {
    pub const ALL: [RunConstant; 3] = [RunConstant::CrossMode, RunConstant::Coercive, RunConstant::UniquenessGrowth];

    pub fn name(self) -> &'static str {
        match self {
            RunConstant::CrossMode => "cross_mode",
            RunConstant::Coercive => "coercive",
            RunConstant::UniquenessGrowth => "uniqueness_growth",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Number of seeds per side (calibration and validation).
    pub fn seed_count(self) -> usize {
        match self {
            RunConstant::CrossMode => 5,
            RunConstant::Coercive => 10,
            RunConstant::UniquenessGrowth => 10,
        }
    }

    pub fn sample(self, seed: u64) -> Result<f64> {
        match self {
            RunConstant::CrossMode => cross_mode_discrepancy(seed),
            RunConstant::Coercive => coercive_ratio(seed),
            RunConstant::UniquenessGrowth => uniqueness_growth(seed),
        }
    }

    pub fn ensemble(self, seeds: &[u64]) -> Result<Vec<f64>> {
        seeds.par_iter().map(|&s| self.sample(s)).collect()
    }
}
