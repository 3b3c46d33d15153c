use serde::{Deserialize, Serialize};

use super::config::{Mode, SolverConfig};
use super::engine::{Fields, SolverState};
use crate::besov::{sobolev_norm, tau, DyadicPartition, NormReport};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// One coercive-monitor reading at the state's current time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoerciveEntry {
    pub t: f64,
    /// τ^{1/(k−2)}‖ψ‖_{L^∞}
    pub weighted: f64,
    /// 1 + sup_s (τ^{1+1/(k−2)}‖Ψ‖_{L^∞})^{1/(k−1)}
    pub bound: f64,
    /// same bound with the exponent 1 + 1/(k−1) on τ
    pub bound_alt: f64,
    /// weighted / bound
    pub ratio: f64,
}

impl CoerciveEntry {
    /// True when `weighted ≤ constant · bound`.
    pub fn holds(&self, constant: f64) -> bool {
        self.weighted <= constant * self.bound
    }
}

/// Coercive reading of a split-mode state.
pub fn coercive_monitor(state: &SolverState, cfg: &SolverConfig) -> Result<CoerciveEntry> {
    let Fields::Split { psi, .. } = &state.fields else {
        return Err(Error::RunMismatch("coercive monitor needs a split-mode state".into()));
    };
    let k = cfg.nonlinearity.k as f64;
    let t = state.t;
    let weighted = if t == 0.0 { 0.0 } else { tau(t).powf(1.0 / (k - 2.0)) * psi.linf_norm() };
    let bound = 1.0 + state.forcing_sup.powf(1.0 / (k - 1.0));
    let bound_alt = 1.0 + state.forcing_sup_alt.powf(1.0 / (k - 1.0));
    Ok(CoerciveEntry { t, weighted, bound, bound_alt, ratio: weighted / bound })
}

/// Solution snapshots of one run, tagged with what must agree between two
/// runs for a difference to be meaningful.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub eps: f64,
    pub noise_enabled: bool,
    pub mode: Mode,
    pub dt: f64,
    pub snapshots: Vec<(f64, SpectralField)>,
}

impl Trajectory {
    pub fn new(cfg: &SolverConfig, dt: f64, snapshots: Vec<(f64, SpectralField)>) -> Self {
        Self {
            seed: cfg.noise.seed,
            eps: cfg.noise.options.eps,
            noise_enabled: cfg.noise.enabled,
            mode: cfg.mode,
            dt,
            snapshots,
        }
    }
}

/// ‖ζ(t)‖_{H^{α−1}} for ζ = u_a − u_b together with the envelope
/// e^{C t}‖ζ(0)‖_{H^{α−1}}.
///
/// The report carries the series `zeta_h` and `envelope`.
pub fn uniqueness_diagnostic(part: &DyadicPartition, a: &Trajectory, b: &Trajectory, alpha: f64, growth: f64) -> Result<NormReport> {
    if a.seed != b.seed || a.eps != b.eps || a.noise_enabled != b.noise_enabled || a.dt != b.dt || a.mode != b.mode {
        return Err(Error::RunMismatch("runs differ in noise, time step or mode".into()));
    }
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::RunMismatch(format!("{} vs {} snapshots", a.snapshots.len(), b.snapshots.len())));
    }
    let mut report = NormReport::new();
    report.note("sobolev_index", format!("{}", alpha - 1.0));
    report.note("growth", format!("{growth}"));
    let mut zeta0 = None;
    for ((ta, ua), (tb, ub)) in a.snapshots.iter().zip(&b.snapshots) {
        if ta != tb {
            return Err(Error::RunMismatch(format!("snapshot times {ta} and {tb} differ")));
        }
        ua.grid().check_same(&ub.grid())?;
        let z = sobolev_norm(part, &(ua - ub), alpha - 1.0)?;
        let z0 = *zeta0.get_or_insert(z);
        report.push_row(*ta, &[("zeta_h", z), ("envelope", z0 * (growth * ta).exp())])?;
    }
    Ok(report)
}

/// Ratio sup_t ‖ζ(t)‖ / (e^{C t}‖ζ(0)‖) from a uniqueness report.
pub fn envelope_ratio(report: &NormReport) -> f64 {
    let (Some(z), Some(e)) = (report.series("zeta_h"), report.series("envelope")) else {
        return f64::NAN;
    };
    z.values
        .iter()
        .zip(&e.values)
        .map(|(z, e)| if *e == 0.0 { if *z == 0.0 { 0.0 } else { f64::INFINITY } } else { z / e })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{InitialData, NoiseSpec, Solver};

    fn trajectory(cfg: &SolverConfig) -> (Solver, Trajectory) {
        let mut s = Solver::from_config(cfg.clone()).unwrap();
        let mut st = s.initial_state().unwrap();
        let snaps = s.run(&mut st, Some(25)).unwrap();
        let dt = s.dt();
        (s, Trajectory::new(cfg, dt, snaps))
    }

    #[test]
    fn identical_runs_give_zero() {
        let cfg = SolverConfig { n: 16, t_final: 0.2, dt: Some(2e-3), ..SolverConfig::default() };
        let (s, a) = trajectory(&cfg);
        let (_, b) = trajectory(&cfg);
        let r = uniqueness_diagnostic(s.partition(), &a, &b, cfg.alpha, 1.0).unwrap();
        assert!(r.series("zeta_h").unwrap().values.iter().all(|v| *v == 0.0));
        assert_eq!(envelope_ratio(&r), 0.0);
    }

    #[test]
    fn noiseless_gap_does_not_grow() {
        // f = −s³ has l = 0, so the gap contracts
        let base = SolverConfig {
            n: 16,
            t_final: 0.5,
            dt: Some(2e-3),
            noise: NoiseSpec { enabled: false, ..NoiseSpec::default() },
            ..SolverConfig::default()
        };
        let pert = SolverConfig {
            initial: InitialData::Perturbed { base: Box::new(base.initial.clone()), seed: 77, delta0: 0.01, amplitude: 1e-6 },
            ..base.clone()
        };
        let (s, a) = trajectory(&base);
        let (_, b) = trajectory(&pert);
        let r = uniqueness_diagnostic(s.partition(), &a, &b, base.alpha, 0.0).unwrap();
        assert!(envelope_ratio(&r) <= 1.0 + 1e-9, "{}", envelope_ratio(&r));
    }

    #[test]
    fn mismatched_runs_rejected() {
        let cfg = SolverConfig { n: 16, t_final: 0.1, dt: Some(2e-3), ..SolverConfig::default() };
        let other = SolverConfig { noise: NoiseSpec { seed: 1, ..cfg.noise }, ..cfg.clone() };
        let (s, a) = trajectory(&cfg);
        let (_, b) = trajectory(&other);
        assert!(matches!(uniqueness_diagnostic(s.partition(), &a, &b, cfg.alpha, 1.0), Err(Error::RunMismatch(_))));
    }

    #[test]
    fn coercive_reading() {
        let cfg = SolverConfig { n: 16, mode: crate::solver::Mode::Split, t_final: 0.1, dt: Some(2e-3), ..SolverConfig::default() };
        let mut s = Solver::from_config(cfg.clone()).unwrap();
        let mut st = s.initial_state().unwrap();
        assert_eq!(coercive_monitor(&st, &cfg).unwrap().weighted, 0.0);
        s.run(&mut st, None).unwrap();
        let e = coercive_monitor(&st, &cfg).unwrap();
        assert!(e.weighted.is_finite() && e.bound >= 1.0);
    }
}
