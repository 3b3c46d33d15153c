use serde::{Deserialize, Serialize};

use super::config::{Mode, SolverConfig};
use super::split::SplitOps;
use crate::besov::{choose_localization_params, holder_norm, tau, CutoffProfile, DyadicPartition, NormReport};
use crate::error::{Error, Result};
use crate::noise::{make_enhanced, sample_white_noise, EnhancedNoise};
use crate::paracalc::HistoryRing;
use crate::spectral::{dealiased_polynomial, padding_factor, Padded, SpectralField, TorusGrid};

/// Solution fields of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Fields {
    Direct {
        u: SpectralField,
    },
    Split {
        phi: SpectralField,
        psi: SpectralField,
        phi_sharp: SpectralField,
        /// (ψ+φ)≺≺ϑ at the latest history time, reused by the next step
        modified: SpectralField,
        /// τ^γ(ψ+φ) snapshots for ≺≺
        history: HistoryRing,
    },
}

/// Time, fields and monitor history of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub step: u64,
    pub t: f64,
    pub fields: Fields,
    /// current localisation parameters (L, K)
    pub loc: (f64, f64),
    /// sup over monitored times of τ^{1/(k−2)}‖ψ+φ‖_{L^∞}
    pub weighted_sup: f64,
    /// sup over monitored times of τ^{1+1/(k−2)}‖Ψ‖_{L^∞}
    pub forcing_sup: f64,
    /// same with the exponent 1 + 1/(k−1)
    pub forcing_sup_alt: f64,
    /// ‖Ψ‖_{L^∞} from the latest split step
    pub forcing_linf: f64,
    pub report: NormReport,
    /// recent (t, ‖u‖_{L²}) pairs, reported on blow-up
    pub trace: Vec<(f64, f64)>,
}

impl SolverState {
    /// u in direct mode, φ + ψ in split mode.
    pub fn solution(&self) -> SpectralField {
        match &self.fields {
            Fields::Direct { u } => u.clone(),
            Fields::Split { phi, psi, .. } => phi + psi,
        }
    }
}

const TRACE_LEN: usize = 32;
const BLOW_UP_NORM: f64 = 1e200;

/// Exponential Euler integrator for direct and split mode.
#[derive(Clone, Debug)]
pub struct Solver {
    cfg: SolverConfig,
    grid: TorusGrid,
    part: DyadicPartition,
    noise: EnhancedNoise,
    dt: f64,
    n_steps: u64,
    /// e^{−dt·m(k)}
    decay: Vec<f64>,
    /// dt·φ₁(−dt·m(k)) = (1 − e^{−dt·m(k)})/m(k)
    gain: Vec<f64>,
    f_coeffs: Vec<f64>,
    pad_m: usize,
    /// ξ_ε − C_ε on the padded grid
    forcing: Padded,
    split: Option<SplitOps>,
}

/// Pieces of the time-step rule derived from a configuration.
fn default_dt(cfg: &SolverConfig, grid: TorusGrid) -> f64 {
    let half = (grid.n() / 2) as i64;
    let max_m = cfg.convention.operator_symbol(half, half, cfg.mu);
    0.1 / max_m
}

impl Solver {
    /// Build the partition and enhanced noise from the configuration.
    pub fn from_config(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let part = DyadicPartition::build(grid, CutoffProfile { steepness: cfg.cutoff_steepness })?;
        let noise = if cfg.noise.enabled {
            make_enhanced(&part, &sample_white_noise(cfg.noise.seed, grid), cfg.noise.options)?
        } else {
            EnhancedNoise::zero(grid, cfg.mu, cfg.convention)
        };
        Self::new(cfg, part, noise)
    }

    pub fn new(cfg: SolverConfig, part: DyadicPartition, noise: EnhancedNoise) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        grid.check_same(&part.grid())?;
        grid.check_same(&noise.grid)?;
        if noise.mu() != cfg.mu {
            return Err(Error::RunMismatch(format!("noise built with mu={} but run uses mu={}", noise.mu(), cfg.mu)));
        }
        let f_coeffs = cfg.nonlinearity.coeffs.clone();
        let degree = cfg.nonlinearity.degree().max(2);
        let pad_m = padding_factor(degree) * grid.n();
        let mut shifted = noise.xi_eps.clone();
        shifted -= &SpectralField::constant(grid, noise.c_eps);
        let forcing = shifted.to_padded(pad_m);

        // stability cap 0.5/(1 + ‖f'(u)‖_∞ + ‖ξ_ε − C_ε‖_∞), with u bounded by
        // its initial size plus the noise size
        let u0 = cfg.initial.synthesize(grid);
        let noise_sup = shifted.linf_norm();
        let u_sup = u0.linf_norm() + 1.0;
        let cap = 0.5 / (1.0 + cfg.nonlinearity.max_abs_derivative(u_sup) + noise_sup);
        let dt0 = cfg.dt.unwrap_or_else(|| default_dt(&cfg, grid)).min(cap);
        let n_steps = ((cfg.t_final / dt0) - 1e-9).ceil().max(1.0) as u64;
        let dt = cfg.t_final / n_steps as f64;

        let mut decay = Vec::with_capacity(grid.len());
        let mut gain = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let (k1, k2) = grid.wavevector(idx);
            let m = cfg.convention.operator_symbol(k1, k2, cfg.mu);
            decay.push((-dt * m).exp());
            gain.push(-(-dt * m).exp_m1() / m);
        }
        let split = match cfg.mode {
            Mode::Direct => None,
            Mode::Split => Some(SplitOps::new(&part, &noise, cfg.kernel, cfg.ansatz_exponent(), cfg.localizer_gamma)?),
        };
        Ok(Self { cfg, grid, part, noise, dt, n_steps, decay, gain, f_coeffs, pad_m, forcing, split })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.part
    }

    pub fn noise(&self) -> &EnhancedNoise {
        &self.noise
    }

    pub fn split_ops(&mut self) -> Option<&mut SplitOps> {
        self.split.as_mut()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of steps to reach t_final.
    pub fn n_steps(&self) -> u64 {
        self.n_steps
    }

    pub fn dt_hist(&self) -> f64 {
        self.dt * self.cfg.hist_stride as f64
    }

    /// Direct mode is used for t < 4·dt_hist in split runs.
    pub fn warmup_time(&self) -> f64 {
        4.0 * self.dt_hist()
    }

    fn time_of(&self, step: u64) -> f64 {
        step as f64 * self.dt
    }

    fn k_exp(&self) -> f64 {
        1.0 / (self.cfg.nonlinearity.k as f64 - 2.0)
    }

    pub fn initial_state(&mut self) -> Result<SolverState> {
        let u0 = self.cfg.initial.synthesize(self.grid);
        let fields = match self.cfg.mode {
            Mode::Direct => Fields::Direct { u: u0 },
            Mode::Split => {
                let zero = SpectralField::zeros(self.grid);
                let span = 1.0 + self.dt_hist();
                let cap = HistoryRing::capacity_for(span, self.dt_hist());
                // η(0) = τ(0)^γ = 0
                let history = HistoryRing::new(self.dt_hist(), cap, zero.clone())?;
                Fields::Split { phi: u0, psi: zero.clone(), phi_sharp: zero.clone(), modified: zero, history }
            }
        };
        let mut state = SolverState {
            step: 0,
            t: 0.0,
            fields,
            loc: (0.0, 0.0),
            weighted_sup: 0.0,
            forcing_sup: 0.0,
            forcing_sup_alt: 0.0,
            forcing_linf: 0.0,
            report: NormReport::new(),
            trace: Vec::new(),
        };
        state.report.note("mode", format!("{:?}", self.cfg.mode).to_lowercase());
        state.report.note("dt", format!("{}", self.dt));
        state.report.note("localizer_gamma", format!("{}", self.cfg.localizer_gamma));
        state.report.note("kernel", self.cfg.kernel.label());
        state.report.note("c_eps", format!("{}", self.noise.c_eps));
        self.monitor(&mut state)?;
        Ok(state)
    }

    /// f(u) + u(ξ_ε − C_ε) on the padded grid.
    fn direct_forcing(&self, u: &SpectralField) -> SpectralField {
        let mut p = u.to_padded(self.pad_m);
        let deg = self.f_coeffs.len();
        for (v, x) in p.values_mut().iter_mut().zip(self.forcing.values()) {
            let s = *v;
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for i in (0..deg).rev() {
                acc = acc * s + self.f_coeffs[i];
            }
            *v = acc + s * x;
        }
        p.into_field(self.grid, u.is_real())
    }

    /// û ← e^{−dt m}û + dt φ₁(−dt m) N̂
    fn exp_euler(&self, u: &SpectralField, forcing: &SpectralField) -> SpectralField {
        let coeffs = u
            .coeffs()
            .iter()
            .zip(forcing.coeffs())
            .zip(self.decay.iter().zip(&self.gain))
            .map(|((c, n), (d, g))| c * d + n * g)
            .collect();
        SpectralField::from_coeffs(self.grid, coeffs, u.is_real()).expect("length matches")
    }

    /// One step in direct mode.
    pub fn step_direct(&mut self, state: &mut SolverState) -> Result<()> {
        let Fields::Direct { u } = &state.fields else {
            return Err(Error::RunMismatch("step_direct on a split-mode state".into()));
        };
        let next = self.exp_euler(u, &self.direct_forcing(u));
        state.step += 1;
        state.t = self.time_of(state.step);
        check_finite(&mut state.trace, &next, state.t)?;
        state.fields = Fields::Direct { u: next };
        Ok(())
    }

    /// One step in split mode (direct update of φ during the warm-up).
    pub fn step_split(&mut self, state: &mut SolverState) -> Result<()> {
        let t = state.t;
        let warm = t < self.warmup_time() - 1e-12;
        let (l, k) = state.loc;
        let gamma = self.cfg.ansatz_exponent();
        let Fields::Split { phi, psi, phi_sharp, modified, .. } = &mut state.fields else {
            return Err(Error::RunMismatch("step_split on a direct-mode state".into()));
        };
        let (new_phi, new_psi, forcing_linf) = if warm {
            // ψ stays zero; φ carries the whole solution
            let next = self.exp_euler(phi, &self.direct_forcing(phi));
            (next, psi.clone(), 0.0)
        } else {
            let ops = self.split.as_mut().expect("split mode has ops");
            let terms = ops.assemble(&self.f_coeffs, phi, psi, phi_sharp, modified, l, k)?;
            let next_phi = self.exp_euler(phi, &terms.phi_forcing);
            let mut psi_rhs = dealiased_polynomial(psi, &self.f_coeffs);
            psi_rhs += &terms.psi_forcing;
            let next_psi = self.exp_euler(psi, &psi_rhs);
            (next_phi, next_psi, terms.psi_forcing.linf_norm())
        };
        state.forcing_linf = forcing_linf;
        state.step += 1;
        state.t = self.time_of(state.step);
        let t_new = state.t;
        let u = &new_phi + &new_psi;
        check_finite(&mut state.trace, &u, t_new)?;
        let Fields::Split { phi, psi, phi_sharp, modified, history } = &mut state.fields else { unreachable!() };
        *phi = new_phi;
        *psi = new_psi;
        if state.step % self.cfg.hist_stride as u64 == 0 {
            history.push(t_new, u.scale(tau(t_new).powf(gamma)))?;
        }
        if t_new >= self.warmup_time() - 1e-12 {
            let ops = self.split.as_ref().expect("split mode has ops");
            *modified = ops.modified(history, history.latest_time())?;
            *phi_sharp = ops.phi_sharp(phi, modified);
        }
        Ok(())
    }

    /// Advance one step in the configured mode and log monitors at the
    /// configured cadence.
    pub fn step(&mut self, state: &mut SolverState) -> Result<()> {
        match self.cfg.mode {
            Mode::Direct => self.step_direct(state)?,
            Mode::Split => self.step_split(state)?,
        }
        if state.step % self.cfg.monitor_every as u64 == 0 || state.step == self.n_steps {
            self.monitor(state)?;
        }
        Ok(())
    }

    /// Run to t_final, returning u at every `snapshot_every`-th step and at the end.
    pub fn run(&mut self, state: &mut SolverState, snapshot_every: Option<u64>) -> Result<Vec<(f64, SpectralField)>> {
        self.run_until(state, self.n_steps, snapshot_every)
    }

    /// Run until the step counter reaches `last_step`.
    pub fn run_until(&mut self, state: &mut SolverState, last_step: u64, snapshot_every: Option<u64>) -> Result<Vec<(f64, SpectralField)>> {
        let mut snaps = Vec::new();
        if let Some(e) = snapshot_every {
            if state.step % e == 0 {
                snaps.push((state.t, state.solution()));
            }
        }
        while state.step < last_step.min(self.n_steps) {
            self.step(state)?;
            if let Some(e) = snapshot_every {
                if state.step % e == 0 || state.step == self.n_steps {
                    snaps.push((state.t, state.solution()));
                }
            }
        }
        Ok(snaps)
    }

    /// Log the monitor row for the current time and refresh (L, K).
    fn monitor(&mut self, state: &mut SolverState) -> Result<()> {
        let t = state.t;
        let ke = self.k_exp();
        let kk = self.cfg.nonlinearity.k as f64;
        let alpha = self.cfg.alpha;
        let w = |e: f64| if e == 0.0 { 1.0 } else { tau(t).powf(e) };
        let u = state.solution();
        let u_linf = u.linf_norm();
        let weighted = w(ke) * u_linf;
        state.weighted_sup = state.weighted_sup.max(weighted);
        let mut row: Vec<(&str, f64)> = vec![("u_linf", u_linf), ("u_l2", u.l2_norm()), ("u_weighted_linf", weighted)];
        if let Fields::Split { phi, psi, phi_sharp, .. } = &state.fields {
            let forcing = state.forcing_linf;
            state.forcing_sup = state.forcing_sup.max(w(1.0 + ke) * forcing);
            state.forcing_sup_alt = state.forcing_sup_alt.max(w(1.0 + 1.0 / (kk - 1.0)) * forcing);
            let psi_w = w(ke) * psi.linf_norm();
            let bound = 1.0 + state.forcing_sup.powf(1.0 / (kk - 1.0));
            let bound_alt = 1.0 + state.forcing_sup_alt.powf(1.0 / (kk - 1.0));
            let rho = w(1.0 + ke + (3.0 * alpha - 2.0) / 2.0);
            row.extend([
                ("psi_weighted_linf", psi_w),
                ("coercive_bound", bound),
                ("coercive_bound_alt", bound_alt),
                ("psi_forcing_weighted", w(1.0 + ke) * forcing),
                ("phi_sharp_c2alpha", holder_norm(&self.part, phi_sharp, 2.0 * alpha)?),
                ("phi_weighted_calpha", w(ke + alpha / 2.0) * holder_norm(&self.part, phi, alpha)?),
                ("phi_c3alpha", holder_norm(&self.part, phi, 3.0 * alpha)?),
                ("psi_weighted_c3alpha", rho * holder_norm(&self.part, psi, 3.0 * alpha)?),
            ]);
            state.loc = choose_localization_params(state.weighted_sup, self.cfg.kappa)?;
            row.extend([("loc_l", state.loc.0), ("loc_k", state.loc.1)]);
        }
        state.report.push_row(t, &row)
    }
}

fn check_finite(trace: &mut Vec<(f64, f64)>, u: &SpectralField, t: f64) -> Result<()> {
    let l2 = u.l2_norm();
    trace.push((t, l2));
    if trace.len() > TRACE_LEN {
        trace.remove(0);
    }
    if !(l2.is_finite() && l2 < BLOW_UP_NORM) {
        return Err(Error::BlowUp {
            time: t,
            reason: if l2.is_finite() { format!("L2 norm {l2:e} above threshold") } else { "non-finite state".into() },
            norm_trace: trace.clone(),
        });
    }
    Ok(())
}

/// One Richardson extrapolation level for a first-order method:
/// 2·u_{dt/2} − u_{dt}, generalised to order p.
pub fn richardson(coarse: &SpectralField, fine: &SpectralField, order: u32) -> SpectralField {
    let f = 2f64.powi(order as i32);
    let mut out = fine.scale(f / (f - 1.0));
    out.axpy(-1.0 / (f - 1.0), coarse);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{InitialData, NoiseSpec, NonlinearityPoly, SolverConfig};

    fn quiet(n: usize, initial: InitialData) -> SolverConfig {
        SolverConfig {
            n,
            noise: NoiseSpec { enabled: false, ..NoiseSpec::default() },
            initial,
            monitor_every: 50,
            ..SolverConfig::default()
        }
    }

    fn run(cfg: SolverConfig) -> SolverState {
        let mut s = Solver::from_config(cfg).unwrap();
        let mut st = s.initial_state().unwrap();
        s.run(&mut st, None).unwrap();
        st
    }

    // u' = −u − u³, u(0) = 2
    fn ode_exact(u0: f64, t: f64) -> f64 {
        (1.0 / ((1.0 / (u0 * u0) + 1.0) * (2.0 * t).exp() - 1.0)).sqrt()
    }

    #[test]
    fn constant_data_tracks_ode() {
        let at = |dt: f64| {
            let st = run(SolverConfig { dt: Some(dt), ..quiet(16, InitialData::Constant { value: 2.0 }) });
            st.solution()
        };
        let (a, b, c) = (at(2e-3), at(1e-3), at(5e-4));
        // spatially constant throughout
        assert!(c.coeffs().iter().skip(1).all(|z| z.norm() < 1e-14));
        let first = richardson(&a, &b, 1);
        let second = richardson(&first, &richardson(&b, &c, 1), 2);
        let exact = ode_exact(2.0, 1.0);
        assert!((c.mean() - exact).abs() < 1e-3);
        assert!((second.mean() - exact).abs() < 1e-6, "{} vs {}", second.mean(), exact);
    }

    #[test]
    fn first_order_self_convergence() {
        let base = SolverConfig {
            n: 16,
            t_final: 0.5,
            nonlinearity: NonlinearityPoly::zero(),
            initial: InitialData::Constant { value: 1.0 },
            noise: NoiseSpec { seed: 3, ..NoiseSpec::default() },
            monitor_every: 1000,
            ..SolverConfig::default()
        };
        let u = |dt: f64| run(SolverConfig { dt: Some(dt), ..base.clone() }).solution();
        let (a, b, c) = (u(4e-3), u(2e-3), u(1e-3));
        let d1 = (&a - &b).linf_norm();
        let d2 = (&b - &c).linf_norm();
        let ratio = d1 / d2;
        assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn zero_is_fixed_point() {
        for mode in [Mode::Direct, Mode::Split] {
            let st = run(SolverConfig { mode, t_final: 0.2, ..quiet(16, InitialData::Zero) });
            assert_eq!(st.solution().linf_norm(), 0.0);
        }
    }

    #[test]
    fn no_time_means_identity() {
        let cfg = quiet(16, InitialData::default());
        let mut s = Solver::from_config(cfg.clone()).unwrap();
        let st = s.initial_state().unwrap();
        assert_eq!(st.solution(), cfg.initial.synthesize(cfg.grid().unwrap()));
    }

    #[test]
    fn split_without_noise_matches_direct() {
        let base = SolverConfig { t_final: 0.5, dt: Some(2e-3), ..quiet(16, InitialData::default()) };
        let direct = run(base.clone()).solution();
        let st = run(SolverConfig { mode: Mode::Split, ..base });
        let Fields::Split { psi, .. } = &st.fields else { panic!() };
        // with ξ = 0 the ψ equation is ψ' = −ℒψ + f(φ+ψ), so ψ picks up the
        // nonlinear part while φ only feels the heat flow
        assert!(psi.linf_norm() > 0.0);
        assert!((&st.solution() - &direct).linf_norm() < 1e-8);
    }

    #[test]
    fn split_identity_with_noise() {
        // Φ + Ψ + f(ψ) = f(ψ+φ) + u⋄ξ, with u⋄ξ = uξ_ε − C_ε u pointwise
        let cfg = SolverConfig {
            n: 32,
            mode: Mode::Split,
            t_final: 0.05,
            dt: Some(1e-3),
            noise: NoiseSpec { seed: 5, ..NoiseSpec::default() },
            ..SolverConfig::default()
        };
        let mut s = Solver::from_config(cfg.clone()).unwrap();
        let mut st = s.initial_state().unwrap();
        s.run(&mut st, None).unwrap();
        let Fields::Split { phi, psi, phi_sharp, history, .. } = st.fields.clone() else { panic!() };
        let f = cfg.nonlinearity.coeffs.clone();
        let c_eps = s.noise().c_eps;
        let xi = s.noise().xi_eps.clone();
        let ops = s.split_ops().unwrap();
        let u_mod = ops.modified(&history, history.latest_time()).unwrap();
        let terms = ops.assemble(&f, &phi, &psi, &phi_sharp, &u_mod, 1.0, 2.0).unwrap();
        let u = &phi + &psi;
        let mut lhs = &terms.phi_forcing + &terms.psi_forcing;
        lhs += &dealiased_polynomial(&psi, &f);
        let mut rhs = dealiased_polynomial(&u, &f);
        rhs += &crate::spectral::dealiased_product(&u, &xi).unwrap();
        rhs.axpy(-c_eps, &u);
        let scale = rhs.linf_norm().max(1.0);
        assert!((&lhs - &rhs).linf_norm() < 1e-10 * scale, "{}", (&lhs - &rhs).linf_norm());
        // same identity through the Wick assembly
        let u_sharp = ops.phi_sharp(&u, &u_mod);
        let wick = ops.assemble_wick(&u, &u_sharp, &u_mod).unwrap();
        let mut alt = dealiased_polynomial(&u, &f);
        alt += &wick;
        assert!((&lhs - &alt).linf_norm() < 1e-10 * scale);
    }

    #[test]
    fn blow_up_is_reported() {
        // a huge explicit step with an unstable cubic: the cap is bypassed by
        // an initial value far outside the estimated range
        let cfg = SolverConfig {
            nonlinearity: NonlinearityPoly { coeffs: vec![0.0, 0.0, 0.0, 1.0], ..NonlinearityPoly::cubic() },
            ..quiet(16, InitialData::Constant { value: 3.0 })
        };
        let mut s = Solver::from_config(cfg).unwrap();
        let mut st = s.initial_state().unwrap();
        match s.run(&mut st, None) {
            Err(Error::BlowUp { norm_trace, .. }) => assert!(!norm_trace.is_empty()),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
