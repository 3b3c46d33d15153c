use serde::{Deserialize, Serialize};

use super::nonlinearity::NonlinearityPoly;
use crate::error::{Error, Result};
use crate::noise::{sample_white_noise, NoiseOptions};
use crate::paracalc::TimeKernel;
use crate::spectral::{SpectralField, SymbolConvention, TorusGrid};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// ℒu = f(u) + uξ_ε − C_ε u
    #[default]
    Direct,
    /// the (φ, ψ) system
    Split,
}

/// Noise input of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    /// false gives ξ = 0
    pub enabled: bool,
    pub seed: u64,
    #[serde(flatten)]
    pub options: NoiseOptions,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { enabled: true, seed: 0, options: NoiseOptions::default() }
    }
}

/// Initial condition u₀.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Zero,
    Constant { value: f64 },
    /// Σ_k σ_k g_k e^{2πik·x} with σ_k = amplitude·(1+|k|)^{−1+δ₀} and
    /// Hermitian Gaussian g_k: a synthetic element of 𝒞^{−1}.
    Rough { seed: u64, delta0: f64, amplitude: f64 },
    /// base plus a Rough field
    Perturbed { base: Box<InitialData>, seed: u64, delta0: f64, amplitude: f64 },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Rough { seed: 0, delta0: 0.01, amplitude: 1.0 }
    }
}

impl InitialData {
    pub fn synthesize(&self, grid: TorusGrid) -> SpectralField {
        match self {
            InitialData::Zero => SpectralField::zeros(grid),
            InitialData::Constant { value } => SpectralField::constant(grid, *value),
            InitialData::Rough { seed, delta0, amplitude } => rough_field(grid, *seed, *delta0, *amplitude),
            InitialData::Perturbed { base, seed, delta0, amplitude } => {
                let mut u = base.synthesize(grid);
                u += &rough_field(grid, *seed, *delta0, *amplitude);
                u
            }
        }
    }
}

fn rough_field(grid: TorusGrid, seed: u64, delta0: f64, amplitude: f64) -> SpectralField {
    let g = sample_white_noise(seed, grid).xi;
    let w: Vec<f64> = (0..grid.len()).map(|i| amplitude * (1.0 + grid.radius(i)).powf(-1.0 + delta0)).collect();
    g.weighted(&w)
}

/// Everything that defines one solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub n: usize,
    pub mu: f64,
    pub convention: SymbolConvention,
    pub nonlinearity: NonlinearityPoly,
    pub alpha: f64,
    pub kappa: f64,
    /// time step; `None` picks the default 0.1/max m(k). Either way the
    /// stability cap applies.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub mode: Mode,
    pub noise: NoiseSpec,
    pub initial: InitialData,
    /// monitor every this many steps
    pub monitor_every: usize,
    /// history snapshot every this many steps (split mode)
    pub hist_stride: usize,
    /// γ of the localisers U^{N,γ}
    pub localizer_gamma: f64,
    pub kernel: TimeKernel,
    /// steepness of the dyadic cut-off
    pub cutoff_steepness: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 64,
            mu: 1.0,
            convention: SymbolConvention::Paper,
            nonlinearity: NonlinearityPoly::cubic(),
            alpha: 0.8,
            kappa: 0.1,
            dt: None,
            t_final: 1.0,
            mode: Mode::Direct,
            noise: NoiseSpec::default(),
            initial: InitialData::default(),
            monitor_every: 10,
            hist_stride: 1,
            localizer_gamma: 1.0,
            kernel: TimeKernel::default(),
            cutoff_steepness: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        let bad = |name: &'static str, value: f64, reason: &str| Err(Error::InvalidParameter { name, value, reason: reason.into() });
        if !(self.mu > 0.0) {
            return bad("mu", self.mu, "must be positive");
        }
        if !(self.alpha > 2.0 / 3.0 && self.alpha < 1.0) {
            return bad("alpha", self.alpha, "must lie in (2/3, 1)");
        }
        if !(self.kappa > 0.0 && self.kappa < (1.0 - self.alpha).min(1.0 / 3.0)) {
            return bad("kappa", self.kappa, "must lie in (0, min(1 - alpha, 1/3))");
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad("dt", dt, "must be positive");
            }
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad("t_final", self.t_final, "must be positive");
        }
        if self.monitor_every == 0 {
            return bad("monitor_every", 0.0, "must be at least 1");
        }
        if self.hist_stride == 0 {
            return bad("hist_stride", 0.0, "must be at least 1");
        }
        if !(self.localizer_gamma > 0.0) {
            return bad("localizer_gamma", self.localizer_gamma, "must be positive");
        }
        if self.noise.options.mu != self.mu {
            return bad("noise.mu", self.noise.options.mu, "must equal mu");
        }
        if self.noise.options.convention != self.convention {
            return bad("noise.convention", f64::NAN, "must match the solver convention");
        }
        Ok(())
    }

    /// Exponent γ = 1/(k−2) + α/2 of the ansatz weight τ^γ.
    pub fn ansatz_exponent(&self) -> f64 {
        1.0 / (self.nonlinearity.k as f64 - 2.0) + self.alpha / 2.0
    }

    /// Canonical JSON text of the config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}
