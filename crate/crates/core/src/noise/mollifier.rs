use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::besov::CutoffProfile;
use crate::error::{Error, Result};
use crate::spectral::{Multiplier, SpectralField};

/// Unit-mass mollifier φ, described through its Fourier transform 𝓕φ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mollifier {
    /// Periodised Gaussian with standard deviation σ: 𝓕φ(k) = exp(−2π²σ²|k|²).
    Gaussian { sigma: f64 },
    /// Compactly supported spectral bump: 𝓕φ(k) = φ_cut(|k|).
    Bump { profile: CutoffProfile },
}

impl Default for Mollifier {
    fn default() -> Self {
        Mollifier::Gaussian { sigma: 0.25 }
    }
}

impl Mollifier {
    /// 𝓕φ(εk) as a function of |εk|².
    pub fn symbol_sq_radius(&self, r2: f64) -> f64 {
        match *self {
            Mollifier::Gaussian { sigma } => (-2.0 * PI * PI * sigma * sigma * r2).exp(),
            Mollifier::Bump { profile } => profile.eval(r2.sqrt()),
        }
    }

    pub fn symbol(&self, eps: f64, k1: i64, k2: i64) -> f64 {
        self.symbol_sq_radius(eps * eps * (k1 * k1 + k2 * k2) as f64)
    }

    pub fn id(&self) -> u8 {
        match self {
            Mollifier::Gaussian { .. } => 1,
            Mollifier::Bump { .. } => 2,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            Mollifier::Gaussian { sigma } => sigma,
            Mollifier::Bump { profile } => profile.steepness,
        }
    }

    pub fn from_id(id: u8, parameter: f64) -> Result<Self> {
        match id {
            1 => Ok(Mollifier::Gaussian { sigma: parameter }),
            2 => Ok(Mollifier::Bump { profile: CutoffProfile { steepness: parameter } }),
            _ => Err(Error::Format(format!("unknown mollifier id {id}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.parameter();
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter { name: "mollifier", value: p, reason: "parameter must be positive".into() });
        }
        Ok(())
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter { name: "eps", value: eps, reason: "must lie in (0, 1]".into() });
    }
    Ok(())
}

/// ξ_ε = ε^{−2}φ(ε^{−1}·) ∗ ξ, i.e. multiplication of ξ̂(k) by 𝓕φ(εk).
pub fn mollify(xi: &SpectralField, eps: f64, mollifier: Mollifier) -> Result<SpectralField> {
    check_eps(eps)?;
    mollifier.validate()?;
    let m = Multiplier::real(xi.grid(), format!("mollifier({eps})"), |k1, k2| mollifier.symbol(eps, k1, k2))?;
    m.apply(xi)
}
