use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::mollifier::{check_eps, Mollifier};
use crate::error::{Error, Result};
use crate::spectral::{SymbolConvention, TorusGrid};

/// Largest |k|_∞ cutoff the direct summation will attempt.
pub const MAX_CUTOFF: i64 = 6000;

/// Which lattice the renormalisation sum runs over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenormScope {
    /// All of ℤ², truncated with a certified tail.
    #[default]
    Infinite,
    /// Only the frequencies the simulation grid carries; this is exactly the
    /// expectation of the discrete resonant product ϑ_ε∘ξ_ε.
    Lattice,
}

impl RenormScope {
    pub fn id(self) -> u8 {
        match self {
            RenormScope::Infinite => 0,
            RenormScope::Lattice => 1,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(RenormScope::Infinite),
            1 => Ok(RenormScope::Lattice),
            _ => Err(Error::Format(format!("unknown renormalisation scope {id}"))),
        }
    }
}

/// Partial sum of C_ε = Σ_k |𝓕φ(εk)|²/m(k) with its certified tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormConstant {
    pub value: f64,
    /// |k|_∞ cutoff R of the partial sum
    pub cutoff: i64,
    /// absolute bound on the omitted terms
    pub tail_bound: f64,
}

impl RenormConstant {
    pub fn relative_tail(&self) -> f64 {
        self.tail_bound / self.value
    }
}

/// Bound on Σ_{|k|_∞ > R} |𝓕φ(εk)|²/(c|k|² + μ).
fn tail_bound(mollifier: Mollifier, eps: f64, mu: f64, c: f64, r: i64) -> f64 {
    match mollifier {
        Mollifier::Gaussian { sigma } => {
            let a = 4.0 * PI * PI * sigma * sigma * eps * eps;
            let rf = r as f64;
            // Σ_{|k1|>R} e^{−a k1²} ≤ e^{−aR²}/(aR) and Σ_{k2∈ℤ} e^{−a k2²} ≤ 1 + √(π/a),
            // doubled for the |k2| > R strip
            4.0 * (-a * rf * rf).exp() / (2.0 * a * rf) * (1.0 + (PI / a).sqrt()) / (c * rf * rf + mu)
        }
        Mollifier::Bump { .. } => {
            // 𝓕φ vanishes for ε|k| ≥ 2
            if r as f64 * eps >= 2.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
    }
}

fn quadrant_sum(mollifier: Mollifier, eps: f64, mu: f64, c: f64, r: i64) -> f64 {
    let axis: Option<Vec<f64>> = match mollifier {
        Mollifier::Gaussian { sigma } => {
            let a = 4.0 * PI * PI * sigma * sigma * eps * eps;
            Some((0..=r).map(|k| (-a * (k * k) as f64).exp()).collect())
        }
        Mollifier::Bump { .. } => None,
    };
    let mut total = 0.0;
    for k1 in 0..=r {
        let mut row = 0.0;
        for k2 in 0..=r {
            let k2sq = (k1 * k1 + k2 * k2) as f64;
            let s2 = match &axis {
                Some(e) => e[k1 as usize] * e[k2 as usize],
                None => mollifier.symbol(eps, k1, k2).powi(2),
            };
            if s2 == 0.0 {
                continue;
            }
            let mult = if k2 == 0 { 1.0 } else { 2.0 };
            row += mult * s2 / (c * k2sq + mu);
        }
        total += if k1 == 0 { row } else { 2.0 * row };
    }
    total
}

/// C_ε = Σ_{k∈ℤ²} |𝓕φ(εk)|²/(c|k|² + μ), summed over |k|_∞ ≤ R with R chosen
/// so the tail bound is at most `rel_tol` of the sum.
pub fn renorm_constant(eps: f64, mu: f64, mollifier: Mollifier, conv: SymbolConvention, rel_tol: f64) -> Result<RenormConstant> {
    check_eps(eps)?;
    mollifier.validate()?;
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter { name: "mu", value: mu, reason: "must be positive".into() });
    }
    let c = conv.laplace_scale();
    // the k = 0 term alone gives C_ε ≥ 1/μ
    let floor = 1.0 / mu;
    let mut r: i64 = 8;
    while tail_bound(mollifier, eps, mu, c, r) > rel_tol * floor {
        if r >= MAX_CUTOFF {
            let achievable = tail_bound(mollifier, eps, mu, c, MAX_CUTOFF) / floor;
            return Err(Error::UnreachableTolerance { requested: rel_tol, achievable });
        }
        r = ((r as f64 * 1.25).ceil() as i64).min(MAX_CUTOFF);
    }
    let value = quadrant_sum(mollifier, eps, mu, c, r);
    Ok(RenormConstant { value, cutoff: r, tail_bound: tail_bound(mollifier, eps, mu, c, r) })
}

/// The same sum restricted to the simulation lattice, with the weights the
/// alias-free resonant product gives the Nyquist modes (½ on edges, ¼ at the
/// corner). Equals E[(ϑ_ε∘ξ_ε)(x)] for the discrete fields exactly.
pub fn lattice_renorm_constant(grid: TorusGrid, eps: f64, mu: f64, mollifier: Mollifier, conv: SymbolConvention) -> Result<f64> {
    check_eps(eps)?;
    mollifier.validate()?;
    let half = (grid.n() / 2) as i64;
    let mut total = 0.0;
    for idx in 0..grid.len() {
        let (k1, k2) = grid.wavevector(idx);
        let mut w = 1.0;
        if k1 == -half {
            w *= 0.5;
        }
        if k2 == -half {
            w *= 0.5;
        }
        total += w * mollifier.symbol(eps, k1, k2).powi(2) / conv.operator_symbol(k1, k2, mu);
    }
    Ok(total)
}
