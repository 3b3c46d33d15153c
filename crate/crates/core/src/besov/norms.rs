use serde::{Deserialize, Serialize};

use super::partition::{lp_block, DyadicPartition};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Integrability index of a Besov norm; only 2 and ∞ are supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrability {
    Two,
    Infinity,
}

impl Integrability {
    pub fn parse(x: f64) -> Option<Self> {
        if x == 2.0 {
            Some(Self::Two)
        } else if x == f64::INFINITY {
            Some(Self::Infinity)
        } else {
            None
        }
    }
}

/// ‖f‖_{L^p} on the grid: the grid maximum for p = ∞, Parseval for p = 2.
pub fn lp_norm(f: &SpectralField, p: Integrability) -> f64 {
    match p {
        Integrability::Two => f.l2_norm(),
        Integrability::Infinity => f.linf_norm(),
    }
}

/// ‖Δ_j u‖_{L^p} for j = −1..=j_max.
pub fn block_norms(part: &DyadicPartition, u: &SpectralField, p: Integrability) -> Result<Vec<f64>> {
    part.blocks().map(|j| Ok(lp_norm(&lp_block(part, j, u)?, p))).collect()
}

fn combine(part: &DyadicPartition, norms: &[f64], alpha: f64, q: Integrability) -> f64 {
    let weighted = part.blocks().zip(norms).map(|(j, n)| 2f64.powf(j as f64 * alpha) * n);
    match q {
        Integrability::Infinity => weighted.fold(0.0, f64::max),
        Integrability::Two => weighted.map(|x| x * x).sum::<f64>().sqrt(),
    }
}

/// (Σ_{j ≥ −1} (2^{jα}‖Δ_j u‖_{L^p})^q)^{1/q}, truncated at j_max.
///
/// Block −1 carries the literal weight 2^{−α}.
pub fn besov_norm(part: &DyadicPartition, u: &SpectralField, alpha: f64, p: f64, q: f64) -> Result<f64> {
    let (pp, qq) = match (Integrability::parse(p), Integrability::parse(q)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::UnsupportedBesov { p: p.to_string(), q: q.to_string() }),
    };
    besov_norm_with(part, u, alpha, pp, qq)
}

pub fn besov_norm_with(
    part: &DyadicPartition,
    u: &SpectralField,
    alpha: f64,
    p: Integrability,
    q: Integrability,
) -> Result<f64> {
    let norms = block_norms(part, u, p)?;
    Ok(combine(part, &norms, alpha, q))
}

/// Hölder–Besov norm 𝒞^α = B^α_{∞,∞}.
pub fn holder_norm(part: &DyadicPartition, u: &SpectralField, alpha: f64) -> Result<f64> {
    besov_norm_with(part, u, alpha, Integrability::Infinity, Integrability::Infinity)
}

/// Sobolev norm H^α = B^α_{2,2}.
pub fn sobolev_norm(part: &DyadicPartition, u: &SpectralField, alpha: f64) -> Result<f64> {
    part.grid().check_same(&u.grid())?;
    // Parseval per block, no transforms needed
    let norms: Vec<f64> = part
        .blocks()
        .map(|j| {
            let s = part.symbol(j).expect("block in range");
            u.coeffs().iter().zip(s).map(|(c, w)| c.norm_sqr() * w * w).sum::<f64>().sqrt()
        })
        .collect();
    Ok(combine(part, &norms, alpha, Integrability::Two))
}

/// ⟨a, b⟩_{H^α} = Σ_j 2^{2jα}⟨Δ_j a, Δ_j b⟩.
pub fn sobolev_inner(part: &DyadicPartition, a: &SpectralField, b: &SpectralField, alpha: f64) -> Result<f64> {
    part.grid().check_same(&a.grid())?;
    a.grid().check_same(&b.grid())?;
    let mut total = 0.0;
    for j in part.blocks() {
        let s = part.symbol(j)?;
        let w = 2f64.powf(2.0 * j as f64 * alpha);
        let pair: f64 = a
            .coeffs()
            .iter()
            .zip(b.coeffs())
            .zip(s)
            .map(|((x, y), r)| (x * y.conj()).re * r * r)
            .sum();
        total += w * pair;
    }
    Ok(total)
}
