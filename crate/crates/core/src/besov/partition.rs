use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, TorusGrid};

/// Radial cut-off φ: equal to 1 on |r| ≤ 1, 0 on |r| ≥ 2, joined by the
/// C^∞ bridge s(2−r)/(s(2−r)+s(r−1)) with s(t) = exp(−σ/t).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CutoffProfile {
    /// σ in the bridge exponent; larger values flatten the transition ends.
    pub steepness: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self { steepness: 1.0 }
    }
}

impl CutoffProfile {
    fn s(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-self.steepness / t).exp()
        }
    }

    /// φ(r) for r ≥ 0.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            let a = self.s(2.0 - r);
            let b = self.s(r - 1.0);
            a / (a + b)
        }
    }
}

/// Dyadic partition of unity tabulated on the frequency lattice.
///
/// Block −1 is χ(k) = φ(2|k|); block j ≥ 0 is ϱ_j(k) = φ(2^{−j}|k|) − φ(2^{1−j}|k|).
/// The top block j_max = ⌊log₂(N/2)⌋ absorbs everything above it,
/// ϱ_{j_max}(k) = 1 − φ(2^{1−j_max}|k|), so the blocks sum to one on the
/// whole lattice including the corners |k| > N/2.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: TorusGrid,
    profile: CutoffProfile,
    j_max: i32,
    symbols: Vec<Vec<f64>>,
}

impl DyadicPartition {
    pub fn build(grid: TorusGrid, profile: CutoffProfile) -> Result<Self> {
        let j_max = ((grid.n() / 2) as f64).log2().floor() as i32;
        if j_max < 2 {
            return Err(Error::PartitionTooSmall { n: grid.n(), j_max });
        }
        if !(profile.steepness > 0.0 && profile.steepness.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "steepness",
                value: profile.steepness,
                reason: "must be positive".into(),
            });
        }
        let radii: Vec<f64> = (0..grid.len()).map(|i| grid.radius(i)).collect();
        let mut symbols = Vec::with_capacity(j_max as usize + 2);
        symbols.push(radii.iter().map(|&r| profile.eval(2.0 * r)).collect());
        for j in 0..=j_max {
            let hi = 2f64.powi(-j);
            let lo = 2f64.powi(1 - j);
            let block = radii
                .iter()
                .map(|&r| {
                    let outer = if j == j_max { 1.0 } else { profile.eval(hi * r) };
                    outer - profile.eval(lo * r)
                })
                .collect();
            symbols.push(block);
        }
        Ok(Self { grid, profile, j_max, symbols })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn profile(&self) -> CutoffProfile {
        self.profile
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Block indices −1..=j_max.
    pub fn blocks(&self) -> impl Iterator<Item = i32> + Clone {
        -1..=self.j_max
    }

    pub fn symbol(&self, j: i32) -> Result<&[f64]> {
        self.check_block(j)?;
        Ok(&self.symbols[(j + 1) as usize])
    }

    pub fn chi(&self) -> &[f64] {
        &self.symbols[0]
    }

    /// Symbol of S_j = Σ_{i ≤ j} Δ_i (zero for j < −1, one for j ≥ j_max).
    pub fn low_pass_symbol(&self, j: i32) -> Vec<f64> {
        let len = self.grid.len();
        if j < -1 {
            return vec![0.0; len];
        }
        let top = j.min(self.j_max);
        let mut acc = vec![0.0; len];
        for i in -1..=top {
            for (a, s) in acc.iter_mut().zip(&self.symbols[(i + 1) as usize]) {
                *a += s;
            }
        }
        acc
    }

    pub(crate) fn check_block(&self, j: i32) -> Result<()> {
        if j < -1 || j > self.j_max {
            return Err(Error::BlockOutOfRange { j, j_max: self.j_max });
        }
        Ok(())
    }

    /// Σ_j ϱ_j(k) at every lattice point.
    pub fn partition_sum(&self) -> Vec<f64> {
        self.low_pass_symbol(self.j_max)
    }
}

/// Δ_j u = 𝓕⁻¹(ϱ_j 𝓕u).
pub fn lp_block(part: &DyadicPartition, j: i32, u: &SpectralField) -> Result<SpectralField> {
    part.grid.check_same(&u.grid())?;
    Ok(u.weighted(part.symbol(j)?))
}

/// S_j u = Σ_{i ≤ j} Δ_i u.
pub fn low_pass(part: &DyadicPartition, j: i32, u: &SpectralField) -> Result<SpectralField> {
    part.grid.check_same(&u.grid())?;
    Ok(u.weighted(&part.low_pass_symbol(j)))
}

/// All blocks Δ_{−1}u, …, Δ_{j_max}u.
pub fn lp_blocks(part: &DyadicPartition, u: &SpectralField) -> Result<Vec<SpectralField>> {
    part.blocks().map(|j| lp_block(part, j, u)).collect()
}
