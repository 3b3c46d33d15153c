use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::spectral::{SpectralField, TorusGrid};

/// One realisation of spatial white noise restricted to the lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhiteNoise {
    pub seed: u64,
    pub grid: TorusGrid,
    pub xi: SpectralField,
}

/// Sample ξ̂(k): complex Gaussians with E|ξ̂(k)|² = 1 on one half of the
/// lattice, conjugates on the other half, real N(0,1) on self-paired modes.
pub fn sample_white_noise(seed: u64, grid: TorusGrid) -> WhiteNoise {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for idx in 0..grid.len() {
        let p = grid.partner(idx);
        if idx < p {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            coeffs[idx] = Complex64::new(re * half, im * half);
        } else if idx == p {
            let re: f64 = StandardNormal.sample(&mut rng);
            coeffs[idx] = Complex64::new(re, 0.0);
        } else {
            coeffs[idx] = coeffs[p].conj();
        }
    }
    let xi = SpectralField::from_coeffs(grid, coeffs, true).expect("length matches grid");
    WhiteNoise { seed, grid, xi }
}

/// ξ(f) = ∫ ξ f for a real test function f given by its coefficients.
pub fn pair_with(xi: &SpectralField, f: &SpectralField) -> f64 {
    xi.inner(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let g = TorusGrid::new(16).unwrap();
        assert_eq!(sample_white_noise(7, g), sample_white_noise(7, g));
        assert_ne!(sample_white_noise(7, g).xi, sample_white_noise(8, g).xi);
    }

    #[test]
    fn hermitian_exactly() {
        let g = TorusGrid::new(16).unwrap();
        let w = sample_white_noise(1, g);
        assert_eq!(w.xi.hermitian_defect(), 0.0);
        assert_eq!(w.xi.coeff(0, 0).im, 0.0);
        assert_eq!(w.xi.coeff(-8, -8).im, 0.0);
    }
}
