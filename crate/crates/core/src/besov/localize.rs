use super::partition::DyadicPartition;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Per-block weights (w_≤(j), w_>(j)) of the localisers U^{N,γ}_≤ and U^{N,γ}_>.
fn localizer_weights(j: i32, n_loc: f64, gamma: f64) -> (f64, f64) {
    if (j as f64) <= n_loc {
        (1.0, 0.0)
    } else {
        let damp = 2f64.powf(-(j as f64) * gamma);
        (damp, 1.0 - damp)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter { name: "gamma", value: gamma, reason: "must be positive".into() });
    }
    Ok(())
}

/// Split u into (U_≤ u, U_> u) with
/// U_> u = Σ_{j > N}(1 − 2^{−jγ})Δ_j u and U_≤ u = u − U_> u.
///
/// `n_loc` may be fractional; a block j counts as "high" when j > n_loc.
pub fn localize(
    part: &DyadicPartition,
    u: &SpectralField,
    n_loc: f64,
    gamma: f64,
) -> Result<(SpectralField, SpectralField)> {
    check_gamma(gamma)?;
    part.grid().check_same(&u.grid())?;
    let len = part.grid().len();
    let mut w_low = vec![0.0; len];
    let mut w_high = vec![0.0; len];
    for j in part.blocks() {
        let (lo, hi) = localizer_weights(j, n_loc, gamma);
        let s = part.symbol(j)?;
        for idx in 0..len {
            w_low[idx] += lo * s[idx];
            w_high[idx] += hi * s[idx];
        }
    }
    let high = u.weighted(&w_high);
    let low = u - &high;
    Ok((low, high))
}

/// Choose (L, K) from 1 + ‖ψ+φ‖ = 2^{(1−κ)L} = 2^{(2−3κ)K}.
pub fn choose_localization_params(current_norm: f64, kappa: f64) -> Result<(f64, f64)> {
    if !(kappa > 0.0 && kappa < 1.0 / 3.0) {
        return Err(Error::InvalidParameter {
            name: "kappa",
            value: kappa,
            reason: "need 0 < kappa < 1/3 so both exponents stay positive".into(),
        });
    }
    if !(current_norm >= 0.0 && current_norm.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "current_norm",
            value: current_norm,
            reason: "must be finite and non-negative".into(),
        });
    }
    let l2 = (1.0 + current_norm).log2();
    Ok((l2 / (1.0 - kappa), l2 / (2.0 - 3.0 * kappa)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::besov::CutoffProfile;
    use crate::spectral::TorusGrid;

    #[test]
    fn empty_tail_beyond_j_max() {
        let p = DyadicPartition::build(TorusGrid::new(32).unwrap(), CutoffProfile::default()).unwrap();
        let u = SpectralField::from_fn(p.grid(), |x, y| (17.0 * x).sin() + (y * 40.0).cos()).unwrap();
        let (low, high) = localize(&p, &u, p.j_max() as f64, 1.0).unwrap();
        assert_eq!(high.l2_norm(), 0.0);
        assert!(low.max_coeff_diff(&u) == 0.0);
    }

    #[test]
    fn localization_params() {
        assert_eq!(choose_localization_params(0.0, 0.1).unwrap(), (0.0, 0.0));
        let (l, k) = choose_localization_params(1.0, 0.1).unwrap();
        assert!((l - 1.0 / 0.9).abs() < 1e-15);
        assert!((k - 1.0 / 1.7).abs() < 1e-15);
        let (l, _) = choose_localization_params(3.0, 0.1).unwrap();
        assert!((l - 2.0 / 0.9).abs() < 1e-15);
        assert!(choose_localization_params(1.0, 1.0 / 3.0).is_err());
        assert!(choose_localization_params(1.0, 0.5).is_err());
    }

    #[test]
    fn non_positive_gamma_rejected() {
        let p = DyadicPartition::build(TorusGrid::new(16).unwrap(), CutoffProfile::default()).unwrap();
        let u = SpectralField::zeros(p.grid());
        assert!(localize(&p, &u, 1.0, 0.0).is_err());
    }
}
