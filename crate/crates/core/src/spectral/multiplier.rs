use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// How |k|² enters the operator symbol m(k) = c·|k|² + μ.
///
/// `Paper` uses c = 1 (the form appearing in the renormalisation constant);
/// `Exact` uses c = 4π², the true eigenvalue of −Δ on e^{2πik·x}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolConvention {
    #[default]
    Paper,
    Exact,
}

impl SymbolConvention {
    pub fn laplace_scale(self) -> f64 {
        match self {
            SymbolConvention::Paper => 1.0,
            SymbolConvention::Exact => 4.0 * PI * PI,
        }
    }

    /// Scale turning k into the symbol of ∂ (so ∇ ↔ i·s·k).
    pub fn gradient_scale(self) -> f64 {
        self.laplace_scale().sqrt()
    }

    /// m(k) = c|k|² + μ
    pub fn operator_symbol(self, k1: i64, k2: i64, mu: f64) -> f64 {
        self.laplace_scale() * (k1 * k1 + k2 * k2) as f64 + mu
    }
}

/// A Fourier multiplier tabulated on the frequency lattice.
#[derive(Clone, Debug)]
pub struct Multiplier {
    grid: TorusGrid,
    name: String,
    symbol: Vec<Complex64>,
    real_even: bool,
}

impl Multiplier {
    /// Tabulate a real radial-or-even symbol.
    pub fn real(grid: TorusGrid, name: impl Into<String>, f: impl Fn(i64, i64) -> f64) -> Result<Self> {
        let mut symbol = Vec::with_capacity(grid.len());
        let mut even = true;
        for idx in 0..grid.len() {
            let (k1, k2) = grid.wavevector(idx);
            let v = f(k1, k2);
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "symbol",
                    value: v,
                    reason: format!("non-finite at k=({k1},{k2})"),
                });
            }
            symbol.push(Complex64::new(v, 0.0));
        }
        for idx in 0..grid.len() {
            if symbol[idx] != symbol[grid.partner(idx)] {
                even = false;
                break;
            }
        }
        Ok(Self { grid, name: name.into(), symbol, real_even: even })
    }

    pub fn complex(grid: TorusGrid, name: impl Into<String>, f: impl Fn(i64, i64) -> Complex64) -> Result<Self> {
        let mut symbol = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let (k1, k2) = grid.wavevector(idx);
            let v = f(k1, k2);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "symbol",
                    value: f64::NAN,
                    reason: format!("non-finite at k=({k1},{k2})"),
                });
            }
            symbol.push(v);
        }
        Ok(Self { grid, name: name.into(), symbol, real_even: false })
    }

    /// e^{−t·m(k)}: the semigroup generated by Δ − μ.
    pub fn heat(grid: TorusGrid, conv: SymbolConvention, mu: f64, t: f64) -> Result<Self> {
        Self::real(grid, format!("heat({t})"), |k1, k2| (-t * conv.operator_symbol(k1, k2, mu)).exp())
    }

    /// 1/m(k): the resolvent (−Δ + μ)⁻¹.
    pub fn resolvent(grid: TorusGrid, conv: SymbolConvention, mu: f64) -> Result<Self> {
        if mu <= 0.0 {
            return Err(Error::InvalidParameter { name: "mu", value: mu, reason: "must be positive".into() });
        }
        Self::real(grid, "resolvent", |k1, k2| 1.0 / conv.operator_symbol(k1, k2, mu))
    }

    /// m(k) itself, i.e. the operator −Δ + μ.
    pub fn operator(grid: TorusGrid, conv: SymbolConvention, mu: f64) -> Result<Self> {
        Self::real(grid, "operator", |k1, k2| conv.operator_symbol(k1, k2, mu))
    }

    /// Partial derivative along axis 0 or 1.
    pub fn derivative(grid: TorusGrid, conv: SymbolConvention, axis: usize) -> Result<Self> {
        let s = conv.gradient_scale();
        Self::complex(grid, format!("d{axis}"), |k1, k2| {
            let k = if axis == 0 { k1 } else { k2 };
            // the self-paired Nyquist mode has no well-defined derivative sign
            if 2 * k.unsigned_abs() as usize == grid.n() {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, s * k as f64)
            }
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn is_real_even(&self) -> bool {
        self.real_even
    }

    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        apply_multiplier(self, u)
    }
}

/// Scale each coefficient by the tabulated symbol.
pub fn apply_multiplier(m: &Multiplier, u: &SpectralField) -> Result<SpectralField> {
    m.grid.check_same(&u.grid())?;
    let coeffs = u.coeffs().iter().zip(&m.symbol).map(|(c, s)| c * s).collect();
    let real = u.is_real() && m.real_even;
    let mut out = SpectralField::from_parts(u.grid(), coeffs, real);
    if u.is_real() && !m.real_even {
        // keep the flag honest: a symbol that is Hermitian in k still yields a real field
        let herm = (0..m.symbol.len()).all(|i| (m.symbol[i] - m.symbol[m.grid.partner(i)].conj()).norm() == 0.0);
        if herm {
            out.symmetrize();
        }
    }
    out.debug_check_hermitian();
    Ok(out)
}
