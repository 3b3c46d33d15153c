use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial nonlinearity f(s) = Σ aᵢ sⁱ of degree k − 1 together with the
/// constants of the dissipativity assumption
///
/// −C0 − C1|s|^k ≤ f(s)s ≤ C0 − C2|s|^k,  f'(s) ≤ l.
///
/// Deserialises from a preset name (`"cubic"`, `"allen_cahn"`, `"zero"`) or a
/// table `{ coeffs, c0, c1, c2, l }`; tables are verified like [`Self::new`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NonlinearityRepr")]
pub struct NonlinearityPoly {
    /// a₀, a₁, …, a_{k−1}
    pub coeffs: Vec<f64>,
    pub k: u32,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub l: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NonlinearityRepr {
    Preset(String),
    Table { coeffs: Vec<f64>, k: Option<u32>, c0: f64, c1: f64, c2: f64, l: f64 },
}

impl TryFrom<NonlinearityRepr> for NonlinearityPoly {
    type Error = Error;

    fn try_from(r: NonlinearityRepr) -> Result<Self> {
        match r {
            NonlinearityRepr::Preset(name) => match name.as_str() {
                "cubic" => Ok(Self::cubic()),
                "allen_cahn" => Ok(Self::allen_cahn()),
                "zero" => Ok(Self::zero()),
                other => Err(Error::Format(format!("unknown nonlinearity preset {other:?}"))),
            },
            NonlinearityRepr::Table { coeffs, .. } if coeffs.iter().all(|&a| a == 0.0) => Ok(Self::zero()),
            NonlinearityRepr::Table { coeffs, k, c0, c1, c2, l } => {
                let f = Self::new(coeffs, c0, c1, c2, l)?;
                match k {
                    Some(k) if k != f.k => Err(Error::NotDissipative(format!("declared k = {k} but the degree gives k = {}", f.k))),
                    _ => Ok(f),
                }
            }
        }
    }
}

/// Half-width of the sample grid used for the pointwise checks.
const S_MAX: f64 = 50.0;
const SAMPLES: usize = 20_001;

impl NonlinearityPoly {
    /// Build and verify the sign structure and both inequalities on a dense
    /// sample grid |s| ≤ 50, plus the leading-order behaviour beyond it.
    pub fn new(coeffs: Vec<f64>, c0: f64, c1: f64, c2: f64, l: f64) -> Result<Self> {
        let degree = coeffs.iter().rposition(|&a| a != 0.0).ok_or_else(|| Error::NotDissipative("f is identically zero".into()))?;
        let k = degree as u32 + 1;
        let f = Self { coeffs: coeffs[..=degree].to_vec(), k, c0, c1, c2, l };
        f.verify()?;
        Ok(f)
    }

    /// f(s) = −s³ (k = 4).
    pub fn cubic() -> Self {
        Self::new(vec![0.0, 0.0, 0.0, -1.0], 1.0, 2.0, 1.0, 0.0).expect("valid preset")
    }

    /// f(s) = s − s³ (k = 4).
    pub fn allen_cahn() -> Self {
        Self::new(vec![0.0, 1.0, 0.0, -1.0], 0.5, 1.0, 0.5, 1.0).expect("valid preset")
    }

    /// f ≡ 0: the linear model. It sits outside the dissipative class; the
    /// nominal k = 4 only feeds the time-weight exponents.
    pub fn zero() -> Self {
        Self { coeffs: vec![], k: 4, c0: 0.0, c1: 0.0, c2: 0.0, l: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&a| a != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * s + a)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, &a)| acc * s + i as f64 * a)
    }

    /// max over |s| ≤ bound of |f'(s)|
    pub fn max_abs_derivative(&self, bound: f64) -> f64 {
        (0..=400).map(|i| self.derivative(-bound + 2.0 * bound * i as f64 / 400.0).abs()).fold(0.0, f64::max)
    }

    fn verify(&self) -> Result<()> {
        for (name, v) in [("C0", self.c0), ("C1", self.c1), ("C2", self.c2), ("l", self.l)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::NotDissipative(format!("{name} = {v} must be finite and non-negative")));
            }
        }
        if self.c2 <= 0.0 {
            return Err(Error::NotDissipative("C2 must be positive".into()));
        }
        if self.k < 3 {
            return Err(Error::NotDissipative(format!("degree {} gives k = {} < 3", self.k - 1, self.k)));
        }
        if self.k % 2 != 0 {
            return Err(Error::NotDissipative(format!("k = {} is odd, so f(s)s has no upper bound", self.k)));
        }
        let lead = self.coeffs[self.k as usize - 1];
        if lead >= 0.0 {
            return Err(Error::NotDissipative(format!("leading coefficient {lead} must be negative")));
        }
        if -lead < self.c2 {
            return Err(Error::NotDissipative(format!("|a_(k-1)| = {} is below C2 = {}", -lead, self.c2)));
        }
        if -lead > self.c1 {
            return Err(Error::NotDissipative(format!("|a_(k-1)| = {} exceeds C1 = {}", -lead, self.c1)));
        }
        let kf = self.k as f64;
        for i in 0..SAMPLES {
            let s = -S_MAX + 2.0 * S_MAX * i as f64 / (SAMPLES - 1) as f64;
            let fs = self.eval(s) * s;
            let sk = s.abs().powf(kf);
            let slack = 1e-9 * (1.0 + sk);
            if fs > self.c0 - self.c2 * sk + slack {
                return Err(Error::NotDissipative(format!("f(s)s = {fs} exceeds C0 − C2|s|^k at s = {s}")));
            }
            if fs < -self.c0 - self.c1 * sk - slack {
                return Err(Error::NotDissipative(format!("f(s)s = {fs} is below −C0 − C1|s|^k at s = {s}")));
            }
            if self.derivative(s) > self.l + 1e-9 * (1.0 + s.abs().powf(kf - 2.0)) {
                return Err(Error::NotDissipative(format!("f'({s}) = {} exceeds l = {}", self.derivative(s), self.l)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_verify() {
        let f = NonlinearityPoly::cubic();
        assert_eq!(f.k, 4);
        assert_eq!(f.eval(2.0), -8.0);
        assert_eq!(f.derivative(2.0), -12.0);
        let g = NonlinearityPoly::allen_cahn();
        assert_eq!(g.eval(2.0), -6.0);
        assert!(NonlinearityPoly::zero().is_zero());
    }

    #[test]
    fn bad_signs_rejected() {
        // growing cubic
        assert!(NonlinearityPoly::new(vec![0.0, 0.0, 0.0, 1.0], 1.0, 2.0, 1.0, 10.0).is_err());
        // even degree: k odd
        assert!(NonlinearityPoly::new(vec![0.0, 0.0, -1.0], 1.0, 2.0, 1.0, 10.0).is_err());
        // f' bound violated: s − s³ has f'(0) = 1
        assert!(NonlinearityPoly::new(vec![0.0, 1.0, 0.0, -1.0], 0.5, 1.0, 0.5, 0.5).is_err());
        // C0 too small for s − s³ with C2 = 1/2
        assert!(NonlinearityPoly::new(vec![0.0, 1.0, 0.0, -1.0], 0.4, 1.0, 0.5, 1.0).is_err());
        // linear: k = 2
        assert!(NonlinearityPoly::new(vec![0.0, -1.0], 1.0, 2.0, 1.0, 0.0).is_err());
    }
}
