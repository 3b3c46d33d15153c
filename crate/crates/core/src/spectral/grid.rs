use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform N×N grid on the unit torus (ℝ/ℤ)².
///
/// Frequencies live on the lattice {−N/2, …, N/2−1}² and are stored in FFT
/// order: row index `a` carries k₁ = a for a < N/2 and a − N otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct TorusGrid {
    n: usize,
}

impl TorusGrid {
    pub const DIMENSION: usize = 2;
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_POINTS || n % 2 != 0 {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of lattice points, N².
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Frequency carried by FFT index `a`.
    #[inline]
    pub fn freq(&self, a: usize) -> i64 {
        let n = self.n as i64;
        let a = a as i64;
        if a < n / 2 {
            a
        } else {
            a - n
        }
    }

    /// FFT index of frequency `k` (taken modulo N).
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Wavevector (k₁, k₂) of the flat coefficient index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        (self.freq(idx / self.n), self.freq(idx % self.n))
    }

    #[inline]
    pub fn flat_index(&self, k1: i64, k2: i64) -> usize {
        self.index_of(k1) * self.n + self.index_of(k2)
    }

    /// Flat index of −k (modulo N).
    #[inline]
    pub fn partner(&self, idx: usize) -> usize {
        let n = self.n;
        let (a, b) = (idx / n, idx % n);
        ((n - a) % n) * n + (n - b) % n
    }

    /// Euclidean |k| at a flat index.
    #[inline]
    pub fn radius(&self, idx: usize) -> f64 {
        let (k1, k2) = self.wavevector(idx);
        ((k1 * k1 + k2 * k2) as f64).sqrt()
    }

    /// Physical coordinates of grid node (i, j).
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 / self.n as f64, j as f64 / self.n as f64)
    }

    pub fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }
}

impl TryFrom<usize> for TorusGrid {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        TorusGrid::new(n)
    }
}

impl From<TorusGrid> for usize {
    fn from(g: TorusGrid) -> usize {
        g.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small() {
        assert!(TorusGrid::new(15).is_err());
        assert!(TorusGrid::new(8).is_err());
        assert!(TorusGrid::new(18).is_ok());
    }

    #[test]
    fn frequency_indexing_roundtrips() {
        let g = TorusGrid::new(16).unwrap();
        for a in 0..16 {
            let k = g.freq(a);
            assert!((-8..8).contains(&k));
            assert_eq!(g.index_of(k), a);
        }
        let idx = g.flat_index(3, -5);
        assert_eq!(g.wavevector(idx), (3, -5));
        assert_eq!(g.wavevector(g.partner(idx)), (-3, 5));
        // Nyquist rows are self-paired modulo N
        let nyq = g.flat_index(-8, 0);
        assert_eq!(g.partner(nyq), nyq);
    }
}
