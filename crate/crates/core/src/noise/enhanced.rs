//! The renormalised noise pair and its on-disk layout.
//!
//! Binary layout (little endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 8 | magic `PAMEN001` |
//! | 4 | N (u32) |
//! | 8 | seed (u64) |
//! | 8 × 2 | ε, μ (f64) |
//! | 1 + 8 | mollifier id (1 = Gaussian, 2 = bump) and its parameter |
//! | 1 | symbol convention (0 = paper, 1 = exact) |
//! | 1 | renormalisation scope (0 = infinite, 1 = lattice) |
//! | 1 | renormalised flag |
//! | 8 × 4 | C_ε used, infinite-lattice C_ε, lattice C_ε, tail bound |
//! | 3 × N² × 16 | ξ_ε, ϑ_ε, area coefficients as (re, im) pairs in FFT order |

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mollifier::{mollify, Mollifier};
use super::renorm::{lattice_renorm_constant, renorm_constant, RenormScope};
use super::white::WhiteNoise;
use crate::besov::DyadicPartition;
use crate::error::{Error, Result};
use crate::paracalc::para_res;
use crate::spectral::{Multiplier, SpectralField, SymbolConvention, TorusGrid};

pub const MAGIC: &[u8; 8] = b"PAMEN001";

/// Parameters of the enhancement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseOptions {
    pub eps: f64,
    pub mu: f64,
    pub mollifier: Mollifier,
    pub convention: SymbolConvention,
    pub scope: RenormScope,
    /// Subtract C_ε; switching this off gives the unrenormalised product.
    pub renormalize: bool,
    pub rel_tol: f64,
}

impl Default for NoiseOptions {
    fn default() -> Self {
        Self {
            eps: 0.1,
            mu: 1.0,
            mollifier: Mollifier::default(),
            convention: SymbolConvention::Paper,
            scope: RenormScope::Infinite,
            renormalize: true,
            rel_tol: 1e-8,
        }
    }
}

/// (ξ_ε, ϑ_ε, ϑ_ε∘ξ_ε − C_ε) for one seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnhancedNoise {
    pub seed: u64,
    pub grid: TorusGrid,
    pub options: NoiseOptions,
    pub xi_eps: SpectralField,
    pub theta_eps: SpectralField,
    pub area: SpectralField,
    /// the constant actually subtracted (0 when not renormalising)
    pub c_eps: f64,
    pub c_infinite: f64,
    pub c_lattice: f64,
    pub c_tail_bound: f64,
}

impl EnhancedNoise {
    /// Noise-free input: every field zero and no renormalisation.
    pub fn zero(grid: TorusGrid, mu: f64, convention: SymbolConvention) -> Self {
        let z = SpectralField::zeros(grid);
        Self {
            seed: 0,
            grid,
            options: NoiseOptions { mu, convention, renormalize: false, ..NoiseOptions::default() },
            xi_eps: z.clone(),
            theta_eps: z.clone(),
            area: z,
            c_eps: 0.0,
            c_infinite: 0.0,
            c_lattice: 0.0,
            c_tail_bound: 0.0,
        }
    }

    pub fn eps(&self) -> f64 {
        self.options.eps
    }

    pub fn mu(&self) -> f64 {
        self.options.mu
    }

    /// ϑ_ε∘ξ_ε, recovered from the stored area.
    pub fn resonant(&self) -> SpectralField {
        let mut r = self.area.clone();
        r += &SpectralField::constant(self.grid, self.c_eps);
        r
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let o = &self.options;
        w.write_all(MAGIC)?;
        w.write_all(&(self.grid.n() as u32).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for x in [o.eps, o.mu] {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(&[o.mollifier.id()])?;
        w.write_all(&o.mollifier.parameter().to_le_bytes())?;
        let conv = match o.convention {
            SymbolConvention::Paper => 0u8,
            SymbolConvention::Exact => 1u8,
        };
        w.write_all(&[conv, o.scope.id(), o.renormalize as u8])?;
        for x in [self.c_eps, self.c_infinite, self.c_lattice, self.c_tail_bound] {
            w.write_all(&x.to_le_bytes())?;
        }
        for f in [&self.xi_eps, &self.theta_eps, &self.area] {
            for c in f.coeffs() {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not an enhanced-noise file".into()));
        }
        fn u32_(r: &mut impl Read) -> Result<u32> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            Ok(u32::from_le_bytes(b))
        }
        fn u64_(r: &mut impl Read) -> Result<u64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(u64::from_le_bytes(b))
        }
        fn f64_(r: &mut impl Read) -> Result<f64> {
            Ok(f64::from_bits(u64_(r)?))
        }
        fn u8_(r: &mut impl Read) -> Result<u8> {
            let mut b = [0u8; 1];
            r.read_exact(&mut b)?;
            Ok(b[0])
        }
        let grid = TorusGrid::new(u32_(&mut r)? as usize)?;
        let seed = u64_(&mut r)?;
        let eps = f64_(&mut r)?;
        let mu = f64_(&mut r)?;
        let mid = u8_(&mut r)?;
        let mollifier = Mollifier::from_id(mid, f64_(&mut r)?)?;
        let convention = match u8_(&mut r)? {
            0 => SymbolConvention::Paper,
            1 => SymbolConvention::Exact,
            x => return Err(Error::Format(format!("unknown convention {x}"))),
        };
        let scope = RenormScope::from_id(u8_(&mut r)?)?;
        let renormalize = u8_(&mut r)? != 0;
        let c_eps = f64_(&mut r)?;
        let c_infinite = f64_(&mut r)?;
        let c_lattice = f64_(&mut r)?;
        let c_tail_bound = f64_(&mut r)?;
        let mut field = || -> Result<SpectralField> {
            let mut coeffs = Vec::with_capacity(grid.len());
            for _ in 0..grid.len() {
                let re = f64_(&mut r)?;
                let im = f64_(&mut r)?;
                coeffs.push(Complex64::new(re, im));
            }
            // stored fields are already Hermitian; keep them bit-exact
            Ok(SpectralField::from_parts(grid, coeffs, true))
        };
        let xi_eps = field()?;
        let theta_eps = field()?;
        let area = field()?;
        Ok(Self {
            seed,
            grid,
            options: NoiseOptions { eps, mu, mollifier, convention, scope, renormalize, rel_tol: NoiseOptions::default().rel_tol },
            xi_eps,
            theta_eps,
            area,
            c_eps,
            c_infinite,
            c_lattice,
            c_tail_bound,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Assemble ξ_ε, ϑ_ε = (−Δ+μ)⁻¹ξ_ε and the area ϑ_ε∘ξ_ε − C_ε.
pub fn make_enhanced(part: &DyadicPartition, xi: &WhiteNoise, opts: NoiseOptions) -> Result<EnhancedNoise> {
    part.grid().check_same(&xi.grid)?;
    let xi_eps = mollify(&xi.xi, opts.eps, opts.mollifier)?;
    let theta_eps = Multiplier::resolvent(xi.grid, opts.convention, opts.mu)?.apply(&xi_eps)?;
    let infinite = renorm_constant(opts.eps, opts.mu, opts.mollifier, opts.convention, opts.rel_tol)?;
    let c_lattice = lattice_renorm_constant(xi.grid, opts.eps, opts.mu, opts.mollifier, opts.convention)?;
    let c_eps = match (opts.renormalize, opts.scope) {
        (false, _) => 0.0,
        (true, RenormScope::Infinite) => infinite.value,
        (true, RenormScope::Lattice) => c_lattice,
    };
    let mut area = para_res(part, &theta_eps, &xi_eps)?;
    area -= &SpectralField::constant(xi.grid, c_eps);
    Ok(EnhancedNoise {
        seed: xi.seed,
        grid: xi.grid,
        options: opts,
        xi_eps,
        theta_eps,
        area,
        c_eps,
        c_infinite: infinite.value,
        c_lattice,
        c_tail_bound: infinite.tail_bound,
    })
}
