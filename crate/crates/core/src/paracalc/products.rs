use crate::besov::DyadicPartition;
use crate::error::Result;
use crate::spectral::{dealiased_product, Padded, SpectralField, TorusGrid};

/// Littlewood–Paley blocks of one field, sampled on the 2N product grid.
///
/// Building this once per field lets every paraproduct involving the field
/// reuse the same inverse transforms.
#[derive(Clone, Debug)]
pub struct Blocks {
    grid: TorusGrid,
    is_real: bool,
    j_max: i32,
    /// blocks[j + 1] = Δ_j u on the padded grid
    blocks: Vec<Padded>,
}

impl Blocks {
    pub fn new(part: &DyadicPartition, u: &SpectralField) -> Result<Self> {
        part.grid().check_same(&u.grid())?;
        let m = 2 * part.grid().n();
        let blocks = part
            .blocks()
            .map(|j| Ok(u.weighted(part.symbol(j)?).to_padded(m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: part.grid(), is_real: u.is_real(), j_max: part.j_max(), blocks })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn m(&self) -> usize {
        self.blocks[0].m()
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Δ_j u on the padded grid; zero outside −1..=j_max.
    pub fn block(&self, j: i32) -> Option<&Padded> {
        if j < -1 || j > self.j_max {
            None
        } else {
            Some(&self.blocks[(j + 1) as usize])
        }
    }

    /// Running low-pass sums S_{−1}, S_0, …, S_{j_max}.
    fn cumulative(&self) -> Vec<Padded> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut acc = Padded::zeros(self.m());
        for b in &self.blocks {
            acc.add_assign(b);
            out.push(acc.clone());
        }
        out
    }

    fn check(&self, other: &Blocks) -> Result<()> {
        self.grid.check_same(&other.grid)
    }
}

/// Σ_j (S_{j−2} u)(Δ_j v) accumulated on the padded grid.
fn para_lo_padded(u: &Blocks, v: &Blocks) -> Padded {
    let low = u.cumulative();
    let mut acc = Padded::zeros(u.m());
    for j in 1..=v.j_max {
        // S_{j−2} lives at index (j − 2) + 1
        acc.add_product(&low[(j - 1) as usize], v.block(j).expect("in range"));
    }
    acc
}

fn para_res_padded(u: &Blocks, v: &Blocks) -> Padded {
    let mut acc = Padded::zeros(u.m());
    for j in -1..=u.j_max {
        let bu = u.block(j).expect("in range");
        for i in (j - 1)..=(j + 1) {
            if let Some(bv) = v.block(i) {
                acc.add_product(bu, bv);
            }
        }
    }
    acc
}

/// u≺v from precomputed blocks.
pub fn para_lo_blocks(u: &Blocks, v: &Blocks) -> Result<SpectralField> {
    u.check(v)?;
    Ok(para_lo_padded(u, v).into_field(u.grid, u.is_real && v.is_real))
}

/// u∘v from precomputed blocks.
pub fn para_res_blocks(u: &Blocks, v: &Blocks) -> Result<SpectralField> {
    u.check(v)?;
    Ok(para_res_padded(u, v).into_field(u.grid, u.is_real && v.is_real))
}

/// u≻v from precomputed blocks.
pub fn para_hi_blocks(u: &Blocks, v: &Blocks) -> Result<SpectralField> {
    para_lo_blocks(v, u)
}

/// u≺v + u≻v, i.e. the full product minus the resonant part.
pub fn para_lo_hi_blocks(u: &Blocks, v: &Blocks) -> Result<SpectralField> {
    u.check(v)?;
    let mut acc = para_lo_padded(u, v);
    acc.add_assign(&para_lo_padded(v, u));
    Ok(acc.into_field(u.grid, u.is_real && v.is_real))
}

/// u≺v = Σ_{j≥−1} Σ_{i≤j−2} Δ_i u Δ_j v
pub fn para_lo(part: &DyadicPartition, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.grid().check_same(&v.grid())?;
    para_lo_blocks(&Blocks::new(part, u)?, &Blocks::new(part, v)?)
}

/// u∘v = Σ_{|i−j|≤1} Δ_i u Δ_j v
pub fn para_res(part: &DyadicPartition, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.grid().check_same(&v.grid())?;
    para_res_blocks(&Blocks::new(part, u)?, &Blocks::new(part, v)?)
}

/// u≻v = v≺u
pub fn para_hi(part: &DyadicPartition, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    para_lo(part, v, u)
}

/// The three Bony pieces (u≺v, u∘v, u≻v) sharing one set of block transforms.
pub fn bony(part: &DyadicPartition, u: &SpectralField, v: &SpectralField) -> Result<[SpectralField; 3]> {
    u.grid().check_same(&v.grid())?;
    let bu = Blocks::new(part, u)?;
    let bv = Blocks::new(part, v)?;
    Ok([para_lo_blocks(&bu, &bv)?, para_res_blocks(&bu, &bv)?, para_hi_blocks(&bu, &bv)?])
}

/// C(u, v, h) = (u≺v)∘h − u(v∘h)
pub fn commutator(part: &DyadicPartition, u: &SpectralField, v: &SpectralField, h: &SpectralField) -> Result<SpectralField> {
    u.grid().check_same(&v.grid())?;
    v.grid().check_same(&h.grid())?;
    let bh = Blocks::new(part, h)?;
    let lo = para_lo(part, u, v)?;
    let first = para_res_blocks(&Blocks::new(part, &lo)?, &bh)?;
    let vh = para_res_blocks(&Blocks::new(part, v)?, &bh)?;
    Ok(&first - &dealiased_product(u, &vh)?)
}

/// D(u, v, h) = ⟨u, h∘v⟩ − ⟨u≺v, h⟩ with the L² pairing.
pub fn dform(part: &DyadicPartition, u: &SpectralField, v: &SpectralField, h: &SpectralField) -> Result<f64> {
    u.grid().check_same(&v.grid())?;
    v.grid().check_same(&h.grid())?;
    let hv = para_res(part, h, v)?;
    let lo = para_lo(part, u, v)?;
    Ok(u.inner(&hv) - lo.inner(h))
}

/// Block-pair oracle used in tests: Σ over (i, j) with `keep(i, j)` of Δ_i u Δ_j v,
/// each pair multiplied separately.
#[doc(hidden)]
pub fn block_pair_sum(
    part: &DyadicPartition,
    u: &SpectralField,
    v: &SpectralField,
    keep: impl Fn(i32, i32) -> bool,
) -> Result<SpectralField> {
    let mut out = SpectralField::zeros(u.grid());
    for i in part.blocks() {
        for j in part.blocks() {
            if keep(i, j) {
                let p = dealiased_product(&u.weighted(part.symbol(i)?), &v.weighted(part.symbol(j)?))?;
                out += &p;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::besov::{lp_block, CutoffProfile};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    fn part(n: usize) -> DyadicPartition {
        DyadicPartition::build(TorusGrid::new(n).unwrap(), CutoffProfile::default()).unwrap()
    }

    fn random(g: TorusGrid, seed: u64) -> SpectralField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        crate::spectral::forward_transform(g, &v).unwrap()
    }

    #[test]
    fn constant_v_kills_para_lo() {
        let p = part(32);
        let u = random(p.grid(), 1);
        let v = SpectralField::constant(p.grid(), 2.0);
        assert!(para_lo(&p, &u, &v).unwrap().l2_norm() < 1e-15);
        assert!(para_hi(&p, &v, &u).unwrap().l2_norm() < 1e-15);
    }

    #[test]
    fn constant_u_keeps_high_blocks_of_v() {
        let p = part(32);
        let v = random(p.grid(), 2);
        let c = SpectralField::constant(p.grid(), 1.5);
        let expect = &(&v - &lp_block(&p, -1, &v).unwrap()) - &lp_block(&p, 0, &v).unwrap();
        let expect = expect.scale(1.5);
        assert!(para_lo(&p, &c, &v).unwrap().max_coeff_diff(&expect) < 1e-14);
        assert!(para_hi(&p, &v, &c).unwrap().max_coeff_diff(&expect) < 1e-14);
    }

    #[test]
    fn resonant_of_constants() {
        let p = part(16);
        let a = SpectralField::constant(p.grid(), 2.0);
        let b = SpectralField::constant(p.grid(), -3.0);
        assert!((para_res(&p, &a, &b).unwrap().mean() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn separated_modes_are_not_resonant() {
        let p = part(128);
        let u = SpectralField::mode(p.grid(), 32, 0, Complex64::new(1.0, 0.0));
        let v = SpectralField::mode(p.grid(), 0, 4, Complex64::new(1.0, 0.0));
        assert!(para_res(&p, &u, &v).unwrap().l2_norm() < 1e-15);
    }

    #[test]
    fn pieces_match_block_pair_oracle() {
        let p = part(16);
        let u = random(p.grid(), 3);
        let v = random(p.grid(), 4);
        let [lo, res, hi] = bony(&p, &u, &v).unwrap();
        let lo_o = block_pair_sum(&p, &u, &v, |i, j| i <= j - 2).unwrap();
        let res_o = block_pair_sum(&p, &u, &v, |i, j| (i - j).abs() <= 1).unwrap();
        let hi_o = block_pair_sum(&p, &u, &v, |i, j| j <= i - 2).unwrap();
        assert!(lo.max_coeff_diff(&lo_o) < 1e-14);
        assert!(res.max_coeff_diff(&res_o) < 1e-14);
        assert!(hi.max_coeff_diff(&hi_o) < 1e-14);
    }

    #[test]
    fn commutator_and_dform_vanish_at_zero() {
        let p = part(16);
        let z = SpectralField::zeros(p.grid());
        let v = random(p.grid(), 5);
        let h = random(p.grid(), 6);
        assert_eq!(commutator(&p, &z, &v, &h).unwrap().l2_norm(), 0.0);
        assert_eq!(dform(&p, &z, &v, &h).unwrap(), 0.0);
    }

    #[test]
    fn commutator_with_constant_u_matches_block_oracle() {
        let p = part(16);
        let c = SpectralField::constant(p.grid(), 0.7);
        let v = random(p.grid(), 7);
        let h = random(p.grid(), 8);
        // (c≺v)∘h − c(v∘h) by explicit block pairs
        let lo = block_pair_sum(&p, &c, &v, |i, j| i <= j - 2).unwrap();
        let first = block_pair_sum(&p, &lo, &h, |i, j| (i - j).abs() <= 1).unwrap();
        let vh = block_pair_sum(&p, &v, &h, |i, j| (i - j).abs() <= 1).unwrap();
        let expect = &first - &vh.scale(0.7);
        assert!(commutator(&p, &c, &v, &h).unwrap().max_coeff_diff(&expect) < 1e-14);
    }

    #[test]
    fn dform_with_constant_v_matches_direct_sum() {
        let p = part(16);
        let u = random(p.grid(), 9);
        let v = SpectralField::constant(p.grid(), 1.3);
        let h = random(p.grid(), 10);
        // u≺c = 0; h∘c = c(Δ_{−1}h + Δ_0 h)
        let low_h = &lp_block(&p, -1, &h).unwrap() + &lp_block(&p, 0, &h).unwrap();
        let expect: f64 = u.coeffs().iter().zip(low_h.coeffs()).map(|(a, b)| (a * b.conj()).re * 1.3).sum();
        assert!((dform(&p, &u, &v, &h).unwrap() - expect).abs() < 1e-14);
    }
}
