use crate::besov::{localize, tau, DyadicPartition};
use crate::error::Result;
use crate::noise::EnhancedNoise;
use crate::paracalc::{para_lo_blocks, para_lo_hi_blocks, para_res_blocks, Blocks, HistoryRing, ModifiedPara, TimeKernel};
use crate::spectral::{dealiased_polynomial, dealiased_product, SpectralField};

/// Localised noise pieces for one (L, K).
#[derive(Clone, Debug)]
struct LocCache {
    l: f64,
    k: f64,
    /// U_> ξ + U_>(ϑ⋄ξ)
    high: Blocks,
    /// U_≤ ξ + U_≤(ϑ⋄ξ)
    low: Blocks,
}

/// The paracontrolled pieces of the split system for one enhanced noise.
///
/// Sign convention: Φ carries +(ψ+φ)≺U_>(ϑ⋄ξ) and Ψ carries
/// +(ψ+φ)≺U_≤(ϑ⋄ξ) together with ψ∘ξ, so that Φ + Ψ + f(ψ) equals
/// f(ψ+φ) + (ψ+φ)⋄ξ term by term.
#[derive(Clone, Debug)]
pub struct SplitOps {
    part: DyadicPartition,
    xi: SpectralField,
    area: SpectralField,
    b_xi: Blocks,
    b_theta: Blocks,
    b_area: Blocks,
    /// ϑ∘ξ
    theta_res_xi: SpectralField,
    mpara: ModifiedPara,
    ansatz_gamma: f64,
    loc_gamma: f64,
    loc: Option<LocCache>,
}

/// Pieces produced by one assembly.
#[derive(Clone, Debug)]
pub struct SplitTerms {
    pub phi_forcing: SpectralField,
    pub psi_forcing: SpectralField,
}

impl SplitOps {
    pub fn new(part: &DyadicPartition, noise: &EnhancedNoise, kernel: TimeKernel, ansatz_gamma: f64, loc_gamma: f64) -> Result<Self> {
        let b_xi = Blocks::new(part, &noise.xi_eps)?;
        let b_theta = Blocks::new(part, &noise.theta_eps)?;
        let theta_res_xi = para_res_blocks(&b_theta, &b_xi)?;
        Ok(Self {
            part: part.clone(),
            xi: noise.xi_eps.clone(),
            area: noise.area.clone(),
            b_xi,
            b_theta,
            b_area: Blocks::new(part, &noise.area)?,
            theta_res_xi,
            mpara: ModifiedPara::new(part, kernel),
            ansatz_gamma,
            loc_gamma,
            loc: None,
        })
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.part
    }

    pub fn ansatz_gamma(&self) -> f64 {
        self.ansatz_gamma
    }

    /// u≺≺ϑ in the weighted sense τ(t)^{−γ}[(τ^γ u)≺≺ϑ](t); `hist` holds
    /// the snapshots τ(s)^γ u(s).
    pub fn modified(&self, hist: &HistoryRing, t: f64) -> Result<SpectralField> {
        let w = tau(t).powf(self.ansatz_gamma);
        if w == 0.0 {
            return Ok(SpectralField::zeros(self.part.grid()));
        }
        Ok(self.mpara.apply(hist, &self.b_theta, t)?.scale(1.0 / w))
    }

    /// φ^♯ = φ − τ^{−γ}[τ^γ(ψ+φ)≺≺ϑ]
    pub fn phi_sharp(&self, phi: &SpectralField, u_mod: &SpectralField) -> SpectralField {
        phi - u_mod
    }

    fn ensure_loc(&mut self, l: f64, k: f64) -> Result<&LocCache> {
        let stale = !matches!(&self.loc, Some(c) if c.l == l && c.k == k);
        if stale {
            let (xi_lo, xi_hi) = localize(&self.part, &self.xi, l, self.loc_gamma)?;
            let (a_lo, a_hi) = localize(&self.part, &self.area, k, self.loc_gamma)?;
            let high = Blocks::new(&self.part, &(&xi_hi + &a_hi))?;
            let low = Blocks::new(&self.part, &(&xi_lo + &a_lo))?;
            self.loc = Some(LocCache { l, k, high, low });
        }
        Ok(self.loc.as_ref().expect("just filled"))
    }

    /// (U_≤ξ, U_>ξ, U_≤(ϑ⋄ξ), U_>(ϑ⋄ξ)) at parameters (L, K).
    pub fn localized_noise(&self, l: f64, k: f64) -> Result<[SpectralField; 4]> {
        let (xi_lo, xi_hi) = localize(&self.part, &self.xi, l, self.loc_gamma)?;
        let (a_lo, a_hi) = localize(&self.part, &self.area, k, self.loc_gamma)?;
        Ok([xi_lo, xi_hi, a_lo, a_hi])
    }

    /// Φ = u≺U_>ξ + u≻U_>ξ + u≻U_>(ϑ⋄ξ) + u≺U_>(ϑ⋄ξ), u = ψ + φ.
    pub fn assemble_phi(&mut self, u: &SpectralField, l: f64, k: f64) -> Result<SpectralField> {
        let bu = Blocks::new(&self.part, u)?;
        let loc = self.ensure_loc(l, k)?;
        para_lo_hi_blocks(&bu, &loc.high)
    }

    /// Resonant and commutator part shared by Ψ and the Wick product:
    /// (u≺≺ϑ − u≺ϑ)∘ξ + C(u, ϑ, ξ) + (ϑ⋄ξ)∘u + extra∘ξ.
    ///
    /// All the ∘ξ terms are bilinear in their first slot, so their first
    /// arguments are summed before one resonant product; with
    /// C(u,ϑ,ξ) = (u≺ϑ)∘ξ − u(ϑ∘ξ) the u≺ϑ pieces cancel inside that sum.
    fn controlled_terms(&self, u: &SpectralField, bu: &Blocks, u_mod: &SpectralField, extra: &SpectralField) -> Result<SpectralField> {
        let lo_theta = para_lo_blocks(bu, &self.b_theta)?;
        let mut first = u_mod - &lo_theta;
        first += &lo_theta;
        first += extra;
        let mut out = para_res_blocks(&Blocks::new(&self.part, &first)?, &self.b_xi)?;
        out -= &dealiased_product(u, &self.theta_res_xi)?;
        out += &para_res_blocks(bu, &self.b_area)?;
        Ok(out)
    }

    /// Ψ = f(ψ+φ) − f(ψ) + (u≺≺ϑ − u≺ϑ)∘ξ + φ^♯∘ξ + ψ∘ξ + C(u,ϑ,ξ) + (ϑ⋄ξ)∘u
    ///     + u≺U_≤ξ + u≻U_≤ξ + u≻U_≤(ϑ⋄ξ) + u≺U_≤(ϑ⋄ξ).
    #[allow(clippy::too_many_arguments)]
    pub fn assemble_psi(
        &mut self,
        f_coeffs: &[f64],
        phi: &SpectralField,
        psi: &SpectralField,
        phi_sharp: &SpectralField,
        u_mod: &SpectralField,
        l: f64,
        k: f64,
    ) -> Result<SpectralField> {
        let u = phi + psi;
        let bu = Blocks::new(&self.part, &u)?;
        self.psi_with_blocks(f_coeffs, &u, &bu, psi, phi_sharp, u_mod, l, k)
    }

    #[allow(clippy::too_many_arguments)]
    fn psi_with_blocks(
        &mut self,
        f_coeffs: &[f64],
        u: &SpectralField,
        bu: &Blocks,
        psi: &SpectralField,
        phi_sharp: &SpectralField,
        u_mod: &SpectralField,
        l: f64,
        k: f64,
    ) -> Result<SpectralField> {
        let mut out = dealiased_polynomial(u, f_coeffs);
        out -= &dealiased_polynomial(psi, f_coeffs);
        // φ^♯∘ξ + ψ∘ξ
        let extra = phi_sharp + psi;
        out += &self.controlled_terms(u, bu, u_mod, &extra)?;
        let loc = self.ensure_loc(l, k)?;
        out += &para_lo_hi_blocks(bu, &loc.low)?;
        Ok(out)
    }

    /// Φ and Ψ sharing the blocks of u.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        &mut self,
        f_coeffs: &[f64],
        phi: &SpectralField,
        psi: &SpectralField,
        phi_sharp: &SpectralField,
        u_mod: &SpectralField,
        l: f64,
        k: f64,
    ) -> Result<SplitTerms> {
        let u = phi + psi;
        let bu = Blocks::new(&self.part, &u)?;
        let psi_forcing = self.psi_with_blocks(f_coeffs, &u, &bu, psi, phi_sharp, u_mod, l, k)?;
        let loc = self.ensure_loc(l, k)?;
        let phi_forcing = para_lo_hi_blocks(&bu, &loc.high)?;
        Ok(SplitTerms { phi_forcing, psi_forcing })
    }

    /// u⋄ξ = u≺ξ + u≻ξ + (u≺≺ϑ − u≺ϑ)∘ξ + C(u,ϑ,ξ) + u(ϑ⋄ξ) + u^♯∘ξ,
    /// with u^♯ = u − u≺≺ϑ supplied by the caller.
    pub fn assemble_wick(&self, u: &SpectralField, u_sharp: &SpectralField, u_mod: &SpectralField) -> Result<SpectralField> {
        let bu = Blocks::new(&self.part, u)?;
        let mut out = para_lo_hi_blocks(&bu, &self.b_xi)?;
        out += &self.controlled_terms(u, &bu, u_mod, u_sharp)?;
        // u(ϑ⋄ξ) minus its resonant part, which controlled_terms already holds
        out += &para_lo_hi_blocks(&bu, &self.b_area)?;
        Ok(out)
    }
}
