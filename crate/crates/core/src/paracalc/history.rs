use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::products::Blocks;
use crate::besov::{CutoffProfile, DyadicPartition};
use crate::error::{Error, Result};
use crate::spectral::{Padded, SpectralField};

/// Equally spaced snapshots s ↦ η(s)u(s) used by the time mollifiers Q_i.
///
/// Snapshot n sits at time n·dt_hist. The s = 0 snapshot is kept for the
/// whole run because every negative time clamps to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRing {
    dt_hist: f64,
    capacity: usize,
    origin: SpectralField,
    /// index of the first entry in `entries`
    first: u64,
    entries: VecDeque<SpectralField>,
}

impl HistoryRing {
    /// Start a ring with the snapshot at s = 0.
    pub fn new(dt_hist: f64, capacity: usize, origin: SpectralField) -> Result<Self> {
        if !(dt_hist > 0.0 && dt_hist.is_finite()) {
            return Err(Error::InvalidParameter { name: "dt_hist", value: dt_hist, reason: "must be positive".into() });
        }
        if capacity < 2 {
            return Err(Error::InvalidParameter {
                name: "capacity",
                value: capacity as f64,
                reason: "need room for at least two snapshots".into(),
            });
        }
        let mut entries = VecDeque::with_capacity(capacity);
        entries.push_back(origin.clone());
        Ok(Self { dt_hist, capacity, origin, first: 0, entries })
    }

    /// Capacity needed to keep a window of `span` time units.
    pub fn capacity_for(span: f64, dt_hist: f64) -> usize {
        (span / dt_hist).ceil() as usize + 2
    }

    pub fn dt_hist(&self) -> f64 {
        self.dt_hist
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn last_index(&self) -> u64 {
        self.first + self.entries.len() as u64 - 1
    }

    pub fn time_of(&self, index: u64) -> f64 {
        index as f64 * self.dt_hist
    }

    pub fn earliest_time(&self) -> f64 {
        self.time_of(self.first)
    }

    pub fn latest_time(&self) -> f64 {
        self.time_of(self.last_index())
    }

    pub fn origin(&self) -> &SpectralField {
        &self.origin
    }

    /// Snapshot times currently stored.
    pub fn times(&self) -> Vec<f64> {
        (self.first..=self.last_index()).map(|i| self.time_of(i)).collect()
    }

    fn index_of_time(&self, t: f64) -> Option<u64> {
        let x = t / self.dt_hist;
        let n = x.round();
        if n >= 0.0 && (x - n).abs() <= 1e-6 {
            Some(n as u64)
        } else {
            None
        }
    }

    /// Append the snapshot for time `t`, which must be exactly one spacing
    /// after the newest entry.
    pub fn push(&mut self, t: f64, snapshot: SpectralField) -> Result<()> {
        self.origin.grid().check_same(&snapshot.grid())?;
        let expect = self.last_index() + 1;
        if self.index_of_time(t) != Some(expect) {
            return Err(Error::NonMonotoneTimes { index: expect as usize, value: t });
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
            self.first += 1;
        }
        self.entries.push_back(snapshot);
        Ok(())
    }

    /// Snapshot by index, with negative indices clamped to the origin.
    fn get(&self, index: i64) -> Option<&SpectralField> {
        if index <= 0 {
            return Some(&self.origin);
        }
        let index = index as u64;
        if index < self.first || index > self.last_index() {
            None
        } else {
            Some(&self.entries[(index - self.first) as usize])
        }
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&SpectralField> {
        self.index_of_time(t).and_then(|i| self.get(i as i64))
    }
}

/// Time mollifier of the operators Q_i.
///
/// The kernel is the dyadic cut-off rescaled to support [−1, 1],
/// k(r) = φ(2|r|), normalised to unit mass on the discrete history. With
/// `causal` set only s ≤ t enters, which is what a forward solver can offer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeKernel {
    pub profile: CutoffProfile,
    pub causal: bool,
}

impl Default for TimeKernel {
    fn default() -> Self {
        Self { profile: CutoffProfile::default(), causal: true }
    }
}

impl TimeKernel {
    pub fn eval(&self, r: f64) -> f64 {
        if self.causal && r < 0.0 {
            return 0.0;
        }
        self.profile.eval(2.0 * r)
    }

    /// Window 2^{−2i} of block i.
    pub fn window(i: i32) -> f64 {
        4f64.powi(-i)
    }

    /// Normalised quadrature weights (m, w_m) for offsets s = t − m·dt_hist.
    pub fn weights(&self, i: i32, dt_hist: f64) -> Vec<(i64, f64)> {
        let win = Self::window(i);
        let reach = (win / dt_hist).floor() as i64;
        if reach == 0 {
            // narrower than one history step: nearest snapshot
            return vec![(0, 1.0)];
        }
        let lo = if self.causal { 0 } else { -reach };
        let mut w: Vec<(i64, f64)> = (lo..=reach)
            .map(|m| {
                let mut x = self.eval(m as f64 * dt_hist / win);
                if m == lo || m == reach {
                    x *= 0.5;
                }
                (m, x)
            })
            .filter(|(_, x)| *x > 0.0)
            .collect();
        let total: f64 = w.iter().map(|p| p.1).sum();
        w.iter_mut().for_each(|p| p.1 /= total);
        w
    }

    pub fn label(&self) -> &'static str {
        if self.causal {
            "causal"
        } else {
            "two_sided"
        }
    }
}

fn required_span(hist: &HistoryRing, weights: &[(i64, f64)], n: i64) -> Result<()> {
    for &(m, _) in weights {
        if hist.get(n - m).is_none() {
            let (mmin, mmax) = (weights[0].0, weights[weights.len() - 1].0);
            return Err(Error::InsufficientHistory {
                need_from: hist.time_of((n - mmax).max(0) as u64),
                need_to: hist.time_of((n - mmin).max(0) as u64),
                have_from: hist.earliest_time(),
                have_to: hist.latest_time(),
            });
        }
    }
    Ok(())
}

fn time_index(hist: &HistoryRing, t: f64) -> Result<i64> {
    hist.index_of_time(t).map(|n| n as i64).ok_or(Error::InsufficientHistory {
        need_from: t,
        need_to: t,
        have_from: hist.earliest_time(),
        have_to: hist.latest_time(),
    })
}

/// Q_i h(t) on the lattice points listed in `support` (all points if `None`).
fn mollify_on(hist: &HistoryRing, kernel: &TimeKernel, i: i32, t: f64, support: Option<&[usize]>) -> Result<SpectralField> {
    let n = time_index(hist, t)?;
    let weights = kernel.weights(i, hist.dt_hist);
    required_span(hist, &weights, n)?;
    let grid = hist.origin.grid();
    let mut out = SpectralField::zeros(grid);
    let coeffs = out.coeffs_mut();
    for &(m, w) in &weights {
        let snap = hist.get(n - m).expect("span checked").coeffs();
        match support {
            Some(idx) => idx.iter().for_each(|&k| coeffs[k] += snap[k] * w),
            None => coeffs.iter_mut().zip(snap).for_each(|(c, s)| *c += s * w),
        }
    }
    Ok(out)
}

/// Q_i h(t) = ∫ 2^{2i} k(2^{2i}(t − s)) h(s ∨ 0) ds by normalised trapezoid
/// quadrature over the stored snapshots. `t` must be a snapshot time.
pub fn q_i(hist: &HistoryRing, kernel: &TimeKernel, i: i32, t: f64) -> Result<SpectralField> {
    mollify_on(hist, kernel, i, t, None)
}

/// Reusable plan for u≺≺v on a fixed partition.
#[derive(Clone, Debug)]
pub struct ModifiedPara {
    kernel: TimeKernel,
    /// For block i ≥ 0: lattice support and values of the S_{i−1} symbol.
    lows: Vec<(Vec<usize>, Vec<f64>)>,
}

impl ModifiedPara {
    pub fn new(part: &DyadicPartition, kernel: TimeKernel) -> Self {
        let lows = (0..=part.j_max())
            .map(|i| {
                let sym = part.low_pass_symbol(i - 1);
                let idx: Vec<usize> = (0..sym.len()).filter(|&k| sym[k] != 0.0).collect();
                let vals = idx.iter().map(|&k| sym[k]).collect();
                (idx, vals)
            })
            .collect();
        Self { kernel, lows }
    }

    pub fn kernel(&self) -> TimeKernel {
        self.kernel
    }

    /// Σ_{i≥0} (S_{i−1} Q_i h)(t) · Δ_i v, with v given by its blocks. The
    /// i = −1 term is absent because S_{−2} = 0.
    pub fn apply(&self, hist: &HistoryRing, v: &Blocks, t: f64) -> Result<SpectralField> {
        hist.origin.grid().check_same(&v.grid())?;
        let grid = v.grid();
        let mut acc = Padded::zeros(v.m());
        for (i, (idx, vals)) in (0..).zip(&self.lows) {
            let q = mollify_on(hist, &self.kernel, i, t, Some(idx))?;
            let mut low = SpectralField::zeros(grid);
            {
                let dst = low.coeffs_mut();
                for (&k, &s) in idx.iter().zip(vals) {
                    dst[k] = q.coeffs()[k] * s;
                }
            }
            acc.add_product(&low.to_padded(v.m()), v.block(i).expect("block in range"));
        }
        Ok(acc.into_field(grid, hist.origin.is_real()))
    }
}

/// u≺≺v at time t, where `hist` holds the η-weighted history of u.
pub fn modified_para(
    part: &DyadicPartition,
    hist: &HistoryRing,
    v: &SpectralField,
    t: f64,
    kernel: TimeKernel,
) -> Result<SpectralField> {
    ModifiedPara::new(part, kernel).apply(hist, &Blocks::new(part, v)?, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paracalc::block_pair_sum;
    use crate::spectral::TorusGrid;
    use rand::{Rng, SeedableRng};

    fn part(n: usize) -> DyadicPartition {
        DyadicPartition::build(TorusGrid::new(n).unwrap(), CutoffProfile::default()).unwrap()
    }

    fn random(g: TorusGrid, seed: u64) -> SpectralField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        crate::spectral::forward_transform(g, &v).unwrap()
    }

    fn constant_history(u: &SpectralField, dt: f64, steps: usize) -> HistoryRing {
        let mut h = HistoryRing::new(dt, steps + 2, u.clone()).unwrap();
        for n in 1..=steps {
            h.push(n as f64 * dt, u.clone()).unwrap();
        }
        h
    }

    #[test]
    fn ring_evicts_but_keeps_origin() {
        let g = TorusGrid::new(16).unwrap();
        let mut h = HistoryRing::new(0.1, 3, SpectralField::constant(g, 1.0)).unwrap();
        for n in 1..=5 {
            h.push(n as f64 * 0.1, SpectralField::constant(g, n as f64)).unwrap();
        }
        assert_eq!(h.len(), 3);
        assert!((h.earliest_time() - 0.3).abs() < 1e-12);
        assert_eq!(h.origin().mean(), 1.0);
        assert!(h.push(0.75, SpectralField::zeros(g)).is_err());
        assert_eq!(h.snapshot_at(0.4).unwrap().mean(), 4.0);
        assert!(h.snapshot_at(0.1).is_none());
    }

    #[test]
    fn weights_have_unit_mass() {
        let k = TimeKernel::default();
        for i in 0..6 {
            let w = k.weights(i, 1e-3);
            let s: f64 = w.iter().map(|p| p.1).sum();
            assert!((s - 1.0).abs() < 1e-14);
            assert!(w.iter().all(|p| p.0 >= 0));
        }
        assert_eq!(k.weights(8, 1e-3), vec![(0, 1.0)]);
    }

    #[test]
    fn time_constant_history_matches_shifted_block_sum() {
        let p = part(16);
        let u = random(p.grid(), 1);
        let v = random(p.grid(), 2);
        let h = constant_history(&u, 0.01, 110);
        let got = modified_para(&p, &h, &v, 1.1, TimeKernel::default()).unwrap();
        let expect = block_pair_sum(&p, &u, &v, |a, b| a <= b - 1).unwrap();
        assert!(got.max_coeff_diff(&expect) < 1e-13);
    }

    #[test]
    fn constant_v_gives_zero() {
        let p = part(16);
        let u = random(p.grid(), 3);
        let h = constant_history(&u, 0.1, 12);
        let v = SpectralField::constant(p.grid(), 4.0);
        let got = modified_para(&p, &h, &v, 1.2, TimeKernel::default()).unwrap();
        assert!(got.l2_norm() < 1e-14);
    }

    #[test]
    fn linear_in_time_history_matches_closed_form() {
        // u(s) = s·w: Q_i u(t) = (t − 2^{−2i}·m₁/m₀) w, where m₀, m₁ are the
        // zeroth and first moments of the kernel on [0, 1]
        let g = TorusGrid::new(16).unwrap();
        let w = random(g, 4);
        let dt = 1e-5;
        let steps = 100_000;
        let mut h = HistoryRing::new(dt, 200, SpectralField::zeros(g)).unwrap();
        for n in 1..=steps {
            h.push(n as f64 * dt, w.scale(n as f64 * dt)).unwrap();
        }
        let kernel = TimeKernel::default();
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let n = 200_000;
            let hh = 1.0 / n as f64;
            let mut s = f(0.0) + f(1.0);
            for k in 1..n {
                s += f(k as f64 * hh) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * hh / 3.0
        };
        let m0 = simpson(&|x| kernel.profile.eval(2.0 * x));
        let m1 = simpson(&|x| x * kernel.profile.eval(2.0 * x));
        let t = 1.0;
        let q = q_i(&h, &kernel, 5, t).unwrap();
        let expect = w.scale(t - TimeKernel::window(5) * m1 / m0);
        assert!(q.max_coeff_diff(&expect) < 1e-8 * w.l2_norm());
    }

    #[test]
    fn missing_history_is_reported() {
        let g = TorusGrid::new(16).unwrap();
        let mut h = HistoryRing::new(0.1, 3, SpectralField::zeros(g)).unwrap();
        for n in 1..=10 {
            h.push(n as f64 * 0.1, SpectralField::zeros(g)).unwrap();
        }
        assert!(matches!(q_i(&h, &TimeKernel::default(), 0, 1.0), Err(Error::InsufficientHistory { .. })));
        assert!(q_i(&h, &TimeKernel::default(), 3, 1.0).is_ok());
    }
}
