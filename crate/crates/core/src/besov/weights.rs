use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::norms::{besov_norm_with, lp_norm, Integrability};
use super::partition::DyadicPartition;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// τ(t) = 1 − e^{−t}
pub fn tau(t: f64) -> f64 {
    -(-t).exp_m1()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// τ^e
    TauPower { exponent: f64 },
    /// ρ = τ^{1 + 1/(k−2) + (3α−2)/2}
    RhoPaper { k: u32, alpha: f64 },
}

/// Time weight η(t) = base(t)^{1+θ}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeWeight {
    pub kind: WeightKind,
    pub extra_power: f64,
}

impl TimeWeight {
    pub fn unit() -> Self {
        Self::tau_power(0.0)
    }

    pub fn tau() -> Self {
        Self::tau_power(1.0)
    }

    pub fn tau_power(exponent: f64) -> Self {
        Self { kind: WeightKind::TauPower { exponent }, extra_power: 0.0 }
    }

    pub fn rho_paper(k: u32, alpha: f64) -> Self {
        Self { kind: WeightKind::RhoPaper { k, alpha }, extra_power: 0.0 }
    }

    pub fn with_extra_power(mut self, theta: f64) -> Self {
        self.extra_power = theta;
        self
    }

    /// Total exponent of τ.
    pub fn exponent(&self) -> f64 {
        let base = match self.kind {
            WeightKind::TauPower { exponent } => exponent,
            WeightKind::RhoPaper { k, alpha } => 1.0 + 1.0 / (k as f64 - 2.0) + (3.0 * alpha - 2.0) / 2.0,
        };
        base * (1.0 + self.extra_power)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let e = self.exponent();
        if e == 0.0 {
            1.0
        } else {
            tau(t).powf(e)
        }
    }

    pub fn label(&self) -> String {
        format!("tau^{:.6}", self.exponent())
    }
}

/// Which norm a series measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub alpha: f64,
    pub p: Integrability,
    pub q: Integrability,
    /// Plain L^p instead of a Besov norm (α ignored).
    pub plain: bool,
}

impl NormSpec {
    pub fn holder(alpha: f64) -> Self {
        Self { alpha, p: Integrability::Infinity, q: Integrability::Infinity, plain: false }
    }
    pub fn sobolev(alpha: f64) -> Self {
        Self { alpha, p: Integrability::Two, q: Integrability::Two, plain: false }
    }
    pub fn linf() -> Self {
        Self { alpha: 0.0, p: Integrability::Infinity, q: Integrability::Infinity, plain: true }
    }
    pub fn l2() -> Self {
        Self { alpha: 0.0, p: Integrability::Two, q: Integrability::Two, plain: true }
    }

    pub fn eval(&self, part: &DyadicPartition, f: &SpectralField) -> Result<f64> {
        if self.plain {
            Ok(lp_norm(f, self.p))
        } else {
            besov_norm_with(part, f, self.alpha, self.p, self.q)
        }
    }
}

/// One named series inside a [`NormReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub name: String,
    pub norm: Option<NormSpec>,
    pub weight: Option<TimeWeight>,
    pub values: Vec<f64>,
    pub running_sup: Vec<f64>,
    /// sup_{t>s} ‖η(t)f(t) − η(s)f(s)‖ / |t−s|^β when requested.
    pub holder_seminorm: Option<(f64, f64)>,
}

impl NormSeries {
    pub fn sup(&self) -> f64 {
        self.running_sup.last().copied().unwrap_or(0.0)
    }
}

/// Time series of monitored norms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub times: Vec<f64>,
    pub series: Vec<NormSeries>,
    /// Free-form run annotations (localiser γ, kernel sidedness, …).
    pub notes: BTreeMap<String, String>,
}

impl NormReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.notes.insert(key.into(), value.into());
    }

    /// Append one row: a new time and one value per named series. Every series
    /// already present must be supplied.
    pub fn push_row(&mut self, t: f64, values: &[(&str, f64)]) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::NonMonotoneTimes { index: self.times.len(), value: t });
            }
        }
        if self.times.is_empty() {
            for (name, _) in values {
                self.series.push(NormSeries {
                    name: (*name).to_string(),
                    norm: None,
                    weight: None,
                    values: vec![],
                    running_sup: vec![],
                    holder_seminorm: None,
                });
            }
        }
        if values.len() != self.series.len() {
            return Err(Error::Format(format!("row has {} values, report has {} series", values.len(), self.series.len())));
        }
        for (s, (name, v)) in self.series.iter_mut().zip(values) {
            if s.name != *name {
                return Err(Error::Format(format!("series order mismatch: {} vs {}", s.name, name)));
            }
            let sup = s.running_sup.last().copied().unwrap_or(f64::NEG_INFINITY).max(*v);
            s.values.push(*v);
            s.running_sup.push(sup);
        }
        self.times.push(t);
        Ok(())
    }

    pub fn add_series(&mut self, series: NormSeries) -> Result<()> {
        if series.values.len() != self.times.len() {
            return Err(Error::Format(format!(
                "series {} has {} values for {} times",
                series.name,
                series.values.len(),
                self.times.len()
            )));
        }
        self.series.push(series);
        Ok(())
    }

    pub fn series(&self, name: &str) -> Option<&NormSeries> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Check the report invariants: strictly increasing times, finite
    /// non-negative values.
    pub fn validate(&self) -> Result<()> {
        for w in self.times.windows(2).enumerate() {
            if w.1[1] <= w.1[0] {
                return Err(Error::NonMonotoneTimes { index: w.0 + 1, value: w.1[1] });
            }
        }
        for s in &self.series {
            if let Some(v) = s.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::Format(format!("series {} holds invalid value {v}", s.name)));
            }
        }
        Ok(())
    }
}

/// Weighted norm series η(tᵢ)‖f(tᵢ)‖ with running supremum and, when
/// `holder_beta` is given, the Hölder-in-time seminorm over all snapshot pairs.
pub fn weighted_norm_series(
    part: &DyadicPartition,
    name: &str,
    snapshots: &[(f64, SpectralField)],
    weight: TimeWeight,
    norm: NormSpec,
    holder_beta: Option<f64>,
) -> Result<(Vec<f64>, NormSeries)> {
    if snapshots.is_empty() {
        return Err(Error::EmptySeries(name.to_string()));
    }
    for (i, w) in snapshots.windows(2).enumerate() {
        if w[1].0 <= w[0].0 {
            return Err(Error::NonMonotoneTimes { index: i + 1, value: w[1].0 });
        }
    }
    let times: Vec<f64> = snapshots.iter().map(|s| s.0).collect();
    let mut values = Vec::with_capacity(snapshots.len());
    let mut running_sup = Vec::with_capacity(snapshots.len());
    let mut sup = f64::NEG_INFINITY;
    for (t, f) in snapshots {
        let v = weight.eval(*t) * norm.eval(part, f)?;
        sup = sup.max(v);
        values.push(v);
        running_sup.push(sup);
    }
    let holder_seminorm = match holder_beta {
        None => None,
        Some(beta) => {
            let weighted: Vec<SpectralField> = snapshots.iter().map(|(t, f)| f.scale(weight.eval(*t))).collect();
            let mut best = 0.0f64;
            for i in 0..weighted.len() {
                for j in 0..i {
                    let diff = &weighted[i] - &weighted[j];
                    let v = norm.eval(part, &diff)? / (times[i] - times[j]).powf(beta);
                    best = best.max(v);
                }
            }
            Some((beta, best))
        }
    };
    Ok((
        times,
        NormSeries { name: name.to_string(), norm: Some(norm), weight: Some(weight), values, running_sup, holder_seminorm },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::besov::CutoffProfile;
    use crate::spectral::TorusGrid;

    fn part() -> DyadicPartition {
        DyadicPartition::build(TorusGrid::new(16).unwrap(), CutoffProfile::default()).unwrap()
    }

    #[test]
    fn tau_properties() {
        assert_eq!(tau(0.0), 0.0);
        let mut prev = 0.0;
        for i in 1..200 {
            let t = i as f64 * 0.1;
            assert!(tau(t) > prev && tau(t) < 1.0);
            prev = tau(t);
        }
        assert!((tau(50.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rho_exponent() {
        let w = TimeWeight::rho_paper(4, 0.8);
        assert!((w.exponent() - (1.0 + 0.5 + 0.2)).abs() < 1e-15);
        assert!((w.eval(1.0) - tau(1.0).powf(1.7)).abs() < 1e-15);
    }

    #[test]
    fn constant_field_series_tracks_tau() {
        let p = part();
        let snaps: Vec<_> = (1..=20).map(|i| (i as f64 * 0.5, SpectralField::constant(p.grid(), 1.0))).collect();
        let (_, s) = weighted_norm_series(&p, "one", &snaps, TimeWeight::tau(), NormSpec::linf(), None).unwrap();
        for ((t, _), v) in snaps.iter().zip(&s.values) {
            assert!((v - tau(*t)).abs() < 1e-15);
        }
        assert!(s.sup() < 1.0 && s.sup() > 0.9999);
    }

    #[test]
    fn reciprocal_tau_cancels() {
        let p = part();
        let snaps: Vec<_> = (1..=10).map(|i| {
            let t = i as f64 * 0.3;
            (t, SpectralField::constant(p.grid(), 1.0 / tau(t)))
        }).collect();
        let (_, s) = weighted_norm_series(&p, "r", &snaps, TimeWeight::tau(), NormSpec::linf(), Some(0.5)).unwrap();
        assert!(s.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!(s.holder_seminorm.unwrap().1 < 1e-13);
    }

    #[test]
    fn empty_and_unordered_rejected() {
        let p = part();
        assert!(matches!(
            weighted_norm_series(&p, "e", &[], TimeWeight::tau(), NormSpec::linf(), None),
            Err(Error::EmptySeries(_))
        ));
        let f = SpectralField::zeros(p.grid());
        let snaps = vec![(1.0, f.clone()), (0.5, f)];
        assert!(weighted_norm_series(&p, "e", &snaps, TimeWeight::tau(), NormSpec::linf(), None).is_err());
    }

    #[test]
    fn report_rows() {
        let mut r = NormReport::new();
        r.push_row(0.0, &[("a", 1.0), ("b", 2.0)]).unwrap();
        r.push_row(1.0, &[("a", 0.5), ("b", 3.0)]).unwrap();
        assert!(r.push_row(1.0, &[("a", 0.5), ("b", 3.0)]).is_err());
        assert_eq!(r.series("a").unwrap().sup(), 1.0);
        assert_eq!(r.series("b").unwrap().sup(), 3.0);
        r.validate().unwrap();
    }
}
