use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First seed of the calibration range.
pub const CALIBRATION_BASE: u64 = 1000;
/// First seed of the validation range; disjoint from calibration.
pub const VALIDATION_BASE: u64 = 2000;
/// Default validation margin over a fitted constant.
pub const MARGIN: f64 = 2.0;

pub fn calibration_seeds(count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| CALIBRATION_BASE + i).collect()
}

pub fn validation_seeds(count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| VALIDATION_BASE + i).collect()
}

/// One fitted constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenConstant {
    pub value: f64,
    /// number of samples the fit saw
    pub samples: usize,
    /// seeds used for the fit
    pub seeds: Vec<u64>,
    /// median of the calibration samples
    pub median: f64,
}

impl FrozenConstant {
    /// Fit as the largest sample.
    pub fn fit(samples: &[f64], seeds: &[u64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySeries("calibration samples".into()));
        }
        if let Some(bad) = samples.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter { name: "sample", value: *bad, reason: "calibration sample is not finite".into() });
        }
        Ok(Self { value: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max), samples: samples.len(), seeds: seeds.to_vec(), median: median(samples) })
    }
}

pub fn median(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Versioned set of frozen constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsFile {
    pub version: u32,
    pub margin: f64,
    pub constants: BTreeMap<String, FrozenConstant>,
}

const FROZEN_JSON: &str = include_str!("../../constants/frozen.json");

impl Default for ConstantsFile {
    fn default() -> Self {
        Self { version: 1, margin: MARGIN, constants: BTreeMap::new() }
    }
}

impl ConstantsFile {
    /// The constants checked into the crate.
    pub fn frozen() -> Self {
        Self::from_json(FROZEN_JSON).expect("checked-in constants parse")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn get(&self, name: &str) -> Result<&FrozenConstant> {
        self.constants.get(name).ok_or_else(|| Error::Format(format!("no frozen constant named {name}")))
    }

    pub fn insert(&mut self, name: impl Into<String>, c: FrozenConstant) {
        self.constants.insert(name.into(), c);
    }
}

/// Outcome of checking validation samples against a frozen constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub frozen: f64,
    pub bound: f64,
    pub max_sample: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Pass when every sample is at most margin·frozen (or, for a non-positive
/// frozen value, at most frozen/margin).
pub fn validate(name: &str, frozen: f64, margin: f64, samples: &[f64]) -> Verdict {
    let bound = if frozen > 0.0 { margin * frozen } else { frozen / margin };
    let max_sample = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pass = !samples.is_empty() && samples.iter().all(|s| s.is_finite() && *s <= bound);
    Verdict { name: name.into(), frozen, bound, max_sample, samples: samples.len(), pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges_disjoint() {
        let c = calibration_seeds(500);
        let v = validation_seeds(500);
        assert!(c.iter().all(|s| !v.contains(s)));
    }

    #[test]
    fn fit_and_validate() {
        let c = FrozenConstant::fit(&[1.0, 3.0, 2.0], &[1, 2, 3]).unwrap();
        assert_eq!(c.value, 3.0);
        assert_eq!(c.median, 2.0);
        assert!(validate("x", 3.0, 2.0, &[5.9]).pass);
        assert!(!validate("x", 3.0, 2.0, &[6.1]).pass);
        assert!(validate("x", -1.0, 2.0, &[-0.6]).pass);
        assert!(!validate("x", 1.0, 2.0, &[]).pass);
        assert!(FrozenConstant::fit(&[], &[]).is_err());
    }

    #[test]
    fn frozen_file_parses() {
        let f = ConstantsFile::frozen();
        assert_eq!(f.margin, MARGIN);
        let back = ConstantsFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
