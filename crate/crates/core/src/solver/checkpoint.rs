//! Checkpoint layout (JSON, one object):
//!
//! ```text
//! { "format": "parapam-checkpoint v1",
//!   "cfg_hash": <sha256 hex of the canonical config JSON>,
//!   "config": <SolverConfig>,
//!   "state": <SolverState: step, t, fields (coefficients and history ring),
//!             localisation parameters, monitor report, norm trace> }
//! ```
//!
//! Floats are written with round-trip precision so a resumed run continues
//! bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::SolverConfig;
use super::engine::SolverState;
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "parapam-checkpoint v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub cfg_hash: String,
    pub config: SolverConfig,
    pub state: SolverState,
}

/// sha256 of the canonical JSON of a config, hex encoded.
pub fn config_hash(cfg: &SolverConfig) -> String {
    hex::encode(Sha256::digest(cfg.canonical_json().as_bytes()))
}

impl Checkpoint {
    pub fn new(cfg: &SolverConfig, state: &SolverState) -> Self {
        Self { format: CHECKPOINT_FORMAT.into(), cfg_hash: config_hash(cfg), config: cfg.clone(), state: state.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_str(text)?;
        if ck.format != CHECKPOINT_FORMAT {
            return Err(Error::Format(format!("unknown checkpoint format {:?}", ck.format)));
        }
        if config_hash(&ck.config) != ck.cfg_hash {
            return Err(Error::Format("checkpoint config hash does not match its config".into()));
        }
        Ok(ck)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Reject resuming under a different configuration.
    pub fn check_config(&self, cfg: &SolverConfig) -> Result<()> {
        if config_hash(cfg) != self.cfg_hash {
            return Err(Error::RunMismatch("checkpoint was written for a different configuration".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Mode, NoiseSpec, Solver};

    #[test]
    fn resume_is_bit_identical() {
        let cfg = SolverConfig {
            n: 16,
            mode: Mode::Split,
            t_final: 0.1,
            dt: Some(2e-3),
            monitor_every: 7,
            noise: NoiseSpec { seed: 9, ..NoiseSpec::default() },
            ..SolverConfig::default()
        };
        let mut s = Solver::from_config(cfg.clone()).unwrap();
        let mut straight = s.initial_state().unwrap();
        s.run(&mut straight, None).unwrap();

        let mut s = Solver::from_config(cfg.clone()).unwrap();
        let mut st = s.initial_state().unwrap();
        s.run_until(&mut st, 23, None).unwrap();
        let text = Checkpoint::new(&cfg, &st).to_json().unwrap();
        let ck = Checkpoint::from_json(&text).unwrap();
        ck.check_config(&cfg).unwrap();
        let mut resumed = ck.state;
        let mut s = Solver::from_config(ck.config).unwrap();
        s.run(&mut resumed, None).unwrap();
        assert_eq!(resumed, straight);
    }

    #[test]
    fn tampered_config_rejected() {
        let cfg = SolverConfig { n: 16, ..SolverConfig::default() };
        let mut s = Solver::from_config(cfg.clone()).unwrap();
        let st = s.initial_state().unwrap();
        let mut ck = Checkpoint::new(&cfg, &st);
        ck.config.mu = 2.0;
        assert!(Checkpoint::from_json(&ck.to_json().unwrap()).is_err());
        assert!(Checkpoint::new(&cfg, &st).check_config(&SolverConfig { t_final: 2.0, ..cfg }).is_err());
    }
}
