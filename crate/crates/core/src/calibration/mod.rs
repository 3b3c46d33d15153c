//! Ensemble calibration of implied constants and their frozen values.
//!
//! Constants are fitted on [`calibration_seeds`] as the largest observed
//! ratio and checked on the disjoint [`validation_seeds`] with a margin.

mod constants;
mod experiments;
mod inequalities;

pub use constants::{
    calibration_seeds, median, validate, validation_seeds, ConstantsFile, FrozenConstant, Verdict, CALIBRATION_BASE, MARGIN,
    VALIDATION_BASE,
};
pub use experiments::{
    coercive_config, coercive_ratio, cross_mode_config, cross_mode_discrepancy, uniqueness_configs, uniqueness_envelope_ratio,
    uniqueness_growth, uniqueness_pair, RunConstant, UNIQUENESS_SNAPSHOT_EVERY,
};
pub use inequalities::{bernstein_samples, gradient_l2_sq, gradient_linf, random_field, Inequality, ENSEMBLE_N};

use crate::error::Result;

/// Seeds per side for the inequality ensembles.
pub const INEQUALITY_SEEDS: usize = 20;

/// Fit every inequality constant; with `runs` also the solver constants.
pub fn calibrate_all(runs: bool) -> Result<ConstantsFile> {
    let mut file = ConstantsFile::default();
    let seeds = calibration_seeds(INEQUALITY_SEEDS);
    for ineq in Inequality::ALL {
        file.insert(ineq.name(), FrozenConstant::fit(&ineq.ensemble(&seeds)?, &seeds)?);
    }
    if runs {
        for c in RunConstant::ALL {
            let seeds = calibration_seeds(c.seed_count());
            file.insert(c.name(), FrozenConstant::fit(&c.ensemble(&seeds)?, &seeds)?);
        }
    }
    Ok(file)
}
