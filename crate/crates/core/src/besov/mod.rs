//! Littlewood–Paley calculus: dyadic partition, blocks, Besov norms,
//! localisers and time-weighted norm series.

mod golden;
mod localize;
mod norms;
mod partition;
mod weights;

pub use golden::{read_golden, write_golden, GoldenTable, GOLDEN_TAG};
pub use localize::{choose_localization_params, localize};
pub use norms::{besov_norm, besov_norm_with, block_norms, holder_norm, lp_norm, sobolev_inner, sobolev_norm, Integrability};
pub use partition::{low_pass, lp_block, lp_blocks, CutoffProfile, DyadicPartition};
pub use weights::{tau, weighted_norm_series, NormReport, NormSeries, NormSpec, TimeWeight, WeightKind};
