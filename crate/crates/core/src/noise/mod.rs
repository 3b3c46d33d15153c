//! White noise, mollification, the renormalisation constant and the
//! enhanced noise pair.

mod enhanced;
mod mollifier;
mod renorm;
mod white;

pub use enhanced::{make_enhanced, EnhancedNoise, NoiseOptions, MAGIC};
pub use mollifier::{mollify, Mollifier};
pub use renorm::{lattice_renorm_constant, renorm_constant, RenormConstant, RenormScope, MAX_CUTOFF};
pub use white::{pair_with, sample_white_noise, WhiteNoise};
