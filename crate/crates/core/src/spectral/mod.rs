//! Field representation on the 2-D torus: transforms, alias-free products
//! and Fourier multipliers.

mod fft;
mod field;
mod grid;
mod multiplier;

pub use field::{dealiased_polynomial, dealiased_product, forward_transform, padding_factor, Padded, SpectralField};
pub use grid::TorusGrid;
pub use multiplier::{apply_multiplier, Multiplier, SymbolConvention};
