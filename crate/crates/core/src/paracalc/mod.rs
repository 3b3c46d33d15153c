//! Bony decomposition, commutators and the time-mollified paraproduct.

mod history;
mod products;

pub use history::{modified_para, q_i, HistoryRing, ModifiedPara, TimeKernel};
pub use products::{
    block_pair_sum, bony, commutator, dform, para_hi, para_hi_blocks, para_lo, para_lo_blocks, para_lo_hi_blocks,
    para_res, para_res_blocks, Blocks,
};
