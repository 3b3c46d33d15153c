//! Print the frozen partition table for a grid size: `golden_partition 16`.

use parapam::besov::{write_golden, CutoffProfile, DyadicPartition};
use parapam::spectral::TorusGrid;

fn main() -> parapam::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    let part = DyadicPartition::build(TorusGrid::new(n)?, CutoffProfile::default())?;
    write_golden(&part, std::io::stdout().lock())
}
