//! Plain-text tabulation of a partition, used to freeze the cut-off.
//!
//! Layout: `#`-prefixed header lines (format tag, N, j_max, steepness), then
//! one `k1,k2,j,value` row per nonzero symbol entry, blocks in increasing j
//! and lattice points in FFT order. Values use the shortest decimal that
//! round-trips to the same f64.

use std::io::{BufRead, Write};

use super::partition::{CutoffProfile, DyadicPartition};
use crate::error::{Error, Result};
use crate::spectral::TorusGrid;

pub const GOLDEN_TAG: &str = "parapam-partition v1";

pub fn write_golden(part: &DyadicPartition, mut w: impl Write) -> Result<()> {
    let g = part.grid();
    writeln!(w, "# {GOLDEN_TAG}")?;
    writeln!(w, "# n={}", g.n())?;
    writeln!(w, "# j_max={}", part.j_max())?;
    writeln!(w, "# steepness={}", part.profile().steepness)?;
    writeln!(w, "k1,k2,j,value")?;
    for j in part.blocks() {
        for (idx, &v) in part.symbol(j)?.iter().enumerate() {
            if v != 0.0 {
                let (k1, k2) = g.wavevector(idx);
                writeln!(w, "{k1},{k2},{j},{v}")?;
            }
        }
    }
    Ok(())
}

/// Parsed golden table.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldenTable {
    pub grid: TorusGrid,
    pub j_max: i32,
    pub profile: CutoffProfile,
    /// symbols[j + 1][flat index]
    pub symbols: Vec<Vec<f64>>,
}

fn header_value<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.trim_start_matches('#')
        .trim()
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(|| Error::Format(format!("expected header `{key}=`, got `{line}`")))
}

pub fn read_golden(r: impl BufRead) -> Result<GoldenTable> {
    let mut lines = r.lines();
    let mut next = || -> Result<String> {
        lines.next().ok_or_else(|| Error::Format("truncated golden file".into()))?.map_err(Error::from)
    };
    let tag = next()?;
    if tag.trim_start_matches('#').trim() != GOLDEN_TAG {
        return Err(Error::Format(format!("unknown golden tag `{tag}`")));
    }
    let bad = |e: &dyn std::fmt::Display| Error::Format(e.to_string());
    let n: usize = header_value(&next()?, "n")?.parse().map_err(|e| bad(&e))?;
    let j_max: i32 = header_value(&next()?, "j_max")?.parse().map_err(|e| bad(&e))?;
    let steepness: f64 = header_value(&next()?, "steepness")?.parse().map_err(|e| bad(&e))?;
    if next()?.trim() != "k1,k2,j,value" {
        return Err(Error::Format("missing column header".into()));
    }
    let grid = TorusGrid::new(n)?;
    let mut symbols = vec![vec![0.0; grid.len()]; (j_max + 2) as usize];
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Format(format!("bad row `{line}`")));
        }
        let k1: i64 = parts[0].parse().map_err(|e| bad(&e))?;
        let k2: i64 = parts[1].parse().map_err(|e| bad(&e))?;
        let j: i32 = parts[2].parse().map_err(|e| bad(&e))?;
        let v: f64 = parts[3].parse().map_err(|e| bad(&e))?;
        if j < -1 || j > j_max {
            return Err(Error::BlockOutOfRange { j, j_max });
        }
        symbols[(j + 1) as usize][grid.flat_index(k1, k2)] = v;
    }
    Ok(GoldenTable { grid, j_max, profile: CutoffProfile { steepness }, symbols })
}

impl GoldenTable {
    /// Largest absolute difference from a freshly built partition.
    pub fn max_deviation(&self, part: &DyadicPartition) -> Result<f64> {
        part.grid().check_same(&self.grid)?;
        if part.j_max() != self.j_max {
            return Err(Error::Format(format!("j_max {} vs {}", part.j_max(), self.j_max)));
        }
        let mut worst = 0.0f64;
        for j in part.blocks() {
            for (a, b) in part.symbol(j)?.iter().zip(&self.symbols[(j + 1) as usize]) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    }
}
