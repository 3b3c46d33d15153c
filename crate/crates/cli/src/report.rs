use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use crate::plan::SweepPoint;

/// One CSV row: time, metric, value, then the sweep keys.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub time: f64,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
    pub eps: f64,
    /// empty when the default time step was used
    pub dt: Option<f64>,
    pub n: usize,
}

impl Row {
    pub fn new(p: &SweepPoint, time: f64, metric: impl Into<String>, value: f64) -> Self {
        Self { time, metric: metric.into(), value, seed: p.seed, eps: p.eps, dt: p.dt, n: p.n }
    }
}

pub const HEADER: [&str; 7] = ["time", "metric", "value", "seed", "eps", "dt", "n"];

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use parapam::solver::SolverConfig;

    #[test]
    fn header_and_row() {
        let p = SweepPoint { index: 0, seed: 3, eps: 0.1, dt: None, n: 16, config: SolverConfig::default() };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_csv(&path, &[Row::new(&p, 0.5, "u_linf", 2.0)]).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "time,metric,value,seed,eps,dt,n\n0.5,u_linf,2.0,3,0.1,,16\n");
    }
}
