use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;
use parapam_cli::{resume, run_plan, ExperimentPlan, Manifest, RunOptions};

/// Run parapam experiment plans.
#[derive(Parser, Debug)]
#[command(name = "parapam", version)]
struct Args {
    /// plan file (TOML), or a manifest.json from an earlier run to replay it
    #[arg(long)]
    plan: Option<PathBuf>,
    /// output directory (overrides the plan's `output`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// worker threads for sweep points
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// added to every noise seed of the sweep
    #[arg(long)]
    seed_offset: Option<u64>,
    /// continue a checkpointed run to its end
    #[arg(long)]
    resume: Option<PathBuf>,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let args = Args::parse();
    if let Some(ck) = &args.resume {
        let out = args.out.clone().unwrap_or_else(|| PathBuf::from("resumed"));
        let path = resume(ck, &out)?;
        println!("wrote {}", path.display());
        return Ok(true);
    }
    let Some(plan_path) = &args.plan else {
        bail!("either --plan or --resume is required");
    };
    let (plan, offset) = if plan_path.extension().is_some_and(|e| e == "json") {
        let m = Manifest::load(plan_path)?;
        (m.plan, m.seed_offset)
    } else {
        (ExperimentPlan::load(plan_path)?, 0)
    };
    let out = match (&args.out, &plan.output) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => o.clone(),
        (None, None) => bail!("no output directory: pass --out or set `output` in the plan"),
    };
    let opts = RunOptions { out, workers: args.workers, seed_offset: args.seed_offset.unwrap_or(offset) };
    let summary = run_plan(&plan, &opts)?;
    for f in &summary.manifest.failures {
        eprintln!("failed: {}: {}", f.point, f.error);
    }
    println!("{} points, content hash {}", summary.manifest.points.len(), summary.manifest.content_hash);
    Ok(summary.ok())
}
