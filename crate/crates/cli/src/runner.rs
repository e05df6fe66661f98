//! Writing artifacts for single runs and sweeps.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::tasks::{metric_names, run_task, TaskOutput};
use crate::{CliError, EXIT_OK};

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub jobs: usize,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn report_text(cfg: &ExperimentConfig, body: &[String], elapsed: f64, status: &str) -> String {
    let mut s = String::from("critlab report\n\n== config ==\n");
    s.push_str(&cfg.source);
    if !cfg.source.ends_with('\n') {
        s.push('\n');
    }
    s.push_str("\n== results ==\n");
    for line in body {
        s.push_str(line);
        s.push('\n');
    }
    s.push_str(&format!("status: {status}\n"));
    s.push_str(&format!("\n== timings ==\nwall time: {elapsed:.3} s\n"));
    s
}

/// Runs one task and writes `report.txt` plus its CSV files into `dir`.
pub fn run_single(cfg: &ExperimentConfig, dir: &Path, opts: &RunOptions) -> Result<TaskOutput, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let start = Instant::now();
    let result = run_task(cfg, opts.seed);
    let elapsed = start.elapsed().as_secs_f64();
    match &result {
        Ok(out) => {
            write(&dir.join("report.txt"), &report_text(cfg, &out.report, elapsed, "ok"))?;
            if cfg.csv {
                for (name, contents) in &out.csvs {
                    write(&dir.join(name), contents)?;
                }
            }
        }
        Err(e) => {
            let body = vec![format!("error: {e}")];
            let status = format!("failed (exit {})", e.exit_code());
            write(&dir.join("report.txt"), &report_text(cfg, &body, elapsed, &status))?;
        }
    }
    result
}

/// Runs every sweep item in its own `item_XXX` directory and merges
/// `summary.csv` in item order. Fails only when every item fails, with the
/// first item's error.
pub fn run_sweep(cfg: &ExperimentConfig, dir: &Path, opts: &RunOptions) -> Result<i32, CliError> {
    let Some(sweep) = cfg.sweep.clone() else {
        return Err(CliError::Usage("sweep needs a [sweep] section".into()));
    };
    let items: Vec<ExperimentConfig> = sweep
        .values
        .iter()
        .map(|v| cfg.with_override(&sweep.section, &sweep.key, v))
        .collect::<Result<_, _>>()?;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build a pool of {} threads: {e}", opts.jobs)))?;
    let start = Instant::now();
    let results: Vec<Result<TaskOutput, CliError>> = pool.install(|| {
        items
            .par_iter()
            .enumerate()
            .map(|(i, item)| run_single(item, &dir.join(format!("item_{i:03}")), opts))
            .collect()
    });
    let elapsed = start.elapsed().as_secs_f64();

    let names = metric_names(cfg.task);
    let mut summary = format!("item,{},status,{}\n", sweep.key, names.join(","));
    let mut body = vec![format!("sweep over {}.{}: {} items", sweep.section, sweep.key, items.len())];
    for (i, (value, r)) in sweep.values.iter().zip(&results).enumerate() {
        let quoted = if value.text.contains(',') {
            format!("\"{}\"", value.text)
        } else {
            value.text.clone()
        };
        match r {
            Ok(out) => {
                summary.push_str(&format!("{i},{quoted},ok,{}\n", out.metrics.join(",")));
                body.push(format!("item {i:03} ({}): ok", value.text));
            }
            Err(e) => {
                summary.push_str(&format!("{i},{quoted},failed,{}\n", vec![""; names.len()].join(",")));
                body.push(format!("item {i:03} ({}): failed: {e}", value.text));
            }
        }
    }
    write(&dir.join("summary.csv"), &summary)?;
    let failures = results.iter().filter(|r| r.is_err()).count();
    let status = format!("{} of {} items succeeded", results.len() - failures, results.len());
    write(&dir.join("report.txt"), &report_text(cfg, &body, elapsed, &status))?;
    if failures == results.len() {
        if let Some(Err(e)) = results.into_iter().next() {
            return Err(e);
        }
    }
    Ok(EXIT_OK)
}
