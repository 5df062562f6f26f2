use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use super::format::format_scalar;
use super::{io_err, usage, CliError, DatasetArgs, RunArgs};
use crate::engine::{run, BoostTrace, EngineError, SelectionRule};
use crate::learners::{load_csv, run_on_dataset, Dataset, LearnerError, TreeBounds};
use crate::scalar::{Mode, Rational, Scalar};
use crate::simplex::HypothesisPool;
use crate::tracefile::{to_json, write_file, AnyTrace, Source, TraceDocument, TraceMeta};

pub(super) fn parse_mode(text: &str) -> Result<Mode, CliError> {
    text.parse::<Mode>().map_err(usage)
}

pub(super) fn load_pool(path: &Path) -> Result<HypothesisPool, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    HypothesisPool::parse(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn learner_err(e: LearnerError) -> CliError {
    match e {
        LearnerError::Io { .. }
        | LearnerError::Csv(_)
        | LearnerError::MissingColumn(_)
        | LearnerError::NonNumericColumn(_)
        | LearnerError::EmptyDataset
        | LearnerError::SingleClass(_)
        | LearnerError::Shape(_) => io_err(e),
        other => usage(other),
    }
}

/// Loads and optionally samples a dataset.
pub(super) fn load_dataset(
    path: &Path,
    label: &str,
    positive: &str,
    sample: Option<usize>,
    seed: u64,
) -> Result<Dataset, CliError> {
    let ds = load_csv(path, label, positive).map_err(learner_err)?;
    match sample {
        Some(size) => ds.sample(size, seed).map_err(learner_err),
        None => Ok(ds),
    }
}

pub(super) fn dataset_run<S: Scalar>(
    ds: &Dataset,
    bounds: TreeBounds,
    iters: usize,
) -> Result<BoostTrace<S>, CliError> {
    run_on_dataset::<S>(ds, bounds, iters)
        .map(|r| r.trace)
        .map_err(learner_err)
}

fn pool_run<S: Scalar>(
    pool: HypothesisPool,
    rule: &str,
    iters: usize,
) -> Result<BoostTrace<S>, CliError> {
    let rule = SelectionRule::<S>::parse(rule).map_err(usage)?;
    run::<S>(Arc::new(pool), rule, iters).map_err(|e| match e {
        EngineError::Simplex(_) => io_err(e),
        other => usage(other),
    })
}

fn summarize<S: Scalar>(trace: &BoostTrace<S>, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "mode: {}", S::MODE)?;
    writeln!(out, "rule: {}", trace.rule())?;
    writeln!(
        out,
        "pool: {} rows over {} points",
        trace.pool().len(),
        trace.pool().n_points()
    )?;
    writeln!(out, "iterations: {}", trace.len())?;
    if let Some(last) = trace.steps().last() {
        writeln!(
            out,
            "last edge: {} (iteration {})",
            format_scalar(&last.edge),
            last.iteration
        )?;
    }
    if let Some(h) = trace.halt() {
        writeln!(
            out,
            "halted at iteration {}: {} ({})",
            h.iteration, h.reason, h.detail
        )?;
    }
    Ok(())
}

fn dataset_bounds(data: &DatasetArgs) -> Result<TreeBounds, CliError> {
    TreeBounds::new(data.depth, data.leaves).map_err(usage)
}

pub(super) fn cmd_run(
    args: RunArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    if args.iters == 0 {
        return Err(CliError::Usage("--iters must be at least 1".into()));
    }
    let mode = parse_mode(&args.mode)?;
    let doc = match (&args.pool, &args.data.dataset) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--pool and --dataset are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --pool or --dataset is required".into(),
            ))
        }
        (Some(path), None) => {
            let pool = load_pool(path)?;
            let meta = TraceMeta {
                seed: args.seed,
                source: Source::Pool {
                    path: Some(path.display().to_string()),
                },
            };
            let trace: AnyTrace = match mode {
                Mode::Exact => pool_run::<Rational>(pool, &args.rule, args.iters)?.into(),
                Mode::Float => pool_run::<f64>(pool, &args.rule, args.iters)?.into(),
            };
            TraceDocument { meta, trace }
        }
        (None, Some(path)) => {
            if args.rule != "optimal" {
                return Err(CliError::Usage(
                    "dataset runs always take the trained tree; --rule must be optimal".into(),
                ));
            }
            let (Some(label), Some(positive)) = (&args.data.label, &args.data.positive) else {
                return Err(CliError::Usage(
                    "--dataset needs --label and --positive".into(),
                ));
            };
            let bounds = dataset_bounds(&args.data)?;
            let ds = load_dataset(
                path,
                label,
                positive,
                args.data.sample,
                args.seed.unwrap_or(0),
            )?;
            let meta = TraceMeta {
                seed: args.seed,
                source: Source::Dataset {
                    provenance: ds.provenance().clone(),
                    bounds,
                },
            };
            let trace: AnyTrace = match mode {
                Mode::Exact => dataset_run::<Rational>(&ds, bounds, args.iters)?.into(),
                Mode::Float => dataset_run::<f64>(&ds, bounds, args.iters)?.into(),
            };
            TraceDocument { meta, trace }
        }
    };
    let (summary_to, json_to): (&mut dyn Write, Option<&mut dyn Write>) = match &args.out {
        Some(_) => (out, None),
        None => (err, Some(out)),
    };
    match &doc.trace {
        AnyTrace::Exact(t) => summarize(t, summary_to),
        AnyTrace::Float(t) => summarize(t, summary_to),
    }
    .map_err(io_err)?;
    match (&args.out, json_to) {
        (Some(path), _) => write_file(path, &doc).map_err(io_err),
        (None, Some(w)) => w.write_all(to_json(&doc).as_bytes()).map_err(io_err),
        (None, None) => Ok(()),
    }
}
