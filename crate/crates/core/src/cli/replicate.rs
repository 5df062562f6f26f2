use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::format::format_f64;
use super::run::{dataset_run, load_dataset, parse_mode};
use super::{io_err, usage, CliError, ReplicateArgs};
use crate::cycle::{detect_cycle, CycleConfig};
use crate::engine::BoostTrace;
use crate::figure::{render_svg, FigureSpec, ReferenceLine};
use crate::learners::{Dataset, TreeBounds};
use crate::scalar::{Mode, Rational, Scalar};
use crate::tracefile::{write_file, Source, TraceDocument, TraceMeta};

/// One line of the replication table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub positive: String,
    pub n: usize,
    pub sample: Option<usize>,
    pub depth: usize,
    pub leaves: usize,
    pub seed: Option<u64>,
    pub iterations: usize,
    pub halt: String,
    pub cycle: bool,
    pub period: Option<usize>,
    pub edge_period: Option<usize>,
    pub mean_edge: Option<f64>,
    pub nabla: String,
    pub farey_word: String,
    pub pool_size: usize,
}

struct Job<'a> {
    ds: Dataset,
    seed: Option<u64>,
    args: &'a ReplicateArgs,
    bounds: TreeBounds,
    stem: String,
}

fn file_stem(args: &ReplicateArgs, seed: Option<u64>) -> String {
    let base = args
        .dataset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let clean: String = format!("{base}-{}", args.positive)
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    match seed {
        Some(s) => format!("{clean}-seed{s}"),
        None => clean,
    }
}

fn replicate_one<S: Scalar>(
    job: &Job<'_>,
    full_n: usize,
    out_dir: &Path,
) -> Result<SummaryRow, CliError>
where
    BoostTrace<S>: Into<crate::tracefile::AnyTrace>,
{
    let args = job.args;
    let trace = dataset_run::<S>(&job.ds, job.bounds, args.iters)?;
    let report = detect_cycle(&trace, &CycleConfig::default());
    let mut spec = FigureSpec::edges(0, trace.edges_f64());
    spec.title = format!(
        "{} ({} vs rest), n={}, tree ({}, {})",
        args.dataset
            .file_name()
            .map(|s| s.to_string_lossy())
            .unwrap_or_default(),
        args.positive,
        job.ds.len(),
        job.bounds.max_depth,
        job.bounds.max_leaves
    );
    spec.references.push(ReferenceLine::golden());
    if !spec.values.is_empty() {
        let svg = render_svg(&spec).map_err(io_err)?;
        let path = out_dir.join(format!("{}.svg", job.stem));
        std::fs::write(&path, svg)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    let row = SummaryRow {
        dataset: args.dataset.display().to_string(),
        positive: args.positive.clone(),
        n: full_n,
        sample: args.sample,
        depth: job.bounds.max_depth,
        leaves: job.bounds.max_leaves,
        seed: job.seed,
        iterations: trace.len(),
        halt: trace
            .halt()
            .map(|h| format!("{} at {}", h.reason, h.iteration))
            .unwrap_or_else(|| "none".into()),
        cycle: report.is_some(),
        period: report.as_ref().map(|r| r.period),
        edge_period: report.as_ref().map(|r| r.edge_period),
        mean_edge: report.as_ref().map(|r| r.mean_edge),
        nabla: match &report {
            Some(r) if r.nabla.holds() => "holds".into(),
            Some(_) => "violated".into(),
            None => "n/a".into(),
        },
        farey_word: report
            .as_ref()
            .and_then(|r| r.farey_word.as_ref())
            .map(|w| w.to_string())
            .unwrap_or_default(),
        pool_size: trace.pool().len(),
    };
    if args.traces {
        let doc = TraceDocument {
            meta: TraceMeta {
                seed: job.seed,
                source: Source::Dataset {
                    provenance: job.ds.provenance().clone(),
                    bounds: job.bounds,
                },
            },
            trace: trace.into(),
        };
        write_file(&out_dir.join(format!("{}.trace.json", job.stem)), &doc).map_err(io_err)?;
    }
    Ok(row)
}

pub(super) fn cmd_replicate(
    args: ReplicateArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    if args.iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    let mode = parse_mode(&args.mode)?;
    let bounds = TreeBounds::new(args.depth, args.leaves).map_err(usage)?;
    let full = load_dataset(&args.dataset, &args.label, &args.positive, None, 0)?;
    if full.provenance().rows_dropped > 0 {
        writeln!(
            err,
            "warning: dropped {} rows with non-numeric features",
            full.provenance().rows_dropped
        )
        .map_err(io_err)?;
    }
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out_dir.display())))?;

    // Seeds only matter when sampling; the full set is a single run.
    let seeds: Vec<Option<u64>> = match args.sample {
        Some(_) => {
            let mut seen = std::collections::HashSet::new();
            args.seeds
                .iter()
                .filter(|s| seen.insert(**s))
                .map(|&s| Some(s))
                .collect()
        }
        None => vec![None],
    };
    let mut jobs = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let ds = match (args.sample, seed) {
            (Some(size), Some(s)) => full.sample(size, s).map_err(usage)?,
            _ => full.clone(),
        };
        jobs.push(Job {
            ds,
            seed,
            args: &args,
            bounds,
            stem: file_stem(&args, seed),
        });
    }
    let n = full.len();
    let results: Vec<Result<SummaryRow, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| {
                let dir = &args.out_dir;
                scope.spawn(move || match mode {
                    Mode::Exact => replicate_one::<Rational>(job, n, dir),
                    Mode::Float => replicate_one::<f64>(job, n, dir),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(CliError::Io("worker panicked".into())))
            })
            .collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let csv_path = args.out_dir.join("summary.csv");
    let mut wtr = csv::Writer::from_path(&csv_path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", csv_path.display())))?;
    for row in &rows {
        wtr.serialize(row).map_err(io_err)?;
    }
    wtr.flush().map_err(io_err)?;

    writeln!(
        out,
        "dataset\tn\tsample\ttree\tseed\tcycle\tk\tedge k\tmean edge\tnabla\tword"
    )
    .map_err(io_err)?;
    for r in &rows {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{}\t{}\t{}\t({},{})\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.dataset,
            r.n,
            opt(r.sample),
            r.depth,
            r.leaves,
            r.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
            if r.cycle { "yes" } else { "no" },
            opt(r.period),
            opt(r.edge_period),
            r.mean_edge.map(format_f64).unwrap_or_else(|| "-".into()),
            r.nabla,
            if r.farey_word.is_empty() {
                "-"
            } else {
                &r.farey_word
            },
        )
        .map_err(io_err)?;
    }
    Ok(())
}
