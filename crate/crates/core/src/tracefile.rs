//! Versioned JSON trace files.
//!
//! Scalars are stored as text (`p/q` in exact mode, shortest round-trip
//! decimals in float mode) so a file read back and written again is
//! byte-identical.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{BoostStep, BoostTrace, EngineError, Halt, HaltReason, SelectionRule};
use crate::learners::{Provenance, TreeBounds};
use crate::scalar::{Mode, Rational, Scalar};
use crate::simplex::{HypothesisPool, MistakeDichotomy, PoolOrigin, SimplexError, WeightVector};

pub const SCHEMA: &str = "boostcycle-trace";
pub const VERSION: &str = "v1";

#[derive(Debug, thiserror::Error)]
pub enum TraceFileError {
    #[error("cannot access {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("malformed trace: {0}")]
    Malformed(String),
    #[error("unsupported trace schema {schema} {version}")]
    UnsupportedVersion { schema: String, version: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// Where the hypotheses of a run came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Pool {
        path: Option<String>,
    },
    Dataset {
        provenance: Provenance,
        bounds: TreeBounds,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub seed: Option<u64>,
    pub source: Source,
}

impl TraceMeta {
    pub fn pool(path: Option<String>) -> Self {
        TraceMeta {
            seed: None,
            source: Source::Pool { path },
        }
    }
}

/// A trace in whichever numeric mode it was recorded.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTrace {
    Exact(BoostTrace<Rational>),
    Float(BoostTrace<f64>),
}

impl AnyTrace {
    pub fn mode(&self) -> Mode {
        match self {
            AnyTrace::Exact(_) => Mode::Exact,
            AnyTrace::Float(_) => Mode::Float,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyTrace::Exact(t) => t.len(),
            AnyTrace::Float(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges_f64(&self) -> Vec<f64> {
        match self {
            AnyTrace::Exact(t) => t.edges_f64(),
            AnyTrace::Float(t) => t.edges_f64(),
        }
    }

    pub fn first_iteration(&self) -> usize {
        match self {
            AnyTrace::Exact(t) => t.first_iteration(),
            AnyTrace::Float(t) => t.first_iteration(),
        }
    }
}

impl From<BoostTrace<Rational>> for AnyTrace {
    fn from(t: BoostTrace<Rational>) -> Self {
        AnyTrace::Exact(t)
    }
}

impl From<BoostTrace<f64>> for AnyTrace {
    fn from(t: BoostTrace<f64>) -> Self {
        AnyTrace::Float(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceDocument {
    pub meta: TraceMeta,
    pub trace: AnyTrace,
}

#[derive(Serialize, Deserialize)]
struct HaltRecord {
    iteration: usize,
    reason: HaltReason,
    detail: String,
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    t: usize,
    row: usize,
    eta: String,
    edge: f64,
    edge_exact: Option<String>,
    alpha: f64,
    weights: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct FileRecord {
    schema: String,
    version: String,
    mode: Mode,
    rule: String,
    seed: Option<u64>,
    source: Source,
    pool_origin: PoolOrigin,
    pool: Vec<String>,
    initial_weights: Vec<String>,
    halt: Option<HaltRecord>,
    steps: Vec<StepRecord>,
}

fn texts<S: Scalar>(w: &WeightVector<S>) -> Vec<String> {
    w.components().iter().map(Scalar::to_text).collect()
}

fn record<S: Scalar>(meta: &TraceMeta, trace: &BoostTrace<S>) -> FileRecord {
    FileRecord {
        schema: SCHEMA.into(),
        version: VERSION.into(),
        mode: S::MODE,
        rule: trace.rule().to_string(),
        seed: meta.seed,
        source: meta.source.clone(),
        pool_origin: trace.pool().origin(),
        pool: trace.pool().rows().iter().map(|r| r.to_string()).collect(),
        initial_weights: texts(trace.initial()),
        halt: trace.halt().map(|h| HaltRecord {
            iteration: h.iteration,
            reason: h.reason,
            detail: h.detail.clone(),
        }),
        steps: trace
            .steps()
            .iter()
            .map(|s| StepRecord {
                t: s.iteration,
                row: s.row,
                eta: s.eta.to_string(),
                edge: s.edge.to_f64(),
                edge_exact: S::is_exact().then(|| s.edge.to_text()),
                alpha: s.alpha,
                weights: texts(&s.weights_after),
            })
            .collect(),
    }
}

fn parse_scalars<S: Scalar>(items: &[String]) -> Result<Vec<S>, TraceFileError> {
    items
        .iter()
        .map(|s| S::parse_text(s).map_err(|e| TraceFileError::Malformed(e.to_string())))
        .collect()
}

fn rebuild<S: Scalar>(rec: FileRecord) -> Result<BoostTrace<S>, TraceFileError> {
    let rows = rec
        .pool
        .iter()
        .map(|r| MistakeDichotomy::from_signs(r))
        .collect::<Result<Vec<_>, _>>()?;
    let pool = HypothesisPool::new(rows, rec.pool_origin)?;
    if pool.len() != rec.pool.len() {
        return Err(TraceFileError::Malformed("pool rows repeat".into()));
    }
    let rule = SelectionRule::<S>::parse(&rec.rule)?;
    let initial = WeightVector::new(parse_scalars::<S>(&rec.initial_weights)?)?;
    let mut steps = Vec::with_capacity(rec.steps.len());
    for s in rec.steps {
        let edge = match (&s.edge_exact, S::MODE) {
            (Some(text), _) => S::parse_text(text),
            (None, Mode::Float) => S::parse_text(&format!("{:?}", s.edge)),
            (None, Mode::Exact) => {
                return Err(TraceFileError::Malformed(format!(
                    "step {} lacks an exact edge",
                    s.t
                )))
            }
        }
        .map_err(|e| TraceFileError::Malformed(e.to_string()))?;
        let weights = parse_scalars::<S>(&s.weights)?;
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(TraceFileError::Malformed(format!(
                "negative weight at step {}",
                s.t
            )));
        }
        steps.push(BoostStep {
            iteration: s.t,
            row: s.row,
            eta: MistakeDichotomy::from_signs(&s.eta)?,
            edge,
            alpha: s.alpha,
            weights_after: WeightVector::from_components_unchecked(weights),
        });
    }
    let halt = rec.halt.map(|h| Halt {
        iteration: h.iteration,
        reason: h.reason,
        detail: h.detail,
    });
    Ok(BoostTrace::from_parts(
        Arc::new(pool),
        rule,
        initial,
        steps,
        halt,
    )?)
}

/// Serializes a trace document as pretty-printed JSON with a trailing newline.
pub fn to_json(doc: &TraceDocument) -> String {
    let rec = match &doc.trace {
        AnyTrace::Exact(t) => record(&doc.meta, t),
        AnyTrace::Float(t) => record(&doc.meta, t),
    };
    let mut out = serde_json::to_string_pretty(&rec).expect("trace records serialize");
    out.push('\n');
    out
}

/// Parses and validates a trace document; every step is replayed against
/// the weight update.
pub fn from_json(text: &str) -> Result<TraceDocument, TraceFileError> {
    let rec: FileRecord =
        serde_json::from_str(text).map_err(|e| TraceFileError::Malformed(e.to_string()))?;
    if rec.schema != SCHEMA || rec.version != VERSION {
        return Err(TraceFileError::UnsupportedVersion {
            schema: rec.schema,
            version: rec.version,
        });
    }
    let meta = TraceMeta {
        seed: rec.seed,
        source: rec.source.clone(),
    };
    let trace = match rec.mode {
        Mode::Exact => AnyTrace::Exact(rebuild(rec)?),
        Mode::Float => AnyTrace::Float(rebuild(rec)?),
    };
    Ok(TraceDocument { meta, trace })
}

pub fn write_file(path: &Path, doc: &TraceDocument) -> Result<(), TraceFileError> {
    std::fs::write(path, to_json(doc)).map_err(|e| TraceFileError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn read_file(path: &Path) -> Result<TraceDocument, TraceFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| TraceFileError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    from_json(&text)
}
