use std::io::Write;

use serde::Serialize;

use super::format::format_f64;
use super::{io_err, usage, CliError, FareyCommand};
use crate::farey::{
    cf_expansion, enumerate_orbits, orbit, periodic_point, uniqueness_report, word_matrix,
    FareyWord, OrbitKind, QuadraticIrrational, MAX_ENUMERATION_LENGTH,
};
use crate::scalar::Real;

const LONG_DIGITS: usize = 50;

#[derive(Serialize)]
struct ValueRecord {
    exact: String,
    decimal: String,
}

fn value_record(v: &QuadraticIrrational, long: bool) -> ValueRecord {
    ValueRecord {
        exact: v.to_string(),
        decimal: if long {
            v.to_decimal_string(LONG_DIGITS)
        } else {
            format_f64(v.to_f64())
        },
    }
}

#[derive(Serialize)]
struct ClassRecord {
    word: String,
    kind: OrbitKind,
    values: Vec<ValueRecord>,
}

fn enumerate(k: usize, long: bool, json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    if k == 0 || k > MAX_ENUMERATION_LENGTH {
        return Err(usage(format!(
            "--k must be between 1 and {MAX_ENUMERATION_LENGTH}"
        )));
    }
    let classes = enumerate_orbits(k).map_err(usage)?;
    let records: Vec<ClassRecord> = classes
        .iter()
        .map(|c| ClassRecord {
            word: c.word.to_string(),
            kind: c.kind,
            values: c.values.iter().map(|v| value_record(v, long)).collect(),
        })
        .collect();
    if json {
        let text = serde_json::to_string_pretty(&records).map_err(io_err)?;
        return writeln!(out, "{text}").map_err(io_err);
    }
    for r in &records {
        let kind = match r.kind {
            OrbitKind::Degenerate => "degenerate".to_string(),
            OrbitKind::Primitive => "primitive".to_string(),
            OrbitKind::Power { primitive_period } => format!("power of period {primitive_period}"),
        };
        writeln!(out, "{}: {kind}", r.word).map_err(io_err)?;
        for v in &r.values {
            writeln!(out, "  {} = {}", v.exact, v.decimal).map_err(io_err)?;
        }
    }
    let primitive = classes
        .iter()
        .filter(|c| c.kind == OrbitKind::Primitive)
        .count();
    writeln!(out, "{} classes, {primitive} primitive", classes.len()).map_err(io_err)
}

#[derive(Serialize)]
struct OrbitRecord {
    word: String,
    canonical: String,
    degenerate: bool,
    primitive_period: usize,
    matrix: [[String; 2]; 2],
    values: Vec<ValueRecord>,
    continued_fraction: Vec<String>,
}

fn single_orbit(
    text: &str,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let word: FareyWord = text.parse().map_err(usage)?;
    let point = periodic_point(&word).map_err(usage)?;
    let values = orbit(&word).map_err(usage)?;
    let m = word_matrix(&word);
    let cf = if point.degenerate {
        Vec::new()
    } else {
        cf_expansion(point.value.clone(), 12).map_err(usage)?
    };
    let record = OrbitRecord {
        word: word.to_string(),
        canonical: word.canonical().to_string(),
        degenerate: point.degenerate,
        primitive_period: point.primitive_period,
        matrix: [
            [m.a.to_string(), m.b.to_string()],
            [m.c.to_string(), m.d.to_string()],
        ],
        values: values.iter().map(|v| value_record(v, true)).collect(),
        continued_fraction: cf.iter().map(|t| t.to_string()).collect(),
    };
    if point.degenerate {
        writeln!(
            err,
            "warning: word {word} has only L letters; its orbit is the degenerate point 0"
        )
        .map_err(io_err)?;
    }
    if json {
        let text = serde_json::to_string_pretty(&record).map_err(io_err)?;
        return writeln!(out, "{text}").map_err(io_err);
    }
    let mut w = |s: String| -> Result<(), CliError> { writeln!(out, "{s}").map_err(io_err) };
    w(format!(
        "word: {} (canonical {})",
        record.word, record.canonical
    ))?;
    w(format!(
        "matrix: [[{}, {}], [{}, {}]]",
        record.matrix[0][0], record.matrix[0][1], record.matrix[1][0], record.matrix[1][1]
    ))?;
    w(format!("primitive period: {}", record.primitive_period))?;
    for (i, v) in record.values.iter().enumerate() {
        w(format!("x{i} = {} = {}", v.exact, v.decimal))?;
    }
    if !record.continued_fraction.is_empty() {
        w(format!(
            "continued fraction of x0: [0; {}]",
            record.continued_fraction.join(", ")
        ))?;
    }
    Ok(())
}

pub(super) fn cmd_farey(
    cmd: FareyCommand,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    match cmd {
        FareyCommand::Enumerate { k, exact, json } => enumerate(k, exact, json, out),
        FareyCommand::Orbit { word, json } => single_orbit(&word, json, out, err),
        FareyCommand::Uniqueness { max_k } => {
            if max_k == 0 || max_k > MAX_ENUMERATION_LENGTH {
                return Err(usage(format!(
                    "--max-k must be between 1 and {MAX_ENUMERATION_LENGTH}"
                )));
            }
            let report = uniqueness_report(max_k).map_err(usage)?;
            for (k, n) in &report.primitive_counts {
                writeln!(out, "k={k}: {n} primitive orbits").map_err(io_err)?;
            }
            writeln!(
                out,
                "{} values, {} collisions",
                report.total_values,
                report.collisions.len()
            )
            .map_err(io_err)?;
            for (v, a, b) in &report.collisions {
                writeln!(out, "  {v} shared by {a} and {b}").map_err(io_err)?;
            }
            if report.all_distinct() {
                Ok(())
            } else {
                Err(CliError::CheckFailed("orbit values collide".into()))
            }
        }
    }
}
