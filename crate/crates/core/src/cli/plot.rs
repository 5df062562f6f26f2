use std::io::Write;

use super::{io_err, usage, CliError, PlotArgs};
use crate::figure::{render_svg, FigureSpec, ReferenceLine};
use crate::tracefile::read_file;

pub(super) fn parse_reference(text: &str) -> Result<Vec<ReferenceLine>, CliError> {
    match text.trim() {
        "golden" => Ok(vec![ReferenceLine::golden()]),
        "sqrt2" => Ok(ReferenceLine::sqrt2_pair().to_vec()),
        other => {
            let (value, label) = match other.split_once(':') {
                Some((v, l)) => (v, l.to_string()),
                None => (other, other.to_string()),
            };
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad reference line `{text}`")))?;
            Ok(vec![ReferenceLine { value, label }])
        }
    }
}

pub(super) fn cmd_plot(args: PlotArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut references = Vec::new();
    for r in &args.reference {
        references.extend(parse_reference(r)?);
    }
    let doc = read_file(&args.trace).map_err(io_err)?;
    let first = doc.trace.first_iteration();
    let edges = doc.trace.edges_f64();
    let skip = args
        .from
        .map(|f| f.saturating_sub(first))
        .unwrap_or(0)
        .min(edges.len());
    let mut spec = FigureSpec::edges(first + skip, edges[skip..].to_vec());
    spec.title = args.title.unwrap_or_default();
    spec.width = args.width;
    spec.height = args.height;
    spec.references = references;
    let svg = render_svg(&spec).map_err(io_err)?;
    std::fs::write(&args.out, svg)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", args.out.display())))?;
    writeln!(
        out,
        "wrote {} ({} points)",
        args.out.display(),
        spec.values.len()
    )
    .map_err(io_err)
}
