use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use super::format::format_f64;
use super::{io_err, usage, AnalyzeArgs, CliError};
use crate::cycle::{
    check_thm_3wgt, detect_cycle, lattice_agreement, partition, subsums, Agreement, CycleConfig,
    CycleError, CycleReport,
};
use crate::engine::{run_from, BoostTrace};
use crate::farey::periodic_point;
use crate::scalar::{Real, Scalar};
use crate::simplex::{check_nabla, NablaStatus};
use crate::tracefile::{read_file, AnyTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckKind {
    #[serde(rename = "3wgt")]
    ThreeWeight,
    #[serde(rename = "wvals")]
    WeightValues,
    #[serde(rename = "gencyc")]
    GeneralCycle,
    #[serde(rename = "farey")]
    Farey,
    #[serde(rename = "nabla")]
    Nabla,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::ThreeWeight,
        CheckKind::WeightValues,
        CheckKind::GeneralCycle,
        CheckKind::Farey,
        CheckKind::Nabla,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::ThreeWeight => "3wgt",
            CheckKind::WeightValues => "wvals",
            CheckKind::GeneralCycle => "gencyc",
            CheckKind::Farey => "farey",
            CheckKind::Nabla => "nabla",
        }
    }
}

impl FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                format!("unknown check `{s}` (expected 3wgt, wvals, gencyc, farey, nabla or all)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: CheckKind,
    pub status: CheckStatus,
    pub detail: String,
    /// Iterations at which the check failed.
    pub failures: Vec<usize>,
}

impl CheckOutcome {
    fn new(check: CheckKind, status: CheckStatus, detail: impl Into<String>) -> Self {
        CheckOutcome {
            check,
            status,
            detail: detail.into(),
            failures: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub mode: crate::scalar::Mode,
    pub iterations: usize,
    pub first_iteration: usize,
    pub halt: Option<String>,
    pub cycle: Option<CycleReport>,
    pub checks: Vec<CheckOutcome>,
}

impl Analysis {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

fn three_weight<S: Scalar>(trace: &BoostTrace<S>, tol: f64) -> CheckOutcome {
    let kind = CheckKind::ThreeWeight;
    let rows = match check_thm_3wgt(trace, tol) {
        Ok(rows) => rows,
        Err(CycleError::TraceTooShort { .. }) => {
            return CheckOutcome::new(kind, CheckStatus::NotApplicable, "fewer than two steps")
        }
        Err(e) => return CheckOutcome::new(kind, CheckStatus::Fail, e.to_string()),
    };
    let failures: Vec<usize> = rows
        .iter()
        .filter(|r| !r.eq5_matches)
        .map(|r| r.iteration)
        .collect();
    let inconsistent: Vec<usize> = rows
        .iter()
        .filter(|r| !r.consistent())
        .map(|r| r.iteration)
        .collect();
    let mut out = if failures.is_empty() {
        CheckOutcome::new(
            kind,
            CheckStatus::Pass,
            format!(
                "three-weight form gives the edge at all {} steps",
                rows.len()
            ),
        )
    } else {
        let mut detail =
            format!("three-weight form differs from the edge at iterations {failures:?}");
        if inconsistent.is_empty() {
            detail.push_str("; each has a point misclassified twice in a row");
        } else {
            detail.push_str(&format!(
                "; the match does not track repeated mistakes at iterations {inconsistent:?}"
            ));
        }
        CheckOutcome::new(kind, CheckStatus::Fail, detail)
    };
    out.failures = failures;
    out
}

fn weight_values<S: Scalar>(trace: &BoostTrace<S>, tol: f64) -> CheckOutcome {
    let kind = CheckKind::WeightValues;
    let steps = trace.steps();
    let (mut checked, mut failures) = (0, Vec::new());
    for k in 1..steps.len() {
        let Ok(part) = partition(&steps[k - 1].eta, &steps[k].eta) else {
            continue;
        };
        let Ok(sums) = subsums(trace.weights_at(k - 1), &steps[k - 1].edge, &part) else {
            continue;
        };
        checked += 1;
        if !sums.matches_expected(&steps[k - 1].edge, tol)
            || !sums.edge().approx_eq(&steps[k].edge, tol)
        {
            failures.push(steps[k].iteration);
        }
    }
    let mut out = match (checked, failures.is_empty()) {
        (0, _) => CheckOutcome::new(
            kind,
            CheckStatus::NotApplicable,
            "no step satisfies the periodic learning condition",
        ),
        (n, true) => CheckOutcome::new(
            kind,
            CheckStatus::Pass,
            format!("subsums are r/2, 1/2, (1-r)/2 at all {n} qualifying steps"),
        ),
        (n, false) => CheckOutcome::new(
            kind,
            CheckStatus::Fail,
            format!(
                "subsums wrong at {} of {n} qualifying steps",
                failures.len()
            ),
        ),
    };
    out.failures = failures;
    out
}

fn general_cycle<S: Scalar>(
    trace: &BoostTrace<S>,
    report: Option<&CycleReport>,
    burn_in: usize,
    tol: f64,
) -> CheckOutcome {
    let kind = CheckKind::GeneralCycle;
    let Some(rep) = report else {
        return CheckOutcome::new(kind, CheckStatus::NotApplicable, "no cycle detected");
    };
    if !rep.nabla.holds() {
        return CheckOutcome::new(
            kind,
            CheckStatus::NotApplicable,
            "the periodic learning condition fails on the cycling window",
        );
    }
    // Near the phase a float trace is still converging geometrically, so the
    // comparison starts after the burn-in like the edge period measurement.
    let (start, end) = (rep.window.0.max(burn_in), rep.window.1);
    let k = rep.period;
    if end < start + k + 2 {
        return CheckOutcome::new(kind, CheckStatus::NotApplicable, "cycling window too short");
    }
    // Replay from one period later, numbered as if it started at the window.
    let first = trace.first_iteration();
    let replay = match run_from(
        trace.shared_pool(),
        trace.rule().clone(),
        trace.weights_at(start + k).clone(),
        first + start,
        end - start - k,
    ) {
        Ok(t) if t.len() == end - start - k => t,
        Ok(_) => return CheckOutcome::new(kind, CheckStatus::Fail, "replay halted early"),
        Err(e) => return CheckOutcome::new(kind, CheckStatus::Fail, e.to_string()),
    };
    let window = first + start..first + end - k;
    let anchor = window.start;
    match lattice_agreement(trace, &replay, window.clone(), anchor, tol) {
        Ok(Agreement::AgreeEverywhere) => CheckOutcome::new(
            kind,
            CheckStatus::Pass,
            format!(
                "trace and its replay shifted by {k} agree on iterations {}..{}",
                window.start, window.end
            ),
        ),
        Ok(Agreement::Disagreement {
            iteration,
            component,
            deviation,
        }) => {
            let mut out = CheckOutcome::new(
                kind,
                CheckStatus::Fail,
                format!("{component:?} differ by {deviation} at iteration {iteration}"),
            );
            out.failures.push(iteration);
            out
        }
        Err(e) => CheckOutcome::new(kind, CheckStatus::Fail, e.to_string()),
    }
}

fn farey_match(report: Option<&CycleReport>, tol: f64) -> CheckOutcome {
    let kind = CheckKind::Farey;
    let Some(rep) = report else {
        return CheckOutcome::new(kind, CheckStatus::NotApplicable, "no cycle detected");
    };
    let Some(word) = &rep.farey_word else {
        return CheckOutcome::new(
            kind,
            CheckStatus::Fail,
            "edge cycle follows neither L nor R steps",
        );
    };
    match periodic_point(word) {
        Ok(p) => {
            let dev = (p.value.to_f64() - rep.edge_values[0]).abs();
            let status = if dev <= tol.max(f64::EPSILON) {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            };
            CheckOutcome::new(
                kind,
                status,
                format!("word {word}, fixed point {} (deviation {dev:.3e})", p.value),
            )
        }
        Err(e) => CheckOutcome::new(kind, CheckStatus::Fail, e.to_string()),
    }
}

fn nabla<S: Scalar>(trace: &BoostTrace<S>, report: Option<&CycleReport>) -> CheckOutcome {
    let kind = CheckKind::Nabla;
    let (range, scope) = match report {
        Some(rep) => (rep.window.0..rep.window.1, "cycling window"),
        None => (0..trace.len(), "whole trace"),
    };
    if range.len() < 2 {
        return CheckOutcome::new(kind, CheckStatus::NotApplicable, "fewer than two steps");
    }
    match check_nabla(&trace.lattice(range)) {
        Ok(NablaStatus::Holds) => {
            CheckOutcome::new(kind, CheckStatus::Pass, format!("holds on the {scope}"))
        }
        Ok(NablaStatus::Violated { row, iteration }) => {
            let mut out = CheckOutcome::new(
                kind,
                CheckStatus::Fail,
                format!(
                    "point {row} misclassified at iterations {iteration} and {} ({scope})",
                    iteration + 1
                ),
            );
            out.failures.push(iteration);
            out
        }
        Err(e) => CheckOutcome::new(kind, CheckStatus::Fail, e.to_string()),
    }
}

fn analyze_typed<S: Scalar>(
    trace: &BoostTrace<S>,
    config: &CycleConfig,
    checks: &[CheckKind],
) -> Analysis {
    let cycle = detect_cycle(trace, config);
    let tol = config.tol;
    let burn_in = config.burn_in.unwrap_or(trace.len() / 2);
    let checks = checks
        .iter()
        .map(|&c| match c {
            CheckKind::ThreeWeight => three_weight(trace, tol),
            CheckKind::WeightValues => weight_values(trace, tol),
            CheckKind::GeneralCycle => general_cycle(trace, cycle.as_ref(), burn_in, tol),
            CheckKind::Farey => farey_match(cycle.as_ref(), tol),
            CheckKind::Nabla => nabla(trace, cycle.as_ref()),
        })
        .collect();
    Analysis {
        mode: S::MODE,
        iterations: trace.len(),
        first_iteration: trace.first_iteration(),
        halt: trace
            .halt()
            .map(|h| format!("{} at iteration {}", h.reason, h.iteration)),
        cycle,
        checks,
    }
}

/// Cycle detection plus the requested checks. Checks run on the whole trace
/// when no cycle is found; those that need a cycle report not-applicable.
pub fn analyze_trace(trace: &AnyTrace, config: &CycleConfig, checks: &[CheckKind]) -> Analysis {
    match trace {
        AnyTrace::Exact(t) => analyze_typed(t, config, checks),
        AnyTrace::Float(t) => analyze_typed(t, config, checks),
    }
}

fn print_text(a: &Analysis, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "mode: {}", a.mode)?;
    writeln!(
        out,
        "iterations: {} (from {})",
        a.iterations, a.first_iteration
    )?;
    if let Some(h) = &a.halt {
        writeln!(out, "halted: {h}")?;
    }
    match &a.cycle {
        None => writeln!(out, "no cycle detected")?,
        Some(c) => {
            writeln!(
                out,
                "cycle: period {} (edges {}), from iteration {}",
                c.period, c.edge_period, c.phase
            )?;
            let edges: Vec<String> = c.edge_values.iter().map(|&e| format_f64(e)).collect();
            writeln!(out, "edge values: {}", edges.join(", "))?;
            writeln!(out, "mean edge: {}", format_f64(c.mean_edge))?;
            writeln!(out, "rows: {:?}", c.rows)?;
            for w in c.weight_cycle.iter().take(12) {
                let w: Vec<String> = w.iter().take(8).map(|&x| format_f64(x)).collect();
                writeln!(out, "  weights: {}", w.join(", "))?;
            }
            match c.nabla {
                NablaStatus::Holds => writeln!(out, "periodic learning condition: holds")?,
                NablaStatus::Violated { row, iteration } => writeln!(
                    out,
                    "periodic learning condition: violated (point {row}, iteration {iteration})"
                )?,
            }
            match &c.farey_word {
                Some(w) => writeln!(out, "farey word: {w}")?,
                None => writeln!(out, "farey word: none")?,
            }
            writeln!(out, "edges distinct: {}", c.edges_distinct)?;
            if let Some(b) = c.beta_rational {
                writeln!(out, "contributions rational: {b}")?;
            }
            writeln!(out, "residual: {:.3e}", c.residual)?;
        }
    }
    for c in &a.checks {
        let status = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::NotApplicable => "N/A",
        };
        writeln!(out, "check {}: {status} - {}", c.check.name(), c.detail)?;
    }
    Ok(())
}

pub(super) fn parse_checks(items: &[String]) -> Result<Vec<CheckKind>, CliError> {
    let mut out: Vec<CheckKind> = Vec::new();
    for item in items.iter().filter(|s| !s.trim().is_empty()) {
        let kinds = if item.trim() == "all" {
            CheckKind::ALL.to_vec()
        } else {
            vec![item.parse::<CheckKind>().map_err(CliError::Usage)?]
        };
        for k in kinds {
            if !out.contains(&k) {
                out.push(k);
            }
        }
    }
    Ok(out)
}

pub(super) fn cmd_analyze(args: AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.tol.is_nan() || args.tol < 0.0 {
        return Err(usage("--tol must be non-negative"));
    }
    let checks = parse_checks(&args.check)?;
    let doc = read_file(&args.trace).map_err(io_err)?;
    let config = CycleConfig {
        tol: args.tol,
        min_repeats: args.min_repeats,
        burn_in: args.burn_in,
    };
    let analysis = analyze_trace(&doc.trace, &config, &checks);
    if args.json {
        let text = serde_json::to_string_pretty(&analysis).map_err(io_err)?;
        writeln!(out, "{text}").map_err(io_err)?;
    } else {
        print_text(&analysis, out).map_err(io_err)?;
    }
    if analysis.all_passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = analysis
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.check.name())
            .collect();
        Err(CliError::CheckFailed(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}
