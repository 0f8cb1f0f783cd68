//! Text formats for solver output.
//!
//! Flow dump:
//!
//! ```text
//! s <objective> <used_residual> <unused_residual>
//! f <commodity> <tail> <head> <arc_id> <value>    (one line per nonzero entry)
//! ```
//!
//! All ids are 1-based. A verdict report starts with `verdict`, `objective`,
//! `used_residual` and `unused_residual` lines, then carries the flow dump
//! for a feasible verdict, or the certificate's nonzero heights
//! (`h <commodity> <vertex> <height>`) and congestions (`psi <arc_id> <value>`)
//! for an infeasible one. A verdict report can be read back as a flow dump.

use std::fmt::Write as _;

use crate::certify::{ResidualSummary, Verdict, VerdictKind};
use crate::error::FlowDumpError;
use crate::network::Instance;
use crate::solver::TraceRow;

/// Report record types that the flow-dump reader skips.
const REPORT_KEYS: &[&str] = &[
    "verdict",
    "objective",
    "used_residual",
    "unused_residual",
    "iterations",
    "converged",
    "method",
    "h",
    "psi",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FlowDump {
    pub summary: Option<ResidualSummary>,
    /// Commodity-major flow array; entries absent from the dump are 0.
    pub flows: Vec<f64>,
}

pub fn format_flow_dump(inst: &Instance, flows: &[f64], summary: &ResidualSummary) -> String {
    let m = inst.arc_count();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "s {} {} {}",
        summary.objective, summary.used_residual, summary.unused_residual
    );
    for k in 0..inst.commodity_count() {
        for (a, arc) in inst.arcs().iter().enumerate() {
            let v = flows[k * m + a];
            if v != 0.0 {
                let _ = writeln!(
                    out,
                    "f {} {} {} {} {}",
                    k + 1,
                    arc.tail + 1,
                    arc.head + 1,
                    a + 1,
                    v
                );
            }
        }
    }
    out
}

fn tok<'a, T: std::str::FromStr>(
    it: &mut impl Iterator<Item = &'a str>,
    line: usize,
    what: &str,
) -> Result<T, FlowDumpError> {
    let t = it.next().ok_or_else(|| FlowDumpError::Syntax {
        line,
        msg: format!("missing {what}"),
    })?;
    t.parse().map_err(|_| FlowDumpError::Syntax {
        line,
        msg: format!("bad {what} `{t}`"),
    })
}

/// Reads a flow dump against `inst`. Ids outside the instance, or an arc id
/// whose endpoints disagree with the instance, are dimension errors.
pub fn parse_flow_dump(inst: &Instance, text: &str) -> Result<FlowDump, FlowDumpError> {
    let m = inst.arc_count();
    let mut flows = vec![0.0; m * inst.commodity_count()];
    let mut seen = vec![false; flows.len()];
    let mut summary = None;
    let dim = |line: usize, msg: String| FlowDumpError::Dimension { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        match it.next().unwrap_or_default() {
            "s" => {
                summary = Some(ResidualSummary {
                    objective: tok(&mut it, line, "objective")?,
                    used_residual: tok(&mut it, line, "used residual")?,
                    unused_residual: tok(&mut it, line, "unused residual")?,
                });
            }
            "f" => {
                let k: usize = tok(&mut it, line, "commodity")?;
                let tail: usize = tok(&mut it, line, "tail")?;
                let head: usize = tok(&mut it, line, "head")?;
                let a: usize = tok(&mut it, line, "arc id")?;
                let value: f64 = tok(&mut it, line, "value")?;
                if k == 0 || k > inst.commodity_count() {
                    return Err(dim(
                        line,
                        format!("commodity {k} not in 1..={}", inst.commodity_count()),
                    ));
                }
                if a == 0 || a > m {
                    return Err(dim(line, format!("arc {a} not in 1..={m}")));
                }
                let arc = inst.arcs()[a - 1];
                if arc.tail + 1 != tail || arc.head + 1 != head {
                    return Err(dim(
                        line,
                        format!(
                            "arc {a} is ({}, {}), not ({tail}, {head})",
                            arc.tail + 1,
                            arc.head + 1
                        ),
                    ));
                }
                if !value.is_finite() {
                    return Err(FlowDumpError::Syntax {
                        line,
                        msg: format!("non-finite flow `{value}`"),
                    });
                }
                let slot = (k - 1) * m + (a - 1);
                if seen[slot] {
                    return Err(FlowDumpError::Syntax {
                        line,
                        msg: format!("duplicate entry for commodity {k} on arc {a}"),
                    });
                }
                seen[slot] = true;
                flows[slot] = value;
            }
            key if REPORT_KEYS.contains(&key) => continue,
            other => {
                return Err(FlowDumpError::Syntax {
                    line,
                    msg: format!("unknown record `{other}`"),
                })
            }
        }
        if it.next().is_some() {
            return Err(FlowDumpError::Syntax {
                line,
                msg: "trailing tokens".into(),
            });
        }
    }
    Ok(FlowDump { summary, flows })
}

pub fn format_verdict(inst: &Instance, verdict: &Verdict) -> String {
    let s = &verdict.summary;
    let mut out = String::new();
    let _ = writeln!(out, "verdict {}", verdict.kind);
    let _ = writeln!(out, "objective {}", s.objective);
    let _ = writeln!(out, "used_residual {}", s.used_residual);
    let _ = writeln!(out, "unused_residual {}", s.unused_residual);
    match verdict.kind {
        VerdictKind::Feasible => {
            if let Some(flow) = &verdict.flow {
                out.push_str(&format_flow_dump(inst, flow.flows(), s));
            }
        }
        VerdictKind::Infeasible => {
            if let Some(cert) = &verdict.certificate {
                for k in 0..inst.commodity_count() {
                    for i in 0..inst.vertex_count() {
                        let h = cert.height(i, k);
                        if h != 0.0 {
                            let _ = writeln!(out, "h {} {} {}", k + 1, i + 1, h);
                        }
                    }
                }
                for (a, &psi) in cert.congestions.iter().enumerate() {
                    if psi != 0.0 {
                        let _ = writeln!(out, "psi {} {}", a + 1, psi);
                    }
                }
            }
        }
        VerdictKind::Undecided => {}
    }
    out
}

pub fn format_trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("iteration,objective,used_residual,unused_residual\n");
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.iteration, r.objective, r.used_residual, r.unused_residual
        );
    }
    out
}
