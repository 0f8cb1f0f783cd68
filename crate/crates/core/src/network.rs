//! Multi-commodity flow instances and their line-oriented text format.
//!
//! ```text
//! # comment
//! p mcf <V> <A> <K>
//! a <tail> <head> <capacity>     (A lines, arc ids 1..A in order)
//! c <source> <sink> <demand>     (K lines, commodity ids 1..K in order)
//! ```
//!
//! Vertex ids are 1-based in text and 0-based in memory.

use std::fmt::Write as _;

use crate::error::{InstanceError, ParseError};

/// A directed arc with capacity `u_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
}

/// An origin-destination demand `(s_k, t_k, d_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commodity {
    pub source: usize,
    pub sink: usize,
    pub demand: f64,
}

/// Directed network with arc capacities and commodity demands.
///
/// Parallel arcs are allowed and told apart by position. Self-loops and
/// commodities with `source == sink` are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    vertex_count: usize,
    arcs: Vec<Arc>,
    commodities: Vec<Commodity>,
}

fn check_value(what: &'static str, value: f64) -> Result<(), InstanceError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(InstanceError::BadValue { what, value })
    }
}

fn check_vertex(v: usize, vertex_count: usize) -> Result<(), InstanceError> {
    if v < vertex_count {
        Ok(())
    } else {
        Err(InstanceError::VertexOutOfRange {
            id: v + 1,
            vertex_count,
        })
    }
}

fn check_arc(index: usize, arc: &Arc, vertex_count: usize) -> Result<(), InstanceError> {
    check_vertex(arc.tail, vertex_count)?;
    check_vertex(arc.head, vertex_count)?;
    if arc.tail == arc.head {
        return Err(InstanceError::SelfLoop {
            arc: index,
            vertex: arc.tail,
        });
    }
    check_value("capacity", arc.capacity)
}

fn check_commodity(index: usize, c: &Commodity, vertex_count: usize) -> Result<(), InstanceError> {
    check_vertex(c.source, vertex_count)?;
    check_vertex(c.sink, vertex_count)?;
    if c.source == c.sink {
        return Err(InstanceError::SourceIsSink {
            commodity: index,
            vertex: c.source,
        });
    }
    check_value("demand", c.demand)
}

impl Instance {
    pub fn new(
        vertex_count: usize,
        arcs: Vec<Arc>,
        commodities: Vec<Commodity>,
    ) -> Result<Self, InstanceError> {
        if vertex_count == 0 {
            return Err(InstanceError::NoVertices);
        }
        for (i, a) in arcs.iter().enumerate() {
            check_arc(i, a, vertex_count)?;
        }
        for (k, c) in commodities.iter().enumerate() {
            check_commodity(k, c, vertex_count)?;
        }
        Ok(Self {
            vertex_count,
            arcs,
            commodities,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn commodity_count(&self) -> usize {
        self.commodities.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn max_demand(&self) -> f64 {
        self.commodities
            .iter()
            .map(|c| c.demand)
            .fold(0.0, f64::max)
    }

    pub fn total_demand(&self) -> f64 {
        self.commodities.iter().map(|c| c.demand).sum()
    }

    /// Parses the instance text format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_instance(text)
    }

    /// Canonical text form; `Instance::parse(&inst.to_text())` reproduces `inst`.
    pub fn to_text(&self) -> String {
        serialize_instance(self)
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_id(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse::<usize>()
        .map_err(|_| syntax(line, format!("bad {what} `{tok}`")))
}

fn parse_real(tok: Option<&str>, line: usize, what: &str) -> Result<f64, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse::<f64>()
        .map_err(|_| syntax(line, format!("bad {what} `{tok}`")))
}

fn vertex_index(id: usize, vertex_count: usize, line: usize) -> Result<usize, ParseError> {
    if id == 0 || id > vertex_count {
        Err(ParseError::Invalid {
            line,
            source: InstanceError::VertexOutOfRange { id, vertex_count },
        })
    } else {
        Ok(id - 1)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut arcs = Vec::new();
    let mut commodities = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let tag = toks.next().unwrap_or_default();

        let Some((vertex_count, _, _)) = header else {
            if tag != "p" {
                return Err(syntax(
                    line,
                    "expected problem line `p mcf <V> <A> <K>` first",
                ));
            }
            match toks.next() {
                Some("mcf") => {}
                other => {
                    return Err(syntax(
                        line,
                        format!("expected problem type `mcf`, got `{}`", other.unwrap_or("")),
                    ))
                }
            }
            let v = parse_id(toks.next(), line, "vertex count")?;
            let a = parse_id(toks.next(), line, "arc count")?;
            let k = parse_id(toks.next(), line, "commodity count")?;
            if v == 0 {
                return Err(ParseError::Invalid {
                    line,
                    source: InstanceError::NoVertices,
                });
            }
            header = Some((v, a, k));
            if toks.next().is_some() {
                return Err(syntax(line, "trailing tokens"));
            }
            continue;
        };

        match tag {
            "p" => return Err(syntax(line, "duplicate problem line")),
            "a" => {
                let tail = parse_id(toks.next(), line, "tail")?;
                let head = parse_id(toks.next(), line, "head")?;
                let capacity = parse_real(toks.next(), line, "capacity")?;
                let arc = Arc {
                    tail: vertex_index(tail, vertex_count, line)?,
                    head: vertex_index(head, vertex_count, line)?,
                    capacity,
                };
                check_arc(arcs.len(), &arc, vertex_count)
                    .map_err(|source| ParseError::Invalid { line, source })?;
                arcs.push(arc);
            }
            "c" => {
                let source = parse_id(toks.next(), line, "source")?;
                let sink = parse_id(toks.next(), line, "sink")?;
                let demand = parse_real(toks.next(), line, "demand")?;
                let c = Commodity {
                    source: vertex_index(source, vertex_count, line)?,
                    sink: vertex_index(sink, vertex_count, line)?,
                    demand,
                };
                check_commodity(commodities.len(), &c, vertex_count)
                    .map_err(|source| ParseError::Invalid { line, source })?;
                commodities.push(c);
            }
            other => return Err(syntax(line, format!("unknown line type `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(syntax(line, "trailing tokens"));
        }
    }

    let (vertex_count, n_arcs, n_commodities) = header.ok_or(ParseError::MissingProblem)?;
    if arcs.len() != n_arcs {
        return Err(ParseError::CountMismatch {
            kind: "arc",
            declared: n_arcs,
            found: arcs.len(),
        });
    }
    if commodities.len() != n_commodities {
        return Err(ParseError::CountMismatch {
            kind: "commodity",
            declared: n_commodities,
            found: commodities.len(),
        });
    }
    Ok(Instance {
        vertex_count,
        arcs,
        commodities,
    })
}

// `{}` on f64 prints the shortest string that parses back to the same value.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p mcf {} {} {}",
        inst.vertex_count,
        inst.arcs.len(),
        inst.commodities.len()
    );
    for a in &inst.arcs {
        let _ = writeln!(out, "a {} {} {}", a.tail + 1, a.head + 1, a.capacity);
    }
    for c in &inst.commodities {
        let _ = writeln!(out, "c {} {} {}", c.source + 1, c.sink + 1, c.demand);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(s: &str) -> String {
        s.split(" / ").collect::<Vec<_>>().join("\n")
    }

    #[test]
    fn smallest_instance() {
        let inst = parse_instance(&lines("p mcf 2 1 1 / a 1 2 1.0 / c 1 2 1.0")).unwrap();
        assert_eq!(inst.vertex_count(), 2);
        assert_eq!(
            inst.arcs(),
            &[Arc {
                tail: 0,
                head: 1,
                capacity: 1.0
            }]
        );
        assert_eq!(
            inst.commodities(),
            &[Commodity {
                source: 0,
                sink: 1,
                demand: 1.0
            }]
        );
    }

    #[test]
    fn self_loop_rejected_with_line() {
        let err = parse_instance(&lines("p mcf 2 1 1 / a 1 1 1.0 / c 1 2 1.0")).unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(matches!(
            err,
            ParseError::Invalid {
                source: InstanceError::SelfLoop { .. },
                ..
            }
        ));
    }

    #[test]
    fn source_equals_sink_rejected() {
        let err = parse_instance(&lines("p mcf 2 1 1 / a 1 2 1.0 / c 1 1 1.0")).unwrap_err();
        assert_eq!(err.line(), Some(3));
        assert!(matches!(
            err,
            ParseError::Invalid {
                source: InstanceError::SourceIsSink { .. },
                ..
            }
        ));
        assert!(err.to_string().contains("s_k != t_k"));
    }

    #[test]
    fn vertex_out_of_range() {
        let err = parse_instance(&lines("p mcf 2 1 1 / a 1 3 1.0 / c 1 2 1.0")).unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(matches!(
            err,
            ParseError::Invalid {
                source: InstanceError::VertexOutOfRange { id: 3, .. },
                ..
            }
        ));
        let err = parse_instance(&lines("p mcf 2 1 1 / a 0 2 1.0 / c 1 2 1.0")).unwrap_err();
        assert_eq!(err.line(), Some(2));
    }

    #[test]
    fn comments_and_malformed_lines() {
        let text = "# header\np mcf 3 1 0\n# mid\na 1 3 2.5\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.arc_count(), 1);
        assert_eq!(inst.commodity_count(), 0);

        let err = parse_instance("p mcf 2 1 0\na 1 x 1\n").unwrap_err();
        assert_eq!(err.line(), Some(2));
        let err = parse_instance("a 1 2 1\n").unwrap_err();
        assert_eq!(err.line(), Some(1));
        let err = parse_instance("p mcf 2 2 0\na 1 2 1\n").unwrap_err();
        assert!(matches!(err, ParseError::CountMismatch { kind: "arc", .. }));
        assert_eq!(
            parse_instance("# nothing\n").unwrap_err(),
            ParseError::MissingProblem
        );
        let err = parse_instance("p mcf 2 1 0\na 1 2 -1\n").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Invalid {
                source: InstanceError::BadValue { .. },
                ..
            }
        ));
        let err = parse_instance("p mcf 2 1 0\na 1 2 1 9\n").unwrap_err();
        assert_eq!(err.line(), Some(2));
    }

    #[test]
    fn serialize_parallel_arcs_in_order() {
        let inst = Instance::new(
            2,
            vec![
                Arc {
                    tail: 0,
                    head: 1,
                    capacity: 1.0,
                },
                Arc {
                    tail: 0,
                    head: 1,
                    capacity: 2.5,
                },
            ],
            vec![],
        )
        .unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(text, "p mcf 2 2 0\na 1 2 1\na 1 2 2.5\n");
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn canonical_text_of_smallest_instance() {
        let inst = parse_instance(&lines("p mcf 2 1 1 / a 1 2 1.0 / c 1 2 1.0")).unwrap();
        assert_eq!(inst.to_text(), "p mcf 2 1 1\na 1 2 1\nc 1 2 1\n");
        assert_eq!(Instance::parse(&inst.to_text()).unwrap(), inst);
    }
}
