use thiserror::Error;

/// Violation of an [`Instance`](crate::Instance) invariant. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("instance needs at least one vertex")]
    NoVertices,
    #[error("arc {arc} is a self-loop on vertex {}", vertex + 1)]
    SelfLoop { arc: usize, vertex: usize },
    #[error("commodity {commodity} has source equal to sink (vertex {}); s_k != t_k is required", vertex + 1)]
    SourceIsSink { commodity: usize, vertex: usize },
    #[error("vertex id {id} out of range 1..={vertex_count}")]
    VertexOutOfRange { id: usize, vertex_count: usize },
    #[error("{what} must be finite and nonnegative, got {value}")]
    BadValue { what: &'static str, value: f64 },
}

/// Failure while reading the instance text format. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: InstanceError },
    #[error("missing problem line `p mcf <V> <A> <K>`")]
    MissingProblem,
    #[error("problem line declares {declared} {kind} lines, found {found}")]
    CountMismatch {
        kind: &'static str,
        declared: usize,
        found: usize,
    },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Invalid { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Failure while reading a flow dump against an instance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowDumpError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Dimension { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("{arcs} arcs requested but only {pairs} distinct ordered pairs exist")]
    TooManyArcs { arcs: usize, pairs: usize },
    #[error("invalid {what} range [{min}, {max}]")]
    BadRange {
        what: &'static str,
        min: f64,
        max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(
        "the box-constrained quadratic solvers require identity height and congestion profiles"
    )]
    UnsupportedProfiles,
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("initial pseudo-flow does not match the instance dimensions")]
    Dimension,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(
        "instance too large for the exact oracle ({vertices} vertices, {arcs} arcs, {commodities} commodities; limit {} / {} / {})",
        crate::certify::ORACLE_MAX_VERTICES,
        crate::certify::ORACLE_MAX_ARCS,
        crate::certify::ORACLE_MAX_COMMODITIES
    )]
    TooLarge {
        vertices: usize,
        arcs: usize,
        commodities: usize,
    },
}
