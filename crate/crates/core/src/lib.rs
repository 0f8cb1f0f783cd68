//! Multi-commodity flow feasibility through stable pseudo-flows.
//!
//! Capacity and conservation constraints are both relaxed. Each arc carries
//! a congestion `ψ(f_a)` (its overload) and each vertex a per-commodity
//! height `h(Δ_ik)` (its excess). A pseudo-flow is *stable* when, for every
//! commodity, the height drop along each used arc equals the arc's
//! congestion and along every other arc is at most the congestion. Stable
//! pseudo-flows are exactly the minimizers of a convex objective; the
//! instance is feasible iff the minimum is zero, in which case the minimizer
//! is a feasible flow, and otherwise the minimizer certifies infeasibility.
//!
//! ```
//! use mcflow_core::{classify_default, solve, Instance, Profiles, SolverConfig, VerdictKind};
//!
//! let inst = Instance::parse("p mcf 2 1 1\na 1 2 1\nc 1 2 2\n").unwrap();
//! let cfg = SolverConfig::default();
//! let result = solve(&inst, &cfg, &Profiles::identity()).unwrap();
//! let verdict = classify_default(&inst, &result, cfg.tol);
//! assert_eq!(verdict.kind, VerdictKind::Infeasible);
//! assert!((verdict.summary.objective - 1.0 / 3.0).abs() < 1e-8);
//! ```

pub mod certify;
pub mod dump;
pub mod error;
pub mod generate;
pub mod network;
pub mod pseudoflow;
pub mod solver;

pub use certify::{
    classify, classify_default, default_zero_tol, oracle_feasibility, ResidualSummary, Verdict,
    VerdictKind,
};
pub use dump::{format_flow_dump, format_trace_csv, format_verdict, parse_flow_dump, FlowDump};
pub use error::{FlowDumpError, GenerateError, InstanceError, OracleError, ParseError, SolveError};
pub use generate::{desk_instance, generate_random_instance, GeneratorParams};
pub use network::{parse_instance, serialize_instance, Arc, Commodity, Instance};
pub use pseudoflow::{
    box_gradient, box_objective, check_feasible, congestion, default_use_threshold, excess,
    excesses, gradient, objective, projected_gradient_residual, stability_report, BoxGradient,
    FeasibilityCheck, Profile, Profiles, PseudoFlow, StabilityReport,
};
pub use solver::{
    coordinate_sweep, optimal_slack, solve, solve_coordinate, solve_coordinate_from, solve_pgd,
    solve_pgd_from, Init, Method, SolveResult, SolverConfig, TraceRow,
};
