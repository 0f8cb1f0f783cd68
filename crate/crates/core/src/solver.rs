//! Solvers for the box-constrained quadratic program
//!
//! ```text
//! min ½Σ_a (f_a + r_a − u_a)² + ½Σ_{i,k} Δ_ik²   s.t. f ≥ 0, 0 ≤ r ≤ u
//! ```
//!
//! whose minimizers are exactly the stable pseudo-flows under identity
//! profiles. Both solvers stop on the stability residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SolveError;
use crate::network::Instance;
use crate::pseudoflow::{
    box_gradient, box_objective, default_use_threshold, excesses, stability_report, Profiles,
    PseudoFlow, StabilityReport,
};

/// Exact curvature of the box objective along a single flow coordinate: the
/// arc term, the tail excess and the head excess each contribute 1.
pub const FLOW_CURVATURE: f64 = 3.0;

/// Smallest Armijo step tried before a projected-gradient step is abandoned.
const MIN_STEP: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Pgd,
    #[default]
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    #[default]
    Zero,
    /// Flows uniform in `[0, max_k d_k]`, slacks optimal.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Stop once both stability residuals are at most this.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub init: Init,
    pub armijo_beta: f64,
    pub armijo_sigma: f64,
    /// Arc-use threshold for the stability test; `None` uses
    /// [`default_use_threshold`].
    pub use_threshold: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Coordinate,
            tol: 1e-8,
            max_iters: 100_000,
            seed: 0,
            init: Init::Zero,
            armijo_beta: 0.5,
            armijo_sigma: 1e-4,
            use_threshold: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SolveError::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(SolveError::Config("max_iters must be at least 1".into()));
        }
        if !unit(self.armijo_beta) || !unit(self.armijo_sigma) {
            return Err(SolveError::Config(
                "Armijo parameters must lie in (0, 1)".into(),
            ));
        }
        if matches!(self.use_threshold, Some(t) if t.is_nan() || t < 0.0) {
            return Err(SolveError::Config(
                "use threshold must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    fn threshold(&self, inst: &Instance) -> f64 {
        self.use_threshold
            .unwrap_or_else(|| default_use_threshold(inst))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Box-QP objective of the iterate, slacks included.
    pub objective: f64,
    pub used_residual: f64,
    pub unused_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Final iterate with slacks reset to their optimal values.
    pub flow: PseudoFlow,
    pub report: StabilityReport,
    pub iterations: usize,
    pub converged: bool,
    /// One row for the starting point and one per iteration.
    pub trace: Vec<TraceRow>,
}

impl SolveResult {
    pub fn objective_trace(&self) -> Vec<(usize, f64)> {
        self.trace
            .iter()
            .map(|r| (r.iteration, r.objective))
            .collect()
    }
}

/// `argmin_{r ∈ [0, u]} ½(f + r − u)²`.
pub fn optimal_slack(flow_total: f64, capacity: f64) -> f64 {
    (capacity - flow_total).clamp(0.0, capacity)
}

/// Starting pseudo-flow for `cfg.init`.
pub fn initial_flow(inst: &Instance, cfg: &SolverConfig) -> PseudoFlow {
    let mut pf = PseudoFlow::zero(inst);
    if cfg.init == Init::Random {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let hi = inst.max_demand();
        for f in pf.flows_mut() {
            *f = if hi > 0.0 {
                rng.random_range(0.0..=hi)
            } else {
                0.0
            };
        }
    }
    pf.reset_slacks(inst);
    pf
}

pub fn solve(
    inst: &Instance,
    cfg: &SolverConfig,
    profiles: &Profiles,
) -> Result<SolveResult, SolveError> {
    match cfg.method {
        Method::Pgd => solve_pgd(inst, cfg, profiles),
        Method::Coordinate => solve_coordinate(inst, cfg, profiles),
    }
}

fn preflight(
    inst: &Instance,
    cfg: &SolverConfig,
    profiles: &Profiles,
    start: &PseudoFlow,
) -> Result<(), SolveError> {
    if !profiles.is_identity() {
        return Err(SolveError::UnsupportedProfiles);
    }
    cfg.validate()?;
    if !start.matches(inst) {
        return Err(SolveError::Dimension);
    }
    Ok(())
}

struct Tracker<'a> {
    inst: &'a Instance,
    profiles: &'a Profiles,
    threshold: f64,
    trace: Vec<TraceRow>,
}

impl Tracker<'_> {
    fn record(&mut self, iteration: usize, pf: &PseudoFlow) -> StabilityReport {
        let report = stability_report(self.inst, pf, self.profiles, self.threshold);
        self.trace.push(TraceRow {
            iteration,
            objective: box_objective(self.inst, pf),
            used_residual: report.used_arc_residual,
            unused_residual: report.unused_arc_residual,
        });
        report
    }

    fn finish(self, mut pf: PseudoFlow, iterations: usize, tol: f64) -> SolveResult {
        pf.reset_slacks(self.inst);
        let report = stability_report(self.inst, &pf, self.profiles, self.threshold);
        SolveResult {
            converged: report.max_residual() <= tol,
            flow: pf,
            report,
            iterations,
            trace: self.trace,
        }
    }
}

/// Projected gradient descent over `(f, r)` with Armijo backtracking from a
/// unit step.
pub fn solve_pgd(
    inst: &Instance,
    cfg: &SolverConfig,
    profiles: &Profiles,
) -> Result<SolveResult, SolveError> {
    solve_pgd_from(inst, cfg, profiles, initial_flow(inst, cfg))
}

pub fn solve_pgd_from(
    inst: &Instance,
    cfg: &SolverConfig,
    profiles: &Profiles,
    start: PseudoFlow,
) -> Result<SolveResult, SolveError> {
    preflight(inst, cfg, profiles, &start)?;
    let mut tracker = Tracker {
        inst,
        profiles,
        threshold: cfg.threshold(inst),
        trace: Vec::new(),
    };
    let mut x = start;
    let mut report = tracker.record(0, &x);
    let mut iterations = 0;
    while iterations < cfg.max_iters && report.max_residual() > cfg.tol {
        let Some(next) = pgd_step(inst, &x, cfg) else {
            break;
        };
        x = next;
        iterations += 1;
        report = tracker.record(iterations, &x);
    }
    Ok(tracker.finish(x, iterations, cfg.tol))
}

/// One projected-gradient step, or `None` when backtracking finds no step
/// satisfying the Armijo condition.
///
/// The objective change of a trial step `d` is evaluated as
/// `∇z·d + ½dᵀHd`, which stays accurate when the change is far below the
/// rounding error of `z` itself.
pub fn pgd_step(inst: &Instance, x: &PseudoFlow, cfg: &SolverConfig) -> Option<PseudoFlow> {
    let grad = box_gradient(inst, x);
    let mut alpha = 1.0;
    while alpha >= MIN_STEP {
        let mut trial = x.clone();
        let mut slope = 0.0;
        for (f, (&f0, &g)) in trial
            .flows_mut()
            .iter_mut()
            .zip(x.flows().iter().zip(&grad.flows))
        {
            *f = (f0 - alpha * g).max(0.0);
            slope += g * (*f - f0);
        }
        for (a, arc) in inst.arcs().iter().enumerate() {
            let r0 = x.slack(a);
            let g = grad.slacks[a];
            let r = (r0 - alpha * g).clamp(0.0, arc.capacity);
            trial.slacks_mut()[a] = r;
            slope += g * (r - r0);
        }
        if slope == 0.0 {
            return Some(trial);
        }
        let change = slope + 0.5 * curvature_along(inst, x, &trial);
        if change <= cfg.armijo_sigma * slope {
            return Some(trial);
        }
        alpha *= cfg.armijo_beta;
    }
    None
}

/// `dᵀHd` for the step `d = to − from` under the box objective's Hessian.
fn curvature_along(inst: &Instance, from: &PseudoFlow, to: &PseudoFlow) -> f64 {
    let n = inst.vertex_count();
    let m = inst.arc_count();
    let step: Vec<f64> = to
        .flows()
        .iter()
        .zip(from.flows())
        .map(|(b, a)| b - a)
        .collect();
    let mut arc_part = 0.0;
    for a in 0..m {
        let mut e = to.slack(a) - from.slack(a);
        for k in 0..inst.commodity_count() {
            e += step[k * m + a];
        }
        arc_part += e * e;
    }
    let mut vertex_part = 0.0;
    let mut delta = vec![0.0; n];
    for k in 0..inst.commodity_count() {
        delta.iter_mut().for_each(|d| *d = 0.0);
        for (a, arc) in inst.arcs().iter().enumerate() {
            delta[arc.tail] -= step[k * m + a];
            delta[arc.head] += step[k * m + a];
        }
        vertex_part += delta.iter().map(|d| d * d).sum::<f64>();
    }
    arc_part + vertex_part
}

/// Gauss–Seidel exact coordinate descent. Each sweep visits arcs in
/// ascending order, first resetting the arc's slack and then moving every
/// commodity's flow on it to its exact one-dimensional minimizer
/// `max(0, f − g/3)`.
pub fn solve_coordinate(
    inst: &Instance,
    cfg: &SolverConfig,
    profiles: &Profiles,
) -> Result<SolveResult, SolveError> {
    solve_coordinate_from(inst, cfg, profiles, initial_flow(inst, cfg))
}

pub fn solve_coordinate_from(
    inst: &Instance,
    cfg: &SolverConfig,
    profiles: &Profiles,
    start: PseudoFlow,
) -> Result<SolveResult, SolveError> {
    preflight(inst, cfg, profiles, &start)?;
    let mut tracker = Tracker {
        inst,
        profiles,
        threshold: cfg.threshold(inst),
        trace: Vec::new(),
    };
    let mut x = start;
    tracker.record(0, &x);
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        coordinate_sweep(inst, &mut x);
        iterations += 1;
        if tracker.record(iterations, &x).max_residual() <= cfg.tol {
            break;
        }
    }
    Ok(tracker.finish(x, iterations, cfg.tol))
}

/// Runs one sweep in place and returns the largest flow change.
pub fn coordinate_sweep(inst: &Instance, x: &mut PseudoFlow) -> f64 {
    let n = inst.vertex_count();
    let m = inst.arc_count();
    let mut totals = x.arc_totals();
    let mut delta = excesses(inst, x);
    let mut largest: f64 = 0.0;
    for (a, arc) in inst.arcs().iter().enumerate() {
        let r = optimal_slack(totals[a], arc.capacity);
        x.slacks_mut()[a] = r;
        for k in 0..inst.commodity_count() {
            let dk = &mut delta[k * n..(k + 1) * n];
            let f = x.flows()[k * m + a];
            let g = (totals[a] + r - arc.capacity) + dk[arc.head] - dk[arc.tail];
            let next = (f - g / FLOW_CURVATURE).max(0.0);
            let step = next - f;
            if step != 0.0 {
                x.flows_mut()[k * m + a] = next;
                totals[a] += step;
                dk[arc.tail] -= step;
                dk[arc.head] += step;
                largest = largest.max(step.abs());
            }
        }
    }
    largest
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Arc, Commodity};
    use crate::pseudoflow::{objective, Profile};

    fn one_arc(u: f64, d: f64) -> Instance {
        Instance::new(
            2,
            vec![Arc {
                tail: 0,
                head: 1,
                capacity: u,
            }],
            vec![Commodity {
                source: 0,
                sink: 1,
                demand: d,
            }],
        )
        .unwrap()
    }

    fn cfg(method: Method) -> SolverConfig {
        SolverConfig {
            method,
            ..Default::default()
        }
    }

    #[test]
    fn optimal_slack_examples() {
        assert_eq!(optimal_slack(0.0, 1.0), 1.0);
        assert_eq!(optimal_slack(2.0, 1.0), 0.0);
        assert_eq!(optimal_slack(0.5, 1.0), 0.5);
    }

    #[test]
    fn pgd_feasible_one_arc() {
        let inst = one_arc(1.0, 1.0);
        let res = solve_pgd(&inst, &cfg(Method::Pgd), &Profiles::identity()).unwrap();
        assert!(res.converged);
        assert!((res.flow.flow(0, 0) - 1.0).abs() < 1e-8);
        assert!(res.report.objective <= 1e-12);
        assert!(res.report.max_residual() <= 1e-8);
    }

    #[test]
    fn pgd_infeasible_one_arc() {
        let inst = one_arc(1.0, 2.0);
        let res = solve_pgd(&inst, &cfg(Method::Pgd), &Profiles::identity()).unwrap();
        assert!(res.converged);
        assert!((res.flow.flow(0, 0) - 5.0 / 3.0).abs() < 1e-6);
        assert!((res.report.objective - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn pgd_zero_demand_needs_no_iterations() {
        let inst = one_arc(1.0, 0.0);
        let res = solve_pgd(&inst, &cfg(Method::Pgd), &Profiles::identity()).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 0);
        assert_eq!(res.flow.flow(0, 0), 0.0);
        assert_eq!(res.report.objective, 0.0);
    }

    #[test]
    fn first_coordinate_sweep_by_hand() {
        let inst = one_arc(1.0, 1.0);
        let mut x = PseudoFlow::zero(&inst);
        let before = box_objective(&inst, &x);
        coordinate_sweep(&inst, &mut x);
        assert_eq!(x.slack(0), 1.0);
        assert!((x.flow(0, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!(box_objective(&inst, &x) < before);
    }

    #[test]
    fn coordinate_infeasible_one_arc() {
        let inst = one_arc(1.0, 2.0);
        let res = solve_coordinate(&inst, &cfg(Method::Coordinate), &Profiles::identity()).unwrap();
        assert!(res.converged);
        assert!((res.flow.flow(0, 0) - 5.0 / 3.0).abs() < 1e-6);
        assert!((res.report.objective - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn stable_start_is_a_fixed_point() {
        let inst = one_arc(1.0, 2.0);
        let start = PseudoFlow::from_flows(&inst, vec![5.0 / 3.0]).unwrap();
        let mut x = start.clone();
        assert!(coordinate_sweep(&inst, &mut x) < 1e-15);
        let res = solve_coordinate_from(
            &inst,
            &cfg(Method::Coordinate),
            &Profiles::identity(),
            start,
        )
        .unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn rejects_general_profiles_and_bad_config() {
        let inst = one_arc(1.0, 1.0);
        let sq = Profiles {
            height: Profile::Identity,
            congestion: Profile::SignedSquare,
        };
        assert_eq!(
            solve_pgd(&inst, &cfg(Method::Pgd), &sq).unwrap_err(),
            SolveError::UnsupportedProfiles
        );
        assert_eq!(
            solve_coordinate(&inst, &cfg(Method::Coordinate), &sq).unwrap_err(),
            SolveError::UnsupportedProfiles
        );
        let bad = SolverConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            solve(&inst, &bad, &Profiles::identity()),
            Err(SolveError::Config(_))
        ));
        let bad = SolverConfig {
            armijo_beta: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn random_init_is_seeded() {
        let inst = one_arc(1.0, 3.0);
        let c = SolverConfig {
            init: Init::Random,
            seed: 11,
            ..Default::default()
        };
        let a = initial_flow(&inst, &c);
        assert_eq!(a, initial_flow(&inst, &c));
        assert!((0.0..=3.0).contains(&a.flow(0, 0)));
        assert_eq!(a.slack(0), optimal_slack(a.flow(0, 0), 1.0));
        let res = solve(&inst, &c, &Profiles::identity()).unwrap();
        assert!(res.converged);
        // minimize ½(f−1)² + (3−f)² over f ≥ 1: f = 7/3, z = ½(4/3)² + (2/3)² = 4/3
        assert!((res.report.objective - 4.0 / 3.0).abs() < 1e-8);
        assert!((objective(&inst, &res.flow, &Profiles::identity()) - 4.0 / 3.0).abs() < 1e-8);
    }
}
