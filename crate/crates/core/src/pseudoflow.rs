//! Pseudo-flows and the quantities defined on them: per-commodity vertex
//! excess and height, arc congestion, the convex objective in its integral
//! and box-QP forms, gradients, stability residuals, and the plain
//! capacity/conservation feasibility check.
//!
//! Flow arrays are commodity-major: entry `k * arc_count + a` is the flow of
//! commodity `k` on arc `a`. Per-vertex arrays are laid out the same way,
//! `k * vertex_count + i`.

use crate::network::Instance;

/// Nonnegative per-commodity arc flows plus the box-QP slack `r_a ∈ [0, u_a]`
/// of every arc. Arc totals are derived.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoFlow {
    arc_count: usize,
    commodity_count: usize,
    flows: Vec<f64>,
    slacks: Vec<f64>,
}

impl PseudoFlow {
    pub fn zero(inst: &Instance) -> Self {
        Self {
            arc_count: inst.arc_count(),
            commodity_count: inst.commodity_count(),
            flows: vec![0.0; inst.arc_count() * inst.commodity_count()],
            slacks: vec![0.0; inst.arc_count()],
        }
    }

    /// Builds a pseudo-flow from a commodity-major flow array. Returns `None`
    /// on a dimension mismatch, a negative or non-finite flow, or a slack
    /// outside `[0, u_a]`.
    pub fn from_parts(inst: &Instance, flows: Vec<f64>, slacks: Vec<f64>) -> Option<Self> {
        let ok = flows.len() == inst.arc_count() * inst.commodity_count()
            && slacks.len() == inst.arc_count()
            && flows.iter().all(|f| f.is_finite() && *f >= 0.0)
            && slacks
                .iter()
                .zip(inst.arcs())
                .all(|(r, a)| r.is_finite() && *r >= 0.0 && *r <= a.capacity);
        ok.then(|| Self {
            arc_count: inst.arc_count(),
            commodity_count: inst.commodity_count(),
            flows,
            slacks,
        })
    }

    /// Flows only; slacks are set to their optimal values.
    pub fn from_flows(inst: &Instance, flows: Vec<f64>) -> Option<Self> {
        let mut pf = Self::from_parts(inst, flows, vec![0.0; inst.arc_count()])?;
        pf.reset_slacks(inst);
        Some(pf)
    }

    pub fn matches(&self, inst: &Instance) -> bool {
        self.arc_count == inst.arc_count() && self.commodity_count == inst.commodity_count()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn commodity_count(&self) -> usize {
        self.commodity_count
    }

    pub fn flow(&self, commodity: usize, arc: usize) -> f64 {
        self.flows[commodity * self.arc_count + arc]
    }

    pub fn set_flow(&mut self, commodity: usize, arc: usize, value: f64) {
        assert!(value >= 0.0, "pseudo-flow entries are nonnegative");
        self.flows[commodity * self.arc_count + arc] = value;
    }

    pub fn flows(&self) -> &[f64] {
        &self.flows
    }

    pub(crate) fn flows_mut(&mut self) -> &mut [f64] {
        &mut self.flows
    }

    pub fn slacks(&self) -> &[f64] {
        &self.slacks
    }

    pub fn slack(&self, arc: usize) -> f64 {
        self.slacks[arc]
    }

    pub fn set_slack(&mut self, arc: usize, value: f64) {
        assert!(value >= 0.0, "slacks are nonnegative");
        self.slacks[arc] = value;
    }

    pub(crate) fn slacks_mut(&mut self) -> &mut [f64] {
        &mut self.slacks
    }

    /// `f_a`, the flow of all commodities on `arc`.
    pub fn arc_total(&self, arc: usize) -> f64 {
        (0..self.commodity_count).map(|k| self.flow(k, arc)).sum()
    }

    pub fn arc_totals(&self) -> Vec<f64> {
        arc_totals(self.arc_count, self.commodity_count, &self.flows)
    }

    /// Sets every slack to the minimizer of its box-QP term given the current
    /// arc totals.
    pub fn reset_slacks(&mut self, inst: &Instance) {
        let totals = self.arc_totals();
        for (a, arc) in inst.arcs().iter().enumerate() {
            self.slacks[a] = crate::solver::optimal_slack(totals[a], arc.capacity);
        }
    }

    /// `λ·self + (1−λ)·other`, entrywise on flows and slacks.
    pub fn blend(&self, other: &Self, lambda: f64) -> Self {
        assert!((0.0..=1.0).contains(&lambda));
        let mix = |x: &[f64], y: &[f64]| -> Vec<f64> {
            x.iter()
                .zip(y)
                .map(|(a, b)| (lambda * a + (1.0 - lambda) * b).max(0.0))
                .collect()
        };
        Self {
            arc_count: self.arc_count,
            commodity_count: self.commodity_count,
            flows: mix(&self.flows, &other.flows),
            slacks: mix(&self.slacks, &other.slacks),
        }
    }
}

fn arc_totals(arc_count: usize, commodity_count: usize, flows: &[f64]) -> Vec<f64> {
    let mut totals = vec![0.0; arc_count];
    for k in 0..commodity_count {
        for (t, f) in totals
            .iter_mut()
            .zip(&flows[k * arc_count..(k + 1) * arc_count])
        {
            *t += f;
        }
    }
    totals
}

/// A monotone profile `φ` together with its antiderivative `Φ(x) = ∫₀ˣ φ`.
#[derive(Debug, Clone, Copy)]
pub enum Profile {
    Identity,
    /// `c·x` with `c > 0`.
    Scaled(f64),
    /// `x·|x|`.
    SignedSquare,
    Custom {
        value: fn(f64) -> f64,
        integral: fn(f64) -> f64,
    },
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Identity => x,
            Profile::Scaled(c) => c * x,
            Profile::SignedSquare => x * x.abs(),
            Profile::Custom { value, .. } => value(x),
        }
    }

    /// `∫₀ˣ φ(w) dw`.
    pub fn integral(&self, x: f64) -> f64 {
        match *self {
            Profile::Identity => 0.5 * x * x,
            Profile::Scaled(c) => 0.5 * c * x * x,
            Profile::SignedSquare => x * x * x.abs() / 3.0,
            Profile::Custom { integral, .. } => integral(x),
        }
    }

    /// Sampled check that `φ(0) = 0` and `φ` is strictly increasing on
    /// `[lo, hi]`.
    fn check_increasing(&self, lo: f64, hi: f64) -> bool {
        const SAMPLES: usize = 257;
        if self.value(0.0) != 0.0 {
            return false;
        }
        let mut prev = self.value(lo);
        for s in 1..=SAMPLES {
            let x = lo + (hi - lo) * s as f64 / SAMPLES as f64;
            let v = self.value(x);
            if v.partial_cmp(&prev) != Some(std::cmp::Ordering::Greater) {
                return false;
            }
            prev = v;
        }
        true
    }
}

/// Height profile `h` applied to vertex excesses and congestion profile `g`
/// applied to arc overloads. Both default to the identity.
#[derive(Debug, Clone, Copy)]
pub struct Profiles {
    pub height: Profile,
    pub congestion: Profile,
}

impl Default for Profiles {
    fn default() -> Self {
        Self::identity()
    }
}

impl Profiles {
    pub const fn identity() -> Self {
        Self {
            height: Profile::Identity,
            congestion: Profile::Identity,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.height, Profile::Identity) && matches!(self.congestion, Profile::Identity)
    }

    /// Checks, by sampling, that `h` is strictly increasing through 0 and
    /// that `g(0) = 0` with `g` strictly increasing on nonnegative inputs.
    pub fn validate(&self) -> bool {
        self.height.check_increasing(-1e3, 1e3) && self.congestion.check_increasing(0.0, 1e3)
    }
}

/// Excess `Δ_ik` of every commodity at every vertex, commodity-major.
///
/// `Δ_ik` is the net inflow of commodity `k` at `i`, with `d_k` injected at
/// `s_k` and withdrawn at `t_k`. It vanishes everywhere exactly when `k`'s
/// flow conservation holds.
pub fn excesses(inst: &Instance, pf: &PseudoFlow) -> Vec<f64> {
    let n = inst.vertex_count();
    let m = inst.arc_count();
    let mut delta = vec![0.0; n * inst.commodity_count()];
    for (k, c) in inst.commodities().iter().enumerate() {
        let row = &mut delta[k * n..(k + 1) * n];
        row[c.source] += c.demand;
        row[c.sink] -= c.demand;
        for (a, arc) in inst.arcs().iter().enumerate() {
            let f = pf.flows[k * m + a];
            row[arc.tail] -= f;
            row[arc.head] += f;
        }
    }
    delta
}

pub fn excess(inst: &Instance, pf: &PseudoFlow, vertex: usize, commodity: usize) -> f64 {
    let c = inst.commodities()[commodity];
    let mut delta = 0.0;
    if vertex == c.source {
        delta += c.demand;
    }
    if vertex == c.sink {
        delta -= c.demand;
    }
    for (a, arc) in inst.arcs().iter().enumerate() {
        if arc.head == vertex {
            delta += pf.flow(commodity, a);
        }
        if arc.tail == vertex {
            delta -= pf.flow(commodity, a);
        }
    }
    delta
}

/// `ψ(f) = 0` for `f ≤ u`, else `g(f − u)`.
pub fn congestion(flow_total: f64, capacity: f64, profiles: &Profiles) -> f64 {
    if flow_total <= capacity {
        0.0
    } else {
        profiles.congestion.value(flow_total - capacity)
    }
}

/// Integral-form objective `Σ_a ∫₀^{f_a} ψ + Σ_{i,k} ∫₀^{Δ_ik} h`. Slacks are
/// ignored.
pub fn objective(inst: &Instance, pf: &PseudoFlow, profiles: &Profiles) -> f64 {
    let totals = pf.arc_totals();
    let arc_part: f64 = inst
        .arcs()
        .iter()
        .zip(&totals)
        .map(|(arc, &f)| profiles.congestion.integral((f - arc.capacity).max(0.0)))
        .sum();
    let vertex_part: f64 = excesses(inst, pf)
        .iter()
        .map(|&d| profiles.height.integral(d))
        .sum();
    arc_part + vertex_part
}

/// Box-QP objective `½Σ_a (f_a + r_a − u_a)² + ½Σ_{i,k} Δ_ik²` using the
/// stored slacks. Defined for identity profiles only.
pub fn box_objective(inst: &Instance, pf: &PseudoFlow) -> f64 {
    let totals = pf.arc_totals();
    let arc_part: f64 = inst
        .arcs()
        .iter()
        .zip(&totals)
        .zip(&pf.slacks)
        .map(|((arc, &f), &r)| {
            let e = f + r - arc.capacity;
            e * e
        })
        .sum();
    let vertex_part: f64 = excesses(inst, pf).iter().map(|d| d * d).sum();
    0.5 * (arc_part + vertex_part)
}

/// Gradient of [`objective`] with respect to every flow entry:
/// `ψ(f_a) + h(Δ_jk) − h(Δ_ik)` for arc `a = (i, j)`.
pub fn gradient(inst: &Instance, pf: &PseudoFlow, profiles: &Profiles) -> Vec<f64> {
    let totals = pf.arc_totals();
    let psi: Vec<f64> = inst
        .arcs()
        .iter()
        .zip(&totals)
        .map(|(arc, &f)| congestion(f, arc.capacity, profiles))
        .collect();
    let heights: Vec<f64> = excesses(inst, pf)
        .iter()
        .map(|&d| profiles.height.value(d))
        .collect();
    flow_gradient(inst, &psi, &heights)
}

fn flow_gradient(inst: &Instance, arc_term: &[f64], heights: &[f64]) -> Vec<f64> {
    let n = inst.vertex_count();
    let m = inst.arc_count();
    let mut grad = vec![0.0; m * inst.commodity_count()];
    for k in 0..inst.commodity_count() {
        let h = &heights[k * n..(k + 1) * n];
        for (a, arc) in inst.arcs().iter().enumerate() {
            grad[k * m + a] = arc_term[a] + h[arc.head] - h[arc.tail];
        }
    }
    grad
}

/// Gradient of the box-QP objective.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGradient {
    pub flows: Vec<f64>,
    pub slacks: Vec<f64>,
}

pub fn box_gradient(inst: &Instance, pf: &PseudoFlow) -> BoxGradient {
    let totals = pf.arc_totals();
    let slacks: Vec<f64> = inst
        .arcs()
        .iter()
        .enumerate()
        .map(|(a, arc)| totals[a] + pf.slacks[a] - arc.capacity)
        .collect();
    let flows = flow_gradient(inst, &slacks, &excesses(inst, pf));
    BoxGradient { flows, slacks }
}

/// `max |x − Π(x − ∇z)|` over flow entries, with `Π` the projection onto
/// `f ≥ 0` and `∇z` the integral-form gradient. Zero exactly at a minimizer.
pub fn projected_gradient_residual(inst: &Instance, pf: &PseudoFlow, profiles: &Profiles) -> f64 {
    gradient(inst, pf, profiles)
        .iter()
        .zip(&pf.flows)
        .map(|(g, f)| (f - (f - g).max(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Arc-use threshold scaled to the instance: `1e-9 · (1 + max_k d_k)`.
pub fn default_use_threshold(inst: &Instance) -> f64 {
    1e-9 * (1.0 + inst.max_demand())
}

/// Heights, congestions and the violation of both stability conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    vertex_count: usize,
    arc_count: usize,
    /// `h(Δ_ik)`, commodity-major.
    pub heights: Vec<f64>,
    /// `ψ(f_a)` per arc.
    pub congestions: Vec<f64>,
    /// Max over used `(k, a)` of `|h_i − h_j − ψ_a|`.
    pub used_arc_residual: f64,
    /// Max over all `(k, a)` of `max(0, h_i − h_j − ψ_a)`.
    pub unused_arc_residual: f64,
    /// `μ = ψ_a − h_i + h_j`, commodity-major.
    pub implied_multipliers: Vec<f64>,
    /// Integral-form objective.
    pub objective: f64,
}

impl StabilityReport {
    pub fn height(&self, vertex: usize, commodity: usize) -> f64 {
        self.heights[commodity * self.vertex_count + vertex]
    }

    pub fn multiplier(&self, commodity: usize, arc: usize) -> f64 {
        self.implied_multipliers[commodity * self.arc_count + arc]
    }

    pub fn max_residual(&self) -> f64 {
        self.used_arc_residual.max(self.unused_arc_residual)
    }
}

/// Evaluates both stability conditions. Commodity `k` uses arc `a` when its
/// flow there exceeds `use_threshold`.
pub fn stability_report(
    inst: &Instance,
    pf: &PseudoFlow,
    profiles: &Profiles,
    use_threshold: f64,
) -> StabilityReport {
    let m = inst.arc_count();
    let totals = pf.arc_totals();
    let congestions: Vec<f64> = inst
        .arcs()
        .iter()
        .zip(&totals)
        .map(|(arc, &f)| congestion(f, arc.capacity, profiles))
        .collect();
    let heights: Vec<f64> = excesses(inst, pf)
        .iter()
        .map(|&d| profiles.height.value(d))
        .collect();
    let implied_multipliers = flow_gradient(inst, &congestions, &heights);

    let mut used_arc_residual: f64 = 0.0;
    let mut unused_arc_residual: f64 = 0.0;
    for (idx, &mu) in implied_multipliers.iter().enumerate() {
        if pf.flows[idx] > use_threshold {
            used_arc_residual = used_arc_residual.max(mu.abs());
        }
        unused_arc_residual = unused_arc_residual.max(-mu);
    }

    let arc_part: f64 = inst
        .arcs()
        .iter()
        .zip(&totals)
        .map(|(arc, &f)| profiles.congestion.integral((f - arc.capacity).max(0.0)))
        .sum();
    let vertex_part: f64 = excesses(inst, pf)
        .iter()
        .map(|&d| profiles.height.integral(d))
        .sum();

    StabilityReport {
        vertex_count: inst.vertex_count(),
        arc_count: m,
        heights,
        congestions,
        used_arc_residual,
        unused_arc_residual,
        implied_multipliers,
        objective: arc_part + vertex_part,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityCheck {
    pub ok: bool,
    pub max_capacity_violation: f64,
    pub max_conservation_violation: f64,
    pub min_flow: f64,
}

/// Checks capacity, conservation and nonnegativity of a raw commodity-major
/// flow array (entries may be negative) within `tol`.
///
/// # Panics
/// If `flows.len()` is not `commodity_count * arc_count`.
pub fn check_feasible(inst: &Instance, flows: &[f64], tol: f64) -> FeasibilityCheck {
    let n = inst.vertex_count();
    let m = inst.arc_count();
    assert_eq!(
        flows.len(),
        m * inst.commodity_count(),
        "flow array dimension"
    );

    let totals = arc_totals(m, inst.commodity_count(), flows);
    let max_capacity_violation = inst
        .arcs()
        .iter()
        .zip(&totals)
        .map(|(arc, &f)| (f - arc.capacity).max(0.0))
        .fold(0.0, f64::max);

    let mut max_conservation_violation: f64 = 0.0;
    for (k, c) in inst.commodities().iter().enumerate() {
        let mut net = vec![0.0; n];
        net[c.source] += c.demand;
        net[c.sink] -= c.demand;
        for (a, arc) in inst.arcs().iter().enumerate() {
            net[arc.tail] -= flows[k * m + a];
            net[arc.head] += flows[k * m + a];
        }
        max_conservation_violation = net
            .iter()
            .fold(max_conservation_violation, |acc, d| acc.max(d.abs()));
    }

    let min_flow = flows.iter().copied().fold(f64::INFINITY, f64::min);
    let min_flow = if min_flow.is_finite() { min_flow } else { 0.0 };
    FeasibilityCheck {
        ok: max_capacity_violation <= tol && max_conservation_violation <= tol && min_flow >= -tol,
        max_capacity_violation,
        max_conservation_violation,
        min_flow,
    }
}
