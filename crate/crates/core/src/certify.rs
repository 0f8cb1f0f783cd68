//! Feasibility verdicts from solver output, and an exact reference oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::OracleError;
use crate::network::Instance;
use crate::pseudoflow::{check_feasible, PseudoFlow, StabilityReport};
use crate::solver::SolveResult;

pub const ORACLE_MAX_VERTICES: usize = 8;
pub const ORACLE_MAX_ARCS: usize = 12;
pub const ORACLE_MAX_COMMODITIES: usize = 3;

/// Tolerance a returned feasible flow must meet under [`check_feasible`].
pub const FEASIBLE_FLOW_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Feasible,
    Infeasible,
    Undecided,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Feasible => "FEASIBLE",
            VerdictKind::Infeasible => "INFEASIBLE",
            VerdictKind::Undecided => "UNDECIDED",
        }
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSummary {
    pub objective: f64,
    pub used_residual: f64,
    pub unused_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Present iff `kind` is `Feasible`.
    pub flow: Option<PseudoFlow>,
    /// The nonzero-stable pseudo-flow's report; present iff `kind` is
    /// `Infeasible`.
    pub certificate: Option<StabilityReport>,
    pub summary: ResidualSummary,
}

/// `1e-9 · (1 + Σ_k d_k)²`; the objective is quadratic in flow magnitude.
pub fn default_zero_tol(inst: &Instance) -> f64 {
    let scale = 1.0 + inst.total_demand();
    1e-9 * scale * scale
}

/// Reads a solve result as a feasibility verdict.
///
/// A converged result whose residuals are within `stab_tol` is feasible when
/// its objective is at most `zero_tol` (and its flow passes the capacity and
/// conservation check at [`FEASIBLE_FLOW_TOL`]), and infeasible when the
/// objective exceeds `10 · zero_tol`. Everything else is undecided.
pub fn classify(inst: &Instance, result: &SolveResult, zero_tol: f64, stab_tol: f64) -> Verdict {
    let report = &result.report;
    let summary = ResidualSummary {
        objective: report.objective,
        used_residual: report.used_arc_residual,
        unused_residual: report.unused_arc_residual,
    };
    let stable = result.converged && report.max_residual() <= stab_tol;
    let undecided = Verdict {
        kind: VerdictKind::Undecided,
        flow: None,
        certificate: None,
        summary,
    };
    if !stable {
        return undecided;
    }
    if report.objective <= zero_tol {
        if check_feasible(inst, result.flow.flows(), FEASIBLE_FLOW_TOL).ok {
            Verdict {
                kind: VerdictKind::Feasible,
                flow: Some(result.flow.clone()),
                certificate: None,
                summary,
            }
        } else {
            undecided
        }
    } else if report.objective > 10.0 * zero_tol {
        Verdict {
            kind: VerdictKind::Infeasible,
            flow: None,
            certificate: Some(report.clone()),
            summary,
        }
    } else {
        undecided
    }
}

pub fn classify_default(inst: &Instance, result: &SolveResult, solver_tol: f64) -> Verdict {
    classify(inst, result, default_zero_tol(inst), solver_tol)
}

/// Exact feasibility of the capacity, conservation and nonnegativity system,
/// decided by phase one of the simplex method in rational arithmetic. Only
/// desk-scale instances are accepted.
pub fn oracle_feasibility(inst: &Instance) -> Result<bool, OracleError> {
    let (v, a, k) = (
        inst.vertex_count(),
        inst.arc_count(),
        inst.commodity_count(),
    );
    if v > ORACLE_MAX_VERTICES || a > ORACLE_MAX_ARCS || k > ORACLE_MAX_COMMODITIES {
        return Err(OracleError::TooLarge {
            vertices: v,
            arcs: a,
            commodities: k,
        });
    }
    Ok(phase_one_feasible(&equality_system(inst)))
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("instance values are finite")
}

/// Rows of `A x = b, x ≥ 0` over columns `[flows (commodity-major) | capacity slacks]`.
fn equality_system(inst: &Instance) -> Vec<(Vec<BigRational>, BigRational)> {
    let (n, m, kk) = (
        inst.vertex_count(),
        inst.arc_count(),
        inst.commodity_count(),
    );
    let cols = m * kk + m;
    let one = || BigRational::from_integer(BigInt::from(1));
    let mut rows = Vec::with_capacity(m + n * kk);

    for (a, arc) in inst.arcs().iter().enumerate() {
        let mut row = vec![BigRational::zero(); cols];
        for k in 0..kk {
            row[k * m + a] = one();
        }
        row[m * kk + a] = one();
        rows.push((row, rational(arc.capacity)));
    }
    for (k, c) in inst.commodities().iter().enumerate() {
        for i in 0..n {
            let mut row = vec![BigRational::zero(); cols];
            for (a, arc) in inst.arcs().iter().enumerate() {
                if arc.tail == i {
                    row[k * m + a] += one();
                }
                if arc.head == i {
                    row[k * m + a] -= one();
                }
            }
            let mut rhs = BigRational::zero();
            if i == c.source {
                rhs += rational(c.demand);
            }
            if i == c.sink {
                rhs -= rational(c.demand);
            }
            rows.push((row, rhs));
        }
    }
    rows
}

/// Minimizes the sum of one artificial per row from the all-artificial
/// basis, using Bland's rule. The system is feasible iff that minimum is 0.
fn phase_one_feasible(system: &[(Vec<BigRational>, BigRational)]) -> bool {
    let rows = system.len();
    if rows == 0 {
        return true;
    }
    let structural = system[0].0.len();
    let width = structural + rows;

    // tableau[r] = [coefficients | rhs]
    let mut tableau: Vec<Vec<BigRational>> = system
        .iter()
        .enumerate()
        .map(|(r, (coeffs, rhs))| {
            let negate = rhs.is_negative();
            let mut row: Vec<BigRational> = coeffs
                .iter()
                .map(|c| if negate { -c.clone() } else { c.clone() })
                .collect();
            row.extend((0..rows).map(|j| {
                if j == r {
                    BigRational::from_integer(BigInt::from(1))
                } else {
                    BigRational::zero()
                }
            }));
            row.push(if negate { -rhs.clone() } else { rhs.clone() });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (structural..width).collect();

    // Reduced costs of the phase-one objective; last entry is minus its value.
    let mut cost = vec![BigRational::zero(); width + 1];
    for row in &tableau {
        for (j, x) in row.iter().enumerate() {
            if j < structural || j == width {
                cost[j] -= x;
            }
        }
    }

    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (r, row) in tableau.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width] / &row[enter];
            let better = match &leave {
                None => true,
                Some((best_r, best)) => {
                    ratio < *best || (ratio == *best && basis[r] < basis[*best_r])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // Phase one is bounded below by 0, so a pivot row always exists.
        let (pivot_row, _) = leave.expect("phase-one objective is bounded");
        let pivot = tableau[pivot_row][enter].clone();
        for x in tableau[pivot_row].iter_mut() {
            *x /= &pivot;
        }
        let pivot_vals = tableau[pivot_row].clone();
        for (r, row) in tableau.iter_mut().enumerate() {
            if r == pivot_row || row[enter].is_zero() {
                continue;
            }
            let factor = row[enter].clone();
            for (x, p) in row.iter_mut().zip(&pivot_vals) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let factor = cost[enter].clone();
            for (x, p) in cost.iter_mut().zip(&pivot_vals) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        basis[pivot_row] = enter;
    }
    cost[width].is_zero()
}
