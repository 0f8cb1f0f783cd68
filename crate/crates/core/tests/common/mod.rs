#![allow(dead_code)]

use mcflow_core::{generate_random_instance, GeneratorParams, Instance, PseudoFlow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random instance with real-valued data.
pub fn small_instance(rng: &mut ChaCha8Rng) -> Instance {
    let vertices = rng.random_range(2..=6);
    generate_random_instance(&GeneratorParams {
        vertices,
        arcs: rng.random_range(1..=10),
        commodities: rng.random_range(1..=3),
        capacity: (0.5, 4.0),
        demand: (0.5, 4.0),
        integral: false,
        allow_parallel: true,
        seed: rng.random(),
    })
    .unwrap()
}

/// Random pseudo-flow with flows in `[lo, hi]` and feasible random slacks.
pub fn random_flow(inst: &Instance, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> PseudoFlow {
    let flows = (0..inst.arc_count() * inst.commodity_count())
        .map(|_| rng.random_range(lo..=hi))
        .collect();
    let slacks = inst
        .arcs()
        .iter()
        .map(|a| rng.random_range(0.0..=a.capacity))
        .collect();
    PseudoFlow::from_parts(inst, flows, slacks).unwrap()
}

pub fn one_arc(capacity: f64, demand: f64) -> Instance {
    Instance::parse(&format!("p mcf 2 1 1\na 1 2 {capacity}\nc 1 2 {demand}\n")).unwrap()
}

/// `|a − b| ≤ tol · max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}
