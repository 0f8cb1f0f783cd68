//! Seeded random instance generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GenerateError;
use crate::network::{Arc, Commodity, Instance};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub vertices: usize,
    pub arcs: usize,
    pub commodities: usize,
    pub capacity: (f64, f64),
    pub demand: (f64, f64),
    /// Draw integer capacities and demands from the ranges instead of reals.
    pub integral: bool,
    pub allow_parallel: bool,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            vertices: 6,
            arcs: 10,
            commodities: 3,
            capacity: (1.0, 5.0),
            demand: (1.0, 5.0),
            integral: false,
            allow_parallel: true,
            seed: 0,
        }
    }
}

struct Sampler {
    lo: f64,
    hi: f64,
    integral: bool,
}

impl Sampler {
    fn new(
        what: &'static str,
        (min, max): (f64, f64),
        integral: bool,
    ) -> Result<Self, GenerateError> {
        let bad = GenerateError::BadRange { what, min, max };
        if !(min.is_finite() && max.is_finite()) || min < 0.0 || min > max {
            return Err(bad);
        }
        if integral {
            let (lo, hi) = (min.ceil(), max.floor());
            if lo > hi {
                return Err(bad);
            }
            Ok(Self { lo, hi, integral })
        } else {
            Ok(Self {
                lo: min,
                hi: max,
                integral,
            })
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else if self.integral {
            rng.random_range(self.lo as u64..=self.hi as u64) as f64
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }
}

fn distinct_pair(rng: &mut impl Rng, n: usize) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

pub fn generate_random_instance(params: &GeneratorParams) -> Result<Instance, GenerateError> {
    let n = params.vertices;
    if n < 2 {
        return Err(GenerateError::TooFewVertices(n));
    }
    let pairs = n * (n - 1);
    if !params.allow_parallel && params.arcs > pairs {
        return Err(GenerateError::TooManyArcs {
            arcs: params.arcs,
            pairs,
        });
    }
    let cap = Sampler::new("capacity", params.capacity, params.integral)?;
    let dem = Sampler::new("demand", params.demand, params.integral)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let endpoints: Vec<(usize, usize)> = if params.allow_parallel {
        (0..params.arcs)
            .map(|_| distinct_pair(&mut rng, n))
            .collect()
    } else {
        let all: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        rand::seq::index::sample(&mut rng, pairs, params.arcs)
            .into_iter()
            .map(|i| all[i])
            .collect()
    };
    let arcs = endpoints
        .into_iter()
        .map(|(tail, head)| Arc {
            tail,
            head,
            capacity: cap.sample(&mut rng),
        })
        .collect();
    let commodities = (0..params.commodities)
        .map(|_| {
            let (source, sink) = distinct_pair(&mut rng, n);
            Commodity {
                source,
                sink,
                demand: dem.sample(&mut rng),
            }
        })
        .collect();
    Ok(Instance::new(n, arcs, commodities).expect("generator produces valid instances"))
}

/// Instance `index` of the seeded desk-scale batch used for oracle
/// verification: 3..=6 vertices, up to 10 arcs, 1..=3 commodities, integer
/// capacities and demands in [1, 5].
pub fn desk_instance(seed: u64, index: usize) -> Instance {
    let mixed = seed
        ^ (index as u64)
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    let vertices = rng.random_range(3..=6);
    let arcs = rng.random_range(vertices..=10);
    let commodities = rng.random_range(1..=3);
    let params = GeneratorParams {
        vertices,
        arcs,
        commodities,
        capacity: (1.0, 5.0),
        demand: (1.0, 5.0),
        integral: true,
        allow_parallel: true,
        seed: rng.random(),
    };
    generate_random_instance(&params).expect("desk parameters are valid")
}
