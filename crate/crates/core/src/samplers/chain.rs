//! Single-particle global-move dynamics: pick a particle uniformly, propose
//! a uniform new position, accept iff the hard constraint still holds.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::ModelParams;
use crate::rgg::{is_empty_graph, TorusConfiguration};
use crate::rng::{self, Purpose};

#[derive(Debug, Clone)]
pub struct ChainState {
    config: TorusConfiguration,
    pub steps_taken: u64,
    pub accepts: u64,
    scratch: Vec<f64>,
}

impl ChainState {
    /// Wraps a configuration that already satisfies `E_k`.
    pub fn new(config: TorusConfiguration) -> Result<Self> {
        if !is_empty_graph(&config) {
            return Err(invalid(
                "config",
                "initial configuration violates the hard constraint",
            ));
        }
        Ok(ChainState {
            config,
            steps_taken: 0,
            accepts: 0,
            scratch: Vec::new(),
        })
    }

    /// A valid starting state built by sequential random placement, falling
    /// back to a cubic lattice when placement jams.
    pub fn sequential_init<R: Rng + ?Sized>(
        params: &ModelParams,
        k: usize,
        rng: &mut R,
        tries_per_point: u64,
    ) -> Result<Self> {
        let mut config = TorusConfiguration::empty(*params);
        let mut x = vec![0.0; params.d];
        'place: for placed in 0..k {
            for _ in 0..tries_per_point {
                for v in x.iter_mut() {
                    *v = rng.random();
                }
                if !config.collides(&x, None) {
                    config.push_point(&x);
                    continue 'place;
                }
            }
            config = lattice_config(params, k).ok_or(Error::RejectionExhausted {
                k: placed + 1,
                attempts: tries_per_point,
            })?;
            break;
        }
        Ok(ChainState {
            config,
            steps_taken: 0,
            accepts: 0,
            scratch: Vec::new(),
        })
    }

    pub fn config(&self) -> &TorusConfiguration {
        &self.config
    }

    pub fn into_config(self) -> TorusConfiguration {
        self.config
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.steps_taken == 0 {
            1.0
        } else {
            self.accepts as f64 / self.steps_taken as f64
        }
    }

    /// One proposal. Returns whether it was accepted.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        self.steps_taken += 1;
        let k = self.config.len();
        if k == 0 {
            self.accepts += 1;
            return true;
        }
        let i = rng.random_range(0..k);
        let mut x = std::mem::take(&mut self.scratch);
        x.resize(self.config.dim(), 0.0);
        for v in x.iter_mut() {
            *v = rng.random();
        }
        let ok = !self.config.collides(&x, Some(i));
        if ok {
            self.config.point_mut(i).copy_from_slice(&x);
            self.accepts += 1;
        }
        self.scratch = x;
        ok
    }

    pub fn run<R: Rng + ?Sized>(&mut self, steps: u64, rng: &mut R) {
        for _ in 0..steps {
            self.step(rng);
        }
    }
}

/// `k` points on the cubic lattice of spacing `1/m`, `m = ceil(k^(1/d))`,
/// if that spacing exceeds `r`.
fn lattice_config(params: &ModelParams, k: usize) -> Option<TorusConfiguration> {
    let d = params.d;
    let mut m = (k as f64).powf(1.0 / d as f64).ceil().max(1.0) as usize;
    while m.checked_pow(d as u32).is_some_and(|t| t < k) {
        m += 1;
    }
    if 1.0 / m as f64 <= params.r {
        return None;
    }
    let mut config = TorusConfiguration::empty(*params);
    let mut x = vec![0.0; d];
    for idx in 0..k {
        let mut rem = idx;
        for v in x.iter_mut() {
            *v = (rem % m) as f64 / m as f64;
            rem /= m;
        }
        config.push_point(&x);
    }
    Some(config)
}

/// Advances `state` by `steps` moves using the stream seeded by `seed`.
pub fn mcmc_run(mut state: ChainState, steps: u64, seed: u64) -> ChainState {
    let mut rng = rng::stream(seed, Purpose::Chain, 0);
    state.run(steps, &mut rng);
    state
}

/// Burn-in used when none is given: `100 k ln(k+1)` moves.
pub fn default_burn_in(k: usize) -> u64 {
    (100.0 * k as f64 * ((k + 1) as f64).ln()).ceil() as u64
}
