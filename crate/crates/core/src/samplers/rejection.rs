use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::ModelParams;
use crate::rgg::TorusConfiguration;
use crate::rng::{self, Purpose};

/// An exact draw from the uniform law on `E_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionSample {
    pub config: TorusConfiguration,
    pub attempts: u64,
}

/// Draws `k` uniform points, restarting whenever two collide.
///
/// Points are placed one at a time and an attempt is abandoned at its first
/// collision; the accepted configuration is still an unconditioned uniform
/// draw restricted to `E_k`.
pub fn rejection_sample_with<R: Rng + ?Sized>(
    params: &ModelParams,
    k: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<RejectionSample> {
    let mut config = TorusConfiguration::empty(*params);
    let mut x = vec![0.0; params.d];
    for attempt in 1..=max_attempts.max(1) {
        config.truncate(0);
        let mut ok = true;
        for _ in 0..k {
            for v in x.iter_mut() {
                *v = rng.random();
            }
            if config.collides(&x, None) {
                ok = false;
                break;
            }
            config.push_point(&x);
        }
        if ok {
            return Ok(RejectionSample {
                config,
                attempts: attempt,
            });
        }
    }
    Err(Error::RejectionExhausted {
        k,
        attempts: max_attempts,
    })
}

pub fn rejection_sample_ek(
    k: usize,
    params: &ModelParams,
    seed: u64,
    max_attempts: u64,
) -> Result<RejectionSample> {
    let mut rng = rng::stream(seed, Purpose::Points, 0);
    rejection_sample_with(params, k, &mut rng, max_attempts)
}

/// Fraction of `attempts` independent uniform `k`-configurations in `E_k`.
pub(crate) fn pilot_acceptance(params: &ModelParams, k: usize, seed: u64, attempts: u64) -> f64 {
    let mut rng = rng::stream(seed, Purpose::Level, k as u64);
    let mut accepted = 0u64;
    for _ in 0..attempts {
        if rejection_sample_with(params, k, &mut rng, 1).is_ok() {
            accepted += 1;
        }
    }
    accepted as f64 / attempts as f64
}
