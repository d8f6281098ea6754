//! Conditional sampling from the hard-sphere law and Monte Carlo estimates of
//! `Pr[E_n]`, `E[V_k | E_k]` and the repulsion gap.
//!
//! Replica `i` always draws from the streams `(seed, *, i)` and replica
//! results are reduced in index order, so every estimate is a pure function
//! of its inputs regardless of the rayon pool size.

mod chain;
mod rejection;

pub use chain::{default_burn_in, mcmc_run, ChainState};
pub use rejection::{rejection_sample_ek, rejection_sample_with, RejectionSample};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::geometry::ModelParams;
use crate::rgg::{arc_union_length, TorusConfiguration};
use crate::rng::{self, child_seed, Purpose};

/// Every statistical pass/fail check uses this many standard errors.
pub const CONFIDENCE_RADIUS: f64 = 4.0;

/// Below this pilot acceptance rate the Markov chain replaces rejection.
pub const REJECTION_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    NaiveMc,
    Telescoping,
    Exact,
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateMethod::NaiveMc => "naive-mc",
            EstimateMethod::Telescoping => "telescoping",
            EstimateMethod::Exact => "exact",
        })
    }
}

impl FromStr for EstimateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" | "naive-mc" => Ok(EstimateMethod::NaiveMc),
            "telescoping" => Ok(EstimateMethod::Telescoping),
            "exact" => Ok(EstimateMethod::Exact),
            other => Err(invalid("method", format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Rejection while the pilot acceptance rate stays above
    /// [`REJECTION_FLOOR`], the Markov chain otherwise.
    Auto,
    Rejection,
    Mcmc,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Auto => "auto",
            Backend::Rejection => "rejection",
            Backend::Mcmc => "mcmc",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "rejection" => Ok(Backend::Rejection),
            "mcmc" | "chain" => Ok(Backend::Mcmc),
            other => Err(invalid("backend", format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub method: EstimateMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backend>,
}

impl Estimate {
    pub fn exact(value: f64, seed: u64) -> Self {
        Estimate {
            mean: value,
            stderr: 0.0,
            samples: 0,
            seed,
            method: EstimateMethod::Exact,
            backend: None,
        }
    }

    /// True iff `target` lies within [`CONFIDENCE_RADIUS`] standard errors.
    pub fn agrees_with(&self, target: f64) -> bool {
        (self.mean - target).abs() <= CONFIDENCE_RADIUS * self.stderr + 1e-12
    }

    /// Agreement of two independent estimates within the combined radius.
    pub fn agrees_with_estimate(&self, other: &Estimate) -> bool {
        let se = self.stderr.hypot(other.stderr);
        (self.mean - other.mean).abs() <= CONFIDENCE_RADIUS * se + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub backend: Backend,
    /// Uniform probes per conditional sample when `d >= 2`.
    pub probes: usize,
    pub max_attempts: u64,
    pub pilot_attempts: u64,
    /// Chain burn-in; `None` means [`default_burn_in`].
    pub burn_in: Option<u64>,
    /// Moves between recorded chain samples; `None` means `k`.
    pub thinning: Option<u64>,
    pub samples_per_chain: usize,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            backend: Backend::Auto,
            probes: 1_000,
            max_attempts: 1_000_000,
            pilot_attempts: 4_000,
            burn_in: None,
            thinning: None,
            samples_per_chain: 1,
        }
    }
}

impl SamplerOptions {
    pub fn with_backend(self, backend: Backend) -> Self {
        SamplerOptions { backend, ..self }
    }
}

const PILOT_TAG: u64 = 0x9170_7000;

/// Picks the concrete backend for level `k`.
pub fn resolve_backend(
    params: &ModelParams,
    k: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Backend {
    match opts.backend {
        Backend::Auto if k <= 1 => Backend::Rejection,
        Backend::Auto => {
            let rate = rejection::pilot_acceptance(
                params,
                k,
                child_seed(seed, PILOT_TAG),
                opts.pilot_attempts.max(1),
            );
            if rate >= REJECTION_FLOOR {
                Backend::Rejection
            } else {
                Backend::Mcmc
            }
        }
        b => b,
    }
}

/// Evaluates `f` on one conditional sample of `E_k` per replica (averaged
/// over the recorded samples of a chain) and returns the per-replica values
/// in replica order.
fn map_conditional<F>(
    params: &ModelParams,
    k: usize,
    replicas: usize,
    seed: u64,
    opts: &SamplerOptions,
    backend: Backend,
    f: F,
) -> Result<Vec<f64>>
where
    F: Fn(&TorusConfiguration, &mut ChaCha8Rng) -> f64 + Sync,
{
    let burn_in = opts.burn_in.unwrap_or_else(|| default_burn_in(k));
    let thinning = opts.thinning.unwrap_or(k as u64).max(1);
    let per_chain = opts.samples_per_chain.max(1);

    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let i = i as u64;
            let mut probe_rng = rng::stream(seed, Purpose::Probes, i);
            match backend {
                Backend::Mcmc => {
                    let mut chain_rng = rng::stream(seed, Purpose::Chain, i);
                    let mut state =
                        ChainState::sequential_init(params, k, &mut chain_rng, opts.max_attempts)?;
                    state.run(burn_in, &mut chain_rng);
                    let mut acc = 0.0;
                    for j in 0..per_chain {
                        if j > 0 {
                            state.run(thinning, &mut chain_rng);
                        }
                        acc += f(state.config(), &mut probe_rng);
                    }
                    Ok(acc / per_chain as f64)
                }
                _ => {
                    let mut rng = rng::stream(seed, Purpose::Points, i);
                    let s = rejection_sample_with(params, k, &mut rng, opts.max_attempts)?;
                    Ok(f(&s.config, &mut probe_rng))
                }
            }
        })
        .collect()
}

/// One draw from `E_k` with the backend chosen for `(params, k, seed)`;
/// the same draw replica 0 of [`conditional_coverage`] would use.
pub fn sample_ek(
    params: &ModelParams,
    k: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<(TorusConfiguration, Backend)> {
    let backend = resolve_backend(params, k, seed, opts);
    let config = match backend {
        Backend::Mcmc => {
            let mut rng = rng::stream(seed, Purpose::Chain, 0);
            let mut state = ChainState::sequential_init(params, k, &mut rng, opts.max_attempts)?;
            state.run(opts.burn_in.unwrap_or_else(|| default_burn_in(k)), &mut rng);
            state.into_config()
        }
        _ => {
            let mut rng = rng::stream(seed, Purpose::Points, 0);
            rejection_sample_with(params, k, &mut rng, opts.max_attempts)?.config
        }
    };
    Ok((config, backend))
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Covered fraction of one configuration: exact in `d = 1`, the hit rate of
/// `probes` fresh uniform points otherwise.
fn coverage_sample<R: Rng + ?Sized>(c: &TorusConfiguration, probes: usize, rng: &mut R) -> f64 {
    if c.dim() == 1 {
        return arc_union_length(c.coords(), c.params.r);
    }
    let mut x = vec![0.0; c.dim()];
    let mut hits = 0usize;
    for _ in 0..probes {
        for v in x.iter_mut() {
            *v = rng.random();
        }
        if c.collides(&x, None) {
            hits += 1;
        }
    }
    hits as f64 / probes as f64
}

/// Monte Carlo estimate of `E[V_k | E_k]`.
pub fn conditional_coverage(
    k: usize,
    params: &ModelParams,
    replicas: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<Estimate> {
    match k {
        0 => return Ok(Estimate::exact(0.0, seed)),
        1 => return Ok(Estimate::exact(params.p, seed)),
        _ => {}
    }
    if replicas == 0 {
        return Err(invalid("replicas", "need at least one replica"));
    }
    if params.d > 1 && opts.probes == 0 {
        return Err(Error::NoProbes { d: params.d });
    }
    let backend = resolve_backend(params, k, seed, opts);
    let values = map_conditional(params, k, replicas, seed, opts, backend, |c, rng| {
        coverage_sample(c, opts.probes, rng)
    })?;
    let (mean, stderr) = mean_and_stderr(&values);
    Ok(Estimate {
        mean,
        stderr,
        samples: replicas as u64,
        seed,
        method: EstimateMethod::NaiveMc,
        backend: Some(backend),
    })
}

pub const MIN_REPLICAS: usize = 100;

/// Estimates `Pr[E_n] = Z_d(n, r)` for `n = params.n`.
///
/// `NaiveMc` counts i.i.d. configurations in `E_n`. `Telescoping` multiplies
/// the estimated factors `E[1 - V_k | E_k]` for `k = 1..n-1`, each from its
/// own conditional samples, and propagates the error in log space.
pub fn estimate_prob_empty(
    params: &ModelParams,
    replicas: usize,
    seed: u64,
    method: EstimateMethod,
    opts: &SamplerOptions,
) -> Result<Estimate> {
    if replicas < MIN_REPLICAS {
        return Err(invalid(
            "replicas",
            format!("need at least {MIN_REPLICAS}, got {replicas}"),
        ));
    }
    let n = params.n;
    if n <= 1 {
        return Ok(Estimate::exact(1.0, seed));
    }
    match method {
        EstimateMethod::Exact => exact_prob_empty(params)
            .map(|v| Estimate::exact(v, seed))
            .ok_or_else(|| invalid("method", "no closed form for Pr[E_n] in this dimension")),
        EstimateMethod::NaiveMc => Ok(naive_prob_empty(params, replicas, seed)),
        EstimateMethod::Telescoping => telescoping_prob_empty(params, replicas, seed, opts),
    }
}

/// `(1 - n p / 2)^(n-1)` on the circle, zero past the packing limit.
pub fn exact_prob_empty(params: &ModelParams) -> Option<f64> {
    if params.d != 1 {
        return None;
    }
    let n = params.n as f64;
    if params.n <= 1 {
        return Some(1.0);
    }
    let base = 1.0 - n * params.p / 2.0;
    Some(if base <= 0.0 { 0.0 } else { base.powf(n - 1.0) })
}

fn naive_prob_empty(params: &ModelParams, replicas: usize, seed: u64) -> Estimate {
    let n = params.n;
    let hits: usize = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, Purpose::Points, i as u64);
            rejection_sample_with(params, n, &mut rng, 1).is_ok() as usize
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let r = replicas as f64;
    let mean = hits as f64 / r;
    // all-or-nothing outcomes get a half-count continuity floor instead of a
    // zero standard error
    let q = if hits == 0 || hits == replicas {
        (hits as f64 + 0.5) / (r + 1.0)
    } else {
        mean
    };
    Estimate {
        mean,
        stderr: (q * (1.0 - q) / r).sqrt(),
        samples: replicas as u64,
        seed,
        method: EstimateMethod::NaiveMc,
        backend: None,
    }
}

/// Per-level factors `E[1 - V_k | E_k]`, `k = 1..n-1`.
pub fn telescoping_factors(
    params: &ModelParams,
    replicas: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<Vec<Estimate>> {
    (1..params.n)
        .map(|k| {
            let level_seed = child_seed(seed, k as u64);
            let cov = conditional_coverage(k, params, replicas, level_seed, opts)?;
            let factor = Estimate {
                mean: 1.0 - cov.mean,
                ..cov
            };
            if factor.mean <= 0.0 {
                return Err(Error::NonPositiveFactor {
                    k,
                    value: factor.mean,
                });
            }
            Ok(factor)
        })
        .collect()
}

fn telescoping_prob_empty(
    params: &ModelParams,
    replicas: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<Estimate> {
    let factors = telescoping_factors(params, replicas, seed, opts)?;
    let log_mean: f64 = factors.iter().map(|f| f.mean.ln()).sum();
    let rel_var: f64 = factors.iter().map(|f| (f.stderr / f.mean).powi(2)).sum();
    let mean = log_mean.exp();
    let backend = factors.iter().rev().find_map(|f| f.backend);
    Ok(Estimate {
        mean,
        stderr: mean * rel_var.sqrt(),
        samples: (replicas * factors.len()) as u64,
        seed,
        method: EstimateMethod::Telescoping,
        backend,
    })
}

/// Lower bound `kp - C(k,2) p^2 (1 - 4^-d) / (1 - kp)^2` on `E[V_k | E_k]`;
/// `None` once `kp >= 1`.
pub fn sphere_est_bound(k: usize, p: f64, d: usize) -> Option<f64> {
    let k = k as f64;
    let kp = k * p;
    if kp >= 1.0 {
        return None;
    }
    let pairs = k * (k - 1.0) / 2.0;
    let shrink = 1.0 - 0.25f64.powi(d.min(i32::MAX as usize) as i32);
    Some(kp - pairs * p * p * shrink / ((1.0 - kp) * (1.0 - kp)))
}

/// `E[V_k] = 1 - (1-p)^k` for unconditioned centers.
pub fn unconditional_coverage(k: usize, p: f64) -> f64 {
    -(k as f64 * (-p).ln_1p()).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepulsionGap {
    pub k: usize,
    pub conditional: Estimate,
    pub unconditional: f64,
    pub gap: Estimate,
    /// `None` when `kp >= 1` and the bound does not apply.
    pub sphere_est_rhs: Option<f64>,
}

impl RepulsionGap {
    /// Repulsion holds up to sampling error.
    pub fn holds(&self) -> bool {
        self.gap.mean >= -CONFIDENCE_RADIUS * self.gap.stderr
    }
}

/// `E[V_k | E_k] - E[V_k]` with its standard error.
pub fn repulsion_gap(
    k: usize,
    params: &ModelParams,
    replicas: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<RepulsionGap> {
    if k == 0 {
        return Err(invalid("k", "repulsion gap needs k >= 1"));
    }
    let conditional = conditional_coverage(k, params, replicas, seed, opts)?;
    let unconditional = if k == 1 {
        params.p
    } else {
        unconditional_coverage(k, params.p)
    };
    let gap = Estimate {
        mean: conditional.mean - unconditional,
        ..conditional
    };
    Ok(RepulsionGap {
        k,
        conditional,
        unconditional,
        gap,
        sphere_est_rhs: sphere_est_bound(k, params.p, params.d),
    })
}

#[cfg(test)]
mod tests;
