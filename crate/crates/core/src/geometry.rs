//! Points on the unit torus `[0,1)^d`, wraparound metrics, and the
//! conversions between exclusion radius `r`, pair-collision probability `p`
//! and packing density `alpha`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Euclidean distance; hard spheres.
    L2,
    /// Chebyshev distance; hard squares (axis-parallel cubes).
    Linf,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::L2 => f.write_str("l2"),
            Metric::Linf => f.write_str("linf"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" | "euclidean" => Ok(Metric::L2),
            "linf" | "l-inf" | "chebyshev" | "square" => Ok(Metric::Linf),
            other => Err(invalid("metric", format!("unknown metric `{other}`"))),
        }
    }
}

impl Metric {
    /// Natural log of the volume of the unit ball of this metric in `R^d`.
    pub fn ln_unit_ball_volume(self, d: usize) -> f64 {
        let d = d as f64;
        match self {
            Metric::L2 => 0.5 * d * PI.ln() - libm::lgamma(0.5 * d + 1.0),
            Metric::Linf => d * std::f64::consts::LN_2,
        }
    }

    pub fn unit_ball_volume(self, d: usize) -> f64 {
        self.ln_unit_ball_volume(d).exp()
    }
}

/// A point of the unit torus. Coordinates are reduced into `[0,1)` on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let mut coords = coords.into();
        if coords.is_empty() {
            return Err(invalid("coords", "dimension must be at least 1"));
        }
        for c in coords.iter_mut() {
            if !c.is_finite() {
                return Err(invalid("coords", "coordinates must be finite"));
            }
            *c = wrap_unit(*c);
        }
        Ok(TorusPoint { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Reduces `x` modulo 1 into `[0,1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let y = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

#[inline(always)]
fn wrapped_delta(a: f64, b: f64) -> f64 {
    let t = (a - b).abs();
    t.min(1.0 - t)
}

/// Torus distance between two coordinate slices of equal length.
#[inline]
pub fn distance(a: &[f64], b: &[f64], metric: Metric) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    match metric {
        Metric::L2 => {
            if a.len() == 1 {
                return wrapped_delta(a[0], b[0]);
            }
            a.iter()
                .zip(b)
                .map(|(&x, &y)| {
                    let t = wrapped_delta(x, y);
                    t * t
                })
                .sum::<f64>()
                .sqrt()
        }
        Metric::Linf => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| wrapped_delta(x, y))
            .fold(0.0, f64::max),
    }
}

/// True iff the torus distance between `a` and `b` is at most `r`.
///
/// Hot path for collision checks; avoids the square root under L2.
#[inline]
pub fn within(a: &[f64], b: &[f64], r: f64, metric: Metric) -> bool {
    match metric {
        Metric::L2 if a.len() > 1 => {
            let r2 = r * r;
            let mut acc = 0.0;
            for (&x, &y) in a.iter().zip(b) {
                let t = wrapped_delta(x, y);
                acc += t * t;
                if acc > r2 {
                    return false;
                }
            }
            true
        }
        _ => a.iter().zip(b).all(|(&x, &y)| wrapped_delta(x, y) <= r),
    }
}

pub fn torus_distance(x: &TorusPoint, y: &TorusPoint, metric: Metric) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(distance(&x.coords, &y.coords, metric))
}

/// Volume of the radius-`r` metric ball on the unit torus, which is also the
/// probability that two independent uniform points collide.
pub fn ball_volume(d: usize, r: f64, metric: Metric) -> Result<f64> {
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    if r.is_nan() || r < 0.0 {
        return Err(invalid("r", format!("radius must be nonnegative, got {r}")));
    }
    if r > 0.5 {
        return Err(Error::RadiusTooLarge { r });
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok((metric.ln_unit_ball_volume(d) + d as f64 * r.ln()).exp())
}

/// The one free parameter handed to [`convert_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Given {
    Radius(f64),
    Collision(f64),
    Density(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub d: usize,
    pub metric: Metric,
    /// Exclusion radius in torus length units.
    pub r: f64,
    /// Pair-collision probability, `vol(B_r)`.
    pub p: f64,
    /// Packing density of the radius-`r/2` balls.
    pub alpha: f64,
}

const ROUND_TRIP_SLACK: f64 = 1e-12;

/// Completes `n`, `d`, `metric` and one of `r`, `p`, `alpha` into a
/// consistent [`ModelParams`].
pub fn convert_params(n: usize, d: usize, metric: Metric, given: Given) -> Result<ModelParams> {
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    let ln_vol = metric.ln_unit_ball_volume(d);
    let df = d as f64;
    let two_d = df * std::f64::consts::LN_2;

    let (r, p, alpha) = match given {
        Given::Radius(r) => {
            check_unit("r", r, 0.5)?;
            let p = ball_volume(d, r, metric)?;
            let alpha = if n == 0 {
                0.0
            } else {
                n as f64 * p / two_d.exp()
            };
            (r, p, alpha)
        }
        Given::Collision(p) => {
            check_unit("p", p, 1.0)?;
            let r = radius_from_p(p, ln_vol, df);
            let alpha = if n == 0 {
                0.0
            } else {
                n as f64 * p / two_d.exp()
            };
            (r, p, alpha)
        }
        Given::Density(alpha) => {
            check_unit("alpha", alpha, f64::MAX)?;
            if n == 0 {
                return Err(invalid("n", "density needs at least one particle"));
            }
            let p = (alpha.ln() + two_d - (n as f64).ln()).exp();
            if p > 1.0 {
                let r = radius_from_p(p, ln_vol, df);
                return Err(Error::RadiusTooLarge { r });
            }
            (radius_from_p(p, ln_vol, df), p, alpha)
        }
    };

    if r > 0.5 * (1.0 + ROUND_TRIP_SLACK) {
        return Err(Error::RadiusTooLarge { r });
    }
    Ok(ModelParams {
        n,
        d,
        metric,
        r: r.min(0.5),
        p: p.min(1.0),
        alpha,
    })
}

fn radius_from_p(p: f64, ln_vol: f64, d: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        ((p.ln() - ln_vol) / d).exp()
    }
}

fn check_unit(name: &'static str, x: f64, hi: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(invalid(
            name,
            format!("must be a nonnegative number, got {x}"),
        ));
    }
    if x > hi {
        if name == "r" {
            return Err(Error::RadiusTooLarge { r: x });
        }
        return Err(invalid(name, format!("{x} exceeds {hi}")));
    }
    Ok(())
}

impl ModelParams {
    pub fn from_radius(n: usize, d: usize, metric: Metric, r: f64) -> Result<Self> {
        convert_params(n, d, metric, Given::Radius(r))
    }

    pub fn from_collision(n: usize, d: usize, metric: Metric, p: f64) -> Result<Self> {
        convert_params(n, d, metric, Given::Collision(p))
    }

    pub fn from_density(n: usize, d: usize, metric: Metric, alpha: f64) -> Result<Self> {
        convert_params(n, d, metric, Given::Density(alpha))
    }

    /// Same geometry with a different particle count; `r` and `p` are kept.
    pub fn with_n(&self, n: usize) -> Self {
        let alpha = n as f64 * self.p / (self.d as f64 * std::f64::consts::LN_2).exp();
        ModelParams { n, alpha, ..*self }
    }
}
