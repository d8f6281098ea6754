//! Closed-form free-energy bounds, their crossings, and certificates of
//! birthday-inequality failure.
//!
//! Continuum bounds are on `-(1/n) log Pr[E_n]`: the birthday bound is a
//! lower bound and the cell model an upper bound, so failure is
//! `birthday > cell`. Discrete bounds are on `(1/n) log IS(alpha n)` and
//! `(2/n) log M(alpha n / 2)`, both upper bounds, so the hard-core parity
//! bound falsifies the birthday bound where `parity > birthday`. All logs
//! are natural.

mod precise;

pub use precise::{cell_gap_precise, leech_gap_precise, PRECISION_BITS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Packing density used for the d = 24 counterexample.
pub const RHO_24: f64 = 0.001929;
const RHO_24_RATIO: (u64, u64) = (1929, 1_000_000);

/// Points in a bracketing scan.
pub const SCAN_POINTS: usize = 10_000;
/// Root tolerance in the density variable.
pub const ROOT_TOL: f64 = 1e-9;

/// Density of the Leech lattice packing, `pi^12 / 12!`.
pub fn leech_density() -> f64 {
    std::f64::consts::PI.powi(12) / 479_001_600.0
}

/// `x ln x` with `0 ln 0 = 0`.
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn check_alpha(alpha: f64, hi: f64, closed: bool) -> Result<()> {
    let ok = alpha.is_finite() && alpha >= 0.0 && if closed { alpha <= hi } else { alpha < hi };
    if ok {
        Ok(())
    } else {
        Err(invalid(
            "alpha",
            format!("{alpha} outside the admissible range (hi = {hi})"),
        ))
    }
}

/// `2^(d-1) alpha`.
pub fn sphere_birthday_fe(alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha, 1.0, true)?;
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    Ok(2f64.powi(d as i32 - 1) * alpha)
}

/// `1 - d ln(1 - (alpha/rho)^(1/d)) - ln rho`, the limit form of the cell
/// model bound built from a packing of density `rho`.
pub fn cell_model_fe(alpha: f64, rho: f64, d: usize) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(invalid("rho", format!("{rho} must lie in (0, 1]")));
    }
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    if alpha.is_nan() || alpha < 0.0 || alpha >= rho {
        return Err(invalid(
            "alpha",
            format!("{alpha} must satisfy 0 <= alpha < rho = {rho}"),
        ));
    }
    let t = (alpha / rho).powf(1.0 / d as f64);
    Ok(1.0 - d as f64 * (-t).ln_1p() - rho.ln())
}

/// `F(t) = (rho/2)(2t)^24 - 1 + 24 ln(1-t) + ln rho` at `rho = RHO_24`:
/// birthday minus cell model at `alpha = t^24 rho`.
pub fn leech_gap(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid("t", format!("{t} must lie in (0, 1)")));
    }
    let rho = RHO_24;
    Ok(rho / 2.0 * (2.0 * t).powi(24) - 1.0 + 24.0 * (-t).ln_1p() + rho.ln())
}

/// [`leech_gap`] in multi-precision arithmetic.
pub fn leech_gap_hp(t: f64) -> Result<f64> {
    leech_gap(t)?;
    Ok(leech_gap_precise(t, RHO_24_RATIO.0, RHO_24_RATIO.1))
}

/// `F'(t)`.
pub fn leech_gap_derivative(t: f64) -> f64 {
    RHO_24 / 2.0 * 48.0 * (2.0 * t).powi(23) - 24.0 / (1.0 - t)
}

/// A maximal density interval on which the birthday bound is falsified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureInterval {
    pub lo: f64,
    pub hi: f64,
    /// `rho - hi`, kept separately because `hi` is within rounding of `rho`
    /// once `d` is moderately large.
    pub hi_complement: f64,
    /// `ln(rho - hi)`, finite even where `hi_complement` underflows.
    pub ln_hi_complement: f64,
}

/// Birthday minus cell model as a function of `w = -ln(1 - (alpha/rho)^(1/d))`.
/// This variable spreads both ends of the failure interval over a range that
/// doubles resolve: `alpha -> 0` is `w -> 0` and `alpha -> rho` is `w -> inf`.
fn cell_gap_w(w: f64, d: usize, rho: f64) -> f64 {
    let ln_t = (-(-w).exp()).ln_1p();
    let alpha = rho * (d as f64 * ln_t).exp();
    2f64.powi(d as i32 - 1) * alpha - 1.0 - d as f64 * w + rho.ln()
}

fn alpha_of_w(w: f64, d: usize, rho: f64) -> f64 {
    rho * (d as f64 * (-(-w).exp()).ln_1p()).exp()
}

fn complement_of_w(w: f64, d: usize, rho: f64) -> f64 {
    -rho * (d as f64 * (-(-w).exp()).ln_1p()).exp_m1()
}

fn ln_complement_of_w(w: f64, d: usize, rho: f64) -> f64 {
    let c = complement_of_w(w, d, rho);
    if c > 1e-300 {
        c.ln()
    } else {
        // 1 - (1 - e^-w)^d = d e^-w (1 + O(d e^-w))
        (d as f64).ln() - w + rho.ln()
    }
}

/// Bisects `f` on `[a, b]` given a sign change, until the bracket stops
/// shrinking or `done(a, b)` holds.
fn bisect(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    done: impl Fn(f64, f64) -> bool,
) -> (f64, f64) {
    let fa_pos = f(a) > 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || done(a, b) {
            break;
        }
        if (f(mid) > 0.0) == fa_pos {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a, b)
}

/// Maximal runs of grid indices `[start, end)` on which `f > 0`.
fn positive_runs(f: impl Fn(f64) -> f64 + Sync, grid: &[f64]) -> Vec<(usize, usize)> {
    let vals: Vec<f64> = grid.par_iter().map(|&x| f(x)).collect();
    let mut runs = Vec::new();
    let mut start = None;
    for (i, v) in vals.iter().enumerate() {
        match (*v > 0.0, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, grid.len()));
    }
    runs
}

/// The widest interval of densities `alpha < rho` where
/// `2^(d-1) alpha > cell_model_fe(alpha, rho, d)`, or `None`.
pub fn cell_failure_interval(d: usize, rho: f64) -> Result<Option<FailureInterval>> {
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(invalid("rho", format!("{rho} must lie in (0, 1]")));
    }
    // The gap is -1 - dw + ln rho < 0 for tiny w and ~ -dw once
    // 2^(d-1) rho < dw, so the scan covers [1e-6, 4 * 2^(d-1) + 64].
    let w_hi = 4.0 * 2f64.powi(d as i32 - 1) + 64.0;
    let (l0, l1) = (1e-6f64.ln(), w_hi.ln());
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (SCAN_POINTS - 1) as f64).exp())
        .collect();
    let g = |w: f64| cell_gap_w(w, d, rho);
    let mut best: Option<FailureInterval> = None;
    for (s, e) in positive_runs(g, &grid) {
        if s == 0 || e == grid.len() {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: "failure region touches the edge of the scan range".into(),
            });
        }
        let close =
            |a: f64, b: f64| alpha_of_w(b, d, rho) - alpha_of_w(a, d, rho) <= ROOT_TOL * 1e-3;
        let (_, lo_w) = bisect(g, grid[s - 1], grid[s], close);
        let (hi_w, _) = bisect(g, grid[e - 1], grid[e], |a, b| {
            complement_of_w(a, d, rho) - complement_of_w(b, d, rho)
                <= ROOT_TOL * 1e-3 * complement_of_w(a, d, rho)
        });
        let cand = FailureInterval {
            lo: alpha_of_w(lo_w, d, rho),
            hi: alpha_of_w(hi_w, d, rho),
            hi_complement: complement_of_w(hi_w, d, rho),
            ln_hi_complement: ln_complement_of_w(hi_w, d, rho),
        };
        if best.is_none_or(|b| cand.hi - cand.lo > b.hi - b.lo) {
            best = Some(cand);
        }
    }
    Ok(best)
}

/// Hard squares: [`cell_failure_interval`] with the cubic lattice, `rho = 1`.
pub fn square_failure_interval(d: usize) -> Result<Option<FailureInterval>> {
    cell_failure_interval(d, 1.0)
}

/// `lo 2^(d-1) / (d ln 2)`; tends to 1 as `d` grows.
pub fn square_asymptotic_ratio(d: usize, lo: f64) -> f64 {
    lo * 2f64.powi(d as i32 - 1) / (d as f64 * std::f64::consts::LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardcoreBounds {
    /// `alpha - alpha ln alpha - alpha^2 (d+1)/2`.
    pub birthday_upper: f64,
    /// `-alpha ln(2 alpha) - (1/2 - alpha) ln(1 - 2 alpha)`, valid for
    /// bipartite graphs.
    pub parity_lower: f64,
    /// `-alpha ln alpha - (1/2 - alpha) ln(1 - 2 alpha)`.
    pub cgt_third: f64,
}

pub fn hardcore_bounds(alpha: f64, d: usize) -> Result<HardcoreBounds> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(invalid("alpha", format!("{alpha} must lie in (0, 1/2]")));
    }
    let half_rest = -xlnx(1.0 - 2.0 * alpha) / 2.0;
    let birthday_upper = alpha - xlnx(alpha) - alpha * alpha * (d as f64 + 1.0) / 2.0;
    let parity_lower = -xlnx(2.0 * alpha) / 2.0 + half_rest;
    let cgt_third = -xlnx(alpha) + half_rest;
    Ok(HardcoreBounds {
        birthday_upper,
        parity_lower,
        cgt_third,
    })
}

fn hardcore_diff(alpha: f64, d: usize) -> f64 {
    let b = hardcore_bounds(alpha, d).expect("alpha in range");
    b.parity_lower - b.birthday_upper
}

/// Smallest `alpha` in `(0, 1/2]` with `parity_lower >= birthday_upper`.
pub fn hardcore_crossing(d: usize) -> Result<f64> {
    let f = |a: f64| hardcore_diff(a, d);
    let grid: Vec<f64> = (1..=SCAN_POINTS)
        .map(|i| 0.5 * i as f64 / SCAN_POINTS as f64)
        .collect();
    let vals: Vec<f64> = grid.par_iter().map(|&a| f(a)).collect();
    let first = vals
        .iter()
        .position(|&v| v >= 0.0)
        .ok_or(Error::NoCrossing { d })?;
    let below = if first == 0 {
        f64::MIN_POSITIVE
    } else {
        grid[first - 1]
    };
    let (_, hi) = bisect(
        |a| if f(a) >= 0.0 { 1.0 } else { -1.0 },
        below,
        grid[first],
        |a, b| b - a <= ROOT_TOL,
    );
    Ok(hi)
}

/// `alpha_l d / (2 ln 2)`; tends to 1 as `d` grows.
pub fn hardcore_asymptotic_ratio(d: usize, alpha_l: f64) -> f64 {
    alpha_l * d as f64 / (2.0 * std::f64::consts::LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingBounds {
    /// `alpha ln d - alpha ln alpha + alpha - (alpha^2/2)(2d-1)/d`.
    pub birthday: f64,
    /// `alpha ln d - alpha ln alpha - 2(1-alpha) ln(1-alpha) - alpha + ln d/(d-1)`.
    pub ilinca_kahn: f64,
    pub min: f64,
}

pub fn matching_bounds(alpha: f64, d: usize) -> Result<MatchingBounds> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("{alpha} must lie in (0, 1)")));
    }
    if d < 2 {
        return Err(invalid("d", "degree must be at least 2"));
    }
    let df = d as f64;
    let lead = alpha * df.ln() - xlnx(alpha);
    let birthday = lead + alpha - alpha * alpha / 2.0 * (2.0 * df - 1.0) / df;
    let ilinca_kahn = lead - 2.0 * xlnx(1.0 - alpha) - alpha + df.ln() / (df - 1.0);
    Ok(MatchingBounds {
        birthday,
        ilinca_kahn,
        min: birthday.min(ilinca_kahn),
    })
}

/// The density where the two matching bounds intersect. Below it the
/// birthday bound is the smaller.
pub fn matching_crossing(d: usize) -> Result<f64> {
    let f = |a: f64| {
        let b = matching_bounds(a, d).expect("alpha in range");
        b.ilinca_kahn - b.birthday
    };
    let grid: Vec<f64> = (1..SCAN_POINTS)
        .map(|i| i as f64 / SCAN_POINTS as f64)
        .collect();
    let vals: Vec<f64> = grid.par_iter().map(|&a| f(a)).collect();
    let i = vals
        .windows(2)
        .position(|w| (w[0] > 0.0) != (w[1] > 0.0))
        .ok_or_else(|| invalid("d", format!("matching bounds do not cross at d = {d}")))?;
    let (a, b) = bisect(f, grid[i], grid[i + 1], |a, b| b - a <= ROOT_TOL);
    Ok(0.5 * (a + b))
}

/// `alpha* / ((ln d)/d)^(1/3)`.
pub fn matching_scale_ratio(d: usize, alpha_star: f64) -> f64 {
    let df = d as f64;
    alpha_star / (df.ln() / df).cbrt()
}

/// `ln( n^k / k! (1 - (d+1)/n)^C(k,2) )`, the finite-n birthday bound on
/// `ln IS(k)`.
pub fn finite_birthday_ln(n: u64, k: u64, d: u64) -> Result<f64> {
    if n == 0 || k > n || d + 1 > n {
        return Err(invalid(
            "n",
            format!("need k <= n and d + 1 <= n, got n={n} k={k} d={d}"),
        ));
    }
    let (nf, kf) = (n as f64, k as f64);
    let pairs = kf * (kf - 1.0) / 2.0;
    let log_q = if d + 1 == n && k >= 2 {
        f64::NEG_INFINITY
    } else if k < 2 {
        0.0
    } else {
        pairs * (-((d + 1) as f64) / nf).ln_1p()
    };
    Ok(kf * nf.ln() - libm::lgamma(kf + 1.0) + log_q)
}

/// Leading `1/n` correction separating `finite_birthday_ln / n` from its
/// limit: `(-ln(2 pi k)/2 + alpha(d+1)/2 - alpha^2 (d+1)^2/4) / n`.
pub fn finite_birthday_correction(n: u64, k: u64, d: u64) -> f64 {
    let (nf, kf, df) = (n as f64, k as f64, d as f64);
    let a = kf / nf;
    (-(2.0 * std::f64::consts::PI * kf).ln() / 2.0 + a * (df + 1.0) / 2.0
        - a * a * (df + 1.0).powi(2) / 4.0)
        / nf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundModel {
    Sphere,
    Square,
    Hardcore,
    Matching,
}

impl fmt::Display for BoundModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundModel::Sphere => "sphere",
            BoundModel::Square => "square",
            BoundModel::Hardcore => "hardcore",
            BoundModel::Matching => "matching",
        })
    }
}

impl FromStr for BoundModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" | "sphere24" => Ok(BoundModel::Sphere),
            "square" => Ok(BoundModel::Square),
            "hardcore" | "is" => Ok(BoundModel::Hardcore),
            "matching" | "matchings" => Ok(BoundModel::Matching),
            other => Err(invalid("model", format!("unknown bound model `{other}`"))),
        }
    }
}

/// One evaluation of a birthday bound and the bound it is compared with.
/// `gap = birthday - comparison`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub alpha: f64,
    pub birthday: f64,
    pub comparison: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: BoundModel,
    pub d: usize,
    /// Packing density of the cell model (continuum models only).
    pub rho: Option<f64>,
    pub points: Vec<CurvePoint>,
    pub failure_interval: Option<FailureInterval>,
    /// Crossing density of the two bounds where one is defined.
    pub crossing: Option<f64>,
    pub asymptotic_ratio: Option<f64>,
    pub note: Option<String>,
}

impl BoundReport {
    /// CSV with columns `alpha,birthday,comparison,gap`.
    pub fn write_curve_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "alpha,birthday,comparison,gap")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                p.alpha, p.birthday, p.comparison, p.gap
            )?;
        }
        Ok(())
    }
}

fn grid_open(hi: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| hi * i as f64 / (points + 1) as f64)
        .collect()
}

/// Evaluates the bounds for `model` at `points` densities spread evenly over
/// the open admissible range, plus the failure interval or crossing.
/// `rho` defaults to [`RHO_24`] for spheres and is fixed at 1 for squares.
pub fn bound_report(
    model: BoundModel,
    d: usize,
    rho: Option<f64>,
    points: usize,
) -> Result<BoundReport> {
    let mut note = None;
    let report = match model {
        BoundModel::Sphere | BoundModel::Square => {
            let rho = match model {
                BoundModel::Square => 1.0,
                _ => rho.unwrap_or(RHO_24),
            };
            let pts = grid_open(rho, points)
                .into_iter()
                .map(|a| {
                    let b = sphere_birthday_fe(a, d)?;
                    let c = cell_model_fe(a, rho, d)?;
                    Ok(CurvePoint {
                        alpha: a,
                        birthday: b,
                        comparison: c,
                        gap: b - c,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let fi = cell_failure_interval(d, rho)?;
            if fi.is_none() && pts.iter().any(|p| p.gap == 0.0) {
                note = Some("degenerate crossing".to_string());
            }
            BoundReport {
                model,
                d,
                rho: Some(rho),
                points: pts,
                asymptotic_ratio: match (model, fi) {
                    (BoundModel::Square, Some(f)) => Some(square_asymptotic_ratio(d, f.lo)),
                    _ => None,
                },
                failure_interval: fi,
                crossing: fi.map(|f| f.lo),
                note,
            }
        }
        BoundModel::Hardcore => {
            let pts = grid_open(0.5, points.saturating_sub(1))
                .into_iter()
                .chain(std::iter::once(0.5))
                .map(|a| {
                    let b = hardcore_bounds(a, d)?;
                    Ok(CurvePoint {
                        alpha: a,
                        birthday: b.birthday_upper,
                        comparison: b.parity_lower,
                        gap: b.birthday_upper - b.parity_lower,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let crossing = match hardcore_crossing(d) {
                Ok(a) => Some(a),
                Err(Error::NoCrossing { .. }) => None,
                Err(e) => return Err(e),
            };
            BoundReport {
                model,
                d,
                rho: None,
                points: pts,
                failure_interval: crossing.map(|a| FailureInterval {
                    lo: a,
                    hi: 0.5,
                    hi_complement: 0.0,
                    ln_hi_complement: f64::NEG_INFINITY,
                }),
                crossing,
                asymptotic_ratio: crossing.map(|a| hardcore_asymptotic_ratio(d, a)),
                note,
            }
        }
        BoundModel::Matching => {
            let pts = grid_open(1.0, points)
                .into_iter()
                .map(|a| {
                    let b = matching_bounds(a, d)?;
                    Ok(CurvePoint {
                        alpha: a,
                        birthday: b.birthday,
                        comparison: b.ilinca_kahn,
                        gap: b.birthday - b.ilinca_kahn,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let crossing = matching_crossing(d)?;
            BoundReport {
                model,
                d,
                rho: None,
                points: pts,
                failure_interval: None,
                crossing: Some(crossing),
                asymptotic_ratio: Some(matching_scale_ratio(d, crossing)),
                note,
            }
        }
    };
    Ok(report)
}

/// A witness density with both bound values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub alpha: f64,
    pub birthday: f64,
    pub comparison: f64,
}

/// A certificate that the birthday bound is falsified on an interval.
/// Continuum certificates drop the `o(1)` terms and are labeled asymptotic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub model: BoundModel,
    pub d: usize,
    pub rho: Option<f64>,
    /// Parameter at which the gap was evaluated, when the certificate is
    /// anchored at one (the d = 24 argument uses `t = 0.79`).
    pub t: Option<f64>,
    /// Gap at `t`, in multi-precision arithmetic.
    pub gap_at_t: Option<f64>,
    /// Smallest gap over the verification grid.
    pub grid_min_gap: Option<f64>,
    pub grid_points: usize,
    pub failure_interval: Option<FailureInterval>,
    pub witnesses: Vec<Witness>,
    pub certified: bool,
    pub asymptotic: bool,
}

/// Points checked on `(t, 1)` by [`sphere24_certificate`].
pub const CERTIFICATE_GRID: usize = 200;

/// Certifies `F > 0` at `t` and on a grid of [`CERTIFICATE_GRID`] points in
/// `(t, 1 - 1e-6)`, giving the failure interval `(t^24 rho, rho)`.
pub fn sphere24_certificate(t: f64) -> Result<Certificate> {
    let gap_at_t = leech_gap_hp(t)?;
    let top = 1.0 - 1e-6;
    let grid: Vec<f64> = (1..=CERTIFICATE_GRID)
        .map(|i| t + (top - t) * i as f64 / CERTIFICATE_GRID as f64)
        .collect();
    let gaps: Vec<f64> = grid
        .par_iter()
        .map(|&s| leech_gap_hp(s))
        .collect::<Result<_>>()?;
    let grid_min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let certified = gap_at_t > 0.0 && grid_min > 0.0;
    let rho = RHO_24;
    let witnesses = [t, 0.9, 0.99]
        .iter()
        .filter(|&&s| s >= t && s < 1.0)
        .map(|&s| {
            let alpha = s.powi(24) * rho;
            Ok(Witness {
                alpha,
                birthday: sphere_birthday_fe(alpha, 24)?,
                comparison: 1.0 - 24.0 * (-s).ln_1p() - rho.ln(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate {
        model: BoundModel::Sphere,
        d: 24,
        rho: Some(rho),
        t: Some(t),
        gap_at_t: Some(gap_at_t),
        grid_min_gap: Some(grid_min),
        grid_points: CERTIFICATE_GRID,
        failure_interval: certified.then(|| FailureInterval {
            lo: t.powi(24) * rho,
            hi: rho,
            hi_complement: 0.0,
            ln_hi_complement: f64::NEG_INFINITY,
        }),
        witnesses,
        certified,
        asymptotic: true,
    })
}

/// Certificate for hard squares in dimension `d` from the root-found
/// failure interval, with the geometric midpoint as witness.
pub fn square_certificate(d: usize) -> Result<Certificate> {
    let fi = square_failure_interval(d)?;
    let witnesses = match fi {
        Some(f) => {
            let mid = (f.lo * f.hi).sqrt();
            vec![Witness {
                alpha: mid,
                birthday: sphere_birthday_fe(mid, d)?,
                comparison: cell_model_fe(mid, 1.0, d)?,
            }]
        }
        None => Vec::new(),
    };
    Ok(Certificate {
        model: BoundModel::Square,
        d,
        rho: Some(1.0),
        t: None,
        gap_at_t: None,
        grid_min_gap: None,
        grid_points: SCAN_POINTS,
        certified: fi.is_some() && witnesses.iter().all(|w| w.birthday > w.comparison),
        failure_interval: fi,
        witnesses,
        asymptotic: true,
    })
}

/// Certificate for the hard-core model: parity beats birthday on
/// `[alpha_l, 1/2]`, checked at `grid` points.
pub fn hardcore_certificate(d: usize, grid: usize) -> Result<Certificate> {
    let lo = hardcore_crossing(d)?;
    let pts: Vec<f64> = (0..grid.max(2))
        .map(|i| lo + (0.5 - lo) * i as f64 / (grid.max(2) - 1) as f64)
        .collect();
    let diffs: Vec<f64> = pts.iter().map(|&a| hardcore_diff(a, d)).collect();
    let grid_min = diffs.iter().copied().fold(f64::INFINITY, f64::min);
    let witnesses = [lo, 0.5 * (lo + 0.5), 0.5]
        .iter()
        .map(|&a| {
            let b = hardcore_bounds(a, d)?;
            Ok(Witness {
                alpha: a,
                birthday: b.birthday_upper,
                comparison: b.parity_lower,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate {
        model: BoundModel::Hardcore,
        d,
        rho: None,
        t: None,
        gap_at_t: None,
        grid_min_gap: Some(grid_min),
        grid_points: pts.len(),
        failure_interval: Some(FailureInterval {
            lo,
            hi: 0.5,
            hi_complement: 0.0,
            ln_hi_complement: f64::NEG_INFINITY,
        }),
        witnesses,
        certified: grid_min >= 0.0,
        asymptotic: true,
    })
}
