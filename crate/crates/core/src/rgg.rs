//! Random geometric graphs on the torus: uniform configurations, the
//! empty-graph event, and the covered volume fraction of a configuration.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{within, wrap_unit, Metric, ModelParams};
use crate::rng::{self, Purpose};

/// Points of `[0,1)^d` stored row-major, `d` coordinates per point.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusConfiguration {
    pub params: ModelParams,
    coords: Vec<f64>,
}

impl TorusConfiguration {
    pub fn empty(params: ModelParams) -> Self {
        TorusConfiguration {
            params,
            coords: Vec::new(),
        }
    }

    /// Builds a configuration from explicit points, reducing coordinates
    /// modulo 1.
    pub fn from_points(params: ModelParams, points: &[Vec<f64>]) -> Result<Self> {
        let d = params.d;
        let mut coords = Vec::with_capacity(points.len() * d);
        for p in points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: p.len(),
                });
            }
            coords.extend(p.iter().map(|&c| wrap_unit(c)));
        }
        Ok(TorusConfiguration { params, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.params.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.params.d
    }

    pub fn metric(&self) -> Metric {
        self.params.metric
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.params.d;
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.params.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub(crate) fn point_mut(&mut self, i: usize) -> &mut [f64] {
        let d = self.params.d;
        &mut self.coords[i * d..(i + 1) * d]
    }

    pub(crate) fn push_uniform<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for _ in 0..self.params.d {
            self.coords.push(rng.random::<f64>());
        }
    }

    pub(crate) fn push_point(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.params.d);
        self.coords.extend_from_slice(x);
    }

    pub(crate) fn truncate(&mut self, k: usize) {
        self.coords.truncate(k * self.params.d);
    }

    /// True iff `x` is within distance `r` of any point other than `skip`.
    pub(crate) fn collides(&self, x: &[f64], skip: Option<usize>) -> bool {
        let (r, m) = (self.params.r, self.params.metric);
        self.points()
            .enumerate()
            .any(|(j, y)| Some(j) != skip && within(x, y, r, m))
    }

    /// Writes one CSV row per point with header `x_1,...,x_d`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.dim()).map(|i| format!("x_{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|c| format!("{c:.16e}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Draws `k` i.i.d. uniform points with the geometry of `params`.
pub fn sample_uniform_with<R: Rng + ?Sized>(
    params: &ModelParams,
    k: usize,
    rng: &mut R,
) -> TorusConfiguration {
    let mut c = TorusConfiguration::empty(*params);
    c.coords.reserve(k * params.d);
    for _ in 0..k {
        c.push_uniform(rng);
    }
    c
}

/// `params.n` i.i.d. uniform points; identical seeds give identical output.
pub fn sample_uniform(params: &ModelParams, seed: u64) -> TorusConfiguration {
    let mut rng = rng::stream(seed, Purpose::Points, 0);
    sample_uniform_with(params, params.n, &mut rng)
}

const BRUTE_FORCE_MAX: usize = 64;

/// True iff every pair of points is at distance strictly greater than `r`.
pub fn is_empty_graph(c: &TorusConfiguration) -> bool {
    let k = c.len();
    if k < 2 || c.params.r == 0.0 {
        return true;
    }
    if k > BRUTE_FORCE_MAX {
        if let Some(grid) = CellGrid::build(c) {
            return grid.no_collisions(c);
        }
    }
    (1..k).all(|i| {
        let x = c.point(i);
        (0..i).all(|j| !within(x, c.point(j), c.params.r, c.params.metric))
    })
}

/// Uniform cell index with cell side at least `r`; colliding pairs lie in the
/// same or adjacent cells.
struct CellGrid {
    cells_per_axis: usize,
    start: Vec<usize>,
    members: Vec<usize>,
}

impl CellGrid {
    const MAX_CELLS: usize = 1 << 22;

    fn build(c: &TorusConfiguration) -> Option<Self> {
        let d = c.dim();
        let g = (1.0 / c.params.r).floor() as usize;
        // with fewer than 3 cells per axis the neighbor stencil wraps onto itself
        if g < 3 || d > 6 || 3usize.pow(d as u32) > c.len() {
            return None;
        }
        let total = g.checked_pow(d as u32)?;
        if total > Self::MAX_CELLS {
            return None;
        }
        let cell_of = |x: &[f64]| {
            x.iter().fold(0usize, |acc, &v| {
                acc * g + ((v * g as f64) as usize).min(g - 1)
            })
        };
        let ids: Vec<usize> = c.points().map(cell_of).collect();
        let mut start = vec![0usize; total + 1];
        for &id in &ids {
            start[id + 1] += 1;
        }
        for i in 0..total {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut members = vec![0usize; ids.len()];
        for (i, &id) in ids.iter().enumerate() {
            members[fill[id]] = i;
            fill[id] += 1;
        }
        Some(CellGrid {
            cells_per_axis: g,
            start,
            members,
        })
    }

    fn no_collisions(&self, c: &TorusConfiguration) -> bool {
        let d = c.dim();
        let g = self.cells_per_axis as i64;
        let (r, m) = (c.params.r, c.params.metric);
        let mut cell = vec![0i64; d];
        let stencil = 3usize.pow(d as u32);
        for (i, x) in c.points().enumerate() {
            for (a, &v) in cell.iter_mut().zip(x) {
                *a = ((v * g as f64) as i64).min(g - 1);
            }
            for s in 0..stencil {
                let mut rem = s;
                let mut id = 0usize;
                for &a in &cell {
                    let off = (rem % 3) as i64 - 1;
                    rem /= 3;
                    id = id * g as usize + (a + off).rem_euclid(g) as usize;
                }
                for &j in &self.members[self.start[id]..self.start[id + 1]] {
                    if j > i && within(x, c.point(j), r, m) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageMethod {
    #[serde(rename = "exact-1d")]
    Exact1d,
    MonteCarlo,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub value: f64,
    pub method: CoverageMethod,
    pub stderr: f64,
}

/// Exact length of the union of the closed arcs `[c - r, c + r]` on the
/// unit circle.
pub fn arc_union_length(centers: &[f64], r: f64) -> f64 {
    if centers.is_empty() || r <= 0.0 {
        return 0.0;
    }
    if r >= 0.5 {
        return 1.0;
    }
    let mut iv: Vec<(f64, f64)> = Vec::with_capacity(2 * centers.len());
    for &c in centers {
        let (lo, hi) = (c - r, c + r);
        if lo < 0.0 {
            iv.push((lo + 1.0, 1.0));
            iv.push((0.0, hi));
        } else if hi > 1.0 {
            iv.push((lo, 1.0));
            iv.push((0.0, hi - 1.0));
        } else {
            iv.push((lo, hi));
        }
    }
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let (mut cur_lo, mut cur_hi) = iv[0];
    for &(lo, hi) in &iv[1..] {
        if lo > cur_hi {
            total += cur_hi - cur_lo;
            cur_lo = lo;
            cur_hi = hi;
        } else if hi > cur_hi {
            cur_hi = hi;
        }
    }
    total += cur_hi - cur_lo;
    total.min(1.0)
}

/// Fraction of `probes` (row-major, `d` per point) covered by the configuration.
pub fn probe_hit_fraction(c: &TorusConfiguration, probes: &[f64]) -> f64 {
    let d = c.dim();
    let count = probes.len() / d;
    if count == 0 {
        return 0.0;
    }
    let hits = probes
        .chunks_exact(d)
        .filter(|x| c.collides(x, None))
        .count();
    hits as f64 / count as f64
}

/// Monte Carlo coverage with `test_points` fresh uniform probes drawn from `rng`.
pub fn covered_fraction_with<R: Rng + ?Sized>(
    c: &TorusConfiguration,
    test_points: usize,
    rng: &mut R,
) -> Result<CoverageResult> {
    let d = c.dim();
    if c.is_empty() {
        return Ok(CoverageResult {
            value: 0.0,
            method: if d == 1 {
                CoverageMethod::Exact1d
            } else {
                CoverageMethod::MonteCarlo
            },
            stderr: 0.0,
        });
    }
    if d == 1 {
        return Ok(exact_1d(c));
    }
    if test_points == 0 {
        return Err(Error::NoProbes { d });
    }
    let mut hits = 0usize;
    let mut x = vec![0.0; d];
    for _ in 0..test_points {
        for v in x.iter_mut() {
            *v = rng.random();
        }
        if c.collides(&x, None) {
            hits += 1;
        }
    }
    let value = hits as f64 / test_points as f64;
    Ok(CoverageResult {
        value,
        method: CoverageMethod::MonteCarlo,
        stderr: (value * (1.0 - value) / test_points as f64).sqrt(),
    })
}

fn exact_1d(c: &TorusConfiguration) -> CoverageResult {
    CoverageResult {
        value: arc_union_length(c.coords(), c.params.r),
        method: CoverageMethod::Exact1d,
        stderr: 0.0,
    }
}

/// Covered volume fraction of the union of closed radius-`r` balls.
///
/// Exact in dimension 1; otherwise the hit fraction of `test_points` uniform
/// probes seeded by `seed`.
pub fn covered_fraction(
    c: &TorusConfiguration,
    test_points: usize,
    seed: u64,
) -> Result<CoverageResult> {
    let mut rng = rng::stream(seed, Purpose::Probes, 0);
    covered_fraction_with(c, test_points, &mut rng)
}

/// Coverage estimated on the midpoint lattice with `per_axis^d` probes.
///
/// The reported stderr is the binomial value for that many probes; the
/// lattice error itself is deterministic.
pub fn covered_fraction_grid(c: &TorusConfiguration, per_axis: usize) -> Result<CoverageResult> {
    let d = c.dim();
    if per_axis == 0 {
        return Err(Error::NoProbes { d });
    }
    let total = per_axis
        .checked_pow(d as u32)
        .ok_or_else(|| crate::error::invalid("per_axis", "grid too large"))?;
    let mut x = vec![0.0; d];
    let mut hits = 0usize;
    for idx in 0..total {
        let mut rem = idx;
        for v in x.iter_mut() {
            *v = ((rem % per_axis) as f64 + 0.5) / per_axis as f64;
            rem /= per_axis;
        }
        if c.collides(&x, None) {
            hits += 1;
        }
    }
    let value = hits as f64 / total as f64;
    Ok(CoverageResult {
        value,
        method: CoverageMethod::Grid,
        stderr: (value * (1.0 - value) / total as f64).sqrt(),
    })
}
