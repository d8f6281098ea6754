use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::RegularGraph;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    IndependentSets,
    Matchings,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::IndependentSets => "is",
            Mode::Matchings => "matching",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "is" | "independent-sets" | "hardcore" => Ok(Mode::IndependentSets),
            "matching" | "matchings" | "m" => Ok(Mode::Matchings),
            other => Err(invalid("mode", format!("unknown mode `{other}`"))),
        }
    }
}

/// Largest instance handed to the exhaustive enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_vertices: 40,
            max_edges: 60,
        }
    }
}

/// Per-size counts of the independent sets of a conflict system, together
/// with the summed sizes of their closed neighborhoods.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SetCounts {
    pub counts: Vec<u128>,
    pub coverage: Vec<u128>,
}

impl SetCounts {
    fn with_len(len: usize) -> Self {
        SetCounts {
            counts: vec![0; len],
            coverage: vec![0; len],
        }
    }

    fn add(&mut self, other: &SetCounts) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        for (a, b) in self.coverage.iter_mut().zip(&other.coverage) {
            *a += b;
        }
    }

    fn trim(mut self) -> Self {
        while self.counts.len() > 1 && *self.counts.last().unwrap() == 0 {
            self.counts.pop();
            self.coverage.pop();
        }
        self
    }
}

#[derive(Clone, Copy)]
struct Node {
    avail: u64,
    covered: u64,
    size: usize,
}

/// Tree depth expanded serially before work is handed to rayon.
const SPLIT_DEPTH: usize = 10;

/// Enumerates every independent set of the conflict system `conflicts`,
/// where `conflicts[i]` is the closed conflict set of item `i` (bit `i`
/// included). Branches on the lowest available item: take it, or drop it.
fn enumerate(conflicts: &[u64]) -> SetCounts {
    let items = conflicts.len();
    debug_assert!(items <= 64);
    let all = if items == 64 {
        u64::MAX
    } else {
        (1u64 << items) - 1
    };

    let mut frontier = vec![Node {
        avail: all,
        covered: 0,
        size: 0,
    }];
    let mut done = SetCounts::with_len(items + 1);
    for _ in 0..SPLIT_DEPTH {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for node in frontier {
            if node.avail == 0 {
                done.counts[node.size] += 1;
                done.coverage[node.size] += node.covered.count_ones() as u128;
                continue;
            }
            let v = node.avail.trailing_zeros() as usize;
            next.push(Node {
                avail: node.avail & !conflicts[v],
                covered: node.covered | conflicts[v],
                size: node.size + 1,
            });
            next.push(Node {
                avail: node.avail & !(1u64 << v),
                ..node
            });
        }
        frontier = next;
    }

    let partials: Vec<SetCounts> = frontier
        .par_iter()
        .map(|node| {
            let mut acc = SetCounts::with_len(items + 1);
            descend(conflicts, *node, &mut acc);
            acc
        })
        .collect();
    for p in &partials {
        done.add(p);
    }
    done.trim()
}

fn descend(conflicts: &[u64], node: Node, acc: &mut SetCounts) {
    let Node {
        mut avail,
        covered,
        size,
    } = node;
    loop {
        if avail == 0 {
            acc.counts[size] += 1;
            acc.coverage[size] += covered.count_ones() as u128;
            return;
        }
        let v = avail.trailing_zeros() as usize;
        descend(
            conflicts,
            Node {
                avail: avail & !conflicts[v],
                covered: covered | conflicts[v],
                size: size + 1,
            },
            acc,
        );
        // drop v and continue without recursing
        avail &= !(1u64 << v);
    }
}

/// Per-size independent-set counts of an arbitrary simple graph on at most
/// 64 vertices.
pub fn independent_set_counts(n: usize, edges: &[(usize, usize)]) -> Result<SetCounts> {
    if n > 64 {
        return Err(Error::BudgetExceeded {
            what: "vertices",
            size: n,
            limit: 64,
        });
    }
    let mut conf: Vec<u64> = (0..n).map(|v| 1u64 << v).collect();
    for &(u, v) in edges {
        conf[u] |= 1 << v;
        conf[v] |= 1 << u;
    }
    Ok(enumerate(&conf))
}

/// Per-size matching counts of an arbitrary simple graph with at most 64
/// edges; edges are indexed in the given order.
pub fn matching_counts(edges: &[(usize, usize)]) -> Result<SetCounts> {
    let m = edges.len();
    if m > 64 {
        return Err(Error::BudgetExceeded {
            what: "edges",
            size: m,
            limit: 64,
        });
    }
    let conf: Vec<u64> = edges
        .iter()
        .map(|&(a, b)| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, &(c, e))| a == c || a == e || b == c || b == e)
                .fold(0u64, |acc, (j, _)| acc | (1 << j))
        })
        .collect();
    Ok(enumerate(&conf))
}

/// Exact counts by size for one graph and mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    pub mode: Mode,
    pub label: String,
    /// Vertex count of the graph.
    pub n: usize,
    /// Degree of the graph.
    pub d: usize,
    counts: Vec<BigUint>,
    coverage_sums: Vec<BigUint>,
}

impl CountTable {
    /// Size of the ground set: `n` for independent sets, `m = nd/2` for
    /// matchings.
    pub fn universe(&self) -> usize {
        match self.mode {
            Mode::IndependentSets => self.n,
            Mode::Matchings => self.n * self.d / 2,
        }
    }

    /// `(d+1)/n` for independent sets, `(2d-1)/(nd/2)` for matchings.
    pub fn p(&self) -> BigRational {
        let (num, den) = match self.mode {
            Mode::IndependentSets => (self.d + 1, self.n),
            Mode::Matchings => ((2 * self.d).saturating_sub(1), self.universe()),
        };
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn count(&self, k: usize) -> BigUint {
        self.counts.get(k).cloned().unwrap_or_else(BigUint::zero)
    }

    /// The largest size with a nonzero count.
    pub fn max_size(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// `sum_S |N[S]|` over the configurations `S` of size `k`, where `N[S]`
    /// is the set of vertices (edges) covered by `S`.
    pub fn coverage_sum(&self, k: usize) -> BigUint {
        self.coverage_sums
            .get(k)
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    /// `E[V_k | E_k]` as the unreduced fraction
    /// `coverage_sum(k) / (count(k) * universe)`.
    pub fn conditional_coverage(&self, k: usize) -> Result<BigRational> {
        let count = self.count(k);
        if count.is_zero() {
            return Err(Error::EmptyEvent { k });
        }
        let num = BigInt::from(self.coverage_sum(k));
        let den = BigInt::from(count * BigUint::from(self.universe()));
        Ok(BigRational::new_raw(num, den))
    }
}

pub fn count_by_size(g: &RegularGraph, mode: Mode) -> Result<CountTable> {
    count_by_size_with_budget(g, mode, Budget::default())
}

pub fn count_by_size_with_budget(
    g: &RegularGraph,
    mode: Mode,
    budget: Budget,
) -> Result<CountTable> {
    let raw = match mode {
        Mode::IndependentSets => {
            let limit = budget.max_vertices.min(64);
            if g.n() > limit {
                return Err(Error::BudgetExceeded {
                    what: "vertices",
                    size: g.n(),
                    limit,
                });
            }
            independent_set_counts(g.n(), g.edges())?
        }
        Mode::Matchings => {
            let limit = budget.max_edges.min(64);
            if g.edge_count() > limit {
                return Err(Error::BudgetExceeded {
                    what: "edges",
                    size: g.edge_count(),
                    limit,
                });
            }
            matching_counts(g.edges())?
        }
    };
    Ok(CountTable {
        mode,
        label: g.label().to_string(),
        n: g.n(),
        d: g.degree(),
        counts: raw.counts.iter().map(|&c| BigUint::from(c)).collect(),
        coverage_sums: raw.coverage.iter().map(|&c| BigUint::from(c)).collect(),
    })
}

pub fn exact_conditional_coverage(g: &RegularGraph, k: usize, mode: Mode) -> Result<BigRational> {
    count_by_size(g, mode)?.conditional_coverage(k)
}
