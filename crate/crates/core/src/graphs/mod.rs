//! The discrete side: d-regular graphs, exact counts of independent sets and
//! matchings by size, and exact rational birthday/repulsion checks.

mod checks;
mod enumerate;

pub use checks::{
    bipest_check, birthday_check, conjecture2_compare, conjecture2_compare_tables,
    mean_pair_overlap_given_e2, repulsion_check, triangle_count, triangle_overlap_formula,
    CheckKind, Conjecture2, ExactCheck,
};
pub use enumerate::{
    count_by_size, count_by_size_with_budget, exact_conditional_coverage, independent_set_counts,
    matching_counts, Budget, CountTable, Mode, SetCounts,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A simple d-regular graph. Vertices are `0..n`; edges are stored with
/// `u < v` in lexicographic order, which fixes the edge numbering used by
/// matching enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    label: String,
}

impl RegularGraph {
    /// Validates and builds a graph. Errors name the offending vertex.
    pub fn from_edges(
        n: usize,
        d: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references vertex {} outside 0..{n}",
                    u.max(v)
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "parallel edges between vertex {v} and vertex {}",
                    w[0]
                )));
            }
            if nbrs.len() != d {
                return Err(Error::InvalidGraph(format!(
                    "vertex {v} has degree {} but the graph is declared {d}-regular",
                    nbrs.len()
                )));
            }
        }
        let edges = adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect();
        Ok(RegularGraph {
            n,
            d,
            adjacency,
            edges,
            label: label.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Closed neighborhood of every vertex as a bitset of `ceil(n/64)` words.
    pub fn closed_neighborhoods(&self) -> Vec<Vec<u64>> {
        let words = self.n.div_ceil(64);
        (0..self.n)
            .map(|v| {
                let mut bits = vec![0u64; words];
                for &u in self.adjacency[v].iter().chain(std::iter::once(&v)) {
                    bits[u / 64] |= 1 << (u % 64);
                }
                bits
            })
            .collect()
    }

    /// Cycle `C_n`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("cycle needs n >= 3, got {n}")));
        }
        Self::from_edges(n, 2, (0..n).map(|i| (i, (i + 1) % n)), format!("cycle:{n}"))
    }

    /// Hamming cube `Q_d` on `2^d` vertices.
    pub fn hypercube(d: usize) -> Result<Self> {
        if d == 0 || d > 24 {
            return Err(Error::InvalidGraph(format!(
                "hypercube dimension {d} out of range 1..=24"
            )));
        }
        let n = 1usize << d;
        let edges = (0..n).flat_map(|v| {
            (0..d)
                .map(move |b| (v, v ^ (1 << b)))
                .filter(|&(u, w)| u < w)
        });
        Self::from_edges(n, d, edges, format!("hypercube:{d}"))
    }

    /// Discrete torus `(Z_side)^dim`, `2 dim`-regular on `side^dim` vertices.
    pub fn discrete_torus(dim: usize, side: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGraph(
                "torus dimension must be at least 1".into(),
            ));
        }
        if !side.is_multiple_of(2) || side < 4 {
            return Err(Error::InvalidGraph(format!(
                "torus side must be an even integer >= 4, got {side}"
            )));
        }
        let n = side
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidGraph("torus too large".into()))?;
        let mut edges = Vec::with_capacity(n * dim);
        for v in 0..n {
            let mut stride = 1;
            for _ in 0..dim {
                let coord = (v / stride) % side;
                let up = v - coord * stride + ((coord + 1) % side) * stride;
                edges.push((v.min(up), v.max(up)));
                stride *= side;
            }
        }
        Self::from_edges(n, 2 * dim, edges, format!("torus:{dim}:{side}"))
    }

    /// `H_{d,n}`: `copies` disjoint copies of `K_{d,d}`.
    pub fn disjoint_kdd(d: usize, copies: usize) -> Result<Self> {
        if d == 0 || copies == 0 {
            return Err(Error::InvalidGraph(
                "K_{d,d} copies need d >= 1 and copies >= 1".into(),
            ));
        }
        let edges = (0..copies).flat_map(|c| {
            let base = 2 * d * c;
            (0..d).flat_map(move |i| (0..d).map(move |j| (base + i, base + d + j)))
        });
        Self::from_edges(2 * d * copies, d, edges, format!("kdd:{d}:{copies}"))
    }

    /// Parses the edge-list format: a header line `n d`, then one `u v` pair
    /// per line, 0-indexed.
    pub fn parse_edge_list(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::InvalidGraph("empty edge list".into()))?;
        let (n, d) = parse_pair(header, 1)?;
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            edges.push(parse_pair(line, lineno + 1)?);
        }
        Self::from_edges(n, d, edges, label)
    }

    pub fn from_edge_list_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text, format!("file:{}", path.display()))
    }

    /// Writes the graph in edge-list format.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.d);
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::InvalidGraph(format!(
            "line {lineno}: expected two nonnegative integers, got `{line}`"
        ))),
    }
}

/// Names a graph: `cycle:N`, `hypercube:D`, `torus:DIM:SIDE`, `kdd:D:COPIES`
/// or `file:PATH`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphSpec {
    Cycle(usize),
    Hypercube(usize),
    DiscreteTorus { dim: usize, side: usize },
    DisjointKdd { d: usize, copies: usize },
    EdgeList(PathBuf),
}

impl GraphSpec {
    pub fn build(&self) -> Result<RegularGraph> {
        match self {
            GraphSpec::Cycle(n) => RegularGraph::cycle(*n),
            GraphSpec::Hypercube(d) => RegularGraph::hypercube(*d),
            GraphSpec::DiscreteTorus { dim, side } => RegularGraph::discrete_torus(*dim, *side),
            GraphSpec::DisjointKdd { d, copies } => RegularGraph::disjoint_kdd(*d, *copies),
            GraphSpec::EdgeList(path) => RegularGraph::from_edge_list_file(path),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GraphSpec::Hypercube(d) => write!(f, "hypercube:{d}"),
            GraphSpec::DiscreteTorus { dim, side } => write!(f, "torus:{dim}:{side}"),
            GraphSpec::DisjointKdd { d, copies } => write!(f, "kdd:{d}:{copies}"),
            GraphSpec::EdgeList(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGraph(format!("unrecognized graph spec `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums = || -> Result<Vec<usize>> {
            rest.split(':')
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect()
        };
        match kind {
            "file" => Ok(GraphSpec::EdgeList(PathBuf::from(rest))),
            "cycle" => match nums()?[..] {
                [n] => Ok(GraphSpec::Cycle(n)),
                _ => Err(bad()),
            },
            "hypercube" | "cube" => match nums()?[..] {
                [d] => Ok(GraphSpec::Hypercube(d)),
                _ => Err(bad()),
            },
            "torus" => match nums()?[..] {
                [dim, side] => Ok(GraphSpec::DiscreteTorus { dim, side }),
                _ => Err(bad()),
            },
            "kdd" => match nums()?[..] {
                [d, copies] => Ok(GraphSpec::DisjointKdd { d, copies }),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

/// The built-in catalog: `C_4, C_6, C_20, Q_3, Q_4, 2 x K_{3,3}` and the
/// 4 x 4 discrete torus.
pub fn catalog() -> Vec<RegularGraph> {
    [
        GraphSpec::Cycle(4),
        GraphSpec::Cycle(6),
        GraphSpec::Cycle(20),
        GraphSpec::Hypercube(3),
        GraphSpec::Hypercube(4),
        GraphSpec::DisjointKdd { d: 3, copies: 2 },
        GraphSpec::DiscreteTorus { dim: 2, side: 4 },
    ]
    .iter()
    .map(|s| s.build().expect("catalog graphs are valid"))
    .collect()
}
