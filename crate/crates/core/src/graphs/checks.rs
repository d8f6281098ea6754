use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::enumerate::{count_by_size, CountTable, Mode};
use super::RegularGraph;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `Pr[E_k] <= (1-p)^C(k,2)`.
    Birthday,
    /// `E[V_k | E_k] >= 1 - (1-p)^k`.
    Repulsion,
    /// The second-order lower bound on `E[V_k | E_k]` for independent sets.
    Bipest,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Birthday => "birthday",
            CheckKind::Repulsion => "repulsion",
            CheckKind::Bipest => "bipest",
        })
    }
}

/// One exact comparison. `slack` is positive when the inequality holds
/// strictly, zero at equality: `rhs - lhs` for the birthday check and
/// `lhs - rhs` for the lower-bound checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCheck {
    pub kind: CheckKind,
    pub mode: Mode,
    pub k: usize,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
    pub slack: f64,
}

impl ExactCheck {
    fn upper(kind: CheckKind, mode: Mode, k: usize, lhs: BigRational, rhs: BigRational) -> Self {
        let slack = to_f64(&(&rhs - &lhs));
        ExactCheck {
            kind,
            mode,
            k,
            holds: lhs <= rhs,
            lhs,
            rhs,
            slack,
        }
    }

    fn lower(kind: CheckKind, mode: Mode, k: usize, lhs: BigRational, rhs: BigRational) -> Self {
        let slack = to_f64(&(&lhs - &rhs));
        ExactCheck {
            kind,
            mode,
            k,
            holds: lhs >= rhs,
            lhs,
            rhs,
            slack,
        }
    }
}

pub(crate) fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn int(n: usize) -> BigInt {
    BigInt::from(n)
}

fn factorial(k: usize) -> BigInt {
    (2..=k).fold(BigInt::one(), |acc, i| acc * int(i))
}

fn choose2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

fn pow(q: &BigRational, e: usize) -> BigRational {
    BigRational::new_raw(q.numer().pow(e as u32), q.denom().pow(e as u32))
}

impl CountTable {
    /// `Pr[E_k] = k! count(k) / N^k` against `(1-p)^C(k,2)`.
    pub fn birthday_check(&self, k: usize) -> ExactCheck {
        let n = self.universe();
        let lhs = BigRational::new(
            factorial(k) * BigInt::from(self.count(k)),
            BigInt::from(BigUint::from(n).pow(k as u32)),
        );
        let q = BigRational::one() - self.p();
        let rhs = pow(&q, choose2(k));
        ExactCheck::upper(CheckKind::Birthday, self.mode, k, lhs, rhs)
    }

    /// `E[V_k | E_k]` against `1 - (1-p)^k`.
    pub fn repulsion_check(&self, k: usize) -> Result<ExactCheck> {
        let lhs = self.conditional_coverage(k)?;
        let q = BigRational::one() - self.p();
        let rhs = BigRational::one() - pow(&q, k);
        Ok(ExactCheck::lower(
            CheckKind::Repulsion,
            self.mode,
            k,
            lhs,
            rhs,
        ))
    }

    /// `E[V_k | E_k] >= k(d+1)/n - C(k,2) d(d-1) / (n^2 (1-kp)^2)`, for
    /// independent sets with `kp < 1`.
    pub fn bipest_check(&self, k: usize) -> Result<ExactCheck> {
        if self.mode != Mode::IndependentSets {
            return Err(invalid(
                "mode",
                "the second-order estimate applies to independent sets only",
            ));
        }
        let p = self.p();
        let kp = p.clone() * BigRational::from_integer(int(k));
        if kp >= BigRational::one() {
            return Err(Error::Inapplicable { kp: to_f64(&kp) });
        }
        let lhs = self.conditional_coverage(k)?;
        let (n, d) = (self.n, self.d);
        let first = BigRational::new(int(k * (d + 1)), int(n));
        let one_minus = BigRational::one() - kp;
        let second = BigRational::new(int(choose2(k) * d * d.saturating_sub(1)), int(n * n))
            / (&one_minus * &one_minus);
        let rhs = first - second;
        Ok(ExactCheck::lower(CheckKind::Bipest, self.mode, k, lhs, rhs))
    }
}

pub fn birthday_check(g: &RegularGraph, k: usize, mode: Mode) -> Result<ExactCheck> {
    Ok(count_by_size(g, mode)?.birthday_check(k))
}

pub fn repulsion_check(g: &RegularGraph, k: usize, mode: Mode) -> Result<ExactCheck> {
    count_by_size(g, mode)?.repulsion_check(k)
}

pub fn bipest_check(g: &RegularGraph, k: usize) -> Result<ExactCheck> {
    count_by_size(g, Mode::IndependentSets)?.bipest_check(k)
}

/// Outcome of comparing `E[V_k | E_k]` on a graph `G` and on the disjoint
/// union of `K_{d,d}` of the same size.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjecture2 {
    pub k: usize,
    pub value_g: BigRational,
    pub value_h: BigRational,
    /// `value_h <= value_g`.
    pub consistent: bool,
}

pub fn conjecture2_compare(g: &RegularGraph, k: usize) -> Result<Conjecture2> {
    let (n, d) = (g.n(), g.degree());
    if d == 0 || n % (2 * d) != 0 {
        return Err(Error::NoExtremalGraph { two_d: 2 * d, n });
    }
    let h = RegularGraph::disjoint_kdd(d, n / (2 * d))?;
    let tg = count_by_size(g, Mode::IndependentSets)?;
    let th = count_by_size(&h, Mode::IndependentSets)?;
    conjecture2_compare_tables(&tg, &th, k)
}

/// As [`conjecture2_compare`], from precomputed independent-set tables.
pub fn conjecture2_compare_tables(g: &CountTable, h: &CountTable, k: usize) -> Result<Conjecture2> {
    if g.mode != Mode::IndependentSets || h.mode != Mode::IndependentSets {
        return Err(invalid(
            "mode",
            "comparison is defined for independent sets",
        ));
    }
    if g.n != h.n || g.d != h.d {
        return Err(invalid("graphs", "both graphs must share n and d"));
    }
    let value_g = g.conditional_coverage(k)?;
    let value_h = h.conditional_coverage(k)?;
    Ok(Conjecture2 {
        k,
        consistent: value_h <= value_g,
        value_g,
        value_h,
    })
}

pub fn triangle_count(g: &RegularGraph) -> u64 {
    let mut t = 0;
    for &(u, v) in g.edges() {
        t += g
            .neighbors(v)
            .iter()
            .filter(|&&w| w > v && g.has_edge(u, w))
            .count() as u64;
    }
    t
}

/// `(1/n) sum_v Pr[v neighbors both of two points | E_2]`, by direct
/// enumeration of independent pairs.
pub fn mean_pair_overlap_given_e2(g: &RegularGraph) -> Result<BigRational> {
    let n = g.n();
    let mut pairs = 0usize;
    let mut hits = 0usize;
    for a in 0..n {
        for b in (a + 1)..n {
            if g.has_edge(a, b) {
                continue;
            }
            pairs += 1;
            let (na, nb) = (g.neighbors(a), g.neighbors(b));
            hits += na.iter().filter(|v| nb.binary_search(v).is_ok()).count();
        }
    }
    if pairs == 0 {
        return Err(Error::EmptyEvent { k: 2 });
    }
    Ok(BigRational::new(int(hits), int(pairs * n)))
}

/// `(n C(d,2) - 3 T) / (C(n,2) - dn/2) / n` with `T` the triangle count.
pub fn triangle_overlap_formula(g: &RegularGraph) -> Result<BigRational> {
    let (n, d) = (g.n(), g.degree());
    let num = int(n * choose2(d)) - BigInt::from(3 * triangle_count(g));
    let den = int(choose2(n)) - int(d * n / 2);
    if den.is_zero() {
        return Err(Error::EmptyEvent { k: 2 });
    }
    Ok(BigRational::new(num, den * int(n)))
}
