//! Maslov and Alexander gradings, the Spin^c degree, and lens space
//! correction terms.
//!
//! Points are handled in doubled coordinates so that lattice points
//! (generator components) are even and marking centers are odd; the strict
//! pair count then never meets a tie.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{Generator, GeneratorSpace};
use crate::grid::{GridDiagram, GridParams};

/// Exact rational number with arbitrary-precision parts.
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `"num/den"` (always with a denominator).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a plain integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error("p = {p} and q = {q} are not coprime (or q is out of range)")]
    NonCoprime { p: i64, q: i64 },
    #[error("Spin^c index {i} invalid for p = {p}")]
    InvalidSpinc { p: i64, i: i64 },
    #[error("point {0:?} outside the fundamental rectangle")]
    OutOfRange((i64, i64)),
}

/// A point in doubled coordinates: `(2x, 2y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfPoint {
    pub x2: i64,
    pub y2: i64,
}

impl HalfPoint {
    /// Lower-left lattice corner of the square `(column, row)`.
    pub fn lattice(column: usize, row: usize) -> Self {
        Self { x2: 2 * column as i64, y2: 2 * row as i64 }
    }

    /// Center of the square `(column, row)`.
    pub fn center(column: usize, row: usize) -> Self {
        Self { x2: 2 * column as i64 + 1, y2: 2 * row as i64 + 1 }
    }

    fn below_left_of(&self, other: &HalfPoint) -> bool {
        self.x2 < other.x2 && self.y2 < other.y2
    }
}

/// The `pn` lifted points in the `pn x pn` square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPointSet {
    pub points: Vec<HalfPoint>,
}

/// Lifts points of the `n x pn` fundamental rectangle to the `pn x pn`
/// square via `(c, b) ↦ (c + nqk mod np, b + nk)`, `k = 0..p`.
pub fn lift_cpq(points: &[HalfPoint], params: &GridParams) -> Result<LiftedPointSet, GradingError> {
    let (n, p, q) = (params.n() as i64, params.p() as i64, params.q() as i64);
    let width2 = 2 * n * p;
    let mut out = Vec::with_capacity(points.len() * p as usize);
    for pt in points {
        if pt.x2 < 0 || pt.x2 >= width2 || pt.y2 < 0 || pt.y2 >= 2 * n {
            return Err(GradingError::OutOfRange((pt.x2, pt.y2)));
        }
        for k in 0..p {
            out.push(HalfPoint {
                x2: (pt.x2 + 2 * n * q * k).rem_euclid(width2),
                y2: pt.y2 + 2 * n * k,
            });
        }
    }
    Ok(LiftedPointSet { points: out })
}

/// Number of pairs `(a, b)` with `a` strictly below and left of `b`.
pub fn pair_count(a: &[HalfPoint], b: &[HalfPoint]) -> usize {
    a.iter().map(|pa| b.iter().filter(|pb| pa.below_left_of(pb)).count()).sum()
}

type DKey = (i64, i64, i64);

fn d_memo() -> &'static RwLock<HashMap<DKey, Rational>> {
    static MEMO: OnceLock<RwLock<HashMap<DKey, Rational>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Correction term `d(p, q, i)` of the lens space `L(p,q)` in Spin^c
/// structure `i`, via `d(1,0,0) = 0` and
/// `d(p,q,i) = (pq - (2i+1-p-q)^2) / (4pq) - d(q, p mod q, i mod q)`.
pub fn d_invariant(p: i64, q: i64, i: i64) -> Result<Rational, GradingError> {
    if p < 1 || q < 0 || q >= p.max(2) || p.gcd(&q) != 1 || (p > 1 && q == 0) {
        return Err(GradingError::NonCoprime { p, q });
    }
    if i < 0 || i >= p {
        return Err(GradingError::InvalidSpinc { p, i });
    }
    Ok(d_reduced(p, q, i))
}

fn d_reduced(p: i64, q: i64, i: i64) -> Rational {
    if p == 1 {
        return Rational::zero();
    }
    if let Some(v) = d_memo().read().expect("memo lock").get(&(p, q, i)) {
        return v.clone();
    }
    let t = 2 * i + 1 - p - q;
    let head = Rational::new(BigInt::from(p * q - t * t), BigInt::from(4 * p * q));
    let value = head - d_reduced(q, p % q, i % q);
    d_memo().write().expect("memo lock").insert((p, q, i), value.clone());
    value
}

/// Maslov grading, Alexander grading and Spin^c degree of a generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trigrading {
    #[serde(with = "rational_string")]
    pub maslov: Rational,
    #[serde(with = "rational_string")]
    pub alexander: Rational,
    pub spinc: usize,
}

/// Integer form of a trigrading: `maslov = maslov_num / p + maslov_offset`
/// and `alexander = alexander_num / (2p)`, with the offsets fixed per grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawGrading {
    pub spinc: usize,
    pub maslov_num: i64,
    pub alexander_num: i64,
}

/// Precomputed pair-count tables for fast grading of many generators.
#[derive(Debug, Clone)]
pub struct GradingContext {
    params: GridParams,
    /// `(d(p,q,q-1) + 1)`.
    maslov_offset: Rational,
    /// `I(Õ,Õ)`, the generator-independent part of the Maslov numerator.
    maslov_const: i64,
    /// `I(Õ,Õ) - I(X̃,X̃) + p(1-n)`.
    alexander_const: i64,
    /// Indexed by `row * width + column`: contribution of the lifts of that
    /// lattice point to `-I(x̃,Õ) - I(Õ,x̃)`.
    maslov_single: Vec<i64>,
    /// Contribution to `2I(X̃,x̃) - 2I(Õ,x̃)`.
    alexander_single: Vec<i64>,
    /// Indexed by `(row1 * width + col1) * cells + (row2 * width + col2)`:
    /// pair count between the lifts of two lattice points.
    self_pairs: Vec<u16>,
    o_block_sum: i64,
}

impl GradingContext {
    pub fn new(grid: &GridDiagram) -> Self {
        let params = grid.params();
        let (n, p, q, width) = (params.n(), params.p(), params.q(), params.width());
        let lift_all = |pts: Vec<HalfPoint>| lift_cpq(&pts, &params).expect("in range").points;
        let o_lift = lift_all((0..n).map(|r| HalfPoint::center(grid.os()[r], r)).collect());
        let x_lift = lift_all((0..n).map(|r| HalfPoint::center(grid.xs()[r], r)).collect());
        let cells = n * width;
        let point_lifts: Vec<Vec<HalfPoint>> = (0..cells)
            .map(|idx| lift_all(vec![HalfPoint::lattice(idx % width, idx / width)]))
            .collect();
        let mut maslov_single = vec![0i64; cells];
        let mut alexander_single = vec![0i64; cells];
        for (idx, lifts) in point_lifts.iter().enumerate() {
            let x_o = pair_count(lifts, &o_lift) as i64;
            let o_x = pair_count(&o_lift, lifts) as i64;
            let xx_x = pair_count(&x_lift, lifts) as i64;
            maslov_single[idx] = -x_o - o_x;
            alexander_single[idx] = 2 * xx_x - 2 * o_x;
        }
        let mut self_pairs = vec![0u16; cells * cells];
        for (i, a) in point_lifts.iter().enumerate() {
            for (j, b) in point_lifts.iter().enumerate() {
                self_pairs[i * cells + j] = pair_count(a, b) as u16;
            }
        }
        let oo = pair_count(&o_lift, &o_lift) as i64;
        let xx = pair_count(&x_lift, &x_lift) as i64;
        let d = d_reduced(p as i64, q as i64, (q as i64 - 1).rem_euclid(p as i64));
        let o_block_sum = grid.os().iter().map(|&c| (c / n) as i64).sum();
        Self {
            params,
            maslov_offset: d + Rational::one(),
            maslov_const: oo,
            alexander_const: oo - xx + p as i64 * (1 - n as i64),
            maslov_single,
            alexander_single,
            self_pairs,
            o_block_sum,
        }
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    pub fn raw(&self, gen: &Generator) -> RawGrading {
        let (n, p, q, width) = (self.params.n(), self.params.p(), self.params.q(), self.params.width());
        let cells = n * width;
        let mut m = self.maslov_const;
        let mut a = self.alexander_const;
        let mut block_sum = 0i64;
        for r1 in 0..n {
            let i = r1 * width + gen.column(r1);
            m += self.maslov_single[i];
            a += self.alexander_single[i];
            for r2 in 0..n {
                let j = r2 * width + gen.column(r2);
                m += self.self_pairs[i * cells + j] as i64;
            }
            block_sum += gen.p_coord(r1) as i64;
        }
        let spinc = (q as i64 - 1 + block_sum - self.o_block_sum).rem_euclid(p as i64) as usize;
        RawGrading { spinc, maslov_num: m, alexander_num: a }
    }

    pub fn maslov_of(&self, raw: &RawGrading) -> Rational {
        rational(raw.maslov_num, self.params.p() as i64) + &self.maslov_offset
    }

    pub fn alexander_of(&self, raw: &RawGrading) -> Rational {
        rational(raw.alexander_num, 2 * self.params.p() as i64)
    }

    pub fn trigrading(&self, gen: &Generator) -> Trigrading {
        let raw = self.raw(gen);
        Trigrading {
            maslov: self.maslov_of(&raw),
            alexander: self.alexander_of(&raw),
            spinc: raw.spinc,
        }
    }
}

/// All `n! p^n` generators of the grid, in a fixed order.
pub fn enumerate_generators(grid: &GridDiagram) -> impl Iterator<Item = Generator> {
    let space = GeneratorSpace::new(&grid.params()).expect("generator count fits in usize");
    (0..space.len()).map(move |i| space.generator(i))
}

/// Maslov grading computed directly from the lifted point sets.
pub fn maslov(grid: &GridDiagram, gen: &Generator) -> Rational {
    let (x, o, _) = lifted_sets(grid, gen);
    let params = grid.params();
    let (p, q) = (params.p() as i64, params.q() as i64);
    let num = pair_count(&x, &x) as i64 - pair_count(&x, &o) as i64 - pair_count(&o, &x) as i64
        + pair_count(&o, &o) as i64;
    rational(num, p) + d_reduced(p, q, (q - 1).rem_euclid(p)) + Rational::one()
}

/// Alexander grading computed directly from the lifted point sets.
pub fn alexander(grid: &GridDiagram, gen: &Generator) -> Rational {
    let (x, o, xm) = lifted_sets(grid, gen);
    let (n, p) = (grid.n() as i64, grid.p() as i64);
    let num = pair_count(&o, &o) as i64 - pair_count(&xm, &xm) as i64 + 2 * pair_count(&xm, &x) as i64
        - 2 * pair_count(&o, &x) as i64;
    rational(num, 2 * p) + rational(1 - n, 2)
}

/// Spin^c degree `q - 1 + Σ (a_i - a_i^O) mod p`.
pub fn spinc(grid: &GridDiagram, gen: &Generator) -> usize {
    let (n, p, q) = (grid.n() as i64, grid.p() as i64, grid.q() as i64);
    let sum: i64 = (0..grid.n())
        .map(|r| gen.p_coord(r) as i64 - grid.os()[r] as i64 / n)
        .sum();
    (q - 1 + sum).rem_euclid(p) as usize
}

fn lifted_sets(grid: &GridDiagram, gen: &Generator) -> (Vec<HalfPoint>, Vec<HalfPoint>, Vec<HalfPoint>) {
    let params = grid.params();
    let n = grid.n();
    let lift = |pts: Vec<HalfPoint>| lift_cpq(&pts, &params).expect("in range").points;
    (
        lift((0..n).map(|r| HalfPoint::lattice(gen.column(r), r)).collect()),
        lift((0..n).map(|r| HalfPoint::center(grid.os()[r], r)).collect()),
        lift((0..n).map(|r| HalfPoint::center(grid.xs()[r], r)).collect()),
    )
}

/// Serde helper rendering rationals as `"num/den"` strings.
pub mod rational_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| D::Error::custom(format!("invalid rational {s:?}")))
    }
}
