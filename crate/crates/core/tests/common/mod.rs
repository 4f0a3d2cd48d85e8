//! Shared fixtures and independent oracles for the integration tests.
//!
//! The oracles here walk the torus square by square through the edge
//! identifications instead of using the cylinder-cover arithmetic of the
//! library, so agreement between the two is meaningful.

#![allow(dead_code)]

use std::collections::BTreeMap;

use lensgrid::gradings::{rational, Rational};
use lensgrid::{Generator, GridDiagram, GridParams};
use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The `(2,3,1)` knot with `X = [0,1]`, `O = [3,4]`.
pub fn example_grid() -> GridDiagram {
    GridDiagram::new(2, 3, 1, &[0, 1], &[3, 4]).unwrap()
}

pub fn unknot_grid() -> GridDiagram {
    GridDiagram::new(2, 1, 0, &[0, 1], &[1, 0]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every `q` in `0..p` coprime to `p` (just `q = 0` for `p = 1`).
pub fn coprime_qs(p: usize) -> Vec<usize> {
    if p == 1 {
        return vec![0];
    }
    (1..p).filter(|&q| p.gcd(&q) == 1).collect()
}

/// Every valid `(n, p, q)` with `n`, `p` in the given ranges.
pub fn parameter_range(ns: std::ops::RangeInclusive<usize>, ps: std::ops::RangeInclusive<usize>) -> Vec<GridParams> {
    let mut out = Vec::new();
    for n in ns {
        for p in ps.clone() {
            for q in coprime_qs(p) {
                out.push(GridParams::new(n, p, q).unwrap());
            }
        }
    }
    out
}

pub fn r(num: i64, den: i64) -> Rational {
    rational(num, den)
}

/// Sorted multiset of `(maslov, alexander)` pairs.
pub fn multiset(pairs: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut v = pairs.to_vec();
    v.sort();
    v
}

// ---------------------------------------------------------------------------
// Torus walking

/// Square (or lattice point) directly above `(column, row)`, crossing the
/// glued top edge where needed.
pub fn up(params: &GridParams, (c, r): (usize, usize)) -> (usize, usize) {
    let (n, pn) = (params.n(), params.width());
    if r + 1 < n {
        (c, r + 1)
    } else {
        ((c + pn - (params.q() * n) % pn) % pn, 0)
    }
}

pub fn right(params: &GridParams, (c, r): (usize, usize)) -> (usize, usize) {
    ((c + 1) % params.width(), r)
}

fn walk<F: Fn(&GridParams, (usize, usize)) -> (usize, usize)>(
    params: &GridParams,
    start: (usize, usize),
    steps: usize,
    f: F,
) -> (usize, usize) {
    (0..steps).fold(start, |pt, _| f(params, pt))
}

/// A rectangle found by growing regions on the torus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScannedRectangle {
    pub to: Vec<usize>,
    pub lower_left: (usize, usize),
    pub width: usize,
    pub height: usize,
    pub cells: Vec<(usize, usize)>,
    pub o_counts: Vec<u8>,
    pub x_counts: Vec<u8>,
    pub interior_empty: bool,
    pub embedded: bool,
}

/// Every oriented rectangle out of `x`: all lower-left corners on `x`, all
/// widths and heights below `pn`, keeping those whose upper-right corner is
/// another component of `x`.
pub fn scan_rectangles(grid: &GridDiagram, x: &[usize]) -> Vec<ScannedRectangle> {
    let params = grid.params();
    let (n, pn) = (params.n(), params.width());
    let is_x_point = |(c, r): (usize, usize)| x[r] == c;
    let mut out = Vec::new();
    for r0 in 0..n {
        let start = (x[r0], r0);
        for height in 1..pn {
            let upper_left = walk(&params, start, height, up);
            for width in 1..pn {
                let lower_right = walk(&params, start, width, right);
                let upper_right = walk(&params, upper_left, width, right);
                if upper_right.1 == r0 || !is_x_point(upper_right) {
                    continue;
                }
                let mut cells = Vec::new();
                let mut row_start = start;
                for _ in 0..height {
                    let mut cell = row_start;
                    for _ in 0..width {
                        cells.push(cell);
                        cell = right(&params, cell);
                    }
                    row_start = up(&params, row_start);
                }
                cells.sort_unstable();
                let embedded = cells.windows(2).all(|w| w[0] != w[1]);
                let mut interior_empty = true;
                let mut row_start = up(&params, start);
                for _ in 1..height {
                    let mut pt = right(&params, row_start);
                    for _ in 1..width {
                        interior_empty &= !is_x_point(pt);
                        pt = right(&params, pt);
                    }
                    row_start = up(&params, row_start);
                }
                let count = |marks: &[usize]| -> Vec<u8> {
                    (0..n).map(|r| cells.iter().filter(|&&cell| cell == (marks[r], r)).count() as u8).collect()
                };
                let mut to = x.to_vec();
                to[r0] = lower_right.0;
                to[upper_right.1] = upper_left.0;
                out.push(ScannedRectangle {
                    to,
                    lower_left: start,
                    width,
                    height,
                    o_counts: count(grid.os()),
                    x_counts: count(grid.xs()),
                    cells,
                    interior_empty,
                    embedded,
                });
            }
        }
    }
    out.sort();
    out
}

/// Homology class by walking each vertical strand square by square from its
/// `O` up to its `X`, counting passes through the glued top edge.
pub fn strand_walk_class(grid: &GridDiagram) -> usize {
    let params = grid.params();
    let n = params.n();
    let mut wraps = 0;
    for o_row in 0..n {
        let mut square = (grid.os()[o_row], o_row);
        loop {
            let next = up(&params, square);
            if next.1 == 0 {
                wraps += 1;
            }
            square = next;
            if grid.xs()[square.1] == square.0 {
                break;
            }
        }
    }
    wraps % params.p()
}

/// Spin^c degree straight from its definition: `q - 1 + Σ (a_i - a_i^O)`
/// with `a` the block index of each component.
pub fn spinc_by_blocks(grid: &GridDiagram, g: &Generator) -> usize {
    let (n, p, q) = (grid.n() as i64, grid.p() as i64, grid.q() as i64);
    let mut sum = q - 1;
    for r in 0..grid.n() {
        sum += g.column(r) as i64 / n - grid.os()[r] as i64 / n;
    }
    sum.rem_euclid(p) as usize
}

/// `(maslov, alexander) -> free rank` for every class, for comparisons.
pub fn rank_table(h: &lensgrid::complex::BigradedHomology) -> Vec<BTreeMap<(Rational, Rational), usize>> {
    (0..h.spinc_count())
        .map(|s| h.poincare(s).into_iter().map(|(k, v)| ((k.maslov, k.alexander), v)).collect())
        .collect()
}
