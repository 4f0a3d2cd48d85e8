//! Oriented rectangles on the twisted torus.
//!
//! Rectangles are described in the vertical cylinder cover of the torus: a
//! point `(c, R)` with unbounded row `R` projects to
//! `(c - qn floor(R/n) mod pn, R mod n)`. A rectangle from `x` has its
//! lower-left corner on the component of `x` in a base row `rA < n`, spans
//! `height` rows upward and `width` columns rightward (cyclically), and has
//! its upper-right corner on a lift of another component of `x`.

use serde::{Deserialize, Serialize};

use crate::generator::Generator;
use crate::grid::{GridDiagram, GridParams, MAX_DIM};

/// A point of the vertical cylinder cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CylinderPoint {
    pub column: usize,
    pub row: i64,
}

impl CylinderPoint {
    pub fn project(&self, params: &GridParams) -> (usize, usize) {
        params.project(self.column as i64, self.row)
    }
}

/// Per-row marking counts of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MarkCounts {
    counts: [u8; MAX_DIM],
    n: u8,
}

impl MarkCounts {
    pub fn as_slice(&self) -> &[u8] {
        &self.counts[..self.n as usize]
    }

    pub fn total(&self) -> usize {
        self.as_slice().iter().map(|&c| c as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.as_slice().iter().all(|&c| c == 0)
    }
}

/// An oriented rectangle from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rectangle {
    pub from: Generator,
    pub to: Generator,
    /// Lower-left corner, on the component of `from` in row `lower_left.row`.
    pub lower_left: CylinderPoint,
    pub width: usize,
    pub height: usize,
    /// Row of the component of `from` at the upper-right corner.
    pub top_row: usize,
    /// `o_counts[i]`: number of times the rectangle covers the O in row `i`.
    pub o_counts: MarkCounts,
    pub x_counts: MarkCounts,
    /// No component of `from` lies in the interior.
    pub interior_empty: bool,
    /// The rectangle does not overlap itself on the torus.
    pub embedded: bool,
}

impl Rectangle {
    pub fn bottom_row(&self) -> usize {
        self.lower_left.row as usize
    }

    /// Empty rectangles are embedded with no `from` component inside.
    pub fn is_empty(&self) -> bool {
        self.interior_empty && self.embedded
    }

    /// β indices of the `from` and `to` components on the bottom edge.
    pub fn bottom_betas(&self) -> (usize, usize) {
        (self.from.beta(self.bottom_row()), self.from.beta(self.top_row))
    }

    /// Change of p-coordinates `to - from` per row.
    pub fn p_displacement(&self) -> Vec<i64> {
        (0..self.from.n())
            .map(|r| self.to.p_coord(r) as i64 - self.from.p_coord(r) as i64)
            .collect()
    }

    /// The fundamental-domain squares covered, with multiplicity, sorted.
    pub fn cells(&self, params: &GridParams) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.width * self.height);
        for dr in 0..self.height as i64 {
            for dc in 0..self.width {
                let c = (self.lower_left.column + dc) % params.width();
                out.push(params.project(c as i64, self.lower_left.row + dr));
            }
        }
        out.sort_unstable();
        out
    }

    /// Identity of the rectangle independent of its source generator's
    /// derived data: `(lower-left column, bottom row, width, height)`.
    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.lower_left.column, self.bottom_row(), self.width, self.height)
    }
}

/// Number of cylinder lifts of the lattice point or square `(column, row)`
/// inside the rectangle window. `strict` excludes the boundary (for lattice
/// points); otherwise the half-open window is used (for squares).
#[allow(clippy::too_many_arguments)]
fn count_lifts(
    params: &GridParams,
    column: usize,
    row: usize,
    base_row: usize,
    height: usize,
    base_col: usize,
    width: usize,
    strict: bool,
) -> u8 {
    let (n, pn) = (params.n(), params.width());
    let mut count = 0;
    for k in 0..=params.p() {
        let lifted_row = row + k * n;
        let offset = (params.lift_column(column, k as i64) + pn - base_col) % pn;
        let inside = if strict {
            lifted_row > base_row && lifted_row < base_row + height && offset > 0 && offset < width
        } else {
            lifted_row >= base_row && lifted_row < base_row + height && offset < width
        };
        count += u8::from(inside);
    }
    count
}

/// The rectangle does not overlap any of its deck translates.
fn is_embedded(params: &GridParams, width: usize, height: usize) -> bool {
    let (n, pn) = (params.n(), params.width());
    (1..params.p()).all(|k| {
        if k * n >= height {
            return true;
        }
        let s = (k * params.twist()) % pn;
        !(s < width || s + width > pn)
    })
}

fn mark_counts(grid: &GridDiagram, marks: &[usize], base_row: usize, height: usize, base_col: usize, width: usize) -> MarkCounts {
    let params = grid.params();
    let mut counts = [0u8; MAX_DIM];
    for (r, &c) in marks.iter().enumerate() {
        counts[r] = count_lifts(&params, c, r, base_row, height, base_col, width, false);
    }
    MarkCounts { counts, n: grid.n() as u8 }
}

/// Every oriented rectangle out of `x` (only the empty ones if `empty_only`),
/// paired with its target generator. Deterministic order.
pub fn rectangles_from(grid: &GridDiagram, x: &Generator, empty_only: bool) -> Vec<(Generator, Rectangle)> {
    let params = grid.params();
    let (n, pn) = (params.n(), params.width());
    let mut out = Vec::new();
    for bottom in 0..n {
        let base_col = x.column(bottom);
        for top in (0..n).filter(|&t| t != bottom) {
            let first = (top + n - bottom) % n;
            for j in 0..params.p() {
                let height = first + j * n;
                let wraps = ((bottom + height) / n) as i64;
                let top_col = params.lift_column(x.column(top), wraps);
                let width = (top_col + pn - base_col) % pn;
                let embedded = is_embedded(&params, width, height);
                if empty_only && !embedded {
                    continue;
                }
                let interior_empty = (0..n).all(|r| {
                    count_lifts(&params, x.column(r), r, bottom, height, base_col, width, true) == 0
                });
                if empty_only && !interior_empty {
                    continue;
                }
                let to = x
                    .with_column(bottom, (base_col + width) % pn)
                    .with_column(top, params.lift_column(base_col, -wraps));
                let rect = Rectangle {
                    from: *x,
                    to,
                    lower_left: CylinderPoint { column: base_col, row: bottom as i64 },
                    width,
                    height,
                    top_row: top,
                    o_counts: mark_counts(grid, grid.os(), bottom, height, base_col, width),
                    x_counts: mark_counts(grid, grid.xs(), bottom, height, base_col, width),
                    interior_empty,
                    embedded,
                };
                out.push((to, rect));
            }
        }
    }
    out
}

/// All oriented rectangles from `x` to `y`.
pub fn rect_between(grid: &GridDiagram, x: &Generator, y: &Generator) -> Vec<Rectangle> {
    if x == y {
        return Vec::new();
    }
    let differing = (0..x.n()).filter(|&r| x.column(r) != y.column(r)).count();
    if differing != 2 {
        return Vec::new();
    }
    rectangles_from(grid, x, false)
        .into_iter()
        .filter(|(to, _)| to == y)
        .map(|(_, r)| r)
        .collect()
}
