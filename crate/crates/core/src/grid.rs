//! Twisted grid diagrams for `L(p,q)`.
//!
//! Coordinates: rows `0..n` bottom-up, planar columns `0..pn` left to right.
//! A marking at `(column c, row r)` fills the unit square with corners
//! `(c, r)` and `(c + 1, r + 1)`. Passing upward through the top edge at
//! horizontal position `s` re-enters the bottom edge at `s - qn (mod pn)`, so
//! the column circles are exactly the residue classes of planar columns
//! modulo `n`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported grid dimension.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("p = {p} and q = {q} are not coprime")]
    NonCoprime { p: usize, q: usize },
    #[error("row {row} carries an X and an O in the same square")]
    MarkingCollision { row: usize },
    #[error("column circle {residue} carries {count} {kind} markings")]
    ColumnCircleViolation {
        kind: MarkingKind,
        residue: usize,
        count: usize,
    },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("commutation {0} is interleaved")]
    InterleavedCommutation(String),
    #[error("no destabilization site at row {row}, column {column}")]
    NoDestabilizationSite { row: usize, column: usize },
    #[error("cannot parse grid: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MarkingKind {
    X,
    O,
}

impl MarkingKind {
    pub fn other(self) -> Self {
        match self {
            MarkingKind::X => MarkingKind::O,
            MarkingKind::O => MarkingKind::X,
        }
    }
}

impl fmt::Display for MarkingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkingKind::X => f.write_str("X"),
            MarkingKind::O => f.write_str("O"),
        }
    }
}

/// Grid dimension `n` and lens space parameters `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridParams {
    n: usize,
    p: usize,
    q: usize,
}

impl GridParams {
    pub fn new(n: usize, p: usize, q: usize) -> Result<Self, GridError> {
        if n == 0 || n > MAX_DIM {
            return Err(GridError::OutOfRange(format!(
                "grid dimension {n} not in 1..={MAX_DIM}"
            )));
        }
        if p == 0 {
            return Err(GridError::OutOfRange("p must be positive".into()));
        }
        if q >= p {
            return Err(GridError::OutOfRange(format!("q = {q} not in 0..{p}")));
        }
        if p.gcd(&q) != 1 {
            return Err(GridError::NonCoprime { p, q });
        }
        if p * n > u16::MAX as usize {
            return Err(GridError::OutOfRange(format!("grid width {} too large", p * n)));
        }
        Ok(Self { n, p, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of planar columns, `pn`.
    pub fn width(&self) -> usize {
        self.p * self.n
    }

    /// Horizontal shift applied when crossing the top edge, `qn`.
    pub fn twist(&self) -> usize {
        self.q * self.n
    }

    /// `n! * p^n`, or `None` on overflow.
    pub fn generator_count(&self) -> Option<u128> {
        let mut count: u128 = 1;
        for k in 1..=self.n as u128 {
            count = count.checked_mul(k)?;
        }
        for _ in 0..self.n {
            count = count.checked_mul(self.p as u128)?;
        }
        Some(count)
    }

    /// Projects a point of the vertical cylinder cover onto the fundamental
    /// domain. Going up `n` rows shifts the column by `-qn`.
    pub fn project(&self, column: i64, row: i64) -> (usize, usize) {
        let n = self.n as i64;
        let width = self.width() as i64;
        let wraps = row.div_euclid(n);
        let c = (column - wraps * self.twist() as i64).rem_euclid(width);
        (c as usize, row.rem_euclid(n) as usize)
    }

    /// Column of the cylinder lift of fundamental column `column` raised by
    /// `wraps` copies of the fundamental domain.
    pub fn lift_column(&self, column: usize, wraps: i64) -> usize {
        (column as i64 + wraps * self.twist() as i64).rem_euclid(self.width() as i64) as usize
    }
}

impl fmt::Display for GridParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.p, self.q)
    }
}

/// A validated twisted grid diagram. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct GridDiagram {
    params: GridParams,
    xs: Vec<usize>,
    os: Vec<usize>,
}

/// Plain serialized form of a grid: `n, p, q` and the two marking lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub xs: Vec<usize>,
    pub os: Vec<usize>,
}

impl TryFrom<GridSpec> for GridDiagram {
    type Error = GridError;

    fn try_from(spec: GridSpec) -> Result<Self, Self::Error> {
        GridDiagram::new(spec.n, spec.p, spec.q, &spec.xs, &spec.os)
    }
}

impl From<GridDiagram> for GridSpec {
    fn from(grid: GridDiagram) -> Self {
        GridSpec {
            n: grid.params.n,
            p: grid.params.p,
            q: grid.params.q,
            xs: grid.xs,
            os: grid.os,
        }
    }
}

impl GridDiagram {
    /// Builds and validates a grid. `xs[i]` and `os[i]` are the planar
    /// columns of the markings in row `i`.
    pub fn new(n: usize, p: usize, q: usize, xs: &[usize], os: &[usize]) -> Result<Self, GridError> {
        let params = GridParams::new(n, p, q)?;
        Self::from_params(params, xs.to_vec(), os.to_vec())
    }

    pub fn from_params(params: GridParams, xs: Vec<usize>, os: Vec<usize>) -> Result<Self, GridError> {
        let n = params.n;
        let width = params.width();
        for (name, list) in [("X", &xs), ("O", &os)] {
            if list.len() != n {
                return Err(GridError::OutOfRange(format!(
                    "{name} list has {} entries, expected {n}",
                    list.len()
                )));
            }
            if let Some(&c) = list.iter().find(|&&c| c >= width) {
                return Err(GridError::OutOfRange(format!("{name} column {c} not in 0..{width}")));
            }
        }
        if let Some(row) = (0..n).find(|&r| xs[r] == os[r]) {
            return Err(GridError::MarkingCollision { row });
        }
        for (kind, list) in [(MarkingKind::X, &xs), (MarkingKind::O, &os)] {
            let mut counts = vec![0usize; n];
            for &c in list.iter() {
                counts[c % n] += 1;
            }
            if let Some(residue) = counts.iter().position(|&k| k != 1) {
                return Err(GridError::ColumnCircleViolation {
                    kind,
                    residue,
                    count: counts[residue],
                });
            }
        }
        Ok(Self { params, xs, os })
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn p(&self) -> usize {
        self.params.p
    }

    pub fn q(&self) -> usize {
        self.params.q
    }

    pub fn xs(&self) -> &[usize] {
        &self.xs
    }

    pub fn os(&self) -> &[usize] {
        &self.os
    }

    pub fn markings(&self, kind: MarkingKind) -> &[usize] {
        match kind {
            MarkingKind::X => &self.xs,
            MarkingKind::O => &self.os,
        }
    }

    /// Marking occupying the square `(column, row)`, if any.
    pub fn marking_at(&self, column: usize, row: usize) -> Option<MarkingKind> {
        if self.xs[row] == column {
            Some(MarkingKind::X)
        } else if self.os[row] == column {
            Some(MarkingKind::O)
        } else {
            None
        }
    }

    /// Number of components of the link drawn by the diagram. Row `r`
    /// continues, through the column circle of its X, into the row holding
    /// the O on that circle.
    pub fn component_count(&self) -> usize {
        let n = self.n();
        let next: Vec<usize> = (0..n)
            .map(|r| (0..n).find(|&t| self.os[t] % n == self.xs[r] % n).expect("validated"))
            .collect();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut r = start;
            while !seen[r] {
                seen[r] = true;
                r = next[r];
            }
        }
        count
    }

    pub fn is_knot(&self) -> bool {
        self.component_count() == 1
    }

    /// Homology class of the knot in `H_1(L(p,q)) = Z_p`.
    ///
    /// Each vertical arc runs upward from the `O` to the `X` on its column
    /// circle; the class is the number of times these arcs cross the bottom
    /// edge of the planar grid, mod `p`.
    pub fn homology_class(&self) -> usize {
        let params = self.params;
        let (n, p) = (params.n, params.p);
        let mut total = 0usize;
        for residue in 0..n {
            let o_row = (0..n).find(|&r| self.os[r] % n == residue).expect("validated");
            let x_row = (0..n).find(|&r| self.xs[r] % n == residue).expect("validated");
            let (o_col, x_col) = (self.os[o_row], self.xs[x_row]);
            // Walking straight up the cylinder from the O square, row x_row + k n
            // projects to column o_col - k q n.
            let wraps = (0..=p)
                .find(|&k| {
                    x_row + k * n > o_row && params.lift_column(o_col, -(k as i64)) == x_col
                })
                .expect("a column circle closes up after p wraps");
            total += wraps;
        }
        total % p
    }

    /// Applies a vertical and horizontal shift of the whole diagram.
    pub fn translate(&self, dx: i64, dy: i64) -> GridDiagram {
        let params = self.params;
        let n = params.n;
        let mut xs = vec![0; n];
        let mut os = vec![0; n];
        for r in 0..n {
            for (src, dst) in [(&self.xs, &mut xs), (&self.os, &mut os)] {
                let (c, row) = params.project(src[r] as i64 + dx, r as i64 + dy);
                dst[row] = c;
            }
        }
        GridDiagram { params, xs, os }
    }

    /// Lexicographically smallest `(xs, os)` over all `pn * n` translates.
    pub fn canonical_form(&self) -> GridDiagram {
        let params = self.params;
        let mut best = self.clone();
        for dy in 0..params.n as i64 {
            for dx in 0..params.width() as i64 {
                let candidate = self.translate(dx, dy);
                if (&candidate.xs, &candidate.os) < (&best.xs, &best.os) {
                    best = candidate;
                }
            }
        }
        best
    }

    /// Stable string key of the canonical form, used by the atlas.
    pub fn canonical_key(&self) -> String {
        let c = self.canonical_form();
        let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        format!("{}-{}-{}_x{}_o{}", c.n(), c.p(), c.q(), join(&c.xs), join(&c.os))
    }

    /// Swaps the markings: the same knot with reversed orientation.
    pub fn reversed(&self) -> GridDiagram {
        GridDiagram {
            params: self.params,
            xs: self.os.clone(),
            os: self.xs.clone(),
        }
    }

    pub fn apply_move(&self, mv: &GridMove) -> Result<GridDiagram, GridError> {
        match *mv {
            GridMove::Translation { dx, dy } => Ok(self.translate(dx, dy)),
            GridMove::Commutation { axis, index } => self.commute(axis, index),
            GridMove::Stabilization { kind, row, column } => {
                self.stabilize(kind, row, column).map(|(g, _)| g)
            }
            GridMove::Destabilization { site } => self.destabilize(site),
        }
    }

    /// Commutes rows `index, index + 1` or column circles `index, index + 1`
    /// (indices taken cyclically, through the twisted edge where needed).
    pub fn commute(&self, axis: Axis, index: usize) -> Result<GridDiagram, GridError> {
        let params = self.params;
        let (n, width) = (params.n, params.width());
        if n < 2 || index >= n {
            return Err(GridError::OutOfRange(format!(
                "commutation index {index} on a grid of dimension {n}"
            )));
        }
        match axis {
            Axis::Row => {
                // The upper row as seen from the lower one in the cylinder.
                let upper = (index + 1) % n;
                let wraps = ((index + 1) / n) as i64;
                let lower_pos = [self.xs[index], self.os[index]];
                let upper_pos = [
                    params.lift_column(self.xs[upper], wraps),
                    params.lift_column(self.os[upper], wraps),
                ];
                if !non_interleaved(lower_pos, upper_pos, width) {
                    return Err(GridError::InterleavedCommutation(format!("rows {index},{upper}")));
                }
                let mut xs = self.xs.clone();
                let mut os = self.os.clone();
                xs[index] = upper_pos[0];
                os[index] = upper_pos[1];
                xs[upper] = params.lift_column(lower_pos[0], -wraps);
                os[upper] = params.lift_column(lower_pos[1], -wraps);
                Ok(GridDiagram { params, xs, os })
            }
            Axis::Column => {
                let left = index;
                let right = (index + 1) % n;
                let row_of = |list: &[usize], residue: usize| {
                    (0..n).find(|&r| list[r] % n == residue).expect("validated")
                };
                let left_pos = [
                    self.circle_position(index, self.xs[row_of(&self.xs, left)], row_of(&self.xs, left)),
                    self.circle_position(index, self.os[row_of(&self.os, left)], row_of(&self.os, left)),
                ];
                let right_pos = [
                    self.circle_position(index + 1, self.xs[row_of(&self.xs, right)], row_of(&self.xs, right)),
                    self.circle_position(index + 1, self.os[row_of(&self.os, right)], row_of(&self.os, right)),
                ];
                if !non_interleaved(left_pos, right_pos, width) {
                    return Err(GridError::InterleavedCommutation(format!(
                        "column circles {left},{right}"
                    )));
                }
                let shift = |c: usize| {
                    if c % n == left {
                        (c + 1) % width
                    } else if c % n == right {
                        (c + width - 1) % width
                    } else {
                        c
                    }
                };
                let xs = self.xs.iter().map(|&c| shift(c)).collect();
                let os = self.os.iter().map(|&c| shift(c)).collect();
                Ok(GridDiagram { params, xs, os })
            }
        }
    }

    /// Height (in `0..pn`) of the square `(column, row)` along the column
    /// circle parametrized by the cylinder column `base`.
    fn circle_position(&self, base: usize, column: usize, row: usize) -> usize {
        let params = self.params;
        let k = (0..params.p)
            .find(|&k| params.lift_column(base, -(k as i64)) == column)
            .expect("square lies on the column circle");
        row + k * params.n
    }

    /// Stabilizes the marking in square `(column, row)`. Returns the new grid
    /// and the site at which the inverse destabilization applies.
    pub fn stabilize(
        &self,
        kind: StabilizationType,
        row: usize,
        column: usize,
    ) -> Result<(GridDiagram, DestabilizationSite), GridError> {
        let params = self.params;
        let n = params.n;
        if row >= n || column >= params.width() {
            return Err(GridError::OutOfRange(format!("square ({column},{row})")));
        }
        if self.marking_at(column, row) != Some(kind.marking) {
            return Err(GridError::OutOfRange(format!(
                "square ({column},{row}) does not hold an {} marking",
                kind.marking
            )));
        }
        let new_params = GridParams::new(n + 1, params.p, params.q)?;
        let residue = column % n;
        let new_residue = match kind.column_side {
            Side::Before => residue,
            Side::After => residue + 1,
        };
        let new_row = match kind.row_side {
            Side::Before => row,
            Side::After => row + 1,
        };
        let map_col = |c: usize| {
            let (block, j) = (c / n, c % n);
            block * (n + 1) + j + usize::from(j >= new_residue)
        };
        let map_row = |r: usize| r + usize::from(r >= new_row);
        let mut xs = vec![usize::MAX; n + 1];
        let mut os = vec![usize::MAX; n + 1];
        for r in 0..n {
            xs[map_row(r)] = map_col(self.xs[r]);
            os[map_row(r)] = map_col(self.os[r]);
        }
        let old_col = map_col(column);
        let old_row = map_row(row);
        let new_col = (column / n) * (n + 1) + new_residue;
        let (same, other) = match kind.marking {
            MarkingKind::X => (&mut xs, &mut os),
            MarkingKind::O => (&mut os, &mut xs),
        };
        same[old_row] = new_col;
        same[new_row] = old_col;
        other[new_row] = new_col;
        let grid = GridDiagram::from_params(new_params, xs, os)?;
        let site = DestabilizationSite {
            row: old_row.min(new_row),
            column: if new_col == (old_col + 1) % new_params.width() { old_col } else { new_col },
        };
        Ok((grid, site))
    }

    /// All 2x2 blocks at which a destabilization applies.
    pub fn destabilization_sites(&self) -> Vec<DestabilizationSite> {
        let mut sites = Vec::new();
        if self.n() < 2 {
            return sites;
        }
        for row in 0..self.n() - 1 {
            for column in 0..self.params.width() {
                let site = DestabilizationSite { row, column };
                if self.destabilization_layout(site).is_some() {
                    sites.push(site);
                }
            }
        }
        sites
    }

    /// Resolves a site into (row to delete, column residue to delete, the
    /// surviving square, its marking).
    fn destabilization_layout(&self, site: DestabilizationSite) -> Option<(usize, usize, (usize, usize), MarkingKind)> {
        let params = self.params;
        let (n, width) = (params.n, params.width());
        if n < 2 || site.row + 1 >= n || site.column >= width {
            return None;
        }
        let rows = [site.row, site.row + 1];
        let cols = [site.column, (site.column + 1) % width];
        if cols[0] % n == cols[1] % n {
            return None;
        }
        let mut marks = [[None; 2]; 2];
        let mut count = 0;
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                marks[i][j] = self.marking_at(c, r);
                count += usize::from(marks[i][j].is_some());
            }
        }
        if count != 3 {
            return None;
        }
        // The deleted row and column circle hold both of their markings inside
        // the block; the empty square sits on the surviving row and column.
        let (ei, ej) = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .find(|&(i, j)| marks[i][j].is_none())?;
        let (di, dj) = (1 - ei, 1 - ej);
        let kind = marks[ei][dj]?;
        if marks[di][ej] != Some(kind) || marks[di][dj] != Some(kind.other()) {
            return None;
        }
        Some((rows[di], cols[dj] % n, (cols[ej], rows[ei]), kind))
    }

    pub fn destabilize(&self, site: DestabilizationSite) -> Result<GridDiagram, GridError> {
        let (del_row, del_residue, (keep_col, keep_row), kind) = self
            .destabilization_layout(site)
            .ok_or(GridError::NoDestabilizationSite { row: site.row, column: site.column })?;
        let params = self.params;
        let n = params.n;
        let new_params = GridParams::new(n - 1, params.p, params.q)?;
        let map_col = |c: usize| {
            let (block, j) = (c / n, c % n);
            block * (n - 1) + j - usize::from(j > del_residue)
        };
        let map_row = |r: usize| r - usize::from(r > del_row);
        let mut xs = vec![0; n - 1];
        let mut os = vec![0; n - 1];
        for r in (0..n).filter(|&r| r != del_row) {
            xs[map_row(r)] = map_col(self.xs[r]);
            os[map_row(r)] = map_col(self.os[r]);
        }
        let target = match kind {
            MarkingKind::X => &mut xs,
            MarkingKind::O => &mut os,
        };
        target[map_row(keep_row)] = map_col(keep_col);
        GridDiagram::from_params(new_params, xs, os)
    }

    /// ASCII picture, top row first; `|` separates the `p` boxes.
    pub fn render_ascii(&self) -> String {
        let (n, width) = (self.n(), self.params.width());
        let mut out = String::new();
        for r in (0..n).rev() {
            for c in 0..width {
                if c > 0 && c % n == 0 {
                    out.push('|');
                }
                out.push(match self.marking_at(c, r) {
                    Some(MarkingKind::X) => 'X',
                    Some(MarkingKind::O) => 'O',
                    None => '.',
                });
            }
            out.push('\n');
        }
        out
    }
}

/// Whether the pairs `a` and `b` of positions on a circle of length `len` do
/// not interleave: both points of `a` lie in one component of the circle with
/// the points of `b` removed.
fn non_interleaved(a: [usize; 2], b: [usize; 2], len: usize) -> bool {
    if a.iter().any(|t| b.contains(t)) {
        return false;
    }
    let span = (b[1] + len - b[0]) % len;
    let inside = |t: usize| (t + len - b[0]) % len < span;
    inside(a[0]) == inside(a[1])
}

impl fmt::Display for GridDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{} {} {} [{}] [{}]", self.n(), self.p(), self.q(), join(&self.xs), join(&self.os))
    }
}

impl FromStr for GridDiagram {
    type Err = GridError;

    /// Reads `n p q` followed by the `n` X columns and the `n` O columns.
    /// Any non-digit characters act as separators, so `2 3 1 [0,1] [3,4]`
    /// and `2,3,1;0,1;3,4` both parse.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains('-') {
            return Err(GridError::Parse("negative numbers are not allowed".into()));
        }
        let numbers = s
            .split(|c: char| !c.is_ascii_digit())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|e| GridError::Parse(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if numbers.len() < 3 {
            return Err(GridError::Parse("expected n p q".into()));
        }
        let n = numbers[0];
        if numbers.len() != 3 + 2 * n {
            return Err(GridError::Parse(format!(
                "expected {} marking columns, found {}",
                2 * n,
                numbers.len() - 3
            )));
        }
        GridDiagram::new(n, numbers[1], numbers[2], &numbers[3..3 + n], &numbers[3 + n..])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Row,
    Column,
}

/// Where the inserted row (column) goes relative to the stabilized marking:
/// `Before` is below (left), `After` is above (right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Before,
    After,
}

/// One of the eight stabilization types: the marking being stabilized and
/// the placement of the new row and column circle.
///
/// In the resulting 2x2 block the square on the old row and old column is
/// empty, the two squares sharing exactly one new line carry the stabilized
/// marking kind, and the square on the new row and new column carries the
/// other kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StabilizationType {
    pub marking: MarkingKind,
    pub row_side: Side,
    pub column_side: Side,
}

impl StabilizationType {
    pub fn all() -> [StabilizationType; 8] {
        let mut out = [StabilizationType {
            marking: MarkingKind::X,
            row_side: Side::Before,
            column_side: Side::Before,
        }; 8];
        let mut i = 0;
        for marking in [MarkingKind::X, MarkingKind::O] {
            for row_side in [Side::Before, Side::After] {
                for column_side in [Side::Before, Side::After] {
                    out[i] = StabilizationType { marking, row_side, column_side };
                    i += 1;
                }
            }
        }
        out
    }
}

/// Lower-left square of a 2x2 block spanning rows `row, row + 1` and planar
/// columns `column, column + 1 (mod pn)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DestabilizationSite {
    pub row: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridMove {
    Translation { dx: i64, dy: i64 },
    Commutation { axis: Axis, index: usize },
    Stabilization { kind: StabilizationType, row: usize, column: usize },
    Destabilization { site: DestabilizationSite },
}
