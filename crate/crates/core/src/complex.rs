//! The tilde chain complex, its homology over `Z` or `F_2`, the hat
//! invariant, decategorification, and the signed minus differential.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{Generator, GeneratorSpace};
use crate::gradings::{rational, GradingContext, Rational, RawGrading};
use crate::grid::GridDiagram;
use crate::rectangles::rectangles_from;
use crate::signs::{CanonicalSigns, SignAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficients {
    #[serde(rename = "z")]
    Integer,
    #[serde(rename = "f2")]
    F2,
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integer => f.write_str("z"),
            Coefficients::F2 => f.write_str("f2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("boundary squares to a nonzero map in Spin^c {spinc}, Alexander {alexander}, below Maslov {maslov}")]
    BoundarySquareNonzero { spinc: usize, alexander: String, maslov: String },
    #[error("Poincaré polynomial of Spin^c {spinc} is not divisible by the W factor")]
    NonExactFactorization { spinc: usize },
    #[error("grid is too large to enumerate its generators")]
    TooLarge,
    #[error("the diagram describes a link with {components} components, not a knot")]
    NotAKnot { components: usize },
}

/// Sparse matrix from one Maslov level (columns) to the next lower one (rows).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, value)`, sorted, no zero values, no repeats.
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize, mut triples: Vec<(usize, usize, i64)>, modulus: Option<i64>) -> Self {
        triples.sort_unstable_by_key(|t| (t.0, t.1));
        let mut entries: Vec<(usize, usize, i64)> = Vec::with_capacity(triples.len());
        for (r, c, v) in triples {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        if let Some(m) = modulus {
            for e in entries.iter_mut() {
                e.2 = e.2.rem_euclid(m);
            }
        }
        entries.retain(|e| e.2 != 0);
        Self { rows, cols, entries }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let triples = rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, v)))
            .collect();
        Self::new(rows.len(), cols, triples, None)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            out[r][c] = v;
        }
        out
    }

    /// `self * other` with optional reduction modulo `modulus`.
    pub fn compose(&self, other: &SparseMatrix, modulus: Option<i64>) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut by_row: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
        for &(r, c, v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut acc: HashMap<(usize, usize), i128> = HashMap::new();
        for &(r, k, v) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, w) in row {
                    *acc.entry((r, c)).or_insert(0) += v as i128 * w as i128;
                }
            }
        }
        let triples = acc
            .into_iter()
            .map(|((r, c), v)| {
                let v = match modulus {
                    Some(m) => v.rem_euclid(m as i128),
                    None => v,
                };
                (r, c, i64::try_from(v).expect("composition entry fits in i64"))
            })
            .collect();
        SparseMatrix::new(self.rows, other.cols, triples, modulus)
    }
}

/// A graded piece of the complex with fixed Spin^c degree and Alexander
/// grading. Level `k` has Maslov grading `top_maslov - k`; `boundaries[k]`
/// maps level `k` to level `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorComplex {
    pub spinc: usize,
    pub alexander: Rational,
    pub top_maslov: Rational,
    pub dims: Vec<usize>,
    /// Generators of each level, in basis order (empty for hand-built
    /// complexes).
    pub basis: Vec<Vec<Generator>>,
    pub boundaries: Vec<SparseMatrix>,
}

impl SectorComplex {
    pub fn maslov(&self, level: usize) -> Rational {
        &self.top_maslov - rational(level as i64, 1)
    }

    /// Checks that consecutive boundaries compose to zero.
    pub fn check_square_zero(&self, modulus: Option<i64>) -> Result<(), ComplexError> {
        for k in 1..self.boundaries.len() {
            if !self.boundaries[k].compose(&self.boundaries[k - 1], modulus).is_zero() {
                return Err(ComplexError::BoundarySquareNonzero {
                    spinc: self.spinc,
                    alexander: crate::gradings::format_rational(&self.alexander),
                    maslov: crate::gradings::format_rational(&self.maslov(k)),
                });
            }
        }
        Ok(())
    }
}

/// The tilde complex split into sectors, ordered by `(spinc, alexander)`.
#[derive(Debug, Clone)]
pub struct TildeComplex {
    pub p: usize,
    pub n: usize,
    pub coefficients: Coefficients,
    pub sectors: Vec<SectorComplex>,
}

/// Location of each generator in the sector decomposition.
struct Layout {
    sector_of: Vec<u32>,
    level_of: Vec<u32>,
    pos_of: Vec<u32>,
    sectors: Vec<SectorComplex>,
}

fn layout(grid: &GridDiagram, space: &GeneratorSpace) -> Layout {
    let ctx = GradingContext::new(grid);
    let p = grid.p() as i64;
    let raws: Vec<RawGrading> = (0..space.len()).into_par_iter().map(|i| ctx.raw(&space.generator(i))).collect();
    let mut keys: BTreeMap<(usize, i64), (i64, i64)> = BTreeMap::new();
    for raw in &raws {
        let e = keys.entry((raw.spinc, raw.alexander_num)).or_insert((raw.maslov_num, raw.maslov_num));
        e.0 = e.0.min(raw.maslov_num);
        e.1 = e.1.max(raw.maslov_num);
    }
    let index: HashMap<(usize, i64), usize> = keys.keys().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut sectors: Vec<SectorComplex> = keys
        .iter()
        .map(|(&(spinc, a_num), &(lo, hi))| {
            assert_eq!((hi - lo) % p, 0, "Maslov gradings in one sector differ by integers");
            let levels = ((hi - lo) / p + 1) as usize;
            let top = RawGrading { spinc, maslov_num: hi, alexander_num: a_num };
            SectorComplex {
                spinc,
                alexander: ctx.alexander_of(&top),
                top_maslov: ctx.maslov_of(&top),
                dims: vec![0; levels],
                basis: vec![Vec::new(); levels],
                boundaries: Vec::new(),
            }
        })
        .collect();
    let mut sector_of = vec![0u32; raws.len()];
    let mut level_of = vec![0u32; raws.len()];
    let mut pos_of = vec![0u32; raws.len()];
    for (i, raw) in raws.iter().enumerate() {
        let s = index[&(raw.spinc, raw.alexander_num)];
        let hi = keys[&(raw.spinc, raw.alexander_num)].1;
        let level = ((hi - raw.maslov_num) / p) as usize;
        let sector = &mut sectors[s];
        sector_of[i] = s as u32;
        level_of[i] = level as u32;
        pos_of[i] = sector.dims[level] as u32;
        sector.dims[level] += 1;
        sector.basis[level].push(space.generator(i));
    }
    Layout { sector_of, level_of, pos_of, sectors }
}

/// Builds the tilde complex: all generators, differential counting empty
/// rectangles that contain no marking at all.
pub fn build_tilde_complex<S: SignAssignment>(
    grid: &GridDiagram,
    sign: &S,
    coefficients: Coefficients,
) -> Result<TildeComplex, ComplexError> {
    let space = GeneratorSpace::new(&grid.params()).ok_or(ComplexError::TooLarge)?;
    let Layout { sector_of, level_of, pos_of, mut sectors, .. } = layout(grid, &space);
    let arrows: Vec<Vec<(usize, i64)>> = (0..space.len())
        .into_par_iter()
        .map(|i| {
            let x = space.generator(i);
            rectangles_from(grid, &x, true)
                .into_iter()
                .filter(|(_, r)| r.o_counts.is_zero() && r.x_counts.is_zero())
                .map(|(y, r)| {
                    let value = match coefficients {
                        Coefficients::Integer => sign.sign(&r) as i64,
                        Coefficients::F2 => 1,
                    };
                    (space.index_of(&y), value)
                })
                .collect()
        })
        .collect();
    let mut triples: Vec<Vec<Vec<(usize, usize, i64)>>> =
        sectors.iter().map(|s| vec![Vec::new(); s.dims.len().saturating_sub(1)]).collect();
    for (i, out) in arrows.iter().enumerate() {
        let (s, k) = (sector_of[i] as usize, level_of[i] as usize);
        for &(j, value) in out {
            assert_eq!(sector_of[j] as usize, s, "differential preserves Spin^c and Alexander gradings");
            assert_eq!(level_of[j] as usize, k + 1, "differential lowers the Maslov grading by one");
            triples[s][k].push((pos_of[j] as usize, pos_of[i] as usize, value));
        }
    }
    let modulus = match coefficients {
        Coefficients::Integer => None,
        Coefficients::F2 => Some(2),
    };
    for (sector, mats) in sectors.iter_mut().zip(triples) {
        sector.boundaries = mats
            .into_iter()
            .enumerate()
            .map(|(k, t)| SparseMatrix::new(sector.dims[k + 1], sector.dims[k], t, modulus))
            .collect();
    }
    let complex = TildeComplex { p: grid.p(), n: grid.n(), coefficients, sectors };
    complex
        .sectors
        .par_iter()
        .try_for_each(|s| s.check_square_zero(modulus))?;
    Ok(complex)
}

// ---------------------------------------------------------------------------
// Smith normal form

trait SnfScalar: Clone + Integer + Signed + CheckedMul + CheckedSub + CheckedAdd {}
impl SnfScalar for i64 {}
impl SnfScalar for BigInt {}

/// Nonzero invariant factors of an integer matrix, in divisibility order.
/// `None` if an intermediate value overflows the scalar type.
#[allow(clippy::needless_range_loop)]
fn invariant_factors_in<T: SnfScalar>(mut a: Vec<Vec<T>>) -> Option<Vec<T>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag: Vec<T> = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest magnitude, ties broken by fewest nonzeros in its
        // row and column.
        let row_nnz: Vec<usize> = (t..rows).map(|i| (t..cols).filter(|&j| !a[i][j].is_zero()).count()).collect();
        let col_nnz: Vec<usize> = (t..cols).map(|j| (t..rows).filter(|&i| !a[i][j].is_zero()).count()).collect();
        let mut best: Option<(T, usize, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                let mag = a[i][j].abs();
                let fill = (row_nnz[i - t] - 1) * (col_nnz[j - t] - 1);
                let better = match &best {
                    None => true,
                    Some((m, f, _, _)) => mag < *m || (mag == *m && fill < *f),
                };
                if better {
                    best = Some((mag, fill, i, j));
                }
            }
        }
        let Some((_, _, pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let pivot = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&pivot);
                for j in t..cols {
                    let sub = q.checked_mul(&a[t][j])?;
                    a[i][j] = a[i][j].checked_sub(&sub)?;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&pivot);
                for i in t..rows {
                    let sub = q.checked_mul(&a[i][t])?;
                    a[i][j] = a[i][j].checked_sub(&sub)?;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
            // Move the smallest remainder in row/column t onto the pivot.
            let mut best = (pivot.abs(), t, t);
            for i in t + 1..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < best.0 {
                    best = (a[i][t].abs(), i, t);
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < best.0 {
                    best = (a[t][j].abs(), t, j);
                }
            }
            let (_, bi, bj) = best;
            if bi != t {
                a.swap(t, bi);
            }
            if bj != t {
                for row in a.iter_mut() {
                    row.swap(t, bj);
                }
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    // Turn the diagonal into a divisibility chain.
    let k = diag.len();
    for i in 0..k {
        for j in i + 1..k {
            let g = diag[i].gcd(&diag[j]);
            let l = (diag[i].clone() / g.clone()).checked_mul(&diag[j])?;
            diag[i] = g;
            diag[j] = l;
        }
    }
    Some(diag)
}

/// Invariant factors of an integer matrix (nonzero diagonal of its Smith
/// normal form), with arbitrary precision when needed.
pub fn invariant_factors(m: &SparseMatrix) -> Vec<BigInt> {
    if m.is_zero() {
        return Vec::new();
    }
    if let Some(d) = invariant_factors_in(m.dense()) {
        return d.into_iter().map(BigInt::from).collect();
    }
    let big: Vec<Vec<BigInt>> = m.dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    invariant_factors_in(big).expect("arbitrary precision never overflows")
}

/// Rank over `F_2`.
pub fn rank_mod2(m: &SparseMatrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    let words = m.cols.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; m.rows];
    for &(r, c, v) in &m.entries {
        if v.rem_euclid(2) == 1 {
            rows[r][c / 64] ^= 1 << (c % 64);
        }
    }
    let mut rank = 0;
    for c in 0..m.cols {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// Homology

/// Maslov and Alexander grading of a homology summand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bigrading {
    pub maslov: Rational,
    pub alexander: Rational,
}

impl Bigrading {
    pub fn new(maslov: Rational, alexander: Rational) -> Self {
        Self { maslov, alexander }
    }

    /// Shift by `(-1, -1)`, the nontrivial summand of `W`.
    pub fn w_shift(&self) -> Self {
        let one = Rational::one();
        Self { maslov: &self.maslov - &one, alexander: &self.alexander - &one }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologyGroup {
    pub free_rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

/// Homology groups indexed by Spin^c degree and bigrading. Zero groups are
/// not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigradedHomology {
    pub coefficients: Coefficients,
    pub classes: Vec<BTreeMap<Bigrading, HomologyGroup>>,
}

impl BigradedHomology {
    pub fn empty(p: usize, coefficients: Coefficients) -> Self {
        Self { coefficients, classes: vec![BTreeMap::new(); p] }
    }

    pub fn spinc_count(&self) -> usize {
        self.classes.len()
    }

    pub fn groups(&self, spinc: usize) -> &BTreeMap<Bigrading, HomologyGroup> {
        &self.classes[spinc]
    }

    pub fn total_rank(&self, spinc: usize) -> usize {
        self.classes[spinc].values().map(|g| g.free_rank).sum()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.classes.iter().all(|c| c.values().all(|g| g.torsion.is_empty()))
    }

    /// Free ranks as a Poincaré polynomial.
    pub fn poincare(&self, spinc: usize) -> BTreeMap<Bigrading, usize> {
        self.classes[spinc]
            .iter()
            .filter(|(_, g)| g.free_rank > 0)
            .map(|(k, g)| (k.clone(), g.free_rank))
            .collect()
    }

    /// `(spinc, bigrading, free rank)` triples, sorted.
    pub fn free_entries(&self) -> Vec<(usize, Bigrading, usize)> {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(s, c)| c.iter().filter(|(_, g)| g.free_rank > 0).map(move |(k, g)| (s, k.clone(), g.free_rank)))
            .collect()
    }

    fn add(&mut self, spinc: usize, key: Bigrading, group: HomologyGroup) {
        if group.is_zero() {
            return;
        }
        let slot = self.classes[spinc].entry(key).or_default();
        slot.free_rank += group.free_rank;
        slot.torsion.extend(group.torsion);
        slot.torsion.sort();
    }
}

/// Homology of each sector: over `Z`, free rank `dim - rank(out) - rank(in)`
/// and torsion from the invariant factors of the incoming boundary; over
/// `F_2`, dimensions from ranks mod 2.
pub fn smith_homology(sectors: &[SectorComplex], p: usize, coefficients: Coefficients) -> BigradedHomology {
    let pieces: Vec<Vec<(usize, Bigrading, HomologyGroup)>> = sectors
        .par_iter()
        .map(|sector| {
            let levels = sector.dims.len();
            let (ranks, factors): (Vec<usize>, Vec<Vec<BigInt>>) = sector
                .boundaries
                .iter()
                .map(|m| match coefficients {
                    Coefficients::Integer => {
                        let f = invariant_factors(m);
                        (f.len(), f)
                    }
                    Coefficients::F2 => (rank_mod2(m), Vec::new()),
                })
                .unzip();
            (0..levels)
                .map(|k| {
                    let out = if k < ranks.len() { ranks[k] } else { 0 };
                    let (inc, torsion) = if k > 0 && k - 1 < ranks.len() {
                        (ranks[k - 1], factors[k - 1].iter().filter(|f| !f.is_one()).cloned().collect())
                    } else {
                        (0, Vec::new())
                    };
                    let group = HomologyGroup { free_rank: sector.dims[k] - out - inc, torsion };
                    (sector.spinc, Bigrading::new(sector.maslov(k), sector.alexander.clone()), group)
                })
                .collect()
        })
        .collect();
    let mut out = BigradedHomology::empty(p, coefficients);
    for (spinc, key, group) in pieces.into_iter().flatten() {
        out.add(spinc, key, group);
    }
    out
}

/// `F_2` dimensions predicted from integral homology by the universal
/// coefficient theorem: `free + #even torsion at (M, A) + #even torsion at
/// (M - 1, A)`.
pub fn f2_dims_from_integer(h: &BigradedHomology) -> Vec<BTreeMap<Bigrading, usize>> {
    let two = BigInt::from(2);
    h.classes
        .iter()
        .map(|class| {
            let mut dims: BTreeMap<Bigrading, usize> = BTreeMap::new();
            for (key, g) in class {
                let even = g.torsion.iter().filter(|t| t.is_multiple_of(&two)).count();
                *dims.entry(key.clone()).or_default() += g.free_rank + even;
                if even > 0 {
                    let up = Bigrading::new(&key.maslov + Rational::one(), key.alexander.clone());
                    *dims.entry(up).or_default() += even;
                }
            }
            dims.retain(|_, v| *v > 0);
            dims
        })
        .collect()
}

/// Divides a Poincaré polynomial by `(1 + x)^times`, where `x` shifts the
/// bigrading by `(-1, -1)`. `None` if the division is not exact with a
/// nonnegative quotient.
fn divide_by_w(poly: &BTreeMap<Bigrading, i64>, times: usize) -> Option<BTreeMap<Bigrading, i64>> {
    let mut current = poly.clone();
    for _ in 0..times {
        let mut rest = current.clone();
        let mut quotient = BTreeMap::new();
        let keys: Vec<Bigrading> = rest.keys().cloned().collect();
        for key in keys.into_iter().rev() {
            let c = rest.get(&key).copied().unwrap_or(0);
            if c < 0 {
                return None;
            }
            if c == 0 {
                continue;
            }
            quotient.insert(key.clone(), c);
            rest.insert(key.clone(), 0);
            *rest.entry(key.w_shift()).or_insert(0) -= c;
        }
        if rest.values().any(|&v| v != 0) {
            return None;
        }
        current = quotient;
    }
    Some(current)
}

/// Removes the `W^{⊗(n-1)}` factor from tilde homology, `W = Z_(0,0) ⊕
/// Z_(-1,-1)`. Torsion is divided summand by summand per invariant factor.
pub fn factor_out_w(tilde: &BigradedHomology, n: usize) -> Result<BigradedHomology, ComplexError> {
    let times = n.saturating_sub(1);
    let mut out = BigradedHomology::empty(tilde.spinc_count(), tilde.coefficients);
    for (spinc, class) in tilde.classes.iter().enumerate() {
        let free: BTreeMap<Bigrading, i64> =
            class.iter().map(|(k, g)| (k.clone(), g.free_rank as i64)).collect();
        let quotient = divide_by_w(&free, times).ok_or(ComplexError::NonExactFactorization { spinc })?;
        for (key, c) in quotient {
            out.add(spinc, key, HomologyGroup { free_rank: c as usize, torsion: Vec::new() });
        }
        let mut by_factor: BTreeMap<BigInt, BTreeMap<Bigrading, i64>> = BTreeMap::new();
        for (key, g) in class {
            for t in &g.torsion {
                *by_factor.entry(t.clone()).or_default().entry(key.clone()).or_insert(0) += 1;
            }
        }
        for (factor, poly) in by_factor {
            let quotient = divide_by_w(&poly, times).ok_or(ComplexError::NonExactFactorization { spinc })?;
            for (key, c) in quotient {
                out.add(spinc, key, HomologyGroup { free_rank: 0, torsion: vec![factor.clone(); c as usize] });
            }
        }
    }
    Ok(out)
}

/// Tilde homology with the given sign assignment.
pub fn tilde_homology<S: SignAssignment>(
    grid: &GridDiagram,
    sign: &S,
    coefficients: Coefficients,
) -> Result<BigradedHomology, ComplexError> {
    let complex = build_tilde_complex(grid, sign, coefficients)?;
    Ok(smith_homology(&complex.sectors, complex.p, coefficients))
}

/// Hat homology with the canonical sign assignment.
pub fn hat_homology(grid: &GridDiagram, coefficients: Coefficients) -> Result<BigradedHomology, ComplexError> {
    let signs = CanonicalSigns::new(grid.n());
    hat_homology_with(grid, &signs, coefficients)
}

pub fn hat_homology_with<S: SignAssignment>(
    grid: &GridDiagram,
    sign: &S,
    coefficients: Coefficients,
) -> Result<BigradedHomology, ComplexError> {
    let components = grid.component_count();
    if components != 1 {
        return Err(ComplexError::NotAKnot { components });
    }
    let tilde = tilde_homology(grid, sign, coefficients)?;
    factor_out_w(&tilde, grid.n())
}

// ---------------------------------------------------------------------------
// Decategorification

/// Graded Euler characteristic of one Spin^c class:
/// `Σ rank (-1)^(M - M₀) t^A`, exponents rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decategorification {
    pub spinc: usize,
    /// `M₀`: the Maslov grading counted with sign `+1`.
    pub anchor_maslov: Option<Rational>,
    /// Alexander exponent to coefficient; zero coefficients omitted.
    pub terms: BTreeMap<Rational, i64>,
}

/// Decategorifies with `M₀` the minimal Maslov grading in each class.
pub fn decategorify(h: &BigradedHomology) -> Vec<Decategorification> {
    let anchors: Vec<Option<Rational>> = h
        .classes
        .iter()
        .map(|c| c.iter().filter(|(_, g)| g.free_rank > 0).map(|(k, _)| k.maslov.clone()).min())
        .collect();
    decategorify_with_anchors(h, &anchors)
}

pub fn decategorify_with_anchors(h: &BigradedHomology, anchors: &[Option<Rational>]) -> Vec<Decategorification> {
    h.classes
        .iter()
        .enumerate()
        .map(|(spinc, class)| {
            let anchor = anchors[spinc].clone();
            let mut terms: BTreeMap<Rational, i64> = BTreeMap::new();
            if let Some(m0) = &anchor {
                for (key, g) in class.iter().filter(|(_, g)| g.free_rank > 0) {
                    let diff = (&key.maslov - m0).to_integer();
                    let sign = if diff.is_odd() { -1 } else { 1 };
                    *terms.entry(key.alexander.clone()).or_insert(0) += sign * g.free_rank as i64;
                }
            }
            terms.retain(|_, c| *c != 0);
            Decategorification { spinc, anchor_maslov: anchor, terms }
        })
        .collect()
}

/// Multiplies a Laurent polynomial with rational exponents by
/// `(1 - t^{-1})^times`.
pub fn multiply_by_w_character(terms: &BTreeMap<Rational, i64>, times: usize) -> BTreeMap<Rational, i64> {
    let mut current = terms.clone();
    for _ in 0..times {
        let mut next: BTreeMap<Rational, i64> = BTreeMap::new();
        for (e, c) in &current {
            *next.entry(e.clone()).or_insert(0) += c;
            *next.entry(e - Rational::one()).or_insert(0) -= c;
        }
        next.retain(|_, c| *c != 0);
        current = next;
    }
    current
}

// ---------------------------------------------------------------------------
// Signed minus differential

/// `sign * V^exponents * target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedMonomialTerm {
    pub target: Generator,
    pub sign: i8,
    pub v_exponents: Vec<u8>,
}

/// The differential counting empty rectangles that avoid the X markings,
/// weighted by the O markings they cover.
#[derive(Debug, Clone)]
pub struct MinusDifferential {
    space: GeneratorSpace,
    spincs: Vec<usize>,
    terms: Vec<Vec<SignedMonomialTerm>>,
}

pub fn build_signed_minus_differential<S: SignAssignment>(
    grid: &GridDiagram,
    sign: &S,
) -> Result<MinusDifferential, ComplexError> {
    let space = GeneratorSpace::new(&grid.params()).ok_or(ComplexError::TooLarge)?;
    let ctx = GradingContext::new(grid);
    let (terms, spincs): (Vec<Vec<SignedMonomialTerm>>, Vec<usize>) = (0..space.len())
        .into_par_iter()
        .map(|i| {
            let x = space.generator(i);
            let terms = rectangles_from(grid, &x, true)
                .into_iter()
                .filter(|(_, r)| r.x_counts.is_zero())
                .map(|(y, r)| SignedMonomialTerm {
                    target: y,
                    sign: sign.sign(&r),
                    v_exponents: r.o_counts.as_slice().to_vec(),
                })
                .collect();
            (terms, ctx.raw(&x).spinc)
        })
        .unzip();
    Ok(MinusDifferential { space, spincs, terms })
}

impl MinusDifferential {
    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.space.iter()
    }

    pub fn terms_of(&self, x: &Generator) -> &[SignedMonomialTerm] {
        &self.terms[self.space.index_of(x)]
    }

    pub fn term_count(&self, spinc: usize) -> usize {
        self.terms
            .iter()
            .zip(&self.spincs)
            .filter(|(_, &s)| s == spinc)
            .map(|(t, _)| t.len())
            .sum()
    }

    /// Number of nonzero coefficients of `∂∘∂`, expanded symbolically.
    pub fn square_defects(&self) -> usize {
        (0..self.terms.len())
            .into_par_iter()
            .map(|i| {
                let mut acc: HashMap<(Generator, Vec<u8>), i64> = HashMap::new();
                for t1 in &self.terms[i] {
                    for t2 in &self.terms[self.space.index_of(&t1.target)] {
                        let exps: Vec<u8> = t1.v_exponents.iter().zip(&t2.v_exponents).map(|(a, b)| a + b).collect();
                        *acc.entry((t2.target, exps)).or_insert(0) += (t1.sign * t2.sign) as i64;
                    }
                }
                acc.values().filter(|&&v| v != 0).count()
            })
            .sum()
    }

    /// Rank over `Q` of the differential restricted to one Spin^c class
    /// with every `V_i` set to 1.
    pub fn specialized_rank(&self, spinc: usize) -> usize {
        let members: Vec<usize> = (0..self.terms.len()).filter(|&i| self.spincs[i] == spinc).collect();
        let position: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut triples = Vec::new();
        for (col, &i) in members.iter().enumerate() {
            for t in &self.terms[i] {
                let row = position[&self.space.index_of(&t.target)];
                triples.push((row, col, t.sign as i64));
            }
        }
        let m = SparseMatrix::new(members.len(), members.len(), triples, None);
        invariant_factors(&m).len()
    }
}
