//! Generators of the grid complex: one intersection point on every row and
//! every column circle, stored as the planar column used on each row.

use std::fmt;

use crate::grid::{GridParams, MAX_DIM};

/// A permutation of `0..n`, stored as its image list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: [u8; MAX_DIM],
    n: u8,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_DIM);
        let mut images = [0u8; MAX_DIM];
        for (i, slot) in images.iter_mut().enumerate().take(n) {
            *slot = i as u8;
        }
        Self { images, n: n as u8 }
    }

    /// Builds a permutation from its image list; `None` if not a bijection.
    pub fn from_images(images: &[usize]) -> Option<Self> {
        let n = images.len();
        if n > MAX_DIM {
            return None;
        }
        let mut seen = [false; MAX_DIM];
        let mut out = [0u8; MAX_DIM];
        for (i, &v) in images.iter().enumerate() {
            if v >= n || seen[v] {
                return None;
            }
            seen[v] = true;
            out[i] = v as u8;
        }
        Some(Self { images: out, n: n as u8 })
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images[..self.len()].iter().map(|&v| v as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut out = *self;
        for i in 0..self.len() {
            out.images[self.images[i] as usize] = i as u8;
        }
        out
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = *self;
        for i in 0..self.len() {
            out.images[i] = self.images[other.images[i] as usize];
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        (0..self.len()).all(|i| self.images[i] as usize == i)
    }

    pub fn inversions(&self) -> usize {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.images[i] > self.images[j])
            .count()
    }

    /// Position in the lexicographic order of all permutations of `0..n`.
    pub fn rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller_later = (i + 1..n).filter(|&j| self.images[j] < self.images[i]).count();
            rank = rank * (n - i) + smaller_later;
        }
        rank
    }

    /// Inverse of [`Permutation::rank`].
    pub fn unrank(n: usize, mut rank: usize) -> Self {
        assert!(n <= MAX_DIM);
        let mut digits = [0usize; MAX_DIM];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut remaining: Vec<u8> = (0..n as u8).collect();
        let mut images = [0u8; MAX_DIM];
        for i in 0..n {
            images[i] = remaining.remove(digits[i]);
        }
        Self { images, n: n as u8 }
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (0..factorial(n)).map(move |r| Permutation::unrank(n, r))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// A generator: `columns[r]` is the planar column of the point on row `r`.
/// The point sits at the lower-left lattice corner of that column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    cols: [u16; MAX_DIM],
    n: u8,
}

impl Generator {
    /// Builds a generator on a grid of dimension `n`; `None` unless the
    /// columns hit every residue class mod `n` exactly once.
    pub fn new(n: usize, columns: &[usize]) -> Option<Self> {
        if columns.len() != n || n > MAX_DIM || n == 0 {
            return None;
        }
        let mut seen = [false; MAX_DIM];
        let mut cols = [0u16; MAX_DIM];
        for (r, &c) in columns.iter().enumerate() {
            if c > u16::MAX as usize || seen[c % n] {
                return None;
            }
            seen[c % n] = true;
            cols[r] = c as u16;
        }
        Some(Self { cols, n: n as u8 })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn column(&self, row: usize) -> usize {
        self.cols[row] as usize
    }

    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.cols[..self.n()].iter().map(|&c| c as usize)
    }

    pub fn column_vec(&self) -> Vec<usize> {
        self.columns().collect()
    }

    /// Column circle (β index) of the point on `row`.
    pub fn beta(&self, row: usize) -> usize {
        self.column(row) % self.n()
    }

    /// Which of the `p` intersection points of row `row` with its column
    /// circle is used.
    pub fn p_coord(&self, row: usize) -> usize {
        self.column(row) / self.n()
    }

    /// `σ(r) = columns[r] mod n`.
    pub fn permutation(&self) -> Permutation {
        let mut images = [0u8; MAX_DIM];
        for (r, slot) in images.iter_mut().enumerate().take(self.n()) {
            *slot = self.beta(r) as u8;
        }
        Permutation { images, n: self.n }
    }

    /// Copy with row `row` moved to planar column `column`. The caller keeps
    /// the residue classes a permutation.
    pub(crate) fn with_column(mut self, row: usize, column: usize) -> Self {
        self.cols[row] = column as u16;
        self
    }

    pub fn belongs_to(&self, params: &GridParams) -> bool {
        self.n() == params.n() && self.columns().all(|c| c < params.width())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.columns().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Indexing of all `n! p^n` generators of a grid. Index = permutation rank
/// times `p^n` plus the p-coordinates read as base-`p` digits, row 0 least
/// significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpace {
    n: usize,
    p: usize,
    p_pow: usize,
    len: usize,
}

impl GeneratorSpace {
    /// `None` if `n! p^n` does not fit in `usize`.
    pub fn new(params: &GridParams) -> Option<Self> {
        let (n, p) = (params.n(), params.p());
        let p_pow = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(p))?;
        let len = factorial(n).checked_mul(p_pow)?;
        Some(Self { n, p, p_pow, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn generator(&self, index: usize) -> Generator {
        assert!(index < self.len);
        let perm = Permutation::unrank(self.n, index / self.p_pow);
        let mut coords = index % self.p_pow;
        let mut cols = [0u16; MAX_DIM];
        for (r, slot) in cols.iter_mut().enumerate().take(self.n) {
            *slot = ((coords % self.p) * self.n + perm.apply(r)) as u16;
            coords /= self.p;
        }
        Generator { cols, n: self.n as u8 }
    }

    pub fn index_of(&self, gen: &Generator) -> usize {
        let mut coords = 0;
        for r in (0..self.n).rev() {
            coords = coords * self.p + gen.p_coord(r);
        }
        gen.permutation().rank() * self.p_pow + coords
    }

    pub fn iter(&self) -> impl Iterator<Item = Generator> + '_ {
        (0..self.len).map(move |i| self.generator(i))
    }
}
