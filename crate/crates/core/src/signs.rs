//! Sign assignments for rectangles through the Spin extension of the
//! symmetric group.
//!
//! The extension is realized inside the real Clifford algebra on
//! `e_0, ..., e_{n-1}` with `e_i^2 = -1` and `e_i e_j = -e_j e_i`. The lift of
//! the transposition `(i j)` is the unnormalized vector `v_ij = e_i - e_j`,
//! so `v_ij^2 = -2` plays the role of the central element at scale 2. An
//! element over the identity permutation is a pure scalar `±2^(k/2)` and its
//! sign is the central bit.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicI8, Ordering};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::generator::{factorial, Generator, GeneratorSpace, Permutation};
use crate::grid::{GridDiagram, MAX_DIM};
use crate::rectangles::{rectangles_from, Rectangle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("endpoints of the rectangle are not related by its bottom-edge transposition")]
    NotARectangle,
    #[error("grid has {generators} generators, above the cap of {cap}")]
    TooLarge { generators: u128, cap: u128 },
}

/// An element of the Clifford algebra, stored as a sparse expansion over
/// basis blades (bitmask of the `e_i` factors in increasing order), together
/// with the number of vector factors used to build it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinElement {
    rank: usize,
    terms: Vec<(u32, BigInt)>,
    word_length: usize,
}

/// Sign of `e_a e_b = sign * e_{a xor b}` for basis blades `a`, `b`.
fn blade_product_sign(a: u32, b: u32) -> i32 {
    let mut swaps = 0u32;
    for i in 0..32 {
        if b >> i & 1 == 1 {
            swaps += a.checked_shr(i + 1).unwrap_or(0).count_ones();
        }
    }
    let squares = (a & b).count_ones();
    if (swaps + squares).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl SpinElement {
    pub fn scalar(rank: usize, value: i64) -> Self {
        let terms = if value == 0 { vec![] } else { vec![(0, BigInt::from(value))] };
        Self { rank, terms, word_length: 0 }
    }

    pub fn identity(rank: usize) -> Self {
        Self::scalar(rank, 1)
    }

    /// `v_ij = e_i - e_j`, the lift of the transposition `(i j)`.
    pub fn transposition(rank: usize, i: usize, j: usize) -> Self {
        assert!(i != j && i < rank && j < rank);
        let mut terms = vec![(1u32 << i, BigInt::from(1)), (1u32 << j, BigInt::from(-1))];
        terms.sort_by_key(|t| t.0);
        Self { rank, terms, word_length: 1 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn terms(&self) -> &[(u32, BigInt)] {
        &self.terms
    }

    pub fn product(&self, other: &Self) -> Result<Self, SignError> {
        if self.rank != other.rank {
            return Err(SignError::RankMismatch(self.rank, other.rank));
        }
        let mut acc: HashMap<u32, BigInt> = HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let coeff = ca * cb;
                let entry = acc.entry(a ^ b).or_insert_with(BigInt::zero);
                if blade_product_sign(*a, *b) > 0 {
                    *entry += coeff;
                } else {
                    *entry -= coeff;
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by_key(|t| t.0);
        Ok(Self { rank: self.rank, terms, word_length: self.word_length + other.word_length })
    }

    fn mul(&self, other: &Self) -> Self {
        self.product(other).expect("equal ranks")
    }

    pub fn add(&self, other: &Self) -> Result<Self, SignError> {
        if self.rank != other.rank {
            return Err(SignError::RankMismatch(self.rank, other.rank));
        }
        let mut acc: HashMap<u32, BigInt> = HashMap::new();
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            *acc.entry(*m).or_insert_with(BigInt::zero) += c;
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by_key(|t| t.0);
        Ok(Self { rank: self.rank, terms, word_length: self.word_length.max(other.word_length) })
    }

    pub fn scaled(&self, factor: i64) -> Self {
        let terms = if factor == 0 {
            vec![]
        } else {
            self.terms.iter().map(|(m, c)| (*m, c * factor)).collect()
        };
        Self { rank: self.rank, terms, word_length: self.word_length }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Clifford reversion: reverses the order of vector factors.
    pub fn reverse(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let g = m.count_ones();
                let flip = (g * g.saturating_sub(1) / 2) % 2 == 1;
                (*m, if flip { -c } else { c.clone() })
            })
            .collect();
        Self { rank: self.rank, terms, word_length: self.word_length }
    }

    /// `2^k` times the inverse, for an element built from `k` vectors `v_ij`.
    pub fn inverse_scaled(&self) -> Self {
        let r = self.reverse();
        if self.word_length % 2 == 1 {
            r.scaled(-1)
        } else {
            r
        }
    }

    /// The scalar value if the element is a multiple of the unit.
    pub fn as_scalar(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    /// The permutation `π` with `g e_m rev(g) = 2^k e_{π(m)}`, if the element
    /// lies in the image of the Spin extension.
    pub fn underlying_permutation(&self) -> Option<Permutation> {
        let mut images = Vec::with_capacity(self.rank);
        let rev = self.reverse();
        let expected = BigInt::from(1) << self.word_length;
        for m in 0..self.rank {
            let basis = Self { rank: self.rank, terms: vec![(1 << m, BigInt::from(1))], word_length: 0 };
            let conj = self.mul(&basis).mul(&rev);
            match conj.terms.as_slice() {
                [(blade, c)] if blade.count_ones() == 1 && *c == expected => {
                    images.push(blade.trailing_zeros() as usize)
                }
                _ => return None,
            }
        }
        Permutation::from_images(&images)
    }
}

impl fmt::Display for SpinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let blade: Vec<String> = (0..self.rank).filter(|i| m >> i & 1 == 1).map(|i| format!("e{i}")).collect();
                if blade.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", blade.join(""))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// The section of the Spin extension used throughout: sort the image list
/// by adjacent swaps, recording swap positions `w_1, ..., w_k`; then
/// `σ = s_{w_k} ∘ ... ∘ s_{w_1}` and the lift is `v_{w_k} ... v_{w_1}` with
/// `v_w = e_w - e_{w+1}`. The word length is the inversion number.
pub fn canonical_section(sigma: &Permutation) -> SpinElement {
    let n = sigma.len();
    let mut current: Vec<usize> = sigma.images().collect();
    let mut word = Vec::new();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n.saturating_sub(1) {
            if current[i] > current[i + 1] {
                current.swap(i, i + 1);
                word.push(i);
                changed = true;
            }
        }
    }
    word.iter()
        .rev()
        .fold(SpinElement::identity(n), |acc, &i| acc.mul(&SpinElement::transposition(n, i, i + 1)))
}

/// The Spin part of the image of a rectangle: `v_ij` where `i`, `j` are the
/// column circles of the `from` and `to` components on its bottom edge.
pub fn phi(rect: &Rectangle) -> SpinElement {
    let (i, j) = rect.bottom_betas();
    SpinElement::transposition(rect.from.n(), i, j)
}

/// A `±1` function on rectangles.
pub trait SignAssignment: Send + Sync {
    fn sign(&self, rect: &Rectangle) -> i8;
}

impl<T: SignAssignment + ?Sized> SignAssignment for &T {
    fn sign(&self, rect: &Rectangle) -> i8 {
        (**self).sign(rect)
    }
}

impl<T: SignAssignment + ?Sized> SignAssignment for Arc<T> {
    fn sign(&self, rect: &Rectangle) -> i8 {
        (**self).sign(rect)
    }
}

/// The sign assignment induced by [`canonical_section`].
///
/// The sign of a rectangle depends only on the permutation of its source and
/// its two bottom-edge column circles, so values are cached per
/// `(permutation, i, j)`.
pub struct CanonicalSigns {
    n: usize,
    sections: Vec<OnceLock<SpinElement>>,
    cache: Vec<AtomicI8>,
}

impl fmt::Debug for CanonicalSigns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CanonicalSigns").field("n", &self.n).finish()
    }
}

impl CanonicalSigns {
    pub fn new(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n));
        let count = factorial(n);
        Self {
            n,
            sections: (0..count).map(|_| OnceLock::new()).collect(),
            cache: (0..count * n * n).map(|_| AtomicI8::new(0)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Section applied to the permutation sending a column circle to the row
    /// of the generator component on it.
    fn section_of(&self, label_to_row: &Permutation) -> &SpinElement {
        self.sections[label_to_row.rank()].get_or_init(|| canonical_section(label_to_row))
    }

    /// Sign of a rectangle whose source has row permutation `sigma` and whose
    /// bottom edge joins column circles `i` (source) and `j` (target).
    pub fn sign_for(&self, sigma: &Permutation, i: usize, j: usize) -> i8 {
        let n = self.n;
        let slot = &self.cache[(sigma.rank() * n + i) * n + j];
        let cached = slot.load(Ordering::Relaxed);
        if cached != 0 {
            return cached;
        }
        let value = self.compute_sign(sigma, i, j);
        slot.store(value, Ordering::Relaxed);
        value
    }

    fn compute_sign(&self, sigma: &Permutation, i: usize, j: usize) -> i8 {
        let n = self.n;
        let swap = Permutation::from_images(
            &(0..n).map(|m| if m == i { j } else if m == j { i } else { m }).collect::<Vec<_>>(),
        )
        .expect("transposition");
        let from_labels = sigma.inverse();
        let to_labels = swap.compose(sigma).inverse();
        let product = self
            .section_of(&from_labels)
            .mul(&SpinElement::transposition(n, i, j))
            .mul(&self.section_of(&to_labels).inverse_scaled());
        let lambda = product
            .as_scalar()
            .expect("an element over the identity permutation is a scalar");
        let magnitude = BigInt::from(1) << (product.word_length() / 2);
        assert!(
            product.word_length().is_multiple_of(2) && lambda.abs() == magnitude,
            "scalar {lambda} is not ±2^(k/2)"
        );
        if lambda.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl SignAssignment for CanonicalSigns {
    fn sign(&self, rect: &Rectangle) -> i8 {
        let (i, j) = rect.bottom_betas();
        self.sign_for(&rect.from.permutation(), i, j)
    }
}

/// Checked sign evaluation: the endpoints must differ by the bottom-edge
/// transposition of the rectangle.
pub fn rect_sign(signs: &CanonicalSigns, rect: &Rectangle) -> Result<i8, SignError> {
    let (i, j) = rect.bottom_betas();
    let n = rect.from.n();
    if n != signs.n() || rect.to.n() != n {
        return Err(SignError::RankMismatch(signs.n(), n));
    }
    let (a, b) = (rect.bottom_row(), rect.top_row);
    let related = i != j
        && rect.to.beta(a) == j
        && rect.to.beta(b) == i
        && (0..n).all(|r| r == a || r == b || rect.to.column(r) == rect.from.column(r));
    if !related {
        return Err(SignError::NotARectangle);
    }
    Ok(signs.sign(rect))
}

/// A `±1` function on generators.
#[derive(Clone)]
pub struct GaugeMap(Arc<dyn Fn(&Generator) -> i8 + Send + Sync>);

impl fmt::Debug for GaugeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GaugeMap(..)")
    }
}

impl GaugeMap {
    pub fn new(f: impl Fn(&Generator) -> i8 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn trivial() -> Self {
        Self::new(|_| 1)
    }

    /// A pseudo-random gauge determined by `seed`.
    pub fn random(seed: u64) -> Self {
        Self::new(move |g| {
            let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
            for c in g.columns() {
                h = splitmix64(h ^ c as u64);
            }
            if h & 1 == 0 {
                1
            } else {
                -1
            }
        })
    }

    pub fn value(&self, g: &Generator) -> i8 {
        (self.0)(g)
    }

    /// Pointwise product.
    pub fn compose(&self, other: &GaugeMap) -> GaugeMap {
        let (a, b) = (self.clone(), other.clone());
        Self::new(move |g| a.value(g) * b.value(g))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `S^v(r) = v(from) S(r) v(to)`.
#[derive(Debug, Clone)]
pub struct Gauged<S> {
    pub inner: S,
    pub gauge: GaugeMap,
}

pub fn gauge_transform<S: SignAssignment>(inner: S, gauge: GaugeMap) -> Gauged<S> {
    Gauged { inner, gauge }
}

impl<S: SignAssignment> SignAssignment for Gauged<S> {
    fn sign(&self, rect: &Rectangle) -> i8 {
        self.gauge.value(&rect.from) * self.inner.sign(rect) * self.gauge.value(&rect.to)
    }
}

/// A sign assignment with the sign of one rectangle flipped, for fault
/// injection.
#[derive(Debug, Clone)]
pub struct FlippedSign<S> {
    pub inner: S,
    pub from: Generator,
    pub shape: (usize, usize, usize, usize),
}

impl<S: SignAssignment> FlippedSign<S> {
    pub fn new(inner: S, rect: &Rectangle) -> Self {
        Self { inner, from: rect.from, shape: rect.shape() }
    }
}

impl<S: SignAssignment> SignAssignment for FlippedSign<S> {
    fn sign(&self, rect: &Rectangle) -> i8 {
        let s = self.inner.sign(rect);
        if rect.from == self.from && rect.shape() == self.shape {
            -s
        } else {
            s
        }
    }
}

/// A violated axiom, with the rectangles involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    /// Two decompositions of the same region from `from` to `to` whose sign
    /// products agree.
    Square { from: Generator, to: Generator, products: Vec<i8> },
    /// More than two decompositions of one region.
    Decompositions { from: Generator, to: Generator, count: usize },
    /// A horizontal annulus with sign product `-1`.
    AlphaStrip { at: Generator, first: (usize, usize, usize, usize), second: (usize, usize, usize, usize) },
    /// A vertical annulus with sign product `+1`.
    BetaStrip { at: Generator, first: (usize, usize, usize, usize), second: (usize, usize, usize, usize) },
    /// A pair of rectangles returning to the start that is neither kind of
    /// annulus.
    UnclassifiedStrip { at: Generator, first: (usize, usize, usize, usize), second: (usize, usize, usize, usize) },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub generators: usize,
    pub rectangles: usize,
    pub paired_regions: usize,
    pub single_regions: usize,
    pub alpha_strips: usize,
    pub beta_strips: usize,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Default generator cap for exhaustive axiom checks.
pub const DEFAULT_AXIOM_CAP: u128 = 20_000;

/// Exhaustively checks the sign assignment axioms over all rectangles (empty
/// or not) and all composable pairs of the grid.
pub fn verify_sign_axioms<S: SignAssignment>(grid: &GridDiagram, sign: &S, cap: u128) -> Result<AxiomReport, SignError> {
    let params = grid.params();
    let count = params.generator_count().unwrap_or(u128::MAX);
    if count > cap {
        return Err(SignError::TooLarge { generators: count, cap });
    }
    let space = GeneratorSpace::new(&params).expect("below cap");
    let pn = params.width();
    let cell_count = params.n() * pn;
    // Regions are compared as per-square multiplicity vectors.
    let multiplicities = |r: &Rectangle| -> Box<[u8]> {
        let mut m = vec![0u8; cell_count];
        for (c, row) in r.cells(&params) {
            m[row * pn + c] += 1;
        }
        m.into_boxed_slice()
    };
    let rects: Vec<Vec<(Rectangle, i8, usize)>> = space
        .iter()
        .map(|x| {
            rectangles_from(grid, &x, false)
                .into_iter()
                .map(|(to, r)| {
                    let s = sign.sign(&r);
                    (r, s, space.index_of(&to))
                })
                .collect()
        })
        .collect();
    let mut report = AxiomReport {
        generators: space.len(),
        rectangles: rects.iter().map(Vec::len).sum(),
        ..Default::default()
    };
    let regions_of: Vec<Vec<Box<[u8]>>> =
        rects.iter().map(|out| out.iter().map(|(r, _, _)| multiplicities(r)).collect()).collect();
    for (x_idx, out) in rects.iter().enumerate() {
        let x = space.generator(x_idx);
        let mut regions: HashMap<(usize, Box<[u8]>), Vec<i8>> = HashMap::new();
        for (k1, (r1, s1, y_idx)) in out.iter().enumerate() {
            let cells1 = &regions_of[x_idx][k1];
            for (k2, (r2, s2, z_idx)) in rects[*y_idx].iter().enumerate() {
                let product = s1 * s2;
                if *z_idx == x_idx {
                    let (first, second) = (r1.shape(), r2.shape());
                    let alpha = r1.bottom_row() == r2.bottom_row()
                        && r1.height == r2.height
                        && r1.width + r2.width == pn;
                    let beta = r1.width == r2.width && r1.height + r2.height == pn;
                    if alpha {
                        report.alpha_strips += 1;
                        if product != 1 {
                            report.failures.push(AxiomFailure::AlphaStrip { at: x, first, second });
                        }
                    } else if beta {
                        report.beta_strips += 1;
                        if product != -1 {
                            report.failures.push(AxiomFailure::BetaStrip { at: x, first, second });
                        }
                    } else {
                        report.failures.push(AxiomFailure::UnclassifiedStrip { at: x, first, second });
                    }
                    continue;
                }
                let cells: Box<[u8]> =
                    cells1.iter().zip(regions_of[*y_idx][k2].iter()).map(|(a, b)| a + b).collect();
                regions.entry((*z_idx, cells)).or_default().push(product);
            }
        }
        let mut keys: Vec<_> = regions.keys().cloned().collect();
        keys.sort();
        for key in keys {
            let products = &regions[&key];
            let to = space.generator(key.0);
            match products.len() {
                1 => report.single_regions += 1,
                2 => {
                    report.paired_regions += 1;
                    if products[0] != -products[1] {
                        report.failures.push(AxiomFailure::Square { from: x, to, products: products.clone() });
                    }
                }
                k => report.failures.push(AxiomFailure::Decompositions { from: x, to, count: k }),
            }
        }
    }
    Ok(report)
}
