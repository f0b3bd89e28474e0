//! Sparse rational linear combinations of forests and of forest pairs.

use alloc::collections::btree_map::{self, BTreeMap};
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::forest::Forest;

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Which basis a dual element is written in. Values in the `Zeta` basis are
/// coefficients against `ζ_h = Σ(h)·δ_h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Basis {
    #[default]
    Delta,
    Zeta,
}

/// A finite rational combination `Σ q_h h`. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct ForestSeries {
    terms: BTreeMap<Forest, Q>,
}

impl ForestSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from(Forest::empty())
    }

    pub fn term(forest: Forest, coef: Q) -> Self {
        let mut s = Self::zero();
        s.add_term(forest, coef);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, forest: &Forest) -> Q {
        self.terms.get(forest).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Forest, Q> {
        self.terms.iter()
    }

    pub fn forests(&self) -> impl Iterator<Item = &Forest> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, forest: Forest, coef: Q) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(forest) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &ForestSeries, scale: &Q) {
        if scale.is_zero() {
            return;
        }
        for (f, c) in &other.terms {
            self.add_term(f.clone(), c * scale);
        }
    }

    pub fn scale(&self, factor: &Q) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(f, c)| (f.clone(), c * factor))
                .collect(),
        }
    }

    /// Commutative forest product, extended bilinearly.
    pub fn product(&self, other: &ForestSeries) -> Self {
        let mut out = Self::zero();
        for (f, c) in &self.terms {
            for (g, d) in &other.terms {
                out.add_term(f.multiply(g), c * d);
            }
        }
        out
    }

    /// Keeps only terms of degree at most `n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(f, _)| f.degree() <= n)
                .map(|(f, c)| (f.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps only tree terms.
    pub fn tree_part(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(f, _)| f.as_tree().is_some())
                .map(|(f, c)| (f.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies `f ↦ map(f)` to every forest, summing collisions.
    pub fn map_forests(&self, mut map: impl FnMut(&Forest) -> Forest) -> Self {
        let mut out = Self::zero();
        for (f, c) in &self.terms {
            out.add_term(map(f), c.clone());
        }
        out
    }

    /// Converts coefficients between the δ and ζ bases of the dual.
    pub fn convert(&self, from: Basis, to: Basis) -> Self {
        match (from, to) {
            (Basis::Delta, Basis::Delta) | (Basis::Zeta, Basis::Zeta) => self.clone(),
            (Basis::Zeta, Basis::Delta) => Self {
                terms: self
                    .terms
                    .iter()
                    .map(|(f, c)| (f.clone(), c * Q::from_integer(f.symmetry_factor().into())))
                    .collect(),
            },
            (Basis::Delta, Basis::Zeta) => Self {
                terms: self
                    .terms
                    .iter()
                    .map(|(f, c)| (f.clone(), c / Q::from_integer(f.symmetry_factor().into())))
                    .collect(),
            },
        }
    }

    /// Pairing `⟨self, other⟩ = Σ_h self_h other_h` in the δ basis.
    pub fn pair(&self, other: &ForestSeries) -> Q {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .terms
            .iter()
            .filter_map(|(f, c)| large.terms.get(f).map(|d| c * d))
            .fold(Q::zero(), |a, b| a + b)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Forest::degree).max().unwrap_or(0)
    }

    pub fn has_empty_term(&self) -> bool {
        self.terms.contains_key(&Forest::empty())
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Forest::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn max_abs_coefficient(&self) -> Q {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Q::zero)
    }
}

impl From<Forest> for ForestSeries {
    fn from(f: Forest) -> Self {
        Self::term(f, Q::one())
    }
}

impl FromIterator<(Forest, Q)> for ForestSeries {
    fn from_iter<I: IntoIterator<Item = (Forest, Q)>>(iter: I) -> Self {
        let mut s = Self::zero();
        for (f, c) in iter {
            s.add_term(f, c);
        }
        s
    }
}

impl<'a> IntoIterator for &'a ForestSeries {
    type Item = (&'a Forest, &'a Q);
    type IntoIter = btree_map::Iter<'a, Forest, Q>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl Add for &ForestSeries {
    type Output = ForestSeries;
    fn add(self, rhs: &ForestSeries) -> ForestSeries {
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl Sub for &ForestSeries {
    type Output = ForestSeries;
    fn sub(self, rhs: &ForestSeries) -> ForestSeries {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl Neg for &ForestSeries {
    type Output = ForestSeries;
    fn neg(self) -> ForestSeries {
        self.scale(&-Q::one())
    }
}

impl Mul for &ForestSeries {
    type Output = ForestSeries;
    fn mul(self, rhs: &ForestSeries) -> ForestSeries {
        self.product(rhs)
    }
}

impl fmt::Display for ForestSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::literal::write_series(f, self, Basis::Delta)
    }
}

impl fmt::Debug for ForestSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite rational combination of `h' ⊗ h''`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TensorSeries {
    terms: BTreeMap<(Forest, Forest), Q>,
}

impl TensorSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(left: Forest, right: Forest, coef: Q) -> Self {
        let mut s = Self::zero();
        s.add_term(left, right, coef);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, (Forest, Forest), Q> {
        self.terms.iter()
    }

    pub fn coefficient(&self, left: &Forest, right: &Forest) -> Q {
        self.terms
            .get(&(left.clone(), right.clone()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, left: Forest, right: Forest, coef: Q) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry((left, right)) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TensorSeries, scale: &Q) {
        for ((l, r), c) in &other.terms {
            self.add_term(l.clone(), r.clone(), c * scale);
        }
    }

    /// Product in `𝓗 ⊗ 𝓗`, slotwise forest multiplication.
    pub fn product(&self, other: &TensorSeries) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            for ((x, y), d) in &other.terms {
                out.add_term(a.multiply(x), b.multiply(y), c * d);
            }
        }
        out
    }

    /// Applies a map to each slot, summing collisions.
    pub fn map(&self, mut f: impl FnMut(&Forest, &Forest) -> (Forest, Forest)) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            let (x, y) = f(a, b);
            out.add_term(x, y, c.clone());
        }
        out
    }

    /// Multiplication map `m: 𝓗⊗𝓗 → 𝓗`.
    pub fn multiply_out(&self) -> ForestSeries {
        let mut out = ForestSeries::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(a.multiply(b), c.clone());
        }
        out
    }
}

impl Add for &TensorSeries {
    type Output = TensorSeries;
    fn add(self, rhs: &TensorSeries) -> TensorSeries {
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl Sub for &TensorSeries {
    type Output = TensorSeries;
    fn sub(self, rhs: &TensorSeries) -> TensorSeries {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl fmt::Display for TensorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::literal::write_tensor(f, self)
    }
}

impl fmt::Debug for TensorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A triple tensor, used for coassociativity checks.
pub type Tensor3 = BTreeMap<(Forest, Forest, Forest), Q>;

pub(crate) fn tensor3_add(map: &mut Tensor3, key: (Forest, Forest, Forest), c: Q) {
    if c.is_zero() {
        return;
    }
    let vanished = {
        let entry = map.entry(key.clone()).or_insert_with(Q::zero);
        *entry += c;
        entry.is_zero()
    };
    if vanished {
        map.remove(&key);
    }
}
