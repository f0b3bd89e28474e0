//! Coproduct, counit and antipode of the forest Hopf algebra, and the
//! convolution product on its dual.
//!
//! In a coproduct term `h' ⊗ h''` the right factor is the trunk, i.e. the
//! part that contains the roots.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::forest::{enumerate_forests, Alphabet, Forest, Tree};
use crate::grafting::zeta_product;
use crate::series::{tensor3_add, Basis, ForestSeries, Tensor3, TensorSeries, Q};
use crate::DEFAULT_DEGREE_CAP;

/// Memo table for coproducts of trees. Scoped to one computation so results
/// stay reproducible and nothing is shared between threads.
#[derive(Default)]
pub struct CoproductCache {
    trees: BTreeMap<Tree, TensorSeries>,
}

impl CoproductCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tree(&mut self, t: &Tree) -> TensorSeries {
        if let Some(hit) = self.trees.get(t) {
            return hit.clone();
        }
        // Δ[h]_a = (id ⊗ [·]_a) Δh + [h]_a ⊗ 1
        let branches = t.branches();
        let inner = self.forest(&branches);
        let label = t.label();
        let mut out = inner.map(|l, r| (l.clone(), Forest::single(r.graft_root(label))));
        out.add_term(Forest::single(t.clone()), Forest::empty(), Q::one());
        self.trees.insert(t.clone(), out.clone());
        out
    }

    pub fn forest(&mut self, h: &Forest) -> TensorSeries {
        let mut acc = TensorSeries::term(Forest::empty(), Forest::empty(), Q::one());
        for t in h.trees() {
            let d = self.tree(t);
            acc = acc.product(&d);
        }
        acc
    }
}

/// `Δh`.
pub fn coproduct(h: &Forest) -> TensorSeries {
    CoproductCache::new().forest(h)
}

/// `Δ'h = Δh − h⊗1 − 1⊗h`, rejected on the empty forest.
pub fn reduced_coproduct(h: &Forest) -> Result<TensorSeries, AlgebraError> {
    if h.is_empty() {
        return Err(AlgebraError::EmptyForest);
    }
    Ok(reduce(coproduct(h), h))
}

pub(crate) fn reduce(mut d: TensorSeries, h: &Forest) -> TensorSeries {
    d.add_term(h.clone(), Forest::empty(), -Q::one());
    d.add_term(Forest::empty(), h.clone(), -Q::one());
    d
}

/// `Δ` extended linearly to series.
pub fn coproduct_series(x: &ForestSeries) -> TensorSeries {
    let mut cache = CoproductCache::new();
    let mut out = TensorSeries::zero();
    for (h, c) in x {
        out.add_scaled(&cache.forest(h), c);
    }
    out
}

/// `Δ'` extended linearly. Series with an empty-forest term are rejected.
pub fn reduced_coproduct_series(x: &ForestSeries) -> Result<TensorSeries, AlgebraError> {
    if x.has_empty_term() {
        return Err(AlgebraError::EmptyForest);
    }
    let mut cache = CoproductCache::new();
    let mut out = TensorSeries::zero();
    for (h, c) in x {
        out.add_scaled(&reduce(cache.forest(h), h), c);
    }
    Ok(out)
}

/// `ε(h)`.
pub fn counit(h: &Forest) -> Q {
    if h.is_empty() {
        Q::one()
    } else {
        Q::zero()
    }
}

/// Antipode computed tree by tree from `S(τ) = −τ − Σ S(τ')τ''` over `Δ'τ`
/// and extended multiplicatively.
pub fn antipode(h: &Forest) -> ForestSeries {
    let mut state = AntipodeState::default();
    state.forest(h)
}

#[derive(Default)]
struct AntipodeState {
    cache: CoproductCache,
    trees: BTreeMap<Tree, ForestSeries>,
}

impl AntipodeState {
    fn forest(&mut self, h: &Forest) -> ForestSeries {
        let mut acc = ForestSeries::one();
        for t in h.trees() {
            let s = self.tree(t);
            acc = acc.product(&s);
        }
        acc
    }

    fn tree(&mut self, t: &Tree) -> ForestSeries {
        if let Some(hit) = self.trees.get(t) {
            return hit.clone();
        }
        let single = Forest::single(t.clone());
        let reduced = reduce(self.cache.tree(t), &single);
        let mut out = ForestSeries::term(single, -Q::one());
        for ((l, r), c) in reduced.iter() {
            let sl = self.forest(l);
            let term = sl.product(&ForestSeries::from(r.clone()));
            out.add_scaled(&term, &-c.clone());
        }
        self.trees.insert(t.clone(), out.clone());
        out
    }
}

/// Antipode extended linearly.
pub fn antipode_series(x: &ForestSeries) -> ForestSeries {
    let mut state = AntipodeState::default();
    let mut out = ForestSeries::zero();
    for (h, c) in x {
        out.add_scaled(&state.forest(h), c);
    }
    out
}

/// `(Δ⊗id)Δh` and `(id⊗Δ)Δh`.
pub fn iterated_coproducts(h: &Forest) -> (Tensor3, Tensor3) {
    let mut cache = CoproductCache::new();
    let d = cache.forest(h);
    let mut left = Tensor3::new();
    let mut right = Tensor3::new();
    for ((a, b), c) in d.iter() {
        for ((x, y), e) in cache.forest(a).iter() {
            tensor3_add(&mut left, (x.clone(), y.clone(), b.clone()), c * e);
        }
        for ((x, y), e) in cache.forest(b).iter() {
            tensor3_add(&mut right, (a.clone(), x.clone(), y.clone()), c * e);
        }
    }
    (left, right)
}

/// Which evaluation strategy [`convolution`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Pair against `Δg` for every forest `g` up to the cutoff.
    Coproduct,
    /// Grafting formula in the ζ basis.
    Grafting,
}

/// The convolution `x ⋆ y` of two dual elements, both written in `basis`,
/// truncated at total degree `cutoff`. The result is in the same basis.
pub fn convolution(
    x: &ForestSeries,
    y: &ForestSeries,
    cutoff: usize,
    basis: Basis,
    strategy: Strategy,
) -> Result<ForestSeries, AlgebraError> {
    if cutoff > DEFAULT_DEGREE_CAP {
        return Err(AlgebraError::DegreeCap {
            requested: cutoff,
            cap: DEFAULT_DEGREE_CAP,
        });
    }
    match strategy {
        Strategy::Grafting => {
            let xz = x.convert(basis, Basis::Zeta);
            let yz = y.convert(basis, Basis::Zeta);
            let mut out = ForestSeries::zero();
            for (a, c) in &xz {
                for (b, d) in &yz {
                    if a.degree() + b.degree() > cutoff {
                        continue;
                    }
                    out.add_scaled(&zeta_product(a, b), &(c * d));
                }
            }
            Ok(out.convert(Basis::Zeta, basis))
        }
        Strategy::Coproduct => {
            let xd = x.convert(basis, Basis::Delta);
            let yd = y.convert(basis, Basis::Delta);
            let mut labels: Vec<_> = xd.iter().chain(yd.iter()).flat_map(|(f, _)| f.labels()).collect();
            labels.sort();
            labels.dedup();
            let alphabet = if labels.is_empty() {
                Alphabet::plain()
            } else {
                Alphabet::new(labels)?
            };
            let max = (xd.max_degree() + yd.max_degree()).min(cutoff);
            let mut cache = CoproductCache::new();
            let mut out = ForestSeries::zero();
            for g in enumerate_forests(max, &alphabet)? {
                let mut v = Q::zero();
                for ((a, b), c) in cache.forest(&g).iter() {
                    let xa = xd.coefficient(a);
                    if xa.is_zero() {
                        continue;
                    }
                    let yb = yd.coefficient(b);
                    if !yb.is_zero() {
                        v += c * xa * yb;
                    }
                }
                out.add_term(g, v);
            }
            Ok(out.convert(Basis::Delta, basis))
        }
    }
}

/// Convolution of two δ-basis dual elements via the grafting formula.
pub fn star(x: &ForestSeries, y: &ForestSeries) -> ForestSeries {
    let cutoff = x.max_degree() + y.max_degree();
    let xz = x.convert(Basis::Delta, Basis::Zeta);
    let yz = y.convert(Basis::Delta, Basis::Zeta);
    let mut out = ForestSeries::zero();
    for (a, c) in &xz {
        for (b, d) in &yz {
            if a.degree() + b.degree() <= cutoff {
                out.add_scaled(&zeta_product(a, b), &(c * d));
            }
        }
    }
    out.convert(Basis::Zeta, Basis::Delta)
}
