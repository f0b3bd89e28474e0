//! Natural growth `⊤` and the projector onto primitive elements.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::AlgebraError;
use crate::forest::{Forest, Tree};
use crate::hopf::{reduce, CoproductCache};
use crate::series::{ForestSeries, Q};

/// `h ⊤ h'` on forests: graft all of `h` onto one node of `h'`, averaged
/// over the nodes of `h'`.
pub fn natural_growth_forests(h: &Forest, target: &Forest) -> Result<ForestSeries, AlgebraError> {
    let n = target.degree();
    if n == 0 {
        return Err(AlgebraError::GrowthOntoEmpty);
    }
    let weight = Q::new(BigInt::one(), BigInt::from(n));
    let flats: Vec<_> = target.trees().iter().map(Tree::flatten).collect();
    let mut out = ForestSeries::zero();
    for (k, nodes) in flats.iter().enumerate() {
        for v in 0..nodes.len() {
            let mut extra = alloc::vec![Vec::new(); nodes.len()];
            extra[v] = h.trees().to_vec();
            let mut trees: Vec<Tree> = target.trees().to_vec();
            trees[k] = Tree::rebuild(nodes, &extra);
            out.add_term(Forest::new(trees), weight.clone());
        }
    }
    Ok(out)
}

/// `x ⊤ y`, bilinear. Rejects `y` with an empty-forest term.
pub fn natural_growth(x: &ForestSeries, y: &ForestSeries) -> Result<ForestSeries, AlgebraError> {
    if y.has_empty_term() {
        return Err(AlgebraError::GrowthOntoEmpty);
    }
    let mut out = ForestSeries::zero();
    for (h, c) in x {
        for (g, d) in y {
            out.add_scaled(&natural_growth_forests(h, g)?, &(c * d));
        }
    }
    Ok(out)
}

/// Left-nested iterate `⊤(h₁,…,hₙ) = (…((h₁ ⊤ h₂) ⊤ h₃)…) ⊤ hₙ`.
pub fn iterated_growth(items: &[ForestSeries]) -> Result<ForestSeries, AlgebraError> {
    let mut iter = items.iter();
    let mut acc = match iter.next() {
        Some(first) => first.clone(),
        None => return Ok(ForestSeries::zero()),
    };
    for next in iter {
        acc = natural_growth(&acc, next)?;
    }
    Ok(acc)
}

/// Memoized evaluator of `π₁(h) = h − Σ h¹ ⊤ π₁(h²)` over `Δ'h`.
#[derive(Default)]
pub struct PrimitiveProjector {
    coproducts: CoproductCache,
    memo: BTreeMap<Forest, ForestSeries>,
}

impl PrimitiveProjector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn apply(&mut self, h: &Forest) -> Result<ForestSeries, AlgebraError> {
        if h.is_empty() {
            return Err(AlgebraError::EmptyForest);
        }
        if let Some(hit) = self.memo.get(h) {
            return Ok(hit.clone());
        }
        let reduced = reduce(self.coproducts.forest(h), h);
        let mut out = ForestSeries::from(h.clone());
        for ((h1, h2), c) in reduced.iter() {
            let inner = self.apply(h2)?;
            let grown = natural_growth(&ForestSeries::from(h1.clone()), &inner)?;
            out.add_scaled(&grown, &-c.clone());
        }
        self.memo.insert(h.clone(), out.clone());
        Ok(out)
    }
}

/// `π₁(h)`.
pub fn primitive_projector(h: &Forest) -> Result<ForestSeries, AlgebraError> {
    PrimitiveProjector::new().apply(h)
}
