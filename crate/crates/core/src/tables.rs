//! Floating-point lookup tables over all forests up to a fixed degree, used by
//! the grid-based layer. Entries are computed exactly and converted once.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::AlgebraError;
use crate::forest::{enumerate_forests, Alphabet, Forest, Tree};
use crate::hopf::{antipode, CoproductCache};
use crate::series::{q_to_f64, ForestSeries};

/// Forests of degree `0..=N` with their coproducts and antipodes in `f64`.
#[derive(Clone, Debug)]
pub struct ForestTable {
    alphabet: Alphabet,
    degree: usize,
    forests: Vec<Forest>,
    index: BTreeMap<Forest, usize>,
    degrees: Vec<usize>,
    /// `(a, b, c)` for every term `c·a⊗b` of `Δh`
    coproduct: Vec<Vec<(usize, usize, f64)>>,
    antipode: Vec<Vec<(usize, f64)>>,
    /// per forest: exponent of each label and `1/∏ τ!` over its trees
    monomial: Vec<(Vec<u32>, f64)>,
    /// `[h]_a` index per label, when it fits in the table
    graft: Vec<Vec<Option<usize>>>,
    symmetry: Vec<f64>,
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

impl ForestTable {
    pub fn new(alphabet: &Alphabet, degree: usize) -> Result<Self, AlgebraError> {
        let forests = enumerate_forests(degree, alphabet)?;
        let index: BTreeMap<Forest, usize> =
            forests.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let degrees = forests.iter().map(Forest::degree).collect();
        let mut cache = CoproductCache::new();
        let coproduct = forests
            .iter()
            .map(|h| {
                cache
                    .forest(h)
                    .iter()
                    .map(|((a, b), c)| (index[a], index[b], q_to_f64(c)))
                    .collect()
            })
            .collect();
        let antipode = forests
            .iter()
            .map(|h| {
                antipode(h)
                    .iter()
                    .map(|(g, c)| (index[g], q_to_f64(c)))
                    .collect()
            })
            .collect();
        let monomial = forests
            .iter()
            .map(|h| {
                let mut exps = alloc::vec![0u32; alphabet.len()];
                let mut denom = BigUint::from(1u32);
                for t in h.trees() {
                    count_labels(t, alphabet, &mut exps);
                    denom *= t.factorial();
                }
                (exps, 1.0 / big_to_f64(&denom))
            })
            .collect();
        let graft = forests
            .iter()
            .map(|h| {
                alphabet
                    .labels()
                    .iter()
                    .map(|&a| index.get(&Forest::single(h.graft_root(a))).copied())
                    .collect()
            })
            .collect();
        let symmetry = forests.iter().map(|h| big_to_f64(&h.symmetry_factor())).collect();
        Ok(Self {
            alphabet: alphabet.clone(),
            degree,
            forests,
            index,
            degrees,
            coproduct,
            antipode,
            monomial,
            graft,
            symmetry,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Largest forest degree in the table.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.forests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forests.is_empty()
    }

    pub fn forests(&self) -> &[Forest] {
        &self.forests
    }

    pub fn forest(&self, i: usize) -> &Forest {
        &self.forests[i]
    }

    pub fn index_of(&self, h: &Forest) -> Option<usize> {
        self.index.get(h).copied()
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Number of forests of degree at most `n`; forests are sorted by degree
    /// so these form a prefix.
    pub fn count_up_to(&self, n: usize) -> usize {
        self.degrees.iter().take_while(|&&d| d <= n).count()
    }

    pub fn coproduct(&self, i: usize) -> &[(usize, usize, f64)] {
        &self.coproduct[i]
    }

    pub fn antipode(&self, i: usize) -> &[(usize, f64)] {
        &self.antipode[i]
    }

    /// Index of `[h]_a` where `a` is the `label`-th alphabet entry.
    pub fn graft_root(&self, i: usize, label: usize) -> Option<usize> {
        self.graft[i][label]
    }

    pub fn symmetry_factor(&self, i: usize) -> f64 {
        self.symmetry[i]
    }

    /// Value of the canonical lift of a straight segment with increment `v`:
    /// `∏_nodes v_label / ∏_trees τ!`.
    pub fn segment_value(&self, i: usize, v: &[f64]) -> f64 {
        let (exps, inv) = &self.monomial[i];
        let mut x = *inv;
        for (e, vi) in exps.iter().zip(v) {
            for _ in 0..*e {
                x *= vi;
            }
        }
        x
    }

    /// Dense coefficient vector of a series over the table; terms outside the
    /// table are rejected.
    pub fn dense(&self, x: &ForestSeries) -> Option<Vec<(usize, f64)>> {
        x.iter()
            .map(|(h, c)| self.index_of(h).map(|i| (i, q_to_f64(c))))
            .collect()
    }
}

fn count_labels(t: &Tree, alphabet: &Alphabet, exps: &mut [u32]) {
    if let Some(i) = alphabet.index_of(t.label()) {
        exps[i] += 1;
    }
    for c in t.children() {
        count_labels(c, alphabet, exps);
    }
}
