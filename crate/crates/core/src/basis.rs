//! Primitive elements, the `⊤`-basis built from words of primitives, and its
//! dual basis.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::AlgebraError;
use crate::forest::{enumerate_forests_of_degree, Alphabet, Forest};
use crate::growth::{iterated_growth, PrimitiveProjector};
use crate::linalg::{inverse, EchelonBasis};
use crate::series::{ForestSeries, Q};
use crate::DEFAULT_DEGREE_CAP;

/// A primitive basis vector together with the forest it was projected from.
#[derive(Clone, Debug, PartialEq)]
pub struct Primitive {
    pub source: Forest,
    pub value: ForestSeries,
    pub degree: usize,
}

/// `⊤(p_{i₁},…,p_{i_k})` with its word of primitive indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PTopElement {
    pub word: Vec<usize>,
    pub value: ForestSeries,
    pub degree: usize,
}

/// Primitive basis `𝒫_(N)`, the words `𝒫^⊤_(N)` and the exact change of
/// basis between `𝒫^⊤` and forests in every degree up to `N`.
#[derive(Clone, Debug)]
pub struct PrimitiveBasis {
    alphabet: Alphabet,
    max_degree: usize,
    primitives: Vec<Primitive>,
    ptop: Vec<PTopElement>,
    /// forests of each degree, in canonical order; `forests[0] = [1]`
    forests: Vec<Vec<Forest>>,
    forest_slot: BTreeMap<Forest, usize>,
    /// `ptop` indices of each degree
    ptop_by_degree: Vec<Vec<usize>>,
    /// `change[n][h][r] = c_ρ(h)` with `h`, `r` local indices in degree `n`
    change: Vec<Vec<Vec<Q>>>,
    duals: Vec<ForestSeries>,
}

/// Number of forests of each degree `0..=n`.
pub fn forest_counts(n: usize, alphabet: &Alphabet) -> Result<Vec<usize>, AlgebraError> {
    (0..=n)
        .map(|k| enumerate_forests_of_degree(k, alphabet).map(|v| v.len()))
        .collect()
}

/// Dimension of the primitive space in each degree, read off the identity
/// `H = 1/(1 − P)` between the Hilbert series of forests and primitives.
pub fn primitive_dimensions(counts: &[usize]) -> Vec<usize> {
    // 1/H by power-series inversion, then P = 1 − 1/H
    let n = counts.len();
    let mut inv = vec![0i128; n];
    if n == 0 {
        return Vec::new();
    }
    inv[0] = 1;
    for k in 1..n {
        let s: i128 = (1..=k).map(|j| counts[j] as i128 * inv[k - j]).sum();
        inv[k] = -s;
    }
    let mut dims = vec![0usize; n];
    for k in 1..n {
        dims[k] = usize::try_from(-inv[k]).expect("primitive dimensions are nonnegative");
    }
    dims
}

impl PrimitiveBasis {
    pub fn build(alphabet: &Alphabet, max_degree: usize) -> Result<Self, AlgebraError> {
        if max_degree > DEFAULT_DEGREE_CAP {
            return Err(AlgebraError::DegreeCap {
                requested: max_degree,
                cap: DEFAULT_DEGREE_CAP,
            });
        }
        let forests: Vec<Vec<Forest>> = (0..=max_degree)
            .map(|k| enumerate_forests_of_degree(k, alphabet))
            .collect::<Result<_, _>>()?;
        let counts: Vec<usize> = forests.iter().map(Vec::len).collect();
        let expected = primitive_dimensions(&counts);
        let mut forest_slot = BTreeMap::new();
        for level in &forests {
            for (i, f) in level.iter().enumerate() {
                forest_slot.insert(f.clone(), i);
            }
        }

        let mut projector = PrimitiveProjector::new();
        let mut primitives = Vec::new();
        for n in 1..=max_degree {
            let mut echelon = EchelonBasis::new();
            let mut found = 0;
            for h in &forests[n] {
                if found == expected[n] {
                    break;
                }
                let p = projector.apply(h)?;
                let row = to_row(&p, &forests[n], &forest_slot);
                if echelon.insert(row) {
                    primitives.push(Primitive {
                        source: h.clone(),
                        value: p,
                        degree: n,
                    });
                    found += 1;
                }
            }
            if found != expected[n] {
                return Err(AlgebraError::BasisDimension {
                    degree: n,
                    found,
                    expected: expected[n],
                });
            }
        }

        let mut ptop = Vec::new();
        let mut ptop_by_degree = vec![Vec::new(); max_degree + 1];
        let mut change = vec![Vec::new(); max_degree + 1];
        let mut duals_by_element: Vec<(usize, ForestSeries)> = Vec::new();
        for n in 1..=max_degree {
            let mut words = Vec::new();
            collect_words(&primitives, n, &mut Vec::new(), &mut words);
            for word in words {
                let items: Vec<ForestSeries> =
                    word.iter().map(|&i| primitives[i].value.clone()).collect();
                let value = iterated_growth(&items)?;
                ptop_by_degree[n].push(ptop.len());
                ptop.push(PTopElement {
                    word,
                    value,
                    degree: n,
                });
            }
            let rows: Vec<Vec<Q>> = ptop_by_degree[n]
                .iter()
                .map(|&r| to_row(&ptop[r].value, &forests[n], &forest_slot))
                .collect();
            if rows.len() != forests[n].len() {
                return Err(AlgebraError::BasisDimension {
                    degree: n,
                    found: rows.len(),
                    expected: forests[n].len(),
                });
            }
            let c = inverse(&rows).ok_or(AlgebraError::SingularBasis { degree: n })?;
            for (local, &r) in ptop_by_degree[n].iter().enumerate() {
                let dual: ForestSeries = forests[n]
                    .iter()
                    .enumerate()
                    .map(|(hi, h)| (h.clone(), c[hi][local].clone()))
                    .collect();
                duals_by_element.push((r, dual));
            }
            change[n] = c;
        }
        duals_by_element.sort_by_key(|(r, _)| *r);
        let duals = duals_by_element.into_iter().map(|(_, d)| d).collect();

        Ok(Self {
            alphabet: alphabet.clone(),
            max_degree,
            primitives,
            ptop,
            forests,
            forest_slot,
            ptop_by_degree,
            change,
            duals,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn ptop_elements(&self) -> &[PTopElement] {
        &self.ptop
    }

    /// Indices into [`Self::ptop_elements`] of degree `n`.
    pub fn ptop_of_degree(&self, n: usize) -> &[usize] {
        self.ptop_by_degree.get(n).map_or(&[], Vec::as_slice)
    }

    /// Primitive dimension per degree `1..=N`.
    pub fn dimensions(&self) -> Vec<usize> {
        (1..=self.max_degree)
            .map(|n| self.primitives.iter().filter(|p| p.degree == n).count())
            .collect()
    }

    /// `c_ρ(h)`, the coefficient of `ρ` when `h` is expanded in `𝒫^⊤`.
    pub fn coefficient(&self, rho: usize, h: &Forest) -> Q {
        let n = h.degree();
        if n == 0 || n > self.max_degree || self.ptop[rho].degree != n {
            return Q::zero();
        }
        let Some(&hi) = self.forest_slot.get(h) else {
            return Q::zero();
        };
        let local = self.ptop_by_degree[n]
            .iter()
            .position(|&r| r == rho)
            .expect("element listed in its degree");
        self.change[n][hi][local].clone()
    }

    /// `ρ*` written as the δ-basis series `Σ_h c_ρ(h) h`.
    pub fn dual(&self, rho: usize) -> &ForestSeries {
        &self.duals[rho]
    }

    /// Index of the word `(i₁,…,i_k)`, if present.
    pub fn find_word(&self, word: &[usize]) -> Option<usize> {
        self.ptop.iter().position(|e| e.word == word)
    }

    /// Expansion of a homogeneous series in `𝒫^⊤`.
    pub fn expand(&self, x: &ForestSeries) -> Vec<(usize, Q)> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (h, c) in x {
            for &r in self.ptop_of_degree(h.degree()) {
                let k = self.coefficient(r, h);
                if !k.is_zero() {
                    *acc.entry(r).or_insert_with(Q::zero) += k * c;
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Forests of degree exactly `n` in canonical order.
    pub fn forests_of_degree(&self, n: usize) -> &[Forest] {
        self.forests.get(n).map_or(&[], Vec::as_slice)
    }
}

fn to_row(x: &ForestSeries, forests: &[Forest], slot: &BTreeMap<Forest, usize>) -> Vec<Q> {
    let mut row = vec![Q::zero(); forests.len()];
    for (f, c) in x {
        row[slot[f]] = c.clone();
    }
    row
}

fn collect_words(prims: &[Primitive], remaining: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining == 0 {
        out.push(cur.clone());
        return;
    }
    for (i, p) in prims.iter().enumerate() {
        if p.degree <= remaining {
            cur.push(i);
            collect_words(prims, remaining - p.degree, cur, out);
            cur.pop();
        }
    }
}
