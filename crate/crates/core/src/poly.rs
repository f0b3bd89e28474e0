//! Multivariate polynomials with rational coefficients and polynomial vector fields.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::forest::{Alphabet, Tree};
use crate::grafting::graft_forest;
use crate::forest::Forest;
use crate::series::{q, q_to_f64, Q};

/// `Σ c_e y^e` in a fixed number of variables; exponent vectors map to
/// nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl Poly {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: Q) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    /// The coordinate `y_i`.
    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exponents: Vec<u32>, c: Q) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: Q) {
        assert_eq!(exponents.len(), self.vars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponents).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// `∂/∂y_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c * q(e[i] as i64));
        }
        out
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(y)
                    .fold(q_to_f64(c), |acc, (&k, &v)| acc * crate::math::powi(v, k as i32))
            })
            .sum()
    }

    pub fn eval_exact(&self, y: &[Q]) -> Q {
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (&k, v) in e.iter().zip(y) {
                for _ in 0..k {
                    m *= v;
                }
            }
            total += m;
        }
        total
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (e, c) in &self.terms {
            for (f, d) in &rhs.terms {
                let g = e.iter().zip(f).map(|(a, b)| a + b).collect();
                out.add_term(g, c * d);
            }
        }
        out
    }
}

/// A point of `ℝⁿ` given by polynomials.
pub type PolyVector = Vec<Poly>;

/// `d` polynomial vector fields `f_1, …, f_d` on `ℝⁿ`, one per label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    dim: usize,
    fields: Vec<PolyVector>,
}

impl PolyVectorField {
    pub fn new(fields: Vec<PolyVector>) -> Result<Self, AlgebraError> {
        let dim = fields.first().map_or(0, Vec::len);
        if fields.is_empty()
            || dim == 0
            || fields.iter().any(|f| f.len() != dim || f.iter().any(|p| p.vars() != dim))
        {
            return Err(AlgebraError::EmptyAlphabet);
        }
        Ok(Self { dim, fields })
    }

    /// Scalar field `f(y) = Σ c_k y^k` on `ℝ`.
    pub fn scalar(coefficients: &[Q]) -> Self {
        let mut p = Poly::zero(1);
        for (k, c) in coefficients.iter().enumerate() {
            p.add_term(vec![k as u32], c.clone());
        }
        Self::new(vec![vec![p]]).expect("one nonempty field")
    }

    /// Space dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of fields `d`.
    pub fn count(&self) -> usize {
        self.fields.len()
    }

    pub fn field(&self, i: usize) -> &PolyVector {
        &self.fields[i]
    }

    pub fn zero(dim: usize, count: usize) -> Self {
        Self::new(vec![vec![Poly::zero(dim); dim]; count]).expect("nonempty")
    }

    /// Elementary differential `f_τ`, with the root label selecting the field
    /// through `alphabet`.
    pub fn elementary_differential(
        &self,
        tau: &Tree,
        alphabet: &Alphabet,
    ) -> Result<PolyVector, AlgebraError> {
        let i = alphabet
            .index_of(tau.label())
            .filter(|&i| i < self.fields.len())
            .ok_or(AlgebraError::UnknownLabel(tau.label().as_char().unwrap_or(' ')))?;
        let args = tau
            .children()
            .iter()
            .map(|c| self.elementary_differential(c, alphabet))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.fields[i]
            .iter()
            .map(|p| directional(p, &args))
            .collect())
    }

    /// `f_𝟏(y) = y`.
    pub fn identity(&self) -> PolyVector {
        (0..self.dim).map(|i| Poly::var(self.dim, i)).collect()
    }

    /// `f_τ(y)` evaluated in floating point.
    pub fn evaluate(&self, tau: &Tree, alphabet: &Alphabet, y: &[f64]) -> Result<Vec<f64>, AlgebraError> {
        Ok(self
            .elementary_differential(tau, alphabet)?
            .iter()
            .map(|p| p.eval(y))
            .collect())
    }

    /// Both sides of `Dⁿf_τ:(f_{ρ₁},…,f_{ρₙ}) = f_{τ↶ρ₁⋯ρₙ}`.
    pub fn grafting_identity_sides(
        &self,
        tau: &Tree,
        rhos: &Forest,
        alphabet: &Alphabet,
    ) -> Result<(PolyVector, PolyVector), AlgebraError> {
        let f_tau = self.elementary_differential(tau, alphabet)?;
        let args = rhos
            .trees()
            .iter()
            .map(|r| self.elementary_differential(r, alphabet))
            .collect::<Result<Vec<_>, _>>()?;
        let lhs: PolyVector = f_tau.iter().map(|p| directional(p, &args)).collect();
        let mut rhs = vec![Poly::zero(self.dim); self.dim];
        for (g, c) in graft_forest(&Forest::single(tau.clone()), rhos).iter() {
            let t = g.as_tree().expect("grafting onto a tree gives a tree");
            let v = self.elementary_differential(t, alphabet)?;
            for (r, p) in rhs.iter_mut().zip(&v) {
                *r = &*r + &p.scale(c);
            }
        }
        Ok((lhs, rhs))
    }

    /// Exact check of the grafting identity for elementary differentials.
    pub fn check_grafting_identity(
        &self,
        tau: &Tree,
        rhos: &Forest,
        alphabet: &Alphabet,
    ) -> Result<bool, AlgebraError> {
        let (l, r) = self.grafting_identity_sides(tau, rhos, alphabet)?;
        Ok(l == r)
    }
}

/// `D^m p : (v₁,…,v_m) = Σ_{j₁…j_m} ∂_{j₁}⋯∂_{j_m} p · v₁^{j₁}⋯v_m^{j_m}`.
fn directional(p: &Poly, args: &[PolyVector]) -> Poly {
    let Some((first, rest)) = args.split_first() else {
        return p.clone();
    };
    let mut out = Poly::zero(p.vars());
    for (j, vj) in first.iter().enumerate() {
        if vj.is_zero() {
            continue;
        }
        let d = p.derivative(j);
        if d.is_zero() {
            continue;
        }
        out = &out + &(&directional(&d, rest) * vj);
    }
    out
}
