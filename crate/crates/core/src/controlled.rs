//! Paths controlled by a branched rough path and the rough integral.

use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::AnalysisError;
use crate::fit::{loglog_fit, RateFit, Ratio};
use crate::forest::{Forest, Label};
use crate::holder::Pairs;
use crate::math::powf;
use crate::rough_path::BranchedRoughPath;
use crate::tables::ForestTable;

/// Components `Z^h` for every forest of degree at most `N − 1`, sampled on
/// the grid of the reference path.
///
/// Component `k` belongs to forest `k` of the reference table, so the
/// components are a prefix of the table.
#[derive(Clone, Debug)]
pub struct ControlledPath {
    reference: Arc<BranchedRoughPath>,
    components: Vec<Vec<f64>>,
    /// per component `b`: `(g, a, c)` for `c·a⊗b ∈ Δg`, `a ≠ 𝟏`
    compensation: Arc<Vec<Vec<(usize, usize, f64)>>>,
}

/// Remainders `R^h_{s,t}` on a set of grid pairs with their Hölder norms.
#[derive(Clone, Debug, PartialEq)]
pub struct RemainderTable {
    pub forests: Vec<Forest>,
    pub pairs: Vec<(usize, usize)>,
    /// `values[k][m]` is `R^{h_k}` on `pairs[m]`
    pub values: Vec<Vec<f64>>,
    /// `‖R^{h_k}‖_{(N−|h_k|)α}`
    pub norms: Vec<f64>,
}

/// Germ defects of the rough integral per scale and their fitted exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    /// `(interval length, max defect)`
    pub points: Vec<(f64, f64)>,
    pub fit: RateFit,
}

fn compensation_terms(table: &ForestTable, k: usize) -> Vec<Vec<(usize, usize, f64)>> {
    let mut out = vec![Vec::new(); k];
    for g in 0..k {
        for &(a, b, c) in table.coproduct(g) {
            if a != 0 && b < k {
                out[b].push((g, a, c));
            }
        }
    }
    out
}

impl ControlledPath {
    /// `components[k][i]` is `Z^{h_k}_{tᵢ}`.
    pub fn new(
        reference: Arc<BranchedRoughPath>,
        components: Vec<Vec<f64>>,
    ) -> Result<Self, AnalysisError> {
        let k = reference.table().count_up_to(reference.degree() - 1);
        if components.len() != k || components.iter().any(|c| c.len() != reference.len()) {
            return Err(AnalysisError::ShapeMismatch(format!(
                "expected {k} components of length {}",
                reference.len()
            )));
        }
        let compensation = Arc::new(compensation_terms(reference.table(), k));
        Ok(Self {
            reference,
            components,
            compensation,
        })
    }

    pub fn zero(reference: Arc<BranchedRoughPath>) -> Self {
        let k = reference.table().count_up_to(reference.degree() - 1);
        let n = reference.len();
        Self::new(reference, vec![vec![0.0; n]; k]).expect("shape is consistent")
    }

    /// `Z^𝟏 ≡ c` and every other component zero.
    pub fn constant(reference: Arc<BranchedRoughPath>, c: f64) -> Self {
        let mut z = Self::zero(reference);
        z.components[0].iter_mut().for_each(|v| *v = c);
        z
    }

    /// `φ(X^a)` for a smooth scalar `φ` with `derivative(x, k) = φ^{(k)}(x)`,
    /// written as `Z^{[a]^k} = φ^{(k)}(X^a)/k!`. Controlled when the reference
    /// is geometric, for instance a piecewise-linear lift.
    pub fn composition(
        reference: Arc<BranchedRoughPath>,
        label: Label,
        derivative: impl Fn(f64, usize) -> f64,
    ) -> Result<Self, AnalysisError> {
        let table = reference.table().clone();
        label_index(&reference, label)?;
        let node = table
            .index_of(&Forest::node(label))
            .expect("single nodes are in every table");
        let mut z = Self::zero(reference.clone());
        let mut power = Forest::empty();
        let mut factorial = 1.0;
        for k in 0..reference.degree() {
            if k > 0 {
                factorial *= k as f64;
                power = power.multiply(&Forest::node(label));
            }
            let idx = table.index_of(&power).expect("power fits in the table");
            for (i, zi) in z.components[idx].iter_mut().enumerate() {
                *zi = derivative(reference.value_at(i)[node], k) / factorial;
            }
        }
        Ok(z)
    }

    pub fn reference(&self) -> &Arc<BranchedRoughPath> {
        &self.reference
    }

    pub fn table(&self) -> &Arc<ForestTable> {
        self.reference.table()
    }

    pub fn times(&self) -> &[f64] {
        self.reference.times()
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.reference.degree()
    }

    /// Number of components, `|𝓕_(N−1)|`.
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn forests(&self) -> &[Forest] {
        &self.table().forests()[..self.components.len()]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component_idx(&self, k: usize) -> &[f64] {
        &self.components[k]
    }

    pub fn component(&self, h: &Forest) -> Option<&[f64]> {
        self.index_of(h).map(|k| self.components[k].as_slice())
    }

    fn index_of(&self, h: &Forest) -> Option<usize> {
        self.table().index_of(h).filter(|&k| k < self.components.len())
    }

    /// `Z_{tᵢ}` in component order.
    pub fn value_at(&self, i: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[i]).collect()
    }

    /// The same components over another reference with identical grid and table.
    pub fn with_reference(&self, reference: Arc<BranchedRoughPath>) -> Result<Self, AnalysisError> {
        if reference.times() != self.times() || reference.table().len() != self.table().len() {
            return Err(AnalysisError::GridMismatch);
        }
        Self::new(reference, self.components.clone())
    }

    /// `Z + λZ̃` over the reference of `self`.
    pub fn combine(&self, other: &ControlledPath, lambda: f64) -> Result<Self, AnalysisError> {
        if other.times() != self.times() || other.components.len() != self.components.len() {
            return Err(AnalysisError::GridMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + lambda * y).collect())
            .collect();
        Self::new(self.reference.clone(), components)
    }

    /// Restriction to grid points `i₀..=i₁` over the restarted reference.
    pub fn slice(&self, i0: usize, i1: usize) -> Result<Self, AnalysisError> {
        let reference = Arc::new(self.reference.slice(i0, i1)?);
        let components = self.components.iter().map(|c| c[i0..=i1].to_vec()).collect();
        Self::new(reference, components)
    }

    /// `R^{h_k}_{tᵢ,tⱼ}` given `X_{tᵢ,tⱼ}`.
    pub fn remainder_with(&self, k: usize, i: usize, j: usize, x_ij: &[f64]) -> f64 {
        let z = &self.components;
        let mut r = z[k][j] - z[k][i];
        for &(g, a, c) in &self.compensation[k] {
            r -= c * z[g][i] * x_ij[a];
        }
        r
    }

    pub fn remainder_idx(&self, k: usize, i: usize, j: usize) -> f64 {
        let x = self.reference.increment_idx(i, j);
        self.remainder_with(k, i, j, &x)
    }

    /// `R^h_{s,t} = δZ^h_{s,t} − Σ_{h̄} ⟨h̄⋆h, Z_s⟩ X^{h̄}_{s,t}`.
    pub fn remainder(&self, h: &Forest, s: f64, t: f64) -> Result<f64, AnalysisError> {
        let k = self
            .index_of(h)
            .ok_or_else(|| AnalysisError::ForestOutOfRange(h.to_string()))?;
        let i = self.reference.index_of_time(s)?;
        let j = self.reference.index_of_time(t)?;
        Ok(self.remainder_idx(k, i, j))
    }

    /// `R^h_{s,t} − R^h_{s,u} − R^h_{u,t} − Σ c·R^g_{s,u}·X^a_{u,t}` over
    /// `c·a⊗h ∈ Δg`, `a ≠ 𝟏`, for grid indices `s < u < t`. Vanishes up to
    /// rounding for any family of components.
    pub fn cocycle_defect(&self, k: usize, s: usize, u: usize, t: usize) -> f64 {
        let x_ut = self.reference.increment_idx(u, t);
        let lhs = self.remainder_idx(k, s, t) - self.remainder_idx(k, s, u) - self.remainder_idx(k, u, t);
        let rhs: f64 = self.compensation[k]
            .iter()
            .map(|&(g, a, c)| c * self.remainder_idx(g, s, u) * x_ut[a])
            .sum();
        lhs - rhs
    }

    pub fn remainder_table(&self, pairs: Pairs) -> RemainderTable {
        let mut list = Vec::new();
        pairs.for_each(self.len(), |i, j| list.push((i, j)));
        let kc = self.components.len();
        let mut values = vec![Vec::with_capacity(list.len()); kc];
        let mut last = usize::MAX;
        let mut inv = Vec::new();
        for &(i, j) in &list {
            if i != last {
                inv = self.reference.inverse_at(i);
                last = i;
            }
            let x = self.reference.increment_with(&inv, j);
            for (k, col) in values.iter_mut().enumerate() {
                col.push(self.remainder_with(k, i, j, &x));
            }
        }
        let alpha = self.reference.alpha();
        let norms = (0..kc)
            .map(|k| {
                let e = (self.degree() - self.table().degree_of(k)) as f64 * alpha;
                list.iter()
                    .zip(&values[k])
                    .map(|(&(i, j), r)| r.abs() / powf(self.times()[j] - self.times()[i], e))
                    .fold(0.0, f64::max)
            })
            .collect();
        RemainderTable {
            forests: self.forests().to_vec(),
            pairs: list,
            values,
            norms,
        }
    }

    /// Per-forest terms `|Z^h_0 − Z̃^h_0| + ‖R^h − R̃^h‖_{(N−|h|)γ}`.
    pub fn norm_terms(&self, other: Option<&ControlledPath>, gamma: f64, pairs: Pairs) -> Vec<f64> {
        let kc = self.components.len();
        let exps: Vec<f64> = (0..kc)
            .map(|k| (self.degree() - self.table().degree_of(k)) as f64 * gamma)
            .collect();
        let mut sup = vec![0.0f64; kc];
        let mut last = usize::MAX;
        let (mut inv, mut inv_o) = (Vec::new(), Vec::new());
        let times = self.times();
        pairs.for_each(self.len(), |i, j| {
            if i != last {
                inv = self.reference.inverse_at(i);
                if let Some(o) = other {
                    inv_o = o.reference.inverse_at(i);
                }
                last = i;
            }
            let x = self.reference.increment_with(&inv, j);
            let xo = other.map(|o| o.reference.increment_with(&inv_o, j));
            let dt = times[j] - times[i];
            for k in 0..kc {
                let mut r = self.remainder_with(k, i, j, &x);
                if let (Some(o), Some(xo)) = (other, &xo) {
                    r -= o.remainder_with(k, i, j, xo);
                }
                let q = r.abs() / powf(dt, exps[k]);
                if q > sup[k] {
                    sup[k] = q;
                }
            }
        });
        (0..kc)
            .map(|k| {
                let z0 = self.components[k][0] - other.map_or(0.0, |o| o.components[k][0]);
                z0.abs() + sup[k]
            })
            .collect()
    }

    /// `⦀Z⦀_α = Σ_h (|Z^h_0| + ‖R^h‖_{(N−|h|)α})`.
    pub fn cp_norm(&self, pairs: Pairs) -> f64 {
        self.cp_norm_at(self.reference.alpha(), pairs)
    }

    /// The same norm with exponents `(N−|h|)γ`.
    pub fn cp_norm_at(&self, gamma: f64, pairs: Pairs) -> f64 {
        self.norm_terms(None, gamma, pairs).iter().sum()
    }

    /// `⦀Z;Z̃⦀_α`, each remainder taken over its own reference.
    pub fn cp_distance(&self, other: &ControlledPath, pairs: Pairs) -> Result<f64, AnalysisError> {
        self.cp_distance_at(other, self.reference.alpha(), pairs)
    }

    pub fn cp_distance_at(
        &self,
        other: &ControlledPath,
        gamma: f64,
        pairs: Pairs,
    ) -> Result<f64, AnalysisError> {
        if !self.reference.same_grid(&other.reference)
            || self.components.len() != other.components.len()
        {
            return Err(AnalysisError::GridMismatch);
        }
        Ok(self.norm_terms(Some(other), gamma, pairs).iter().sum())
    }

    /// `𝕴^a_X(Z)`: the compensated sum `Σ_{[u,v]} Σ_h Z^h_u X^{[h]_a}_{u,v}`
    /// over the grid as zeroth component, `Z^h` on `[h]_a`, zero elsewhere.
    pub fn rough_integral(&self, label: Label) -> Result<ControlledPath, AnalysisError> {
        let a = label_index(&self.reference, label)?;
        let table = self.table().clone();
        let kc = self.components.len();
        let grafts: Vec<(usize, usize)> = (0..kc)
            .filter_map(|k| table.graft_root(k, a).map(|g| (k, g)))
            .collect();
        let n = self.len();
        let mut out = vec![vec![0.0; n]; kc];
        let mut acc = 0.0;
        for j in 0..n - 1 {
            let step = self.reference.step(j);
            acc += grafts
                .iter()
                .map(|&(k, g)| self.components[k][j] * step[g])
                .sum::<f64>();
            out[0][j + 1] = acc;
        }
        for &(k, g) in &grafts {
            if g < kc {
                out[g] = self.components[k].clone();
            }
        }
        ControlledPath::new(self.reference.clone(), out)
    }

    /// Germ `Σ_h Z^h_{tᵢ} X^{[h]_a}_{tᵢ,tⱼ}` of the rough integral.
    pub fn integral_germ(&self, label: Label, i: usize, j: usize) -> Result<f64, AnalysisError> {
        let a = label_index(&self.reference, label)?;
        let x = self.reference.increment_idx(i, j);
        Ok((0..self.components.len())
            .filter_map(|k| self.table().graft_root(k, a).map(|g| self.components[k][i] * x[g]))
            .sum())
    }
}

fn label_index(x: &BranchedRoughPath, label: Label) -> Result<usize, AnalysisError> {
    x.alphabet()
        .index_of(label)
        .ok_or(AnalysisError::Algebra(crate::error::AlgebraError::UnknownLabel(
            label.as_char().unwrap_or(' '),
        )))
}

/// Largest `|∫_s^t Z dX^a − germ_{s,t}|` over all windows of `2^l` grid
/// steps, per level `l`, with the fitted log-log exponent.
pub fn integral_remainder_rate(
    z: &ControlledPath,
    label: Label,
    levels: &[usize],
) -> Result<RateReport, AnalysisError> {
    const NEEDED: usize = 4;
    if levels.len() < NEEDED {
        return Err(AnalysisError::InsufficientScales {
            needed: NEEDED,
            got: levels.len(),
        });
    }
    let integral = z.rough_integral(label)?;
    let total = &integral.components[0];
    let times = z.times();
    let mut points = Vec::new();
    for &l in levels {
        let block = 1usize << l;
        if block >= z.len() {
            return Err(AnalysisError::InsufficientScales {
                needed: NEEDED,
                got: points.len(),
            });
        }
        let mut worst = 0.0f64;
        let mut length = 0.0f64;
        for i in 0..z.len() - block {
            let j = i + block;
            let germ = z.integral_germ(label, i, j)?;
            worst = worst.max((total[j] - total[i] - germ).abs());
            length = length.max(times[j] - times[i]);
        }
        points.push((length, worst));
    }
    let fit = loglog_fit(&points, NEEDED)?;
    Ok(RateReport { points, fit })
}

/// Largest `|R^{h_k}|` over all windows of `2^l` grid steps, per level `l`,
/// with the fitted log-log exponent. Controlled paths show a slope of about
/// `(N − |h_k|)α`.
pub fn remainder_rate(z: &ControlledPath, k: usize, levels: &[usize]) -> Result<RateReport, AnalysisError> {
    const NEEDED: usize = 4;
    if levels.len() < NEEDED {
        return Err(AnalysisError::InsufficientScales {
            needed: NEEDED,
            got: levels.len(),
        });
    }
    if k >= z.components.len() {
        return Err(AnalysisError::ForestOutOfRange(format!("component {k}")));
    }
    let times = z.times();
    let mut points = Vec::new();
    for &l in levels {
        let block = 1usize << l;
        if block >= z.len() {
            return Err(AnalysisError::InsufficientScales {
                needed: NEEDED,
                got: points.len(),
            });
        }
        let mut worst = 0.0f64;
        let mut length = 0.0f64;
        for i in 0..z.len() - block {
            let j = i + block;
            worst = worst.max(z.remainder_idx(k, i, j).abs());
            length = length.max(times[j] - times[i]);
        }
        points.push((length, worst));
    }
    let fit = loglog_fit(&points, NEEDED)?;
    Ok(RateReport { points, fit })
}

/// `⦀𝕴(Z)⦀_α / ((1+T^α)(1+⦀X⦀_α)⦀Z⦀_α)`.
pub fn integral_bound_check(
    z: &ControlledPath,
    label: Label,
    pairs: Pairs,
) -> Result<Ratio, AnalysisError> {
    let x = z.reference();
    let span = x.times()[x.len() - 1] - x.times()[0];
    let num = z.rough_integral(label)?.cp_norm(pairs);
    let den = (1.0 + powf(span, x.alpha())) * (1.0 + x.holder_norm(pairs)) * z.cp_norm(pairs);
    Ok(Ratio::new(num, den))
}

/// `⦀𝕴_X(Z);𝕴_X̃(Z̃)⦀_α / (⦀Z;Z̃⦀_α + ρ_α(X,X̃))`.
pub fn integral_continuity_check(
    z: &ControlledPath,
    other: &ControlledPath,
    label: Label,
    pairs: Pairs,
) -> Result<Ratio, AnalysisError> {
    let num = z
        .rough_integral(label)?
        .cp_distance(&other.rough_integral(label)?, pairs)?;
    let den = z.cp_distance(other, pairs)? + z.reference().rp_distance(other.reference(), pairs)?.max;
    Ok(Ratio::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::parse_forest;
    use crate::rough_path::{lift_piecewise_linear, GridPath};
    use crate::math::{cos, sin};

    fn driver(n: usize, alpha: f64) -> Arc<BranchedRoughPath> {
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let vals = times.iter().map(|t| sin(7.0 * t) + 0.5 * t).collect();
        Arc::new(lift_piecewise_linear(&GridPath::scalar(times, vals).unwrap(), alpha).unwrap())
    }

    fn f(s: &str) -> Forest {
        parse_forest(s).unwrap()
    }

    #[test]
    fn tautological_path_has_no_remainder() {
        let x = driver(32, 0.4);
        let z = ControlledPath::constant(x.clone(), 1.0).rough_integral(Label::PLAIN).unwrap();
        assert_eq!(z.component(&f("[]")).unwrap(), &vec![1.0; 33][..]);
        let table = z.remainder_table(Pairs::All);
        assert!(table.norms.iter().all(|n| *n < 1e-12));
        let xnode = x.table().index_of(&f("[]")).unwrap();
        for i in 0..x.len() {
            assert!((z.component_idx(0)[i] - x.value_at(i)[xnode]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_path_norm() {
        let x = driver(16, 0.3);
        let z = ControlledPath::constant(x, -2.5);
        assert!((z.cp_norm(Pairs::All) - 2.5).abs() < 1e-15);
        assert_eq!(z.cp_distance(&z, Pairs::All).unwrap(), 0.0);
    }

    #[test]
    fn top_degree_remainder_is_the_increment() {
        let x = driver(16, 0.3);
        let z = ControlledPath::composition(x, Label::PLAIN, |v, k| match k % 4 {
            0 => sin(v),
            1 => cos(v),
            2 => -sin(v),
            _ => -cos(v),
        })
        .unwrap();
        let h = f("[[]]");
        let zh = z.component(&h).unwrap();
        let r = z.remainder(&h, 0.25, 0.75).unwrap();
        assert_eq!(r, zh[12] - zh[4]);
        assert!(z.remainder(&f("[][][]"), 0.0, 0.5).is_err());
        assert!(z.remainder(&h, 0.01, 0.5).is_err());
    }

    #[test]
    fn remainder_matches_expanded_formula_at_degree_four() {
        // α ∈ (1/5, 1/4): δZ^{[[]]} − (Z^{[][[]]} + Z^{[[[]]]} + 2 Z^{[[][]]}) X^[]
        let x = driver(8, 0.22);
        let comps: Vec<Vec<f64>> = (0..x.table().count_up_to(3))
            .map(|k| (0..9).map(|i| sin(1.0 + k as f64 * 0.7 + i as f64 * 0.3)).collect())
            .collect();
        let z = ControlledPath::new(x.clone(), comps).unwrap();
        let c = |s: &str| z.component(&f(s)).unwrap().to_vec();
        let (i, j) = (2, 7);
        let inc = x.increment_idx(i, j);
        let xn = inc[x.table().index_of(&f("[]")).unwrap()];
        let expected = c("[[]]")[j] - c("[[]]")[i]
            - (c("[][[]]")[i] + c("[[[]]]")[i] + 2.0 * c("[[][]]")[i]) * xn;
        let got = z.remainder(&f("[[]]"), x.times()[i], x.times()[j]).unwrap();
        assert!((got - expected).abs() < 1e-13);
        let expected = c("[][]")[j] - c("[][]")[i] - (3.0 * c("[][][]")[i] + c("[][[]]")[i]) * xn;
        let got = z.remainder(&f("[][]"), x.times()[i], x.times()[j]).unwrap();
        assert!((got - expected).abs() < 1e-13);
    }

    #[test]
    fn rough_integral_components() {
        let x = driver(16, 0.3);
        let z = ControlledPath::composition(x, Label::PLAIN, |v, k| if k == 0 { v * v } else if k == 1 { 2.0 * v } else if k == 2 { 2.0 } else { 0.0 }).unwrap();
        let i = z.rough_integral(Label::PLAIN).unwrap();
        assert_eq!(i.component(&f("[]")).unwrap(), z.component(&f("1")).unwrap());
        assert_eq!(i.component(&f("[[]]")).unwrap(), z.component(&f("[]")).unwrap());
        assert!(i.component(&f("[][]")).unwrap().iter().all(|v| *v == 0.0));
        assert_eq!(i.component_idx(0)[0], 0.0);
        assert!(z.rough_integral(Label::new('b').unwrap()).is_err());
    }

    #[test]
    fn remainders_form_a_cocycle() {
        let x = driver(12, 0.22);
        let comps: Vec<Vec<f64>> = (0..x.table().count_up_to(3))
            .map(|k| (0..13).map(|i| sin(0.4 + k as f64 * 1.3 + i as f64 * 0.9)).collect())
            .collect();
        let z = ControlledPath::new(x, comps).unwrap();
        for k in 0..z.component_count() {
            for (s, u, t) in [(0, 3, 12), (2, 5, 6), (4, 9, 11)] {
                assert!(z.cocycle_defect(k, s, u, t).abs() < 1e-12, "{k} {s} {u} {t}");
            }
        }
    }
}
