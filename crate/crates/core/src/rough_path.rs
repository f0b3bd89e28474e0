//! Branched rough paths sampled on a time grid.

use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{AlgebraError, AnalysisError};
use crate::forest::{Alphabet, Forest};
use crate::holder::Pairs;
use crate::math::{floor, powf, round};
use crate::tables::ForestTable;
use crate::DEFAULT_DEGREE_CAP;

/// A `d`-dimensional signal sampled on strictly increasing times.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPath {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl GridPath {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self, AnalysisError> {
        check_grid(&times)?;
        if values.len() != times.len() {
            return Err(AnalysisError::ShapeMismatch(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        let d = values[0].len();
        if d == 0 || values.iter().any(|v| v.len() != d) {
            return Err(AnalysisError::ShapeMismatch(
                "values must be nonempty vectors of one common length".to_string(),
            ));
        }
        Ok(Self { times, values })
    }

    /// A scalar signal.
    pub fn scalar(times: Vec<f64>, values: Vec<f64>) -> Result<Self, AnalysisError> {
        Self::new(times, values.into_iter().map(|v| vec![v]).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values[0].len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Keeps the listed grid indices.
    pub fn subsample(&self, indices: &[usize]) -> Result<Self, AnalysisError> {
        Self::new(
            indices.iter().map(|&i| self.times[i]).collect(),
            indices.iter().map(|&i| self.values[i].clone()).collect(),
        )
    }

    /// Multiplies every value by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            times: self.times.clone(),
            values: self
                .values
                .iter()
                .map(|v| v.iter().map(|x| lambda * x).collect())
                .collect(),
        }
    }
}

pub(crate) fn check_grid(times: &[f64]) -> Result<(), AnalysisError> {
    if times.len() < 2
        || times.iter().any(|t| !t.is_finite())
        || times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(AnalysisError::InvalidGrid);
    }
    Ok(())
}

/// Checks `α ∈ (0,1)` with `α ≠ 1/n` and returns `N = ⌊1/α⌋`.
pub fn degree_for(alpha: f64) -> Result<usize, AnalysisError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AnalysisError::InvalidAlpha(alpha));
    }
    let inv = 1.0 / alpha;
    if (inv - round(inv)).abs() < 1e-9 {
        return Err(AnalysisError::InvalidAlpha(alpha));
    }
    let n = floor(inv) as usize;
    if n > DEFAULT_DEGREE_CAP {
        return Err(AlgebraError::DegreeCap {
            requested: n,
            cap: DEFAULT_DEGREE_CAP,
        }
        .into());
    }
    Ok(n)
}

/// Distances between two rough paths, one entry per forest of degree `1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct RoughPathDistanceReport {
    pub entries: Vec<(Forest, f64)>,
    pub max: f64,
}

/// Grid samples `X_{0,tᵢ}` of a branched rough path, one value per forest of
/// degree at most `N`. Increments are derived through the antipode.
#[derive(Clone, Debug)]
pub struct BranchedRoughPath {
    alpha: f64,
    table: Arc<ForestTable>,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    /// one-step increments `X_{tᵢ,tᵢ₊₁}`
    steps: Vec<Vec<f64>>,
}

impl BranchedRoughPath {
    /// Wraps raw samples. `values[i][k]` is `⟨X_{0,tᵢ}, forest k⟩` in table
    /// order, with `values[i][0] = 1`.
    pub fn from_values(
        alpha: f64,
        table: Arc<ForestTable>,
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, AnalysisError> {
        let n = degree_for(alpha)?;
        check_grid(&times)?;
        if table.degree() != n {
            return Err(AnalysisError::ShapeMismatch(format!(
                "table has degree {} but alpha = {alpha} needs {n}",
                table.degree()
            )));
        }
        if values.len() != times.len() || values.iter().any(|v| v.len() != table.len()) {
            return Err(AnalysisError::ShapeMismatch(
                "one value per forest and grid point expected".to_string(),
            ));
        }
        let mut x = Self {
            alpha,
            table,
            times,
            values,
            steps: Vec::new(),
        };
        x.steps = (0..x.times.len() - 1).map(|i| x.increment_idx(i, i + 1)).collect();
        Ok(x)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `N = ⌊1/α⌋`.
    pub fn degree(&self) -> usize {
        self.table.degree()
    }

    pub fn table(&self) -> &Arc<ForestTable> {
        &self.table
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.table.alphabet()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `⟨X_{0,tᵢ}, ·⟩` in table order.
    pub fn value_at(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// `X_{tᵢ,tᵢ₊₁}`.
    pub fn step(&self, i: usize) -> &[f64] {
        &self.steps[i]
    }

    /// Grid index of time `t`.
    pub fn index_of_time(&self, t: f64) -> Result<usize, AnalysisError> {
        let scale = self.times.last().copied().unwrap_or(1.0).abs().max(1.0);
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * scale)
            .ok_or(AnalysisError::NotOnGrid(t))
    }

    /// `X_{0,tᵢ}⁻¹ = X_{0,tᵢ} ∘ S`.
    pub fn inverse_at(&self, i: usize) -> Vec<f64> {
        let x = &self.values[i];
        (0..self.table.len())
            .map(|a| self.table.antipode(a).iter().map(|&(j, c)| c * x[j]).sum())
            .collect()
    }

    /// `X_{tᵢ,tⱼ}` from a precomputed inverse at `tᵢ`.
    pub fn increment_with(&self, inv: &[f64], j: usize) -> Vec<f64> {
        let y = &self.values[j];
        (0..self.table.len())
            .map(|h| {
                self.table
                    .coproduct(h)
                    .iter()
                    .map(|&(a, b, c)| c * inv[a] * y[b])
                    .sum()
            })
            .collect()
    }

    /// `X_{tᵢ,tⱼ} = X_{0,tᵢ}⁻¹ ⋆ X_{0,tⱼ}` by grid index.
    pub fn increment_idx(&self, i: usize, j: usize) -> Vec<f64> {
        self.increment_with(&self.inverse_at(i), j)
    }

    /// `X_{s,t}` for grid times `s`, `t`.
    pub fn increment(&self, s: f64, t: f64) -> Result<Vec<f64>, AnalysisError> {
        Ok(self.increment_idx(self.index_of_time(s)?, self.index_of_time(t)?))
    }

    /// The same character family restricted to a subset of grid indices.
    pub fn subsample(&self, indices: &[usize]) -> Result<Self, AnalysisError> {
        Self::from_values(
            self.alpha,
            self.table.clone(),
            indices.iter().map(|&i| self.times[i]).collect(),
            indices.iter().map(|&i| self.values[i].clone()).collect(),
        )
    }

    /// The path restarted at `tᵢ₀` on the grid points `i₀..=i₁`, so that its
    /// first value is the counit again.
    pub fn slice(&self, i0: usize, i1: usize) -> Result<Self, AnalysisError> {
        if i1 <= i0 || i1 >= self.len() {
            return Err(AnalysisError::EmptyInterval);
        }
        let inv = self.inverse_at(i0);
        Self::from_values(
            self.alpha,
            self.table.clone(),
            self.times[i0..=i1].to_vec(),
            (i0..=i1).map(|j| self.increment_with(&inv, j)).collect(),
        )
    }

    /// Dilation `X^h ↦ λ^{|h|} X^h`, again a rough path.
    pub fn dilate(&self, lambda: f64) -> Self {
        let scale: Vec<f64> = (0..self.table.len())
            .map(|h| crate::math::powi(lambda, self.table.degree_of(h) as i32))
            .collect();
        let values = self
            .values
            .iter()
            .map(|v| v.iter().zip(&scale).map(|(x, s)| x * s).collect())
            .collect();
        Self::from_values(self.alpha, self.table.clone(), self.times.clone(), values)
            .expect("dilation keeps the shape")
    }

    /// Same samples read with another Hölder exponent of the same degree.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self, AnalysisError> {
        if degree_for(alpha)? != self.degree() {
            return Err(AnalysisError::GridMismatch);
        }
        let mut out = self.clone();
        out.alpha = alpha;
        Ok(out)
    }

    /// Largest `|δX^h_{s,u,t} − ⟨X_{s,u}⊗X_{u,t}, Δ'h⟩|` over grid triples
    /// taken with the given stride, relative to `1 + max |X|`.
    pub fn chen_defect(&self, stride: usize) -> f64 {
        let stride = stride.max(1);
        let idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        let scale = 1.0
            + self
                .values
                .iter()
                .flat_map(|v| v.iter().skip(1))
                .fold(0.0f64, |m, x| m.max(x.abs()));
        let mut worst = 0.0f64;
        for (a, &s) in idx.iter().enumerate() {
            let inv_s = self.inverse_at(s);
            for (b, &u) in idx.iter().enumerate().skip(a + 1) {
                let x_su = self.increment_with(&inv_s, u);
                let inv_u = self.inverse_at(u);
                for &t in idx.iter().skip(b + 1) {
                    let x_st = self.increment_with(&inv_s, t);
                    let x_ut = self.increment_with(&inv_u, t);
                    for h in 1..self.table.len() {
                        let delta = x_st[h] - x_su[h] - x_ut[h];
                        let expected: f64 = self
                            .table
                            .coproduct(h)
                            .iter()
                            .filter(|&&(l, r, _)| l != 0 && r != 0)
                            .map(|&(l, r, c)| c * x_su[l] * x_ut[r])
                            .sum();
                        worst = worst.max((delta - expected).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// Largest `|X^{h₁h₂} − X^{h₁}X^{h₂}|` over grid points and factorizations
    /// into a tree and the rest, relative to `1 + max |X|`.
    pub fn multiplicativity_defect(&self) -> f64 {
        let table = &self.table;
        let mut splits = Vec::new();
        for (k, h) in table.forests().iter().enumerate() {
            if h.trees().len() < 2 {
                continue;
            }
            let first = Forest::single(h.trees()[0].clone());
            let rest = Forest::new(h.trees()[1..].to_vec());
            splits.push((k, table.index_of(&first).unwrap(), table.index_of(&rest).unwrap()));
        }
        let mut worst = 0.0f64;
        let mut scale = 1.0f64;
        for v in &self.values {
            for &(k, a, b) in &splits {
                worst = worst.max((v[k] - v[a] * v[b]).abs());
            }
            scale = v.iter().fold(scale, |m, x| m.max(1.0 + x.abs()));
        }
        worst / scale
    }

    /// `⦀X⦀_α = max_h ‖X^h‖_{|h|α}`.
    pub fn holder_norm(&self, pairs: Pairs) -> f64 {
        self.holder_entries(None, pairs).into_iter().fold(0.0, f64::max)
    }

    fn holder_entries(&self, other: Option<&BranchedRoughPath>, pairs: Pairs) -> Vec<f64> {
        let nf = self.table.len();
        let mut best = vec![0.0f64; nf];
        let mut inv_i = Vec::new();
        let mut inv_other = Vec::new();
        let mut last_i = usize::MAX;
        pairs.for_each(self.len(), |i, j| {
            if i != last_i {
                inv_i = self.inverse_at(i);
                if let Some(o) = other {
                    inv_other = o.inverse_at(i);
                }
                last_i = i;
            }
            let dt = self.times[j] - self.times[i];
            let x = self.increment_with(&inv_i, j);
            let y = other.map(|o| o.increment_with(&inv_other, j));
            for h in 1..nf {
                let diff = match &y {
                    Some(y) => x[h] - y[h],
                    None => x[h],
                };
                let q = diff.abs() / powf(dt, self.table.degree_of(h) as f64 * self.alpha);
                if q > best[h] {
                    best[h] = q;
                }
            }
        });
        best.into_iter().skip(1).collect()
    }

    /// `ρ_α(X, X̃) = max_h ‖X^h − X̃^h‖_{|h|α}` with the per-forest entries.
    pub fn rp_distance(
        &self,
        other: &BranchedRoughPath,
        pairs: Pairs,
    ) -> Result<RoughPathDistanceReport, AnalysisError> {
        if !self.same_grid(other) || self.alphabet() != other.alphabet() {
            return Err(AnalysisError::GridMismatch);
        }
        let entries: Vec<(Forest, f64)> = self
            .table
            .forests()
            .iter()
            .skip(1)
            .cloned()
            .zip(self.holder_entries(Some(other), pairs))
            .collect();
        let max = entries.iter().map(|e| e.1).fold(0.0, f64::max);
        Ok(RoughPathDistanceReport { entries, max })
    }

    /// Whether both paths share grid, degree and exponent.
    pub fn same_grid(&self, other: &BranchedRoughPath) -> bool {
        self.times == other.times
            && self.degree() == other.degree()
            && self.alpha == other.alpha
    }

    /// `Γ^p_t` with `Γ^p_0 = 0` and `X^p_{s,t} = Γ^p_t − Γ^p_s`, for a
    /// primitive `p` given by table coefficients.
    pub fn primitive_path(&self, p: &[(usize, f64)]) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| p.iter().map(|&(k, c)| c * v[k]).sum())
            .collect()
    }
}

/// Canonical lift of a piecewise-linear signal: exact iterated integrals on
/// each segment, concatenated by Chen's identity.
pub fn lift_piecewise_linear(
    path: &GridPath,
    alpha: f64,
) -> Result<BranchedRoughPath, AnalysisError> {
    let n = degree_for(alpha)?;
    let alphabet = Alphabet::standard(path.dimension());
    let table = Arc::new(ForestTable::new(&alphabet, n)?);
    lift_with_table(path, alpha, table)
}

/// As [`lift_piecewise_linear`], reusing a table.
pub fn lift_with_table(
    path: &GridPath,
    alpha: f64,
    table: Arc<ForestTable>,
) -> Result<BranchedRoughPath, AnalysisError> {
    if table.alphabet().len() != path.dimension() {
        return Err(AnalysisError::ShapeMismatch(format!(
            "{}-dimensional path for a {}-letter alphabet",
            path.dimension(),
            table.alphabet().len()
        )));
    }
    let nf = table.len();
    let mut values = Vec::with_capacity(path.len());
    let mut current = vec![0.0; nf];
    current[0] = 1.0;
    values.push(current.clone());
    let mut v = vec![0.0; path.dimension()];
    for w in path.values().windows(2) {
        for (vi, (a, b)) in v.iter_mut().zip(w[0].iter().zip(&w[1])) {
            *vi = b - a;
        }
        let seg: Vec<f64> = (0..nf).map(|h| table.segment_value(h, &v)).collect();
        let next: Vec<f64> = (0..nf)
            .map(|h| {
                table
                    .coproduct(h)
                    .iter()
                    .map(|&(a, b, c)| c * current[a] * seg[b])
                    .sum()
            })
            .collect();
        current = next;
        values.push(current.clone());
    }
    BranchedRoughPath::from_values(alpha, table, path.times().to_vec(), values)
}
