//! Controlled paths generated from smooth data by rough integration against
//! primitive elements, and the piecewise approximation of arbitrary
//! controlled paths by such paths.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::basis::PrimitiveBasis;
use crate::error::AnalysisError;
use crate::fit::{loglog_fit, RateFit, Ratio};
use crate::forest::Forest;
use crate::holder::{holder_seminorm, Pairs};
use crate::hopf::star;
use crate::controlled::ControlledPath;
use crate::rough_path::{check_grid, BranchedRoughPath};
use crate::series::ForestSeries;
use crate::tables::ForestTable;

/// `(1 − Nα)/2`, the midpoint of the admissible range of `ε`.
pub fn default_epsilon(alpha: f64) -> Result<f64, AnalysisError> {
    let n = crate::rough_path::degree_for(alpha)?;
    Ok((1.0 - n as f64 * alpha) / 2.0)
}

fn check_epsilon(alpha: f64, epsilon: f64) -> Result<(), AnalysisError> {
    let n = crate::rough_path::degree_for(alpha)?;
    let bound = 1.0 - n as f64 * alpha;
    if !(epsilon > 0.0 && epsilon < bound) {
        return Err(AnalysisError::InvalidEpsilon { epsilon, bound });
    }
    Ok(())
}

/// One grid function `f^h` per forest `h` of degree at most `N − 1`,
/// interpolated linearly between grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothControlData {
    times: Vec<f64>,
    forests: Vec<Forest>,
    values: Vec<Vec<f64>>,
    epsilon: f64,
}

impl SmoothControlData {
    pub fn new(
        times: Vec<f64>,
        forests: Vec<Forest>,
        values: Vec<Vec<f64>>,
        epsilon: f64,
    ) -> Result<Self, AnalysisError> {
        check_grid(&times)?;
        if values.len() != forests.len() || values.iter().any(|v| v.len() != times.len()) {
            return Err(AnalysisError::ShapeMismatch(alloc::format!(
                "{} forests need as many rows of {} values",
                forests.len(),
                times.len()
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(AnalysisError::InvalidEpsilon { epsilon, bound: 1.0 });
        }
        Ok(Self {
            times,
            forests,
            values,
            epsilon,
        })
    }

    /// All functions zero, shaped for controlled paths over `x`.
    pub fn zero(x: &BranchedRoughPath, epsilon: f64) -> Result<Self, AnalysisError> {
        let k = x.table().count_up_to(x.degree() - 1);
        Self::new(
            x.times().to_vec(),
            x.table().forests()[..k].to_vec(),
            vec![vec![0.0; x.len()]; k],
            epsilon,
        )
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn forests(&self) -> &[Forest] {
        &self.forests
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.values
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn component(&self, h: &Forest) -> Option<&[f64]> {
        self.forests
            .iter()
            .position(|f| f == h)
            .map(|k| self.values[k].as_slice())
    }

    /// `⦀f⦀ = max_h (|f^h_0| + ‖f^h‖_{1−ε})`.
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v[0].abs() + holder_seminorm(&self.times, v, 1.0 - self.epsilon))
            .fold(0.0, f64::max)
    }

    /// `f + λg`.
    pub fn combine(&self, other: &SmoothControlData, lambda: f64) -> Result<Self, AnalysisError> {
        if self.times != other.times || self.forests != other.forests {
            return Err(AnalysisError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + lambda * y).collect())
            .collect();
        Self::new(self.times.clone(), self.forests.clone(), values, self.epsilon)
    }
}

/// One germ term `Γ^{L}_s · X^{W}_{s,t}` with `L = ρ*⋆p*⋆h` and `W = ρ⊤p`.
#[derive(Clone, Debug)]
struct GermTerm {
    left: Vec<(usize, f64)>,
    right: Vec<(usize, f64)>,
}

/// The germs of every rough integral in the recursion for `Γ_X`, resolved
/// against a forest table once so that they can be reused across paths.
#[derive(Clone, Debug)]
pub struct GammaPlan {
    table: Arc<ForestTable>,
    components: usize,
    /// germ terms per component, empty at the top degree
    terms: Vec<Vec<GermTerm>>,
}

impl GammaPlan {
    pub fn new(table: Arc<ForestTable>, basis: &PrimitiveBasis) -> Result<Self, AnalysisError> {
        let n = table.degree();
        if basis.max_degree() < n {
            return Err(AnalysisError::BasisTooSmall {
                basis: basis.max_degree(),
                required: n,
            });
        }
        if basis.alphabet() != table.alphabet() {
            return Err(AnalysisError::ShapeMismatch(
                "basis and rough path use different alphabets".into(),
            ));
        }
        let components = table.count_up_to(n - 1);
        let dense = |x: &ForestSeries| {
            table
                .dense(x)
                .expect("germ terms stay inside the table")
                .into_iter()
                .filter(|(_, c)| *c != 0.0)
                .collect::<Vec<_>>()
        };
        let mut terms = vec![Vec::new(); components];
        for (k, slot) in terms.iter_mut().enumerate() {
            let h = table.forest(k);
            let hn = h.degree();
            if hn + 1 >= n {
                continue;
            }
            let delta_h = ForestSeries::from(h.clone());
            for (pi, p) in basis.primitives().iter().enumerate() {
                if p.degree >= n - hn {
                    continue;
                }
                let p_word = basis.find_word(&[pi]).expect("single-letter words exist");
                let p_dual = basis.dual(p_word);
                let room = n - hn - p.degree - 1;
                let mut rhos: Vec<Option<usize>> = vec![None];
                rhos.extend((1..=room).flat_map(|d| basis.ptop_of_degree(d).iter().map(|&r| Some(r))));
                for rho in rhos {
                    let (left, word) = match rho {
                        None => (star(p_dual, &delta_h), vec![pi]),
                        Some(r) => {
                            let mut w = basis.ptop_elements()[r].word.clone();
                            w.push(pi);
                            (star(&star(basis.dual(r), p_dual), &delta_h), w)
                        }
                    };
                    let w = basis.find_word(&word).expect("words up to the basis degree exist");
                    let left = dense(&left);
                    if left.is_empty() {
                        continue;
                    }
                    debug_assert!(left.iter().all(|&(g, _)| g < components));
                    slot.push(GermTerm {
                        left,
                        right: dense(&basis.ptop_elements()[w].value),
                    });
                }
            }
        }
        Ok(Self {
            table,
            components,
            terms,
        })
    }

    /// Plan for the table of `x`, building a primitive basis of degree `N`.
    pub fn for_path(x: &BranchedRoughPath) -> Result<Self, AnalysisError> {
        let basis = PrimitiveBasis::build(x.alphabet(), x.degree())?;
        Self::new(x.table().clone(), &basis)
    }

    pub fn table(&self) -> &Arc<ForestTable> {
        &self.table
    }

    /// Number of germ terms feeding component `k`.
    pub fn term_count(&self, k: usize) -> usize {
        self.terms[k].len()
    }

    fn check(&self, x: &BranchedRoughPath) -> Result<(), AnalysisError> {
        if x.table().len() != self.table.len() || x.alphabet() != self.table.alphabet() {
            return Err(AnalysisError::GridMismatch);
        }
        Ok(())
    }

    /// `Σ_p ∫_0^t Γ^{p*⋆h} dX^p` for component `k` as compensated sums over the
    /// grid, given every component of higher degree.
    fn integral(&self, x: &BranchedRoughPath, gamma: &[Vec<f64>], k: usize) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        let terms = &self.terms[k];
        if terms.is_empty() {
            return out;
        }
        let mut acc = 0.0;
        for j in 0..x.len() - 1 {
            let step = x.step(j);
            for t in terms {
                let l: f64 = t.left.iter().map(|&(g, c)| c * gamma[g][j]).sum();
                if l != 0.0 {
                    let w: f64 = t.right.iter().map(|&(a, c)| c * step[a]).sum();
                    acc += l * w;
                }
            }
            out[j + 1] = acc;
        }
        out
    }

    /// Runs the recursion from the top degree down. `data(k, I)` returns
    /// `f^{h_k}` once the integral term `I` of component `k` is known.
    fn run(
        &self,
        x: &Arc<BranchedRoughPath>,
        mut data: impl FnMut(usize, &[f64]) -> Vec<f64>,
    ) -> Result<ControlledPath, AnalysisError> {
        self.check(x)?;
        let mut gamma = vec![Vec::new(); self.components];
        let top = x.degree() - 1;
        for d in (0..=top).rev() {
            for k in (0..self.components).filter(|&k| self.table.degree_of(k) == d) {
                let integral = self.integral(x, &gamma, k);
                let f = data(k, &integral);
                gamma[k] = f.iter().zip(&integral).map(|(a, b)| a + b).collect();
            }
        }
        ControlledPath::new(x.clone(), gamma)
    }
}

/// `Γ_X(f)`.
pub fn gamma(
    x: &Arc<BranchedRoughPath>,
    f: &SmoothControlData,
    plan: &GammaPlan,
) -> Result<ControlledPath, AnalysisError> {
    check_epsilon(x.alpha(), f.epsilon())?;
    if f.times() != x.times() || f.values.len() != plan.components {
        return Err(AnalysisError::GridMismatch);
    }
    plan.run(x, |k, _| f.values[k].clone())
}

/// `⦀Γ_X(f);Γ_X̃(f)⦀_α / (⦀f⦀ ρ_α(X,X̃))`.
pub fn gamma_stability(
    x: &Arc<BranchedRoughPath>,
    x2: &Arc<BranchedRoughPath>,
    f: &SmoothControlData,
    plan: &GammaPlan,
    pairs: Pairs,
) -> Result<Ratio, AnalysisError> {
    let a = gamma(x, f, plan)?;
    let b = gamma(x2, f, plan)?;
    let num = a.cp_distance(&b, pairs)?;
    let den = f.norm() * x.rp_distance(x2, pairs)?.max;
    Ok(Ratio::new(num, den))
}

/// Affine data on `[t_{i₀}, t_{i₁}]` and the path it generates over the
/// restarted reference. The generated path agrees with `Z` at both ends and
/// has the same remainder over the whole interval.
pub fn local_affine_data(
    z: &ControlledPath,
    i0: usize,
    i1: usize,
    plan: &GammaPlan,
    epsilon: f64,
) -> Result<(SmoothControlData, ControlledPath), AnalysisError> {
    if i1 <= i0 || i1 >= z.len() {
        return Err(AnalysisError::EmptyInterval);
    }
    check_epsilon(z.reference().alpha(), epsilon)?;
    let x = Arc::new(z.reference().slice(i0, i1)?);
    let times = x.times().to_vec();
    let span = times[times.len() - 1] - times[0];
    let lambda: Vec<f64> = times.iter().map(|t| (t - times[0]) / span).collect();
    let mut values = vec![Vec::new(); plan.components];
    let path = plan.run(&x, |k, integral| {
        let c = z.component_idx(k);
        let jump = c[i1] - c[i0] - integral[integral.len() - 1];
        let f: Vec<f64> = lambda.iter().map(|l| c[i0] + l * jump).collect();
        values[k] = f.clone();
        f
    })?;
    let forests = z.forests().to_vec();
    let data = SmoothControlData::new(times, forests, values, epsilon)?;
    Ok((data, path))
}

/// Mesh points of a dissection, as grid indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dissection {
    indices: Vec<usize>,
}

impl Dissection {
    /// Grid indices `0 = i₀ < … < i_K = n − 1`.
    pub fn new(indices: Vec<usize>, grid_len: usize) -> Result<Self, AnalysisError> {
        if indices.len() < 2
            || indices[0] != 0
            || indices[indices.len() - 1] + 1 != grid_len
            || indices.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(AnalysisError::InvalidGrid);
        }
        Ok(Self { indices })
    }

    /// Mesh points at grid times closest to the given ones; they must be grid points.
    pub fn from_times(x: &BranchedRoughPath, times: &[f64]) -> Result<Self, AnalysisError> {
        let idx = times
            .iter()
            .map(|&t| x.index_of_time(t).map_err(|_| AnalysisError::DissectionOffGrid(t)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(idx, x.len())
    }

    /// `2^level` equal pieces of a grid with `grid_len − 1` steps.
    pub fn dyadic(grid_len: usize, level: u32) -> Result<Self, AnalysisError> {
        let steps = grid_len.saturating_sub(1);
        let pieces = 1usize << level;
        if steps == 0 || !steps.is_multiple_of(pieces) {
            return Err(AnalysisError::DissectionOffGrid(1.0 / pieces as f64));
        }
        Self::new((0..=pieces).map(|k| k * steps / pieces).collect(), grid_len)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Largest step `θ`.
    pub fn mesh(&self, times: &[f64]) -> f64 {
        self.indices
            .windows(2)
            .map(|w| times[w[1]] - times[w[0]])
            .fold(0.0, f64::max)
    }
}

/// Concatenates pieces living on consecutive sub-grids of `reference`.
pub fn glue(
    reference: &Arc<BranchedRoughPath>,
    pieces: &[ControlledPath],
) -> Result<ControlledPath, AnalysisError> {
    let first = pieces.first().ok_or(AnalysisError::NotContiguous)?;
    let kc = first.component_count();
    let mut components: Vec<Vec<f64>> = vec![Vec::with_capacity(reference.len()); kc];
    let mut cursor = 0usize;
    let times = reference.times();
    let scale = 1.0
        + pieces
            .iter()
            .flat_map(|p| p.components().iter().flatten())
            .fold(0.0f64, |m, v| m.max(v.abs()));
    for (m, piece) in pieces.iter().enumerate() {
        let pt = piece.times();
        if piece.component_count() != kc
            || cursor + pt.len() > times.len()
            || times[cursor..cursor + pt.len()] != *pt
        {
            return Err(AnalysisError::NotContiguous);
        }
        let skip = if m == 0 { 0 } else { 1 };
        for (k, col) in components.iter_mut().enumerate() {
            let c = piece.component_idx(k);
            if m > 0 {
                let gap = (col[col.len() - 1] - c[0]).abs();
                if gap > 1e-10 * scale {
                    return Err(AnalysisError::EndpointMismatch {
                        time: pt[0],
                        gap,
                    });
                }
            }
            col.extend_from_slice(&c[skip..]);
        }
        cursor += pt.len() - 1;
    }
    if cursor + 1 != times.len() {
        return Err(AnalysisError::NotContiguous);
    }
    ControlledPath::new(reference.clone(), components)
}

/// A glued approximation and the smooth data generating it over the full grid.
#[derive(Clone, Debug)]
pub struct Approximation {
    pub path: ControlledPath,
    pub data: SmoothControlData,
    pub mesh: f64,
}

/// Affine approximations on every interval of `dissection`, glued, together
/// with the global data `f` for which the result equals `Γ_X(f)`.
pub fn approximate(
    z: &ControlledPath,
    dissection: &Dissection,
    plan: &GammaPlan,
    epsilon: f64,
) -> Result<Approximation, AnalysisError> {
    let idx = dissection.indices();
    if idx[idx.len() - 1] + 1 != z.len() {
        return Err(AnalysisError::GridMismatch);
    }
    let pieces = idx
        .windows(2)
        .map(|w| local_affine_data(z, w[0], w[1], plan, epsilon).map(|(_, p)| p))
        .collect::<Result<Vec<_>, _>>()?;
    let x = z.reference().clone();
    let path = glue(&x, &pieces)?;
    let mut values = vec![Vec::new(); plan.components];
    plan.run(&x, |k, integral| {
        let f: Vec<f64> = path
            .component_idx(k)
            .iter()
            .zip(integral)
            .map(|(a, b)| a - b)
            .collect();
        values[k] = f.clone();
        f
    })?;
    let data = SmoothControlData::new(x.times().to_vec(), z.forests().to_vec(), values, epsilon)?;
    Ok(Approximation {
        path,
        data,
        mesh: dissection.mesh(x.times()),
    })
}

/// Errors `⦀Z;Z̃_θ⦀_β` over dyadic meshes with the fitted exponent in `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    /// `(θ, error)` per level
    pub rows: Vec<(f64, f64)>,
    pub fit: RateFit,
}

impl ConvergenceTable {
    /// Whether each error is at most `1 + tolerance` times the previous one.
    pub fn nonincreasing(&self, tolerance: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 * (1.0 + tolerance))
    }
}

fn check_beta(alpha: f64, beta: f64) -> Result<(), AnalysisError> {
    if !(beta > 0.0 && beta < alpha) {
        return Err(AnalysisError::InvalidBeta { alpha, beta });
    }
    Ok(())
}

pub fn convergence_study(
    z: &ControlledPath,
    beta: f64,
    levels: &[u32],
    plan: &GammaPlan,
    epsilon: f64,
    pairs: Pairs,
) -> Result<ConvergenceTable, AnalysisError> {
    check_beta(z.reference().alpha(), beta)?;
    let mut rows = Vec::with_capacity(levels.len());
    for &l in levels {
        let d = Dissection::dyadic(z.len(), l)?;
        let approx = approximate(z, &d, plan, epsilon)?;
        rows.push((approx.mesh, z.cp_distance_at(&approx.path, beta, pairs)?));
    }
    let fit = loglog_fit(&rows, 2)?;
    Ok(ConvergenceTable { rows, fit })
}

/// Outcome of the smooth-approximation workflow.
#[derive(Clone, Debug)]
pub struct SmoothApproximation {
    pub data: SmoothControlData,
    /// dyadic level of the chosen dissection
    pub level: u32,
    /// `⦀Z;Γ_X(f)⦀_β`, at most half the budget
    pub first_error: f64,
    /// the budget split `(δ/2, δ/2)`
    pub split: (f64, f64),
    /// per driver: `Γ_{X_ε}(f)` and `⦀Γ_X(f);Γ_{X_ε}(f)⦀_β + ρ_α(X,X_ε)`
    pub results: Vec<(ControlledPath, f64)>,
}

impl SmoothApproximation {
    /// Certified total error per driver.
    pub fn certified(&self) -> Vec<f64> {
        self.results.iter().map(|r| self.first_error + r.1).collect()
    }

    /// Whether driver `i` meets the second half of the budget.
    pub fn within_budget(&self, i: usize) -> bool {
        self.results[i].1 <= self.split.1
    }
}

/// Chooses the coarsest dyadic dissection with `⦀Z;Γ_X(f)⦀_β ≤ δ/2` and
/// carries `f` over to the approximating drivers.
pub fn smooth_approximation(
    z: &ControlledPath,
    drivers: &[Arc<BranchedRoughPath>],
    plan: &GammaPlan,
    delta: f64,
    beta: f64,
    epsilon: f64,
    pairs: Pairs,
) -> Result<SmoothApproximation, AnalysisError> {
    check_beta(z.reference().alpha(), beta)?;
    let half = delta / 2.0;
    let steps = z.len() - 1;
    let mut best = f64::INFINITY;
    let mut chosen = None;
    let mut level = 0u32;
    while (1usize << level) <= steps {
        if steps.is_multiple_of(1usize << level) {
            let d = Dissection::dyadic(z.len(), level)?;
            let approx = approximate(z, &d, plan, epsilon)?;
            let err = z.cp_distance_at(&approx.path, beta, pairs)?;
            best = best.min(err);
            if err <= half {
                chosen = Some((approx, err, level));
                break;
            }
        }
        level += 1;
    }
    let (approx, first_error, level) = chosen.ok_or(AnalysisError::BudgetUnattainable {
        budget: half,
        best,
    })?;
    let x = z.reference();
    let base = gamma(x, &approx.data, plan)?;
    let results = drivers
        .iter()
        .map(|xe| {
            let ze = gamma(xe, &approx.data, plan)?;
            let second = base.cp_distance_at(&ze, beta, pairs)? + x.rp_distance(xe, pairs)?.max;
            Ok((ze, second))
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(SmoothApproximation {
        data: approx.data,
        level,
        first_error,
        split: (half, half),
        results,
    })
}
