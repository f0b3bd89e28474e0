//! One-step B-series solver for rough differential equations
//! `dY = Σ_i f_i(Y) dX^i` with polynomial vector fields.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::controlled::ControlledPath;
use crate::error::AnalysisError;
use crate::fit::Ratio;
use crate::forest::Label;
use crate::holder::Pairs;
use crate::poly::{PolyVector, PolyVectorField};
use crate::rough_path::BranchedRoughPath;
use crate::tables::ForestTable;

/// Solutions whose sup norm exceeds this value are reported as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e9;

#[derive(Clone, Debug)]
struct Term {
    index: usize,
    differential: PolyVector,
    weight: f64,
}

/// Elementary differentials of one field for every tree of a forest table,
/// each paired with `1/σ(τ)`.
#[derive(Clone, Debug)]
pub struct RdeScheme {
    field: PolyVectorField,
    table: Arc<ForestTable>,
    terms: Vec<Term>,
    /// table index → position in `terms`
    lookup: Vec<Option<usize>>,
}

impl RdeScheme {
    pub fn new(field: &PolyVectorField, table: Arc<ForestTable>) -> Result<Self, AnalysisError> {
        if table.alphabet().len() != field.count() {
            return Err(AnalysisError::ShapeMismatch(format!(
                "{} vector fields for an alphabet of {} labels",
                field.count(),
                table.alphabet().len()
            )));
        }
        let mut terms = Vec::new();
        let mut lookup = vec![None; table.len()];
        for (index, h) in table.forests().iter().enumerate() {
            let Some(tau) = h.as_tree() else { continue };
            lookup[index] = Some(terms.len());
            terms.push(Term {
                index,
                differential: field.elementary_differential(tau, table.alphabet())?,
                weight: 1.0 / table.symmetry_factor(index),
            });
        }
        Ok(Self {
            field: field.clone(),
            table,
            terms,
            lookup,
        })
    }

    pub fn field(&self) -> &PolyVectorField {
        &self.field
    }

    pub fn table(&self) -> &Arc<ForestTable> {
        &self.table
    }

    /// `f_τ(y)/σ(τ)` for the tree at table index `k`, zero for other forests.
    pub fn coefficient(&self, k: usize, y: &[f64]) -> Vec<f64> {
        match self.lookup.get(k).copied().flatten() {
            Some(t) => {
                let term = &self.terms[t];
                term.differential.iter().map(|p| term.weight * p.eval(y)).collect()
            }
            None => vec![0.0; self.field.dim()],
        }
    }

    /// `y + Σ_τ f_τ(y) x^τ / σ(τ)` for an increment `x` in table coordinates.
    pub fn advance(&self, y: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out = y.to_vec();
        for term in &self.terms {
            let xv = x[term.index];
            if xv == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&term.differential) {
                *o += term.weight * p.eval(y) * xv;
            }
        }
        out
    }
}

/// Grid solution `Y` together with its lifts `𝐘`, one controlled path per
/// coordinate of `ℝⁿ`.
#[derive(Clone, Debug)]
pub struct RdeSolution {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub lifted: Vec<ControlledPath>,
    scheme: Arc<RdeScheme>,
}

impl RdeSolution {
    pub fn terminal(&self) -> &[f64] {
        self.values.last().expect("grids have at least two points")
    }

    pub fn scheme(&self) -> &Arc<RdeScheme> {
        &self.scheme
    }

    /// Integrand of coordinate `c` against `dX^a`: its component on `h` is the
    /// coefficient of `[h]_a` in `𝐘`. Summing the rough integrals over all
    /// labels gives back `Y − Y_0`.
    pub fn integrand(&self, label: Label, c: usize) -> Result<ControlledPath, AnalysisError> {
        let reference = self.lifted[c].reference().clone();
        let table = reference.table().clone();
        let a = table.alphabet().index_of(label).ok_or(AnalysisError::Algebra(
            crate::error::AlgebraError::UnknownLabel(label.as_char().unwrap_or(' ')),
        ))?;
        let k = table.count_up_to(reference.degree() - 1);
        let components = (0..k)
            .map(|h| match table.graft_root(h, a) {
                Some(g) => self.values.iter().map(|y| self.scheme.coefficient(g, y)[c]).collect(),
                None => vec![0.0; self.values.len()],
            })
            .collect();
        ControlledPath::new(reference, components)
    }
}

/// One B-series step from grid time `s` to grid time `t`.
pub fn rde_step(
    x: &BranchedRoughPath,
    field: &PolyVectorField,
    y: &[f64],
    s: f64,
    t: f64,
) -> Result<Vec<f64>, AnalysisError> {
    let i = x.index_of_time(s)?;
    let j = x.index_of_time(t)?;
    if j <= i {
        return Err(AnalysisError::EmptyInterval);
    }
    check_dim(field, y)?;
    let scheme = RdeScheme::new(field, x.table().clone())?;
    Ok(scheme.advance(y, &x.increment_idx(i, j)))
}

fn check_dim(field: &PolyVectorField, y: &[f64]) -> Result<(), AnalysisError> {
    if y.len() != field.dim() {
        return Err(AnalysisError::ShapeMismatch(format!(
            "initial value has {} coordinates, the field acts on ℝ^{}",
            y.len(),
            field.dim()
        )));
    }
    Ok(())
}

/// Marches the B-series step over every grid interval of `x`.
pub fn solve_rde(
    x: &Arc<BranchedRoughPath>,
    field: &PolyVectorField,
    xi: &[f64],
) -> Result<RdeSolution, AnalysisError> {
    check_dim(field, xi)?;
    let scheme = Arc::new(RdeScheme::new(field, x.table().clone())?);
    let mut values = Vec::with_capacity(x.len());
    values.push(xi.to_vec());
    for j in 0..x.len() - 1 {
        let next = scheme.advance(&values[j], x.step(j));
        let norm = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm.is_nan() || norm > DIVERGENCE_BOUND {
            return Err(AnalysisError::Divergence {
                time: x.times()[j + 1],
                norm,
            });
        }
        values.push(next);
    }
    let k = x.table().count_up_to(x.degree() - 1);
    let coefficients: Vec<Vec<Vec<f64>>> = values
        .iter()
        .map(|y| (0..k).map(|h| scheme.coefficient(h, y)).collect())
        .collect();
    let lifted = (0..field.dim())
        .map(|c| {
            let mut components: Vec<Vec<f64>> = (0..k)
                .map(|h| coefficients.iter().map(|row| row[h][c]).collect())
                .collect();
            components[0] = values.iter().map(|y| y[c]).collect();
            ControlledPath::new(x.clone(), components)
        })
        .collect::<Result<_, _>>()?;
    Ok(RdeSolution {
        times: x.times().to_vec(),
        values,
        lifted,
        scheme,
    })
}

/// `Σ_c ⦀𝐘^c;𝐘̃^c⦀_α / (|ξ − ξ̃| + ρ_α(X, X̃))` with `|·|` the max norm.
pub fn ito_lyons_stability(
    xi: &[f64],
    x: &Arc<BranchedRoughPath>,
    xi2: &[f64],
    x2: &Arc<BranchedRoughPath>,
    field: &PolyVectorField,
    pairs: Pairs,
) -> Result<Ratio, AnalysisError> {
    if !x.same_grid(x2) {
        return Err(AnalysisError::GridMismatch);
    }
    let a = solve_rde(x, field, xi)?;
    let b = solve_rde(x2, field, xi2)?;
    let mut num = 0.0;
    for (p, q) in a.lifted.iter().zip(&b.lifted) {
        num += p.cp_distance(q, pairs)?;
    }
    let gap = xi.iter().zip(xi2).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
    Ok(Ratio::new(num, gap + x.rp_distance(x2, pairs)?.max))
}
