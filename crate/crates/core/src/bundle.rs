//! The total space of controlled paths: flat metric, tubes around sections
//! `X ↦ Γ_X(f)` and the pseudometrics built from them.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::approx::{gamma, GammaPlan, SmoothControlData};
use crate::controlled::ControlledPath;
use crate::error::AnalysisError;
use crate::fit::Ratio;
use crate::forest::{Forest, Label};
use crate::holder::Pairs;
use crate::rough_path::{lift_with_table, BranchedRoughPath, GridPath};

/// A controlled path together with its base point `p(x)`, the reference path.
#[derive(Clone, Debug)]
pub struct BundlePoint {
    fiber: ControlledPath,
}

impl BundlePoint {
    pub fn new(fiber: ControlledPath) -> Self {
        Self { fiber }
    }

    pub fn base(&self) -> &Arc<BranchedRoughPath> {
        self.fiber.reference()
    }

    pub fn fiber(&self) -> &ControlledPath {
        &self.fiber
    }

    /// Image under the rough integral `𝕴^a`, a fibre-preserving map.
    pub fn integrate(&self, label: Label) -> Result<Self, AnalysisError> {
        Ok(Self::new(self.fiber.rough_integral(label)?))
    }

    /// Whether the base point is the piecewise-linear lift of its own first
    /// level, up to `tolerance` relative to the largest entry.
    pub fn has_geometric_base(&self, tolerance: f64) -> bool {
        is_piecewise_linear_lift(self.base(), tolerance)
    }
}

/// Re-lifts the single-node components of `x` and compares.
pub fn is_piecewise_linear_lift(x: &BranchedRoughPath, tolerance: f64) -> bool {
    let table = x.table();
    let nodes: Vec<usize> = x
        .alphabet()
        .labels()
        .iter()
        .map(|&l| table.index_of(&Forest::node(l)).expect("nodes are in the table"))
        .collect();
    let level_one = x
        .values()
        .iter()
        .map(|v| nodes.iter().map(|&k| v[k]).collect())
        .collect();
    let Ok(path) = GridPath::new(x.times().to_vec(), level_one) else {
        return false;
    };
    let Ok(relift) = lift_with_table(&path, x.alpha(), table.clone()) else {
        return false;
    };
    let scale = x
        .values()
        .iter()
        .flatten()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    x.values()
        .iter()
        .flatten()
        .zip(relift.values().iter().flatten())
        .all(|(a, b)| (a - b).abs() <= tolerance * scale)
}

/// `d♭(x, y) = ρ_α(p(x), p(y)) + ⦀x;y⦀_α`.
pub fn flat_distance(x: &BundlePoint, y: &BundlePoint, pairs: Pairs) -> Result<f64, AnalysisError> {
    let rho = x.base().rp_distance(y.base(), pairs)?.max;
    Ok(rho + x.fiber.cp_distance(&y.fiber, pairs)?)
}

/// The tube `W(γ, U, ε)` around the section `γ(X) = Γ_X(f)`, with `U` the
/// `ρ_α`-ball of radius `r` around `center`.
#[derive(Clone, Debug)]
pub struct TubeSpec {
    pub section: SmoothControlData,
    pub plan: Arc<GammaPlan>,
    pub center: Arc<BranchedRoughPath>,
    pub radius: f64,
    pub epsilon: f64,
}

/// Where a bundle point sits relative to a tube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeEvaluation {
    /// `ρ_α(p(b), t_i)`
    pub base_distance: f64,
    /// `⦀b − γ(p(b))⦀_α`
    pub section_distance: f64,
    pub inside: bool,
    /// `(r − ρ)(ε − ⦀·⦀)` inside the tube, `0` outside
    pub weight: f64,
}

impl TubeSpec {
    pub fn new(
        section: SmoothControlData,
        plan: Arc<GammaPlan>,
        center: Arc<BranchedRoughPath>,
        radius: f64,
        epsilon: f64,
    ) -> Result<Self, AnalysisError> {
        for v in [radius, epsilon] {
            if !(v > 0.0 && v < 1.0) {
                return Err(AnalysisError::InvalidEpsilon {
                    epsilon: v,
                    bound: 1.0,
                });
            }
        }
        Ok(Self {
            section,
            plan,
            center,
            radius,
            epsilon,
        })
    }

    pub fn evaluate(&self, b: &BundlePoint, pairs: Pairs) -> Result<TubeEvaluation, AnalysisError> {
        let base_distance = b.base().rp_distance(&self.center, pairs)?.max;
        let on_section = gamma(b.base(), &self.section, &self.plan)?;
        let section_distance = b.fiber.cp_distance(&on_section, pairs)?;
        let inside = base_distance < self.radius && section_distance < self.epsilon;
        let weight = if inside {
            (self.radius - base_distance) * (self.epsilon - section_distance)
        } else {
            0.0
        };
        Ok(TubeEvaluation {
            base_distance,
            section_distance,
            inside,
            weight,
        })
    }
}

pub fn tube_contains(spec: &TubeSpec, b: &BundlePoint, pairs: Pairs) -> Result<bool, AnalysisError> {
    Ok(spec.evaluate(b, pairs)?.inside)
}

/// `|w(x) − w(y)|` for the tube weight `w`.
pub fn tube_pseudometric(
    spec: &TubeSpec,
    x: &BundlePoint,
    y: &BundlePoint,
    pairs: Pairs,
) -> Result<f64, AnalysisError> {
    Ok((spec.evaluate(x, pairs)?.weight - spec.evaluate(y, pairs)?.weight).abs())
}

/// `Σ_m 2^{−m} min{1, d_m(x, y)}` over the tubes `m = 1, 2, …` of `specs`.
pub fn truncated_ns_distance(
    specs: &[TubeSpec],
    x: &BundlePoint,
    y: &BundlePoint,
    pairs: Pairs,
) -> Result<f64, AnalysisError> {
    let mut total = 0.0;
    let mut weight = 1.0;
    for spec in specs {
        weight *= 0.5;
        total += weight * tube_pseudometric(spec, x, y, pairs)?.min(1.0);
    }
    Ok(total)
}

/// `|⦀Γ_X̃(f)⦀_α − ⦀Γ_X(f)⦀_α| / (⦀f⦀ ρ_α(X, X̃))`.
pub fn section_continuity(
    f: &SmoothControlData,
    plan: &GammaPlan,
    x: &Arc<BranchedRoughPath>,
    x2: &Arc<BranchedRoughPath>,
    pairs: Pairs,
) -> Result<Ratio, AnalysisError> {
    let a = gamma(x, f, plan)?.cp_norm(pairs);
    let b = gamma(x2, f, plan)?.cp_norm(pairs);
    Ok(Ratio::new((a - b).abs(), f.norm() * x.rp_distance(x2, pairs)?.max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::default_epsilon;
    use crate::rough_path::lift_piecewise_linear;
    use crate::math::sin;

    fn base(n: usize, shift: f64) -> Arc<BranchedRoughPath> {
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let vals = times.iter().map(|t| sin(5.0 * t) + shift * t).collect();
        Arc::new(lift_piecewise_linear(&GridPath::scalar(times, vals).unwrap(), 0.4).unwrap())
    }

    fn tube(x: &Arc<BranchedRoughPath>, radius: f64, epsilon: f64) -> TubeSpec {
        let plan = Arc::new(GammaPlan::for_path(x).unwrap());
        let f = SmoothControlData::zero(x, default_epsilon(0.4).unwrap()).unwrap();
        TubeSpec::new(f, plan, x.clone(), radius, epsilon).unwrap()
    }

    #[test]
    fn same_fiber_data_differs_only_by_the_base() {
        let x = base(16, 0.0);
        let y = base(16, 0.1);
        let p = BundlePoint::new(ControlledPath::constant(x.clone(), 1.0));
        let q = BundlePoint::new(ControlledPath::constant(y.clone(), 1.0));
        assert_eq!(flat_distance(&p, &p, Pairs::All).unwrap(), 0.0);
        let d = flat_distance(&p, &q, Pairs::All).unwrap();
        assert!((d - x.rp_distance(&y, Pairs::All).unwrap().max).abs() < 1e-12);
    }

    #[test]
    fn tube_membership_is_strict() {
        let x = base(8, 0.0);
        let spec = tube(&x, 0.5, 0.25);
        let zero = BundlePoint::new(ControlledPath::zero(x.clone()));
        assert!(tube_contains(&spec, &zero, Pairs::All).unwrap());
        let edge = BundlePoint::new(ControlledPath::constant(x.clone(), 0.25));
        let e = spec.evaluate(&edge, Pairs::All).unwrap();
        assert_eq!(e.section_distance, 0.25);
        assert!(!e.inside);
        let far = BundlePoint::new(ControlledPath::zero(base(8, 3.0)));
        assert!(!tube_contains(&spec, &far, Pairs::All).unwrap());
    }

    #[test]
    fn pseudometric_against_an_outside_point() {
        let x = base(8, 0.0);
        let spec = tube(&x, 0.5, 0.25);
        let inner = BundlePoint::new(ControlledPath::constant(x.clone(), 0.1));
        let outer = BundlePoint::new(ControlledPath::constant(x.clone(), 0.6));
        let d = tube_pseudometric(&spec, &inner, &outer, Pairs::All).unwrap();
        assert!((d - 0.5 * 0.15).abs() < 1e-15);
        let outer2 = BundlePoint::new(ControlledPath::constant(x.clone(), -0.9));
        assert_eq!(tube_pseudometric(&spec, &outer, &outer2, Pairs::All).unwrap(), 0.0);
        assert_eq!(truncated_ns_distance(&[], &inner, &outer, Pairs::All).unwrap(), 0.0);
        let single = truncated_ns_distance(&[spec], &inner, &outer, Pairs::All).unwrap();
        assert!((single - 0.5 * d).abs() < 1e-15);
    }

    #[test]
    fn radius_and_epsilon_must_lie_in_the_unit_interval() {
        let x = base(4, 0.0);
        let plan = Arc::new(GammaPlan::for_path(&x).unwrap());
        let f = SmoothControlData::zero(&x, 0.1).unwrap();
        assert!(TubeSpec::new(f.clone(), plan.clone(), x.clone(), 1.0, 0.5).is_err());
        assert!(TubeSpec::new(f, plan, x, 0.5, 0.0).is_err());
    }

    #[test]
    fn piecewise_linear_lifts_are_geometric() {
        let x = base(8, 0.0);
        assert!(is_piecewise_linear_lift(&x, 1e-12));
        let mut values = x.values().to_vec();
        values[3][2] += 0.5;
        let bent = BranchedRoughPath::from_values(0.4, x.table().clone(), x.times().to_vec(), values).unwrap();
        assert!(!is_piecewise_linear_lift(&bent, 1e-6));
    }
}
