mod common;

use std::sync::Arc;

use branched_core::approx::{
    approximate, convergence_study, default_epsilon, gamma, gamma_stability, glue,
    local_affine_data, smooth_approximation, Dissection, GammaPlan, SmoothControlData,
};
use branched_core::controlled::ControlledPath;
use branched_core::drivers::{oscillation, sampled};
use branched_core::fit::{spread, Ratio};
use branched_core::holder::Pairs;
use branched_core::rough_path::{lift_piecewise_linear, BranchedRoughPath, GridPath};
use branched_core::{AnalysisError, Label};

use common::sine;

fn lift(path: &GridPath, alpha: f64) -> Arc<BranchedRoughPath> {
    Arc::new(lift_piecewise_linear(path, alpha).unwrap())
}

fn smooth_path(n: usize) -> GridPath {
    sampled(n, 1.0, |t| (3.0 * t).sin() + 0.4 * t).unwrap()
}

fn data(x: &BranchedRoughPath, eps: f64) -> SmoothControlData {
    let mut f = SmoothControlData::zero(x, eps).unwrap();
    let times = x.times().to_vec();
    for (k, row) in f.values_mut().iter_mut().enumerate() {
        for (v, t) in row.iter_mut().zip(&times) {
            *v = 0.3 * (2.0 * t + k as f64).cos() + 0.1;
        }
    }
    f
}

#[test]
fn degree_two_gamma_is_a_riemann_sum_plus_data() {
    let alpha = 0.4;
    let x = lift(&smooth_path(50), alpha);
    let plan = GammaPlan::for_path(&x).unwrap();
    let f = data(&x, default_epsilon(alpha).unwrap());
    let g = gamma(&x, &f, &plan).unwrap();
    let node = x.table().index_of(&branched_core::Forest::node(Label::PLAIN)).unwrap();
    let (f0, f1) = (&f.values()[0], &f.values()[1]);
    let mut acc = 0.0;
    for i in 0..x.len() {
        assert!((g.component_idx(0)[i] - (f0[i] + acc)).abs() < 1e-13);
        assert_eq!(g.component_idx(1)[i], f1[i]);
        if i + 1 < x.len() {
            acc += f1[i] * x.step(i)[node];
        }
    }
}

#[test]
fn gamma_rejects_bad_epsilon() {
    let x = lift(&smooth_path(16), 0.3);
    let plan = GammaPlan::for_path(&x).unwrap();
    // 1 − Nα = 0.1
    let f = SmoothControlData::zero(&x, 0.2).unwrap();
    assert!(matches!(gamma(&x, &f, &plan), Err(AnalysisError::InvalidEpsilon { .. })));
    assert!(default_epsilon(0.5).is_err());
}

#[test]
fn stability_sweep_and_degenerate_cases() {
    let alpha = 0.3;
    let base = oscillation(256, 0.3, 1).unwrap().scaled(0.3);
    let x = lift(&base, alpha);
    let plan = GammaPlan::for_path(&x).unwrap();
    let eps = default_epsilon(alpha).unwrap();
    let f = data(&x, eps);
    assert_eq!(gamma_stability(&x, &x, &f, &plan, Pairs::All).unwrap(), Ratio::Degenerate);
    let zero = SmoothControlData::zero(&x, eps).unwrap();
    let y = lift(&base.scaled(1.1), alpha);
    assert_eq!(gamma(&y, &zero, &plan).unwrap().cp_norm(Pairs::All), 0.0);
    let ratios: Vec<Ratio> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&h| {
            let bumped: Vec<Vec<f64>> = base
                .values()
                .iter()
                .zip(base.times())
                .map(|(v, t)| vec![v[0] + h * (5.0 * t).sin()])
                .collect();
            let xh = lift(&GridPath::new(base.times().to_vec(), bumped).unwrap(), alpha);
            gamma_stability(&x, &xh, &f, &plan, Pairs::All).unwrap()
        })
        .collect();
    assert!(spread(&ratios).unwrap() < 10.0, "{ratios:?}");
}

#[test]
fn affine_pieces_and_gluing() {
    let alpha = 0.3;
    let x = lift(&oscillation(128, 0.3, 1).unwrap().scaled(0.3), alpha);
    let plan = GammaPlan::for_path(&x).unwrap();
    let eps = default_epsilon(alpha).unwrap();
    let z = ControlledPath::composition(x.clone(), Label::PLAIN, sine).unwrap();
    let (i0, i1) = (32, 64);
    let (f, piece) = local_affine_data(&z, i0, i1, &plan, eps).unwrap();
    assert_eq!(f.times().len(), i1 - i0 + 1);
    let last = piece.len() - 1;
    for k in 0..z.component_count() {
        for (a, b) in [(piece.component_idx(k)[0], z.component_idx(k)[i0]), (piece.component_idx(k)[last], z.component_idx(k)[i1])] {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        let r = z.remainder_idx(k, i0, i1);
        assert!((piece.remainder_idx(k, 0, last) - r).abs() <= 1e-10 * (1.0 + r.abs()));
    }
    assert!(matches!(local_affine_data(&z, 5, 5, &plan, eps), Err(AnalysisError::EmptyInterval)));

    let whole = local_affine_data(&z, 0, x.len() - 1, &plan, eps).unwrap().1;
    let single = glue(&x, std::slice::from_ref(&whole)).unwrap();
    assert_eq!(single.components(), whole.components());

    let d = Dissection::dyadic(x.len(), 3).unwrap();
    let approx = approximate(&z, &d, &plan, eps).unwrap();
    for &i in d.indices() {
        for k in 0..z.component_count() {
            let (a, b) = (approx.path.component_idx(k)[i], z.component_idx(k)[i]);
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }
    assert!(approx.path.cp_norm(Pairs::All).is_finite());
    assert!((approx.mesh - 1.0 / 8.0).abs() < 1e-15);
    assert!(Dissection::new(vec![0, 3, 3, x.len() - 1], x.len()).is_err());
}

#[test]
fn convergence_on_a_smooth_driver() {
    let alpha = 0.3;
    let x = lift(&smooth_path(256), alpha);
    let plan = GammaPlan::for_path(&x).unwrap();
    let eps = default_epsilon(alpha).unwrap();
    let z = ControlledPath::composition(x.clone(), Label::PLAIN, sine).unwrap();
    let beta = alpha / 2.0;
    let table = convergence_study(&z, beta, &[2, 3, 4, 5, 6], &plan, eps, Pairs::All).unwrap();
    assert!(table.nonincreasing(0.1), "{:?}", table.rows);
    assert!(table.fit.at_least(alpha - beta - 0.1), "{:?}", table.fit);
    assert!(matches!(
        convergence_study(&z, alpha, &[2, 3], &plan, eps, Pairs::All),
        Err(AnalysisError::InvalidBeta { .. })
    ));
    assert!(matches!(
        convergence_study(&z, beta, &[3], &plan, eps, Pairs::All),
        Err(AnalysisError::InsufficientScales { .. })
    ));
}

#[test]
fn smooth_approximation_workflow() {
    let alpha = 0.3;
    let base = oscillation(128, 0.3, 1).unwrap().scaled(0.3);
    let x = lift(&base, alpha);
    let plan = GammaPlan::for_path(&x).unwrap();
    let eps = default_epsilon(alpha).unwrap();
    let z = ControlledPath::composition(x.clone(), Label::PLAIN, sine).unwrap();
    let delta = 0.1;
    let drivers: Vec<Arc<BranchedRoughPath>> = [0.0, 1e-3, 1e-5]
        .iter()
        .map(|&e| {
            let vals = base
                .values()
                .iter()
                .zip(base.times())
                .map(|(v, t)| vec![v[0] + e * (11.0 * t).sin()])
                .collect();
            lift(&GridPath::new(base.times().to_vec(), vals).unwrap(), alpha)
        })
        .collect();
    let out = smooth_approximation(&z, &drivers, &plan, delta, alpha / 2.0, eps, Pairs::All).unwrap();
    assert_eq!(out.split, (delta / 2.0, delta / 2.0));
    assert!(out.first_error <= delta / 2.0);
    assert_eq!(out.results[0].1, 0.0);
    let certified = out.certified();
    assert!(certified[0] <= delta / 2.0);
    assert!(out.within_budget(2) && certified[2] <= delta);
    assert!(certified[2] <= certified[1]);

    // 96 = 3·2⁵ steps: the finest dyadic pieces still span three grid steps
    let coarse = lift(&oscillation(96, 0.3, 1).unwrap().scaled(0.3), alpha);
    let zc = ControlledPath::composition(coarse.clone(), Label::PLAIN, sine).unwrap();
    let plan = GammaPlan::for_path(&coarse).unwrap();
    let tight = smooth_approximation(&zc, &[coarse], &plan, 1e-6, alpha / 2.0, eps, Pairs::All);
    assert!(matches!(tight, Err(AnalysisError::BudgetUnattainable { .. })));
}
