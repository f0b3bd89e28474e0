use std::sync::Arc;

use branched_core::holder::Pairs;
use branched_core::literal::parse_forest;
use branched_core::rough_path::{degree_for, lift_piecewise_linear, BranchedRoughPath, GridPath};
use branched_core::AnalysisError;

fn linear(n: usize, v: f64, alpha: f64) -> BranchedRoughPath {
    let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let vals = times.iter().map(|t| v * t).collect();
    lift_piecewise_linear(&GridPath::scalar(times, vals).unwrap(), alpha).unwrap()
}

fn index(x: &BranchedRoughPath, lit: &str) -> usize {
    x.table().index_of(&parse_forest(lit).unwrap()).unwrap()
}

#[test]
fn linear_path_closed_forms() {
    let v = 1.7;
    let x = linear(10, v, 0.4);
    assert_eq!(x.degree(), 2);
    let (node, cherry, ladder) = (index(&x, "[]"), index(&x, "[][]"), index(&x, "[[]]"));
    for (i, t) in x.times().iter().enumerate() {
        let row = x.value_at(i);
        assert!((row[node] - v * t).abs() < 1e-14);
        assert!((row[cherry] - v * v * t * t).abs() < 1e-13);
        assert!((row[ladder] - v * v * t * t / 2.0).abs() < 1e-13);
    }
    let unit = linear(10, 1.0, 0.4);
    let inc = unit.increment(0.3, 0.9).unwrap();
    assert!((inc[ladder] - 0.6f64.powi(2) / 2.0).abs() < 1e-13);
}

#[test]
fn zero_path_is_the_counit() {
    let x = linear(6, 0.0, 0.3);
    for row in x.values() {
        assert_eq!(row[0], 1.0);
        assert!(row[1..].iter().all(|v| *v == 0.0));
    }
    assert_eq!(x.chen_defect(1), 0.0);
    assert_eq!(x.holder_norm(Pairs::All), 0.0);
}

#[test]
fn two_segments_concatenate_exactly() {
    let times = vec![0.0, 0.4, 1.0];
    let values = vec![vec![0.0, 0.0], vec![0.8, -0.2], vec![0.5, 0.9]];
    let x = lift_piecewise_linear(&GridPath::new(times, values).unwrap(), 0.3).unwrap();
    let full = x.increment_idx(0, 2);
    let direct = x.value_at(2);
    let scale = direct.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (a, b) in full.iter().zip(direct) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
    assert!(x.chen_defect(1) <= 1e-12 * scale);
}

#[test]
fn corrupted_value_is_detected() {
    let x = linear(12, 1.0, 0.3);
    let mut values = x.values().to_vec();
    let ladder = index(&x, "[[]]");
    values[5][ladder] += 1e-2;
    let bent =
        BranchedRoughPath::from_values(0.3, x.table().clone(), x.times().to_vec(), values).unwrap();
    assert!(bent.chen_defect(1) > 1e-3);
}

#[test]
fn holder_norm_of_a_line() {
    let v = -2.5;
    let alpha = 0.4;
    let x = linear(16, v, alpha);
    let report = x.rp_distance(&linear(16, 0.0, alpha), Pairs::All).unwrap();
    let node = &report.entries[0];
    assert_eq!(node.0, parse_forest("[]").unwrap());
    assert!((node.1 - v.abs()).abs() < 1e-12);
    assert_eq!(report.max, report.entries.iter().map(|e| e.1).fold(0.0, f64::max));
    assert_eq!(x.rp_distance(&x, Pairs::All).unwrap().max, 0.0);
}

#[test]
fn mismatched_grids_and_bad_alpha() {
    let a = linear(8, 1.0, 0.3);
    let b = linear(9, 1.0, 0.3);
    assert!(matches!(a.rp_distance(&b, Pairs::All), Err(AnalysisError::GridMismatch)));
    assert!(matches!(degree_for(0.5), Err(AnalysisError::InvalidAlpha(_))));
    assert!(matches!(degree_for(0.25), Err(AnalysisError::InvalidAlpha(_))));
    assert!(degree_for(0.1).is_err());
    assert_eq!(degree_for(0.3).unwrap(), 3);
}

#[test]
fn primitive_paths_start_at_zero_and_reproduce_increments() {
    let times: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let vals = times.iter().map(|t| (3.0 * t).sin()).collect();
    let x = Arc::new(lift_piecewise_linear(&GridPath::scalar(times, vals).unwrap(), 0.3).unwrap());
    // [][] − 2[[]] is primitive
    let p = [(index(&x, "[][]"), 1.0), (index(&x, "[[]]"), -2.0)];
    let gamma = x.primitive_path(&p);
    assert_eq!(gamma[0], 0.0);
    for (i, j) in [(0, 7), (3, 11), (12, 20)] {
        let inc = x.increment_idx(i, j);
        let direct: f64 = p.iter().map(|&(k, c)| c * inc[k]).sum();
        assert!((direct - (gamma[j] - gamma[i])).abs() < 1e-12);
    }
}
