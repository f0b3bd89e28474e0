#![allow(dead_code)]

use std::collections::BTreeSet;

use branched_core::poly::PolyVectorField;

/// Counts unlabelled forests with `n` nodes by brute force: every node picks a
/// parent among the earlier nodes or none, and forests are identified through
/// a canonical string built bottom-up.
pub fn brute_force_forest_count(n: usize) -> usize {
    let mut seen = BTreeSet::new();
    let mut parents = vec![0usize; n];
    loop {
        seen.insert(canonical(&parents));
        // odometer: node i ranges over 0..=i, where 0 means "root" and j+1 means node j
        let mut i = 0;
        loop {
            if i == n {
                return seen.len().max(1);
            }
            if parents[i] < i {
                parents[i] += 1;
                break;
            }
            parents[i] = 0;
            i += 1;
        }
    }
}

fn canonical(parents: &[usize]) -> String {
    fn encode(node: usize, parents: &[usize]) -> String {
        let mut kids: Vec<String> = (0..parents.len())
            .filter(|&c| parents[c] == node + 1)
            .map(|c| encode(c, parents))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    let mut roots: Vec<String> = (0..parents.len())
        .filter(|&c| parents[c] == 0)
        .map(|c| encode(c, parents))
        .collect();
    roots.sort();
    roots.concat()
}

/// Classical RK4 for `dy = Σ_i f_i(y) dx^i` along the piecewise-linear path
/// through `path`, with `sub` substeps per segment.
pub fn rk4_along(field: &PolyVectorField, path: &[Vec<f64>], y0: &[f64], sub: usize) -> Vec<f64> {
    let rhs = |y: &[f64], dx: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; y.len()];
        for (i, d) in dx.iter().enumerate() {
            for (c, p) in field.field(i).iter().enumerate() {
                out[c] += p.eval(y) * d;
            }
        }
        out
    };
    let shift = |y: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(a, b)| a + h * b).collect()
    };
    let mut y = y0.to_vec();
    for w in path.windows(2) {
        let dx: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| (a - b) / sub as f64).collect();
        for _ in 0..sub {
            let k1 = rhs(&y, &dx);
            let k2 = rhs(&shift(&y, &k1, 0.5), &dx);
            let k3 = rhs(&shift(&y, &k2, 0.5), &dx);
            let k4 = rhs(&shift(&y, &k3, 1.0), &dx);
            for c in 0..y.len() {
                y[c] += (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
            }
        }
    }
    y
}

/// `sin` and its derivatives.
pub fn sine(v: f64, k: usize) -> f64 {
    match k % 4 {
        0 => v.sin(),
        1 => v.cos(),
        2 => -v.sin(),
        _ => -v.cos(),
    }
}

pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max / min
}
