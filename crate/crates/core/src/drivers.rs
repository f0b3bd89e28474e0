//! Synthetic driving signals for experiments and tests.

use alloc::vec::Vec;

use crate::error::AnalysisError;
use crate::math::{floor, powf, sin};
use crate::rough_path::GridPath;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// `n + 1` equally spaced times on `[0, T]`.
pub fn uniform_times(n: usize, horizon: f64) -> Vec<f64> {
    (0..=n).map(|i| horizon * i as f64 / n as f64).collect()
}

/// Phases `2π·frac(k·φ)` from the golden ratio, one per octave.
pub fn golden_phases(count: usize, shift: usize) -> Vec<f64> {
    (0..count)
        .map(|k| {
            let x = (k + shift + 1) as f64 * GOLDEN;
            2.0 * core::f64::consts::PI * (x - floor(x))
        })
        .collect()
}

/// Frequency ratio between consecutive octaves. Irrational relative to 2 so
/// that no octave is periodic on dyadic blocks.
pub const OCTAVE_RATIO: f64 = 2.3;

/// `Σ_k b^{−kH} sin(b^k π t + φ_k)` with `b` = [`OCTAVE_RATIO`], truncated
/// after `phases.len()` octaves.
///
/// The truncation acts as a mollifier: above the last octave the signal is
/// smooth, below it the increments scale like `|t − s|^H`.
pub fn weierstrass(times: &[f64], hurst: f64, phases: &[f64]) -> Vec<f64> {
    times
        .iter()
        .map(|&t| {
            phases
                .iter()
                .enumerate()
                .map(|(k, ph)| {
                    let f = powf(OCTAVE_RATIO, k as f64);
                    sin(f * core::f64::consts::PI * t + ph) / powf(f, hurst)
                })
                .sum()
        })
        .collect()
}

/// Number of octaves resolved by `n` grid steps, keeping four points per
/// period of the fastest one.
pub fn octaves_for(n: usize) -> usize {
    let mut k = 0;
    while 2.0 * powf(OCTAVE_RATIO, k as f64) <= n as f64 {
        k += 1;
    }
    k
}

/// Mollified oscillation in `ℝ^d`: one Weierstrass signal per coordinate
/// with shifted phases, on `n` uniform steps of `[0, 1]`.
pub fn oscillation(n: usize, hurst: f64, d: usize) -> Result<GridPath, AnalysisError> {
    let times = uniform_times(n, 1.0);
    let octaves = octaves_for(n);
    let coords: Vec<Vec<f64>> = (0..d)
        .map(|c| weierstrass(&times, hurst, &golden_phases(octaves, 7 * c)))
        .collect();
    let values = (0..times.len())
        .map(|i| coords.iter().map(|c| c[i]).collect())
        .collect();
    GridPath::new(times, values)
}

/// A smooth scalar signal sampled on `n` uniform steps of `[0, T]`.
pub fn sampled(n: usize, horizon: f64, f: impl Fn(f64) -> f64) -> Result<GridPath, AnalysisError> {
    let times = uniform_times(n, horizon);
    let values = times.iter().map(|&t| f(t)).collect();
    GridPath::scalar(times, values)
}
