//! Discrete Hölder seminorms on time grids.

use crate::math::powf;

/// Which grid pairs `(s, t)` a Hölder supremum ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Pairs {
    /// Every pair of grid points.
    #[default]
    All,
    /// Pairs whose index distance is a power of two; cheaper on long grids.
    Dyadic,
}

impl Pairs {
    /// Calls `visit(i, j)` for every selected pair `i < j` below `n`.
    pub fn for_each(self, n: usize, mut visit: impl FnMut(usize, usize)) {
        for i in 0..n {
            match self {
                Pairs::All => {
                    for j in i + 1..n {
                        visit(i, j);
                    }
                }
                Pairs::Dyadic => {
                    let mut step = 1;
                    while i + step < n {
                        visit(i, i + step);
                        step *= 2;
                    }
                }
            }
        }
    }
}

/// `sup_{s<t} |f_t − f_s| / |t − s|^γ` for a one-parameter grid function.
pub fn holder_seminorm(times: &[f64], values: &[f64], gamma: f64) -> f64 {
    let mut best = 0.0f64;
    Pairs::All.for_each(times.len(), |i, j| {
        let q = (values[j] - values[i]).abs() / powf(times[j] - times[i], gamma);
        best = best.max(q);
    });
    best
}
