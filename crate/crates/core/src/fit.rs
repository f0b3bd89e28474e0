//! Least-squares rate fits.

use alloc::vec::Vec;

use crate::error::AnalysisError;
use crate::math::ln;

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Outcome of a log-log rate fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateFit {
    /// Fitted exponent of `y ≈ C xᵏ`.
    Slope(f64),
    /// Every `y` vanished, so there is nothing to fit.
    Exact,
}

impl RateFit {
    /// Whether the fit clears `threshold`; an exact result always does.
    pub fn at_least(self, threshold: f64) -> bool {
        match self {
            RateFit::Slope(s) => s >= threshold,
            RateFit::Exact => true,
        }
    }

    pub fn slope(self) -> Option<f64> {
        match self {
            RateFit::Slope(s) => Some(s),
            RateFit::Exact => None,
        }
    }
}

/// A quotient whose denominator may vanish.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ratio {
    Value(f64),
    /// Numerator and denominator are both (numerically) zero.
    Degenerate,
    /// Only the denominator vanished.
    Unbounded,
}

impl Ratio {
    pub fn new(num: f64, den: f64) -> Self {
        const TINY: f64 = 1e-300;
        if den.abs() <= TINY {
            if num.abs() <= TINY {
                Ratio::Degenerate
            } else {
                Ratio::Unbounded
            }
        } else {
            Ratio::Value(num / den)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// Largest over smallest entry; `None` if any entry is not a finite positive value.
pub fn spread(ratios: &[Ratio]) -> Option<f64> {
    let vals: Option<Vec<f64>> = ratios
        .iter()
        .map(|r| r.value().filter(|v| v.is_finite() && *v > 0.0))
        .collect();
    let vals = vals?;
    let max = vals.iter().copied().fold(f64::MIN, f64::max);
    let min = vals.iter().copied().fold(f64::MAX, f64::min);
    (!vals.is_empty()).then(|| max / min)
}

/// Fits `log y` against `log x`. Points with `y = 0` are dropped; if all are
/// zero the result is [`RateFit::Exact`].
pub fn loglog_fit(points: &[(f64, f64)], needed: usize) -> Result<RateFit, AnalysisError> {
    if points.len() < needed {
        return Err(AnalysisError::InsufficientScales {
            needed,
            got: points.len(),
        });
    }
    let scale = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(RateFit::Exact);
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 1e-300)
        .map(|&(x, y)| (ln(x), ln(y)))
        .collect();
    if logs.len() < 2 {
        return Err(AnalysisError::InsufficientScales {
            needed,
            got: logs.len(),
        });
    }
    Ok(RateFit::Slope(linear_fit(&logs).0))
}
