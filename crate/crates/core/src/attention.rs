//! Per-head combination weights from per-head ridge losses.
//!
//! Each head gets its own ridge classifier on the transformed support
//! features; its training objective value measures how well that head fits the
//! episode. The weights minimize `Σ Ωʰ Fʰ + η ‖Ω‖²` over the probability
//! simplex, which is exactly the Euclidean projection of `−F / (2η)` onto the
//! simplex.

use crate::error::{Error, Result};
use crate::numerics::{project_to_simplex, Matrix, SimplexVector};
use crate::ridge::{ridge_fit, ridge_loss, OneHotLabels};

/// Default weight regularizer.
pub const DEFAULT_ETA: f64 = 1.4;

#[derive(Debug, Clone, PartialEq)]
pub struct HeadLossVector {
    losses: Vec<f64>,
    eta: f64,
}

impl HeadLossVector {
    pub fn new(losses: Vec<f64>, eta: f64) -> Result<Self> {
        if losses.is_empty() {
            return Err(Error::EmptyVector);
        }
        if losses.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "head losses must be finite and nonnegative: {losses:?}"
            )));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eta must be positive, got {eta}"
            )));
        }
        Ok(Self { losses, eta })
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `Σ Ωʰ Fʰ + η ‖Ω‖²` at `omega`.
    pub fn objective(&self, omega: &[f64]) -> f64 {
        let linear: f64 = omega.iter().zip(&self.losses).map(|(w, f)| w * f).sum();
        let quad: f64 = omega.iter().map(|w| w * w).sum();
        linear + self.eta * quad
    }
}

/// Training loss of a ridge classifier fit on one head's support features.
pub fn head_loss(p_support: &Matrix, y_support: &OneHotLabels, mu: f64) -> Result<f64> {
    let clf = ridge_fit(p_support, y_support, mu)?;
    ridge_loss(&clf, p_support, y_support)
}

/// Exact minimizer of the weight objective over the simplex.
pub fn solve_weights(hl: &HeadLossVector) -> Result<SimplexVector> {
    let target: Vec<f64> = hl.losses.iter().map(|f| -f / (2.0 * hl.eta)).collect();
    project_to_simplex(&target)
}
