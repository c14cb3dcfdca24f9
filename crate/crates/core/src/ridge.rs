//! Closed-form ridge regression classifier over one-hot targets.
//!
//! Features are column-major in the mathematical sense: `X` is `dim × N` with
//! one sample per column, and the fitted `W` is `C × dim`. Fitting solves the
//! primal normal equations `W (X Xᵀ + μ I) = Y Xᵀ`; the dual `N × N` form is
//! algebraically identical but unnecessary at the reduced dimensions used
//! here.

use crate::error::{Error, Result};
use crate::numerics::{solve_spd, Matrix};

/// Class labels in `0..n_classes`, viewed as a `C × N` one-hot matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneHotLabels {
    n_classes: usize,
    labels: Vec<usize>,
}

impl OneHotLabels {
    pub fn new(labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::DimensionMismatch(format!(
                "label {bad} out of range for {n_classes} classes"
            )));
        }
        Ok(Self { n_classes, labels })
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Appends one sample's label.
    pub fn push(&mut self, label: usize) -> Result<()> {
        if label >= self.n_classes {
            return Err(Error::DimensionMismatch(format!(
                "label {label} out of range for {} classes",
                self.n_classes
            )));
        }
        self.labels.push(label);
        Ok(())
    }

    pub fn matrix(&self) -> Matrix {
        let mut y = Matrix::zeros(self.n_classes, self.labels.len());
        for (n, &c) in self.labels.iter().enumerate() {
            y[(c, n)] = 1.0;
        }
        y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeClassifier {
    weights: Matrix,
    mu: f64,
}

impl RidgeClassifier {
    pub fn new(weights: Matrix, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self { weights, mu })
    }

    /// `C × dim` weight matrix.
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n_classes(&self) -> usize {
        self.weights.rows()
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveMu(mu))
    }
}

fn check_samples(x: &Matrix, y: &OneHotLabels) -> Result<()> {
    if x.cols() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature columns but {} labels",
            x.cols(),
            y.len()
        )));
    }
    Ok(())
}

/// `W = Y Xᵀ (X Xᵀ + μ I)⁻¹`, computed through a Cholesky solve.
pub fn ridge_fit(x: &Matrix, y: &OneHotLabels, mu: f64) -> Result<RidgeClassifier> {
    check_mu(mu)?;
    check_samples(x, y)?;
    if y.is_empty() {
        return Err(Error::DimensionMismatch(
            "cannot fit on zero samples".into(),
        ));
    }
    let dim = x.rows();
    let mut gram = x.gram_rows();
    for i in 0..dim {
        gram[(i, i)] += mu;
    }
    // Y Xᵀ: row c sums the feature columns labelled c
    let mut rhs = Matrix::zeros(y.n_classes(), dim);
    for (n, &c) in y.labels().iter().enumerate() {
        for j in 0..dim {
            rhs[(c, j)] += x[(j, n)];
        }
    }
    let weights = solve_spd(&gram, &rhs)?;
    Ok(RidgeClassifier { weights, mu })
}

/// `‖Y − W X‖_F² + μ ‖W‖_F²`.
pub fn ridge_loss(clf: &RidgeClassifier, x: &Matrix, y: &OneHotLabels) -> Result<f64> {
    check_samples(x, y)?;
    if y.n_classes() != clf.n_classes() {
        return Err(Error::DimensionMismatch(format!(
            "{} label classes for a {}-class classifier",
            y.n_classes(),
            clf.n_classes()
        )));
    }
    let residual = y.matrix().sub(&predict_scores(clf, x)?)?;
    Ok(residual.frobenius_norm_sq() + clf.mu * clf.weights.frobenius_norm_sq())
}

/// Raw class scores `W X`, one column per sample.
pub fn predict_scores(clf: &RidgeClassifier, x: &Matrix) -> Result<Matrix> {
    if x.rows() != clf.weights.cols() {
        return Err(Error::DimensionMismatch(format!(
            "classifier expects dimension {}, features have {}",
            clf.weights.cols(),
            x.rows()
        )));
    }
    clf.weights.matmul(x)
}

/// Column-wise argmax; ties go to the lowest class index.
pub fn predict_labels(scores: &Matrix) -> Vec<usize> {
    (0..scores.cols())
        .map(|n| {
            let mut best = 0;
            for c in 1..scores.rows() {
                if scores[(c, n)] > scores[(best, n)] {
                    best = c;
                }
            }
            best
        })
        .collect()
}
