//! Weighted concatenation of per-head features and the collaborative
//! classifier trained on it.

use crate::error::{Error, Result};
use crate::numerics::{Matrix, SimplexVector};
use crate::ridge::{predict_labels, predict_scores, ridge_fit, OneHotLabels, RidgeClassifier};

/// `Z`: head blocks `Ωʰ Pʰ` stacked vertically in head order, so row block
/// `h` spans rows `h·dim2 .. (h+1)·dim2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollaborativeFeatures {
    pub matrix: Matrix,
    pub head_weights: SimplexVector,
}

impl CollaborativeFeatures {
    pub fn n_samples(&self) -> usize {
        self.matrix.cols()
    }
}

pub fn collaborate(heads: &[Matrix], omega: &SimplexVector) -> Result<CollaborativeFeatures> {
    if heads.len() != omega.len() {
        return Err(Error::HeadCountMismatch {
            expected: omega.len(),
            got: heads.len(),
        });
    }
    let shape = heads[0].shape();
    if let Some(bad) = heads.iter().find(|p| p.shape() != shape) {
        return Err(Error::DimensionMismatch(format!(
            "head blocks of shape {:?} and {:?}",
            bad.shape(),
            shape
        )));
    }
    let scaled: Vec<Matrix> = heads
        .iter()
        .zip(omega.as_slice())
        .map(|(p, &w)| p.scale(w))
        .collect();
    let refs: Vec<&Matrix> = scaled.iter().collect();
    Ok(CollaborativeFeatures {
        matrix: Matrix::vcat(&refs)?,
        head_weights: omega.clone(),
    })
}

pub fn fit_collaborative(
    z: &CollaborativeFeatures,
    y: &OneHotLabels,
    mu: f64,
) -> Result<RidgeClassifier> {
    ridge_fit(&z.matrix, y, mu)
}

/// Raw scores and argmax labels for every column of `z`.
pub fn classify(clf: &RidgeClassifier, z: &CollaborativeFeatures) -> Result<(Matrix, Vec<usize>)> {
    let scores = predict_scores(clf, &z.matrix)?;
    let labels = predict_labels(&scores);
    Ok((scores, labels))
}
