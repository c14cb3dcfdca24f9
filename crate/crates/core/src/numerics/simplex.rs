use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyVector);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "simplex weights must be finite and nonnegative: {weights:?}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "simplex weights sum to {sum}, not 1"
            )));
        }
        Ok(Self(weights))
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(Self(vec![1.0 / len as f64; len]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for SimplexVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexVector> for Vec<f64> {
    fn from(s: SimplexVector) -> Self {
        s.0
    }
}

/// Euclidean projection of `v` onto the probability simplex by sorting and
/// thresholding.
pub fn project_to_simplex(v: &[f64]) -> Result<SimplexVector> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig(
            "cannot project a non-finite vector".into(),
        ));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    // largest support size ρ with u_ρ − (Σ_{j≤ρ} u_j − 1)/ρ > 0
    let mut cumsum = 0.0;
    let mut support = 1;
    let mut support_sum = sorted[0];
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        if u - (cumsum - 1.0) / (j + 1) as f64 > 0.0 {
            support = j + 1;
            support_sum = cumsum;
        }
    }
    let tau = (support_sum - 1.0) / support as f64;
    let mut weights: Vec<f64> = v.iter().map(|x| (x - tau).max(0.0)).collect();
    if support == 1 {
        // a single active coordinate; pin it so the vertex is exact
        let top = sorted[0];
        for (w, x) in weights.iter_mut().zip(v) {
            *w = if *x == top && *w > 0.0 { 1.0 } else { 0.0 };
        }
    }
    Ok(SimplexVector(weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn already_feasible_is_fixed_point() {
        let w = project_to_simplex(&[0.3, 0.7]).unwrap();
        assert!((w.as_slice()[0] - 0.3).abs() < 1e-15);
        assert!((w.as_slice()[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn interior_and_clipped_cases() {
        // grid oracle values, see tests/oracles.rs
        let w = project_to_simplex(&[0.9, 0.5]).unwrap();
        assert!((w.as_slice()[0] - 0.7).abs() < 1e-12);
        assert!((w.as_slice()[1] - 0.3).abs() < 1e-12);
        let w = project_to_simplex(&[1.2, -0.5]).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(project_to_simplex(&[]), Err(Error::EmptyVector)));
        assert!(matches!(
            SimplexVector::new(vec![]),
            Err(Error::EmptyVector)
        ));
    }

    #[test]
    fn validation() {
        assert!(SimplexVector::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexVector::new(vec![0.6, 0.5]).is_err());
        assert!(SimplexVector::new(vec![1.5, -0.5]).is_err());
        let u = SimplexVector::uniform(4).unwrap();
        assert_eq!(u.as_slice(), &[0.25; 4]);
    }

    #[test]
    fn exact_vertex_on_large_gap() {
        let w = project_to_simplex(&[-5e5, -1e6, -7.5e5]).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0, 0.0]);
    }
}
