use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// z-value of a two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

/// Per-episode accuracies with their mean and 95% confidence half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: serde_json::Value,
    pub per_episode: Vec<f64>,
    pub mean_accuracy: f64,
    pub ci95: f64,
    pub n_episodes: usize,
    pub elapsed_seconds: f64,
}

/// Mean and `1.96 · s / √E` with the sample standard deviation `s`. A single
/// episode has a zero-width interval.
///
/// Sums run over the sorted accuracies so the result does not depend on
/// episode order.
pub fn aggregate(accuracies: &[f64]) -> Result<RunSummary> {
    if accuracies.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut sorted = accuracies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let ci95 = if sorted.len() < 2 {
        0.0
    } else {
        let var = sorted.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1.0);
        Z_95 * var.sqrt() / n.sqrt()
    };
    Ok(RunSummary {
        config: serde_json::Value::Null,
        per_episode: accuracies.to_vec(),
        mean_accuracy: mean,
        ci95,
        n_episodes: accuracies.len(),
        elapsed_seconds: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance() {
        let s = aggregate(&[1.0, 1.0]).unwrap();
        assert_eq!(s.mean_accuracy, 1.0);
        assert_eq!(s.ci95, 0.0);
    }

    #[test]
    fn two_values() {
        let s = aggregate(&[0.5, 1.0]).unwrap();
        assert_eq!(s.mean_accuracy, 0.75);
        // s = 0.25·√2 = 0.353553…, 1.96·s/√2 = 0.49
        assert!((s.ci95 - 0.49).abs() < 1e-12);
    }

    #[test]
    fn order_invariant() {
        let a = [0.3, 0.91, 0.5, 0.77, 0.1, 0.64];
        let mut b = a;
        b.reverse();
        let (sa, sb) = (aggregate(&a).unwrap(), aggregate(&b).unwrap());
        assert_eq!(sa.mean_accuracy, sb.mean_accuracy);
        assert_eq!(sa.ci95, sb.ci95);
    }

    #[test]
    fn single_and_empty() {
        assert_eq!(aggregate(&[0.4]).unwrap().ci95, 0.0);
        assert!(matches!(aggregate(&[]), Err(Error::EmptyList)));
    }
}
