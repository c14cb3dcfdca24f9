use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Multi-head features over one shared sample index, plus class labels.
///
/// Heads are held sample-major (`N × dim`, one sample per row), the layout of
/// the on-disk formats; [`FeatureDataset::head_columns`] produces the
/// `dim × n` column view the pipeline works in.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    heads: Vec<Matrix>,
    labels: Vec<i64>,
    class_index: BTreeMap<i64, Vec<usize>>,
    head_names: Vec<String>,
}

impl FeatureDataset {
    pub fn new(heads: Vec<Matrix>, labels: Vec<i64>, head_names: Vec<String>) -> Result<Self> {
        let first = heads.first().ok_or(Error::HeadCountMismatch {
            expected: 1,
            got: 0,
        })?;
        if head_names.len() != heads.len() {
            return Err(Error::HeadCountMismatch {
                expected: heads.len(),
                got: head_names.len(),
            });
        }
        for (h, m) in heads.iter().enumerate() {
            if m.rows() != labels.len() {
                return Err(Error::SampleCountMismatch(format!(
                    "head '{}' has {} samples, labels list {}",
                    head_names[h],
                    m.rows(),
                    labels.len()
                )));
            }
            if m.cols() != first.cols() {
                return Err(Error::HeadDimMismatch(format!(
                    "head '{}' has dimension {}, head '{}' has {}",
                    head_names[h],
                    m.cols(),
                    head_names[0],
                    first.cols()
                )));
            }
        }
        if labels.is_empty() {
            return Err(Error::SampleCountMismatch("dataset has no samples".into()));
        }
        let mut class_index: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &c) in labels.iter().enumerate() {
            class_index.entry(c).or_default().push(i);
        }
        Ok(Self {
            heads,
            labels,
            class_index,
            head_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_heads(&self) -> usize {
        self.heads.len()
    }

    pub fn dim(&self) -> usize {
        self.heads[0].cols()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn head_names(&self) -> &[String] {
        &self.head_names
    }

    /// Sample-major features of head `h`.
    pub fn head(&self, h: usize) -> &Matrix {
        &self.heads[h]
    }

    /// Class ids in ascending order.
    pub fn classes(&self) -> impl Iterator<Item = i64> + '_ {
        self.class_index.keys().copied()
    }

    pub fn n_classes(&self) -> usize {
        self.class_index.len()
    }

    pub fn class_samples(&self, class: i64) -> &[usize] {
        self.class_index.get(&class).map_or(&[], Vec::as_slice)
    }

    /// `dim × idx.len()` features of head `h`, one column per listed sample.
    pub fn head_columns(&self, h: usize, idx: &[usize]) -> Matrix {
        self.heads[h].select_rows(idx).transpose()
    }

    /// A dataset restricted to the listed heads, in the listed order.
    pub fn select_heads(&self, which: &[usize]) -> Result<Self> {
        if let Some(&bad) = which.iter().find(|&&h| h >= self.heads.len()) {
            return Err(Error::InvalidConfig(format!(
                "head {bad} requested from a {}-head dataset",
                self.heads.len()
            )));
        }
        Self::new(
            which.iter().map(|&h| self.heads[h].clone()).collect(),
            self.labels.clone(),
            which.iter().map(|&h| self.head_names[h].clone()).collect(),
        )
    }
}
