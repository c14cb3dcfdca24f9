//! Joint dimension reduction of multi-head features.
//!
//! The `H` heads of an episode are stacked side by side, treating every
//! (sample, head) pair as its own point, and a single embedding is fit over
//! the whole expansion. Splitting the embedding back by head yields per-head
//! features that live in one shared space.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    knn_graph, knn_indices, svd_top, sym_eig_smallest, Cholesky, EigenPairs, Matrix,
};

/// Largest accepted generalized-eigen residual for a retained Laplacian
/// eigenmap pair.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-6;

/// Local Gram regularization for locally linear embedding, relative to the
/// Gram trace.
pub const LLE_REGULARIZATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceMethod {
    /// Raw features, no transformation.
    None,
    Pca,
    Lle,
    Le,
}

impl SubspaceMethod {
    pub const ALL: [SubspaceMethod; 4] = [Self::None, Self::Pca, Self::Lle, Self::Le];

    fn uses_neighbors(self) -> bool {
        matches!(self, Self::Lle | Self::Le)
    }
}

impl fmt::Display for SubspaceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Pca => "pca",
            Self::Lle => "lle",
            Self::Le => "le",
        })
    }
}

impl FromStr for SubspaceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "pca" => Ok(Self::Pca),
            "lle" => Ok(Self::Lle),
            "le" => Ok(Self::Le),
            other => Err(Error::InvalidConfig(format!(
                "unknown subspace method '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceConfig {
    pub method: SubspaceMethod,
    pub dim2: usize,
    /// Neighborhood size for LE/LLE; `None` picks [`default_k_neighbors`].
    pub k_neighbors: Option<usize>,
}

impl Default for SubspaceConfig {
    fn default() -> Self {
        Self {
            method: SubspaceMethod::Le,
            dim2: 5,
            k_neighbors: None,
        }
    }
}

/// `max(2, ⌊points / 10⌋)`.
pub fn default_k_neighbors(points: usize) -> usize {
    (points / 10).max(2)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitData {
    Identity,
    /// Column mean of the expansion and the `dim1 × dim2` principal axes.
    Pca {
        mean: Vec<f64>,
        components: Matrix,
        singular_values: Vec<f64>,
    },
    /// Spectral methods are fit-transform only; the eigenvalues of the
    /// retained coordinates are kept for inspection.
    Spectral {
        eigenvalues: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceModel {
    pub method: SubspaceMethod,
    pub dim2: usize,
    pub k_neighbors: Option<usize>,
    pub fit: FitData,
}

/// `[X¹ | X² | … | X^H]`: column `h·N + n` is sample `n` seen by head `h`.
pub fn expand_heads(heads: &[Matrix]) -> Result<Matrix> {
    let first = heads.first().ok_or(Error::HeadCountMismatch {
        expected: 1,
        got: 0,
    })?;
    for (h, m) in heads.iter().enumerate() {
        if m.rows() != first.rows() {
            return Err(Error::HeadDimMismatch(format!(
                "head {h} has dimension {}, head 0 has {}",
                m.rows(),
                first.rows()
            )));
        }
        if m.cols() != first.cols() {
            return Err(Error::DimensionMismatch(format!(
                "head {h} has {} samples, head 0 has {}",
                m.cols(),
                first.cols()
            )));
        }
    }
    let refs: Vec<&Matrix> = heads.iter().collect();
    Matrix::hcat(&refs)
}

/// Inverse of [`expand_heads`]'s column layout.
pub fn split_heads(expanded: &Matrix, n_heads: usize, n_samples: usize) -> Result<Vec<Matrix>> {
    if n_heads == 0 || expanded.cols() != n_heads * n_samples {
        return Err(Error::DimensionMismatch(format!(
            "{} columns cannot split into {n_heads} heads of {n_samples}",
            expanded.cols()
        )));
    }
    Ok((0..n_heads)
        .map(|h| {
            let idx: Vec<usize> = (h * n_samples..(h + 1) * n_samples).collect();
            expanded.select_columns(&idx)
        })
        .collect())
}

/// Fits the configured method on the columns of `expanded` (`dim1 × M`) and
/// returns the `dim2 × M` embedding. With [`SubspaceMethod::None`] the input
/// is returned unchanged.
pub fn fit_transform(expanded: &Matrix, cfg: &SubspaceConfig) -> Result<(SubspaceModel, Matrix)> {
    let (dim1, points) = expanded.shape();
    if cfg.method == SubspaceMethod::None {
        let model = SubspaceModel {
            method: cfg.method,
            dim2: dim1,
            k_neighbors: None,
            fit: FitData::Identity,
        };
        return Ok((model, expanded.clone()));
    }
    if cfg.dim2 == 0 || cfg.dim2 >= dim1 {
        return Err(Error::InvalidConfig(format!(
            "target dimension {} must be in 1..{dim1}",
            cfg.dim2
        )));
    }
    if cfg.dim2 >= points {
        return Err(Error::TooFewPoints {
            needed: cfg.dim2,
            got: points,
        });
    }
    let k = cfg.method.uses_neighbors().then(|| {
        cfg.k_neighbors
            .unwrap_or_else(|| default_k_neighbors(points))
    });
    if let Some(k) = k {
        if k == 0 || k >= points {
            return Err(Error::TooFewPoints {
                needed: k,
                got: points,
            });
        }
    }

    let samples = expanded.transpose();
    let (fit, embedding) = match cfg.method {
        SubspaceMethod::Pca => pca(&samples, cfg.dim2)?,
        SubspaceMethod::Le => laplacian_eigenmap(&samples, cfg.dim2, k.unwrap_or_default())?,
        SubspaceMethod::Lle => locally_linear(&samples, cfg.dim2, k.unwrap_or_default())?,
        SubspaceMethod::None => unreachable!(),
    };
    let model = SubspaceModel {
        method: cfg.method,
        dim2: cfg.dim2,
        k_neighbors: k,
        fit,
    };
    Ok((model, embedding))
}

/// `samples` is `M × dim1`, one point per row.
fn pca(samples: &Matrix, dim2: usize) -> Result<(FitData, Matrix)> {
    let (m, d) = samples.shape();
    let mut mean = vec![0.0; d];
    for i in 0..m {
        for (acc, v) in mean.iter_mut().zip(samples.row(i)) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);
    let centered = Matrix::from_fn(m, d, |i, j| samples[(i, j)] - mean[j]);
    let svd = svd_top(&centered, dim2)?;
    // scores U Σ, written dim2 × M
    let embedding = Matrix::from_fn(dim2, m, |r, i| svd.left[(i, r)] * svd.values[r]);
    let fit = FitData::Pca {
        mean,
        components: svd.right,
        singular_values: svd.values,
    };
    Ok((fit, embedding))
}

fn laplacian_eigenmap(samples: &Matrix, dim2: usize, k: usize) -> Result<(FitData, Matrix)> {
    let m = samples.rows();
    let adj = knn_graph(samples, k)?;
    let degree: Vec<f64> = (0..m).map(|i| adj.row(i).iter().sum()).collect();
    let laplacian = Matrix::from_fn(m, m, |i, j| {
        if i == j {
            degree[i] - adj[(i, j)]
        } else {
            -adj[(i, j)]
        }
    });
    let pairs = sym_eig_smallest(&laplacian, Some(&degree), dim2 + 1)?;
    check_generalized_residuals(&laplacian, &degree, &pairs)?;
    Ok(drop_trivial(pairs, dim2))
}

fn check_generalized_residuals(a: &Matrix, mass: &[f64], pairs: &EigenPairs) -> Result<()> {
    let n = a.rows();
    for (col, &lambda) in pairs.values.iter().enumerate().skip(1) {
        let v = pairs.vectors.column(col);
        let residual = (0..n)
            .map(|i| {
                let av: f64 = a.row(i).iter().zip(&v).map(|(x, y)| x * y).sum();
                let r = av - lambda * mass[i] * v[i];
                r * r
            })
            .sum::<f64>()
            .sqrt();
        if !(residual <= EIGEN_RESIDUAL_TOLERANCE) {
            return Err(Error::EigensolverFailure {
                residual,
                tolerance: EIGEN_RESIDUAL_TOLERANCE,
            });
        }
    }
    Ok(())
}

/// Discards the bottom (constant) eigenvector and lays the next `dim2` out as
/// embedding rows.
fn drop_trivial(pairs: EigenPairs, dim2: usize) -> (FitData, Matrix) {
    let m = pairs.vectors.rows();
    let embedding = Matrix::from_fn(dim2, m, |r, i| pairs.vectors[(i, r + 1)]);
    let eigenvalues = pairs.values[1..].to_vec();
    (FitData::Spectral { eigenvalues }, embedding)
}

fn locally_linear(samples: &Matrix, dim2: usize, k: usize) -> Result<(FitData, Matrix)> {
    let (m, d) = samples.shape();
    let neighbors = knn_indices(samples, k)?;

    // I − W, row i holding the reconstruction of point i from its neighbors
    let mut iw = Matrix::identity(m);
    for (i, nbrs) in neighbors.iter().enumerate() {
        let diffs = Matrix::from_fn(k, d, |a, j| samples[(nbrs[a], j)] - samples[(i, j)]);
        let mut gram = diffs.gram_rows();
        let trace: f64 = (0..k).map(|a| gram[(a, a)]).sum();
        let reg = if trace > 0.0 {
            LLE_REGULARIZATION * trace
        } else {
            LLE_REGULARIZATION
        };
        for a in 0..k {
            gram[(a, a)] += reg;
        }
        let mut w = vec![1.0; k];
        Cholesky::factor(&gram)?.solve_in_place(&mut w);
        let total: f64 = w.iter().sum();
        for (a, &j) in nbrs.iter().enumerate() {
            iw[(i, j)] -= w[a] / total;
        }
    }
    let cost = iw.transpose().matmul(&iw)?;
    let cost = Matrix::from_fn(m, m, |i, j| 0.5 * (cost[(i, j)] + cost[(j, i)]));
    let pairs = sym_eig_smallest(&cost, None, dim2 + 1)?;
    Ok(drop_trivial(pairs, dim2))
}
