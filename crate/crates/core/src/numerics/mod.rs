//! Deterministic dense linear algebra shared by every pipeline stage.

mod knn;
mod linalg;
mod matrix;
mod simplex;

pub use knn::{knn_graph, knn_indices, pairwise_sq_distances, GRAPH_REGULARIZER};
pub use linalg::{solve_spd, svd_top, sym_eig_smallest, Cholesky, EigenPairs, TruncatedSvd};
pub use matrix::Matrix;
pub use simplex::{project_to_simplex, SimplexVector};
