use super::Matrix;
use crate::error::{Error, Result};

/// Off-diagonal weight added to every pair so the graph is always connected.
pub const GRAPH_REGULARIZER: f64 = 1e-8;

/// Squared Euclidean distances between the rows of `points`.
pub fn pairwise_sq_distances(points: &Matrix) -> Matrix {
    let n = points.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = points
                .row(i)
                .iter()
                .zip(points.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// The `k` nearest other rows of every row, nearest first. Equal distances go
/// to the lower point index.
pub fn knn_indices(points: &Matrix, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = points.rows();
    if k == 0 || k >= n {
        return Err(Error::TooFewPoints { needed: k, got: n });
    }
    let dist = pairwise_sq_distances(points);
    Ok((0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| dist[(i, a)].total_cmp(&dist[(i, b)]).then(a.cmp(&b)));
            others.truncate(k);
            others
        })
        .collect())
}

/// Binary k-nearest-neighbor adjacency over the rows of `points`, symmetrized
/// by union, with [`GRAPH_REGULARIZER`] added to every off-diagonal entry.
pub fn knn_graph(points: &Matrix, k: usize) -> Result<Matrix> {
    let n = points.rows();
    let neighbors = knn_indices(points, k)?;
    let mut adj = Matrix::zeros(n, n);
    for (i, list) in neighbors.iter().enumerate() {
        for &j in list {
            adj[(i, j)] = 1.0;
            adj[(j, i)] = 1.0;
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                adj[(i, j)] += GRAPH_REGULARIZER;
            }
        }
    }
    Ok(adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(adj: &Matrix) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for i in 0..adj.rows() {
            for j in i + 1..adj.cols() {
                if adj[(i, j)] > 0.5 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn collinear_points() {
        // distances by hand: d(0,1) = d(1,2) = 1, d(0,2) = 2; point 1 breaks
        // its tie toward point 0, point 2 lists point 1.
        let p = Matrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        let adj = knn_graph(&p, 1).unwrap();
        assert_eq!(edges(&adj), vec![(0, 1), (1, 2)]);
        assert_eq!(adj[(0, 2)], GRAPH_REGULARIZER);
        assert_eq!(adj[(1, 1)], 0.0);
        assert_eq!(adj, adj.transpose());
    }

    #[test]
    fn full_neighborhood_is_complete() {
        let p = Matrix::from_rows(&[[0.0, 1.0], [3.0, 1.0], [-2.0, 5.0], [0.5, 0.5]]).unwrap();
        let adj = knn_graph(&p, 3).unwrap();
        assert_eq!(edges(&adj).len(), 6);
    }

    #[test]
    fn duplicates_are_mutual_neighbors() {
        let p = Matrix::from_rows(&[[4.0, 4.0], [1.0, 1.0], [1.0, 1.0]]).unwrap();
        let nn = knn_indices(&p, 1).unwrap();
        assert_eq!(nn[1], vec![2]);
        assert_eq!(nn[2], vec![1]);
    }

    #[test]
    fn rejects_k_not_below_n() {
        let p = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(matches!(knn_graph(&p, 2), Err(Error::TooFewPoints { .. })));
        assert!(knn_graph(&p, 0).is_err());
    }
}
