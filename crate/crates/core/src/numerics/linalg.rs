//! Dense factorizations: Cholesky solves, symmetric (generalized) eigenpairs
//! and truncated SVD.
//!
//! Eigen and singular vectors come out with a canonical sign: the entry of
//! largest magnitude is positive, ties resolved by the lowest index. Every
//! routine is a pure function of its inputs.

use nalgebra::{SymmetricEigen, SVD};

use super::Matrix;
use crate::error::{Error, Result};

/// Square-root-free Cholesky factorization `A = L D Lᵀ` with unit lower
/// triangular `L` and positive diagonal `D`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
    d: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        check_symmetric(a)?;
        let n = a.rows();
        let mut l = Matrix::identity(n);
        let mut d = vec![0.0; n];
        for j in 0..n {
            let mut dj = a[(j, j)];
            for k in 0..j {
                dj -= l[(j, k)] * l[(j, k)] * d[k];
            }
            if dj <= 0.0 || !dj.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    pivot: j,
                    value: dj,
                });
            }
            d[j] = dj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)] * d[k];
                }
                l[(i, j)] = s / dj;
            }
        }
        Ok(Self { l, d })
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.l.rows();
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * b[k];
            }
            b[i] = s;
        }
        for (bi, di) in b.iter_mut().zip(&self.d) {
            *bi /= di;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * b[k];
            }
            b[i] = s;
        }
    }
}

fn check_symmetric(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let tol = 1e-10 * a.max_abs().max(1.0);
    for i in 0..a.rows() {
        for j in i + 1..a.cols() {
            if (a[(i, j)] - a[(j, i)]).abs() > tol {
                return Err(Error::DimensionMismatch(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Solves `X · A = B` for `X` where `A` is symmetric positive definite.
///
/// `B` is `m × n` for an `n × n` system; each row of `X` is an independent
/// solve against the same Cholesky factor, so `A` is never inverted.
pub fn solve_spd(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() || b.cols() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve X·A = B with A {}x{} and B {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let chol = Cholesky::factor(a)?;
    let mut x = b.clone();
    for i in 0..x.rows() {
        chol.solve_in_place(x.row_mut(i));
    }
    Ok(x)
}

/// Eigenpairs sorted by ascending eigenvalue; `vectors` holds one eigenvector
/// per column.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// The `m` smallest eigenpairs of symmetric `a`, or of the generalized problem
/// `A v = λ D v` when a positive diagonal `mass` is given.
///
/// Generalized eigenvectors are `D`-orthonormal (`vᵀ D v = 1`).
pub fn sym_eig_smallest(a: &Matrix, mass: Option<&[f64]>, m: usize) -> Result<EigenPairs> {
    check_symmetric(a)?;
    let n = a.rows();
    if m == 0 || m > n {
        return Err(Error::DimensionMismatch(format!(
            "requested {m} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let inv_sqrt: Option<Vec<f64>> = match mass {
        None => None,
        Some(d) => {
            if d.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "mass diagonal has {} entries for a {n}x{n} matrix",
                    d.len()
                )));
            }
            if let Some((index, &value)) = d.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(Error::SingularMassMatrix { index, value });
            }
            Some(d.iter().map(|v| 1.0 / v.sqrt()).collect())
        }
    };

    // C = D^{-1/2} A D^{-1/2}, symmetrized exactly so the solver sees a
    // bit-symmetric input.
    let mut c = a.to_nalgebra();
    for i in 0..n {
        for j in i..n {
            let mut v = 0.5 * (a[(i, j)] + a[(j, i)]);
            if let Some(s) = &inv_sqrt {
                v *= s[i] * s[j];
            }
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(c);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[x]
            .total_cmp(&eig.eigenvalues[y])
            .then(x.cmp(&y))
    });

    let mut values = Vec::with_capacity(m);
    let mut vectors = Matrix::zeros(n, m);
    for (col, &k) in order.iter().take(m).enumerate() {
        values.push(eig.eigenvalues[k]);
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        if let Some(s) = &inv_sqrt {
            for (vi, si) in v.iter_mut().zip(s) {
                *vi *= si;
            }
        }
        canonical_sign(&mut v);
        for (i, vi) in v.into_iter().enumerate() {
            vectors[(i, col)] = vi;
        }
    }
    Ok(EigenPairs { values, vectors })
}

/// Leading singular triplets: `values` descending, `left` is `rows × m`,
/// `right` is `cols × m`.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub values: Vec<f64>,
    pub left: Matrix,
    pub right: Matrix,
}

/// Top-`m` singular triplets of `x`. The sign is fixed on the left vectors and
/// mirrored onto the right ones.
pub fn svd_top(x: &Matrix, m: usize) -> Result<TruncatedSvd> {
    let r = x.rows().min(x.cols());
    if m == 0 || m > r {
        return Err(Error::DimensionMismatch(format!(
            "requested {m} singular triplets of a {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    let svd = SVD::new(x.to_nalgebra(), true, true);
    let u = svd.u.expect("left vectors requested");
    let vt = svd.v_t.expect("right vectors requested");
    let sv = &svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));

    let mut values = Vec::with_capacity(m);
    let mut left = Matrix::zeros(x.rows(), m);
    let mut right = Matrix::zeros(x.cols(), m);
    for (col, &k) in order.iter().take(m).enumerate() {
        values.push(sv[k]);
        let mut uk: Vec<f64> = u.column(k).iter().copied().collect();
        let flip = canonical_sign(&mut uk);
        for (i, ui) in uk.into_iter().enumerate() {
            left[(i, col)] = ui;
        }
        for j in 0..x.cols() {
            let v = vt[(k, j)];
            right[(j, col)] = if flip { -v } else { v };
        }
    }
    Ok(TruncatedSvd {
        values,
        left,
        right,
    })
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is
/// positive. Returns whether a flip happened.
pub(crate) fn canonical_sign(v: &mut [f64]) -> bool {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
        true
    } else {
        false
    }
}
