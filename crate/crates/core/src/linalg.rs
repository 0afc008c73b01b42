//! Small dense linear-algebra helpers used throughout the workbench.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value threshold for rank decisions.
///
/// Structure constants and constraint matrices in this crate are built from
/// small integers, so the spectral gap between genuine null directions and
/// the rest is many orders of magnitude.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Numerical rank of a real matrix via singular values with a relative cutoff.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > RANK_REL_TOL * smax)
        .count()
}

/// Orthonormal basis of the nullspace of `m`, as columns of an `ncols x k`
/// matrix with `k = ncols - rank(m)`.
pub fn nullspace(m: &DMatrix<f64>) -> DMatrix<f64> {
    let ncols = m.ncols();
    if m.nrows() == 0 || ncols == 0 {
        return DMatrix::identity(ncols, ncols);
    }
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("svd with v_t requested");
    let smax = svd.singular_values.max();
    let rnk = if smax == 0.0 {
        0
    } else {
        svd.singular_values
            .iter()
            .filter(|&&s| s > RANK_REL_TOL * smax)
            .count()
    };

    // Rows rnk.. of V^T span kernel directions inside the row space of V^T.
    let mut basis: Vec<DVector<f64>> = (rnk..vt.nrows()).map(|r| vt.row(r).transpose()).collect();

    // The thin SVD returns only min(nrows, ncols) right-singular vectors; for
    // wide matrices complete the kernel with directions orthogonal to all of
    // them (Gram-Schmidt against the full V^T row set plus what we gathered).
    if vt.nrows() < ncols {
        let mut all: Vec<DVector<f64>> = (0..vt.nrows()).map(|r| vt.row(r).transpose()).collect();
        for j in 0..ncols {
            let mut v = DVector::zeros(ncols);
            v[j] = 1.0;
            for b in &all {
                let proj = b.dot(&v);
                v -= b * proj;
            }
            let norm = v.norm();
            if norm > 1e-8 {
                v /= norm;
                all.push(v.clone());
                basis.push(v);
            }
        }
    }

    let mut out = DMatrix::zeros(ncols, basis.len());
    for (j, c) in basis.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Condition number (2-norm) of a square matrix.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Moore-Penrose pseudoinverse of a full-column-rank real matrix.
pub fn pinv_full_column_rank(m: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = m.transpose() * m;
    let inv = gram
        .try_inverse()
        .expect("matrix must have full column rank");
    inv * m.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_wide_matrix() {
        // 1x3 matrix [1 1 1]: kernel is 2-dimensional.
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = nullspace(&m);
        assert_eq!(ns.ncols(), 2);
        for j in 0..ns.ncols() {
            let v = ns.column(j);
            assert!((v[0] + v[1] + v[2]).abs() < 1e-12);
        }
    }

    #[test]
    fn nullspace_of_full_rank() {
        let m = DMatrix::identity(3, 3);
        assert_eq!(nullspace(&m).ncols(), 0);
        assert_eq!(rank(&m), 3);
    }

    #[test]
    fn rank_of_rank_one() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 3.0, 6.0, 9.0]);
        assert_eq!(rank(&m), 1);
        assert_eq!(nullspace(&m).ncols(), 2);
    }

    #[test]
    fn pinv_recovers_left_inverse() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let p = pinv_full_column_rank(&m);
        let id = p * &m;
        assert!((id - DMatrix::identity(2, 2)).norm() < 1e-12);
    }
}
