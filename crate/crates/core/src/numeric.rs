//! Complex double-precision linear algebra helpers on top of nalgebra.
//!
//! Rank and kernel decisions use a relative singular-value threshold; the
//! exact layer in [`crate::exact`] is preferred whenever data is rational.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Numeric rank: singular values above `rel_tol` times the largest.
pub fn svd_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Orthonormal basis of the right kernel (singular vectors below threshold).
///
/// Wide matrices are padded with zero rows first: the thin SVD of a wide
/// matrix does not carry the kernel directions beyond min(rows, cols).
pub fn nullspace(m: &CMatrix, rel_tol: f64) -> Vec<CVector> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let work = if rows < cols {
        let mut padded = CMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let sv = &svd.singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let mut basis = Vec::new();
    for i in 0..v_t.nrows() {
        if top == 0.0 || sv[i] <= rel_tol * top {
            // row i of V^H, conjugated, is column i of V
            basis.push(v_t.row(i).map(|z| z.conj()).transpose());
        }
    }
    basis
}

/// Least-squares solution of `A x = b` with the relative residual
/// `‖Ax − b‖ / max(‖b‖, 1e-300)`.
pub fn lstsq(a: &CMatrix, b: &CVector, rel_tol: f64) -> (CVector, f64) {
    let svd = a.clone().svd(true, true);
    let sv_top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = rel_tol * sv_top.max(1e-300);
    let x = svd.solve(b, eps).expect("svd requested");
    let resid = (a * &x - b).norm();
    let rel = resid / b.norm().max(1e-300);
    (x, rel)
}

pub fn determinant(m: &CMatrix) -> Complex64 {
    m.clone().lu().determinant()
}

/// 2-norm condition number (largest over smallest singular value).
pub fn cond(m: &CMatrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let bot = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if bot == 0.0 {
        f64::INFINITY
    } else {
        top / bot
    }
}

pub fn solve_square(m: &CMatrix, rhs: &CMatrix) -> Option<CMatrix> {
    m.clone().lu().solve(rhs)
}

pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().try_inverse()
}

/// Eigenvalues of a complex square matrix via Schur decomposition, falling
/// back to characteristic-polynomial roots if iteration stalls.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if m.nrows() == 1 {
        return vec![m[(0, 0)]];
    }
    if let Some(schur) = m.clone().try_schur(1e-14, 20_000) {
        let t = schur.unpack().1;
        return (0..t.nrows()).map(|i| t[(i, i)]).collect();
    }
    let coeffs = crate::roots::charpoly_complex(m);
    crate::roots::polynomial_roots(&coeffs)
}

/// Modified Gram–Schmidt; returns a matrix whose columns are an orthonormal
/// basis of the span (near-dependent inputs are dropped).
pub fn orthonormal_columns(vectors: &[CVector], drop_tol: f64) -> CMatrix {
    let dim = vectors.first().map_or(0, CVector::len);
    let mut cols: Vec<CVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        let scale = w.norm();
        for u in &cols {
            let proj = u.dotc(&w);
            w -= u * proj;
        }
        // re-orthogonalize once for numerical hygiene
        for u in &cols {
            let proj = u.dotc(&w);
            w -= u * proj;
        }
        let n = w.norm();
        if n > drop_tol * scale.max(1.0) {
            cols.push(w / Complex64::new(n, 0.0));
        }
    }
    let mut m = CMatrix::zeros(dim, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Matrix power by repeated multiplication (exponents stay tiny here).
pub fn matrix_power(m: &CMatrix, e: usize) -> CMatrix {
    let n = m.nrows();
    let mut acc = CMatrix::identity(n, n);
    for _ in 0..e {
        acc = &acc * m;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_and_nullspace_of_deficient_matrix() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0),
                c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0),
            ],
        );
        assert_eq!(svd_rank(&m, 1e-10), 2);
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.len(), 1);
        assert!((&m * &ns[0]).norm() < 1e-12);
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let m = CMatrix::from_row_slice(
            1,
            3,
            &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        );
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_jordan_block() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(3.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)],
        );
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[0] - c(3.0, 0.0)).norm() < 1e-7);
        assert!((ev[1] - c(3.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn lstsq_consistent_system() {
        let a = CMatrix::from_row_slice(
            3,
            2,
            &[
                c(1.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0),
                c(1.0, 0.0), c(1.0, 0.0),
            ],
        );
        let b = CVector::from_column_slice(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let (x, rel) = lstsq(&a, &b, 1e-12);
        assert!(rel < 1e-12);
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((x[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn orthonormalization_drops_dependent_vectors() {
        let v1 = CVector::from_column_slice(&[c(1.0, 0.0), c(1.0, 0.0)]);
        let v2 = CVector::from_column_slice(&[c(2.0, 0.0), c(2.0, 0.0)]);
        let v3 = CVector::from_column_slice(&[c(0.0, 1.0), c(0.0, 0.0)]);
        let q = orthonormal_columns(&[v1, v2, v3], 1e-10);
        assert_eq!(q.ncols(), 2);
        let gram = q.adjoint() * &q;
        assert!((gram - CMatrix::identity(2, 2)).norm() < 1e-12);
    }
}
