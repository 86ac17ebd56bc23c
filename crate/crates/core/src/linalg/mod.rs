//! Dense real and complex linear algebra.

mod eig;
mod expm;
mod solve;

pub use eig::{general_eig, general_eig_with, sym_eig, sym_eig_with, EigenDecomposition, SymEigen};
pub use expm::expm;
pub use solve::{linear_solve, linear_solve_with, lu_solve_matrix};

use crate::error::{LarError, Result};
use crate::tol::Tolerances;
use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn ensure_square<T: nalgebra::Scalar>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(LarError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub fn ensure_finite<T: ComplexField<RealField = f64>>(
    m: &DMatrix<T>,
    what: &'static str,
) -> Result<()> {
    if m.iter().all(|x| x.clone().modulus().is_finite()) {
        Ok(())
    } else {
        Err(LarError::NonFinite { what })
    }
}

pub fn ensure_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(LarError::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Returns `(S, F)` with `S = (V + Vᵀ)/2`, `F = (V − Vᵀ)/2`.
pub fn sym_skew_split(v: &RMat) -> Result<(RMat, RMat)> {
    let n = ensure_square(v)?;
    let mut s = RMat::zeros(n, n);
    let mut f = RMat::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = v[(i, i)];
        for j in (i + 1)..n {
            let sym = 0.5 * (v[(i, j)] + v[(j, i)]);
            let skw = 0.5 * (v[(i, j)] - v[(j, i)]);
            s[(i, j)] = sym;
            s[(j, i)] = sym;
            f[(i, j)] = skw;
            f[(j, i)] = -skw;
        }
    }
    Ok((s, f))
}

pub fn symmetry_defect(m: &RMat) -> f64 {
    (m - m.transpose()).norm()
}

pub fn skew_defect(m: &RMat) -> f64 {
    (m + m.transpose()).norm()
}

pub fn check_symmetric(m: &RMat, tol: &Tolerances) -> Result<()> {
    ensure_square(m)?;
    let d = symmetry_defect(m);
    let limit = tol.symmetry * m.norm().max(1.0);
    if d > limit {
        return Err(LarError::NotSymmetric { defect: d, tol: limit });
    }
    Ok(())
}

pub fn check_skew(m: &RMat, tol: &Tolerances) -> Result<()> {
    ensure_square(m)?;
    let d = skew_defect(m);
    if d > tol.skew {
        return Err(LarError::NotSkew { defect: d, tol: tol.skew });
    }
    Ok(())
}

pub fn to_complex_mat(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn to_complex_vec(v: &RVec) -> CVec {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Induced 1-norm (max column sum of moduli).
pub fn norm1<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced ∞-norm (max row sum of moduli).
pub fn norm_inf<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Symplectic form J = [[0, I], [−I, 0]] on ℝ²ⁿ.
pub fn symplectic_j(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_examples() {
        let (s, f) = sym_skew_split(&RMat::identity(2, 2)).unwrap();
        assert_eq!(s, RMat::identity(2, 2));
        assert_eq!(f, RMat::zeros(2, 2));

        let v = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let (s, f) = sym_skew_split(&v).unwrap();
        assert_eq!(s, RMat::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
        assert_eq!(f, RMat::from_row_slice(2, 2, &[0.0, 0.5, -0.5, 0.0]));

        assert!(sym_skew_split(&RMat::zeros(2, 3)).is_err());
    }

    #[test]
    fn norms() {
        let m = RMat::from_row_slice(2, 2, &[1.0, -2.0, 3.0, 4.0]);
        assert_eq!(norm1(&m), 6.0);
        assert_eq!(norm_inf(&m), 7.0);
    }
}
