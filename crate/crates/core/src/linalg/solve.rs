use super::{ensure_dim, ensure_finite, ensure_square, CMat, CVec};
use crate::error::{LarError, Result};
use crate::tol::Tolerances;
use nalgebra::{ComplexField, DMatrix};

/// Solves `A X = B` by LU with partial pivoting. A pivot smaller than
/// `pivot_tol · max|Aᵢⱼ|` is reported as singular.
pub fn lu_solve_matrix<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    pivot_tol: f64,
) -> Result<DMatrix<T>> {
    let n = ensure_square(a)?;
    ensure_dim(n, b.nrows())?;
    let scale = a.iter().map(|x| x.clone().modulus()).fold(0.0, f64::max);
    let mut lu = a.clone();
    let mut x = b.clone();
    let floor = pivot_tol * scale;

    for k in 0..n {
        let (mut p, mut best) = (k, lu[(k, k)].clone().modulus());
        for i in (k + 1)..n {
            let m = lu[(i, k)].clone().modulus();
            if m > best {
                p = i;
                best = m;
            }
        }
        if best <= floor || best == 0.0 {
            return Err(LarError::Singular { pivot: best, tol: floor });
        }
        if p != k {
            lu.swap_rows(p, k);
            x.swap_rows(p, k);
        }
        let piv = lu[(k, k)].clone();
        for i in (k + 1)..n {
            let l = lu[(i, k)].clone() / piv.clone();
            if l.clone().modulus() == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                let u = lu[(k, j)].clone();
                lu[(i, j)] -= l.clone() * u;
            }
            for j in 0..x.ncols() {
                let u = x[(k, j)].clone();
                x[(i, j)] -= l.clone() * u;
            }
        }
    }
    for j in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut acc = x[(i, j)].clone();
            for l in (i + 1)..n {
                acc -= lu[(i, l)].clone() * x[(l, j)].clone();
            }
            x[(i, j)] = acc / lu[(i, i)].clone();
        }
    }
    Ok(x)
}

pub fn linear_solve(a: &CMat, b: &CVec) -> Result<CVec> {
    linear_solve_with(a, b, &Tolerances::default())
}

pub fn linear_solve_with(a: &CMat, b: &CVec, tol: &Tolerances) -> Result<CVec> {
    ensure_finite(a, "matrix")?;
    let bm = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let x = lu_solve_matrix(a, &bm, tol.pivot)?;
    Ok(x.column(0).into_owned())
}
