use super::{check_symmetric, ensure_finite, ensure_square, lu_solve_matrix, norm1, to_complex_mat, CMat, RMat, RVec};
use crate::error::{LarError, Result};
use crate::tol::Tolerances;
use nalgebra::{DVector, Schur};
use num_complex::Complex64;
use std::cmp::Ordering;

/// Eigenpairs of a general real matrix, sorted by (re, im) ascending.
/// Columns of `eigenvectors` have unit 2-norm with their largest entry
/// rotated onto the positive real axis.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<Complex64>,
    pub eigenvectors: CMat,
    /// ‖VP − PΛ‖_F.
    pub residual_norm: f64,
    /// 1-norm condition number of P.
    pub condition: f64,
}

#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub values: RVec,
    /// Orthonormal columns matching `values`.
    pub vectors: RMat,
    /// ‖QΛQᵀ − S‖_F.
    pub residual_norm: f64,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

pub fn sym_eig(s: &RMat) -> Result<SymEigen> {
    sym_eig_with(s, &Tolerances::default())
}

/// Cyclic Jacobi, row-by-row sweep order.
pub fn sym_eig_with(s: &RMat, tol: &Tolerances) -> Result<SymEigen> {
    let n = ensure_square(s)?;
    ensure_finite(s, "symmetric matrix")?;
    check_symmetric(s, tol)?;
    let mut a = (s + s.transpose()) * 0.5;
    let mut q = RMat::identity(n, n);
    let scale = a.norm();
    const MAX_SWEEPS: usize = 100;

    let off = |a: &RMat| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[(i, j)] * a[(i, j)];
                }
            }
        }
        acc.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > f64::EPSILON * 1e-2 * scale {
        if sweeps == MAX_SWEEPS {
            return Err(LarError::NoConvergence { iterations: sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let tau = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - sn * akr;
                    a[(k, r)] = sn * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - sn * ark;
                    a[(r, k)] = sn * apk + c * ark;
                }
                a[(p, r)] = 0.0;
                a[(r, p)] = 0.0;
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - sn * qkr;
                    q[(k, r)] = sn * qkp + c * qkr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(Ordering::Equal));
    let values = RVec::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut vectors = RMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = q.column(i).into_owned();
        // Deterministic sign: largest-magnitude entry positive.
        let imax = v.iamax();
        if v[imax] < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(col, &v);
    }
    let residual_norm = (&vectors * RMat::from_diagonal(&values) * vectors.transpose() - s).norm();
    Ok(SymEigen { values, vectors, residual_norm })
}

pub fn general_eig(v: &RMat) -> Result<EigenDecomposition> {
    general_eig_with(v, &Tolerances::default())
}

/// Francis double-shift QR to real Schur form, conversion of the 2×2
/// blocks to complex triangular form, then eigenvectors by back
/// substitution.
pub fn general_eig_with(v: &RMat, tol: &Tolerances) -> Result<EigenDecomposition> {
    let n = ensure_square(v)?;
    ensure_finite(v, "matrix")?;
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: DVector::zeros(0),
            eigenvectors: CMat::zeros(0, 0),
            residual_norm: 0.0,
            condition: 1.0,
        });
    }
    let max_iter = 100 * n.max(10);
    let schur = Schur::try_new(v.clone(), f64::EPSILON, max_iter)
        .ok_or(LarError::NoConvergence { iterations: max_iter })?;
    let (q, t) = schur.unpack();
    let (u, tc) = real_to_complex_schur(&to_complex_mat(&q), &to_complex_mat(&t));

    let tnorm = tc.norm().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut x = CMat::zeros(n, n);
    for k in 0..n {
        let lam = tc[(k, k)];
        x[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in (i + 1)..=k {
                acc += tc[(i, l)] * x[(l, k)];
            }
            let mut d = tc[(i, i)] - lam;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            x[(i, k)] = -acc / d;
        }
    }
    let mut p = &u * x;
    let mut lams: Vec<Complex64> = (0..n).map(|k| tc[(k, k)]).collect();

    for k in 0..n {
        let mut col = p.column(k).into_owned();
        let nrm = col.norm();
        col /= Complex64::new(nrm, 0.0);
        let imax = (0..n)
            .max_by(|&a, &b| col[a].norm().partial_cmp(&col[b].norm()).unwrap_or(Ordering::Equal))
            .unwrap_or(0);
        let ph = col[imax] / col[imax].norm();
        col /= ph;
        col[imax] = Complex64::new(col[imax].re, 0.0);
        p.set_column(k, &col);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (lams[a], lams[b]);
        x.re.partial_cmp(&y.re)
            .unwrap_or(Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal))
    });
    let sorted_p = CMat::from_fn(n, n, |i, j| p[(i, order[j])]);
    lams = order.iter().map(|&k| lams[k]).collect();
    let eigenvalues = DVector::from_vec(lams);

    let vc = to_complex_mat(v);
    let residual_norm =
        (&vc * &sorted_p - &sorted_p * CMat::from_diagonal(&eigenvalues)).norm();
    let condition = match lu_solve_matrix(&sorted_p, &CMat::identity(n, n), 0.0) {
        Ok(inv) => norm1(&sorted_p) * norm1(&inv),
        Err(_) => f64::INFINITY,
    };
    let dec = EigenDecomposition { eigenvalues, eigenvectors: sorted_p, residual_norm, condition };
    // Negated so a NaN condition is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(condition <= tol.eig_condition) {
        return Err(LarError::IllConditioned {
            condition,
            limit: tol.eig_condition,
            decomposition: Box::new(dec),
        });
    }
    Ok(dec)
}

/// Unitary similarity taking a real quasi-triangular T (with V = Q T Qᵀ) to
/// upper-triangular complex form, returning (U, T') with V = U T' U*.
fn real_to_complex_schur(q: &CMat, t: &CMat) -> (CMat, CMat) {
    let n = t.nrows();
    let mut u = q.clone();
    let mut t = t.clone();
    let zero = Complex64::new(0.0, 0.0);
    for m in (1..n).rev() {
        let sub = t[(m, m - 1)];
        if sub.norm() == 0.0 {
            continue;
        }
        let (a, b, c, d) = (t[(m - 1, m - 1)], t[(m - 1, m)], sub, t[(m, m)]);
        let half = (a - d) * 0.5;
        let disc = (half * half + b * c).sqrt();
        let mu = (a + d) * 0.5 + disc - d;
        let r = (mu.norm_sqr() + c.norm_sqr()).sqrt();
        if r == 0.0 {
            continue;
        }
        let cs = mu / r;
        let sn = c / r;
        // G = [[c̄, s̄], [−s, c]] applied from the left on rows m−1, m.
        for j in (m - 1)..n {
            let x = t[(m - 1, j)];
            let y = t[(m, j)];
            t[(m - 1, j)] = cs.conj() * x + sn.conj() * y;
            t[(m, j)] = -sn * x + cs * y;
        }
        // and G* from the right on columns m−1, m.
        for i in 0..=m {
            let x = t[(i, m - 1)];
            let y = t[(i, m)];
            t[(i, m - 1)] = x * cs + y * sn;
            t[(i, m)] = -x * sn.conj() + y * cs.conj();
        }
        for i in 0..n {
            let x = u[(i, m - 1)];
            let y = u[(i, m)];
            u[(i, m - 1)] = x * cs + y * sn;
            u[(i, m)] = -x * sn.conj() + y * cs.conj();
        }
        t[(m, m - 1)] = zero;
    }
    (u, t)
}
