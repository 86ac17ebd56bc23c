use super::{ensure_square, lu_solve_matrix, norm1, norm_inf};
use crate::error::{LarError, Result};
use nalgebra::{ComplexField, DMatrix};

// Padé [13/13] numerator coefficients; θ₁₃ bounds the scaled norm for which
// the approximant is accurate to unit roundoff.
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// exp(tA) by scaling and squaring with a degree-13 Padé approximant.
///
/// The scaling exponent is chosen from `min(‖A‖_F, √(‖A‖₁‖A‖∞))`, both of
/// which bound the spectral norm from above.
pub fn expm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, t: f64) -> Result<DMatrix<T>> {
    let n = ensure_square(a)?;
    let id = DMatrix::<T>::identity(n, n);
    let ts = T::from_real(t);
    let mut x = a.map(|v| v * ts.clone());
    if x.iter().all(|v| v.clone().modulus() == 0.0) {
        return Ok(id);
    }
    if x.iter().any(|v| !v.clone().modulus().is_finite()) {
        return Err(LarError::NonFinite { what: "exponent" });
    }

    let est = x.norm().min((norm1(&x) * norm_inf(&x)).sqrt());
    let s = if est > THETA13 { (est / THETA13).log2().ceil() as i32 } else { 0 };
    if s > 0 {
        let f = T::from_real(2f64.powi(-s));
        x.iter_mut().for_each(|v| *v = v.clone() * f.clone());
    }

    let c = |k: usize| T::from_real(B13[k]);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;

    let u_inner = &x6 * (&x6 * c(13) + &x4 * c(11) + &x2 * c(9))
        + &x6 * c(7)
        + &x4 * c(5)
        + &x2 * c(3)
        + &id * c(1);
    let u = &x * u_inner;
    let v = &x6 * (&x6 * c(12) + &x4 * c(10) + &x2 * c(8))
        + &x6 * c(6)
        + &x4 * c(4)
        + &x2 * c(2)
        + &id * c(0);

    let mut r = lu_solve_matrix(&(&v - &u), &(&v + &u), 0.0)?;
    for _ in 0..s {
        r = &r * &r;
        if r.iter().any(|v| !v.clone().modulus().is_finite()) {
            return Err(LarError::Overflow);
        }
    }
    if r.iter().any(|v| !v.clone().modulus().is_finite()) {
        return Err(LarError::Overflow);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMat, RMat};
    use num_complex::Complex64 as C;
    use std::f64::consts::{E, FRAC_PI_2};

    #[test]
    fn diagonal_and_rotation() {
        let a = RMat::from_diagonal(&nalgebra::dvector![1.0, -1.0]);
        let e = expm(&a, 1.0).unwrap();
        assert!((e[(0, 0)] - E).abs() < 1e-15 * E);
        assert!((e[(1, 1)] - 1.0 / E).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);

        let r = RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let e = expm(&r, FRAC_PI_2).unwrap();
        let want = RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!((e - want).norm() < 1e-15);
    }

    #[test]
    fn zero_gives_exact_identity() {
        let z = RMat::zeros(4, 4);
        assert_eq!(expm(&z, 3.0).unwrap(), RMat::identity(4, 4));
        let a = RMat::from_element(3, 3, 2.5);
        assert_eq!(expm(&a, 0.0).unwrap(), RMat::identity(3, 3));
    }

    #[test]
    fn complex_scalar_case() {
        let a = CMat::from_element(1, 1, C::new(0.3, 2.0));
        let e = expm(&a, 1.5).unwrap();
        let want = (C::new(0.3, 2.0) * 1.5).exp();
        assert!((e[(0, 0)] - want).norm() < 1e-14);
    }

    #[test]
    fn large_norm_scalar() {
        // ‖tA‖ = 1e4 on a nilpotent-plus-diagonal block with a closed form.
        let a = RMat::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, -1.0]);
        let t = 700.0;
        let e = expm(&a, t).unwrap();
        let d = (-t).exp();
        assert!((e[(0, 0)] - d).abs() <= 1e-12 * d);
        assert!((e[(0, 1)] - t * d).abs() <= 1e-12 * t * d);
    }

    #[test]
    fn overflow_is_reported() {
        let a = RMat::from_diagonal(&nalgebra::dvector![1.0, 0.0]);
        assert!(matches!(expm(&a, 1000.0), Err(LarError::Overflow)));
    }
}
