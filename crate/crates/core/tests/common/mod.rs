#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Adaptive Dormand–Prince 5(4) for ẋ = f(x) on [0, t], tight tolerances.
pub fn dopri<F>(f: F, x0: &DVector<f64>, t: f64, rtol: f64, atol: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let _ = C;
    let mut x = x0.clone();
    let mut s = 0.0;
    let mut h = (t / 100.0).max(1e-6);
    while s < t {
        if s + h > t {
            h = t - s;
        }
        let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
        for i in 0..7 {
            let mut xi = x.clone();
            for j in 0..i {
                if A[i][j] != 0.0 {
                    xi += &k[j] * (h * A[i][j]);
                }
            }
            k.push(f(&xi));
        }
        let mut x5 = x.clone();
        let mut x4 = x.clone();
        for i in 0..7 {
            x5 += &k[i] * (h * B5[i]);
            x4 += &k[i] * (h * B4[i]);
        }
        let err = (0..x.len())
            .map(|i| ((x5[i] - x4[i]) / (atol + rtol * x5[i].abs().max(x[i].abs()))).powi(2))
            .sum::<f64>()
            .sqrt()
            / (x.len() as f64).sqrt();
        if err <= 1.0 {
            s += h;
            x = x5;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    x
}

/// exp(tA) column by column through the ODE oracle.
pub fn expm_oracle(a: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let e = DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
        let x = dopri(|x| a * x, &e, t, 1e-13, 1e-15);
        out.set_column(j, &x);
    }
    out
}

/// Relative 2-norm-free error: ‖X − Y‖_F / max(‖Y‖_F, tiny).
pub fn rel(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    (x - y).norm() / y.norm().max(1e-300)
}
