//! Interior simplex, Fisher–Rao geometry, the square-root lift and the
//! preference one-form.
//!
//! Lotteries, tangent vectors and amplitudes are plain `RVec`s; the
//! `check_*` functions enforce their invariants at operation boundaries.

use crate::error::{LarError, Result};
use crate::linalg::{check_skew, check_symmetric, ensure_dim, ensure_square, RMat, RVec};
use crate::tol::Tolerances;

pub fn check_lottery(q: &RVec, tol: &Tolerances) -> Result<()> {
    if q.is_empty() {
        return Err(LarError::InvalidLottery { reason: "empty".into() });
    }
    if q.iter().any(|x| !x.is_finite()) {
        return Err(LarError::NonFinite { what: "lottery" });
    }
    if let Some(i) = q.iter().position(|&x| x < 0.0) {
        return Err(LarError::InvalidLottery { reason: format!("negative component at index {i}") });
    }
    let s = q.sum();
    if (s - 1.0).abs() > tol.simplex_sum.max(4.0 * f64::EPSILON * q.len() as f64) {
        return Err(LarError::InvalidLottery { reason: format!("components sum to {s}") });
    }
    Ok(())
}

pub fn check_interior(q: &RVec, tol: &Tolerances) -> Result<()> {
    check_lottery(q, tol)?;
    let min = q.min();
    if min <= tol.interior_eps {
        return Err(LarError::NotInterior { min, eps: tol.interior_eps });
    }
    Ok(())
}

pub fn check_tangent(v: &RVec, tol: &Tolerances) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(LarError::NonFinite { what: "tangent vector" });
    }
    let sum = v.sum();
    let scale = v.amax().max(1.0);
    if sum.abs() > tol.simplex_sum * scale {
        return Err(LarError::NotTangent { sum });
    }
    Ok(())
}

pub fn check_unit(rho: &RVec, tol: &Tolerances) -> Result<()> {
    let norm = rho.norm();
    if (norm - 1.0).abs() > tol.unit_norm.max(4.0 * f64::EPSILON * (rho.len() as f64).sqrt()) {
        return Err(LarError::NotUnit { norm });
    }
    Ok(())
}

/// ρ = √q on the interior.
pub fn lift(q: &RVec) -> Result<RVec> {
    lift_with(q, &Tolerances::default())
}

pub fn lift_with(q: &RVec, tol: &Tolerances) -> Result<RVec> {
    check_interior(q, tol)?;
    Ok(q.map(f64::sqrt))
}

/// qᵢ = ρ̃ᵢ² / Σρ̃ⱼ². Sign-blind, scale-invariant; may land on the boundary.
pub fn readout(rho_tilde: &RVec) -> Result<RVec> {
    if rho_tilde.iter().any(|x| !x.is_finite()) {
        return Err(LarError::NonFinite { what: "amplitude" });
    }
    let m = rho_tilde.amax();
    if m == 0.0 {
        return Err(LarError::ZeroVector);
    }
    let sq = rho_tilde.map(|x| (x / m) * (x / m));
    let z = sq.sum();
    Ok(sq / z)
}

/// g_F(q)[v, w] = Σ vᵢwᵢ/qᵢ.
pub fn fisher_rao_inner(q: &RVec, v: &RVec, w: &RVec) -> Result<f64> {
    fisher_rao_inner_with(q, v, w, &Tolerances::default())
}

pub fn fisher_rao_inner_with(q: &RVec, v: &RVec, w: &RVec, tol: &Tolerances) -> Result<f64> {
    check_interior(q, tol)?;
    ensure_dim(q.len(), v.len())?;
    ensure_dim(q.len(), w.len())?;
    check_tangent(v, tol)?;
    check_tangent(w, tol)?;
    Ok((0..q.len()).map(|i| v[i] * w[i] / q[i]).sum())
}

/// d = c · arccos(Σ √(qᵢq'ᵢ)), the inner product clamped into [−1, 1].
pub fn perceptual_distance(q: &RVec, q2: &RVec, c: f64) -> Result<f64> {
    perceptual_distance_with(q, q2, c, &Tolerances::default())
}

pub fn perceptual_distance_with(q: &RVec, q2: &RVec, c: f64, tol: &Tolerances) -> Result<f64> {
    check_lottery(q, tol)?;
    check_lottery(q2, tol)?;
    ensure_dim(q.len(), q2.len())?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(LarError::InvalidArgument(format!("distance scale must be positive, got {c}")));
    }
    let bc: f64 = q.iter().zip(q2.iter()).map(|(a, b)| (a * b).sqrt()).sum();
    Ok(c * bc.clamp(-1.0, 1.0).acos())
}

/// U(q) = ½ √qᵀ S √q.
pub fn utility_potential(q: &RVec, s: &RMat) -> Result<f64> {
    utility_potential_with(q, s, &Tolerances::default())
}

pub fn utility_potential_with(q: &RVec, s: &RMat, tol: &Tolerances) -> Result<f64> {
    check_symmetric(s, tol)?;
    let rho = lift_with(q, tol)?;
    ensure_dim(rho.len(), s.nrows())?;
    Ok(0.5 * rho.dot(&(s * &rho)))
}

/// β_q(v) = Σ (V√q)ᵢ vᵢ / (2√qᵢ).
pub fn beta_eval(q: &RVec, v: &RVec, gen: &RMat) -> Result<f64> {
    beta_eval_with(q, v, gen, &Tolerances::default())
}

pub fn beta_eval_with(q: &RVec, v: &RVec, gen: &RMat, tol: &Tolerances) -> Result<f64> {
    ensure_square(gen)?;
    let rho = lift_with(q, tol)?;
    ensure_dim(rho.len(), gen.nrows())?;
    ensure_dim(rho.len(), v.len())?;
    check_tangent(v, tol)?;
    Ok(beta_raw(&rho, v, gen))
}

fn beta_raw(rho: &RVec, v: &RVec, gen: &RMat) -> f64 {
    let vr = gen * rho;
    (0..rho.len()).map(|i| vr[i] * v[i] / (2.0 * rho[i])).sum()
}

/// R(ρ, ρ') = ρᵀFρ'.
pub fn ssb_regret(rho: &RVec, rho2: &RVec, f: &RMat) -> Result<f64> {
    ssb_regret_with(rho, rho2, f, &Tolerances::default())
}

pub fn ssb_regret_with(rho: &RVec, rho2: &RVec, f: &RMat, tol: &Tolerances) -> Result<f64> {
    check_skew(f, tol)?;
    ensure_dim(f.nrows(), rho.len())?;
    ensure_dim(f.nrows(), rho2.len())?;
    Ok(rho.dot(&(f * rho2)))
}

/// Pushforward of the LAR field to the simplex: q̇ᵢ = 2√qᵢ (Q_ρVρ)ᵢ.
///
/// With this normalisation g_F(q̇, w) = 4·β_q(w) for every tangent w, and
/// the diagonal case is the replicator field q̇ᵢ = 2qᵢ(θᵢ − θ̄).
pub fn simplex_drift(q: &RVec, gen: &RMat) -> Result<RVec> {
    simplex_drift_with(q, gen, &Tolerances::default())
}

pub fn simplex_drift_with(q: &RVec, gen: &RMat, tol: &Tolerances) -> Result<RVec> {
    ensure_square(gen)?;
    let rho = lift_with(q, tol)?;
    ensure_dim(rho.len(), gen.nrows())?;
    let vr = gen * &rho;
    let m = rho.dot(&vr);
    let x = vr - &rho * m;
    Ok(RVec::from_fn(rho.len(), |i, _| 2.0 * rho[i] * x[i]))
}

/// V − (tr V / n)·I. Offered as a gauge normalisation; never applied implicitly.
pub fn trace_normalize(gen: &RMat) -> Result<RMat> {
    let n = ensure_square(gen)?;
    let c = gen.trace() / n as f64;
    Ok(gen - RMat::identity(n, n) * c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolonomyOptions {
    /// Gauss–Legendre nodes per spline segment.
    pub nodes: usize,
    /// Sub-intervals per segment for the coarse pass; the refined pass doubles it.
    pub subdivisions: usize,
}

impl Default for HolonomyOptions {
    fn default() -> Self {
        HolonomyOptions { nodes: 64, subdivisions: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holonomy {
    pub value: f64,
    /// |refined − coarse|.
    pub error_estimate: f64,
}

/// ∮β along the periodic cubic spline through `samples` (first = last).
pub fn loop_holonomy(samples: &[RVec], gen: &RMat, opts: HolonomyOptions) -> Result<Holonomy> {
    loop_holonomy_with(samples, gen, opts, &Tolerances::default())
}

pub fn loop_holonomy_with(
    samples: &[RVec],
    gen: &RMat,
    opts: HolonomyOptions,
    tol: &Tolerances,
) -> Result<Holonomy> {
    ensure_square(gen)?;
    if samples.len() < 4 {
        return Err(LarError::TooFewSamples { needed: 4, got: samples.len() });
    }
    if opts.nodes == 0 || opts.subdivisions == 0 {
        return Err(LarError::InvalidArgument("quadrature needs at least one node and one sub-interval".into()));
    }
    let n = gen.nrows();
    for q in samples {
        ensure_dim(n, q.len())?;
        check_interior(q, tol)?;
    }
    let last = samples.len() - 1;
    let gap = (&samples[0] - &samples[last]).amax();
    if gap > tol.loop_closure {
        return Err(LarError::NotClosed { gap });
    }

    let spline = PeriodicSpline::new(&samples[..last]);
    let (x, w) = gauss_legendre(opts.nodes);
    let coarse = integrate_loop(&spline, gen, &x, &w, opts.subdivisions, tol)?;
    let fine = integrate_loop(&spline, gen, &x, &w, 2 * opts.subdivisions, tol)?;
    Ok(Holonomy { value: fine, error_estimate: (fine - coarse).abs() })
}

/// Closed loop of `samples` points (plus the repeated first point) on the
/// Fisher–Rao geodesic circle of radius `radius` about `center`.
///
/// The circle lies in the sphere plane spanned by the first two Helmert
/// directions (1, −1, 0, …) and (1, 1, −2, 0, …), orthonormalised against
/// √center. At the barycentre these are already tangent.
pub fn fr_circle(center: &RVec, radius: f64, samples: usize) -> Result<Vec<RVec>> {
    fr_circle_with(center, radius, samples, &Tolerances::default())
}

pub fn fr_circle_with(center: &RVec, radius: f64, samples: usize, tol: &Tolerances) -> Result<Vec<RVec>> {
    let n = center.len();
    if n < 3 {
        return Err(LarError::InvalidArgument(format!("a circle needs n >= 3, got {n}")));
    }
    if samples < 3 {
        return Err(LarError::TooFewSamples { needed: 3, got: samples });
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(LarError::InvalidArgument(format!("circle radius must be positive, got {radius}")));
    }
    check_interior(center, tol)?;
    let s = center.map(f64::sqrt);
    let helmert = |k: usize| RVec::from_fn(n, |i, _| if i < k { 1.0 } else if i == k { -(k as f64) } else { 0.0 });
    let mut frame: Vec<RVec> = Vec::with_capacity(2);
    for k in 1..=2 {
        let mut d = helmert(k);
        d -= &s * s.dot(&d);
        for e in &frame {
            d -= e * e.dot(&d);
        }
        frame.push(d.normalize());
    }
    // The round metric is ¼g_F under the lift, so FR radius ε is arc ε/2.
    let a = 0.5 * radius;
    let mut pts = (0..samples)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / samples as f64;
            let rho = &s * a.cos() + (&frame[0] * th.cos() + &frame[1] * th.sin()) * a.sin();
            let q = rho.map(|x| x * x);
            let z = q.sum();
            q / z
        })
        .collect::<Vec<_>>();
    pts.push(pts[0].clone());
    Ok(pts)
}

fn integrate_loop(
    spline: &PeriodicSpline,
    gen: &RMat,
    x: &[f64],
    w: &[f64],
    subdivisions: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let h = 1.0 / subdivisions as f64;
    let mut total = 0.0;
    for seg in 0..spline.segments() {
        let mut acc = 0.0;
        for sub in 0..subdivisions {
            let a = sub as f64 * h;
            for (xi, wi) in x.iter().zip(w) {
                let u = a + 0.5 * h * (xi + 1.0);
                let (q, dq) = spline.eval(seg, u);
                let min = q.min();
                if min <= tol.interior_eps {
                    return Err(LarError::NotInterior { min, eps: tol.interior_eps });
                }
                let rho = q.map(f64::sqrt);
                acc += wi * 0.5 * h * beta_raw(&rho, &dq, gen);
            }
        }
        total += acc;
    }
    Ok(total)
}

/// Componentwise periodic cubic spline on a uniform unit-spaced parameter.
struct PeriodicSpline {
    y: Vec<RVec>,
    m: Vec<RVec>,
}

impl PeriodicSpline {
    fn new(points: &[RVec]) -> Self {
        let k = points.len();
        let dim = points[0].len();
        let mut m = vec![RVec::zeros(dim); k];
        for c in 0..dim {
            let rhs: Vec<f64> = (0..k)
                .map(|i| {
                    let prev = points[(i + k - 1) % k][c];
                    let next = points[(i + 1) % k][c];
                    6.0 * (next - 2.0 * points[i][c] + prev)
                })
                .collect();
            let sol = solve_cyclic(1.0, 4.0, 1.0, &rhs);
            for i in 0..k {
                m[i][c] = sol[i];
            }
        }
        PeriodicSpline { y: points.to_vec(), m }
    }

    fn segments(&self) -> usize {
        self.y.len()
    }

    /// Position and derivative at parameter `seg + u`, `u ∈ [0, 1]`.
    fn eval(&self, seg: usize, u: f64) -> (RVec, RVec) {
        let k = self.y.len();
        let j = (seg + 1) % k;
        let v = 1.0 - u;
        let (y0, y1, m0, m1) = (&self.y[seg], &self.y[j], &self.m[seg], &self.m[j]);
        let pos = y0 * v + y1 * u + m0 * ((v * v * v - v) / 6.0) + m1 * ((u * u * u - u) / 6.0);
        let der = y1 - y0 + m0 * ((1.0 - 3.0 * v * v) / 6.0) + m1 * ((3.0 * u * u - 1.0) / 6.0);
        (pos, der)
    }
}

/// Solves the cyclic tridiagonal system with constant bands
/// (sub `a`, diag `b`, super `c`, corners `c` top-right and `a` bottom-left)
/// by Sherman–Morrison on top of the Thomas algorithm.
fn solve_cyclic(a: f64, b: f64, c: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    if n == 1 {
        return vec![rhs[0] / (a + b + c)];
    }
    if n == 2 {
        // [[b, a + c], [a + c, b]]
        let d = b * b - (a + c) * (a + c);
        return vec![(b * rhs[0] - (a + c) * rhs[1]) / d, (b * rhs[1] - (a + c) * rhs[0]) / d];
    }
    let gamma = -b;
    let mut diag = vec![b; n];
    diag[0] = b - gamma;
    diag[n - 1] = b - c * a / gamma;
    let x = thomas(a, &diag, c, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = a;
    let z = thomas(a, &diag, c, &u);
    let fact = (x[0] + c * x[n - 1] / gamma) / (1.0 + z[0] + c * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(a: f64, diag: &[f64], c: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - a * cp[i - 1];
        cp[i] = c / den;
        dp[i] = (rhs[i] - a * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton on Pₙ).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
