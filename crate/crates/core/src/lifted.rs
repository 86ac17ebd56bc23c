//! The cotangent lift on ℝ²ⁿ: ρ̃̇ = Vρ̃ + y, ẏ = −Vᵀy.

use crate::error::{LarError, Result};
use crate::grid::{self, Trajectory};
use crate::linalg::{ensure_dim, expm, symplectic_j, RMat, RVec};
use crate::onshell::PreferenceOperator;
use crate::par::{map_slice, Execution};

/// Darboux coordinates (ρ̃, y); off-shell states are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub rho: RVec,
    pub y: RVec,
}

impl PhaseState {
    pub fn new(rho: RVec, y: RVec) -> Result<Self> {
        ensure_dim(rho.len(), y.len())?;
        if rho.iter().chain(y.iter()).any(|x| !x.is_finite()) {
            return Err(LarError::NonFinite { what: "phase state" });
        }
        Ok(PhaseState { rho, y })
    }

    pub fn on_shell(rho: RVec) -> Self {
        let n = rho.len();
        PhaseState { rho, y: RVec::zeros(n) }
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn stacked(&self) -> RVec {
        let n = self.n();
        RVec::from_fn(2 * n, |i, _| if i < n { self.rho[i] } else { self.y[i - n] })
    }

    pub fn from_stacked(z: &RVec) -> Self {
        let n = z.len() / 2;
        PhaseState { rho: z.rows(0, n).into_owned(), y: z.rows(n, n).into_owned() }
    }

    /// Λ = 2⟨ρ̃, y⟩.
    pub fn neutral(&self) -> f64 {
        2.0 * self.rho.dot(&self.y)
    }
}

pub type LiftedTrajectory = Trajectory<PhaseState>;

/// 𝖠 = [[V, I], [0, −Vᵀ]].
pub fn lifted_generator(op: &PreferenceOperator) -> RMat {
    let n = op.n();
    let mut a = RMat::zeros(2 * n, 2 * n);
    a.view_mut((0, 0), (n, n)).copy_from(op.v());
    a.view_mut((n, n), (n, n)).copy_from(&(-op.v().transpose()));
    for i in 0..n {
        a[(i, n + i)] = 1.0;
    }
    a
}

/// ‖𝖠ᵀJ + J𝖠‖_F.
pub fn hamiltonian_property_defect(a: &RMat) -> f64 {
    let j = symplectic_j(a.nrows() / 2);
    (a.transpose() * &j + &j * a).norm()
}

/// H = ½‖y‖² + ⟨y, Vρ̃⟩.
pub fn hamiltonian(z: &PhaseState, op: &PreferenceOperator) -> f64 {
    0.5 * z.y.norm_squared() + z.y.dot(&(op.v() * &z.rho))
}

/// Z(t) = exp((t − t₀)𝖠) Z₀ at each grid time.
pub fn lifted_flow(op: &PreferenceOperator, z0: &PhaseState, times: &[f64]) -> Result<LiftedTrajectory> {
    lifted_flow_exec(op, z0, times, Execution::default())
}

pub fn lifted_flow_exec(
    op: &PreferenceOperator,
    z0: &PhaseState,
    times: &[f64],
    exec: Execution,
) -> Result<LiftedTrajectory> {
    ensure_dim(op.n(), z0.n())?;
    grid::validate(times)?;
    let a = lifted_generator(op);
    let s0 = z0.stacked();
    let t0 = times[0];
    let states: Result<Vec<PhaseState>> =
        map_slice(exec, times, |&t| Ok(PhaseState::from_stacked(&(expm(&a, t - t0)? * &s0))))
            .into_iter()
            .collect();
    Ok(Trajectory { times: times.to_vec(), states: states? })
}

/// max over the grid of ‖y(t) − exp(−(t − t₀)Vᵀ)y₀‖.
pub fn block_consistency_defect(op: &PreferenceOperator, traj: &LiftedTrajectory) -> Result<f64> {
    let vt = -op.v().transpose();
    let t0 = traj.times[0];
    let y0 = &traj.states[0].y;
    let mut worst = 0.0f64;
    for (t, z) in traj.iter() {
        let y = expm(&vt, t - t0)? * y0;
        worst = worst.max((&z.y - y).norm());
    }
    Ok(worst)
}

/// ‖Φₜᵀ J Φₜ − J‖_F with Φₜ = exp(t𝖠).
pub fn symplectic_defect(op: &PreferenceOperator, t: f64) -> Result<f64> {
    let a = lifted_generator(op);
    let phi = expm(&a, t)?;
    let j = symplectic_j(op.n());
    Ok((phi.transpose() * &j * &phi - j).norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WittSplit {
    /// diag(V, −Vᵀ), commutes with K.
    pub a_pu: RMat,
    /// [[0, I], [0, 0]], nilpotent.
    pub a_sh: RMat,
    /// K = diag(I, −I).
    pub k: RMat,
}

impl WittSplit {
    pub fn nilpotency_defect(&self) -> f64 {
        (&self.a_sh * &self.a_sh).norm()
    }

    pub fn commutator_defect(&self) -> f64 {
        (&self.a_pu * &self.k - &self.k * &self.a_pu).norm()
    }
}

pub fn witt_shear_split(op: &PreferenceOperator) -> WittSplit {
    let n = op.n();
    let mut a_pu = RMat::zeros(2 * n, 2 * n);
    a_pu.view_mut((0, 0), (n, n)).copy_from(op.v());
    a_pu.view_mut((n, n), (n, n)).copy_from(&(-op.v().transpose()));
    let mut a_sh = RMat::zeros(2 * n, 2 * n);
    let mut k = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        a_sh[(i, n + i)] = 1.0;
        k[(i, i)] = 1.0;
        k[(n + i, n + i)] = -1.0;
    }
    WittSplit { a_pu, a_sh, k }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeutralIndex {
    /// Λ(t) = 2⟨ρ̃(t), y(t)⟩.
    pub lambda: Vec<f64>,
    /// 𝒜(t; t₀) = ∫‖y‖², cumulative from the first grid point.
    pub accumulation: Vec<f64>,
    /// max |Λ(t) − Λ(t₀) − 2𝒜(t; t₀)|.
    pub balance_defect: f64,
    /// Richardson estimate of the quadrature error in 𝒜 (every-other-point comparison).
    pub quadrature_error: f64,
}

pub fn neutral_index(traj: &LiftedTrajectory) -> Result<NeutralIndex> {
    if traj.len() < 3 {
        return Err(LarError::GridTooCoarse { needed: 3, got: traj.len() });
    }
    grid::validate(&traj.times)?;
    let lambda: Vec<f64> = traj.states.iter().map(PhaseState::neutral).collect();
    let ysq: Vec<f64> = traj.states.iter().map(|z| z.y.norm_squared()).collect();
    let accumulation = cumulative_simpson(&traj.times, &ysq);
    let balance_defect = lambda
        .iter()
        .zip(&accumulation)
        .map(|(l, a)| (l - lambda[0] - 2.0 * a).abs())
        .fold(0.0, f64::max);

    let quadrature_error = if traj.len() >= 5 {
        let ct: Vec<f64> = traj.times.iter().step_by(2).copied().collect();
        let cy: Vec<f64> = ysq.iter().step_by(2).copied().collect();
        let coarse = cumulative_simpson(&ct, &cy);
        coarse
            .iter()
            .enumerate()
            .map(|(k, c)| (accumulation[2 * k] - c).abs() / 15.0)
            .fold(0.0, f64::max)
    } else {
        f64::NAN
    };
    Ok(NeutralIndex { lambda, accumulation, balance_defect, quadrature_error })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accumulation {
    /// 𝒜(t; t₀) by quadrature.
    pub value: f64,
    /// ½(Λ(t) − Λ(t₀)), equal to 𝒜 by the balance law.
    pub from_lambda: f64,
}

/// 𝒜(t; t₀) = ∫_{t₀}^{t} ‖y‖² between two grid times.
pub fn action_accumulation(traj: &LiftedTrajectory, t0: f64, t: f64) -> Result<Accumulation> {
    let idx = neutral_index(traj)?;
    let i0 = grid::index_of(&traj.times, t0)?;
    let i1 = grid::index_of(&traj.times, t)?;
    Ok(Accumulation {
        value: idx.accumulation[i1] - idx.accumulation[i0],
        from_lambda: 0.5 * (idx.lambda[i1] - idx.lambda[i0]),
    })
}

/// Time at which Λ reaches zero from below.
///
/// Λ(0) > 0 gives `None` (already inside the cone). Λ(0) = 0 gives `Some(0)`
/// when y₀ ≠ 0, since Λ leaves zero immediately, and `None` on the
/// zero-residual leaf. For Λ(0) < 0 the root is bracketed on [0, horizon] and
/// bisected to 1e-12; `None` if Λ(horizon) < 0.
pub fn cone_crossing_time(op: &PreferenceOperator, z0: &PhaseState, horizon: f64) -> Result<Option<f64>> {
    ensure_dim(op.n(), z0.n())?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(LarError::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    let l0 = z0.neutral();
    if l0 > 0.0 {
        return Ok(None);
    }
    if l0 == 0.0 {
        return Ok(if z0.y.amax() > 0.0 { Some(0.0) } else { None });
    }
    let a = lifted_generator(op);
    let s0 = z0.stacked();
    let lam = |t: f64| -> Result<f64> { Ok(PhaseState::from_stacked(&(expm(&a, t)? * &s0)).neutral()) };
    if lam(horizon)? < 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, horizon);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if lam(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// σ̇ = ⟨ρ, Sρ⟩ + ⟨ρ̃, y⟩/𝒵 = ⟨ρ, Sρ⟩ + Λ/(2𝒵).
pub fn offshell_sigma_rate(z: &PhaseState, op: &PreferenceOperator) -> Result<f64> {
    ensure_dim(op.n(), z.n())?;
    let zz = z.rho.norm_squared();
    if zz == 0.0 {
        return Err(LarError::ZeroVector);
    }
    let rs = z.rho.dot(&(op.s() * &z.rho)) / zz;
    Ok(rs + z.rho.dot(&z.y) / zz)
}

/// Cumulative integral of sampled `f` on a strictly increasing, possibly
/// non-uniform grid: Simpson on consecutive interval pairs, with odd nodes
/// (and a trailing single interval) filled from the local quadratic.
pub fn cumulative_simpson(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
        return out;
    }
    let mut k = 0;
    while k + 2 < n {
        let xs = [t[k], t[k + 1], t[k + 2]];
        let fs = [f[k], f[k + 1], f[k + 2]];
        out[k + 1] = out[k] + quad_interp_integral(xs, fs, t[k], t[k + 1]);
        out[k + 2] = out[k] + quad_interp_integral(xs, fs, t[k], t[k + 2]);
        k += 2;
    }
    if k + 1 < n {
        let xs = [t[k - 1], t[k], t[k + 1]];
        let fs = [f[k - 1], f[k], f[k + 1]];
        out[k + 1] = out[k] + quad_interp_integral(xs, fs, t[k], t[k + 1]);
    }
    out
}

/// ∫_lo^hi of the quadratic through three points, in coordinates centred on xs[1].
fn quad_interp_integral(xs: [f64; 3], fs: [f64; 3], lo: f64, hi: f64) -> f64 {
    let c = xs[1];
    let x = [xs[0] - c, 0.0, xs[2] - c];
    let (a, b) = (lo - c, hi - c);
    let mut total = 0.0;
    for i in 0..3 {
        let (p, q) = match i {
            0 => (x[1], x[2]),
            1 => (x[0], x[2]),
            _ => (x[0], x[1]),
        };
        let den = (x[i] - p) * (x[i] - q);
        // ∫ (s − p)(s − q) ds = s³/3 − (p + q)s²/2 + pq·s
        let anti = |s: f64| s * s * s / 3.0 - (p + q) * s * s / 2.0 + p * q * s;
        total += fs[i] * (anti(b) - anti(a)) / den;
    }
    total
}
