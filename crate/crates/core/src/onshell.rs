//! Zero-residual amplitude flow ρ̃̇ = Vρ̃ and its diagnostics.

use crate::error::{LarError, Result};
use crate::grid::{self, Trajectory};
use crate::linalg::{check_skew, check_symmetric, ensure_dim, ensure_finite, ensure_square, expm, sym_eig_with, sym_skew_split, RMat, RVec, SymEigen};
use crate::par::{map_slice, Execution};
use crate::simplex::{check_interior, check_unit, readout};
use crate::tol::Tolerances;

/// The latent generator V = S + F with cached split and spectrum of S.
#[derive(Debug, Clone)]
pub struct PreferenceOperator {
    v: RMat,
    s: RMat,
    f: RMat,
    s_eigs: SymEigen,
}

impl PreferenceOperator {
    pub fn new(v: RMat) -> Result<Self> {
        Self::new_with(v, &Tolerances::default())
    }

    pub fn new_with(v: RMat, tol: &Tolerances) -> Result<Self> {
        ensure_square(&v)?;
        ensure_finite(&v, "generator")?;
        let (s, f) = sym_skew_split(&v)?;
        let s_eigs = sym_eig_with(&s, tol)?;
        Ok(PreferenceOperator { v, s, f, s_eigs })
    }

    /// Builds V = S + F from a declared symmetric and skew pair.
    pub fn from_parts(s: RMat, f: RMat) -> Result<Self> {
        Self::from_parts_with(s, f, &Tolerances::default())
    }

    pub fn from_parts_with(s: RMat, f: RMat, tol: &Tolerances) -> Result<Self> {
        ensure_finite(&s, "symmetric part")?;
        ensure_finite(&f, "skew part")?;
        check_symmetric(&s, tol)?;
        check_skew(&f, tol)?;
        ensure_dim(s.nrows(), f.nrows())?;
        Self::new_with(&s + &f, tol)
    }

    pub fn n(&self) -> usize {
        self.v.nrows()
    }

    pub fn v(&self) -> &RMat {
        &self.v
    }

    pub fn s(&self) -> &RMat {
        &self.s
    }

    pub fn f(&self) -> &RMat {
        &self.f
    }

    pub fn s_eigs(&self) -> &SymEigen {
        &self.s_eigs
    }

    pub fn lambda_min(&self) -> f64 {
        self.s_eigs.min()
    }

    /// S₊ = S − λ_min I, positive semidefinite.
    pub fn s_plus(&self) -> RMat {
        let n = self.n();
        &self.s - RMat::identity(n, n) * self.lambda_min()
    }

    /// Same operator shifted by c·I (a pure gauge change).
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let n = self.n();
        Self::new(&self.v + RMat::identity(n, n) * c)
    }
}

pub type AmplitudeTrajectory = Trajectory<RVec>;

impl AmplitudeTrajectory {
    pub fn radius(&self, k: usize) -> f64 {
        self.states[k].norm()
    }

    /// 𝒵(t) = ‖ρ̃(t)‖².
    pub fn normaliser(&self, k: usize) -> f64 {
        self.states[k].norm_squared()
    }

    pub fn lottery(&self, k: usize) -> Result<RVec> {
        readout(&self.states[k])
    }
}

/// X_V(ρ) = Q_ρVρ, the tangential projection of Vρ.
pub fn lar_field(rho: &RVec, op: &PreferenceOperator) -> Result<RVec> {
    lar_field_with(rho, op, &Tolerances::default())
}

pub fn lar_field_with(rho: &RVec, op: &PreferenceOperator, tol: &Tolerances) -> Result<RVec> {
    ensure_dim(op.n(), rho.len())?;
    check_unit(rho, tol)?;
    let vr = op.v() * rho;
    let m = rho.dot(&vr);
    Ok(vr - rho * m)
}

/// Samples ρ̃(t) = exp((t − t₀)V) ρ̃₀, where t₀ is the first grid time.
pub fn onshell_flow(op: &PreferenceOperator, rho0: &RVec, times: &[f64]) -> Result<AmplitudeTrajectory> {
    onshell_flow_exec(op, rho0, times, Execution::default())
}

pub fn onshell_flow_exec(
    op: &PreferenceOperator,
    rho0: &RVec,
    times: &[f64],
    exec: Execution,
) -> Result<AmplitudeTrajectory> {
    ensure_dim(op.n(), rho0.len())?;
    if rho0.iter().any(|x| !x.is_finite()) {
        return Err(LarError::NonFinite { what: "initial amplitude" });
    }
    if rho0.amax() == 0.0 {
        return Err(LarError::ZeroVector);
    }
    grid::validate(times)?;
    let t0 = times[0];
    let states: Result<Vec<RVec>> = map_slice(exec, times, |&t| Ok(expm(op.v(), t - t0)? * rho0))
        .into_iter()
        .collect();
    Ok(Trajectory { times: times.to_vec(), states: states? })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarRates {
    /// ṙ = ⟨ρ, Sρ⟩ r.
    pub radial: f64,
    /// ρ̇ = (F + S − ⟨ρ, Sρ⟩I)ρ.
    pub direction: RVec,
}

pub fn polar_rates(rho_tilde: &RVec, op: &PreferenceOperator) -> Result<PolarRates> {
    ensure_dim(op.n(), rho_tilde.len())?;
    let r = rho_tilde.norm();
    if r == 0.0 {
        return Err(LarError::ZeroVector);
    }
    let rho = rho_tilde / r;
    let sr = op.s() * &rho;
    let m = rho.dot(&sr);
    let direction = op.f() * &rho + sr - &rho * m;
    Ok(PolarRates { radial: m * r, direction })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clock {
    /// σ₊(t) = log‖ρ̃(t)‖ − λ_min t.
    pub sigma_plus: Vec<f64>,
    /// ⟨ρ, S₊ρ⟩ at each sample, the rate of σ₊.
    pub production: Vec<f64>,
}

pub fn entropic_clock(traj: &AmplitudeTrajectory, op: &PreferenceOperator) -> Result<Clock> {
    let lmin = op.lambda_min();
    let mut sigma_plus = Vec::with_capacity(traj.len());
    let mut production = Vec::with_capacity(traj.len());
    for (t, x) in traj.iter() {
        ensure_dim(op.n(), x.len())?;
        let r = x.norm();
        if r == 0.0 || !r.is_finite() {
            return Err(LarError::ZeroVector);
        }
        let rho = x / r;
        sigma_plus.push(r.ln() - lmin * t);
        // ⟨ρ, Sρ⟩ − λ_min is nonnegative in exact arithmetic; clip rounding.
        production.push((rho.dot(&(op.s() * &rho)) - lmin).max(0.0));
    }
    Ok(Clock { sigma_plus, production })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergy {
    pub log_z: f64,
    /// Σ qᵢφᵢ + ℋ(q) with φᵢ = log ρ̃ᵢ².
    pub dual: f64,
    pub defect: f64,
}

/// log𝒵 against its free-energy decomposition; zero components contribute
/// nothing (0·log 0 = 0).
pub fn free_energy_check(rho_tilde: &RVec) -> Result<FreeEnergy> {
    if rho_tilde.iter().any(|x| !x.is_finite()) {
        return Err(LarError::NonFinite { what: "amplitude" });
    }
    let m = rho_tilde.amax();
    if m == 0.0 {
        return Err(LarError::ZeroVector);
    }
    let scaled_z: f64 = rho_tilde.iter().map(|x| (x / m) * (x / m)).sum();
    let log_z = 2.0 * m.ln() + scaled_z.ln();
    let mut energy = 0.0;
    let mut entropy = 0.0;
    for &x in rho_tilde.iter() {
        if x == 0.0 {
            continue;
        }
        let q = (x / m) * (x / m) / scaled_z;
        if q == 0.0 {
            continue;
        }
        energy += q * 2.0 * x.abs().ln();
        entropy -= q * q.ln();
    }
    let dual = energy + entropy;
    Ok(FreeEnergy { log_z, dual, defect: (log_z - dual).abs() })
}

/// qₖ(T) ∝ qₖ(0)·e^{2Tθₖ}; the inverse temperature of the softmax is 2T.
pub fn logit_posterior(q0: &RVec, theta: &RVec, t: f64) -> Result<RVec> {
    logit_posterior_with(q0, theta, t, &Tolerances::default())
}

pub fn logit_posterior_with(q0: &RVec, theta: &RVec, t: f64, tol: &Tolerances) -> Result<RVec> {
    check_interior(q0, tol)?;
    ensure_dim(q0.len(), theta.len())?;
    let logits = RVec::from_fn(q0.len(), |i, _| q0[i].ln() + 2.0 * t * theta[i]);
    let mx = logits.max();
    let w = logits.map(|l| (l - mx).exp());
    let s = w.sum();
    Ok(w / s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeuLimit {
    pub q_star: RVec,
    /// λ₁ − λ₂ of S (infinite for n = 1).
    pub gap: f64,
}

/// Projective limit of the on-shell flow of a symmetric S: the squared,
/// normalised dominant eigenvector.
pub fn peu_limit(s: &RMat, rho0: &RVec) -> Result<PeuLimit> {
    peu_limit_with(s, rho0, &Tolerances::default())
}

pub fn peu_limit_with(s: &RMat, rho0: &RVec, tol: &Tolerances) -> Result<PeuLimit> {
    let e = sym_eig_with(s, tol)?;
    let n = e.values.len();
    ensure_dim(n, rho0.len())?;
    let r = rho0.norm();
    if r == 0.0 {
        return Err(LarError::ZeroVector);
    }
    let gap = if n > 1 { e.values[n - 1] - e.values[n - 2] } else { f64::INFINITY };
    if gap <= tol.gap {
        return Err(LarError::DegenerateTopEigenvalue { gap, tol: tol.gap });
    }
    let w = e.vectors.column(n - 1).into_owned();
    let overlap = w.dot(rho0).abs() / r;
    if overlap <= tol.overlap {
        return Err(LarError::OrthogonalStart { overlap });
    }
    let q_star = readout(&w)?;
    Ok(PeuLimit { q_star, gap })
}
