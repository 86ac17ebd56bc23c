//! Born-type readouts in orthogonal contexts, the modal interference split,
//! and sequential (order-effect) readouts.

use crate::error::{LarError, Result};
use crate::linalg::{ensure_dim, ensure_square, expm, general_eig_with, linear_solve_with, to_complex_vec, CVec, RMat, RVec};
use crate::onshell::PreferenceOperator;
use crate::simplex::{check_unit, readout};
use crate::split_complex::{check_hyperbolic_phases, SplitScalar, SplitVector};
use crate::tol::Tolerances;
use num_complex::Complex64;

/// Orthogonal matrix whose columns b₁…bₙ define the readout basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutContext {
    b: RMat,
}

impl ReadoutContext {
    pub fn new(b: RMat) -> Result<Self> {
        Self::new_with(b, &Tolerances::default())
    }

    pub fn new_with(b: RMat, tol: &Tolerances) -> Result<Self> {
        let n = ensure_square(&b)?;
        if b.iter().any(|x| !x.is_finite()) {
            return Err(LarError::NonFinite { what: "context" });
        }
        let defect = (b.transpose() * &b - RMat::identity(n, n)).norm();
        if defect > tol.orthogonality {
            return Err(LarError::NotOrthogonal { defect });
        }
        Ok(ReadoutContext { b })
    }

    pub fn canonical(n: usize) -> Self {
        ReadoutContext { b: RMat::identity(n, n) }
    }

    /// Planar rotation by `angle` in the (i, j) coordinate plane of ℝⁿ.
    pub fn rotation(n: usize, i: usize, j: usize, angle: f64) -> Result<Self> {
        if i >= n || j >= n || i == j {
            return Err(LarError::InvalidArgument(format!("rotation plane ({i}, {j}) invalid for n = {n}")));
        }
        let mut b = RMat::identity(n, n);
        let (s, c) = angle.sin_cos();
        b[(i, i)] = c;
        b[(j, i)] = s;
        b[(i, j)] = -s;
        b[(j, j)] = c;
        Ok(ReadoutContext { b })
    }

    pub fn matrix(&self) -> &RMat {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.b.nrows()
    }
}

/// π_B(ρ)ₖ = ⟨bₖ, ρ⟩².
pub fn context_readout(rho: &RVec, ctx: &ReadoutContext) -> Result<RVec> {
    context_readout_with(rho, ctx, &Tolerances::default())
}

pub fn context_readout_with(rho: &RVec, ctx: &ReadoutContext, tol: &Tolerances) -> Result<RVec> {
    ensure_dim(ctx.n(), rho.len())?;
    check_unit(rho, tol)?;
    Ok((ctx.b.transpose() * rho).map(|x| x * x))
}

/// Builds ψᵢ = ρ̃ᵢuᵢ in 𝔻 and returns max |ψᵢ^#ψᵢ/Σψₖ^#ψₖ − readout(ρ̃)ᵢ|.
pub fn hyperbolic_born_check(rho_tilde: &RVec, u: &SplitVector) -> Result<f64> {
    hyperbolic_born_check_with(rho_tilde, u, &Tolerances::default())
}

pub fn hyperbolic_born_check_with(rho_tilde: &RVec, u: &SplitVector, tol: &Tolerances) -> Result<f64> {
    ensure_dim(rho_tilde.len(), u.len())?;
    check_hyperbolic_phases(u, tol)?;
    let q = readout(rho_tilde)?;
    let m = rho_tilde.amax();
    let born: Vec<f64> = (0..u.len())
        .map(|i| {
            let psi: SplitScalar = u.get(i) * (rho_tilde[i] / m);
            // ψ^#ψ = a² − b² has no j part.
            (psi.conj() * psi).a
        })
        .collect();
    let z: f64 = born.iter().sum();
    Ok(born.iter().zip(q.iter()).map(|(b, q)| (b / z - q).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceReport {
    pub time: f64,
    /// Σₐ (P_{ia}cₐ)² e^{2λₐt}.
    pub diagonal: RVec,
    /// total − diagonal.
    pub cross: RVec,
    /// (Σₐ P_{ia}cₐe^{λₐt})².
    pub total: RVec,
    /// ρ̃ᵢ(t)² from the matrix-exponential flow.
    pub flow_total: RVec,
    /// max |total − flow_total| / max(1, max flow_total).
    pub flow_defect: f64,
    /// Largest imaginary part among diagonal, cross and total.
    pub imaginary_residue: f64,
    pub eigen_residual: f64,
    pub condition: f64,
}

pub fn interference_decomposition(op: &PreferenceOperator, rho0: &RVec, t: f64) -> Result<InterferenceReport> {
    interference_decomposition_with(op, rho0, t, &Tolerances::default())
}

pub fn interference_decomposition_with(
    op: &PreferenceOperator,
    rho0: &RVec,
    t: f64,
    tol: &Tolerances,
) -> Result<InterferenceReport> {
    let n = op.n();
    ensure_dim(n, rho0.len())?;
    let eig = general_eig_with(op.v(), tol)?;
    let p = &eig.eigenvectors;
    let coeffs = linear_solve_with(p, &to_complex_vec(rho0), tol)?;
    let growth: Vec<Complex64> = eig.eigenvalues.iter().map(|l| (l * t).exp()).collect();

    let mut diagonal = CVec::zeros(n);
    let mut total = CVec::zeros(n);
    for i in 0..n {
        let mut z = Complex64::new(0.0, 0.0);
        for a in 0..n {
            let m = p[(i, a)] * coeffs[a] * growth[a];
            diagonal[i] += m * m;
            z += m;
        }
        total[i] = z * z;
    }
    let cross = &total - &diagonal;
    let imaginary_residue = diagonal
        .iter()
        .chain(cross.iter())
        .chain(total.iter())
        .map(|x| x.im.abs())
        .fold(0.0, f64::max);

    let flow = expm(op.v(), t)? * rho0;
    let flow_total = flow.map(|x| x * x);
    let total_re = total.map(|x| x.re);
    let flow_defect = (&total_re - &flow_total).amax() / flow_total.amax().max(1.0);

    Ok(InterferenceReport {
        time: t,
        diagonal: diagonal.map(|x| x.re),
        cross: cross.map(|x| x.re),
        total: total_re,
        flow_total,
        flow_defect,
        imaginary_residue,
        eigen_residual: eig.residual_norm,
        condition: eig.condition,
    })
}

/// Label carried by every sequential readout: the update rule is a
/// modelling convention, not part of the theory.
pub const SEQUENTIAL_PROVENANCE: &str = "convention:rank-one-collapse";

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialReadout {
    /// p(k, j): outcome k in B1, then j in B2.
    pub forward: RMat,
    /// p(j, k): outcome j in B2, then k in B1.
    pub reverse: RMat,
    /// max_{k,j} |forward(k, j) − reverse(j, k)|.
    pub order_defect: f64,
    /// max_k |Σⱼ forward(k, j) − π_{B1}(ρ)ₖ|.
    pub marginal_defect: f64,
    pub provenance: &'static str,
}

/// p(k, j) = π_{B1}(ρ)ₖ · ⟨b2ⱼ, b1ₖ⟩², the state collapsing onto b1ₖ after
/// the first readout.
pub fn sequential_readout(rho: &RVec, b1: &ReadoutContext, b2: &ReadoutContext) -> Result<SequentialReadout> {
    sequential_readout_with(rho, b1, b2, &Tolerances::default())
}

pub fn sequential_readout_with(
    rho: &RVec,
    b1: &ReadoutContext,
    b2: &ReadoutContext,
    tol: &Tolerances,
) -> Result<SequentialReadout> {
    ensure_dim(b1.n(), b2.n())?;
    let p1 = context_readout_with(rho, b1, tol)?;
    let p2 = context_readout_with(rho, b2, tol)?;
    // overlap(k, j) = ⟨b1ₖ, b2ⱼ⟩²
    let overlap = (b1.matrix().transpose() * b2.matrix()).map(|x| x * x);
    let n = b1.n();
    let forward = RMat::from_fn(n, n, |k, j| p1[k] * overlap[(k, j)]);
    let reverse = RMat::from_fn(n, n, |j, k| p2[j] * overlap[(k, j)]);
    let order_defect = (0..n)
        .flat_map(|k| (0..n).map(move |j| (k, j)))
        .map(|(k, j)| (forward[(k, j)] - reverse[(j, k)]).abs())
        .fold(0.0, f64::max);
    let marginal_defect = (0..n)
        .map(|k| (forward.row(k).sum() - p1[k]).abs())
        .fold(0.0, f64::max);
    Ok(SequentialReadout { forward, reverse, order_defect, marginal_defect, provenance: SEQUENTIAL_PROVENANCE })
}

/// π_B(ψ)ₖ = |⟨bₖ, ψ⟩|² / ‖ψ‖².
pub fn elliptic_context_readout(psi: &CVec, ctx: &ReadoutContext) -> Result<RVec> {
    ensure_dim(ctx.n(), psi.len())?;
    let nrm = psi.norm();
    if nrm == 0.0 {
        return Err(LarError::ZeroVector);
    }
    if !nrm.is_finite() {
        return Err(LarError::NonFinite { what: "state" });
    }
    let b = ctx.matrix();
    Ok(RVec::from_fn(ctx.n(), |k, _| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..ctx.n() {
            acc += psi[i] / nrm * b[(i, k)];
        }
        acc.norm_sqr()
    }))
}
