//! Split-complex numbers 𝔻 = {a + bj : j² = +1} and the para-Schrödinger flow.
//!
//! Everything is done in the idempotent basis e± = ½(1 ± j), where
//! a + bj = (a + b)e₊ + (a − b)e₋ and multiplication is componentwise.
//! There is deliberately no division: 𝔻 has zero divisors (e₊e₋ = 0).

use crate::error::{LarError, Result};
use crate::grid::{self, Trajectory};
use crate::linalg::{check_skew, check_symmetric, ensure_dim, ensure_square, expm, RMat, RVec};
use crate::onshell::PreferenceOperator;
use crate::par::{map_slice, Execution};
use crate::tol::Tolerances;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplitScalar {
    pub a: f64,
    pub b: f64,
}

impl SplitScalar {
    pub const ONE: SplitScalar = SplitScalar { a: 1.0, b: 0.0 };
    pub const J: SplitScalar = SplitScalar { a: 0.0, b: 1.0 };
    pub const E_PLUS: SplitScalar = SplitScalar { a: 0.5, b: 0.5 };
    pub const E_MINUS: SplitScalar = SplitScalar { a: 0.5, b: -0.5 };

    pub fn new(a: f64, b: f64) -> Self {
        SplitScalar { a, b }
    }

    /// a + bj ↦ a − bj.
    pub fn conj(self) -> Self {
        SplitScalar { a: self.a, b: -self.b }
    }

    /// (λ₊, λ₋) = (a + b, a − b).
    pub fn idem_decompose(self) -> (f64, f64) {
        (self.a + self.b, self.a - self.b)
    }

    pub fn idem_reconstruct(plus: f64, minus: f64) -> Self {
        SplitScalar { a: 0.5 * (plus + minus), b: 0.5 * (plus - minus) }
    }

    /// x^#x = a² − b².
    pub fn quadratic(self) -> f64 {
        self.a * self.a - self.b * self.b
    }

    /// cosh s + j sinh s, on the identity component of the unit hyperbola.
    pub fn phase(s: f64) -> Self {
        SplitScalar { a: s.cosh(), b: s.sinh() }
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

impl Add for SplitScalar {
    type Output = SplitScalar;
    fn add(self, o: SplitScalar) -> SplitScalar {
        SplitScalar { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for SplitScalar {
    type Output = SplitScalar;
    fn sub(self, o: SplitScalar) -> SplitScalar {
        SplitScalar { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for SplitScalar {
    type Output = SplitScalar;
    fn neg(self) -> SplitScalar {
        SplitScalar { a: -self.a, b: -self.b }
    }
}

impl Mul for SplitScalar {
    type Output = SplitScalar;
    fn mul(self, o: SplitScalar) -> SplitScalar {
        SplitScalar { a: self.a * o.a + self.b * o.b, b: self.a * o.b + self.b * o.a }
    }
}

impl Mul<f64> for SplitScalar {
    type Output = SplitScalar;
    fn mul(self, c: f64) -> SplitScalar {
        SplitScalar { a: self.a * c, b: self.b * c }
    }
}

/// Componentwise 𝔻-vector stored as real and j parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitVector {
    pub a: RVec,
    pub b: RVec,
}

impl SplitVector {
    pub fn new(a: RVec, b: RVec) -> Result<Self> {
        ensure_dim(a.len(), b.len())?;
        Ok(SplitVector { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn get(&self, i: usize) -> SplitScalar {
        SplitScalar { a: self.a[i], b: self.b[i] }
    }

    /// (z₊, z₋) = (a + b, a − b).
    pub fn idem_decompose(&self) -> (RVec, RVec) {
        (&self.a + &self.b, &self.a - &self.b)
    }

    pub fn idem_reconstruct(plus: &RVec, minus: &RVec) -> Result<Self> {
        ensure_dim(plus.len(), minus.len())?;
        Ok(SplitVector { a: (plus + minus) * 0.5, b: (plus - minus) * 0.5 })
    }

    /// Lifts the amplitude onto the e₊ channel (z₊ = ρ̃, z₋ = 0).
    pub fn from_plus(plus: &RVec) -> Self {
        SplitVector { a: plus * 0.5, b: plus * 0.5 }
    }
}

/// ⟨Ψ, Φ⟩_𝔻 = Σ Ψᵢ^# Φᵢ.
pub fn krein_pairing(psi: &SplitVector, phi: &SplitVector) -> Result<SplitScalar> {
    ensure_dim(psi.len(), phi.len())?;
    let (pp, pm) = psi.idem_decompose();
    let (qp, qm) = phi.idem_decompose();
    // Conjugation swaps the idempotent channels.
    Ok(SplitScalar::idem_reconstruct(pm.dot(&qp), pp.dot(&qm)))
}

/// Para-Hermitian operator Ĥ_𝔻 = S + jF, kept as the real pair (S, F).
#[derive(Debug, Clone, PartialEq)]
pub struct SplitOperator {
    pub s: RMat,
    pub f: RMat,
}

impl SplitOperator {
    pub fn new(s: RMat, f: RMat) -> Result<Self> {
        ensure_square(&s)?;
        ensure_square(&f)?;
        ensure_dim(s.nrows(), f.nrows())?;
        Ok(SplitOperator { s, f })
    }

    pub fn from_operator(op: &PreferenceOperator) -> Self {
        SplitOperator { s: op.s().clone(), f: op.f().clone() }
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn is_para_hermitian(&self, tol: &Tolerances) -> bool {
        self.check(tol).is_ok()
    }

    fn check(&self, tol: &Tolerances) -> Result<()> {
        check_symmetric(&self.s, tol)?;
        check_skew(&self.f, tol)
    }

    /// Generators of the two idempotent channels: (F + S, F − S).
    pub fn channel_generators(&self) -> (RMat, RMat) {
        (&self.f + &self.s, &self.f - &self.s)
    }
}

/// Ψ̇ = jĤΨ, solved as ż± = (F ± S)z± and reassembled.
pub fn para_propagate(h: &SplitOperator, psi0: &SplitVector, times: &[f64]) -> Result<Trajectory<SplitVector>> {
    para_propagate_with(h, psi0, times, &Tolerances::default(), Execution::default())
}

pub fn para_propagate_with(
    h: &SplitOperator,
    psi0: &SplitVector,
    times: &[f64],
    tol: &Tolerances,
    exec: Execution,
) -> Result<Trajectory<SplitVector>> {
    h.check(tol)?;
    ensure_dim(h.n(), psi0.len())?;
    grid::validate(times)?;
    let (gp, gm) = h.channel_generators();
    let (zp, zm) = psi0.idem_decompose();
    let t0 = times[0];
    let states: Result<Vec<SplitVector>> = map_slice(exec, times, |&t| {
        let p = expm(&gp, t - t0)? * &zp;
        let m = expm(&gm, t - t0)? * &zm;
        SplitVector::idem_reconstruct(&p, &m)
    })
    .into_iter()
    .collect();
    Ok(Trajectory { times: times.to_vec(), states: states? })
}

/// ‖U(t)^#U(t) − I‖_F = ‖exp(t(F − S))ᵀ exp(t(F + S)) − I‖_F.
pub fn para_unitarity_defect(h: &SplitOperator, t: f64) -> Result<f64> {
    para_unitarity_defect_with(h, t, &Tolerances::default())
}

pub fn para_unitarity_defect_with(h: &SplitOperator, t: f64, tol: &Tolerances) -> Result<f64> {
    h.check(tol)?;
    let n = h.n();
    let (gp, gm) = h.channel_generators();
    let up = expm(&gp, t)?;
    let um = expm(&gm, t)?;
    Ok((um.transpose() * up - RMat::identity(n, n)).norm())
}

/// Validates that every phase lies on the unit hyperbola a² − b² = 1.
pub fn check_hyperbolic_phases(u: &SplitVector, tol: &Tolerances) -> Result<()> {
    for i in 0..u.len() {
        let p = u.get(i);
        if !p.is_finite() {
            return Err(LarError::NonFinite { what: "split phase" });
        }
        let defect = (p.quadratic() - 1.0).abs();
        if defect > tol.hyperbola {
            return Err(LarError::OffHyperbola { index: i, defect });
        }
    }
    Ok(())
}
