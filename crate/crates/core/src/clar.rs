//! Complex packaging z = ρ̃ + iy, polarisations, and the projected
//! (unitary) Schrödinger flow on the holomorphic leaf.

use crate::error::{LarError, Result};
use crate::grid;
use crate::lifted::{lifted_generator, PhaseState};
use crate::linalg::{ensure_dim, ensure_finite, ensure_square, expm, lu_solve_matrix, to_complex_mat, CMat, CVec, RMat};
use crate::onshell::PreferenceOperator;
use crate::par::{map_slice, Execution};
use crate::tol::Tolerances;
use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn complexify(z: &PhaseState) -> CVec {
    CVec::from_fn(z.n(), |i, _| Complex64::new(z.rho[i], z.y[i]))
}

pub fn decomplexify(z: &CVec) -> PhaseState {
    PhaseState { rho: z.map(|x| x.re), y: z.map(|x| x.im) }
}

/// A point of the complexified phase space ℂⁿ ⊕ ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPhase {
    pub rho: CVec,
    pub y: CVec,
}

impl ComplexPhase {
    pub fn new(rho: CVec, y: CVec) -> Result<Self> {
        ensure_dim(rho.len(), y.len())?;
        Ok(ComplexPhase { rho, y })
    }

    pub fn from_real(z: &PhaseState) -> Self {
        ComplexPhase { rho: z.rho.map(c), y: z.y.map(c) }
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn stacked(&self) -> CVec {
        let n = self.n();
        CVec::from_fn(2 * n, |i, _| if i < n { self.rho[i] } else { self.y[i - n] })
    }

    pub fn from_stacked(z: &CVec) -> Self {
        let n = z.len() / 2;
        ComplexPhase { rho: z.rows(0, n).into_owned(), y: z.rows(n, n).into_owned() }
    }
}

/// ż = (F − i/2)z + (S + i/2)z̄.
pub fn bogoliubov_rhs(z: &CVec, op: &PreferenceOperator) -> Result<CVec> {
    ensure_dim(op.n(), z.len())?;
    let zb = z.map(|x| x.conj());
    let f = to_complex_mat(op.f());
    let s = to_complex_mat(op.s());
    Ok(&f * z - z * (I * 0.5) + &s * &zb + &zb * (I * 0.5))
}

/// d‖z‖²/dt = 2 Re(z†(S + i/2)z̄).
pub fn hermitian_norm_rate(z: &CVec, op: &PreferenceOperator) -> Result<f64> {
    ensure_dim(op.n(), z.len())?;
    let zb = z.map(|x| x.conj());
    let w = to_complex_mat(op.s()) * &zb + &zb * (I * 0.5);
    Ok(2.0 * z.dotc(&w).re)
}

/// Ĥ = S + iF, Hermitian by construction.
pub fn hermitian_generator(op: &PreferenceOperator) -> CMat {
    CMat::from_fn(op.n(), op.n(), |i, j| Complex64::new(op.s()[(i, j)], op.f()[(i, j)]))
}

/// ‖Ĥ − Ĥ†‖_F for Ĥ = S + iF (zero up to rounding).
pub fn hermiticity_defect(op: &PreferenceOperator) -> f64 {
    let h = hermitian_generator(op);
    (&h - h.adjoint()).norm()
}

/// ‖Ĥ_ℂ − Ĥ_ℂ†‖_F for the packaging Ĥ_ℂ = iV; equals 2‖S‖_F.
pub fn non_hermitian_defect(op: &PreferenceOperator) -> f64 {
    let h = to_complex_mat(op.v()) * I;
    (&h - h.adjoint()).norm()
}

/// Complex symmetric M with invertible Im M.
#[derive(Debug, Clone)]
pub struct Polarization {
    m: CMat,
    /// (2i Im M)⁻¹
    w: CMat,
    normalized: Option<RMat>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub u: CVec,
    pub mu: CVec,
    /// ‖(b − Mu) − M̄(a − u)‖.
    pub complement_residual: f64,
}

impl Polarization {
    pub fn new(m: CMat) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: CMat, tol: &Tolerances) -> Result<Self> {
        let n = ensure_square(&m)?;
        ensure_finite(&m, "polarization")?;
        let asym = (&m - m.transpose()).norm();
        if asym > 1e-12 * m.norm().max(1.0) {
            return Err(LarError::NotSymmetric { defect: asym, tol: 1e-12 });
        }
        let two_i_im = m.map(|x| I * 2.0 * x.im);
        let w = lu_solve_matrix(&two_i_im, &CMat::identity(n, n), tol.pivot)?;
        Ok(Polarization { m, w, normalized: None })
    }

    /// M = R − iI.
    pub fn normalized(r: RMat) -> Result<Self> {
        let n = ensure_square(&r)?;
        crate::linalg::check_symmetric(&r, &Tolerances::default())?;
        let m = CMat::from_fn(n, n, |i, j| Complex64::new(r[(i, j)], if i == j { -1.0 } else { 0.0 }));
        let mut p = Self::new(m)?;
        p.normalized = Some(r);
        Ok(p)
    }

    /// M* = (1 − i)I.
    pub fn distinguished(n: usize) -> Self {
        Self::normalized(RMat::identity(n, n)).expect("identity is a valid normalisation")
    }

    pub fn m(&self) -> &CMat {
        &self.m
    }

    pub fn r(&self) -> Option<&RMat> {
        self.normalized.as_ref()
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    /// Splits (a, b) = (u, Mu) + (v, M̄v), returning the graph component.
    pub fn project(&self, a: &CVec, b: &CVec) -> Result<Projection> {
        ensure_dim(self.n(), a.len())?;
        ensure_dim(self.n(), b.len())?;
        let mbar = self.m.map(|x| x.conj());
        let u = &self.w * (b - &mbar * a);
        let mu = &self.m * &u;
        let complement_residual = ((b - &mu) - &mbar * (a - &u)).norm();
        Ok(Projection { u, mu, complement_residual })
    }

    /// Π = [[−WM̄, W], [−MWM̄, MW]] on ℂ²ⁿ with W = (2i Im M)⁻¹.
    pub fn projector_matrix(&self) -> CMat {
        let n = self.n();
        let mbar = self.m.map(|x| x.conj());
        let wm = &self.w * &mbar;
        let mut p = CMat::zeros(2 * n, 2 * n);
        p.view_mut((0, 0), (n, n)).copy_from(&(-&wm));
        p.view_mut((0, n), (n, n)).copy_from(&self.w);
        p.view_mut((n, 0), (n, n)).copy_from(&(-(&self.m * &wm)));
        p.view_mut((n, n), (n, n)).copy_from(&(&self.m * &self.w));
        p
    }
}

/// ψ = (I − iR)ρ̃ + iy, φ = (I + iR)ρ̃ − iy.
pub fn psi_phi_coords(z: &ComplexPhase, r: &RMat) -> Result<(CVec, CVec)> {
    ensure_dim(z.n(), r.nrows())?;
    let rc = to_complex_mat(r);
    let rr = &rc * &z.rho;
    let psi = &z.rho - &rr * I + &z.y * I;
    let phi = &z.rho + &rr * I - &z.y * I;
    Ok((psi, phi))
}

/// Inverse of [`psi_phi_coords`]: ρ̃ = (ψ + φ)/2, y = −i(ψ − (I − iR)ρ̃).
pub fn psi_phi_inverse(psi: &CVec, phi: &CVec, r: &RMat) -> Result<ComplexPhase> {
    ensure_dim(psi.len(), phi.len())?;
    ensure_dim(psi.len(), r.nrows())?;
    let rho = (psi + phi) * c(0.5);
    let base = &rho - to_complex_mat(r) * &rho * I;
    let y = (psi - base) * (-I);
    Ok(ComplexPhase { rho, y })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClarTrajectory {
    pub times: Vec<f64>,
    /// ψ(t) = exp(−i(t − t₀)(I + S + iF))ψ₀.
    pub psi: Vec<CVec>,
    /// Ψ(t) = e^{it}ψ(t).
    pub big_psi: Vec<CVec>,
}

pub fn clar_flow(op: &PreferenceOperator, psi0: &CVec, times: &[f64]) -> Result<ClarTrajectory> {
    clar_flow_exec(op, psi0, times, Execution::default())
}

pub fn clar_flow_exec(
    op: &PreferenceOperator,
    psi0: &CVec,
    times: &[f64],
    exec: Execution,
) -> Result<ClarTrajectory> {
    ensure_dim(op.n(), psi0.len())?;
    ensure_finite(&CMat::from_column_slice(psi0.len(), 1, psi0.as_slice()), "initial state")?;
    grid::validate(times)?;
    let n = op.n();
    let gen = (hermitian_generator(op) + CMat::identity(n, n)) * (-I);
    let t0 = times[0];
    let psi: Result<Vec<CVec>> = map_slice(exec, times, |&t| Ok(expm(&gen, t - t0)? * psi0))
        .into_iter()
        .collect();
    let psi = psi?;
    let big_psi = psi
        .iter()
        .zip(times)
        .map(|(p, &t)| p * Complex64::from_polar(1.0, t))
        .collect();
    Ok(ClarTrajectory { times: times.to_vec(), psi, big_psi })
}

/// ‖G(t)†G(t) − I‖_F for the Ψ-propagator G(t) = exp(−itĤ).
pub fn clar_unitarity_defect(op: &PreferenceOperator, t: f64) -> Result<f64> {
    let n = op.n();
    let g = expm(&(hermitian_generator(op) * (-I)), t)?;
    Ok((g.adjoint() * &g - CMat::identity(n, n)).norm())
}

/// Evolves z₀ by the projected generator ΠA on ℂ²ⁿ and returns
/// max‖φ(t) − φ(t₀)‖. Needs the normalised form M = R − iI so that φ is defined.
pub fn clar_leaf_defect(op: &PreferenceOperator, pol: &Polarization, z0: &ComplexPhase, times: &[f64]) -> Result<f64> {
    let traj = projected_flow(op, pol, z0, times)?;
    leaf_drift(pol, &traj)
}

/// exp((t − t₀)ΠA) z₀ on the grid.
pub fn projected_flow(
    op: &PreferenceOperator,
    pol: &Polarization,
    z0: &ComplexPhase,
    times: &[f64],
) -> Result<Vec<ComplexPhase>> {
    ensure_dim(op.n(), pol.n())?;
    ensure_dim(op.n(), z0.n())?;
    grid::validate(times)?;
    let gen = pol.projector_matrix() * to_complex_mat(&lifted_generator(op));
    flow_complex(&gen, z0, times)
}

/// The same leaf functional along the unprojected (complexified) lifted flow;
/// generically nonzero, which shows the projection is a genuine restriction.
pub fn unprojected_leaf_defect(
    op: &PreferenceOperator,
    pol: &Polarization,
    z0: &ComplexPhase,
    times: &[f64],
) -> Result<f64> {
    ensure_dim(op.n(), z0.n())?;
    grid::validate(times)?;
    let gen = to_complex_mat(&lifted_generator(op));
    let traj = flow_complex(&gen, z0, times)?;
    leaf_drift(pol, &traj)
}

fn flow_complex(gen: &CMat, z0: &ComplexPhase, times: &[f64]) -> Result<Vec<ComplexPhase>> {
    let s0 = z0.stacked();
    let t0 = times[0];
    map_slice(Execution::default(), times, |&t| Ok(ComplexPhase::from_stacked(&(expm(gen, t - t0)? * &s0))))
        .into_iter()
        .collect()
}

fn leaf_drift(pol: &Polarization, traj: &[ComplexPhase]) -> Result<f64> {
    let r = pol.r().ok_or(LarError::NotNormalized)?;
    let (_, phi0) = psi_phi_coords(&traj[0], r)?;
    let mut worst = 0.0f64;
    for z in traj {
        let (_, phi) = psi_phi_coords(z, r)?;
        worst = worst.max((phi - &phi0).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn op(v: RMat) -> PreferenceOperator {
        PreferenceOperator::new(v).unwrap()
    }

    fn cv(xs: &[(f64, f64)]) -> CVec {
        CVec::from_iterator(xs.len(), xs.iter().map(|&(a, b)| Complex64::new(a, b)))
    }

    #[test]
    fn complexify_examples() {
        let e1 = PhaseState::on_shell(dvector![1.0, 0.0]);
        assert_eq!(complexify(&e1), cv(&[(1.0, 0.0), (0.0, 0.0)]));
        let z = PhaseState::new(dvector![0.0, 0.0], dvector![0.0, 1.0]).unwrap();
        assert_eq!(complexify(&z), cv(&[(0.0, 0.0), (0.0, 1.0)]));
        let w = PhaseState::new(dvector![0.3, -1.5], dvector![2.0, 0.25]).unwrap();
        assert_eq!(decomplexify(&complexify(&w)), w);
    }

    #[test]
    fn real_leaf_reduction() {
        let p = op(RMat::from_row_slice(2, 2, &[0.5, 1.0, -0.3, 2.0]));
        let z = cv(&[(0.7, 0.0), (-1.1, 0.0)]);
        let rhs = bogoliubov_rhs(&z, &p).unwrap();
        let want = p.v() * dvector![0.7, -1.1];
        assert!((rhs.map(|x| x.re) - want).amax() < 1e-15);
        assert!(rhs.iter().all(|x| x.im.abs() < 1e-15));
        let rate = hermitian_norm_rate(&z, &p).unwrap();
        let zr = dvector![0.7, -1.1];
        assert!((rate - 2.0 * zr.dot(&(p.s() * &zr))).abs() < 1e-14);
        let skew = op(RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert!(hermitian_norm_rate(&z, &skew).unwrap().abs() < 1e-15);
    }

    #[test]
    fn projector_closed_form_r_zero() {
        let pol = Polarization::normalized(RMat::zeros(2, 2)).unwrap();
        let a = cv(&[(1.0, 0.5), (-2.0, 1.0)]);
        let b = cv(&[(0.3, -0.1), (0.0, 2.0)]);
        let pr = pol.project(&a, &b).unwrap();
        let want = (&a + &b * I) * c(0.5);
        assert!((&pr.u - want).norm() < 1e-15);
        assert!(pr.complement_residual < 1e-15);
        let again = pol.project(&pr.u, &pr.mu).unwrap();
        assert!((again.u - pr.u).norm() < 1e-15);
    }

    #[test]
    fn psi_phi_examples() {
        let r = RMat::identity(2, 2);
        let rho = cv(&[(0.4, 0.0), (-0.9, 0.0)]);
        let on_graph = ComplexPhase::new(rho.clone(), &rho * Complex64::new(1.0, -1.0)).unwrap();
        let (_, phi) = psi_phi_coords(&on_graph, &r).unwrap();
        assert!(phi.norm() < 1e-15);

        let rr = RMat::from_row_slice(2, 2, &[0.5, 0.2, 0.2, -1.0]);
        let z = ComplexPhase::from_real(&PhaseState::on_shell(dvector![1.0, 2.0]));
        let (psi, phi) = psi_phi_coords(&z, &rr).unwrap();
        let rz = &rr * dvector![1.0, 2.0];
        for k in 0..2 {
            assert!((psi[k] - Complex64::new([1.0, 2.0][k], -rz[k])).norm() < 1e-15);
            assert!((phi[k] - Complex64::new([1.0, 2.0][k], rz[k])).norm() < 1e-15);
        }
        let back = psi_phi_inverse(&psi, &phi, &rr).unwrap();
        assert!((back.rho - z.rho).norm() < 1e-15 && (back.y - z.y).norm() < 1e-15);
    }

    #[test]
    fn clar_examples() {
        let p = op(RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let psi0 = cv(&[(0.6, 0.0), (0.0, 0.8)]);
        let times = [0.0, 1.0, 2.0 * std::f64::consts::PI];
        let tr = clar_flow(&p, &psi0, &times).unwrap();
        for x in &tr.big_psi {
            assert!((x.norm() - 1.0).abs() < 1e-13);
        }
        assert!((&tr.big_psi[2] - &psi0).norm() < 1e-10);

        let th = dvector![0.5, -2.0];
        let d = op(RMat::from_diagonal(&th));
        let tr = clar_flow(&d, &psi0, &[0.0, 1.3]).unwrap();
        for k in 0..2 {
            let want = psi0[k] * Complex64::from_polar(1.0, -th[k] * 1.3);
            assert!((tr.big_psi[1][k] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn packaging_defects() {
        let p = op(RMat::from_row_slice(2, 2, &[1.0, 2.0, 0.0, -1.0]));
        assert!(hermiticity_defect(&p) < 1e-16);
        assert!((non_hermitian_defect(&p) - 2.0 * p.s().norm()).abs() < 1e-14);
        let skew = op(RMat::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]));
        assert!(non_hermitian_defect(&skew) < 1e-16);
    }

    #[test]
    fn leaf_needs_normalised_form() {
        let m = CMat::from_diagonal(&cv(&[(0.0, 2.0), (1.0, -1.0)]));
        let pol = Polarization::new(m).unwrap();
        let p = op(RMat::identity(2, 2));
        let z = ComplexPhase::from_real(&PhaseState::on_shell(dvector![1.0, 0.0]));
        assert!(matches!(clar_leaf_defect(&p, &pol, &z, &[0.0, 1.0]), Err(LarError::NotNormalized)));
        let singular = CMat::identity(2, 2);
        assert!(Polarization::new(singular).is_err());
    }
}
