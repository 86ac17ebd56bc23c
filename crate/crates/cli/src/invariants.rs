//! The invariant table: every structural identity the engine promises,
//! measured on the scenario's generator.

use crate::scenario::Validated;
use lar_core::clar::{
    clar_flow, clar_leaf_defect, clar_unitarity_defect, hermiticity_defect, non_hermitian_defect, ComplexPhase,
    Polarization,
};
use lar_core::grid::linspace;
use lar_core::lifted::{
    block_consistency_defect, hamiltonian, hamiltonian_property_defect, lifted_flow, lifted_generator, neutral_index,
    symplectic_defect, witt_shear_split, PhaseState,
};
use lar_core::linalg::{to_complex_mat, CVec, RMat, RVec};
use lar_core::onshell::{entropic_clock, free_energy_check, onshell_flow};
use lar_core::readout::{context_readout, interference_decomposition, sequential_readout};
use lar_core::rng::LarRng;
use lar_core::simplex::{fr_circle, loop_holonomy, readout, HolonomyOptions};
use lar_core::split_complex::{para_propagate, para_unitarity_defect, SplitOperator, SplitVector};
use lar_core::{LarError, Result};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantRow {
    pub name: &'static str,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Rows {
    rows: Vec<InvariantRow>,
    scale: f64,
}

impl Rows {
    fn push(&mut self, name: &'static str, defect: f64, tolerance: f64) {
        let tolerance = tolerance * self.scale;
        // NaN never passes.
        let pass = defect <= tolerance;
        self.rows.push(InvariantRow { name, defect, tolerance, pass });
    }
}

fn max(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn min_increment(xs: &[f64]) -> f64 {
    xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Runs every applicable invariant. Rows whose hypothesis fails for this
/// generator (e.g. norm conservation needs Ŝ = 0) are omitted, not passed.
/// `tol_scale` multiplies every tolerance.
pub fn invariant_suite(v: &Validated, tol_scale: f64) -> Result<Vec<InvariantRow>> {
    let mut out = Rows { rows: Vec::new(), scale: tol_scale };
    let op = &v.op;
    let n = v.n();
    let times = &v.times;
    let mut aux = LarRng::new(v.scenario.params.seed);
    let s_zero = op.s().iter().all(|&x| x == 0.0);
    let f_zero = op.f().iter().all(|&x| x == 0.0);

    // Packagings.
    out.push("hermitian generator", hermiticity_defect(op), 1e-14);
    let s_norm = op.s().norm();
    out.push("non-hermitian packaging", (non_hermitian_defect(op) - 2.0 * s_norm).abs(), 1e-12 * s_norm.max(1.0));

    // Lifted system.
    out.push("hamiltonian generator", hamiltonian_property_defect(&lifted_generator(op)), 1e-14);
    let w = witt_shear_split(op);
    let reassembly = (&w.a_pu + &w.a_sh - lifted_generator(op)).amax();
    out.push("witt split", w.nilpotency_defect() + w.commutator_defect() + reassembly, 0.0);
    out.push(
        "symplectic defect",
        max([0.5, 1.0, 2.0].iter().map(|&t| symplectic_defect(op, t)).collect::<Result<Vec<_>>>()?),
        1e-10,
    );

    let on = onshell_flow(op, &v.rho0, times)?;
    let leaf = lifted_flow(op, &PhaseState::on_shell(v.rho0.clone()), times)?;
    out.push("zero-residual leaf", max(leaf.states.iter().map(|z| z.y.norm())), 1e-13);
    let scale = max(on.states.iter().map(|x| x.amax())).max(1.0);
    out.push(
        "leaf equals on-shell flow",
        max(leaf.states.iter().zip(&on.states).map(|(z, x)| (&z.rho - x).amax())) / scale,
        1e-11,
    );

    let y0 = if v.is_off_shell() { v.y0.clone() } else { aux.vector(n) };
    let z0 = PhaseState { rho: v.rho0.clone(), y: y0 };
    let off = lifted_flow(op, &z0, times)?;
    let lambda: Vec<f64> = off.states.iter().map(PhaseState::neutral).collect();
    out.push("lambda monotone", (-min_increment(&lambda)).max(0.0), 1e-10);
    let dense = lifted_flow(op, &z0, &linspace(0.0, 2.0, 400))?;
    out.push("lambda balance", neutral_index(&dense)?.balance_defect, 1e-7);
    out.push("block consistency", block_consistency_defect(op, &off)?, 1e-11);
    let h0 = hamiltonian(&z0, op);
    out.push(
        "hamiltonian conservation",
        max(off.states.iter().map(|z| (hamiltonian(z, op) - h0).abs())) / h0.abs().max(1.0),
        1e-9,
    );

    // On-shell channel.
    let clock = entropic_clock(&on, op)?;
    out.push("sigma+ monotone", (-min_increment(&clock.sigma_plus)).max(0.0), 1e-10);
    out.push("free energy", free_energy_check(&v.rho0)?.defect, 1e-12);
    if s_zero {
        let r0 = v.rho0.norm();
        out.push("norm conservation", max(on.states.iter().map(|x| (x.norm() - r0).abs())), 1e-10);
    }
    if f_zero && n >= 3 {
        let q = readout(&v.rho0)?;
        let center = if q.min() > 1e-3 { q } else { RVec::from_element(n, 1.0 / n as f64) };
        let pts = fr_circle(&center, v.scenario.params.loop_radius, v.scenario.params.loop_samples)?;
        out.push("holonomy zero", loop_holonomy(&pts, op.v(), HolonomyOptions::default())?.value.abs(), 1e-8);
    }

    // Para sector.
    let h = SplitOperator::from_operator(op);
    out.push(
        "para-unitarity",
        max([0.5, 1.0, 2.0].iter().map(|&t| para_unitarity_defect(&h, t)).collect::<Result<Vec<_>>>()?),
        1e-10,
    );
    let para = para_propagate(&h, &SplitVector::from_plus(&v.rho0), times)?;
    out.push(
        "para on-shell equivalence",
        max(para.states.iter().zip(&on.states).map(|(s, x)| (s.idem_decompose().0 - x).amax())) / scale,
        1e-11,
    );

    // Elliptic sector.
    out.push(
        "clar unitarity",
        max([1.0, 5.0, 10.0].iter().map(|&t| clar_unitarity_defect(op, t)).collect::<Result<Vec<_>>>()?),
        1e-10,
    );
    let psi0: CVec = v.rho0.map(|x| Complex64::new(x, 0.0));
    let clar = clar_flow(op, &psi0, times)?;
    let p0 = psi0.norm();
    out.push("clar norm drift", max(clar.big_psi.iter().map(|x| (x.norm() - p0).abs())) / p0, 1e-10);
    let pol = Polarization::normalized(v.polarization_r.clone())?;
    let zl = on_leaf(&psi0, &v.polarization_r);
    out.push("clar leaf", clar_leaf_defect(op, &pol, &zl, times)? / zl.stacked().norm(), 1e-11);

    // Readouts.
    let unit = &v.rho0 / v.rho0.norm();
    let sums: Vec<f64> = v
        .contexts
        .iter()
        .map(|c| context_readout(&unit, c).map(|q| (q.sum() - 1.0).abs()))
        .collect::<Result<_>>()?;
    out.push("readout normalization", max(sums), 1e-12);
    let marginals: Vec<f64> = v
        .contexts
        .windows(2)
        .map(|p| sequential_readout(&unit, &p[0], &p[1]).map(|s| s.marginal_defect))
        .collect::<Result<_>>()?;
    if !marginals.is_empty() {
        out.push("sequential marginals", max(marginals), 1e-13);
    }

    let t_end = times[times.len() - 1] - times[0];
    match interference_decomposition(op, &v.rho0, t_end) {
        Ok(rep) if rep.condition < 1e6 => {
            let s = rep.total.amax().max(1.0);
            out.push("interference consistency", (&rep.diagonal + &rep.cross - &rep.total).amax() / s, 1e-8);
            out.push("interference flow", rep.flow_defect, 1e-8);
            out.push("interference imaginary residue", rep.imaginary_residue / s, 1e-9);
            if v.diagonal_theta().is_some() {
                out.push("diagonal cross term", rep.cross.amax(), 1e-12);
            }
        }
        // Defective or badly conditioned spectra are outside the decomposition's hypotheses.
        Ok(_) | Err(LarError::IllConditioned { .. }) => {}
        Err(e) => return Err(e),
    }

    Ok(out.rows)
}

/// A point of the φ = 0 leaf of M = R − iI with ψ = ψ₀: ρ̃ = ψ₀/2, y = Mρ̃.
pub fn on_leaf(psi0: &CVec, r: &RMat) -> ComplexPhase {
    let rho = psi0 * Complex64::new(0.5, 0.0);
    let y = to_complex_mat(r) * &rho - &rho * Complex64::new(0.0, 1.0);
    ComplexPhase { rho, y }
}
