//! Executes a validated scenario: one CSV per channel group plus `report.json`.

use crate::error::{CliError, Result};
use crate::invariants::{invariant_suite, on_leaf, InvariantRow};
use crate::output::{ensure_dir, indexed, Table};
use crate::scenario::{Task, Validated, SCHEMA};
use lar_core::clar::{clar_flow, clar_leaf_defect, clar_unitarity_defect, Polarization};
use lar_core::lifted::{
    cone_crossing_time, hamiltonian, lifted_flow, neutral_index, offshell_sigma_rate, symplectic_defect, PhaseState,
};
use lar_core::linalg::CVec;
use lar_core::onshell::{entropic_clock, logit_posterior, onshell_flow, AmplitudeTrajectory};
use lar_core::readout::{context_readout, elliptic_context_readout, interference_decomposition, sequential_readout};
use lar_core::simplex::{fr_circle, loop_holonomy, readout, HolonomyOptions};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub task: &'static str,
    /// "ok", "invariant-failure" or "error".
    pub status: &'static str,
    pub files: Vec<String>,
    pub outputs: Value,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub scenario: crate::scenario::Scenario,
    pub tol_scale: f64,
    pub tasks: Vec<TaskReport>,
    pub invariants: Option<Vec<InvariantRow>>,
    pub exit_code: i32,
}

/// Runs every task in declaration order, writes the channel files and
/// `report.json` into `out`, and returns the report. A failing task is
/// recorded and the remaining tasks still run; the exit code reflects the
/// worst outcome (5 numerical failure over 4 invariant failure).
pub fn run(v: &Validated, out: &Path, tol_scale: f64) -> Result<RunReport> {
    ensure_dir(out)?;
    let mut tasks = Vec::new();
    let mut invariants = None;
    let mut exit_code = 0;
    for &task in &v.scenario.tasks {
        let start = Instant::now();
        let mut files = Vec::new();
        let result = match task {
            Task::Onshell => onshell_task(v, out, &mut files),
            Task::Lifted => lifted_task(v, out, &mut files),
            Task::Clar => clar_task(v, out, &mut files),
            Task::Holonomy => holonomy_task(v),
            Task::Interference => interference_task(v, out, &mut files),
            Task::Contexts => contexts_task(v, out, &mut files),
            Task::Invariants => invariant_suite(v, tol_scale)
                .map_err(|e| CliError::numerical("invariants", e))
                .map(|rows| {
                    let failed = rows.iter().filter(|r| !r.pass).count();
                    invariants = Some(rows);
                    json!({ "failed": failed })
                }),
        };
        let (status, outputs) = match result {
            Ok(o) if task == Task::Invariants && o["failed"].as_u64() != Some(0) => {
                exit_code = exit_code.max(4);
                ("invariant-failure", o)
            }
            Ok(o) => ("ok", o),
            Err(e) => {
                exit_code = exit_code.max(e.exit_code());
                let code = match &e {
                    CliError::Numerical { source, .. } => source.code(),
                    _ => "io",
                };
                ("error", json!({ "error": e.to_string(), "code": code }))
            }
        };
        tasks.push(TaskReport { task: task.name(), status, files, outputs, seconds: start.elapsed().as_secs_f64() });
    }
    let report = RunReport {
        schema: SCHEMA,
        scenario: v.scenario.clone(),
        tol_scale,
        tasks,
        invariants,
        exit_code,
    };
    let path = out.join("report.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&path, text + "\n").map_err(|source| CliError::Io { path, source })?;
    Ok(report)
}

fn num(task: &'static str) -> impl Fn(lar_core::LarError) -> CliError {
    move |e| CliError::numerical(task, e)
}

fn write(out: &Path, files: &mut Vec<String>, name: &str, table: &Table) -> Result<()> {
    table.write(&out.join(name))?;
    files.push(name.to_string());
    Ok(())
}

fn onshell_traj(v: &Validated, task: &'static str) -> Result<AmplitudeTrajectory> {
    onshell_flow(&v.op, &v.rho0, &v.times).map_err(num(task))
}

fn onshell_task(v: &Validated, out: &Path, files: &mut Vec<String>) -> Result<Value> {
    let n = v.n();
    let e = num("onshell");
    let traj = onshell_traj(v, "onshell")?;
    let clock = entropic_clock(&traj, &v.op).map_err(&e)?;

    let mut amp = Table::new(indexed("rho", n));
    let mut lot = Table::new(indexed("q", n));
    let mut clk = Table::new(["log_norm", "sigma_plus", "production"].map(String::from));
    let mut lotteries = Vec::with_capacity(traj.len());
    for (k, (t, x)) in traj.iter().enumerate() {
        let q = readout(x).map_err(&e)?;
        amp.push(t, x.iter().copied());
        lot.push(t, q.iter().copied());
        clk.push(t, [x.norm().ln(), clock.sigma_plus[k], clock.production[k]]);
        lotteries.push(q);
    }
    write(out, files, "amplitudes.csv", &amp)?;
    write(out, files, "lottery.csv", &lot)?;
    write(out, files, "clock.csv", &clk)?;

    let min_inc = clock.sigma_plus.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let mut o = json!({
        "final_lottery": lotteries.last().map(|q| q.as_slice()),
        "sigma_plus_min_increment": min_inc,
    });
    if let Some(theta) = v.diagonal_theta() {
        // RI closed form q_k(0)e^{2tθ_k}/Σ on the same grid.
        let q0 = &lotteries[0];
        let t0 = v.times[0];
        let mut worst = 0.0f64;
        for (t, q) in v.times.iter().zip(&lotteries) {
            let want = logit_posterior(q0, &theta, t - t0).map_err(&e)?;
            worst = worst.max((q - want).amax());
        }
        o["logit_max_error"] = json!(worst);
    }
    Ok(o)
}

fn lifted_task(v: &Validated, out: &Path, files: &mut Vec<String>) -> Result<Value> {
    let n = v.n();
    let e = num("lifted");
    let z0 = PhaseState { rho: v.rho0.clone(), y: v.y0.clone() };
    let traj = lifted_flow(&v.op, &z0, &v.times).map_err(&e)?;
    let idx = if traj.len() >= 3 { Some(neutral_index(&traj).map_err(&e)?) } else { None };

    let mut phase = Table::new(indexed("rho", n).chain(indexed("y", n)));
    let mut lam = Table::new(["lambda", "accumulation", "y_norm_sq", "hamiltonian", "sigma_rate"].map(String::from));
    for (k, (t, z)) in traj.iter().enumerate() {
        phase.push(t, z.rho.iter().chain(z.y.iter()).copied());
        let acc = idx.as_ref().map_or(f64::NAN, |i| i.accumulation[k]);
        let rate = offshell_sigma_rate(z, &v.op).unwrap_or(f64::NAN);
        lam.push(t, [z.neutral(), acc, z.y.norm_squared(), hamiltonian(z, &v.op), rate]);
    }
    write(out, files, "phase.csv", &phase)?;
    write(out, files, "lambda.csv", &lam)?;

    let span = v.times[v.times.len() - 1] - v.times[0];
    Ok(json!({
        "balance_defect": idx.as_ref().map(|i| i.balance_defect),
        "quadrature_error": idx.as_ref().map(|i| i.quadrature_error),
        "lambda_initial": z0.neutral(),
        "cone_crossing_time": cone_crossing_time(&v.op, &z0, v.scenario.params.horizon).map_err(&e)?,
        "symplectic_defect": symplectic_defect(&v.op, span).map_err(&e)?,
    }))
}

fn clar_task(v: &Validated, out: &Path, files: &mut Vec<String>) -> Result<Value> {
    let n = v.n();
    let e = num("clar");
    let psi0: CVec = v.rho0.map(|x| Complex64::new(x, 0.0));
    let traj = clar_flow(&v.op, &psi0, &v.times).map_err(&e)?;
    let mut table = Table::new(indexed("re", n).chain(indexed("im", n)).chain(["norm".to_string()]));
    for (t, psi) in traj.times.iter().zip(&traj.big_psi) {
        table.push(*t, psi.iter().map(|z| z.re).chain(psi.iter().map(|z| z.im)).chain([psi.norm()]));
    }
    write(out, files, "clar.csv", &table)?;

    let p0 = psi0.norm();
    let drift = traj.big_psi.iter().map(|x| (x.norm() - p0).abs()).fold(0.0, f64::max);
    let pol = Polarization::normalized(v.polarization_r.clone()).map_err(&e)?;
    let leaf = clar_leaf_defect(&v.op, &pol, &on_leaf(&psi0, &v.polarization_r), &v.times).map_err(&e)?;
    let span = v.times[v.times.len() - 1] - v.times[0];
    Ok(json!({
        "norm_drift": drift,
        "unitarity_defect": clar_unitarity_defect(&v.op, span).map_err(&e)?,
        "leaf_defect": leaf,
    }))
}

fn holonomy_task(v: &Validated) -> Result<Value> {
    let e = num("holonomy");
    let p = &v.scenario.params;
    let center = readout(&v.rho0).map_err(&e)?;
    let pts = fr_circle(&center, p.loop_radius, p.loop_samples).map_err(&e)?;
    let h = loop_holonomy(&pts, v.op.v(), HolonomyOptions::default()).map_err(&e)?;
    Ok(json!({
        "value": h.value,
        "error_estimate": h.error_estimate,
        "radius": p.loop_radius,
        "samples": p.loop_samples,
        "center": center.as_slice(),
    }))
}

fn interference_task(v: &Validated, out: &Path, files: &mut Vec<String>) -> Result<Value> {
    let n = v.n();
    let e = num("interference");
    let t0 = v.times[0];
    let mut table = Table::new(indexed("diagonal", n).chain(indexed("cross", n)).chain(indexed("total", n)));
    let (mut flow_defect, mut residue, mut condition, mut eigen_residual) = (0.0f64, 0.0f64, 0.0, 0.0);
    for &t in &v.times {
        let rep = interference_decomposition(&v.op, &v.rho0, t - t0).map_err(&e)?;
        table.push(t, rep.diagonal.iter().chain(rep.cross.iter()).chain(rep.total.iter()).copied());
        flow_defect = flow_defect.max(rep.flow_defect);
        residue = residue.max(rep.imaginary_residue);
        condition = rep.condition;
        eigen_residual = rep.eigen_residual;
    }
    write(out, files, "interference.csv", &table)?;
    Ok(json!({
        "flow_defect": flow_defect,
        "imaginary_residue": residue,
        "condition": condition,
        "eigen_residual": eigen_residual,
    }))
}

fn contexts_task(v: &Validated, out: &Path, files: &mut Vec<String>) -> Result<Value> {
    let n = v.n();
    let e = num("contexts");
    let traj = onshell_traj(v, "contexts")?;
    let psi0: CVec = v.rho0.map(|x| Complex64::new(x, 0.0));
    let clar = clar_flow(&v.op, &psi0, &v.times).map_err(&e)?;
    let m = v.contexts.len();
    let columns = (1..=m).flat_map(|c| {
        (1..=n).map(move |k| format!("c{c}_q_{k}")).chain((1..=n).map(move |k| format!("c{c}_e_{k}")))
    });
    let mut table = Table::new(columns);
    for (k, (t, x)) in traj.iter().enumerate() {
        let unit = x / x.norm();
        let mut row = Vec::with_capacity(2 * n * m);
        for ctx in &v.contexts {
            row.extend(context_readout(&unit, ctx).map_err(&e)?.iter().copied());
            row.extend(elliptic_context_readout(&clar.big_psi[k], ctx).map_err(&e)?.iter().copied());
        }
        table.push(t, row);
    }
    write(out, files, "contexts.csv", &table)?;

    let last = traj.states.last().expect("grid has samples");
    let unit = last / last.norm();
    let sequential = v
        .contexts
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            sequential_readout(&unit, &pair[0], &pair[1]).map(|s| {
                json!({
                    "first": i + 1,
                    "second": i + 2,
                    "forward": rows(&s.forward),
                    "reverse": rows(&s.reverse),
                    "order_defect": s.order_defect,
                    "marginal_defect": s.marginal_defect,
                    "provenance": s.provenance,
                })
            })
        })
        .collect::<lar_core::Result<Vec<_>>>()
        .map_err(&e)?;
    Ok(json!({ "contexts": m, "sequential_at_end": sequential }))
}

fn rows(m: &lar_core::linalg::RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}
