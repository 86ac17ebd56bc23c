//! Scenario files: the `lar-dyn/1` JSON schema, loading and validation.
//!
//! Loading happens in two stages. Syntax and shape errors (bad JSON, wrong
//! types, unknown fields) come from deserialization and carry the serde path.
//! Semantic checks (dimensions, symmetry, lottery sums) run afterwards in
//! [`Scenario::validate`] and name the offending field the same way.

use crate::error::{CliError, Result};
use lar_core::linalg::{check_skew, check_symmetric, RMat, RVec};
use lar_core::readout::ReadoutContext;
use lar_core::rng::{Family, LarRng};
use lar_core::simplex::{check_lottery, readout};
use lar_core::{PreferenceOperator, Tolerances};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA: &str = "lar-dyn/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default = "default_name")]
    pub name: String,
    pub n: usize,
    pub generator: Generator,
    pub initial: Initial,
    pub time: TimeGrid,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub params: Params,
}

fn default_schema() -> String {
    SCHEMA.to_string()
}

fn default_name() -> String {
    "scenario".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Matrix(Vec<Vec<f64>>),
    Split { s: Vec<Vec<f64>>, f: Vec<Vec<f64>> },
    Diagonal(Vec<f64>),
    Random {
        seed: u64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        family: FamilyName,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    #[default]
    General,
    Symmetric,
    Skew,
    Diagonal,
}

impl From<FamilyName> for Family {
    fn from(f: FamilyName) -> Family {
        match f {
            FamilyName::General => Family::General,
            FamilyName::Symmetric => Family::Symmetric,
            FamilyName::Skew => Family::Skew,
            FamilyName::Diagonal => Family::Diagonal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    Lottery(Vec<f64>),
    Amplitude(Vec<f64>),
    Phase { rho: Vec<f64>, y: Vec<f64> },
}

/// Accepts `{"start", "end", "samples"}` or the triple `[start, end, samples]`;
/// always echoed back in object form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "TimeRepr")]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TimeRepr {
    Object {
        #[serde(alias = "t_start")]
        start: f64,
        #[serde(alias = "t_end")]
        end: f64,
        samples: usize,
    },
    Triple(f64, f64, usize),
}

impl From<TimeRepr> for TimeGrid {
    fn from(r: TimeRepr) -> Self {
        match r {
            TimeRepr::Object { start, end, samples } | TimeRepr::Triple(start, end, samples) => {
                TimeGrid { start, end, samples }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Onshell,
    Lifted,
    Clar,
    Holonomy,
    Interference,
    Contexts,
    Invariants,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Onshell => "onshell",
            Task::Lifted => "lifted",
            Task::Clar => "clar",
            Task::Holonomy => "holonomy",
            Task::Interference => "interference",
            Task::Contexts => "contexts",
            Task::Invariants => "invariants",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ContextSpec {
    Matrix(Vec<Vec<f64>>),
    Rotation { i: usize, j: usize, angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Readout contexts; empty means the canonical basis plus, for n ≥ 2,
    /// the π/4 rotation of the first coordinate plane.
    pub contexts: Vec<ContextSpec>,
    pub loop_samples: usize,
    /// Fisher–Rao radius of the holonomy circle.
    pub loop_radius: f64,
    /// R of the normalised polarisation M = R − iI; identity when absent.
    pub polarization_r: Option<Vec<Vec<f64>>>,
    /// Seed for auxiliary draws made by the invariant suite.
    pub seed: u64,
    /// Search horizon for the cone-crossing time.
    pub horizon: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            contexts: Vec::new(),
            loop_samples: 256,
            loop_radius: 0.05,
            polarization_r: None,
            seed: 0,
            horizon: 100.0,
        }
    }
}

/// A scenario with every matrix and vector built and checked.
#[derive(Debug, Clone)]
pub struct Validated {
    pub scenario: Scenario,
    pub op: PreferenceOperator,
    /// Amplitude ρ̃₀ (the square-root lift when a lottery was given).
    pub rho0: RVec,
    /// Residual y₀; zero unless a phase state was given.
    pub y0: RVec,
    pub times: Vec<f64>,
    pub contexts: Vec<ReadoutContext>,
    pub polarization_r: RMat,
    pub tol: Tolerances,
}

impl Validated {
    pub fn n(&self) -> usize {
        self.scenario.n
    }

    pub fn is_off_shell(&self) -> bool {
        self.y0.iter().any(|&x| x != 0.0)
    }

    /// True when the generator is diagonal, so the RI closed form applies.
    pub fn diagonal_theta(&self) -> Option<RVec> {
        let v = self.op.v();
        let n = self.n();
        let off = (0..n).any(|i| (0..n).any(|j| i != j && v[(i, j)] != 0.0));
        (!off).then(|| v.diagonal())
    }
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse(&text)
}

/// JSON syntax errors map to exit 2; shape errors already name a field and map to 3.
pub fn parse(text: &str) -> Result<Scenario> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::validation(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })
}

impl Scenario {
    /// Replaces every seed in the scenario (generator family and auxiliary draws).
    pub fn override_seed(&mut self, seed: u64) {
        if let Generator::Random { seed: s, .. } = &mut self.generator {
            *s = seed;
        }
        self.params.seed = seed;
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<Validated> {
        let n = self.n;
        if self.schema != SCHEMA {
            return Err(CliError::validation("schema", format!("expected \"{SCHEMA}\", got \"{}\"", self.schema)));
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(CliError::validation("name", "must be non-empty and use only [A-Za-z0-9._-]"));
        }
        if n == 0 {
            return Err(CliError::validation("n", "must be positive"));
        }

        let op = self.build_operator(tol)?;
        let (rho0, y0) = self.build_initial(tol)?;

        let t = &self.time;
        if !t.start.is_finite() {
            return Err(CliError::validation("time.start", "must be finite"));
        }
        if !(t.end.is_finite() && t.end > t.start) {
            return Err(CliError::validation("time.end", "must be finite and greater than time.start"));
        }
        if t.samples < 2 {
            return Err(CliError::validation("time.samples", "need at least 2 samples"));
        }
        let times = lar_core::grid::linspace(t.start, t.end, t.samples);
        lar_core::grid::validate(&times)
            .map_err(|e| CliError::validation("time", format!("grid is not strictly increasing: {e}")))?;

        if self.tasks.is_empty() {
            return Err(CliError::validation("tasks", "at least one task is required"));
        }
        for (k, task) in self.tasks.iter().enumerate() {
            if self.tasks[..k].contains(task) {
                return Err(CliError::validation(format!("tasks[{k}]"), format!("duplicate task \"{}\"", task.name())));
            }
        }

        let p = &self.params;
        if p.loop_samples < 4 {
            return Err(CliError::validation("params.loop_samples", "need at least 4 loop samples"));
        }
        if !(p.loop_radius.is_finite() && p.loop_radius > 0.0) {
            return Err(CliError::validation("params.loop_radius", "must be positive"));
        }
        if !(p.horizon.is_finite() && p.horizon > 0.0) {
            return Err(CliError::validation("params.horizon", "must be positive"));
        }
        if let Some(k) = self.tasks.iter().position(|&t| t == Task::Holonomy) {
            if n < 3 {
                return Err(CliError::validation(format!("tasks[{k}]"), "holonomy needs n >= 3"));
            }
            let q = readout(&rho0).expect("nonzero amplitude");
            if q.min() <= tol.interior_eps {
                return Err(CliError::validation("initial", "holonomy needs an interior initial lottery"));
            }
        }

        let contexts = self.build_contexts(tol)?;
        let polarization_r = match &p.polarization_r {
            None => RMat::identity(n, n),
            Some(rows) => {
                let r = matrix("params.polarization_r", rows, n)?;
                check_symmetric(&r, tol).map_err(|e| CliError::validation("params.polarization_r", e.to_string()))?;
                r
            }
        };

        Ok(Validated { scenario: self.clone(), op, rho0, y0, times, contexts, polarization_r, tol: *tol })
    }

    fn build_operator(&self, tol: &Tolerances) -> Result<PreferenceOperator> {
        let n = self.n;
        let v = match &self.generator {
            Generator::Matrix(rows) => matrix("generator.matrix", rows, n)?,
            Generator::Split { s, f } => {
                let s = matrix("generator.split.s", s, n)?;
                let f = matrix("generator.split.f", f, n)?;
                check_symmetric(&s, tol).map_err(|e| CliError::validation("generator.split.s", e.to_string()))?;
                check_skew(&f, tol).map_err(|e| CliError::validation("generator.split.f", e.to_string()))?;
                s + f
            }
            Generator::Diagonal(theta) => RMat::from_diagonal(&vector("generator.diagonal", theta, n)?),
            Generator::Random { seed, scale, family } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(CliError::validation("generator.random.scale", "must be positive"));
                }
                LarRng::new(*seed).family((*family).into(), n, *scale)
            }
        };
        PreferenceOperator::new_with(v, tol).map_err(|e| CliError::validation("generator", e.to_string()))
    }

    fn build_initial(&self, tol: &Tolerances) -> Result<(RVec, RVec)> {
        let n = self.n;
        match &self.initial {
            Initial::Lottery(q) => {
                let q = vector("initial.lottery", q, n)?;
                check_lottery(&q, tol).map_err(|e| CliError::validation("initial.lottery", e.to_string()))?;
                Ok((q.map(f64::sqrt), RVec::zeros(n)))
            }
            Initial::Amplitude(a) => {
                let a = vector("initial.amplitude", a, n)?;
                nonzero("initial.amplitude", &a)?;
                Ok((a, RVec::zeros(n)))
            }
            Initial::Phase { rho, y } => {
                let rho = vector("initial.phase.rho", rho, n)?;
                nonzero("initial.phase.rho", &rho)?;
                Ok((rho, vector("initial.phase.y", y, n)?))
            }
        }
    }

    fn build_contexts(&self, tol: &Tolerances) -> Result<Vec<ReadoutContext>> {
        let n = self.n;
        if self.params.contexts.is_empty() {
            let mut out = vec![ReadoutContext::canonical(n)];
            if n >= 2 {
                out.push(ReadoutContext::rotation(n, 0, 1, std::f64::consts::FRAC_PI_4).expect("valid plane"));
            }
            return Ok(out);
        }
        self.params
            .contexts
            .iter()
            .enumerate()
            .map(|(k, spec)| {
                let path = format!("params.contexts[{k}]");
                match spec {
                    ContextSpec::Matrix(rows) => {
                        let b = matrix(&format!("{path}.matrix"), rows, n)?;
                        ReadoutContext::new_with(b, tol).map_err(|e| CliError::validation(format!("{path}.matrix"), e.to_string()))
                    }
                    ContextSpec::Rotation { i, j, angle } => {
                        if !angle.is_finite() {
                            return Err(CliError::validation(format!("{path}.rotation.angle"), "must be finite"));
                        }
                        ReadoutContext::rotation(n, *i, *j, *angle)
                            .map_err(|e| CliError::validation(format!("{path}.rotation"), e.to_string()))
                    }
                }
            })
            .collect()
    }
}

fn matrix(path: &str, rows: &[Vec<f64>], n: usize) -> Result<RMat> {
    if rows.len() != n {
        return Err(CliError::validation(path, format!("expected {n} rows, got {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::validation(format!("{path}[{i}]"), format!("expected {n} entries, got {}", row.len())));
        }
        if let Some(j) = row.iter().position(|x| !x.is_finite()) {
            return Err(CliError::validation(format!("{path}[{i}][{j}]"), "must be finite"));
        }
    }
    Ok(RMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn vector(path: &str, xs: &[f64], n: usize) -> Result<RVec> {
    if xs.len() != n {
        return Err(CliError::validation(path, format!("expected {n} entries, got {}", xs.len())));
    }
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(CliError::validation(format!("{path}[{i}]"), "must be finite"));
    }
    Ok(RVec::from_column_slice(xs))
}

fn nonzero(path: &str, v: &RVec) -> Result<()> {
    if v.iter().all(|&x| x == 0.0) {
        return Err(CliError::validation(path, "must be nonzero"));
    }
    Ok(())
}
