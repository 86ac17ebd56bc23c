use crate::error::{LarError, Result};

/// `n` evenly spaced points on `[t0, t1]`, endpoints exact.
pub fn linspace(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => {
            let h = (t1 - t0) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|k| t0 + h * k as f64).collect();
            v[n - 1] = t1;
            v
        }
    }
}

pub fn validate(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(LarError::GridTooCoarse { needed: 1, got: 0 });
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(LarError::NonFinite { what: "time grid" });
    }
    for k in 1..times.len() {
        if times[k] <= times[k - 1] {
            return Err(LarError::InvalidGrid { index: k });
        }
    }
    Ok(())
}

/// Index of a grid time, matched to within a relative 1e-12.
pub fn index_of(times: &[f64], t: f64) -> Result<usize> {
    let scale = times.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    times
        .iter()
        .position(|&s| (s - t).abs() <= 1e-12 * scale)
        .ok_or(LarError::NotOnGrid { time: t })
}


/// Sampled states on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}
