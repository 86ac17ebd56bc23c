//! Seeded matrix and vector generation.
//!
//! The generator is xoshiro256** seeded through SplitMix64
//! (`Xoshiro256StarStar::seed_from_u64`). Each draw maps the 64-bit output
//! `x` to `((x >> 11) as f64) * 2^-53 * 2 - 1`, a uniform value on
//! `[-1, 1)`. Matrices are filled row by row. This is enough to reproduce
//! every random scenario in another language.

use nalgebra::{DMatrix, DVector};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// All n² entries uniform.
    General,
    /// (A + Aᵀ)/2 of a general draw.
    Symmetric,
    /// (A − Aᵀ)/2 of a general draw.
    Skew,
    /// n uniform diagonal entries.
    Diagonal,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "general" => Some(Family::General),
            "symmetric" => Some(Family::Symmetric),
            "skew" => Some(Family::Skew),
            "diagonal" => Some(Family::Diagonal),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::General => "general",
            Family::Symmetric => "symmetric",
            Family::Skew => "skew",
            Family::Diagonal => "diagonal",
        }
    }
}

pub struct LarRng(Xoshiro256StarStar);

impl LarRng {
    pub fn new(seed: u64) -> Self {
        LarRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    /// Uniform on [-1, 1).
    pub fn uniform(&mut self) -> f64 {
        let x = self.0.next_u64() >> 11;
        (x as f64) * (1.0 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    /// Uniform on [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * 0.5 * (self.uniform() + 1.0)
    }

    pub fn vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.uniform())
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        let data: Vec<f64> = (0..rows * cols).map(|_| self.uniform()).collect();
        DMatrix::from_row_slice(rows, cols, &data)
    }

    pub fn family(&mut self, family: Family, n: usize, scale: f64) -> DMatrix<f64> {
        let m = match family {
            Family::General => self.matrix(n, n),
            Family::Symmetric => {
                let a = self.matrix(n, n);
                (&a + a.transpose()) * 0.5
            }
            Family::Skew => {
                let a = self.matrix(n, n);
                (&a - a.transpose()) * 0.5
            }
            Family::Diagonal => DMatrix::from_diagonal(&self.vector(n)),
        };
        m * scale
    }

    /// Interior lottery with every component at least `floor / n`-ish.
    pub fn lottery(&mut self, n: usize) -> DVector<f64> {
        let w = DVector::from_fn(n, |_, _| 0.1 + 0.5 * (self.uniform() + 1.0));
        let s = w.sum();
        w / s
    }

    /// Random orthogonal matrix (QR of a uniform draw, signs fixed).
    pub fn orthogonal(&mut self, n: usize) -> DMatrix<f64> {
        let qr = self.matrix(n, n).qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        q
    }
}
