//! Numerical tolerances shared across the crate.
//!
//! Every operation that validates its input uses [`Tolerances::default`];
//! the `*_with` variants of those operations accept an override.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative symmetry defect accepted by `sym_eig` and symmetric inputs.
    pub symmetry: f64,
    /// Absolute skew defect accepted for skew-declared matrices.
    pub skew: f64,
    /// Minimum component for a lottery to count as interior.
    pub interior_eps: f64,
    /// Sum-to-one slack for lotteries and zero-sum slack for tangent vectors.
    pub simplex_sum: f64,
    /// Unit-norm slack for normalized amplitudes.
    pub unit_norm: f64,
    /// Relative pivot threshold for LU solves.
    pub pivot: f64,
    /// Orthogonality defect accepted for readout contexts.
    pub orthogonality: f64,
    /// Unit-hyperbola slack for split-complex phases.
    pub hyperbola: f64,
    /// Spectral gap below which the top eigenvalue counts as degenerate.
    pub gap: f64,
    /// Overlap below which a start vector counts as orthogonal.
    pub overlap: f64,
    /// Eigenvector condition number above which a decomposition is ill-conditioned.
    pub eig_condition: f64,
    /// Closure slack for sampled loops.
    pub loop_closure: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symmetry: 1e-10,
            skew: 1e-10,
            interior_eps: 1e-9,
            simplex_sum: 1e-12,
            unit_norm: 1e-12,
            pivot: 1e-14,
            orthogonality: 1e-10,
            hyperbola: 1e-12,
            gap: 1e-8,
            overlap: 1e-10,
            eig_condition: 1e8,
            loop_closure: 1e-12,
        }
    }
}
