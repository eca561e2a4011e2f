//! Shared numeric thresholds.

use serde::{Deserialize, Serialize};

/// Hermiticity check for matrices handed to the eigensolver and for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue a density matrix may have.
pub const PSD_TOL: f64 = -1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm falls below this (relative to the full norm).
pub const JACOBI_OFF_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// One-sided Jacobi treats two columns as orthogonal once `|<a_p, a_q>| <= tol * |a_p| |a_q|`.
pub const SVD_ORTHO_TOL: f64 = 1e-15;
/// Kraus completeness residual.
pub const COMPLETENESS_TOL: f64 = 1e-12;
/// Largest p' probed when deciding that negativity never dies.
pub const P_PRIME_LIMIT: f64 = 1.0 - 1e-6;

/// Runtime thresholds for boundary location. Defaults are the values used by
/// the CLI and the acceptance suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Negativity at or below this counts as vanished.
    pub zero: f64,
    /// Bisection width for a death point in p'.
    pub root: f64,
    /// Bisection width for regime edges in p_n and for critical x.
    pub boundary: f64,
    /// Two death points closer than this are treated as equal.
    pub compare: f64,
    /// Coarse bracketing step in p'.
    pub p_prime_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: 1e-12,
            root: 1e-10,
            boundary: 1e-5,
            compare: 1e-8,
            p_prime_step: 0.01,
        }
    }
}
