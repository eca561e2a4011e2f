//! Negativity (PPT) and realigned negativity (CCNR).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qla::{
    hermitian_eigenvalues, partial_transpose, realign, trace_norm, DensityMatrix, Subsystem,
};

/// Sum of `|lambda|` over the negative eigenvalues of the partial transpose on A.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    negativity_over(rho, Subsystem::A)
}

pub fn negativity_over(rho: &DensityMatrix, subsystem: Subsystem) -> Result<f64> {
    Ok(hermitian_eigenvalues(&partial_transpose(rho, subsystem))?.negative_mass())
}

/// Smallest eigenvalue of the partial transpose on A; negative iff the state is NPT.
pub fn min_pt_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(&partial_transpose(rho, Subsystem::A))?.min())
}

/// `max(0, ||rho^R||_1 - 1)`.
pub fn realigned_negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok((trace_norm(&realign(rho))? - 1.0).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Negativity or realigned negativity above threshold.
    Entangled,
    /// 3x3 state with zero negativity that realignment does not flag either.
    PPTUndetected,
    /// 2x3 state with zero negativity; PPT is sufficient there.
    Separable2x3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReading {
    pub negativity: f64,
    /// Only computed for 3x3 states found PPT.
    pub realigned_negativity: Option<f64>,
    pub verdict: Verdict,
}

/// Negativity first; for a PPT 3x3 state, fall back to realignment.
pub fn assess(rho: &DensityMatrix, zero: f64) -> Result<EntanglementReading> {
    let neg = negativity(rho)?;
    if neg > zero {
        return Ok(EntanglementReading {
            negativity: neg,
            realigned_negativity: None,
            verdict: Verdict::Entangled,
        });
    }
    let dims = rho.dims();
    if dims.a.min(dims.b) == 2 && dims.a.max(dims.b) <= 3 {
        return Ok(EntanglementReading {
            negativity: neg,
            realigned_negativity: None,
            verdict: Verdict::Separable2x3,
        });
    }
    let r = realigned_negativity(rho)?;
    Ok(EntanglementReading {
        negativity: neg,
        realigned_negativity: Some(r),
        verdict: if r > zero {
            Verdict::Entangled
        } else {
            Verdict::PPTUndetected
        },
    })
}
