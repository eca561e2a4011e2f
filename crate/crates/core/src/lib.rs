//! Amplitude-damping dynamics of qubit-qutrit and qutrit-qutrit entangled
//! states, with local flip operations injected mid-evolution.
//!
//! The pipeline is: build an initial state from one of three one-parameter
//! families, damp it to `p_n`, apply a local unitary (`sigma_x` on a qubit,
//! a trit-flip on a qutrit), damp again by `p'`, and track negativity along
//! the way. Comparing the point where negativity vanishes with and without
//! the flip classifies the flip as avoiding, delaying or hastening
//! entanglement sudden death.
//!
//! Basis ordering is lexicographic everywhere: for a `d_A x d_B` system the
//! product state `|i>_A |j>_B` has index `i * d_B + j`.

pub mod channels;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod luo;
pub mod measures;
pub mod qla;
pub mod report;
pub mod states;
pub mod tolerances;

pub use channels::{DecayModel, KrausSet};
pub use dynamics::{ClassificationVerdict, Outcome, StageSchedule};
pub use error::{Error, Result};
pub use luo::{FlipOp, LocalUnitary};
pub use measures::{EntanglementReading, Verdict};
pub use qla::{ComplexMatrix, DensityMatrix, Dims, Spectrum, Subsystem};
pub use states::{Family, StateFamily};
pub use tolerances::Tolerances;
