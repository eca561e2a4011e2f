//! Local flip operations: `sigma_x` on a qubit and the four trit-flips on a qutrit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qla::{kron, ComplexMatrix, DensityMatrix, Dims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FlipOp {
    /// Identity on either subsystem.
    I,
    /// `sigma_x`, qubit only.
    X,
    /// Swaps qutrit levels 0 and 1.
    F01,
    /// Swaps qutrit levels 0 and 2.
    F02,
    /// Cyclic permutation `|1> -> |0> -> |2> -> |1>`.
    F102,
    /// Cyclic permutation `|2> -> |0> -> |1> -> |2>`, the inverse of `F102`.
    F201,
}

impl FlipOp {
    pub const QUTRIT_OPS: [FlipOp; 5] = [
        FlipOp::I,
        FlipOp::F01,
        FlipOp::F02,
        FlipOp::F102,
        FlipOp::F201,
    ];
    pub const QUBIT_OPS: [FlipOp; 2] = [FlipOp::I, FlipOp::X];

    pub fn name(self) -> &'static str {
        match self {
            FlipOp::I => "I",
            FlipOp::X => "X",
            FlipOp::F01 => "F01",
            FlipOp::F02 => "F02",
            FlipOp::F102 => "F102",
            FlipOp::F201 => "F201",
        }
    }

    /// Image of each basis level: `column j` of the matrix has its 1 in row `perm[j]`.
    fn permutation(self, dim: usize) -> Result<Vec<usize>> {
        let perm = match (self, dim) {
            (FlipOp::I, d) if d == 2 || d == 3 => (0..d).collect(),
            (FlipOp::X, 2) => vec![1, 0],
            (FlipOp::F01, 3) => vec![1, 0, 2],
            (FlipOp::F02, 3) => vec![2, 1, 0],
            (FlipOp::F102, 3) => vec![2, 0, 1],
            (FlipOp::F201, 3) => vec![1, 2, 0],
            (op, d) => {
                return Err(Error::UnknownOperation(format!(
                    "{} on a {d}-level subsystem",
                    op.name()
                )))
            }
        };
        Ok(perm)
    }
}

impl fmt::Display for FlipOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlipOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(FlipOp::I),
            "X" => Ok(FlipOp::X),
            "F01" => Ok(FlipOp::F01),
            "F02" => Ok(FlipOp::F02),
            "F102" => Ok(FlipOp::F102),
            "F201" => Ok(FlipOp::F201),
            other => Err(Error::UnknownOperation(other.to_string())),
        }
    }
}

impl TryFrom<String> for FlipOp {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FlipOp> for String {
    fn from(op: FlipOp) -> String {
        op.name().to_string()
    }
}

/// The 0/1 permutation matrix of `op` on a `dim`-level system.
pub fn flip_matrix(op: FlipOp, dim: usize) -> Result<ComplexMatrix> {
    let perm = op.permutation(dim)?;
    let mut entries = vec![0.0; dim * dim];
    for (col, &row) in perm.iter().enumerate() {
        entries[row * dim + col] = 1.0;
    }
    ComplexMatrix::from_real(dim, dim, &entries)
}

/// `U_A (x) U_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalUnitary {
    pub a: FlipOp,
    pub b: FlipOp,
}

impl LocalUnitary {
    pub const IDENTITY: LocalUnitary = LocalUnitary {
        a: FlipOp::I,
        b: FlipOp::I,
    };

    pub fn new(a: FlipOp, b: FlipOp) -> Self {
        Self { a, b }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Checks that each factor exists for its subsystem.
    pub fn check(&self, dims: Dims) -> Result<()> {
        self.a.permutation(dims.a)?;
        self.b.permutation(dims.b)?;
        Ok(())
    }

    pub fn matrix(&self, dims: Dims) -> Result<ComplexMatrix> {
        Ok(kron(
            &flip_matrix(self.a, dims.a)?,
            &flip_matrix(self.b, dims.b)?,
        ))
    }

    /// The nine qubit-qutrit combinations of `{X, I} x {F01, F02, F102, F201, I}`
    /// in the order of the summary table.
    pub fn qubit_qutrit_catalog() -> [LocalUnitary; 9] {
        use FlipOp::*;
        [
            LocalUnitary::new(X, F01),
            LocalUnitary::new(X, F02),
            LocalUnitary::new(X, F102),
            LocalUnitary::new(X, F201),
            LocalUnitary::new(X, I),
            LocalUnitary::new(I, F01),
            LocalUnitary::new(I, F02),
            LocalUnitary::new(I, F102),
            LocalUnitary::new(I, F201),
        ]
    }

    /// Every admissible pair for `dims`, identity included.
    pub fn all_for(dims: Dims) -> Vec<LocalUnitary> {
        let side = |d: usize| -> &'static [FlipOp] {
            if d == 2 {
                &FlipOp::QUBIT_OPS
            } else {
                &FlipOp::QUTRIT_OPS
            }
        };
        side(dims.a)
            .iter()
            .flat_map(|&a| side(dims.b).iter().map(move |&b| LocalUnitary::new(a, b)))
            .collect()
    }
}

impl fmt::Display for LocalUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(x){}", self.a, self.b)
    }
}

/// `(U_A (x) U_B) rho (U_A (x) U_B)^dagger`.
pub fn apply_luo(rho: &DensityMatrix, op: &LocalUnitary) -> Result<DensityMatrix> {
    let dims = rho.dims();
    if op.is_identity() {
        return Ok(rho.clone());
    }
    let u = op.matrix(dims).map_err(|e| match e {
        Error::UnknownOperation(m) => Error::ShapeMismatch {
            expected: format!("operation valid for {dims}"),
            got: m,
        },
        other => other,
    })?;
    DensityMatrix::new_unchecked(dims, u.conjugate(rho.matrix())?)
}
