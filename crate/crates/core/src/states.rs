//! The three one-parameter initial-state families.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::DecayModel;
use crate::error::{Error, Result};
use crate::qla::{ComplexMatrix, DensityMatrix, Dims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Qubit-qutrit X state entangled through `|02><10|`, `0 <= x < 1/3`.
    #[serde(rename = "state-i")]
    StateI,
    /// Qubit-qutrit X state entangled through `|00><12|`, `1/3 < x <= 1/2`.
    #[serde(rename = "state-ii")]
    StateII,
    /// Qutrit-qutrit state entangled through `|00><22|`, `0 <= x < 1/3`.
    #[serde(rename = "two-qutrit")]
    TwoQutrit,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::StateI, Family::StateII, Family::TwoQutrit];

    pub fn dims(self) -> Dims {
        match self {
            Family::StateI | Family::StateII => Dims::QUBIT_QUTRIT,
            Family::TwoQutrit => Dims::QUTRIT_QUTRIT,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::StateI => "state-i",
            Family::StateII => "state-ii",
            Family::TwoQutrit => "two-qutrit",
        }
    }

    /// Whether `x` lies in the family's parameter range.
    pub fn admits(self, x: f64) -> bool {
        match self {
            Family::StateI | Family::TwoQutrit => (0.0..1.0 / 3.0).contains(&x),
            Family::StateII => x > 1.0 / 3.0 && x <= 0.5,
        }
    }

    /// Parameter interval as `(low, high)`; see [`Family::admits`] for which ends are open.
    pub fn range(self) -> (f64, f64) {
        match self {
            Family::StateI | Family::TwoQutrit => (0.0, 1.0 / 3.0),
            Family::StateII => (1.0 / 3.0, 0.5),
        }
    }

    /// Conventional working point: x = 0.25 for the x < 1/3 families, 0.5 for state-ii.
    pub fn reference_x(self) -> f64 {
        match self {
            Family::StateI | Family::TwoQutrit => 0.25,
            Family::StateII => 0.5,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "state-i" | "statei" | "i" | "1" => Ok(Family::StateI),
            "state-ii" | "stateii" | "ii" | "2" => Ok(Family::StateII),
            "two-qutrit" | "twoqutrit" | "qutrit" | "3x3" => Ok(Family::TwoQutrit),
            other => Err(Error::domain(format!("unknown state family `{other}`"))),
        }
    }
}

/// A family member, with `x` checked against the family's range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateFamily {
    family: Family,
    x: f64,
}

impl StateFamily {
    pub fn new(family: Family, x: f64) -> Result<Self> {
        if !family.admits(x) {
            let (lo, hi) = family.range();
            return Err(Error::domain(format!(
                "x={x} outside the {family} range ({lo:.6}, {hi:.6})"
            )));
        }
        Ok(Self { family, x })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn dims(&self) -> Dims {
        self.family.dims()
    }
}

pub fn build_state(spec: &StateFamily) -> Result<DensityMatrix> {
    let dims = spec.dims();
    let x = spec.x;
    let n = dims.total();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    let mut put = |(i, j): (usize, usize), (k, l): (usize, usize), w: f64| {
        entries[dims.index(i, j) * n + dims.index(k, l)] += Complex64::new(w, 0.0);
    };
    match spec.family {
        Family::StateI => {
            let (u, v) = (x / 2.0, (1.0 - 2.0 * x) / 2.0);
            for ket in [(0, 0), (0, 1), (1, 1), (1, 2)] {
                put(ket, ket, u);
            }
            put((0, 2), (0, 2), v);
            put((1, 0), (1, 0), v);
            put((0, 2), (1, 0), v);
            put((1, 0), (0, 2), v);
        }
        Family::StateII => {
            let (u, v) = (x / 2.0, (1.0 - 2.0 * x) / 2.0);
            for ket in [(0, 0), (0, 1), (1, 1), (1, 2)] {
                put(ket, ket, u);
            }
            put((0, 0), (1, 2), u);
            put((1, 2), (0, 0), u);
            put((0, 2), (0, 2), v);
            put((1, 0), (1, 0), v);
        }
        Family::TwoQutrit => {
            let (u, v) = (x / 3.0, (1.0 - 2.0 * x) / 3.0);
            for ket in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)] {
                put(ket, ket, u);
            }
            for ket in [(0, 0), (1, 1), (2, 2)] {
                put(ket, ket, v);
            }
            put((2, 2), (0, 0), v);
            put((0, 0), (2, 2), v);
        }
    }
    DensityMatrix::new(dims, ComplexMatrix::new(n, n, entries)?)
}

/// Smaller eigenvalue of the only non-diagonal block of the partially
/// transposed state-I after damping `p`:
/// `N = (r11 + r66 - sqrt((r11 - r66)^2 + 4 |r34|^2)) / 2`,
/// with each element evolved in closed form. Negative exactly when the
/// damped state is entangled.
pub fn closed_form_n(x: f64, p: f64, model: &DecayModel) -> Result<f64> {
    StateFamily::new(Family::StateI, x)?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!("p={p} outside [0, 1)")));
    }
    let (p1, p2) = model.qutrit_probabilities(p);
    // Initial elements, 1-based lexicographic names.
    let r11 = x / 2.0;
    let r22 = x / 2.0;
    let r33 = (1.0 - 2.0 * x) / 2.0;
    let r44 = (1.0 - 2.0 * x) / 2.0;
    let r55 = x / 2.0;
    let r66 = x / 2.0;
    let r34 = (1.0 - 2.0 * x) / 2.0;

    let ground = r11 + r44 * p + r22 * p1 + r55 * p * p1 + r33 * p2 + r66 * p * p2;
    let survive = (1.0 - p) * (1.0 - p2);
    let top = r66 * survive;
    let coh = r34 * survive.sqrt();
    Ok(0.5 * (ground + top - ((ground - top).powi(2) + 4.0 * coh * coh).sqrt()))
}
