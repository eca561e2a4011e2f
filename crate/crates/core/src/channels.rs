//! Amplitude-damping Kraus sets for a qubit, a V-type qutrit and their
//! bipartite products.
//!
//! The qutrit decays from both excited levels straight to ground, with
//! probabilities `p1 = a * p` and `p2 = b * p` tied to the qubit damping `p`
//! through the ratios held by [`DecayModel`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qla::{kron, ComplexMatrix, DensityMatrix, Dims};
use crate::tolerances::COMPLETENESS_TOL;

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::domain(format!("{name}={p} outside [0, 1]")));
    }
    Ok(())
}

/// Decay parameterization: `p = 1 - exp(-gamma t)`, `p1 = ratio_a * p`,
/// `p2 = ratio_b * p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    pub gamma: f64,
    pub ratio_a: f64,
    pub ratio_b: f64,
}

impl DecayModel {
    pub fn new(gamma: f64, ratio_a: f64, ratio_b: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::domain(format!(
                "decay rate {gamma} must be positive"
            )));
        }
        for (name, r) in [("ratio_a", ratio_a), ("ratio_b", ratio_b)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::domain(format!("{name}={r} outside [0, 1]")));
            }
        }
        Ok(Self {
            gamma,
            ratio_a,
            ratio_b,
        })
    }

    /// a = 0.8, b = 0.6.
    pub fn qubit_qutrit() -> Self {
        Self {
            gamma: 1.0,
            ratio_a: 0.8,
            ratio_b: 0.6,
        }
    }

    /// a = 1, b = 0.75.
    pub fn qutrit_qutrit() -> Self {
        Self {
            gamma: 1.0,
            ratio_a: 1.0,
            ratio_b: 0.75,
        }
    }

    pub fn default_for(dims: Dims) -> Self {
        if dims.a == 2 {
            Self::qubit_qutrit()
        } else {
            Self::qutrit_qutrit()
        }
    }

    /// Qutrit damping pair `(p1, p2)` at qubit damping `p`.
    pub fn qutrit_probabilities(&self, p: f64) -> (f64, f64) {
        (self.ratio_a * p, self.ratio_b * p)
    }

    pub fn p_of_t(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain(format!("time {t} must be non-negative")));
        }
        Ok(-(-self.gamma * t).exp_m1())
    }

    pub fn t_of_p(&self, p: f64) -> Result<f64> {
        check_probability("p", p)?;
        if p == 1.0 {
            return Err(Error::domain("p = 1 is reached only at infinite time"));
        }
        Ok(-(-p).ln_1p() / self.gamma)
    }
}

/// Kraus operators of one channel at a fixed strength.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
    dims: Option<Dims>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>, dims: Option<Dims>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::domain("empty Kraus set"))?;
        let shape = (first.rows(), first.cols());
        if let Some(bad) = operators.iter().find(|k| (k.rows(), k.cols()) != shape) {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", shape.0, shape.1),
                got: format!("{}x{}", bad.rows(), bad.cols()),
            });
        }
        if let Some(d) = dims {
            if d.total() != shape.0 {
                return Err(Error::ShapeMismatch {
                    expected: format!("{} for {d}", d.total()),
                    got: format!("{}", shape.0),
                });
            }
        }
        let set = Self { operators, dims };
        let residual = set.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::domain(format!(
                "Kraus set is not trace preserving (residual {residual:e})"
            )));
        }
        Ok(set)
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dims(&self) -> Option<Dims> {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `max |(sum K^dagger K - I)_ij|`.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.operators[0].cols();
        let mut acc = ComplexMatrix::zeros(n, n);
        for k in &self.operators {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(n))
    }
}

pub fn qubit_kraus(p: f64) -> Result<KrausSet> {
    check_probability("p", p)?;
    let m0 = ComplexMatrix::from_diagonal(&[1.0, (1.0 - p).sqrt()]);
    let m1 = ComplexMatrix::from_real(2, 2, &[0.0, p.sqrt(), 0.0, 0.0])?;
    KrausSet::new(vec![m0, m1], None)
}

pub fn qutrit_kraus(p1: f64, p2: f64) -> Result<KrausSet> {
    check_probability("p1", p1)?;
    check_probability("p2", p2)?;
    let m0 = ComplexMatrix::from_diagonal(&[1.0, (1.0 - p1).sqrt(), (1.0 - p2).sqrt()]);
    let mut e1 = [0.0; 9];
    e1[1] = p1.sqrt();
    let mut e2 = [0.0; 9];
    e2[2] = p2.sqrt();
    let m1 = ComplexMatrix::from_real(3, 3, &e1)?;
    let m2 = ComplexMatrix::from_real(3, 3, &e2)?;
    KrausSet::new(vec![m0, m1, m2], None)
}

/// Products `K_i (x) L_j` over both local sets, ordered with the A index outermost.
/// Every qutrit gets dampings `(a p, b p)`; a qubit gets `p`.
pub fn composite_kraus(dims: Dims, p: f64, model: &DecayModel) -> Result<KrausSet> {
    check_probability("p", p)?;
    let (p1, p2) = model.qutrit_probabilities(p);
    let local_a = match dims.a {
        2 => qubit_kraus(p)?,
        3 => qutrit_kraus(p1, p2)?,
        _ => return Err(Error::domain(format!("unsupported dimensions {dims}"))),
    };
    if dims.b != 3 {
        return Err(Error::domain(format!("unsupported dimensions {dims}")));
    }
    let local_b = qutrit_kraus(p1, p2)?;
    let ops = local_a
        .operators()
        .iter()
        .flat_map(|ka| local_b.operators().iter().map(move |kb| kron(ka, kb)))
        .collect();
    KrausSet::new(ops, Some(dims))
}

/// `sum_k K rho K^dagger`.
pub fn apply_channel(rho: &DensityMatrix, ks: &KrausSet) -> Result<DensityMatrix> {
    let n = rho.dims().total();
    let k0 = &ks.operators()[0];
    if k0.cols() != n || k0.rows() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{n} Kraus operators"),
            got: format!("{}x{}", k0.rows(), k0.cols()),
        });
    }
    if let Some(d) = ks.dims() {
        if d != rho.dims() {
            return Err(Error::ShapeMismatch {
                expected: rho.dims().to_string(),
                got: d.to_string(),
            });
        }
    }
    let mut acc = ComplexMatrix::zeros(n, n);
    for k in ks.operators() {
        // Skip operators that vanish at this strength.
        if k.as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            continue;
        }
        acc = &acc + &k.conjugate(rho.matrix())?;
    }
    DensityMatrix::new_unchecked(rho.dims(), acc)
}

/// Damps `rho` with the composite channel at strength `p`.
pub fn damp(rho: &DensityMatrix, p: f64, model: &DecayModel) -> Result<DensityMatrix> {
    apply_channel(rho, &composite_kraus(rho.dims(), p, model)?)
}
