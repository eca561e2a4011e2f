//! Run configuration shared by the CLI and the acceptance suite.

use serde::{Deserialize, Serialize};

use crate::channels::DecayModel;
use crate::dynamics::StageSchedule;
use crate::error::{Error, Result};
use crate::luo::{FlipOp, LocalUnitary};
use crate::states::{Family, StateFamily};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    pub x: f64,
    pub ratio_a: f64,
    pub ratio_b: f64,
    pub op_a: FlipOp,
    pub op_b: FlipOp,
    pub p_n: f64,
    pub pn_step: f64,
    pub pprime_step: f64,
    /// Bisection width for regime edges in `p_n`.
    pub tol: f64,
    /// Negativity at or below this counts as vanished.
    pub zero_tol: f64,
    /// Points per axis for `surface`.
    pub grid: usize,
    pub format: OutputFormat,
    pub out: Option<String>,
    pub workers: usize,
}

impl RunConfig {
    /// Reference parameters for a family: its reference `x` and default decay ratios.
    pub fn for_family(family: Family) -> Self {
        let model = DecayModel::default_for(family.dims());
        let tol = Tolerances::default();
        Self {
            family,
            x: family.reference_x(),
            ratio_a: model.ratio_a,
            ratio_b: model.ratio_b,
            op_a: FlipOp::I,
            op_b: FlipOp::I,
            p_n: 0.0,
            pn_step: 0.01,
            pprime_step: 0.01,
            tol: tol.boundary,
            zero_tol: tol.zero,
            grid: 41,
            format: OutputFormat::Csv,
            out: None,
            workers: 1,
        }
    }

    fn invalid(field: &str, message: impl Into<String>) -> Error {
        Error::InvalidConfig {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.family.admits(self.x) {
            let (lo, hi) = self.family.range();
            return Err(Self::invalid(
                "x",
                format!(
                    "{} outside the {} range ({lo:.6}, {hi:.6})",
                    self.x, self.family
                ),
            ));
        }
        for (name, r) in [("ratio-a", self.ratio_a), ("ratio-b", self.ratio_b)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Self::invalid(name, format!("{r} outside [0, 1]")));
            }
        }
        if !(0.0..1.0).contains(&self.p_n) {
            return Err(Self::invalid("pn", format!("{} outside [0, 1)", self.p_n)));
        }
        for (name, step) in [("pn-step", self.pn_step), ("pprime-step", self.pprime_step)] {
            if !(step > 0.0 && step < 0.5) {
                return Err(Self::invalid(name, format!("{step} outside (0, 0.5)")));
            }
        }
        for (name, t) in [("tol", self.tol), ("zero-tol", self.zero_tol)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Self::invalid(name, format!("{t} must be positive")));
            }
        }
        if self.workers < 1 {
            return Err(Self::invalid("workers", "must be at least 1"));
        }
        if self.grid < 2 {
            return Err(Self::invalid("grid", "must be at least 2"));
        }
        self.op()
            .check(self.family.dims())
            .map_err(|e| Self::invalid("op-a/op-b", e.to_string()))?;
        Ok(())
    }

    pub fn op(&self) -> LocalUnitary {
        LocalUnitary::new(self.op_a, self.op_b)
    }

    pub fn model(&self) -> Result<DecayModel> {
        DecayModel::new(1.0, self.ratio_a, self.ratio_b)
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            zero: self.zero_tol,
            boundary: self.tol,
            p_prime_step: self.pprime_step,
            ..Tolerances::default()
        }
    }

    pub fn schedule(&self) -> Result<StageSchedule> {
        self.validate()?;
        StageSchedule::new(
            StateFamily::new(self.family, self.x)?,
            self.model()?,
            self.op(),
            self.p_n,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Self::invalid("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
