//! Two-stage evolution (damp to `p_n`, flip, damp by `p'`), location of the
//! point where negativity dies, and the avoid / delay / hasten classification
//! obtained by comparing a flipped run against the uninterrupted one.
//!
//! The uninterrupted baseline at a given `p_n` uses the same split: damp to
//! `p_n`, apply the identity, damp by `p'`. Its death point as a function of
//! `p_n` is the reference curve every flipped curve is compared against.

use serde::{Deserialize, Serialize};

use crate::channels::{damp, DecayModel};
use crate::error::{Error, Result};
use crate::luo::{apply_luo, LocalUnitary};
use crate::measures::{negativity, realigned_negativity};
use crate::qla::DensityMatrix;
use crate::states::{build_state, Family, StateFamily};
use crate::tolerances::{Tolerances, P_PRIME_LIMIT};

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R>,
{
    items.iter().map(f).collect()
}

/// `k * step` for `k = 0, 1, ...` while below `end`.
fn grid_below(step: f64, end: f64) -> Vec<f64> {
    (0..)
        .map(|k| k as f64 * step)
        .take_while(|&v| v < end)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageSchedule {
    pub state: StateFamily,
    pub model: DecayModel,
    pub op: LocalUnitary,
    /// Damping accumulated before the flip.
    pub p_n: f64,
}

impl StageSchedule {
    pub fn new(state: StateFamily, model: DecayModel, op: LocalUnitary, p_n: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p_n) {
            return Err(Error::domain(format!("p_n={p_n} outside [0, 1)")));
        }
        op.check(state.dims())?;
        Ok(Self {
            state,
            model,
            op,
            p_n,
        })
    }

    /// Uninterrupted run from the family's reference `x` with default ratios.
    pub fn reference(family: Family) -> Self {
        Self {
            state: StateFamily::new(family, family.reference_x()).expect("reference x in range"),
            model: DecayModel::default_for(family.dims()),
            op: LocalUnitary::IDENTITY,
            p_n: 0.0,
        }
    }

    pub fn with_op(self, op: LocalUnitary) -> Self {
        Self { op, ..self }
    }

    pub fn at(self, p_n: f64) -> Self {
        Self { p_n, ..self }
    }

    /// Same split, identity flip.
    pub fn baseline(&self) -> Self {
        self.with_op(LocalUnitary::IDENTITY)
    }
}

/// The state right after the flip; the second damping stage is applied on demand.
#[derive(Debug, Clone)]
pub struct Trajectory {
    flipped: DensityMatrix,
    model: DecayModel,
}

impl Trajectory {
    pub fn prepare(s: &StageSchedule) -> Result<Self> {
        Self::split_at(s, s.p_n)
    }

    /// Like [`Trajectory::prepare`] but with any first-stage damping in `[0, 1]`.
    fn split_at(s: &StageSchedule, p_first: f64) -> Result<Self> {
        let initial = build_state(&s.state)?;
        let damped = if p_first > 0.0 {
            damp(&initial, p_first, &s.model)?
        } else {
            initial
        };
        Ok(Self {
            flipped: apply_luo(&damped, &s.op)?,
            model: s.model,
        })
    }

    pub fn state_at(&self, p_prime: f64) -> Result<DensityMatrix> {
        if p_prime == 0.0 {
            return Ok(self.flipped.clone());
        }
        damp(&self.flipped, p_prime, &self.model)
    }

    pub fn negativity_at(&self, p_prime: f64) -> Result<f64> {
        negativity(&self.state_at(p_prime)?)
    }
}

pub fn evolve_two_stage(s: &StageSchedule, p_prime: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p_prime) {
        return Err(Error::domain(format!("p'={p_prime} outside [0, 1]")));
    }
    Trajectory::prepare(s)?.state_at(p_prime)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeathPoint {
    /// `None` when negativity survives up to `p' = 1 - 1e-6`.
    pub p_prime: Option<f64>,
    /// Final bisection interval `(alive, dead)`.
    pub bracket: Option<(f64, f64)>,
    pub iterations: usize,
}

/// First `p'` at which negativity drops to the zero threshold.
///
/// Brackets on a coarse `p'` grid, bisects to `tol.root`, then checks that
/// negativity stays dead on the remaining grid points. A state that is
/// already PPT at `p' = 0` dies at zero.
pub fn death_point(s: &StageSchedule, tol: &Tolerances) -> Result<DeathPoint> {
    death_point_of(&Trajectory::prepare(s)?, tol)
}

pub fn death_point_of(traj: &Trajectory, tol: &Tolerances) -> Result<DeathPoint> {
    let dead = |p: f64| -> Result<bool> { Ok(traj.negativity_at(p)? <= tol.zero) };
    if dead(0.0)? {
        return Ok(DeathPoint {
            p_prime: Some(0.0),
            bracket: Some((0.0, 0.0)),
            iterations: 0,
        });
    }
    let mut probes = grid_below(tol.p_prime_step, P_PRIME_LIMIT);
    probes.remove(0);
    probes.push(P_PRIME_LIMIT);

    let mut alive = 0.0;
    let mut first_dead = None;
    for (idx, &p) in probes.iter().enumerate() {
        if dead(p)? {
            first_dead = Some(idx);
            break;
        }
        alive = p;
    }
    let Some(idx) = first_dead else {
        return Ok(DeathPoint {
            p_prime: None,
            bracket: None,
            iterations: 0,
        });
    };

    let (mut lo, mut hi) = (alive, probes[idx]);
    let mut iterations = 0;
    while hi - lo > tol.root {
        let mid = 0.5 * (lo + hi);
        if dead(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let death = 0.5 * (lo + hi);

    for &p in &probes[idx + 1..] {
        if !dead(p)? {
            return Err(Error::NonMonotone { death, p_prime: p });
        }
    }
    Ok(DeathPoint {
        p_prime: Some(death),
        bracket: Some((lo, hi)),
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// The flipped run never dies while the baseline does.
    Avoid,
    /// The flipped run dies later.
    Delay,
    /// The flipped run dies earlier.
    Hasten,
    /// Both die at the same `p'` within the comparison tolerance.
    Unchanged,
    /// The uninterrupted run never dies, so there is nothing to manipulate.
    NoBaselineDeath,
}

impl Outcome {
    pub fn letter(self) -> &'static str {
        match self {
            Outcome::Avoid => "A",
            Outcome::Delay => "D",
            Outcome::Hasten => "H",
            Outcome::Unchanged => "U",
            Outcome::NoBaselineDeath => "N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub p_n: f64,
    pub outcome: Outcome,
    pub baseline_death: Option<f64>,
    pub manipulated_death: Option<f64>,
}

impl ClassificationVerdict {
    /// `manipulated - baseline` when both die.
    pub fn shift(&self) -> Option<f64> {
        Some(self.manipulated_death? - self.baseline_death?)
    }
}

pub fn classify(s: &StageSchedule, tol: &Tolerances) -> Result<ClassificationVerdict> {
    let baseline = death_point(&s.baseline(), tol)?.p_prime;
    let manipulated = if s.op.is_identity() {
        baseline
    } else {
        death_point(s, tol)?.p_prime
    };
    let outcome = match (baseline, manipulated) {
        (None, _) => Outcome::NoBaselineDeath,
        (Some(_), None) => Outcome::Avoid,
        (Some(b), Some(m)) if m > b + tol.compare => Outcome::Delay,
        (Some(b), Some(m)) if m < b - tol.compare => Outcome::Hasten,
        _ => Outcome::Unchanged,
    };
    Ok(ClassificationVerdict {
        p_n: s.p_n,
        outcome,
        baseline_death: baseline,
        manipulated_death: manipulated,
    })
}

/// Verdicts at `p_n = 0, step, 2 step, ...` below the uninterrupted death point.
/// Empty when the uninterrupted run never dies.
pub fn scan(
    template: &StageSchedule,
    pn_step: f64,
    tol: &Tolerances,
) -> Result<Vec<ClassificationVerdict>> {
    let Some(end) = death_point(&template.baseline().at(0.0), tol)?.p_prime else {
        return Ok(Vec::new());
    };
    let points = grid_below(pn_step, end);
    par_map(&points, |&p_n| classify(&template.at(p_n), tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeBoundaries {
    /// Upper edge of the avoidance interval `[0, avoid_end]`.
    pub avoid_end: Option<f64>,
    /// Upper edge of the delay interval: the hastening onset, or the
    /// uninterrupted death point when hastening never occurs.
    pub delay_end: Option<f64>,
    pub hasten_occurs: bool,
    /// Death point of the uninterrupted run from `p_n = 0`.
    pub baseline_death: f64,
}

fn bisect_edge(
    mut lo: f64,
    mut hi: f64,
    width: f64,
    mut on_high_side: impl FnMut(f64) -> Result<bool>,
) -> Result<f64> {
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if on_high_side(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Edges of the avoid / delay / hasten intervals in `p_n`. Coarse samples at
/// `pn_step` bracket each edge, which is then bisected to `tol.boundary`.
pub fn regime_boundaries(
    template: &StageSchedule,
    pn_step: f64,
    tol: &Tolerances,
) -> Result<RegimeBoundaries> {
    let baseline_death = death_point(&template.baseline().at(0.0), tol)?
        .p_prime
        .ok_or_else(|| Error::domain("the uninterrupted evolution never loses its negativity"))?;
    let samples = scan(template, pn_step, tol)?;

    let avoids =
        |p_n: f64| -> Result<bool> { Ok(death_point(&template.at(p_n), tol)?.p_prime.is_none()) };
    let hastens = |p_n: f64| -> Result<bool> {
        let v = classify(&template.at(p_n), tol)?;
        Ok(matches!((v.baseline_death, v.manipulated_death), (Some(b), Some(m)) if m < b))
    };

    let avoid_end = match samples.iter().position(|v| v.outcome != Outcome::Avoid) {
        Some(0) => None,
        None => Some(baseline_death),
        Some(k) => Some(bisect_edge(
            samples[k - 1].p_n,
            samples[k].p_n,
            tol.boundary,
            |p| Ok(!avoids(p)?),
        )?),
    };

    let hasten_occurs = samples.iter().any(|v| v.outcome == Outcome::Hasten);
    let first_hasten = samples.iter().position(|v| v.outcome == Outcome::Hasten);
    let delay_end = match first_hasten {
        Some(0) => None,
        Some(k) => Some(bisect_edge(
            samples[k - 1].p_n,
            samples[k].p_n,
            tol.boundary,
            hastens,
        )?),
        None if samples.iter().any(|v| v.outcome == Outcome::Delay) => Some(baseline_death),
        None => None,
    };

    Ok(RegimeBoundaries {
        avoid_end,
        delay_end,
        hasten_occurs,
        baseline_death,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CriticalX {
    /// Uninterrupted runs die for `x` above this value and decay asymptotically below it.
    Boundary(f64),
    DiesEverywhere,
    NeverDies,
}

/// Family parameter separating asymptotic decay from sudden death of the
/// uninterrupted evolution.
pub fn critical_x(family: Family, model: &DecayModel, tol: &Tolerances) -> Result<CriticalX> {
    let (lo, hi) = family.range();
    let nudge = 1e-9;
    let lo = if family.admits(lo) { lo } else { lo + nudge };
    let hi = if family.admits(hi) { hi } else { hi - nudge };
    let dies = |x: f64| -> Result<bool> {
        let s = StageSchedule::new(
            StateFamily::new(family, x)?,
            *model,
            LocalUnitary::IDENTITY,
            0.0,
        )?;
        Ok(death_point(&s, tol)?.p_prime.is_some())
    };
    let (dies_lo, dies_hi) = (dies(lo)?, dies(hi)?);
    match (dies_lo, dies_hi) {
        (true, true) => Ok(CriticalX::DiesEverywhere),
        (false, false) => Ok(CriticalX::NeverDies),
        (false, true) => Ok(CriticalX::Boundary(bisect_edge(
            lo,
            hi,
            tol.boundary,
            dies,
        )?)),
        (true, false) => Ok(CriticalX::Boundary(bisect_edge(
            lo,
            hi,
            tol.boundary,
            |x| Ok(!dies(x)?),
        )?)),
    }
}

/// Death point against `p_n`: the curve plotted for one flip choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub samples: Vec<(f64, Option<f64>)>,
}

pub fn boundary_curve(
    template: &StageSchedule,
    p_n_values: &[f64],
    tol: &Tolerances,
) -> Result<BoundaryCurve> {
    if p_n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("p_n samples must be strictly increasing"));
    }
    let samples = par_map(p_n_values, |&p_n| {
        Ok((
            p_n,
            death_point(
                &StageSchedule::new(template.state, template.model, template.op, p_n)?,
                tol,
            )?
            .p_prime,
        ))
    })?;
    Ok(BoundaryCurve { samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p_prime: f64,
    pub negativity: f64,
    pub realigned_negativity: Option<f64>,
}

/// Negativity along `p'` for one schedule; realigned negativity is added for 3x3 states.
pub fn negativity_curve(s: &StageSchedule, p_primes: &[f64]) -> Result<Vec<CurvePoint>> {
    let traj = Trajectory::prepare(s)?;
    let with_realignment = s.state.dims().a == 3;
    par_map(p_primes, |&p| {
        let rho = traj.state_at(p)?;
        Ok(CurvePoint {
            p_prime: p,
            negativity: negativity(&rho)?,
            realigned_negativity: if with_realignment {
                Some(realigned_negativity(&rho)?)
            } else {
                None
            },
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    /// First-stage damping (the flip point `p_n` when a flip is applied).
    pub p: f64,
    pub p_prime: f64,
    pub negativity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub axis: Vec<f64>,
    /// Column-major in `p`: all `p'` for the first `p`, then the next.
    pub rows: Vec<SurfaceRow>,
    /// Death point in `p'` for each `p` column.
    pub locus: Vec<(f64, Option<f64>)>,
}

impl Surface {
    pub fn negativity(&self, i: usize, j: usize) -> f64 {
        self.rows[i * self.axis.len() + j].negativity
    }
}

/// Negativity on an `n x n` grid over `[0, 1]^2` in `(p, p')`.
pub fn sweep_surface(template: &StageSchedule, n: usize, tol: &Tolerances) -> Result<Surface> {
    if n < 2 {
        return Err(Error::domain(
            "surface grid needs at least 2 points per axis",
        ));
    }
    let axis: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let columns = par_map(&axis, |&p| {
        let traj = Trajectory::split_at(template, p)?;
        let rows = axis
            .iter()
            .map(|&q| {
                Ok(SurfaceRow {
                    p,
                    p_prime: q,
                    negativity: traj.negativity_at(q)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let death = death_point_of(&traj, tol)?.p_prime;
        Ok((rows, (p, death)))
    })?;
    let mut rows = Vec::with_capacity(n * n);
    let mut locus = Vec::with_capacity(n);
    for (r, l) in columns {
        rows.extend(r);
        locus.push(l);
    }
    Ok(Surface { axis, rows, locus })
}
