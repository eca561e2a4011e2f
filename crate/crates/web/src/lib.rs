//! Browser bindings. Each exported function takes plain numbers and strings
//! and returns a JSON document for the page to plot.

use esdlab_core::dynamics::{boundary_curve, negativity_curve, sweep_surface, StageSchedule};
use esdlab_core::{DecayModel, Family, FlipOp, LocalUnitary, StateFamily, Tolerances};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn schedule(
    family: &str,
    x: f64,
    op_a: &str,
    op_b: &str,
    p_n: f64,
) -> Result<StageSchedule, String> {
    let family: Family = family.parse().map_err(|e| format!("{e}"))?;
    let op = LocalUnitary::new(
        op_a.parse::<FlipOp>().map_err(|e| e.to_string())?,
        op_b.parse::<FlipOp>().map_err(|e| e.to_string())?,
    );
    StageSchedule::new(
        StateFamily::new(family, x).map_err(|e| e.to_string())?,
        DecayModel::default_for(family.dims()),
        op,
        p_n,
    )
    .map_err(|e| e.to_string())
}

fn grid(points: usize, end: f64) -> Vec<f64> {
    let points = points.clamp(2, 2001);
    (0..points)
        .map(|k| end * k as f64 / (points - 1) as f64)
        .collect()
}

/// Negativity along `p'` after flipping at `p_n`, next to the unflipped run.
pub fn curves_json(
    family: &str,
    x: f64,
    op_a: &str,
    op_b: &str,
    p_n: f64,
    points: usize,
) -> Result<String, String> {
    let s = schedule(family, x, op_a, op_b, p_n)?;
    let axis = grid(points, 1.0);
    let flipped = negativity_curve(&s, &axis).map_err(|e| e.to_string())?;
    let plain = negativity_curve(&s.baseline(), &axis).map_err(|e| e.to_string())?;
    Ok(json!({
        "p_prime": axis,
        "flipped": flipped.iter().map(|c| c.negativity).collect::<Vec<_>>(),
        "baseline": plain.iter().map(|c| c.negativity).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Death point against `p_n` with and without the flip, sampled up to the
/// unflipped death point.
pub fn death_curves_json(
    family: &str,
    x: f64,
    op_a: &str,
    op_b: &str,
    points: usize,
) -> Result<String, String> {
    let s = schedule(family, x, op_a, op_b, 0.0)?;
    let tol = Tolerances::default();
    let end = esdlab_core::dynamics::death_point(&s.baseline(), &tol)
        .map_err(|e| e.to_string())?
        .p_prime;
    let Some(end) = end else {
        return Ok(
            json!({ "p_n": [], "flipped": [], "baseline": [], "baseline_death": null }).to_string(),
        );
    };
    let mut axis = grid(points, end);
    axis.pop();
    let flipped = boundary_curve(&s, &axis, &tol).map_err(|e| e.to_string())?;
    let plain = boundary_curve(&s.baseline(), &axis, &tol).map_err(|e| e.to_string())?;
    Ok(json!({
        "p_n": axis,
        "flipped": flipped.samples.iter().map(|s| s.1).collect::<Vec<_>>(),
        "baseline": plain.samples.iter().map(|s| s.1).collect::<Vec<_>>(),
        "baseline_death": end,
    })
    .to_string())
}

/// Negativity on an `n x n` grid in `(p, p')` for the unflipped evolution.
pub fn surface_json(family: &str, x: f64, n: usize) -> Result<String, String> {
    let s = schedule(family, x, "I", "I", 0.0)?;
    let surf =
        sweep_surface(&s, n.clamp(2, 201), &Tolerances::default()).map_err(|e| e.to_string())?;
    Ok(json!({
        "axis": surf.axis,
        "negativity": surf.rows.iter().map(|r| r.negativity).collect::<Vec<_>>(),
        "locus": surf.locus,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn curves(
    family: &str,
    x: f64,
    op_a: &str,
    op_b: &str,
    p_n: f64,
    points: usize,
) -> Result<String, JsError> {
    curves_json(family, x, op_a, op_b, p_n, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn death_curves(
    family: &str,
    x: f64,
    op_a: &str,
    op_b: &str,
    points: usize,
) -> Result<String, JsError> {
    death_curves_json(family, x, op_a, op_b, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn surface(family: &str, x: f64, n: usize) -> Result<String, JsError> {
    surface_json(family, x, n).map_err(|e| JsError::new(&e))
}
