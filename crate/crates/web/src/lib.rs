//! Browser bindings for the orbitlens demo page.

use num_complex::Complex64;
use orbitlens::abel::{AbelProblem, Rhs, SectorialSolution, Side};
use orbitlens::classify::{classify_germ, cyclicity_set, saddle_loop_dimension};
use orbitlens::neighborhood::GridSpec;
use orbitlens::orbit::{orbit, StopCriteria};
use orbitlens::{parse_complex, Germ};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn germ_and_point(germ: &str, z0: &str) -> Result<(Germ, Complex64), JsValue> {
    Ok((germ.parse().map_err(js_err)?, parse_complex(z0).map_err(js_err)?))
}

/// Orbit points flattened as `[re0, im0, re1, im1, ...]`.
#[wasm_bindgen]
pub fn orbit_points(germ: &str, z0: &str, points: usize) -> Result<Vec<f64>, JsValue> {
    let (g, z0) = germ_and_point(germ, z0)?;
    let o = orbit(&g, z0, StopCriteria::with_max_points(points)).map_err(js_err)?;
    Ok(o.points().iter().flat_map(|z| [z.re, z.im]).collect())
}

/// Classification of a complex germ from one orbit, as JSON.
#[wasm_bindgen]
pub fn classify(germ: &str, z0: &str, points: usize) -> Result<String, JsValue> {
    let (g, z0) = germ_and_point(germ, z0)?;
    let result = classify_germ(&g, z0, points, &GridSpec::default()).map_err(js_err)?;
    serde_json::to_string_pretty(&result).map_err(js_err)
}

/// Sectorial Abel solution at `z` as `[re, im, residual]`.
#[wasm_bindgen]
pub fn abel(germ: &str, rhs: &str, z: &str, side: &str) -> Result<Vec<f64>, JsValue> {
    let (g, z) = germ_and_point(germ, z)?;
    let rhs: Rhs = rhs.parse().map_err(js_err)?;
    let side: Side = side.parse().map_err(js_err)?;
    let solver = SectorialSolution::new(AbelProblem::new(g, rhs).map_err(js_err)?, side).map_err(js_err)?;
    let value = solver.eval(z).map_err(js_err)?;
    let residual = solver.residual(z).map_err(js_err)?;
    Ok(vec![value.re, value.im, residual])
}

/// Box dimension of a spiral around a saddle loop of codimension `codim`.
#[wasm_bindgen]
pub fn saddle_dimension(codim: usize) -> Result<f64, JsValue> {
    saddle_loop_dimension(codim).map_err(js_err)
}

/// Cyclicity candidates `[k, k + 1]` for a spiral of dimension `dim`.
#[wasm_bindgen]
pub fn cyclicity(dim: f64) -> Result<Vec<u32>, JsValue> {
    Ok(cyclicity_set(dim).map_err(js_err)?.iter().map(|&k| k as u32).collect())
}
