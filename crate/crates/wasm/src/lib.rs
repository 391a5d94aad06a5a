//! Browser bindings. Each export has a plain Rust counterpart returning
//! `Result<_, String>` so it can be exercised natively.

use cvl_core::ckem::{self, Family};
use cvl_core::polytope::MomentCone;
use cvl_core::sasaki;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn family(name: &str) -> Result<Family, String> {
    name.parse().map_err(|e: cvl_core::Error| e.to_string())
}

/// Critical points of EH on the product or blow-up polygon at `p`, as the
/// JSON critical point report.
pub fn critical_points(family_name: &str, p: f64, starts: usize, seed: u64) -> Result<String, String> {
    let poly = ckem::family_polytope(family(family_name)?, p).map_err(|e| e.to_string())?;
    let report = ckem::find_critical_points(&poly, starts, seed).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// EH on a `grid × grid` (θ, φ) grid, flattened as `θ, φ, EH` triples;
/// inadmissible cells are left out.
pub fn landscape(family_name: &str, p: f64, grid: usize) -> Result<Vec<f64>, String> {
    let poly = ckem::family_polytope(family(family_name)?, p).map_err(|e| e.to_string())?;
    let samples = ckem::landscape(&poly, grid).map_err(|e| e.to_string())?;
    Ok(samples.iter().flat_map(|s| [s.theta, s.phi, s.value]).collect())
}

/// Minimizes the Reeb volume for the cone over a lattice polygon given as
/// `[[x, y], ...]` in boundary order; the fan rays are `(1, x, y)`.
pub fn reeb_minimum(diagram_json: &str) -> Result<String, String> {
    let points: Vec<[i64; 2]> = serde_json::from_str(diagram_json).map_err(|e| format!("diagram: {e}"))?;
    let rays = points.iter().map(|&[x, y]| vec![1, x, y]).collect();
    let cone = MomentCone::new(rays).map_err(|e| e.to_string())?;
    let result = sasaki::minimize_reeb_volume(&cone, sasaki::DEFAULT_TOL).map_err(|e| e.to_string())?;
    Ok(json!({
        "xi": result.xi_star.xi,
        "volume": result.volume,
        "gradient_norm": result.gradient_norm,
        "iterations": result.iterations,
        "dual_rays": cone.dual_rays(),
    })
    .to_string())
}

#[wasm_bindgen(js_name = criticalPoints)]
pub fn critical_points_js(family_name: &str, p: f64, starts: u32, seed: u32) -> Result<String, JsError> {
    critical_points(family_name, p, starts as usize, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = landscape)]
pub fn landscape_js(family_name: &str, p: f64, grid: u32) -> Result<Vec<f64>, JsError> {
    landscape(family_name, p, grid as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = reebMinimum)]
pub fn reeb_minimum_js(diagram_json: &str) -> Result<String, JsError> {
    reeb_minimum(diagram_json).map_err(|e| JsError::new(&e))
}
