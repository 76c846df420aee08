//! Browser bindings: classify a point, estimate atom probabilities, and
//! sample a labelled region cloud. Every export returns a JSON string.
//!
//! The `*_json` functions are plain Rust so they can be tested natively;
//! the `#[wasm_bindgen]` wrappers turn their errors into JS exceptions.

use hl_atlas::atlas::{self, BooleanExpr, EstimateReport};
use hl_atlas::criteria::{Mode, Predicate, Thresholds};
use hl_atlas::geometry;
use hl_atlas::quasirandom::SequenceSpec;
use hl_atlas::{profile, Family, QPoint};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest raw budget accepted by [`estimate_json`]; keeps the page responsive.
pub const MAX_ESTIMATE_POINTS: u64 = 50_000_000;
/// Largest cloud accepted by [`cloud_json`].
pub const MAX_CLOUD_POINTS: usize = 20_000;
const CLOUD_MAX_RAW: u64 = 2_000_000_000;

fn family(dim: u32) -> Result<Family, String> {
    Family::from_dim(dim as usize).map_err(|e| e.to_string())
}

/// Full criteria profile of `q` (comma-separated, rationals allowed).
pub fn classify_json(dim: u32, q: &str) -> Result<String, String> {
    let family = family(dim)?;
    let q = QPoint::parse(family, q).map_err(|e| e.to_string())?;
    let p = profile(&q, &Thresholds::for_family(family), Mode::Both).map_err(|e| e.to_string())?;
    serde_json::to_string(&p).map_err(|e| e.to_string())
}

/// Atom probabilities over `[P, S, PPT]` from `points` raw indices.
pub fn estimate_json(dim: u32, points: u64) -> Result<String, String> {
    let family = family(dim)?;
    if points == 0 || points > MAX_ESTIMATE_POINTS {
        return Err(format!("points must be in 1..={MAX_ESTIMATE_POINTS}"));
    }
    let preds = [Predicate::P, Predicate::S, Predicate::Ppt];
    let spec = SequenceSpec::new(family.n_coords());
    let t = atlas::tally(family, &preds, Thresholds::for_family(family), spec, points, 1).map_err(|e| e.to_string())?;
    let report = EstimateReport::new(&t, &preds).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// First `count` qutrit points satisfying `expr`, as `{q, label}` rows.
pub fn cloud_json(expr: &str, count: usize) -> Result<String, String> {
    if count == 0 || count > MAX_CLOUD_POINTS {
        return Err(format!("count must be in 1..={MAX_CLOUD_POINTS}"));
    }
    let e = BooleanExpr::parse(expr).map_err(|e| e.to_string())?;
    let th = Thresholds::qutrit();
    let cloud = geometry::region_cloud(&e, count, Family::Qutrit, &th, SequenceSpec::new(3), CLOUD_MAX_RAW)
        .map_err(|e| e.to_string())?;
    let rows: Vec<_> = cloud.rows.iter().map(|r| json!({"q": r.q, "label": r.label.name()})).collect();
    Ok(json!({"expr": e.to_string(), "raw_scanned": cloud.raw_scanned, "points": rows}).to_string())
}

#[wasm_bindgen]
pub fn classify(dim: u32, q: &str) -> Result<String, JsError> {
    classify_json(dim, q).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn estimate(dim: u32, points: f64) -> Result<String, JsError> {
    if !(points.is_finite() && points >= 1.0) {
        return Err(JsError::new("points must be a positive number"));
    }
    estimate_json(dim, points as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cloud(expr: &str, count: u32) -> Result<String, JsError> {
    cloud_json(expr, count as usize).map_err(|e| JsError::new(&e))
}
