//! WebAssembly bindings for a small interactive page (`www/index.html`).
//!
//! All numbers cross the boundary as flat `Float64Array`s; see [`demo`] for
//! their layout.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js(e: geosep::GeoError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = choleskyDistances)]
pub fn cholesky_distances(half: usize, second: bool) -> Result<Vec<f64>, JsError> {
    demo::cholesky_distances(half, second).map_err(js)
}

#[wasm_bindgen(js_name = choleskyGaps)]
pub fn cholesky_gaps(half: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    demo::cholesky_gaps(half, seed).map_err(js)
}

#[wasm_bindgen(js_name = chiralCloud)]
pub fn chiral_cloud(seed: u64) -> Vec<f64> {
    demo::chiral_cloud(seed)
}

#[wasm_bindgen(js_name = chiralityGaps)]
pub fn chirality_gaps(seed: u64, angle: f64) -> Result<Vec<f64>, JsError> {
    demo::chirality_gaps(seed, angle).map_err(js)
}

#[wasm_bindgen(js_name = noiseCurve)]
pub fn noise_curve(half: usize, seed: u64, sigmas: Vec<f64>) -> Result<Vec<f64>, JsError> {
    demo::noise_curve(half, seed, &sigmas).map_err(js)
}
