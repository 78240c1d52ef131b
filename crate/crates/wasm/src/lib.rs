//! WebAssembly bindings for the browser demo in `www/`. Each call returns a
//! JSON string or throws the error message.

pub mod demo;

use wasm_bindgen::prelude::*;

fn to_js(v: hypack::Result<serde_json::Value>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn packing_disk(c: f64, big_r: f64, cap: usize) -> Result<String, JsValue> {
    to_js(demo::packing_disk(c, big_r, cap))
}

#[wasm_bindgen]
pub fn net_disk(rho: f64, delta: f64, x: f64, y: f64) -> Result<String, JsValue> {
    to_js(demo::net_disk(rho, delta, x, y))
}

#[wasm_bindgen]
pub fn bunched_search(r: f64, eps: f64, k: usize, hausdorff: bool) -> Result<String, JsValue> {
    to_js(demo::bunched_search(r, eps, k, hausdorff))
}
