//! WebAssembly bindings for a static demo page.
//!
//! Each export returns JSON (or a raster buffer) so the page needs no glue
//! beyond `wasm-bindgen`.

use gevreykit::borel::{borel_sum, BorelSumConfig};
use gevreykit::sector::t_regions;
use gevreykit::series::stirling_coeffs;
use gevreykit::stirling::{binet_remainder, estimates_st_bound, optimal_error_stirling, BinetConfig};
use gevreykit::{Complex64, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct CurvePoint {
    n: usize,
    bound: f64,
    actual: f64,
}

#[derive(Serialize)]
struct Curve {
    n_opt: usize,
    optimal_bound: f64,
    points: Vec<CurvePoint>,
}

/// Actual Stirling error and its bound for truncation orders `1..=n_max`.
pub fn error_curve_json(re: f64, im: f64, n_max: usize) -> Result<String> {
    let z = Complex64::new(re, im);
    let cfg = BinetConfig::default();
    let opt = optimal_error_stirling(z)?;
    let mut points = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        points.push(CurvePoint {
            n,
            bound: estimates_st_bound(z, n)?,
            actual: binet_remainder(z, 2 * n, &cfg)?.value.norm(),
        });
    }
    Ok(serde_json::to_string(&Curve {
        n_opt: opt.n_opt,
        optimal_bound: opt.bound,
        points,
    })?)
}

/// Row-major raster of the t-plane over `[-extent, extent]^2`, top row first.
/// Bit 0 marks the upper region, bit 1 the lower one, bit 2 the right part.
pub fn t_region_raster(delta: f64, a: f64, width: usize, height: usize, extent: f64) -> Result<Vec<u8>> {
    let pair = t_regions(delta, a)?;
    let mut out = Vec::with_capacity(width * height);
    for row in 0..height {
        let y = extent * (1.0 - 2.0 * (row as f64 + 0.5) / height as f64);
        for col in 0..width {
            let x = extent * (2.0 * (col as f64 + 0.5) / width as f64 - 1.0);
            let t = Complex64::new(x, y);
            let mut code = 0u8;
            if pair.in_s1(t) {
                code |= 1;
            }
            if pair.in_s2(t) {
                code |= 2;
            }
            if pair.in_right(t) {
                code |= 4;
            }
            out.push(code);
        }
    }
    Ok(out)
}

/// Borel-Pade-Laplace sum of the Stirling series with `n_terms` coefficients.
pub fn stirling_borel_sum_json(re: f64, im: f64, n_terms: usize) -> Result<String> {
    let p = stirling_coeffs(n_terms.saturating_sub(1));
    borel_sum(&p, Complex64::new(re, im), &BorelSumConfig::default())?.to_json()
}

fn js(e: gevreykit::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = errorCurve)]
pub fn error_curve(re: f64, im: f64, n_max: usize) -> std::result::Result<String, JsError> {
    error_curve_json(re, im, n_max).map_err(js)
}

#[wasm_bindgen(js_name = tRegionRaster)]
pub fn t_region(delta: f64, a: f64, width: usize, height: usize, extent: f64) -> std::result::Result<Vec<u8>, JsError> {
    t_region_raster(delta, a, width, height, extent).map_err(js)
}

#[wasm_bindgen(js_name = stirlingBorelSum)]
pub fn stirling_borel_sum(re: f64, im: f64, n_terms: usize) -> std::result::Result<String, JsError> {
    stirling_borel_sum_json(re, im, n_terms).map_err(js)
}
