//! Browser bindings: each export takes plain numbers or JSON text and returns JSON text.

use dirichlet_lab::series::{Analytic, DirichletPolynomial};
use dirichlet_lab::torus::{line_segments, parallelogram_cover, ss_outer_construct, visit_fraction, SsOptions, TorusSet};
use dirichlet_lab::zeros::{isolate_zeros, Rectangle};
use dirichlet_lab::{corpus, io, Complex64, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn series(spec: &str) -> Result<DirichletPolynomial> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        io::read_series(spec)
    } else {
        corpus::build(spec)
    }
}

fn pieces(u: &TorusSet) -> Value {
    u.pieces().iter().map(|p| json!(p.vertices())).collect()
}

/// Cover of `|tau| < n` by a rhombus of the given width, the flow segments for `|tau| < t`, and
/// the visit fraction against the cover's measure.
pub fn flow_visit(n: f64, width: f64, t: f64, seed: u64) -> Result<Value> {
    let cover = parallelogram_cover(n, width, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let segs = line_segments(-t, t)?;
    let v = visit_fraction(&cover.set, t)?;
    let intervals = cover.set.flow_intervals(-t, t)?;
    Ok(json!({
        "pieces": pieces(&cover.set),
        "segments": segs.segments.iter().map(|s| [s.start, s.end]).collect::<Vec<_>>(),
        "intervals": intervals,
        "fraction": v.fraction,
        "measure": v.measure,
    }))
}

pub fn zeros(spec: &str, sigma0: f64, sigma1: f64, t0: f64, t1: f64) -> Result<Value> {
    let f = series(spec)?;
    let r = Rectangle::new(sigma0, sigma1, t0, t1)?;
    let z = isolate_zeros(&f, &r, 1e-9)?;
    Ok(json!({
        "complete": z.complete,
        "zeros": z.zeros.iter().map(|z| json!({
            "re": z.location.re, "im": z.location.im, "multiplicity": z.multiplicity, "radius": z.radius
        })).collect::<Vec<_>>(),
    }))
}

/// Builds the outer function for a rhombus cover and samples `|f(i tau)|` with its target on `[-t, t]`.
pub fn outer_trace(n: f64, width: f64, delta: f64, degree: u32, t: f64, samples: usize) -> Result<Value> {
    let cover = parallelogram_cover(n, width, &mut ChaCha8Rng::seed_from_u64(0))?;
    let opts = SsOptions { log2_grid: 8, ..SsOptions::default() };
    let c = ss_outer_construct(&cover.set, delta, degree, opts)?;
    let k = samples.max(2) - 1;
    let (mut tau, mut abs, mut target) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..=k {
        let x = -t + 2.0 * t * i as f64 / k as f64;
        tau.push(x);
        abs.push(c.series.eval(Complex64::new(0.0, x)).norm());
        target.push(c.target_at(dirichlet_lab::torus::kronecker_point(x)));
    }
    Ok(json!({
        "tau": tau, "abs": abs, "target": target,
        "terms": c.series.len(), "e_inf": c.e_inf, "measure": cover.set.measure(),
    }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = flowVisit)]
pub fn flow_visit_js(n: f64, width: f64, t: f64, seed: u32) -> std::result::Result<String, JsError> {
    to_js(flow_visit(n, width, t, seed as u64))
}

#[wasm_bindgen(js_name = zeros)]
pub fn zeros_js(spec: &str, sigma0: f64, sigma1: f64, t0: f64, t1: f64) -> std::result::Result<String, JsError> {
    to_js(zeros(spec, sigma0, sigma1, t0, t1))
}

#[wasm_bindgen(js_name = outerTrace)]
pub fn outer_trace_js(n: f64, width: f64, delta: f64, degree: u32, t: f64, samples: u32) -> std::result::Result<String, JsError> {
    to_js(outer_trace(n, width, delta, degree, t, samples as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visit_payload() {
        let v = flow_visit(5.0, 0.3, 5.0, 0).unwrap();
        // the cover contains the whole segment it was built for
        assert!((v["fraction"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!(!v["segments"].as_array().unwrap().is_empty());
    }

    #[test]
    fn davenport_zeros() {
        let v = zeros("davenport", 0.5, 1.5, -20.0, 20.0).unwrap();
        assert_eq!(v["zeros"].as_array().unwrap().len(), 5);
        let inline = zeros(r#"{"terms":[{"n":1,"re":1},{"n":2,"re":-2}]}"#, 0.5, 1.5, -20.0, 20.0).unwrap();
        assert_eq!(inline, v);
        assert!(zeros("nope", 0.5, 1.5, -1.0, 1.0).is_err());
    }

    #[test]
    fn outer_payload() {
        let v = outer_trace(4.0, 0.3, 0.5, 16, 4.0, 101).unwrap();
        assert_eq!(v["tau"].as_array().unwrap().len(), 101);
        assert!(v["terms"].as_u64().unwrap() > 1);
    }
}
