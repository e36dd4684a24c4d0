//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function of the same name with
//! a `_json`/`_values` suffix, which is what the native tests exercise.

use std::f64::consts::PI;

use wasm_bindgen::prelude::*;

use cheshire_core::dsl;
use cheshire_core::scenarios::{
    linspace, run_delayed_choice, sweep, Estimator, ExperimentConfig, SweepTable,
};
use cheshire_core::{Method, Observable};

/// Largest heatmap side accepted from the page.
pub const MAX_GRID: usize = 256;

fn method_of(name: &str) -> Result<Method, String> {
    match name {
        "analytic" => Ok(Method::Analytic),
        "meter" => Ok(Method::MeterExact),
        other => Err(format!(
            "unknown method `{other}` (expected analytic or meter)"
        )),
    }
}

/// One delayed-choice row as a JSON object (the `rows` schema item).
pub fn delayed_row_json(theta: f64, phi: f64, method: &str, g: f64) -> Result<String, String> {
    let cfg = ExperimentConfig {
        method: method_of(method)?,
        g,
        ..ExperimentConfig::delayed(theta, phi)
    };
    let row = run_delayed_choice(&cfg).map_err(|e| e.to_string())?;
    let rec = SweepTable::new(vec![row])
        .records()
        .next()
        .expect("one row");
    Ok(serde_json::to_string(&rec).expect("plain record"))
}

/// `n x n` analytic grid over `[0, 2pi]^2`, theta-major; `part` is one of
/// `re`, `im`, `abs`, `arg`. Poles come back as NaN.
pub fn heatmap_values(observable: &str, part: &str, n: usize) -> Result<Vec<f64>, String> {
    let o: Observable = observable
        .parse()
        .map_err(|e: cheshire_core::observables::UnknownObservable| e.to_string())?;
    if !Observable::COMPONENTS.contains(&o) {
        return Err(format!("heatmaps cover xL, xR, zL and zR, not {o}"));
    }
    let pick: fn(cheshire_core::C64) -> f64 = match part {
        "re" => |z| z.re,
        "im" => |z| z.im,
        "abs" => |z| z.norm(),
        "arg" => |z| z.arg(),
        other => {
            return Err(format!(
                "unknown part `{other}` (expected re, im, abs or arg)"
            ))
        }
    };
    if n == 0 || n > MAX_GRID {
        return Err(format!("grid size must be in 1..={MAX_GRID}"));
    }
    let grid = linspace(0.0, 2.0 * PI, n);
    let table = sweep(&grid, &grid, &Estimator::Analytic).map_err(|e| e.to_string())?;
    Ok(table
        .rows
        .iter()
        .map(|r| r.value(o).map_or(f64::NAN, pick))
        .collect())
}

/// Parse and run `.mzi` source; JSON records or a positioned error message.
pub fn run_program_json(source: &str) -> Result<String, String> {
    let program = dsl::parse(source).map_err(|e| e.to_string())?;
    let out = dsl::compile_and_run(&program).map_err(|e| e.to_string())?;
    Ok(out.to_json())
}

#[wasm_bindgen(js_name = delayedRow)]
pub fn delayed_row(theta: f64, phi: f64, method: &str, g: f64) -> Result<String, JsError> {
    delayed_row_json(theta, phi, method, g).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn heatmap(observable: &str, part: &str, n: usize) -> Result<Vec<f64>, JsError> {
    heatmap_values(observable, part, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = runProgram)]
pub fn run_program(source: &str) -> Result<String, JsError> {
    run_program_json(source).map_err(|e| JsError::new(&e))
}

/// Evaluate an angle expression such as `3*pi/4` for the slider text boxes.
#[wasm_bindgen(js_name = parseAngle)]
pub fn parse_angle(text: &str) -> Result<f64, JsError> {
    dsl::parse_angle(text).map_err(|e| JsError::new(&e))
}
