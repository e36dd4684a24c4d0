use std::f64::consts::PI;

use cheshire_web::{delayed_row_json, heatmap_values, run_program_json, MAX_GRID};
use serde_json::Value;

fn row(theta: f64, phi: f64, method: &str) -> Value {
    serde_json::from_str(&delayed_row_json(theta, phi, method, 1e-3).unwrap()).unwrap()
}

#[test]
fn slider_row_at_pi() {
    let r = row(PI, 0.0, "analytic");
    assert!((r["xL_re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r["zR_re"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(r["flag"], "ok");
    let m = row(PI, 0.0, "meter");
    assert!((m["zR_re"].as_f64().unwrap() + 1.0).abs() < 5e-3);
    assert_eq!(m["method"], "meter");
}

#[test]
fn slider_row_at_pole_is_flagged() {
    let r = row(PI / 2.0, PI, "analytic");
    assert_eq!(r["flag"], "diverged");
    assert!(r["xL_re"].is_null());
}

#[test]
fn slider_row_rejects_bad_input() {
    assert!(delayed_row_json(0.0, 0.0, "sample", 1e-3).is_err());
    assert!(delayed_row_json(0.0, 0.0, "meter", 0.5).is_err());
    assert!(delayed_row_json(f64::NAN, 0.0, "analytic", 1e-3).is_err());
}

#[test]
fn heatmap_layout_and_poles() {
    let n = 13;
    let v = heatmap_values("zR", "re", n).unwrap();
    assert_eq!(v.len(), n * n);
    // theta = pi is row 6; zR = -1 for every phi
    for j in 0..n {
        assert!((v[6 * n + j] + 1.0).abs() < 1e-12);
    }
    // theta = pi/2, phi = pi sits on the pole
    assert!(v[3 * n + 6].is_nan());
    assert_eq!(v.iter().filter(|x| x.is_nan()).count(), 3);
    let a = heatmap_values("xL", "abs", 4).unwrap();
    assert!(a.iter().all(|x| x.is_nan() || *x >= 0.0));
}

#[test]
fn heatmap_rejects_bad_input() {
    assert!(heatmap_values("piL", "re", 4).is_err());
    assert!(heatmap_values("qq", "re", 4).is_err());
    assert!(heatmap_values("xL", "phase", 4).is_err());
    assert!(heatmap_values("xL", "re", 0).is_err());
    assert!(heatmap_values("xL", "re", MAX_GRID + 1).is_err());
}

#[test]
fn program_runner() {
    let src = "tuner theta=pi\nphase phi=0\npreselect delayed\npostselect delayed\nmeasure zR method=analytic";
    let out: Value = serde_json::from_str(&run_program_json(src).unwrap()).unwrap();
    assert!((out[0]["value_re"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    let err = run_program_json("preselect delayed\npostselect delayed\nmeasure zR method=guess")
        .unwrap_err();
    assert!(err.starts_with("line 3, column 19"), "{err}");
}
