use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    check_coupling, coupled_state, meter_expectations, CouplingFlavor, CouplingSpec, Method,
    WeakValue, OVERLAP_CUTOFF,
};
use crate::error::{Error, Result};
use crate::state::{Operator, StateVector, C64};

/// Raw counts behind a sampled weak value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub trials: u64,
    pub postselected: u64,
    pub x_shots: u64,
    pub x_plus: u64,
    pub y_shots: u64,
    pub y_plus: u64,
    pub stderr_re: f64,
    pub stderr_im: f64,
}

/// Mean of a +-1 outcome and its binomial standard error.
///
/// The error uses `(k + 1/2) / (n + 1)` for the success fraction so it stays
/// positive when every outcome agrees. An empty basis carries no information:
/// mean 0, error 1 (the full half-range of the outcome).
fn pm_one_mean(plus: u64, shots: u64) -> (f64, f64) {
    if shots == 0 {
        return (0.0, 1.0);
    }
    let n = shots as f64;
    let mean = 2.0 * plus as f64 / n - 1.0;
    let p = (plus as f64 + 0.5) / (n + 1.0);
    (mean, 2.0 * (p * (1.0 - p) / n).sqrt())
}

/// Shot-by-shot simulation of the meter protocol.
///
/// Each trial passes postselection with the exact Born probability; the
/// successful trials alternate between an `X_m` readout (even success index)
/// and a `Y_m` readout (odd). Deterministic for a fixed `seed`.
pub fn sample_weak_value(
    observable: &Operator,
    pre: &StateVector,
    post: &StateVector,
    g: f64,
    shots: u64,
    seed: u64,
) -> Result<WeakValue> {
    check_coupling(g)?;
    if shots == 0 {
        return Err(Error::InvalidConfig(
            "sampling needs at least one shot".into(),
        ));
    }
    let spec = CouplingSpec::new(observable.clone(), g, CouplingFlavor::Canonical)?;
    let joint = coupled_state(&spec, pre)?;
    let rest = joint.partial_inner(post)?;
    let probability = rest.norm_sqr();
    let (p_success, p_x_plus, p_y_plus) = if probability < OVERLAP_CUTOFF * OVERLAP_CUTOFF {
        (0.0, 0.5, 0.5)
    } else {
        let meter = rest.scaled(C64::new(1.0 / probability.sqrt(), 0.0));
        let (x, y) = meter_expectations(&meter)?;
        (probability.min(1.0), (1.0 + x) / 2.0, (1.0 + y) / 2.0)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut postselected, mut x_plus, mut y_plus) = (0u64, 0u64, 0u64);
    for _ in 0..shots {
        if rng.random::<f64>() >= p_success {
            continue;
        }
        let p_plus = if postselected % 2 == 0 {
            p_x_plus
        } else {
            p_y_plus
        };
        let plus = rng.random::<f64>() < p_plus;
        if plus {
            if postselected % 2 == 0 {
                x_plus += 1;
            } else {
                y_plus += 1;
            }
        }
        postselected += 1;
    }
    if postselected == 0 {
        return Err(Error::NoPostselectedEvents);
    }

    let x_shots = postselected.div_ceil(2);
    let y_shots = postselected / 2;
    let (x, se_x) = pm_one_mean(x_plus, x_shots);
    let (y, se_y) = pm_one_mean(y_plus, y_shots);
    let scale = 2.0 * g;
    let summary = SampleSummary {
        trials: shots,
        postselected,
        x_shots,
        x_plus,
        y_shots,
        y_plus,
        stderr_re: se_x / scale,
        stderr_im: se_y / scale,
    };
    Ok(WeakValue {
        value: C64::new(x, y) / scale,
        method: Method::MeterSampled,
        pre: pre.clone(),
        post: post.clone(),
        observable: observable.clone(),
        g: Some(g),
        shots: Some(shots),
        stderr: Some(summary.stderr_re.hypot(summary.stderr_im)),
        sample: Some(summary),
    })
}
