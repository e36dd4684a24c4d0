//! Weak values of pre/postselected observables.
//!
//! Three routes to the same number:
//! * [`weak_value_analytic`]: the quotient `<post|A|pre> / <post|pre>`;
//! * [`estimate_weak_value_meter`]: couple a qubit meter, postselect, and read
//!   the conditional meter state's `X`/`Y` expectations;
//! * [`sample_weak_value`]: the same protocol run shot by shot.

mod coupling;
mod sampling;

pub use coupling::{
    arm_rotation_block, coupling_unitary, meter_rotation, ArmFactorization, CouplingFlavor,
    CouplingSpec,
};
pub use sampling::{sample_weak_value, SampleSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::Observable;
use crate::state::{Operator, StateVector, Subsystem, C64};

/// Smallest `|<post|pre>|` for which a weak value is considered defined.
pub const OVERLAP_CUTOFF: f64 = 1e-10;
/// Meter coupling strength used when none is given.
pub const DEFAULT_COUPLING: f64 = 1e-3;
/// Upper end of the weak regime accepted by the meter routes.
pub const MAX_COUPLING: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    MeterExact,
    MeterSampled,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MeterExact => "meter",
            Method::MeterSampled => "sample",
        }
    }
}

/// A weak value together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValue {
    pub value: C64,
    pub method: Method,
    pub pre: StateVector,
    pub post: StateVector,
    pub observable: Operator,
    /// Coupling strength; `None` for analytic values.
    pub g: Option<f64>,
    /// Trials simulated; sampled values only.
    pub shots: Option<u64>,
    /// Combined standard error `hypot(se_re, se_im)`; sampled values only.
    pub stderr: Option<f64>,
    pub sample: Option<SampleSummary>,
}

fn check_overlap(pre: &StateVector, post: &StateVector, cutoff: f64) -> Result<C64> {
    let overlap = post.inner(pre)?;
    if overlap.norm() < cutoff {
        return Err(Error::VanishingOverlap {
            overlap: overlap.norm(),
        });
    }
    Ok(overlap)
}

pub(crate) fn check_coupling(g: f64) -> Result<()> {
    if g > 0.0 && g <= MAX_COUPLING {
        Ok(())
    } else {
        Err(Error::InvalidCoupling(g))
    }
}

pub fn weak_value_analytic(
    observable: &Operator,
    pre: &StateVector,
    post: &StateVector,
) -> Result<WeakValue> {
    weak_value_analytic_with_cutoff(observable, pre, post, OVERLAP_CUTOFF)
}

pub fn weak_value_analytic_with_cutoff(
    observable: &Operator,
    pre: &StateVector,
    post: &StateVector,
    cutoff: f64,
) -> Result<WeakValue> {
    let overlap = check_overlap(pre, post, cutoff)?;
    let numerator = post.inner(&observable.apply(pre)?)?;
    Ok(WeakValue {
        value: numerator / overlap,
        method: Method::Analytic,
        pre: pre.clone(),
        post: post.clone(),
        observable: observable.clone(),
        g: None,
        shots: None,
        stderr: None,
        sample: None,
    })
}

/// `cos(theta/2) + sin(theta/2) e^{i phi}`: twice the overlap of the
/// delayed-choice pre/postselected pair.
pub fn delayed_denominator(theta: f64, phi: f64) -> C64 {
    let (s, c) = (theta / 2.0).sin_cos();
    C64::new(c, 0.0) + C64::from_polar(s, phi)
}

/// Closed-form weak values of the delayed-choice setup.
pub fn closed_form_delayed(observable: Observable, theta: f64, phi: f64) -> Result<C64> {
    let d = delayed_denominator(theta, phi);
    // |<post|pre>| = |d| / 2
    if d.norm() / 2.0 < OVERLAP_CUTOFF {
        return Err(Error::VanishingOverlap {
            overlap: d.norm() / 2.0,
        });
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    let numerator = match observable {
        Observable::XL => C64::new(s, 0.0),
        Observable::XR => e * c,
        Observable::ZL => C64::new(c, 0.0),
        Observable::ZR => -e * s,
        Observable::PiL => C64::new(c, 0.0),
        Observable::PiR => e * s,
    };
    Ok(numerator / d)
}

/// Project the `target` factors of `state` onto `target`.
///
/// Returns the renormalized state of the remaining factors and the
/// probability of the projection.
pub fn postselect(state: &StateVector, target: &StateVector) -> Result<(StateVector, f64)> {
    let rest = state.partial_inner(target)?;
    let probability = rest.norm_sqr();
    if probability < OVERLAP_CUTOFF * OVERLAP_CUTOFF {
        return Err(Error::ZeroProbability { probability });
    }
    let conditional = rest.scaled(C64::new(1.0 / probability.sqrt(), 0.0));
    Ok((conditional, probability.min(1.0)))
}

/// Conditional meter state after coupling and a successful postselection.
#[derive(Debug, Clone, PartialEq)]
pub struct MeterReading {
    pub meter: StateVector,
    pub probability: f64,
    /// `<X_m>` of the conditional meter state.
    pub x: f64,
    /// `<Y_m>` of the conditional meter state.
    pub y: f64,
}

impl MeterReading {
    /// `(<X_m> + i<Y_m>) / (2g)`.
    pub fn shift(&self, g: f64) -> C64 {
        C64::new(self.x, self.y) / (2.0 * g)
    }
}

pub(crate) const METER: Subsystem = Subsystem::Meter(0);

/// Joint state after the coupling unitary, before postselection.
pub(crate) fn coupled_state(spec: &CouplingSpec, pre: &StateVector) -> Result<StateVector> {
    let joint = pre.tensor(&StateVector::meter_ready(0))?;
    coupling_unitary(spec)?.apply(&joint)
}

pub(crate) fn meter_expectations(meter: &StateVector) -> Result<(f64, f64)> {
    let x = Operator::pauli_x(METER).expectation(meter)?.re;
    let y = Operator::pauli_y(METER).expectation(meter)?.re;
    Ok((x, y))
}

pub fn meter_reading(
    spec: &CouplingSpec,
    pre: &StateVector,
    post: &StateVector,
) -> Result<MeterReading> {
    let joint = coupled_state(spec, pre)?;
    let (meter, probability) = postselect(&joint, post)?;
    let (x, y) = meter_expectations(&meter)?;
    Ok(MeterReading {
        meter,
        probability,
        x,
        y,
    })
}

/// Exact meter-tomography estimate using the canonical coupling.
pub fn estimate_weak_value_meter(
    observable: &Operator,
    pre: &StateVector,
    post: &StateVector,
    g: f64,
) -> Result<WeakValue> {
    estimate_weak_value_meter_with(observable, pre, post, g, CouplingFlavor::Canonical)
}

pub fn estimate_weak_value_meter_with(
    observable: &Operator,
    pre: &StateVector,
    post: &StateVector,
    g: f64,
    flavor: CouplingFlavor,
) -> Result<WeakValue> {
    check_coupling(g)?;
    check_overlap(pre, post, OVERLAP_CUTOFF)?;
    let spec = CouplingSpec::new(observable.clone(), g, flavor)?;
    let reading = meter_reading(&spec, pre, post)?;
    Ok(WeakValue {
        value: reading.shift(g),
        method: Method::MeterExact,
        pre: pre.clone(),
        post: post.clone(),
        observable: observable.clone(),
        g: Some(g),
        shots: None,
        stderr: None,
        sample: None,
    })
}

/// First-order meter shift produced by the [`CouplingFlavor::ArmRotation`]
/// coupling: `<post|A|pre> / <post|S|pre>`, where `S` is the polarization
/// involution the coupling applies in both arms. Equals the weak value only
/// when `S pre = +-pre`.
pub fn arm_rotation_target(
    observable: &Operator,
    pre: &StateVector,
    post: &StateVector,
) -> Result<C64> {
    let factors = ArmFactorization::of(observable)?;
    let denominator = check_overlap(
        &factors.polarization_part().apply(pre)?,
        post,
        OVERLAP_CUTOFF,
    )?;
    Ok(post.inner(&observable.apply(pre)?)? / denominator)
}
