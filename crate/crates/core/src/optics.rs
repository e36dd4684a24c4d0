//! Optical elements of the interferometer and the pre/postselected states
//! they produce.
//!
//! Phase convention: `phi` everywhere in the public API is the *net* relative
//! phase of `|R>` against `|L>` in the prepared state
//! `(|L> + e^{i phi}|R>)(cos(theta/2)|H> + sin(theta/2)|V>)/sqrt2`. The
//! quarter-wave phase picked up by the reflected (left) beam at the first
//! beam splitter is compensated inside [`prepare_delayed`].

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::error::Result;
use crate::state::{Operator, StateVector, Subsystem, C64, I, ONE, ZERO};

/// Input port of the first beam splitter that the photon enters.
pub const INPUT_PORT: usize = 0;

/// 50:50 beam splitter `(1/sqrt2)[[i, 1], [1, i]]` on the path, `(L, R)` order.
///
/// A photon entering [`INPUT_PORT`] leaves as `(i|L> + |R>)/sqrt2`.
pub fn beam_splitter() -> Operator {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    Operator::single(Subsystem::Path, [[I * h, h], [h, I * h]])
}

/// Polarization rotation; `|H> -> cos(theta/2)|H> + sin(theta/2)|V>`.
pub fn polarization_tuner(theta: f64) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    let (s, c) = (C64::new(s, 0.0), C64::new(c, 0.0));
    Operator::single(Subsystem::Polarization, [[c, -s], [s, c]])
}

/// `diag(1, e^{i phi})` on the path.
pub fn path_phase(phi: f64) -> Operator {
    Operator::single(
        Subsystem::Path,
        [[ONE, ZERO], [ZERO, C64::from_polar(1.0, phi)]],
    )
}

/// Photon in the input port of the first beam splitter, horizontally polarized.
pub fn input_state() -> StateVector {
    StateVector::basis(Subsystem::Path, INPUT_PORT)
        .tensor(&StateVector::horizontal())
        .expect("disjoint labels")
}

/// Setting of the right-arm phase shifter that yields a net relative phase
/// `phi` once the reflection phase of the left arm is accounted for.
pub fn shifter_setting(phi: f64) -> f64 {
    phi + FRAC_PI_2
}

/// An ordered train of elements acting on the input photon.
#[derive(Debug, Clone, Default)]
pub struct Preparation {
    elements: Vec<Operator>,
}

impl Preparation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn then(mut self, element: Operator) -> Self {
        self.elements.push(element);
        self
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn run(&self, input: &StateVector) -> Result<StateVector> {
        self.elements
            .iter()
            .try_fold(input.clone(), |state, el| el.apply(&state))
    }
}

/// Full preparation train: BS1, polarization tuners, right-arm shifter, then
/// removal of the global phase `i` that the reflection leaves behind.
pub fn prepare_delayed(theta: f64, phi: f64) -> Result<StateVector> {
    let raw = Preparation::new()
        .then(beam_splitter())
        .then(polarization_tuner(theta))
        .then(path_phase(shifter_setting(phi)))
        .run(&input_state())?;
    Ok(raw.scaled(-I))
}

/// Undo the reflection phase on a state that left BS1 through any further
/// elements: a quarter-wave shift on the right arm and the global factor `-i`.
/// Applied to the output of BS1, a tuner and `path_phase(phi)` this gives the
/// same state as [`prepare_delayed`].
pub fn compensate_reflection(raw: &StateVector) -> Result<StateVector> {
    Ok(path_phase(FRAC_PI_2).apply(raw)?.scaled(-I))
}

/// `(|L> + e^{i phi}|R>)(cos(theta/2)|H> + sin(theta/2)|V>)/sqrt2`, written
/// down directly.
pub fn delayed_preselection(theta: f64, phi: f64) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let path = StateVector::qubit(Subsystem::Path, C64::new(h, 0.0), C64::from_polar(h, phi));
    let (s, c) = (theta / 2.0).sin_cos();
    let pol = StateVector::qubit(Subsystem::Polarization, C64::new(c, 0.0), C64::new(s, 0.0));
    path.tensor(&pol).expect("disjoint labels")
}

/// Rank-1 target of the detector-D1 click: `(|L>|H> + |R>|V>)/sqrt2`.
pub fn postselector() -> StateVector {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::new(
        vec![Subsystem::Path, Subsystem::Polarization],
        vec![h, ZERO, ZERO, h],
    )
    .expect("four amplitudes")
}

/// Preselection of the original Cheshire Cat setup: `(i|L> + |R>)|H>/sqrt2`.
pub fn original_preselection() -> StateVector {
    let h = FRAC_1_SQRT_2;
    StateVector::new(
        vec![Subsystem::Path, Subsystem::Polarization],
        vec![C64::new(0.0, h), ZERO, C64::new(h, 0.0), ZERO],
    )
    .expect("four amplitudes")
}

/// Postselection of the original setup: `(|L>|H> - i|R>|V>)/sqrt2`.
pub fn original_postselector() -> StateVector {
    let h = FRAC_1_SQRT_2;
    StateVector::new(
        vec![Subsystem::Path, Subsystem::Polarization],
        vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(0.0, -h)],
    )
    .expect("four amplitudes")
}
