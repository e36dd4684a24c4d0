//! Preset experiments: the original Cheshire Cat pair, the grin/snarl
//! separation, and the delayed-choice tuner setup with its (theta, phi) sweep.

mod table;

pub use table::{RowRecord, SweepTable, CSV_COLUMNS};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{Arm, Observable};
use crate::optics::{
    delayed_preselection, original_postselector, original_preselection, postselector,
};
use crate::state::{StateVector, C64};
use crate::weak::{
    closed_form_delayed, delayed_denominator, estimate_weak_value_meter, sample_weak_value,
    weak_value_analytic, Method, WeakValue, DEFAULT_COUPLING, MAX_COUPLING, OVERLAP_CUTOFF,
};

/// Rows whose `|cos(theta/2) + sin(theta/2) e^{i phi}|` falls below this are
/// flagged as diverged.
pub const POLE_THRESHOLD: f64 = 10.0 * OVERLAP_CUTOFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    OriginalCheshire,
    GrinSnarl,
    DelayedChoice,
}

impl Scenario {
    pub fn tag(self) -> &'static str {
        match self {
            Scenario::OriginalCheshire => "original",
            Scenario::GrinSnarl => "grin-snarl",
            Scenario::DelayedChoice => "delayed",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Scenario::OriginalCheshire),
            "grin-snarl" => Ok(Scenario::GrinSnarl),
            "delayed" => Ok(Scenario::DelayedChoice),
            other => Err(Error::InvalidConfig(format!(
                "unknown scenario `{other}` (expected original, grin-snarl or delayed)"
            ))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// How a weak value is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Analytic,
    Meter { g: f64 },
    Sampled { g: f64, shots: u64, seed: u64 },
}

impl Estimator {
    pub fn method(&self) -> Method {
        match self {
            Estimator::Analytic => Method::Analytic,
            Estimator::Meter { .. } => Method::MeterExact,
            Estimator::Sampled { .. } => Method::MeterSampled,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Estimator::Analytic => Ok(()),
            Estimator::Meter { g } => check_g(g),
            Estimator::Sampled { g, shots, .. } => {
                check_g(g)?;
                if shots == 0 {
                    return Err(Error::InvalidConfig("sampling needs shots > 0".into()));
                }
                Ok(())
            }
        }
    }

    /// Same estimator with its seed replaced by a per-stream derivative.
    fn for_stream(&self, stream: u64) -> Self {
        match *self {
            Estimator::Sampled { g, shots, seed } => Estimator::Sampled {
                g,
                shots,
                seed: derive_seed(seed, stream),
            },
            other => other,
        }
    }

    /// Seed family of sweep row `index`; observables branch off it in `delayed_row`.
    fn for_stream_row(&self, index: u64) -> Self {
        self.for_stream(index.wrapping_add(1 << 32))
    }

    /// Agreement tolerance with the analytic value: exact for `Analytic`, the
    /// first-order bound `5g` for the meter, `4 stderr` for samples.
    pub fn tolerance(&self, stderr: Option<f64>) -> f64 {
        match *self {
            Estimator::Analytic => 1e-12,
            Estimator::Meter { g } => 5.0 * g,
            Estimator::Sampled { .. } => 4.0 * stderr.unwrap_or(f64::INFINITY),
        }
    }

    pub fn estimate(
        &self,
        observable: Observable,
        pre: &StateVector,
        post: &StateVector,
    ) -> Result<WeakValue> {
        let op = observable.operator();
        match *self {
            Estimator::Analytic => weak_value_analytic(&op, pre, post),
            Estimator::Meter { g } => estimate_weak_value_meter(&op, pre, post, g),
            Estimator::Sampled { g, shots, seed } => {
                sample_weak_value(&op, pre, post, g, shots, seed)
            }
        }
    }
}

fn check_g(g: f64) -> Result<()> {
    if g > 0.0 && g <= MAX_COUPLING {
        Ok(())
    } else {
        Err(Error::InvalidCoupling(g))
    }
}

/// SplitMix64 step: independent-looking child seeds from one user seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub theta: f64,
    pub phi: f64,
    pub method: Method,
    pub g: f64,
    /// Trials for the sampled method; 0 selects an exact method.
    pub shots: u64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::DelayedChoice,
            theta: 0.0,
            phi: 0.0,
            method: Method::Analytic,
            g: DEFAULT_COUPLING,
            shots: 0,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn delayed(theta: f64, phi: f64) -> Self {
        Self {
            theta,
            phi,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !self.phi.is_finite() {
            return Err(Error::InvalidConfig("tuner angles must be finite".into()));
        }
        check_g(self.g)?;
        match (self.method, self.shots) {
            (Method::MeterSampled, 0) => {
                Err(Error::InvalidConfig("sampling needs shots > 0".into()))
            }
            (Method::Analytic | Method::MeterExact, n) if n > 0 => Err(Error::InvalidConfig(
                "shots only apply to the sampled method".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn estimator(&self) -> Estimator {
        match self.method {
            Method::Analytic => Estimator::Analytic,
            Method::MeterExact => Estimator::Meter { g: self.g },
            Method::MeterSampled => Estimator::Sampled {
                g: self.g,
                shots: self.shots,
                seed: self.seed,
            },
        }
    }
}

/// One estimated weak value in a scenario report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportEntry {
    pub observable: Observable,
    pub value: C64,
    pub stderr: Option<f64>,
}

/// Weak values of a fixed pre/postselected pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub method: Method,
    pub probability: f64,
    pub entries: Vec<ReportEntry>,
}

impl ScenarioReport {
    pub fn get(&self, observable: Observable) -> Option<C64> {
        self.entries
            .iter()
            .find(|e| e.observable == observable)
            .map(|e| e.value)
    }
}

fn report(
    scenario: Scenario,
    observables: &[Observable],
    estimator: &Estimator,
) -> Result<ScenarioReport> {
    estimator.validate()?;
    let (pre, post) = (original_preselection(), original_postselector());
    let entries = observables
        .iter()
        .enumerate()
        .map(|(k, &o)| {
            let w = estimator.for_stream(k as u64).estimate(o, &pre, &post)?;
            Ok(ReportEntry {
                observable: o,
                value: w.value,
                stderr: w.stderr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioReport {
        scenario,
        method: estimator.method(),
        probability: post.inner(&pre)?.norm_sqr(),
        entries,
    })
}

/// Which-path and grin weak values of the original pair:
/// `(Pi_L, Pi_R, sigma_x^L, sigma_x^R)`.
pub fn run_original_cheshire(estimator: &Estimator) -> Result<ScenarioReport> {
    report(
        Scenario::OriginalCheshire,
        &[
            Observable::PiL,
            Observable::PiR,
            Observable::XL,
            Observable::XR,
        ],
        estimator,
    )
}

/// Grin and snarl weak values of the original pair:
/// `(sigma_x^L, sigma_x^R, sigma_z^L, sigma_z^R)`.
pub fn run_grin_snarl(estimator: &Estimator) -> Result<ScenarioReport> {
    report(Scenario::GrinSnarl, &Observable::COMPONENTS, estimator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    Ok,
    /// Pre/post overlap vanishes; weak values undefined.
    Diverged,
    /// Sampling kept no postselected trial.
    NoEvents,
}

impl RowFlag {
    pub fn tag(self) -> &'static str {
        match self {
            RowFlag::Ok => "ok",
            RowFlag::Diverged => "diverged",
            RowFlag::NoEvents => "no_events",
        }
    }
}

/// Delayed-choice weak values at one tuner setting, in
/// [`Observable::COMPONENTS`] order `(xL, xR, zL, zR)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub phi: f64,
    pub values: Option<[C64; 4]>,
    pub stderr: Option<[f64; 4]>,
    /// Postselection probability without the meter, `|D|^2 / 4`.
    pub probability: f64,
    pub method: Method,
    pub flag: RowFlag,
}

impl SweepRow {
    pub fn value(&self, observable: Observable) -> Option<C64> {
        let k = Observable::COMPONENTS
            .iter()
            .position(|&o| o == observable)?;
        self.values.map(|v| v[k])
    }

    pub fn stderr_of(&self, observable: Observable) -> Option<f64> {
        let k = Observable::COMPONENTS
            .iter()
            .position(|&o| o == observable)?;
        self.stderr.map(|v| v[k])
    }

    pub fn is_flagged(&self) -> bool {
        self.flag != RowFlag::Ok
    }
}

fn delayed_row(theta: f64, phi: f64, estimator: &Estimator) -> Result<SweepRow> {
    let pre = delayed_preselection(theta, phi);
    let post = postselector();
    let mut row = SweepRow {
        theta,
        phi,
        values: None,
        stderr: None,
        probability: post.inner(&pre)?.norm_sqr(),
        method: estimator.method(),
        flag: RowFlag::Ok,
    };
    if delayed_denominator(theta, phi).norm() < POLE_THRESHOLD {
        row.flag = RowFlag::Diverged;
        return Ok(row);
    }
    let mut values = [C64::new(0.0, 0.0); 4];
    let mut stderr = [0.0; 4];
    for (k, &o) in Observable::COMPONENTS.iter().enumerate() {
        match estimator.for_stream(k as u64).estimate(o, &pre, &post) {
            Ok(w) => {
                values[k] = w.value;
                stderr[k] = w.stderr.unwrap_or(0.0);
            }
            Err(Error::VanishingOverlap { .. } | Error::ZeroProbability { .. }) => {
                row.flag = RowFlag::Diverged;
                return Ok(row);
            }
            Err(Error::NoPostselectedEvents) => {
                row.flag = RowFlag::NoEvents;
                return Ok(row);
            }
            Err(e) => return Err(e),
        }
    }
    row.values = Some(values);
    if matches!(estimator, Estimator::Sampled { .. }) {
        row.stderr = Some(stderr);
    }
    Ok(row)
}

/// A single delayed-choice row. Divergence is reported through the row flag;
/// only an invalid configuration is an error.
pub fn run_delayed_choice(cfg: &ExperimentConfig) -> Result<SweepRow> {
    cfg.validate()?;
    let estimator = cfg.estimator();
    delayed_row(cfg.theta, cfg.phi, &estimator.for_stream_row(0))
}

/// Delayed-choice rows over `theta_grid x phi_grid`, theta-major.
pub fn sweep(theta_grid: &[f64], phi_grid: &[f64], estimator: &Estimator) -> Result<SweepTable> {
    estimator.validate()?;
    if theta_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::InvalidConfig("sweep grids must be nonempty".into()));
    }
    if theta_grid.iter().chain(phi_grid).any(|a| !a.is_finite()) {
        return Err(Error::InvalidConfig("tuner angles must be finite".into()));
    }
    let points: Vec<(f64, f64)> = theta_grid
        .iter()
        .flat_map(|&t| phi_grid.iter().map(move |&p| (t, p)))
        .collect();
    let row =
        |(k, &(t, p)): (usize, &(f64, f64))| delayed_row(t, p, &estimator.for_stream_row(k as u64));
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        points
            .par_iter()
            .enumerate()
            .map(row)
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows = points
        .iter()
        .enumerate()
        .map(row)
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::new(rows))
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n).map(|i| start + step * i as f64).collect()
        }
    }
}

/// Deviations of a row from the independent closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowCheck {
    /// Largest `|row - closed form|` over the four components.
    pub closed_form_gap: f64,
    /// `|zL + zR - (c - e^{i phi} s)/D|` and the `x` counterpart, whichever is larger.
    pub sum_rule_gap: f64,
    /// `|prob - |D|^2/4|`.
    pub probability_gap: f64,
}

/// Compare an unflagged row with the closed-form weak values.
pub fn check_row(row: &SweepRow) -> Option<RowCheck> {
    let values = row.values?;
    let (theta, phi) = (row.theta, row.phi);
    let mut closed_form_gap = 0.0f64;
    for (k, &o) in Observable::COMPONENTS.iter().enumerate() {
        let cf = closed_form_delayed(o, theta, phi).ok()?;
        closed_form_gap = closed_form_gap.max((values[k] - cf).norm());
    }
    let d = delayed_denominator(theta, phi);
    let (s, c) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    let z_sum = (C64::new(c, 0.0) - e * s) / d;
    let x_sum = (C64::new(s, 0.0) + e * c) / d;
    let sum_rule_gap = (values[2] + values[3] - z_sum)
        .norm()
        .max((values[0] + values[1] - x_sum).norm());
    Some(RowCheck {
        closed_form_gap,
        sum_rule_gap,
        probability_gap: (row.probability - d.norm_sqr() / 4.0).abs(),
    })
}

/// Outcome of comparing arm assignments between two tuner settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipReport {
    pub before: SweepRow,
    pub after: SweepRow,
    /// Arm carrying the unit `sigma_x` weak value, before and after.
    pub grin_arm: (Option<Arm>, Option<Arm>),
    /// Arm carrying the unit `sigma_z` weak value, before and after.
    pub snarl_arm: (Option<Arm>, Option<Arm>),
    /// `sigma_z^R` weak value in the second configuration.
    pub snarl_right_after: Option<C64>,
    pub flipped: bool,
}

fn unit_arm(
    row: &SweepRow,
    left: Observable,
    right: Observable,
    estimator: &Estimator,
) -> Option<Arm> {
    let tol = |o| estimator.tolerance(row.stderr_of(o));
    let (l, r) = (row.value(left)?, row.value(right)?);
    let is_unit = |v: C64, o| (v.norm() - 1.0).abs() < tol(o);
    let is_zero = |v: C64, o| v.norm() < tol(o);
    match (
        is_unit(l, left) && is_zero(r, right),
        is_zero(l, left) && is_unit(r, right),
    ) {
        (true, false) => Some(Arm::Left),
        (false, true) => Some(Arm::Right),
        _ => None,
    }
}

/// Check that the grin and snarl swap arms between two tuner settings.
pub fn flip_check_between(
    before: (f64, f64),
    after: (f64, f64),
    estimator: &Estimator,
) -> Result<FlipReport> {
    estimator.validate()?;
    let before = delayed_row(before.0, before.1, &estimator.for_stream_row(0))?;
    let after = delayed_row(after.0, after.1, &estimator.for_stream_row(1))?;
    let grin = |r: &SweepRow| unit_arm(r, Observable::XL, Observable::XR, estimator);
    let snarl = |r: &SweepRow| unit_arm(r, Observable::ZL, Observable::ZR, estimator);
    let grin_arm = (grin(&before), grin(&after));
    let snarl_arm = (snarl(&before), snarl(&after));
    let flipped = match (grin_arm, snarl_arm) {
        ((Some(g0), Some(g1)), (Some(s0), Some(s1))) => g0 != g1 && s0 != s1 && g0 != s0,
        _ => false,
    };
    Ok(FlipReport {
        snarl_right_after: after.value(Observable::ZR),
        before,
        after,
        grin_arm,
        snarl_arm,
        flipped,
    })
}

/// The tuner pair `(0, 0)` versus `(pi, 0)`, analytically.
pub fn flip_check() -> Result<FlipReport> {
    flip_check_between((0.0, 0.0), (PI, 0.0), &Estimator::Analytic)
}
