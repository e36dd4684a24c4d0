use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CircuitProgram, MeasureSpec, Selection, Statement};
use crate::error::Error;
use crate::observables::Observable;
use crate::optics::{
    beam_splitter, compensate_reflection, input_state, original_postselector, path_phase,
    polarization_tuner, postselector, Preparation,
};
use crate::scenarios::{Estimator, RowFlag, POLE_THRESHOLD};
use crate::state::{StateVector, C64};
use crate::weak::{Method, DEFAULT_COUPLING};

/// Trials per sampled measurement when `shots=` is omitted.
pub const DEFAULT_SHOTS: u64 = 100_000;

/// A scenario error attributed to the source line that caused it.
#[derive(Debug, Error)]
#[error("line {line}: {source}")]
pub struct RunError {
    pub line: usize,
    #[source]
    pub source: Error,
}

/// Result of one `measure` statement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureRecord {
    pub line: usize,
    pub observable: Observable,
    pub method: Method,
    pub g: Option<f64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    /// `None` when the row is flagged.
    pub value: Option<C64>,
    pub stderr: Option<f64>,
    /// Postselection probability without the meter.
    pub probability: f64,
    pub flag: RowFlag,
}

/// Column order of [`ProgramRecord`] in CSV and JSON.
pub const RECORD_COLUMNS: [&str; 11] = [
    "line",
    "observable",
    "method",
    "g",
    "shots",
    "seed",
    "value_re",
    "value_im",
    "stderr",
    "prob",
    "flag",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramRecord {
    pub line: usize,
    pub observable: String,
    pub method: String,
    pub g: Option<f64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub value_re: Option<f64>,
    pub value_im: Option<f64>,
    pub stderr: Option<f64>,
    pub prob: f64,
    pub flag: String,
}

impl From<&MeasureRecord> for ProgramRecord {
    fn from(r: &MeasureRecord) -> Self {
        ProgramRecord {
            line: r.line,
            observable: r.observable.tag().into(),
            method: r.method.tag().into(),
            g: r.g,
            shots: r.shots,
            seed: r.seed,
            value_re: r.value.map(|v| v.re),
            value_im: r.value.map(|v| v.im),
            stderr: r.stderr,
            prob: r.probability,
            flag: r.flag.tag().into(),
        }
    }
}

/// All measurement rows of a program, in statement order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub records: Vec<MeasureRecord>,
}

impl RunOutput {
    pub fn flagged(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.flag != RowFlag::Ok)
            .count()
    }

    pub fn diverged(&self) -> bool {
        self.records.iter().any(|r| r.flag == RowFlag::Diverged)
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.records.is_empty() {
            w.write_record(RECORD_COLUMNS)?;
        }
        for r in &self.records {
            w.serialize(ProgramRecord::from(r))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// JSON array, one record object per line.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .records
            .iter()
            .map(|r| serde_json::to_string(&ProgramRecord::from(r)).expect("plain record"))
            .collect();
        if rows.is_empty() {
            return "[]\n".to_string();
        }
        format!("[\n{}\n]\n", rows.join(",\n"))
    }
}

fn attribute(line: usize) -> impl Fn(Error) -> RunError {
    move |source| RunError { line, source }
}

/// The photon always passes BS1; a leading `bs1` statement only makes that
/// explicit.
fn preselected_state(program: &CircuitProgram) -> Result<StateVector, RunError> {
    let mut train = Preparation::new().then(beam_splitter());
    let mut pre_line = 0;
    for (k, s) in program.statements().iter().enumerate() {
        let line = program.line_of(k);
        match s {
            Statement::Tuner { theta } => train = train.then(polarization_tuner(theta.eval())),
            Statement::Phase { phi } => train = train.then(path_phase(phi.eval())),
            Statement::Preselect(_) => pre_line = line,
            _ => {}
        }
    }
    let raw = train.run(&input_state()).map_err(attribute(pre_line))?;
    match program.preselection() {
        Selection::Delayed => compensate_reflection(&raw).map_err(attribute(pre_line)),
        Selection::Original => Ok(raw),
    }
}

fn estimator_for(m: &MeasureSpec) -> Estimator {
    let g = m.g.as_ref().map_or(DEFAULT_COUPLING, |e| e.eval());
    match m.method {
        Method::Analytic => Estimator::Analytic,
        Method::MeterExact => Estimator::Meter { g },
        Method::MeterSampled => Estimator::Sampled {
            g,
            shots: m.shots.unwrap_or(DEFAULT_SHOTS),
            seed: m.seed.unwrap_or(0),
        },
    }
}

/// Prepare, postselect and evaluate every `measure` statement. A vanishing
/// pre/post overlap is reported as a `diverged` row, not an error.
pub fn compile_and_run(program: &CircuitProgram) -> Result<RunOutput, RunError> {
    let pre = preselected_state(program)?;
    let post = match program.postselection() {
        Selection::Delayed => postselector(),
        Selection::Original => original_postselector(),
    };
    let overlap = post.inner(&pre).map_err(attribute(0))?;
    let pole = overlap.norm() < POLE_THRESHOLD / 2.0;
    let mut records = Vec::new();
    for (k, s) in program.statements().iter().enumerate() {
        let Statement::Measure(m) = s else { continue };
        let line = program.line_of(k);
        let estimator = estimator_for(m);
        estimator.validate().map_err(attribute(line))?;
        let (g, shots, seed) = match estimator {
            Estimator::Analytic => (None, None, None),
            Estimator::Meter { g } => (Some(g), None, None),
            Estimator::Sampled { g, shots, seed } => (Some(g), Some(shots), Some(seed)),
        };
        let mut rec = MeasureRecord {
            line,
            observable: m.observable,
            method: m.method,
            g,
            shots,
            seed,
            value: None,
            stderr: None,
            probability: overlap.norm_sqr(),
            flag: RowFlag::Ok,
        };
        if pole {
            rec.flag = RowFlag::Diverged;
        } else {
            match estimator.estimate(m.observable, &pre, &post) {
                Ok(w) => {
                    rec.value = Some(w.value);
                    rec.stderr = w.stderr;
                }
                Err(Error::VanishingOverlap { .. } | Error::ZeroProbability { .. }) => {
                    rec.flag = RowFlag::Diverged;
                }
                Err(Error::NoPostselectedEvents) => rec.flag = RowFlag::NoEvents,
                Err(e) => return Err(attribute(line)(e)),
            }
        }
        records.push(rec);
    }
    Ok(RunOutput { records })
}
