use std::io;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{RowFlag, ScenarioReport, SweepRow};
use crate::observables::Observable;

/// Column order of the CSV (and key order of the JSON) row encoding.
pub const CSV_COLUMNS: [&str; 17] = [
    "theta", "phi", "xL_re", "xL_im", "xR_re", "xR_im", "zL_re", "zL_im", "zR_re", "zR_im", "prob",
    "flag", "method", "xL_se", "xR_se", "zL_se", "zR_se",
];

/// Flat serialized form of a [`SweepRow`]. Weak values of flagged rows are
/// null (empty CSV cells); standard errors are present for sampled rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct RowRecord {
    pub theta: f64,
    pub phi: f64,
    pub xL_re: Option<f64>,
    pub xL_im: Option<f64>,
    pub xR_re: Option<f64>,
    pub xR_im: Option<f64>,
    pub zL_re: Option<f64>,
    pub zL_im: Option<f64>,
    pub zR_re: Option<f64>,
    pub zR_im: Option<f64>,
    pub prob: f64,
    pub flag: String,
    pub method: String,
    pub xL_se: Option<f64>,
    pub xR_se: Option<f64>,
    pub zL_se: Option<f64>,
    pub zR_se: Option<f64>,
}

impl From<&SweepRow> for RowRecord {
    fn from(row: &SweepRow) -> Self {
        let v = |o| row.value(o);
        let re = |o| v(o).map(|z| z.re);
        let im = |o| v(o).map(|z| z.im);
        let se = |o| row.stderr_of(o);
        use Observable::*;
        RowRecord {
            theta: row.theta,
            phi: row.phi,
            xL_re: re(XL),
            xL_im: im(XL),
            xR_re: re(XR),
            xR_im: im(XR),
            zL_re: re(ZL),
            zL_im: im(ZL),
            zR_re: re(ZR),
            zR_im: im(ZR),
            prob: row.probability,
            flag: row.flag.tag().to_string(),
            method: row.method.tag().to_string(),
            xL_se: se(XL),
            xR_se: se(XR),
            zL_se: se(ZL),
            zR_se: se(ZR),
        }
    }
}

/// Grid-complete table of delayed-choice rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new(rows: Vec<SweepRow>) -> Self {
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.flag != RowFlag::Ok).count()
    }

    pub fn records(&self) -> impl Iterator<Item = RowRecord> + '_ {
        self.rows.iter().map(RowRecord::from)
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(CSV_COLUMNS)?;
        }
        for rec in self.records() {
            w.serialize(rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// JSON array, one row object per line.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .records()
            .map(|r| serde_json::to_string(&r).expect("plain record"))
            .collect();
        if rows.is_empty() {
            return "[]\n".to_string();
        }
        format!("[\n{}\n]\n", rows.join(",\n"))
    }
}

impl ScenarioReport {
    /// Flat object: scenario, method, prob, then `<tag>_re`, `<tag>_im`
    /// (and `<tag>_se` for sampled values) per observable.
    pub fn to_json_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("scenario".into(), self.scenario.tag().into());
        m.insert("method".into(), self.method.tag().into());
        m.insert("prob".into(), self.probability.into());
        for e in &self.entries {
            let tag = e.observable.tag();
            m.insert(format!("{tag}_re"), e.value.re.into());
            m.insert(format!("{tag}_im"), e.value.im.into());
            if let Some(se) = e.stderr {
                m.insert(format!("{tag}_se"), se.into());
            }
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        format!("{}\n", self.to_json_value())
    }

    pub fn to_csv(&self) -> String {
        let Value::Object(m) = self.to_json_value() else {
            unreachable!()
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(m.keys()).expect("memory");
        w.write_record(m.values().map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }))
        .expect("memory");
        String::from_utf8(w.into_inner().expect("memory")).expect("utf-8")
    }
}
