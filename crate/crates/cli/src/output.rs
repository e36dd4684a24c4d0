use std::fmt::Write as _;

use cheshire_core::scenarios::{check_row, SweepTable};
use cheshire_core::Observable;

use crate::SchemaKind;

pub const ROWS_SCHEMA: &str = include_str!("../schema/rows.schema.json");
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");
pub const PROGRAM_SCHEMA: &str = include_str!("../schema/program.schema.json");

pub fn schema(kind: SchemaKind) -> &'static str {
    match kind {
        SchemaKind::Rows => ROWS_SCHEMA,
        SchemaKind::Report => REPORT_SCHEMA,
        SchemaKind::Program => PROGRAM_SCHEMA,
    }
}

/// Whitespace-separated blocks for `splot ... with pm3d`: one block per theta,
/// separated by a blank line. Flagged weak values are written as `NaN`.
pub fn gnuplot(table: &SweepTable) -> String {
    let mut out = String::from("# theta phi");
    for o in Observable::COMPONENTS {
        write!(out, " {o}_re {o}_im").unwrap();
    }
    out.push_str(" prob flag\n");
    let mut last_theta = None;
    for row in &table.rows {
        if last_theta.is_some_and(|t| t != row.theta) {
            out.push('\n');
        }
        last_theta = Some(row.theta);
        write!(out, "{} {}", row.theta, row.phi).unwrap();
        for o in Observable::COMPONENTS {
            match row.value(o) {
                Some(v) => write!(out, " {} {}", v.re, v.im).unwrap(),
                None => out.push_str(" NaN NaN"),
            }
        }
        writeln!(out, " {} {}", row.probability, row.flag.tag()).unwrap();
    }
    out
}

/// Row count, flagged count and the largest deviation of an unflagged row
/// from the closed-form weak values.
pub fn summary(table: &SweepTable) -> String {
    let gap = table
        .rows
        .iter()
        .filter_map(check_row)
        .map(|c| c.closed_form_gap)
        .fold(0.0f64, f64::max);
    format!(
        "rows={} flagged={} max_closed_form_gap={gap:e}",
        table.len(),
        table.flagged()
    )
}
