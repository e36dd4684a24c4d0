//! Line-oriented description of an interferometer run (`.mzi` files).
//!
//! ```text
//! # delayed-choice setting that sends the snarl to the right arm
//! bs1
//! tuner theta=pi
//! phase phi=0
//! preselect delayed
//! postselect delayed
//! measure zR method=analytic
//! measure xL method=sample g=1e-2 shots=100000 seed=7
//! ```
//!
//! One statement per line, `#` starts a comment, blank lines are ignored and
//! both LF and CRLF line endings are accepted. Angles are radians; `pi` is the
//! only named constant.
//!
//! `preselect delayed` prepares the photon through BS1 and the declared
//! elements with `phi` taken as the net relative phase of the right arm (the
//! reflection phase is compensated). `preselect original` runs the same train
//! without compensation, which with no elements is the original Cheshire Cat
//! preselection. `postselect delayed|original` picks the matching rank-1
//! postselection target.

mod expr;
mod run;

pub use expr::{parse_angle, parse_expr, BinOp, Expr, ExprError};
pub use run::{
    compile_and_run, MeasureRecord, ProgramRecord, RunError, RunOutput, DEFAULT_SHOTS,
    RECORD_COLUMNS,
};

use std::fmt;

use thiserror::Error;

use crate::observables::Observable;
use crate::weak::Method;
use expr::ExprParser;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Delayed,
    Original,
}

impl Selection {
    fn keyword(self) -> &'static str {
        match self {
            Selection::Delayed => "delayed",
            Selection::Original => "original",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub observable: Observable,
    pub method: Method,
    pub g: Option<Expr>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    BeamSplitter,
    Tuner { theta: Expr },
    Phase { phi: Expr },
    Preselect(Selection),
    Postselect(Selection),
    Measure(MeasureSpec),
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::BeamSplitter => f.write_str("bs1"),
            Statement::Tuner { theta } => write!(f, "tuner theta={theta}"),
            Statement::Phase { phi } => write!(f, "phase phi={phi}"),
            Statement::Preselect(s) => write!(f, "preselect {}", s.keyword()),
            Statement::Postselect(s) => write!(f, "postselect {}", s.keyword()),
            Statement::Measure(m) => {
                write!(f, "measure {} method={}", m.observable, m.method.tag())?;
                if let Some(g) = &m.g {
                    write!(f, " g={g}")?;
                }
                if let Some(n) = m.shots {
                    write!(f, " shots={n}")?;
                }
                if let Some(s) = m.seed {
                    write!(f, " seed={s}")?;
                }
                Ok(())
            }
        }
    }
}

/// A parsed program. Source line numbers are kept for error attribution
/// only; two programs are equal when their statements are.
#[derive(Debug, Clone)]
pub struct CircuitProgram {
    statements: Vec<Statement>,
    lines: Vec<usize>,
}

impl PartialEq for CircuitProgram {
    fn eq(&self, other: &Self) -> bool {
        self.statements == other.statements
    }
}

impl CircuitProgram {
    /// Build from statements, numbering them as consecutive lines, and check
    /// the same structural rules as [`parse`].
    pub fn from_statements(statements: Vec<Statement>) -> Result<Self, ParseError> {
        let lines = (1..=statements.len()).collect();
        let program = Self { statements, lines };
        program.check_structure()?;
        Ok(program)
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    /// Source line of statement `index`.
    pub fn line_of(&self, index: usize) -> usize {
        self.lines[index]
    }

    pub fn preselection(&self) -> Selection {
        self.statements
            .iter()
            .find_map(|s| match s {
                Statement::Preselect(k) => Some(*k),
                _ => None,
            })
            .expect("validated program has a preselection")
    }

    pub fn postselection(&self) -> Selection {
        self.statements
            .iter()
            .find_map(|s| match s {
                Statement::Postselect(k) => Some(*k),
                _ => None,
            })
            .expect("validated program has a postselection")
    }

    /// One statement per line, no comments.
    pub fn pretty_print(&self) -> String {
        self.statements.iter().map(|s| format!("{s}\n")).collect()
    }

    fn check_structure(&self) -> Result<(), ParseError> {
        let mut pre: Option<usize> = None;
        let mut post: Option<usize> = None;
        let mut elements = 0usize;
        for (s, &line) in self.statements.iter().zip(&self.lines) {
            match s {
                Statement::Preselect(_) => {
                    if let Some(first) = pre {
                        return Err(ParseError::DuplicatePreselect { line, first });
                    }
                    pre = Some(line);
                }
                Statement::Postselect(_) => {
                    if let Some(first) = post {
                        return Err(ParseError::DuplicatePostselect { line, first });
                    }
                    post = Some(line);
                }
                Statement::BeamSplitter if elements > 0 => {
                    return Err(ParseError::Invalid {
                        line,
                        column: 1,
                        message: "bs1 may appear once, before any tuner or phase".into(),
                    });
                }
                Statement::BeamSplitter | Statement::Tuner { .. } | Statement::Phase { .. } => {
                    elements += 1;
                }
                Statement::Measure(m) => check_measure(m, line)?,
            }
        }
        if pre.is_none() {
            return Err(ParseError::MissingPreselect);
        }
        if post.is_none() {
            return Err(ParseError::MissingPostselect);
        }
        Ok(())
    }
}

fn check_measure(m: &MeasureSpec, line: usize) -> Result<(), ParseError> {
    let invalid = |message: String| ParseError::Invalid {
        line,
        column: 1,
        message,
    };
    if m.method == Method::Analytic && m.g.is_some() {
        return Err(invalid(
            "g only applies to method=meter or method=sample".into(),
        ));
    }
    if m.method != Method::MeterSampled && (m.shots.is_some() || m.seed.is_some()) {
        return Err(invalid("shots and seed only apply to method=sample".into()));
    }
    if let Some(g) = &m.g {
        let v = g.eval();
        if !(v > 0.0 && v <= crate::weak::MAX_COUPLING) {
            return Err(invalid(format!("g = {v} outside (0, 0.1]")));
        }
    }
    if m.shots == Some(0) {
        return Err(invalid("shots must be at least 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}: second preselect (first on line {first})")]
    DuplicatePreselect { line: usize, first: usize },
    #[error("line {line}: second postselect (first on line {first})")]
    DuplicatePostselect { line: usize, first: usize },
    #[error("program has no preselect statement")]
    MissingPreselect,
    #[error("program has no postselect statement")]
    MissingPostselect,
    #[error("line {line}, column {column}: unknown observable `{name}` (expected piL, piR, xL, xR, zL or zR)")]
    UnknownObservable {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("line {line}, column {column}: {message}")]
    Invalid {
        line: usize,
        column: usize,
        message: String,
    },
}

impl ParseError {
    /// Offending source line, when the error has one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::DuplicatePreselect { line, .. }
            | ParseError::DuplicatePostselect { line, .. }
            | ParseError::UnknownObservable { line, .. }
            | ParseError::Invalid { line, .. } => Some(*line),
            ParseError::MissingPreselect | ParseError::MissingPostselect => None,
        }
    }

    /// `(line, column)`, 1-based; whole-line errors point at column 1.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UnknownObservable { line, column, .. }
            | ParseError::Invalid { line, column, .. } => Some((*line, *column)),
            other => other.line().map(|l| (l, 1)),
        }
    }

    /// The message without its position prefix.
    pub fn detail(&self) -> String {
        match self {
            ParseError::Syntax {
                expected, found, ..
            } => format!("expected {expected}, found {found}"),
            ParseError::DuplicatePreselect { first, .. } => {
                format!("second preselect (first on line {first})")
            }
            ParseError::DuplicatePostselect { first, .. } => {
                format!("second postselect (first on line {first})")
            }
            ParseError::UnknownObservable { name, .. } => {
                format!("unknown observable `{name}` (expected piL, piR, xL, xR, zL or zR)")
            }
            ParseError::Invalid { message, .. } => message.clone(),
            other => other.to_string(),
        }
    }
}

struct LineParser<'a> {
    chars: &'a [char],
    pos: usize,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of line".into(),
            Some(_) => {
                let word: String = self.chars[self.pos..]
                    .iter()
                    .take_while(|c| !c.is_whitespace())
                    .collect();
                format!("`{word}`")
            }
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.pos + 1,
            expected: expected.into(),
            found: self.found(),
        }
    }

    fn word(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        (self.pos > start).then(|| (start, self.chars[start..self.pos].iter().collect()))
    }

    fn keyword(&mut self, options: &[&str], expected: &str) -> Result<String, ParseError> {
        let mark = self.pos;
        self.skip_ws();
        let at = self.pos;
        match self.word() {
            Some((_, w)) if options.contains(&w.as_str()) => Ok(w),
            _ => {
                self.pos = at.max(mark);
                Err(self.syntax(expected))
            }
        }
    }

    fn equals(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some('=') {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax("`=`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut p = ExprParser::new(self.chars, self.pos);
        let e = p.expr().map_err(|e| ParseError::Syntax {
            line: self.line,
            column: e.offset + 1,
            expected: e.expected.into(),
            found: {
                self.pos = e.offset;
                self.found()
            },
        })?;
        self.pos = p.pos;
        if !e.eval().is_finite() {
            return Err(ParseError::Invalid {
                line: self.line,
                column: start + 1,
                message: "expression does not evaluate to a finite number".into(),
            });
        }
        Ok(e)
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| {
            self.pos = start;
            self.syntax("an unsigned integer")
        })
    }

    /// `name=<expr>` with a fixed parameter name.
    fn param(&mut self, name: &str) -> Result<Expr, ParseError> {
        self.keyword(&[name], &format!("`{name}=`"))?;
        self.equals()?;
        self.expr()
    }

    fn selection(&mut self) -> Result<Selection, ParseError> {
        match self
            .keyword(&["delayed", "original"], "`delayed` or `original`")?
            .as_str()
        {
            "delayed" => Ok(Selection::Delayed),
            _ => Ok(Selection::Original),
        }
    }

    fn measure(&mut self) -> Result<MeasureSpec, ParseError> {
        self.skip_ws();
        let (col, name) = self.word().ok_or_else(|| self.syntax("an observable"))?;
        let observable = name.parse().map_err(|_| ParseError::UnknownObservable {
            line: self.line,
            column: col + 1,
            name,
        })?;
        let mut method = None;
        let mut spec = MeasureSpec {
            observable,
            method: Method::Analytic,
            g: None,
            shots: None,
            seed: None,
        };
        loop {
            self.skip_ws();
            if self.at_end() {
                break;
            }
            let at = self.pos;
            let key = self.keyword(
                &["method", "g", "shots", "seed"],
                "`method=`, `g=`, `shots=` or `seed=`",
            )?;
            let duplicate = match key.as_str() {
                "method" => method.is_some(),
                "g" => spec.g.is_some(),
                "shots" => spec.shots.is_some(),
                _ => spec.seed.is_some(),
            };
            if duplicate {
                return Err(ParseError::Invalid {
                    line: self.line,
                    column: at + 1,
                    message: format!("`{key}` given twice"),
                });
            }
            self.equals()?;
            match key.as_str() {
                "method" => {
                    let m = self.keyword(
                        &["analytic", "meter", "sample"],
                        "`analytic`, `meter` or `sample`",
                    )?;
                    method = Some(match m.as_str() {
                        "analytic" => Method::Analytic,
                        "meter" => Method::MeterExact,
                        _ => Method::MeterSampled,
                    });
                }
                "g" => spec.g = Some(self.expr()?),
                "shots" => spec.shots = Some(self.integer()?),
                _ => spec.seed = Some(self.integer()?),
            }
        }
        spec.method = method.ok_or_else(|| self.syntax("`method=`"))?;
        Ok(spec)
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let kw = self.keyword(
            &[
                "bs1",
                "tuner",
                "phase",
                "preselect",
                "postselect",
                "measure",
            ],
            "a statement (bs1, tuner, phase, preselect, postselect, measure)",
        )?;
        let st = match kw.as_str() {
            "bs1" => Statement::BeamSplitter,
            "tuner" => Statement::Tuner {
                theta: self.param("theta")?,
            },
            "phase" => Statement::Phase {
                phi: self.param("phi")?,
            },
            "preselect" => Statement::Preselect(self.selection()?),
            "postselect" => Statement::Postselect(self.selection()?),
            _ => Statement::Measure(self.measure()?),
        };
        self.skip_ws();
        if !self.at_end() {
            return Err(self.syntax("end of statement"));
        }
        Ok(st)
    }
}

/// Parse `.mzi` source text. Stops at the first offending line.
pub fn parse(source: &str) -> Result<CircuitProgram, ParseError> {
    let mut statements = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in source.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = text.trim_end().chars().collect();
        let mut p = LineParser {
            chars: &chars,
            pos: 0,
            line: i + 1,
        };
        p.skip_ws();
        if p.at_end() {
            continue;
        }
        statements.push(p.statement()?);
        lines.push(i + 1);
    }
    let program = CircuitProgram { statements, lines };
    program.check_structure()?;
    Ok(program)
}
