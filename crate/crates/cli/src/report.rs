//! Versioned JSON report envelope and the report bodies of each command.

use std::fmt::Write as _;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use relmon_core::affine::{AffineElement, Presentation};
use relmon_core::periods::SingularPoint;
use relmon_core::search::ClassificationReport;

pub const SCHEMA: &str = "relmon-report";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema: String,
    pub version: u32,
    pub command: String,
    pub run: String,
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, run: &str, body: T) -> Self {
        Report {
            schema: SCHEMA.into(),
            version: SCHEMA_VERSION,
            command: command.into(),
            run: run.into(),
            body,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Parses a report and checks its schema and version.
pub fn parse_report<T: serde::de::DeserializeOwned>(text: &str, command: &str) -> anyhow::Result<Report<T>> {
    let r: Report<T> = serde_json::from_str(text)?;
    if r.schema != SCHEMA || r.version != SCHEMA_VERSION {
        anyhow::bail!("unsupported report {} v{} (expected {SCHEMA} v{SCHEMA_VERSION})", r.schema, r.version);
    }
    if r.command != command {
        anyhow::bail!("expected a `{command}` report, found `{}`", r.command);
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodRow {
    pub lambda: C,
    pub factor: usize,
    /// Legendre parameter of the factor at `lambda`.
    pub parameter: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1: Option<C>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega2: Option<C>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<C>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodsBody {
    pub rows: Vec<PeriodRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopRecord {
    pub name: String,
    /// The loop as a word in the basic circuits, for automatic loops.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    pub vertices: Vec<C>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<AffineElement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames_sampled: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyBody {
    pub k: usize,
    pub base_point: Option<C>,
    pub singular_points: Vec<SingularPoint>,
    pub loops: Vec<LoopRecord>,
    pub presentation: Presentation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyBody {
    pub presentation: Presentation,
    /// Loops whose extraction failed and were left out (with `--keep-going`).
    pub dropped_loops: Vec<String>,
    pub report: ClassificationReport,
}

fn fmt_c(z: C) -> String {
    format!("{:.12}{:+.12}i", z.re, z.im)
}

pub fn periods_text(run: &str, body: &PeriodsBody) -> String {
    let mut s = format!("periods for {run}\n");
    let _ = writeln!(s, "{:<26} {:>6} {:<34} {:<34} tau", "lambda", "factor", "omega1", "omega2");
    for r in &body.rows {
        let lam = format!("{:.6}{:+.6}i", r.lambda.re, r.lambda.im);
        match (&r.error, r.omega1, r.omega2, r.tau) {
            (None, Some(a), Some(b), Some(t)) => {
                let _ = writeln!(s, "{lam:<26} {:>6} {:<34} {:<34} {}", r.factor, fmt_c(a), fmt_c(b), fmt_c(t));
            }
            (err, ..) => {
                let _ = writeln!(s, "{lam:<26} {:>6} error: {}", r.factor, err.as_deref().unwrap_or("no value"));
            }
        }
    }
    s
}

pub fn monodromy_text(run: &str, body: &MonodromyBody) -> String {
    let mut s = format!("monodromy for {run}: {} generators, k = {}\n", body.presentation.len(), body.k);
    if body.loops.is_empty() {
        for g in body.presentation.generators() {
            let _ = writeln!(s, "{:<8} {}  [{}]", g.name, g.element, g.provenance);
        }
        return s;
    }
    for l in &body.loops {
        match (&l.element, &l.error) {
            (Some(e), _) => {
                let _ = writeln!(
                    s,
                    "{:<8} {}  residual {:.1e}  {}",
                    l.name,
                    e,
                    l.residual.unwrap_or(f64::NAN),
                    l.word.as_deref().unwrap_or("")
                );
            }
            (None, err) => {
                let _ = writeln!(s, "{:<8} error: {}", l.name, err.as_deref().unwrap_or("unknown"));
            }
        }
    }
    s
}

pub fn classify_text(run: &str, body: &ClassifyBody) -> String {
    let mut s = format!("classification for {run}\n");
    if !body.dropped_loops.is_empty() {
        let _ = writeln!(s, "dropped loops: {}", body.dropped_loops.join(", "));
    }
    s.push_str(&body.report.to_text());
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}
