//! OK / SUSPECT / KO classification of p-values and battery aggregation.
//!
//! Bands (default [`Precedence::OkOverSuspect`]):
//!
//! | label   | p                         |
//! |---------|---------------------------|
//! | KO      | p < 0.01 or p > 0.99      |
//! | SUSPECT | 0.01 <= p <= 0.1          |
//! | OK      | 0.1 < p <= 0.99           |
//!
//! The published table also lists 0.9 < p < 0.99 as SUSPECT while the OK row
//! covers the same range. The default resolves the overlap in favour of OK,
//! which is the reading that reproduces the reported pass rates of local
//! generators (uniform p-values land OK 89% of the time). The other reading
//! is available as [`Precedence::SuspectOverOk`]. Boundary points 0.01 and 0.1
//! belong to SUSPECT.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::battery::TestResult;
use crate::error::{Error, Result};
use crate::sources::SampleSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Label {
    Ok,
    Suspect,
    Ko,
    Skipped,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Ok => "OK",
            Label::Suspect => "SUSPECT",
            Label::Ko => "KO",
            Label::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub label: Label,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl Verdict {
    pub fn skipped() -> Self {
        Verdict {
            label: Label::Skipped,
            p: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precedence {
    /// 0.9 < p <= 0.99 is OK.
    #[default]
    OkOverSuspect,
    /// 0.9 <= p <= 0.99 is SUSPECT.
    SuspectOverOk,
}

pub const KO_LOW: f64 = 0.01;
pub const SUSPECT_HIGH: f64 = 0.1;
pub const UPPER_SUSPECT_LOW: f64 = 0.9;
pub const KO_HIGH: f64 = 0.99;

pub fn classify(p: f64) -> Result<Verdict> {
    classify_with(p, Precedence::default())
}

pub fn classify_with(p: f64, precedence: Precedence) -> Result<Verdict> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p-value {p} outside [0, 1]")));
    }
    let label = if !(KO_LOW..=KO_HIGH).contains(&p) {
        Label::Ko
    } else if p <= SUSPECT_HIGH {
        Label::Suspect
    } else if precedence == Precedence::SuspectOverOk && p >= UPPER_SUSPECT_LOW {
        Label::Suspect
    } else {
        Label::Ok
    };
    Ok(Verdict { label, p: Some(p) })
}

/// Table-2-style summary of one source's battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub source: SampleSource,
    pub results: Vec<TestResult>,
    pub ok: usize,
    pub suspect: usize,
    pub ko: usize,
    pub skipped: usize,
    pub ok_pct: f64,
    pub suspect_pct: f64,
    pub ko_pct: f64,
}

impl BatteryReport {
    pub fn classified(&self) -> usize {
        self.ok + self.suspect + self.ko
    }
}

/// Aggregates verdicts over every classified p-value; a two-p-value result
/// contributes two classifications and SKIPPED entries are counted apart.
pub fn aggregate(results: Vec<TestResult>, source: SampleSource) -> Result<BatteryReport> {
    if results.is_empty() {
        return Err(Error::Empty("battery results".into()));
    }
    let (mut ok, mut suspect, mut ko, mut skipped) = (0, 0, 0, 0);
    for v in results.iter().flat_map(|r| r.verdicts.iter()) {
        match v.label {
            Label::Ok => ok += 1,
            Label::Suspect => suspect += 1,
            Label::Ko => ko += 1,
            Label::Skipped => skipped += 1,
        }
    }
    let total = ok + suspect + ko;
    if total == 0 {
        return Err(Error::Empty(format!(
            "classified p-values for {} (all {skipped} tests skipped)",
            source.label
        )));
    }
    let pct = |k: usize| 100.0 * k as f64 / total as f64;
    Ok(BatteryReport {
        ok_pct: pct(ok),
        suspect_pct: pct(suspect),
        ko_pct: pct(ko),
        source,
        results,
        ok,
        suspect,
        ko,
        skipped,
    })
}

/// Aligned plain-text table: Generation Method | OK | SUSPECT | KO.
pub fn render_table(reports: &[BatteryReport]) -> String {
    let header = ["Generation Method", "OK", "SUSPECT", "KO"];
    let rows: Vec<[String; 4]> = reports
        .iter()
        .map(|r| {
            [
                r.source.display_label(),
                format!("{:.2}%", r.ok_pct),
                format!("{:.2}%", r.suspect_pct),
                format!("{:.2}%", r.ko_pct),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: [&str; 4]| {
        format!(
            "{:<w0$} | {:>w1$} | {:>w2$} | {:>w3$}\n",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        )
    };
    out.push_str(&line(header));
    out.push_str(&format!(
        "{}-+-{}-+-{}-+-{}\n",
        "-".repeat(widths[0]),
        "-".repeat(widths[1]),
        "-".repeat(widths[2]),
        "-".repeat(widths[3])
    ));
    for row in &rows {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
    }
    out
}
