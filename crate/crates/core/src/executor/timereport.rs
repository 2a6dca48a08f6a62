//! Timestamped phase log of a campaign (`time.csv`).

use chrono::{DateTime, SecondsFormat, Utc};
use thiserror::Error;

pub const START_TIME: &str = "START TIME";
pub const END_TIME: &str = "END TIME";
pub const BUILD: &str = "BUILD";

pub fn run_mutant(muid: i64) -> String {
    format!("RUN MUTANT {muid}")
}

pub fn build_mutant(muid: i64) -> String {
    format!("BUILD MUTANT {muid}")
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TimeReport {
    pub lines: Vec<(DateTime<Utc>, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed time report, line {line}: {message}")]
pub struct TimeReportError {
    pub line: usize,
    pub message: String,
}

impl TimeReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark(&mut self, label: impl Into<String>) {
        self.lines.push((Utc::now(), label.into()));
    }

    pub fn begin(&mut self, what: &str) {
        self.mark(format!("BEGIN {what}"));
    }

    pub fn end(&mut self, what: &str) {
        self.mark(format!("END {what}"));
    }

    pub fn extend(&mut self, other: TimeReport) {
        self.lines.extend(other.lines);
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().map(|(_, l)| l.as_str())
    }

    /// Number of BEGIN/END pairs whose subject satisfies `pred`.
    pub fn count_pairs(&self, pred: impl Fn(&str) -> bool) -> usize {
        self.labels()
            .filter_map(|l| l.strip_prefix("BEGIN "))
            .filter(|s| pred(s))
            .count()
    }

    /// Seconds between START TIME and END TIME.
    pub fn wall_seconds(&self) -> Option<f64> {
        let at = |label: &str| self.lines.iter().find(|(_, l)| l == label).map(|(t, _)| *t);
        let (start, end) = (at(START_TIME)?, at(END_TIME)?);
        Some((end - start).num_nanoseconds()? as f64 / 1e9)
    }

    /// Checks that BEGIN/END labels pair up and nest.
    pub fn check_nesting(&self) -> Result<(), TimeReportError> {
        let mut open: Vec<&str> = Vec::new();
        for (i, label) in self.labels().enumerate() {
            if let Some(s) = label.strip_prefix("BEGIN ") {
                open.push(s);
            } else if let Some(s) = label.strip_prefix("END ") {
                if label == END_TIME {
                    continue;
                }
                if open.pop() != Some(s) {
                    return Err(TimeReportError {
                        line: i + 1,
                        message: format!("`{label}` closes nothing"),
                    });
                }
            }
        }
        match open.last() {
            Some(s) => Err(TimeReportError {
                line: self.lines.len(),
                message: format!("`BEGIN {s}` never ends"),
            }),
            None => Ok(()),
        }
    }

    pub fn to_csv(&self) -> String {
        self.lines
            .iter()
            .map(|(t, l)| format!("{};{l}\n", t.to_rfc3339_opts(SecondsFormat::Nanos, true)))
            .collect()
    }

    pub fn from_csv(text: &str) -> Result<Self, TimeReportError> {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, line)| {
                let err = |message: &str| TimeReportError {
                    line: i + 1,
                    message: message.to_string(),
                };
                let (ts, label) = line.split_once(';').ok_or_else(|| err("missing `;`"))?;
                let t = DateTime::parse_from_rfc3339(ts).map_err(|_| err("bad timestamp"))?;
                Ok((t.with_timezone(&Utc), label.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { lines })
    }
}
