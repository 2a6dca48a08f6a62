//! Killing matrix, execution policies and the mutation score.

use std::fmt;

use thiserror::Error;

use crate::mutagen::MutantId;
use crate::runtime::Status;

use super::config::Policy;

/// One status per test; `None` marks a cell skipped under fastFail.
pub type Row = Vec<Option<Status>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KillingMatrix {
    pub tests: Vec<String>,
    /// Rows in ascending muid order; the original (-1) comes first.
    pub rows: Vec<(MutantId, Row)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed killing matrix, line {line}: {message}")]
pub struct MatrixParseError {
    pub line: usize,
    pub message: String,
}

impl KillingMatrix {
    pub fn new(tests: Vec<String>) -> Self {
        Self {
            tests,
            rows: Vec::new(),
        }
    }

    pub fn row(&self, muid: MutantId) -> Option<&Row> {
        self.rows.iter().find(|(m, _)| *m == muid).map(|(_, r)| r)
    }

    /// Rows of mutants, without the original.
    pub fn mutant_rows(&self) -> impl Iterator<Item = &(MutantId, Row)> {
        self.rows.iter().filter(|(m, _)| m.0 >= 0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mutant");
        for t in &self.tests {
            out.push(';');
            out.push_str(t);
        }
        out.push('\n');
        for (muid, row) in &self.rows {
            out.push_str(&muid.to_string());
            for cell in row {
                out.push(';');
                if let Some(s) = cell {
                    out.push_str(&s.code().to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, MatrixParseError> {
        let err = |line: usize, message: &str| MatrixParseError {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
        let mut cols = header.split(';');
        if cols.next() != Some("mutant") {
            return Err(err(1, "header must start with `mutant`"));
        }
        let tests: Vec<String> = cols.map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let mut cells = line.split(';');
            let muid = cells
                .next()
                .and_then(|m| m.parse::<i64>().ok())
                .ok_or_else(|| err(i + 1, "bad mutant id"))?;
            let row = cells
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<u8>()
                            .ok()
                            .and_then(Status::from_code)
                            .map(Some)
                            .ok_or_else(|| err(i + 1, "bad status"))
                    }
                })
                .collect::<Result<Row, _>>()?;
            if row.len() != tests.len() {
                return Err(err(i + 1, "wrong number of cells"));
            }
            rows.push((MutantId(muid), row));
        }
        Ok(Self { tests, rows })
    }
}

pub fn is_killed(row: &[Option<Status>]) -> bool {
    row.iter().flatten().any(|s| *s != Status::Pass)
}

/// Truncates a full row per `policy`: fastFail keeps the cells up to and
/// including the first nonzero status and blanks the rest.
pub fn apply_policy(row: &[Option<Status>], policy: Policy) -> Row {
    match policy {
        Policy::FullFail => row.to_vec(),
        Policy::FastFail => {
            let mut out = Vec::with_capacity(row.len());
            let mut killed = false;
            for cell in row {
                out.push(if killed { None } else { *cell });
                killed |= cell.is_some_and(|s| s != Status::Pass);
            }
            out
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Score {
    pub generated: usize,
    pub alive: usize,
    pub dead: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no mutants were generated; the score is undefined")]
pub struct EmptyCampaign;

impl Score {
    pub fn from_counts(generated: usize, dead: usize) -> Result<Self, EmptyCampaign> {
        if generated == 0 {
            return Err(EmptyCampaign);
        }
        Ok(Self {
            generated,
            alive: generated - dead,
            dead,
        })
    }

    /// `100 * dead / generated`, rounded to one decimal.
    pub fn percent(&self) -> f64 {
        (1000.0 * self.dead as f64 / self.generated as f64).round() / 10.0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} = {:.1}%",
            self.dead,
            self.generated,
            self.percent()
        )
    }
}

pub fn compute_score(matrix: &KillingMatrix) -> Result<Score, EmptyCampaign> {
    let generated = matrix.mutant_rows().count();
    let dead = matrix.mutant_rows().filter(|(_, r)| is_killed(r)).count();
    Score::from_counts(generated, dead)
}
