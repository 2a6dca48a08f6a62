//! Deterministic interpreter for Mini-App programs and their tests.
//!
//! Every test runs in a fresh [`Session`]: widgets, intents, the event log
//! and the step counter start empty, and the active mutant id is read from
//! the environment once when the session starts. Time is measured in steps,
//! so a run is a pure function of (program, test, muid, budget).

mod builtins;
mod program;
mod session;
mod value;


use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use builtins::{builtin_arity, is_method_style, BUILTINS};
pub use program::{LoadError, Program};
pub use session::{Intent, Session, Widget, MAX_CALL_DEPTH};
pub use value::Value;

/// Environment variable carrying the active mutant id.
pub const MUID_VAR: &str = "METFORD_MUID";
/// Mutant id of the unmutated program.
pub const ORIGINAL_MUID: i64 = -1;
/// Session-wide constant holding the active mutant id; dispatch statements
/// select on it.
pub const MUID_CONSTANT: &str = "MUID_STATIC";

/// The variables visible to a test execution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    vars: BTreeMap<String, String>,
}

impl Environment {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Snapshot of the process environment.
    pub fn from_process() -> Self {
        Self {
            vars: std::env::vars().collect(),
        }
    }

    /// Empty environment with only the mutant id set; `-1` leaves it unset.
    pub fn with_muid(muid: i64) -> Self {
        let mut env = Self::empty();
        if muid != ORIGINAL_MUID {
            env.set(MUID_VAR, muid.to_string());
        }
        env
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.vars.insert(key.into(), value.into());
    }

    pub fn remove(&mut self, key: &str) {
        self.vars.remove(key);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.vars.get(key).map(String::as_str)
    }
}

/// Reads the active mutant id; absent or unparseable values mean the
/// original program.
pub fn fetch_muid(env: &Environment) -> i64 {
    env.get(MUID_VAR)
        .and_then(|v| v.trim().parse::<i64>().ok())
        .unwrap_or(ORIGINAL_MUID)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Pass,
    AssertionFailure,
    RuntimeError,
    Timeout,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::AssertionFailure => 1,
            Status::RuntimeError => 2,
            Status::Timeout => 124,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Status::Pass,
            1 => Status::AssertionFailure,
            2 => Status::RuntimeError,
            124 => Status::Timeout,
            _ => return None,
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestOutcome {
    pub status: Status,
    /// Empty exactly when the test passed.
    pub message: String,
    pub steps_used: u64,
}

/// Outcome plus the session's event log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestRun {
    pub outcome: TestOutcome,
    pub events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("no test named `{0}`")]
    UnknownTest(String),
    #[error("step budget must be positive")]
    ZeroBudget,
}

/// Runs one test in a fresh session.
pub fn run_test(
    program: &Program,
    test: &str,
    env: &Environment,
    step_budget: u64,
) -> Result<TestRun, RunError> {
    if step_budget == 0 {
        return Err(RunError::ZeroBudget);
    }
    let func = program
        .function(test)
        .filter(|f| f.params.is_empty())
        .ok_or_else(|| RunError::UnknownTest(test.to_string()))?;
    Ok(Session::new(program, env, step_budget).into_run(func))
}

/// Runs one test with the mutant id given directly.
pub fn run_test_at(
    program: &Program,
    test: &str,
    muid: i64,
    step_budget: u64,
) -> Result<TestRun, RunError> {
    run_test(program, test, &Environment::with_muid(muid), step_budget)
}
