//! Campaign orchestration: generation, the two execution algorithms, and
//! their outputs.
//!
//! Output layout under the configured `outputDir`:
//!
//! ```text
//! MutationInfo.json            records, shared by both strategies
//! generation.json              generator wall times
//! effective-config.json        the resolved configuration
//! schemata/                    woven project (+ its MutationInfo.json copy)
//! traditional/<muid>/          one project tree per mutant, -1 = original
//! results/<strategy>/<policy>/ killing-matrix.csv, time.csv,
//!                              <muid>/<test>.out, <muid>/<test>.time
//! ```

pub mod config;
mod matrix;
mod timereport;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{Project, ProjectError};
use crate::mutagen::{parse_mutation_info, MutagenError, MutantId, MutationInfo, MutationRecord};
use crate::operators::OperatorKind;
use crate::runtime::{run_test_at, LoadError, Program, Status, TestRun, ORIGINAL_MUID};
use crate::strategies::{
    reset_dir, run_generator, GenerateError, StrategyKind, MUTATION_INFO_FILE,
};

pub use config::{CampaignConfig, ConfigError, Policy, StrategyChoice, DEFAULT_STEP_BUDGET};
pub use matrix::{
    apply_policy, compute_score, is_killed, EmptyCampaign, KillingMatrix, MatrixParseError, Row,
    Score,
};
pub use timereport::{
    build_mutant, run_mutant, TimeReport, TimeReportError, BUILD, END_TIME, START_TIME,
};

pub const GENERATION_FILE: &str = "generation.json";
pub const EFFECTIVE_CONFIG_FILE: &str = "effective-config.json";
pub const RESULTS_DIR: &str = "results";
pub const MATRIX_FILE: &str = "killing-matrix.csv";
pub const TIME_FILE: &str = "time.csv";

#[derive(Debug, Error)]
pub enum ExecutorError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("{}: {source}", path.display())]
    Load {
        path: PathBuf,
        #[source]
        source: LoadError,
    },
    #[error("the original program fails its own tests ({strategy}): {}", failures.join("; "))]
    OriginalSuiteRed {
        strategy: &'static str,
        failures: Vec<String>,
    },
    #[error("missing artifact {}; run `generate`/`run` first", .0.display())]
    MissingArtifact(PathBuf),
    #[error("corrupt artifact {}: {message}", path.display())]
    Corrupt { path: PathBuf, message: String },
    #[error("generators disagree on MutationInfo.json")]
    ParityMismatch,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ExecutorError {
    pub fn is_point_overflow(&self) -> bool {
        matches!(
            self,
            ExecutorError::Generate(GenerateError::Mutagen(MutagenError::PointOverflow(_)))
        )
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ExecutorError + '_ {
    move |source| ExecutorError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn read_artifact(path: &Path) -> Result<String, ExecutorError> {
    if !path.exists() {
        return Err(ExecutorError::MissingArtifact(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(io(path))
}

fn write(path: &Path, text: &str) -> Result<(), ExecutorError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io(parent))?;
    }
    fs::write(path, text).map_err(io(path))
}

/// Generator wall times, per strategy, in seconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerationTimes {
    pub schemata_seconds: Option<f64>,
    pub traditional_seconds: Option<f64>,
    /// Generation settings each strategy's output was produced with.
    #[serde(default)]
    pub schemata_settings: Option<String>,
    #[serde(default)]
    pub traditional_settings: Option<String>,
}

impl GenerationTimes {
    pub fn read(out_dir: &Path) -> Result<Self, ExecutorError> {
        let path = out_dir.join(GENERATION_FILE);
        let text = read_artifact(&path)?;
        serde_json::from_str(&text).map_err(|e| ExecutorError::Corrupt {
            path,
            message: e.to_string(),
        })
    }

    pub fn get(&self, strategy: StrategyKind) -> Option<f64> {
        match strategy {
            StrategyKind::Schemata => self.schemata_seconds,
            StrategyKind::Traditional => self.traditional_seconds,
        }
    }

    fn settings(&self, strategy: StrategyKind) -> Option<&str> {
        match strategy {
            StrategyKind::Schemata => self.schemata_settings.as_deref(),
            StrategyKind::Traditional => self.traditional_settings.as_deref(),
        }
    }
}

/// The configuration fields that determine generated output.
fn generation_settings(config: &CampaignConfig) -> String {
    serde_json::json!({
        "projectDir": config.project_dir,
        "operatorNameList": config.operator_name_list,
        "seed": config.seed,
        "stride": config.stride,
        "delaySteps": config.delay_steps,
        "excludeList": config.exclude_list,
    })
    .to_string()
}

/// Whether `strategy`'s generated output is missing or was produced with
/// different generation settings.
pub fn needs_generation(config: &CampaignConfig, strategy: StrategyKind) -> bool {
    let out = &config.output_dir;
    if !strategy.dir(out).join(MUTATION_INFO_FILE).exists() {
        return true;
    }
    GenerationTimes::read(out)
        .map(|t| t.settings(strategy) != Some(generation_settings(config).as_str()))
        .unwrap_or(true)
}

#[derive(Debug, Clone)]
pub struct GenerationSummary {
    pub records: Vec<MutationRecord>,
    pub times: GenerationTimes,
    pub operators: Vec<OperatorKind>,
}

impl GenerationSummary {
    /// Mutant count per configured operator, in configuration order.
    pub fn counts(&self) -> Vec<(OperatorKind, usize)> {
        self.operators
            .iter()
            .map(|&k| (k, self.records.iter().filter(|r| r.operator == k).count()))
            .collect()
    }

    pub fn counts_table(&self) -> String {
        let mut out = String::from("operator  mutants\n");
        for (k, n) in self.counts() {
            out.push_str(&format!("{:<9} {n:>7}\n", k.acronym()));
        }
        out.push_str(&format!("{:<9} {:>7}\n", "total", self.records.len()));
        out
    }
}

pub fn load_project(dir: &Path) -> Result<Project, ExecutorError> {
    if !dir.is_dir() {
        return Err(ExecutorError::MissingArtifact(dir.to_path_buf()));
    }
    Ok(Project::load_dir(dir).map_err(GenerateError::from)?)
}

/// Runs the requested generators and writes their outputs.
pub fn generate(
    config: &CampaignConfig,
    strategies: &[StrategyKind],
) -> Result<GenerationSummary, ExecutorError> {
    let options = config.generation_options()?;
    if !config.project_dir.is_dir() {
        return Err(ConfigError::Invalid(format!(
            "projectDir {} is not a directory",
            config.project_dir.display()
        ))
        .into());
    }
    let project = load_project(&config.project_dir)?;
    let out = &config.output_dir;
    fs::create_dir_all(out).map_err(io(out))?;
    write(&out.join(EFFECTIVE_CONFIG_FILE), &config.echo())?;
    let mut times = GenerationTimes::read(out).unwrap_or_default();
    let mut result: Option<(String, Vec<MutationRecord>)> = None;
    for &strategy in strategies {
        let output = run_generator(strategy, &project, &options, out)?;
        log::info!(
            "{} generation: {} mutants in {:.3}s",
            strategy.name(),
            output.records.len(),
            output.seconds
        );
        let settings = Some(generation_settings(config));
        match strategy {
            StrategyKind::Schemata => {
                times.schemata_seconds = Some(output.seconds);
                times.schemata_settings = settings;
            }
            StrategyKind::Traditional => {
                times.traditional_seconds = Some(output.seconds);
                times.traditional_settings = settings;
            }
        }
        match &result {
            Some((info, _)) if *info != output.mutation_info => {
                return Err(ExecutorError::ParityMismatch)
            }
            Some(_) => {}
            None => result = Some((output.mutation_info, output.records)),
        }
    }
    let (info, records) = result.unwrap_or_default();
    if !strategies.is_empty() {
        write(&out.join(MUTATION_INFO_FILE), &info)?;
    }
    let mut times_json = serde_json::to_string_pretty(&times).expect("plain data serializes");
    times_json.push('\n');
    write(&out.join(GENERATION_FILE), &times_json)?;
    Ok(GenerationSummary {
        records,
        times,
        operators: options.operators,
    })
}

pub fn read_mutation_info(path: &Path) -> Result<Vec<MutationInfo>, ExecutorError> {
    let text = read_artifact(path)?;
    parse_mutation_info(&text).map_err(|e| ExecutorError::Corrupt {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn results_dir(out_dir: &Path, strategy: StrategyKind, policy: Policy) -> PathBuf {
    out_dir
        .join(RESULTS_DIR)
        .join(strategy.name())
        .join(policy.name())
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub strategy: StrategyKind,
    pub policy: Policy,
    pub matrix: KillingMatrix,
    pub report: TimeReport,
    pub results_dir: PathBuf,
}

struct RowResult {
    muid: i64,
    row: Row,
    runs: Vec<(String, TestRun)>,
    report: TimeReport,
}

/// Runs `tests` in order on `program` with mutant `muid` active.
fn run_row(
    program: &Program,
    tests: &[String],
    muid: i64,
    policy: Policy,
    step_budget: u64,
) -> (Row, Vec<(String, TestRun)>) {
    let mut row = vec![None; tests.len()];
    let mut runs = Vec::new();
    for (i, test) in tests.iter().enumerate() {
        let run = run_test_at(program, test, muid, step_budget)
            .expect("tests come from the loaded program and the budget is positive");
        let status = run.outcome.status;
        row[i] = Some(status);
        runs.push((test.clone(), run));
        if policy == Policy::FastFail && status != Status::Pass {
            break;
        }
    }
    (row, runs)
}

fn load_program(dir: &Path) -> Result<Program, ExecutorError> {
    let project = load_project(dir)?;
    Program::load(&project).map_err(|source| ExecutorError::Load {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_artifacts(results: &Path, r: &RowResult) -> Result<(), ExecutorError> {
    let dir = results.join(r.muid.to_string());
    fs::create_dir_all(&dir).map_err(io(&dir))?;
    for (test, run) in &r.runs {
        let mut log = run.events.join("\n");
        if !log.is_empty() {
            log.push('\n');
        }
        write(&dir.join(format!("{test}.out")), &log)?;
        write(
            &dir.join(format!("{test}.time")),
            &format!("{}\n", run.outcome.steps_used),
        )?;
    }
    Ok(())
}

fn red_failures(tests: &[String], runs: &[(String, TestRun)]) -> Vec<String> {
    runs.iter()
        .filter(|(_, r)| r.outcome.status != Status::Pass)
        .map(|(t, r)| format!("{t} -> {} {}", r.outcome.status, r.outcome.message))
        .chain(
            // A test that never ran cannot be green.
            tests
                .iter()
                .filter(|t| !runs.iter().any(|(n, _)| n == *t))
                .map(|t| format!("{t} -> not run")),
        )
        .collect()
}

/// Executes one strategy under one policy; generates on demand.
pub fn run_campaign(
    config: &CampaignConfig,
    strategy: StrategyKind,
    policy: Policy,
    jobs: usize,
) -> Result<CampaignResult, ExecutorError> {
    let out = &config.output_dir;
    let strategy_dir = strategy.dir(out);
    let info_path = strategy_dir.join(MUTATION_INFO_FILE);
    if needs_generation(config, strategy) {
        generate(config, &[strategy])?;
    }
    let mut muids: Vec<i64> = read_mutation_info(&info_path)?
        .iter()
        .map(|m| m.muid)
        .collect();
    muids.sort_unstable();
    let results = results_dir(out, strategy, policy);
    reset_dir(&results)?;
    let budget = config.step_budget;

    let mut report = TimeReport::new();
    report.mark(START_TIME);
    let mut matrix;
    let mutant_rows: Vec<Result<RowResult, ExecutorError>>;
    match strategy {
        StrategyKind::Schemata => {
            report.begin(BUILD);
            let program = load_program(&strategy_dir)?;
            report.end(BUILD);
            let tests = program.tests().to_vec();
            matrix = KillingMatrix::new(tests.clone());
            let run = |muid: i64| {
                let mut sub = TimeReport::new();
                sub.begin(&run_mutant(muid));
                let (row, runs) = run_row(&program, &tests, muid, policy, budget);
                sub.end(&run_mutant(muid));
                RowResult {
                    muid,
                    row,
                    runs,
                    report: sub,
                }
            };
            let original = run(ORIGINAL_MUID);
            check_original(
                strategy,
                &tests,
                &original,
                &results,
                &mut matrix,
                &mut report,
            )?;
            mutant_rows = map_rows(&muids, jobs, |m| Ok(run(m)));
        }
        StrategyKind::Traditional => {
            let build_and_run = |muid: i64, tests: Option<&[String]>| {
                let mut sub = TimeReport::new();
                sub.begin(&run_mutant(muid));
                sub.begin(&build_mutant(muid));
                let program = load_program(&strategy_dir.join(muid.to_string()))?;
                sub.end(&build_mutant(muid));
                let tests = tests.unwrap_or(program.tests()).to_vec();
                // Trees are selected by directory, not by the environment.
                let (row, runs) = run_row(&program, &tests, ORIGINAL_MUID, policy, budget);
                sub.end(&run_mutant(muid));
                Ok::<_, ExecutorError>((
                    tests,
                    RowResult {
                        muid,
                        row,
                        runs,
                        report: sub,
                    },
                ))
            };
            let (tests, original) = build_and_run(ORIGINAL_MUID, None)?;
            matrix = KillingMatrix::new(tests.clone());
            check_original(
                strategy,
                &tests,
                &original,
                &results,
                &mut matrix,
                &mut report,
            )?;
            mutant_rows = map_rows(&muids, jobs, |m| {
                log::debug!("fresh session set for mutant {m}");
                build_and_run(m, Some(&tests)).map(|(_, r)| r)
            });
        }
    }
    for r in mutant_rows {
        let r = r?;
        write_artifacts(&results, &r)?;
        matrix.rows.push((MutantId(r.muid), r.row));
        report.extend(r.report);
    }
    report.mark(END_TIME);
    write(&results.join(MATRIX_FILE), &matrix.to_csv())?;
    write(&results.join(TIME_FILE), &report.to_csv())?;
    Ok(CampaignResult {
        strategy,
        policy,
        matrix,
        report,
        results_dir: results,
    })
}

fn check_original(
    strategy: StrategyKind,
    tests: &[String],
    original: &RowResult,
    results: &Path,
    matrix: &mut KillingMatrix,
    report: &mut TimeReport,
) -> Result<(), ExecutorError> {
    write_artifacts(results, original)?;
    matrix.rows.push((MutantId::ORIGINAL, original.row.clone()));
    report.extend(original.report.clone());
    let failures = red_failures(tests, &original.runs);
    if failures.is_empty() {
        return Ok(());
    }
    report.mark(END_TIME);
    write(&results.join(MATRIX_FILE), &matrix.to_csv())?;
    write(&results.join(TIME_FILE), &report.to_csv())?;
    Err(ExecutorError::OriginalSuiteRed {
        strategy: strategy.name(),
        failures,
    })
}

/// Maps mutant rows serially, or on `jobs` workers; results keep `muids`
/// order either way.
fn map_rows<F>(muids: &[i64], jobs: usize, f: F) -> Vec<Result<RowResult, ExecutorError>>
where
    F: Fn(i64) -> Result<RowResult, ExecutorError> + Sync,
{
    if jobs <= 1 {
        return muids.iter().map(|&m| f(m)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| muids.par_iter().map(|&m| f(m)).collect()),
        Err(e) => {
            log::warn!("cannot start {jobs} workers ({e}); running serially");
            muids.iter().map(|&m| f(m)).collect()
        }
    }
}

/// Reads a finished campaign's matrix and time report.
pub fn read_results(
    out_dir: &Path,
    strategy: StrategyKind,
    policy: Policy,
) -> Result<(KillingMatrix, TimeReport), ExecutorError> {
    let dir = results_dir(out_dir, strategy, policy);
    let matrix_path = dir.join(MATRIX_FILE);
    let matrix = KillingMatrix::from_csv(&read_artifact(&matrix_path)?).map_err(|e| {
        ExecutorError::Corrupt {
            path: matrix_path,
            message: e.to_string(),
        }
    })?;
    let time_path = dir.join(TIME_FILE);
    let report =
        TimeReport::from_csv(&read_artifact(&time_path)?).map_err(|e| ExecutorError::Corrupt {
            path: time_path,
            message: e.to_string(),
        })?;
    Ok((matrix, report))
}

/// Statuses of every (muid, test) cell, for quick lookups.
pub fn cells(matrix: &KillingMatrix) -> BTreeMap<(i64, String), Option<Status>> {
    matrix
        .rows
        .iter()
        .flat_map(|(m, row)| {
            matrix
                .tests
                .iter()
                .zip(row)
                .map(move |(t, s)| ((m.0, t.clone()), *s))
        })
        .collect()
}

impl From<ProjectError> for ExecutorError {
    fn from(e: ProjectError) -> Self {
        ExecutorError::Generate(e.into())
    }
}
