//! Post-campaign analytics: strategy divergence, disk and time accounting,
//! the carbon estimate, `report.json`, and the dispatch micro-benchmark.

mod bench;
mod carbon;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};
use thiserror::Error;
use walkdir::WalkDir;

use crate::executor::{
    compute_score, read_results, CampaignConfig, ExecutorError, GenerationTimes, KillingMatrix,
    Policy, Score, TimeReport, EFFECTIVE_CONFIG_FILE,
};
use crate::lang::EXTENSION;
use crate::runtime::Status;
use crate::strategies::StrategyKind;

pub use bench::{
    dispatch_bench, fetch_overhead_bench, BenchRow, BenchTable, Branch, FetchOverhead, Selector,
    Shape, Variant, BASELINE, BENCH_HEADER, DEFAULT_MUTATIONS, DEFAULT_RUNS, LOOP_ITERATIONS,
};
pub use carbon::{
    carbon_report, estimate, percent_difference, CarbonEstimate, CarbonReport, HwConfig,
    NonPositiveField,
};

pub const REPORT_FILE: &str = "report.json";
pub const BENCH_FILE: &str = "bench.csv";
const NA: &str = "n/a";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DivergentCell {
    pub muid: i64,
    pub test: String,
    #[serde(rename = "statusSC")]
    pub status_sc: Option<u8>,
    #[serde(rename = "statusTR")]
    pub status_tr: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DivergenceReport {
    /// `|dead(SC) - dead(TR)|`.
    pub difference: usize,
    /// Number of unequal (muid, test) cells.
    pub divergences: usize,
    pub divergent_cells: Vec<DivergentCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("matrices differ in shape: {0}")]
pub struct ShapeMismatch(pub String);

pub fn diff_strategies(
    sc: &KillingMatrix,
    tr: &KillingMatrix,
) -> Result<DivergenceReport, ShapeMismatch> {
    if sc.tests != tr.tests {
        return Err(ShapeMismatch("test columns differ".into()));
    }
    let ids = |m: &KillingMatrix| m.rows.iter().map(|(id, _)| *id).collect::<Vec<_>>();
    if ids(sc) != ids(tr) {
        return Err(ShapeMismatch("mutant rows differ".into()));
    }
    let dead = |m: &KillingMatrix| {
        m.mutant_rows()
            .filter(|(_, r)| crate::executor::is_killed(r))
            .count()
    };
    let code = |c: &Option<Status>| c.map(Status::code);
    let mut divergent_cells = Vec::new();
    for ((id, a), (_, b)) in sc.rows.iter().zip(&tr.rows) {
        for ((test, x), y) in sc.tests.iter().zip(a).zip(b) {
            if x != y {
                divergent_cells.push(DivergentCell {
                    muid: id.0,
                    test: test.clone(),
                    status_sc: code(x),
                    status_tr: code(y),
                });
            }
        }
    }
    Ok(DivergenceReport {
        difference: dead(sc).abs_diff(dead(tr)),
        divergences: divergent_cells.len(),
        divergent_cells,
    })
}

/// Total size of the `.mini` files under `dir`; zero when `dir` is absent.
pub fn tree_bytes(dir: &Path) -> std::io::Result<u64> {
    if !dir.exists() {
        return Ok(0);
    }
    let mut total = 0;
    for entry in WalkDir::new(dir) {
        let entry = entry.map_err(std::io::Error::other)?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == EXTENSION) {
            total += entry.metadata().map_err(std::io::Error::other)?.len();
        }
    }
    Ok(total)
}

/// `100 * (1 - part / whole)`, undefined when `whole` is zero.
pub fn saving_percent(part: f64, whole: f64) -> Option<f64> {
    (whole > 0.0).then(|| 100.0 * (1.0 - part / whole))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiskUsage {
    #[serde(serialize_with = "na")]
    pub schemata: Option<u64>,
    #[serde(serialize_with = "na")]
    pub traditional: Option<u64>,
    #[serde(serialize_with = "na")]
    pub saving_space_percent: Option<f64>,
}

/// Byte totals of the generated source trees; reports and `.json` files
/// are not counted.
pub fn disk_usage(out_dir: &Path) -> std::io::Result<DiskUsage> {
    let measure = |s: StrategyKind| -> std::io::Result<Option<u64>> {
        let dir = s.dir(out_dir);
        if dir.is_dir() {
            tree_bytes(&dir).map(Some)
        } else {
            Ok(None)
        }
    };
    let schemata = measure(StrategyKind::Schemata)?;
    let traditional = measure(StrategyKind::Traditional)?;
    let saving_space_percent = match (schemata, traditional) {
        (Some(sc), Some(tr)) => saving_percent(sc as f64, tr as f64),
        _ => None,
    };
    Ok(DiskUsage {
        schemata,
        traditional,
        saving_space_percent,
    })
}

fn na<T: Serialize, S: Serializer>(value: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => v.serialize(s),
        None => s.serialize_str(NA),
    }
}

fn both<T: Copy>(a: Option<T>, b: Option<T>) -> Option<(T, T)> {
    a.zip(b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CostReport {
    #[serde(serialize_with = "na")]
    pub gen_time_schemata: Option<f64>,
    #[serde(serialize_with = "na")]
    pub gen_time_traditional: Option<f64>,
    #[serde(serialize_with = "na")]
    pub disk_schemata: Option<u64>,
    #[serde(serialize_with = "na")]
    pub disk_traditional: Option<u64>,
    #[serde(serialize_with = "na")]
    pub saving_time_percent: Option<f64>,
    #[serde(serialize_with = "na")]
    pub saving_space_percent: Option<f64>,
    #[serde(serialize_with = "na")]
    pub run_time_schemata: Option<f64>,
    #[serde(serialize_with = "na")]
    pub run_time_traditional: Option<f64>,
    #[serde(serialize_with = "na")]
    pub run_saving_percent: Option<f64>,
}

impl CostReport {
    pub fn new(gen: &GenerationTimes, disk: &DiskUsage, run: [Option<f64>; 2]) -> Self {
        let saving =
            |a: Option<f64>, b: Option<f64>| both(a, b).and_then(|(a, b)| saving_percent(a, b));
        Self {
            gen_time_schemata: gen.schemata_seconds,
            gen_time_traditional: gen.traditional_seconds,
            disk_schemata: disk.schemata,
            disk_traditional: disk.traditional,
            saving_time_percent: saving(gen.schemata_seconds, gen.traditional_seconds),
            saving_space_percent: disk.saving_space_percent,
            run_time_schemata: run[0],
            run_time_traditional: run[1],
            run_saving_percent: saving(run[0], run[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoreEntry {
    pub generated: usize,
    pub alive: usize,
    pub dead: usize,
    pub score_percent: f64,
    /// e.g. `307/984 = 31.2%`.
    pub line: String,
}

impl From<Score> for ScoreEntry {
    fn from(s: Score) -> Self {
        Self {
            generated: s.generated,
            alive: s.alive,
            dead: s.dead,
            score_percent: s.percent(),
            line: s.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Scores {
    #[serde(serialize_with = "na")]
    pub schemata: Option<ScoreEntry>,
    #[serde(serialize_with = "na")]
    pub traditional: Option<ScoreEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CarbonSection {
    #[serde(serialize_with = "na")]
    pub schemata: Option<CarbonEstimate>,
    #[serde(serialize_with = "na")]
    pub traditional: Option<CarbonEstimate>,
    #[serde(serialize_with = "na")]
    pub runtime_difference_percent: Option<f64>,
    #[serde(serialize_with = "na")]
    pub energy_difference_percent: Option<f64>,
    #[serde(serialize_with = "na")]
    pub carbon_difference_percent: Option<f64>,
}

impl CarbonSection {
    pub fn new(run_seconds: [Option<f64>; 2], hw: &HwConfig) -> Self {
        let hours = |s: Option<f64>| s.map(|s| s / 3600.0);
        let (sc, tr) = (hours(run_seconds[0]), hours(run_seconds[1]));
        match both(sc, tr) {
            Some((sc, tr)) => {
                let r = carbon_report(sc, tr, hw);
                Self {
                    schemata: Some(r.schemata),
                    traditional: Some(r.traditional),
                    runtime_difference_percent: Some(r.runtime_difference_percent),
                    energy_difference_percent: Some(r.energy_difference_percent),
                    carbon_difference_percent: Some(r.carbon_difference_percent),
                }
            }
            None => Self {
                schemata: sc.map(|h| estimate(h, hw)),
                traditional: tr.map(|h| estimate(h, hw)),
                runtime_difference_percent: None,
                energy_difference_percent: None,
                carbon_difference_percent: None,
            },
        }
    }
}

/// Contents of `report.json`; field order is the file's key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub policy: Policy,
    pub cost: CostReport,
    pub scores: Scores,
    #[serde(serialize_with = "na")]
    pub divergence: Option<DivergenceReport>,
    pub carbon: CarbonSection,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Executor(#[from] ExecutorError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no campaign results under {}", .0.display())]
    NoResults(PathBuf),
    #[error(transparent)]
    Shape(#[from] ShapeMismatch),
}

/// Builds the report for `out_dir` from whatever strategies have results
/// under `policy`; sections needing both are "n/a" otherwise.
pub fn build_report(out_dir: &Path, policy: Policy) -> Result<Report, ReportError> {
    let hw = match out_dir.join(EFFECTIVE_CONFIG_FILE) {
        p if p.exists() => {
            CampaignConfig::load(&p)
                .map_err(ExecutorError::from)?
                .hw_config
        }
        _ => HwConfig::default(),
    };
    let results = |s: StrategyKind| -> Result<Option<(KillingMatrix, TimeReport)>, ReportError> {
        if crate::executor::results_dir(out_dir, s, policy).is_dir() {
            Ok(Some(read_results(out_dir, s, policy)?))
        } else {
            Ok(None)
        }
    };
    let sc = results(StrategyKind::Schemata)?;
    let tr = results(StrategyKind::Traditional)?;
    if sc.is_none() && tr.is_none() {
        return Err(ReportError::NoResults(
            out_dir.join(crate::executor::RESULTS_DIR),
        ));
    }
    let gen = match GenerationTimes::read(out_dir) {
        Ok(t) => t,
        Err(ExecutorError::MissingArtifact(_)) => GenerationTimes::default(),
        Err(e) => return Err(e.into()),
    };
    let disk = disk_usage(out_dir).map_err(|source| ReportError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let wall =
        |r: &Option<(KillingMatrix, TimeReport)>| r.as_ref().and_then(|(_, t)| t.wall_seconds());
    let run = [wall(&sc), wall(&tr)];
    let score = |r: &Option<(KillingMatrix, TimeReport)>| {
        r.as_ref()
            .and_then(|(m, _)| compute_score(m).ok())
            .map(ScoreEntry::from)
    };
    let divergence = match (&sc, &tr) {
        (Some((a, _)), Some((b, _))) => Some(diff_strategies(a, b)?),
        _ => None,
    };
    Ok(Report {
        policy,
        cost: CostReport::new(&gen, &disk, run),
        scores: Scores {
            schemata: score(&sc),
            traditional: score(&tr),
        },
        divergence,
        carbon: CarbonSection::new(run, &hw),
    })
}

pub fn report_json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("plain data serializes");
    text.push('\n');
    text
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| NA.to_string(), |v| v.to_string())
}

fn fmt_f(v: Option<f64>, digits: usize) -> String {
    fmt_opt(v.map(|v| format!("{v:.digits$}")))
}

/// Plain-text summary of a report.
pub fn summary(report: &Report) -> String {
    let c = &report.cost;
    let mut out = String::new();
    let _ = writeln!(out, "policy: {}", report.policy);
    let _ = writeln!(out, "                schemata     traditional  saving %");
    let _ = writeln!(
        out,
        "generation (s)  {:<12} {:<12} {}",
        fmt_f(c.gen_time_schemata, 3),
        fmt_f(c.gen_time_traditional, 3),
        fmt_f(c.saving_time_percent, 2)
    );
    let _ = writeln!(
        out,
        "disk (bytes)    {:<12} {:<12} {}",
        fmt_opt(c.disk_schemata),
        fmt_opt(c.disk_traditional),
        fmt_f(c.saving_space_percent, 2)
    );
    let _ = writeln!(
        out,
        "run (s)         {:<12} {:<12} {}",
        fmt_f(c.run_time_schemata, 3),
        fmt_f(c.run_time_traditional, 3),
        fmt_f(c.run_saving_percent, 2)
    );
    let line = |s: &Option<ScoreEntry>| s.as_ref().map_or(NA.to_string(), |s| s.line.clone());
    let _ = writeln!(out, "score schemata:    {}", line(&report.scores.schemata));
    let _ = writeln!(
        out,
        "score traditional: {}",
        line(&report.scores.traditional)
    );
    match &report.divergence {
        Some(d) => {
            let _ = writeln!(
                out,
                "difference: {}  divergences: {}",
                d.difference, d.divergences
            );
        }
        None => {
            let _ = writeln!(out, "difference: {NA}  divergences: {NA}");
        }
    }
    let _ = writeln!(
        out,
        "carbon (gCO2e)  {:<12} {:<12} diff % {}",
        fmt_f(report.carbon.schemata.as_ref().map(|e| e.carbon_gco2e), 6),
        fmt_f(
            report.carbon.traditional.as_ref().map(|e| e.carbon_gco2e),
            6
        ),
        fmt_f(report.carbon.carbon_difference_percent, 2)
    );
    out
}

#[cfg(test)]
mod tests;
