//! Acceptance suite over the bundled corpus. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any criterion fails.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mutschema::executor::{
    apply_policy, compute_score, generate, run_campaign, CampaignConfig, CampaignResult,
    GenerationSummary, Policy, Score, BUILD,
};
use mutschema::lang::Project;
use mutschema::metrics::{
    carbon_report, diff_strategies, disk_usage, dispatch_bench, percent_difference, HwConfig,
    BASELINE, BENCH_HEADER, DEFAULT_MUTATIONS, DEFAULT_RUNS,
};
use mutschema::mutagen::{assign_muid, MutantId, DEFAULT_STRIDE};
use mutschema::operators::OperatorKind;
use mutschema::runtime::{run_test_at, Program, Status, ORIGINAL_MUID};
use mutschema::strategies::{normalize, StrategyKind, MUTATION_INFO_FILE};

/// Generation must finish within this bound on the whole corpus.
const GENERATION_LIMIT: Duration = Duration::from_secs(60);
/// Serial campaigns of both strategies must finish within this bound.
const RUN_LIMIT: Duration = Duration::from_secs(300);
const MIN_SPACE_SAVING: f64 = 95.0;
/// Carbon and runtime percent differences may differ by at most this many
/// percentage points.
const CARBON_TOLERANCE_PP: f64 = 0.01;

struct AppRun {
    name: String,
    config: CampaignConfig,
    summary: GenerationSummary,
    generation: Duration,
    sc_full: CampaignResult,
    tr_full: CampaignResult,
    sc_fast: CampaignResult,
    sc_parallel: CampaignResult,
    serial_run: Duration,
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run_app(name: &str, scratch: &Path) -> AppRun {
    let mut config = CampaignConfig::load(&corpus_dir().join(name).join("config.json")).unwrap();
    config.output_dir = scratch.join(name);
    let start = Instant::now();
    let summary = generate(
        &config,
        &[StrategyKind::Schemata, StrategyKind::Traditional],
    )
    .unwrap();
    let generation = start.elapsed();
    let start = Instant::now();
    let sc_full = run_campaign(&config, StrategyKind::Schemata, Policy::FullFail, 1).unwrap();
    let tr_full = run_campaign(&config, StrategyKind::Traditional, Policy::FullFail, 1).unwrap();
    let serial_run = start.elapsed();
    let sc_fast = run_campaign(&config, StrategyKind::Schemata, Policy::FastFail, 1).unwrap();
    let sc_parallel = run_campaign(&config, StrategyKind::Schemata, Policy::FullFail, 4).unwrap();
    AppRun {
        name: name.to_string(),
        config,
        summary,
        generation,
        sc_full,
        tr_full,
        sc_fast,
        sc_parallel,
        serial_run,
    }
}

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn total_mutants(apps: &[AppRun]) -> usize {
    apps.iter().map(|a| a.summary.records.len()).sum()
}

fn strategy_equivalence(apps: &[AppRun]) -> Verdict {
    let mut divergences = 0;
    for a in apps {
        let d = diff_strategies(&a.sc_full.matrix, &a.tr_full.matrix).map_err(|e| e.to_string())?;
        divergences += d.divergences;
        let sc = fs::read(a.sc_full.results_dir.join("killing-matrix.csv")).unwrap();
        let tr = fs::read(a.tr_full.results_dir.join("killing-matrix.csv")).unwrap();
        ensure(sc == tr, || {
            format!("{}: killing-matrix.csv files differ", a.name)
        })?;
    }
    ensure(divergences == 0, || {
        format!("{divergences} divergent cells")
    })?;
    let serial: Duration = apps.iter().map(|a| a.serial_run).sum();
    ensure(serial < RUN_LIMIT, || {
        format!("serial runs took {serial:?}")
    })?;
    Ok(format!(
        "byte-identical fullFail matrices, 0 divergences over {} mutants, serial {:.2}s",
        total_mutants(apps),
        serial.as_secs_f64()
    ))
}

fn mutant_ids(apps: &[AppRun]) -> Verdict {
    let anchors = [(0, 27, 27), (1, 27, 1027), (2, 27, 2027), (38, 173, 38173)];
    for (k, p, want) in anchors {
        let got = assign_muid(k, p, DEFAULT_STRIDE).map_err(|e| e.to_string())?;
        ensure(got == MutantId(want), || {
            format!("assign_muid({k}, {p}) = {got:?}")
        })?;
    }
    for a in apps {
        for r in &a.summary.records {
            let want = r.ordinal as i64 * DEFAULT_STRIDE as i64 + r.point.index as i64;
            ensure(r.muid.0 == want, || {
                format!("{}: muid {} != k*1000+p", a.name, r.muid)
            })?;
        }
        let ids = |c: &CampaignResult| c.matrix.rows.iter().map(|(m, _)| *m).collect::<Vec<_>>();
        ensure(ids(&a.sc_full) == ids(&a.tr_full), || {
            format!("{}: ids differ by strategy", a.name)
        })?;
        ensure(a.sc_full.matrix == a.sc_parallel.matrix, || {
            format!("{}: --jobs 4 changed the matrix", a.name)
        })?;
    }
    Ok(
        "anchors 27/1027/2027/38173; every id = k*1000+p; identical across strategies and jobs"
            .into(),
    )
}

fn build_counts(apps: &[AppRun]) -> Verdict {
    let (mut sc_time, mut tr_time) = (0.0, 0.0);
    for a in apps {
        let m = a.summary.records.len();
        let sc_builds = a.sc_full.report.count_pairs(|s| s == BUILD);
        let tr_builds = a
            .tr_full
            .report
            .count_pairs(|s| s.starts_with("BUILD MUTANT "));
        let tr_mutant_builds = a
            .tr_full
            .report
            .count_pairs(|s| s.starts_with("BUILD MUTANT ") && s != "BUILD MUTANT -1");
        ensure(sc_builds == 1, || {
            format!("{}: {sc_builds} schemata builds", a.name)
        })?;
        ensure(tr_mutant_builds == m, || {
            format!(
                "{}: {tr_mutant_builds} per-mutant builds for {m} mutants",
                a.name
            )
        })?;
        ensure(tr_builds - sc_builds == m, || {
            format!(
                "{}: build difference {} != {m}",
                a.name,
                tr_builds - sc_builds
            )
        })?;
        ensure(a.sc_full.report.check_nesting().is_ok(), || {
            format!("{}: nesting", a.name)
        })?;
        ensure(a.tr_full.report.check_nesting().is_ok(), || {
            format!("{}: nesting", a.name)
        })?;
        sc_time += a.sc_full.report.wall_seconds().unwrap();
        tr_time += a.tr_full.report.wall_seconds().unwrap();
    }
    ensure(sc_time <= tr_time, || {
        format!("schemata {sc_time:.3}s > traditional {tr_time:.3}s")
    })?;
    Ok(format!(
        "1 schemata build, M per-mutant traditional builds (+ original); wall {sc_time:.3}s vs {tr_time:.3}s"
    ))
}

/// Independent byte count: recursive `read_dir` over `.mini` files.
fn mini_bytes(dir: &Path) -> u64 {
    let mut total = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            total += mini_bytes(&path);
        } else if path.to_string_lossy().ends_with(".mini") {
            total += fs::metadata(&path).unwrap().len();
        }
    }
    total
}

fn disk_saving(apps: &[AppRun]) -> Verdict {
    let (mut sc, mut tr) = (0u64, 0u64);
    let mut per_app = Vec::new();
    for a in apps {
        let out = &a.config.output_dir;
        let d = disk_usage(out).map_err(|e| e.to_string())?;
        let (s, t) = (d.schemata.unwrap(), d.traditional.unwrap());
        let oracle_s = mini_bytes(&out.join("schemata"));
        let oracle_t = mini_bytes(&out.join("traditional"));
        ensure((s, t) == (oracle_s, oracle_t), || {
            format!(
                "{}: disk_usage ({s}, {t}) vs oracle ({oracle_s}, {oracle_t})",
                a.name
            )
        })?;
        let saving = d.saving_space_percent.unwrap();
        let exact = 100.0 * (1.0 - s as f64 / t as f64);
        ensure(saving == exact, || {
            format!("{}: saving {saving} != {exact}", a.name)
        })?;
        ensure(saving >= MIN_SPACE_SAVING, || {
            format!("{}: saving {saving:.2}%", a.name)
        })?;
        per_app.push(format!("{} {saving:.2}%", a.name));
        sc += s;
        tr += t;
    }
    let total = 100.0 * (1.0 - sc as f64 / tr as f64);
    ensure(total >= MIN_SPACE_SAVING, || {
        format!("corpus saving {total:.2}%")
    })?;
    Ok(format!("corpus {total:.2}% ({})", per_app.join(", ")))
}

fn generation_parity(apps: &[AppRun]) -> Verdict {
    let mut total = Duration::ZERO;
    let (mut sc, mut tr) = (0.0, 0.0);
    for a in apps {
        let out = &a.config.output_dir;
        let a_info = fs::read(out.join("schemata").join(MUTATION_INFO_FILE)).unwrap();
        let b_info = fs::read(out.join("traditional").join(MUTATION_INFO_FILE)).unwrap();
        let top = fs::read(out.join(MUTATION_INFO_FILE)).unwrap();
        ensure(a_info == b_info && a_info == top, || {
            format!("{}: MutationInfo differs", a.name)
        })?;
        total += a.generation;
        sc += a.summary.times.schemata_seconds.unwrap();
        tr += a.summary.times.traditional_seconds.unwrap();
    }
    ensure(total < GENERATION_LIMIT, || {
        format!("generation took {total:?}")
    })?;
    Ok(format!(
        "byte-identical MutationInfo.json; generation {:.3}s; schemata saves {:.1}% generation time (reported only)",
        total.as_secs_f64(),
        100.0 * (1.0 - sc / tr)
    ))
}

/// Dead mutant count recomputed from the CSV text.
fn recount_dead(csv: &str) -> (usize, usize) {
    let mut generated = 0;
    let mut dead = 0;
    for line in csv.lines().skip(1) {
        let mut cells = line.split(';');
        if cells.next() == Some("-1") {
            continue;
        }
        generated += 1;
        if cells.any(|c| !c.is_empty() && c != "0") {
            dead += 1;
        }
    }
    (generated, dead)
}

fn score_arithmetic(apps: &[AppRun]) -> Verdict {
    let anchor = Score::from_counts(984, 307).unwrap();
    ensure(anchor.percent() == 31.2, || {
        format!("984/307 gives {}", anchor.percent())
    })?;
    ensure(anchor.to_string() == "307/984 = 31.2%", || {
        anchor.to_string()
    })?;
    let mut lines = Vec::new();
    for a in apps {
        let score = compute_score(&a.sc_full.matrix).unwrap();
        let csv = fs::read_to_string(a.sc_full.results_dir.join("killing-matrix.csv")).unwrap();
        let (generated, dead) = recount_dead(&csv);
        ensure((score.generated, score.dead) == (generated, dead), || {
            format!("{}: score {score} vs recount {dead}/{generated}", a.name)
        })?;
        lines.push(format!("{} {score}", a.name));
    }
    Ok(format!(
        "307/984 = 31.2%; recount agrees ({})",
        lines.join(", ")
    ))
}

fn timeout_path(apps: &[AppRun]) -> Verdict {
    let mut found = 0;
    for a in apps {
        for r in a
            .summary
            .records
            .iter()
            .filter(|r| r.operator == OperatorKind::LGL)
        {
            let full = a.sc_full.matrix.row(r.muid).unwrap();
            let fast = a.sc_fast.matrix.row(r.muid).unwrap();
            let Some(first_kill) = full
                .iter()
                .position(|c| c.is_some_and(|s| s != Status::Pass))
            else {
                continue;
            };
            if full[first_kill] != Some(Status::Timeout) {
                continue;
            }
            ensure(fast[first_kill] == Some(Status::Timeout), || {
                format!("{}: fastFail lost the 124 of mutant {}", a.name, r.muid)
            })?;
            ensure(fast[first_kill + 1..].iter().all(Option::is_none), || {
                format!("{}: fastFail row of {} continues past 124", a.name, r.muid)
            })?;
            found += 1;
        }
    }
    ensure(found > 0, || "no lengthy-listener mutant timed out".into())?;
    Ok(format!(
        "{found} lengthy-listener mutants end in 124; fastFail stops at that cell"
    ))
}

fn policy_prefix(apps: &[AppRun]) -> Verdict {
    let mut rows = 0;
    for a in apps {
        let full = &a.sc_full.matrix;
        let fast = &a.sc_fast.matrix;
        ensure(full.rows.len() == fast.rows.len(), || {
            format!("{}: row counts", a.name)
        })?;
        for ((m, f), (n, g)) in full.rows.iter().zip(&fast.rows) {
            ensure(m == n && apply_policy(f, Policy::FastFail) == *g, || {
                format!("{}: mutant {m} is not a prefix", a.name)
            })?;
            rows += 1;
        }
    }
    Ok(format!(
        "{rows} rows: fastFail = fullFail truncated at the first nonzero cell"
    ))
}

fn dispatch_benchmark() -> Verdict {
    let table = dispatch_bench(DEFAULT_MUTATIONS, DEFAULT_RUNS);
    let csv = table.to_csv();
    let mut lines = csv.lines();
    ensure(lines.next() == Some(BENCH_HEADER), || "header".into())?;
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(';').collect()).collect();
    ensure(rows.len() == 14, || format!("{} rows", rows.len()))?;
    ensure(
        rows.iter()
            .all(|r| r.len() == 7 && r.iter().all(|c| !c.is_empty())),
        || "unpopulated cells".into(),
    )?;
    let data = rows.iter().filter(|r| r[0] != BASELINE).count();
    ensure(data == 12, || format!("{data} data rows"))?;
    for r in rows.iter().filter(|r| r[0] == BASELINE) {
        ensure(r[6] == "0.0", || format!("baseline INC {}", r[6]))?;
    }
    let inverted = table.inverted_string_branches();
    let note = if inverted.is_empty() {
        "string dispatch slower than int dispatch as expected".to_string()
    } else {
        let names: Vec<&str> = inverted.iter().map(|b| b.name()).collect();
        format!("FLAG: string dispatch faster on {}", names.join(", "))
    };
    Ok(format!("12 data rows + 2 baseline rows (INC 0.0); {note}"))
}

fn carbon_linearity(apps: &[AppRun]) -> Verdict {
    let footprint = percent_difference(1.59, 1.72);
    ensure(format!("{footprint:.2}") == "8.18", || {
        format!("footprint delta {footprint:.4}")
    })?;
    for hw in [
        HwConfig::default(),
        HwConfig {
            cores: 32.0,
            pue: 1.1,
            carbon_intensity: 475.0,
            ..HwConfig::default()
        },
    ] {
        let r = carbon_report(2.18 * 24.0, 2.35 * 24.0, &hw);
        let gap = (r.carbon_difference_percent - r.runtime_difference_percent).abs();
        ensure(gap <= CARBON_TOLERANCE_PP, || {
            format!("paper runtimes: gap {gap} pp")
        })?;
    }
    let sc: f64 = apps
        .iter()
        .map(|a| a.sc_full.report.wall_seconds().unwrap())
        .sum();
    let tr: f64 = apps
        .iter()
        .map(|a| a.tr_full.report.wall_seconds().unwrap())
        .sum();
    let r = carbon_report(sc / 3600.0, tr / 3600.0, &HwConfig::default());
    let gap = (r.carbon_difference_percent - r.runtime_difference_percent).abs();
    ensure(gap <= CARBON_TOLERANCE_PP, || {
        format!("corpus: gap {gap} pp")
    })?;
    let days = carbon_report(2.18, 2.35, &HwConfig::default());
    Ok(format!(
        "(1.72-1.59)/1.59 = 8.18%; 2.18 vs 2.35 days gives {:.2}% runtime and CO2e; corpus {:.2}% both",
        days.carbon_difference_percent, r.carbon_difference_percent
    ))
}

fn default_arm_identity(apps: &[AppRun]) -> Verdict {
    let mut tests = 0;
    for a in apps {
        let original = Project::load_dir(&a.config.project_dir).unwrap();
        let options = a.config.generation_options().unwrap();
        let normalized = normalize(&original, &options).unwrap();
        let woven = Project::load_dir(&a.config.output_dir.join("schemata")).unwrap();
        let original = Program::load(&original).unwrap();
        let normalized = Program::load(&normalized).unwrap();
        let woven = Program::load(&woven).unwrap();
        ensure(original.tests() == woven.tests(), || {
            format!("{}: test lists differ", a.name)
        })?;
        let budget = a.config.step_budget;
        for t in original.tests() {
            let o = run_test_at(&original, t, ORIGINAL_MUID, budget).unwrap();
            let n = run_test_at(&normalized, t, ORIGINAL_MUID, budget).unwrap();
            let w = run_test_at(&woven, t, ORIGINAL_MUID, budget).unwrap();
            ensure(w == n, || {
                format!("{}::{t}: woven differs from normalized original", a.name)
            })?;
            ensure(
                w.events == o.events
                    && w.outcome.status == o.outcome.status
                    && w.outcome.message == o.outcome.message,
                || format!("{}::{t}: woven differs from original", a.name),
            )?;
            tests += 1;
        }
    }
    Ok(format!(
        "{tests} tests: identical statuses, messages and event logs at -1"
    ))
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().unwrap();
    let apps: Vec<AppRun> = ["notes", "calc", "messenger"]
        .iter()
        .map(|name| run_app(name, scratch.path()))
        .collect();
    let tests: usize = apps.iter().map(|a| a.sc_full.matrix.tests.len()).sum();
    println!(
        "corpus: {} apps, {tests} tests, {} mutants",
        apps.len(),
        total_mutants(&apps)
    );
    let criteria: Vec<Criterion<'_>> = vec![
        (
            "strategy equivalence",
            Box::new(|| strategy_equivalence(&apps)),
        ),
        ("mutant-id scheme", Box::new(|| mutant_ids(&apps))),
        ("build-count law", Box::new(|| build_counts(&apps))),
        ("disk saving", Box::new(|| disk_saving(&apps))),
        ("generation parity", Box::new(|| generation_parity(&apps))),
        ("score arithmetic", Box::new(|| score_arithmetic(&apps))),
        ("timeout path", Box::new(|| timeout_path(&apps))),
        ("policy prefix", Box::new(|| policy_prefix(&apps))),
        ("dispatch benchmark", Box::new(dispatch_benchmark)),
        ("carbon linearity", Box::new(|| carbon_linearity(&apps))),
        (
            "default-arm identity",
            Box::new(|| default_arm_identity(&apps)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
