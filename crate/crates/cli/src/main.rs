//! `mutschema`: generate, run, and report mutation campaigns.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use mutschema::executor::{
    self, compute_score, CampaignConfig, ConfigError, ExecutorError, Policy, StrategyChoice,
};
use mutschema::lang::ProjectError;
use mutschema::metrics::{self, ReportError, BENCH_FILE, REPORT_FILE};
use mutschema::mutagen::MutagenError;
use mutschema::strategies::{GenerateError, StrategyKind};

#[derive(Parser)]
#[command(
    name = "mutschema",
    version,
    about = "Mutation campaigns with mutant schemata or per-mutant trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate mutants and write the strategy outputs.
    Generate {
        #[command(flatten)]
        campaign: CampaignArgs,
    },
    /// Execute the test suite against every mutant.
    Run {
        #[command(flatten)]
        campaign: CampaignArgs,
        /// Override the configured policy.
        #[arg(long)]
        policy: Option<Policy>,
        /// Worker threads for mutant rows.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
    },
    /// Write report.json and print a summary.
    Report {
        #[command(flatten)]
        target: OutputArgs,
    },
    /// Compare the schemata and traditional killing matrices.
    Diff {
        #[command(flatten)]
        target: OutputArgs,
    },
    /// Benchmark mutant dispatch in the bundled runtime.
    Bench {
        /// Mutant arms per selecting statement.
        #[arg(long, default_value_t = metrics::DEFAULT_MUTATIONS)]
        mutations: usize,
        /// Measured runs per variant and branch.
        #[arg(long, default_value_t = metrics::DEFAULT_RUNS, value_parser = parse_runs)]
        runs: usize,
        /// Where to write the table.
        #[arg(long, default_value = BENCH_FILE)]
        output: PathBuf,
        /// Also compare the session constant against per-use `getMUID()`.
        #[arg(long)]
        fetch_overhead: bool,
    },
}

fn parse_runs(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

#[derive(Args)]
struct CampaignArgs {
    /// Path to config.json.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured strategy.
    #[arg(long)]
    strategy: Option<StrategyChoice>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl CampaignArgs {
    fn load(&self) -> Result<CampaignConfig, ConfigError> {
        let mut config = CampaignConfig::load(&self.config)?;
        if let Some(s) = self.strategy {
            config.strategy = s;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        Ok(config)
    }
}

#[derive(Args)]
struct OutputArgs {
    #[command(flatten)]
    location: Location,
    /// Results of which policy to use.
    #[arg(long, default_value = "fullFail")]
    policy: Policy,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Location {
    /// Output directory of a campaign.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Path to config.json; its outputDir is used.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl OutputArgs {
    fn output_dir(&self) -> Result<PathBuf, ConfigError> {
        match (&self.location.output_dir, &self.location.config) {
            (Some(dir), _) => Ok(dir.clone()),
            (None, Some(config)) => Ok(CampaignConfig::load(config)?.output_dir),
            (None, None) => unreachable!("clap requires one of the two"),
        }
    }
}

fn generate(args: &CampaignArgs) -> Result<()> {
    let config = args.load()?;
    let summary = executor::generate(&config, &config.strategy.strategies())?;
    print!("{}", summary.counts_table());
    for s in config.strategy.strategies() {
        if let Some(t) = summary.times.get(s) {
            println!("{} generation: {t:.3}s", s.name());
        }
    }
    Ok(())
}

fn run(args: &CampaignArgs, policy: Option<Policy>, jobs: u32) -> Result<()> {
    let config = args.load()?;
    let policy = policy.unwrap_or(config.policy);
    for strategy in config.strategy.strategies() {
        let result = executor::run_campaign(&config, strategy, policy, jobs as usize)?;
        let score =
            compute_score(&result.matrix).map_or_else(|_| "n/a".to_string(), |s| s.to_string());
        let wall = result.report.wall_seconds().unwrap_or_default();
        println!(
            "{} {policy}: score {score}, {wall:.3}s, results in {}",
            strategy.name(),
            result.results_dir.display()
        );
    }
    Ok(())
}

fn report(target: &OutputArgs) -> Result<()> {
    let out = target.output_dir()?;
    let report = metrics::build_report(&out, target.policy)?;
    let path = out.join(REPORT_FILE);
    fs::write(&path, metrics::report_json(&report))
        .with_context(|| format!("writing {}", path.display()))?;
    print!("{}", metrics::summary(&report));
    println!("wrote {}", path.display());
    Ok(())
}

fn diff(target: &OutputArgs) -> Result<()> {
    let out = target.output_dir()?;
    let (sc, _) = executor::read_results(&out, StrategyKind::Schemata, target.policy)?;
    let (tr, _) = executor::read_results(&out, StrategyKind::Traditional, target.policy)?;
    let d = metrics::diff_strategies(&sc, &tr).map_err(ReportError::from)?;
    println!(
        "difference: {}  divergences: {}",
        d.difference, d.divergences
    );
    for c in &d.divergent_cells {
        let show = |s: Option<u8>| s.map_or_else(|| "-".to_string(), |s| s.to_string());
        println!(
            "  mutant {} {}: schemata {} traditional {}",
            c.muid,
            c.test,
            show(c.status_sc),
            show(c.status_tr)
        );
    }
    Ok(())
}

fn bench(mutations: usize, runs: usize, output: &Path, fetch_overhead: bool) -> Result<()> {
    let table = metrics::dispatch_bench(mutations, runs);
    let csv = table.to_csv();
    fs::write(output, &csv).with_context(|| format!("writing {}", output.display()))?;
    print!("{csv}");
    for b in table.inverted_string_branches() {
        log::warn!(
            "string dispatch averaged below constant-int dispatch on the {} branch",
            b.name()
        );
    }
    if fetch_overhead {
        let o = metrics::fetch_overhead_bench(runs);
        println!(
            "mutant id read: session constant {:.3}us, getMUID() per use {:.3}us",
            o.constant_us, o.call_us
        );
    }
    Ok(())
}

fn executor_code(e: &ExecutorError) -> u8 {
    match e {
        ExecutorError::Config(_) | ExecutorError::Load { .. } => 1,
        ExecutorError::OriginalSuiteRed { .. } => 2,
        ExecutorError::Generate(g) => match g {
            GenerateError::Mutagen(MutagenError::PointOverflow(_)) => 3,
            GenerateError::Mutagen(_) => 1,
            GenerateError::Project(ProjectError::Io { .. }) | GenerateError::Io { .. } => 4,
            GenerateError::Project(_) => 1,
        },
        ExecutorError::MissingArtifact(_)
        | ExecutorError::Corrupt { .. }
        | ExecutorError::ParityMismatch
        | ExecutorError::Io { .. } => 4,
    }
}

/// Exit status for a failed command.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<ExecutorError>() {
            return executor_code(e);
        }
        if let Some(e) = cause.downcast_ref::<ReportError>() {
            return match e {
                ReportError::Executor(e) => executor_code(e),
                _ => 4,
            };
        }
    }
    4
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Generate { campaign } => generate(campaign),
        Command::Run {
            campaign,
            policy,
            jobs,
        } => run(campaign, *policy, *jobs),
        Command::Report { target } => report(target),
        Command::Diff { target } => diff(target),
        Command::Bench {
            mutations,
            runs,
            output,
            fetch_overhead,
        } => bench(*mutations, *runs, output, *fetch_overhead),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
