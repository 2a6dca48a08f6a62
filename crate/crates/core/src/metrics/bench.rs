//! Dispatch micro-benchmark: cost of selecting one of many mutant arms in
//! the bundled runtime, by selector kind and statement shape.

use std::fmt;
use std::time::Instant;

use crate::lang::{Project, SourceModule};
use crate::runtime::{run_test_at, Program, Status, MUID_CONSTANT};

pub const DEFAULT_MUTATIONS: usize = 100;
pub const DEFAULT_RUNS: usize = 30;
/// Times the selecting statement executes per measured run.
pub const LOOP_ITERATIONS: usize = 50;
pub const BENCH_HEADER: &str = "variant;branch;SUM;MAX;MIN;AVG;INC";
pub const BASELINE: &str = "baseline";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    ConstInt,
    MutableInt,
    Str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Dispatch,
    IfElse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    First,
    Default,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::First => "first",
            Branch::Default => "default",
        }
    }

    fn muid(self) -> i64 {
        match self {
            Branch::First => 0,
            Branch::Default => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub selector: Selector,
    pub shape: Shape,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::new(Selector::ConstInt, Shape::Dispatch),
        Variant::new(Selector::ConstInt, Shape::IfElse),
        Variant::new(Selector::MutableInt, Shape::Dispatch),
        Variant::new(Selector::MutableInt, Shape::IfElse),
        Variant::new(Selector::Str, Shape::Dispatch),
        Variant::new(Selector::Str, Shape::IfElse),
    ];

    pub const BASELINE: Variant = Variant::new(Selector::ConstInt, Shape::Dispatch);

    pub const fn new(selector: Selector, shape: Shape) -> Self {
        Self { selector, shape }
    }

    pub fn name(self) -> &'static str {
        match (self.selector, self.shape) {
            (Selector::ConstInt, Shape::Dispatch) => "const-int-dispatch",
            (Selector::ConstInt, Shape::IfElse) => "const-int-ifelse",
            (Selector::MutableInt, Shape::Dispatch) => "mutable-int-dispatch",
            (Selector::MutableInt, Shape::IfElse) => "mutable-int-ifelse",
            (Selector::Str, Shape::Dispatch) => "string-dispatch",
            (Selector::Str, Shape::IfElse) => "string-ifelse",
        }
    }

    /// Mini source of a test looping over one selecting statement with
    /// `arms` mutant arms plus a default.
    pub fn source(self, arms: usize) -> String {
        let (setup, sel) = match self.selector {
            Selector::ConstInt => ("", MUID_CONSTANT),
            Selector::MutableInt => ("  var m = getMUID();\n", "m"),
            Selector::Str => ("  var m = \"\" + getMUID();\n", "m"),
        };
        let case_value = |i: usize| match self.selector {
            Selector::Str => format!("\"{i}\""),
            _ => i.to_string(),
        };
        let mut body = String::new();
        match self.shape {
            Shape::Dispatch => {
                body.push_str(&format!("    dispatch ({sel}) {{\n"));
                for i in 0..arms {
                    body.push_str(&format!(
                        "      case {i} {{\n        x = x + {};\n      }}\n",
                        i + 2
                    ));
                }
                body.push_str("      default {\n        x = x + 1;\n      }\n    }\n");
            }
            Shape::IfElse => {
                // No `else if` in the grammar: each test nests in the else.
                for i in 0..arms {
                    body.push_str(&format!(
                        "    if ({sel} == {}) {{ x = x + {}; }} else {{\n",
                        case_value(i),
                        i + 2
                    ));
                }
                body.push_str("    x = x + 1;\n");
                body.push_str(&"    }\n".repeat(arms));
            }
        }
        format!(
            "fn test_bench() {{\n{setup}  var x = 0;\n  var i = 0;\n  while (i < {LOOP_ITERATIONS}) {{\n{body}    i = i + 1;\n  }}\n}}\n"
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub variant: String,
    pub branch: Branch,
    /// Per-run wall times in microseconds.
    pub samples: Vec<f64>,
    pub inc_percent: f64,
}

impl BenchRow {
    pub fn sum(&self) -> f64 {
        self.samples.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::MAX, f64::min)
    }

    pub fn avg(&self) -> f64 {
        self.sum() / self.samples.len() as f64
    }
}

impl fmt::Display for BenchRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{};{};{:.3};{:.3};{:.3};{:.3};{:.1}",
            self.variant,
            self.branch.name(),
            self.sum(),
            self.max(),
            self.min(),
            self.avg(),
            self.inc_percent
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchTable {
    pub mutations: usize,
    pub runs: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{BENCH_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{r}\n"));
        }
        out
    }

    pub fn row(&self, variant: &str, branch: Branch) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.branch == branch)
    }

    /// Branches where string dispatch averaged below constant-int dispatch,
    /// the opposite of the expected direction.
    pub fn inverted_string_branches(&self) -> Vec<Branch> {
        [Branch::First, Branch::Default]
            .into_iter()
            .filter(|&b| {
                let s = self.row(Variant::new(Selector::Str, Shape::Dispatch).name(), b);
                let i = self.row(Variant::BASELINE.name(), b);
                matches!((s, i), (Some(s), Some(i)) if s.avg() < i.avg())
            })
            .collect()
    }
}

fn load(src: &str) -> Program {
    let project = Project::from_modules(vec![SourceModule::new("bench.mini", src)])
        .expect("generated benchmark source parses");
    Program::load(&project).expect("generated benchmark source loads")
}

fn measure(program: &Program, muid: i64) -> f64 {
    let start = Instant::now();
    let run = run_test_at(program, "test_bench", muid, u64::MAX).expect("bench test exists");
    let micros = start.elapsed().as_secs_f64() * 1e6;
    debug_assert_eq!(run.outcome.status, Status::Pass, "{}", run.outcome.message);
    micros
}

/// Runs every variant on both branches `runs` times. Rows: the 6 variants
/// times 2 branches, then one baseline row per branch.
pub fn dispatch_bench(mutations: usize, runs: usize) -> BenchTable {
    let runs = runs.max(1);
    let mut rows = Vec::new();
    for variant in Variant::ALL {
        let program = load(&variant.source(mutations));
        for branch in [Branch::First, Branch::Default] {
            // One untimed warm-up run per cell.
            measure(&program, branch.muid());
            let samples = (0..runs)
                .map(|_| measure(&program, branch.muid()))
                .collect();
            rows.push(BenchRow {
                variant: variant.name().to_string(),
                branch,
                samples,
                inc_percent: 0.0,
            });
        }
    }
    for branch in [Branch::First, Branch::Default] {
        let base = rows
            .iter()
            .find(|r| r.variant == Variant::BASELINE.name() && r.branch == branch)
            .expect("baseline variant measured")
            .clone();
        rows.push(BenchRow {
            variant: BASELINE.to_string(),
            ..base
        });
    }
    for i in 0..rows.len() {
        let base = rows
            .iter()
            .find(|r| r.variant == BASELINE && r.branch == rows[i].branch)
            .expect("baseline row present")
            .avg();
        rows[i].inc_percent = if rows[i].variant == BASELINE || base == 0.0 {
            0.0
        } else {
            100.0 * (rows[i].avg() - base) / base
        };
    }
    BenchTable {
        mutations,
        runs,
        rows,
    }
}

/// Average microseconds per run for reading the mutant id through the
/// session constant versus calling `getMUID()` at every use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FetchOverhead {
    pub constant_us: f64,
    pub call_us: f64,
}

pub fn fetch_overhead_bench(runs: usize) -> FetchOverhead {
    let src = |read: &str| {
        format!(
            "fn test_bench() {{\n  var x = 0;\n  var i = 0;\n  while (i < {LOOP_ITERATIONS}) {{\n    x = x + {read};\n    i = i + 1;\n  }}\n}}\n"
        )
    };
    let runs = runs.max(1);
    let avg = |program: &Program| {
        measure(program, 0);
        (0..runs).map(|_| measure(program, 0)).sum::<f64>() / runs as f64
    };
    FetchOverhead {
        constant_us: avg(&load(&src(MUID_CONSTANT))),
        call_us: avg(&load(&src("getMUID()"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_variant_takes_the_expected_branch() {
        for variant in Variant::ALL {
            let src = variant
                .source(5)
                .replace("  }\n}\n", "  }\n  print(x);\n}\n");
            let program = load(&src);
            let first = run_test_at(&program, "test_bench", 0, u64::MAX).unwrap();
            let default = run_test_at(&program, "test_bench", -1, u64::MAX).unwrap();
            let expect = |per: usize| vec![format!("PRINT {}", per * LOOP_ITERATIONS)];
            assert_eq!(first.events, expect(2), "{}", variant.name());
            assert_eq!(default.events, expect(1), "{}", variant.name());
        }
    }

    #[test]
    fn table_shape_and_baseline() {
        let t = dispatch_bench(4, 1);
        assert_eq!(t.rows.len(), 14);
        let csv = t.to_csv();
        assert_eq!(csv.lines().next(), Some(BENCH_HEADER));
        for r in t.rows.iter().filter(|r| r.variant == BASELINE) {
            assert_eq!(r.inc_percent, 0.0);
        }
        for r in &t.rows {
            assert_eq!(r.samples.len(), 1);
            assert_eq!(r.sum(), r.max());
            assert_eq!(r.max(), r.min());
        }
    }

    #[test]
    fn fetch_overhead_is_measured() {
        let o = fetch_overhead_bench(1);
        assert!(o.constant_us > 0.0 && o.call_us > 0.0);
    }
}
