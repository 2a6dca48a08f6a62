//! Mutation points, mutant ids, seeded draws and the operator iterator.
//!
//! A mutation point is a statement holding at least one eligible site (or a
//! listener function, for LGL). Points are numbered densely across the
//! project in module order then preorder; the k-th mutation at point p gets
//! id `k * stride + p`, so ids of the same point differ by multiples of the
//! stride.

mod edit;
mod iterator;
mod stream;


use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{NodeId, Project};
use crate::operators::{scan_sites, OperatorContext, OperatorKind, DEFAULT_DELAY_STEPS};

pub use edit::Edit;
pub use iterator::OperatorIterator;
pub use stream::{draw_index, EmptyChoices, SeededStream};

pub const DEFAULT_STRIDE: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MutantId(pub i64);

impl MutantId {
    pub const ORIGINAL: MutantId = MutantId(-1);

    /// `(k, p)` of a mutant id under `stride`.
    pub fn decompose(self, stride: u32) -> Option<(u32, usize)> {
        if self.0 < 0 || stride == 0 {
            return None;
        }
        let s = i64::from(stride);
        Some(((self.0 / s) as u32, (self.0 % s) as usize))
    }
}

impl fmt::Display for MutantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("mutation point index {p} does not fit stride {stride}; raise the stride")]
pub struct PointOverflow {
    pub p: usize,
    pub stride: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("operator iterator contract violated: {0}")]
pub struct ContractViolation(pub &'static str);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutagenError {
    #[error(transparent)]
    PointOverflow(#[from] PointOverflow),
    #[error(transparent)]
    EmptyChoices(#[from] EmptyChoices),
    #[error(transparent)]
    ContractViolation(#[from] ContractViolation),
}

pub fn assign_muid(k: u32, p: usize, stride: u32) -> Result<MutantId, PointOverflow> {
    if p >= stride as usize {
        return Err(PointOverflow { p, stride });
    }
    Ok(MutantId(i64::from(k) * i64::from(stride) + p as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MutationPoint {
    pub module_index: usize,
    /// Statement (or function, for LGL) holding the mutated site.
    pub node_id: NodeId,
    /// Dense project-wide point index.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutationRecord {
    pub muid: MutantId,
    pub operator: OperatorKind,
    pub point: MutationPoint,
    pub ordinal: u32,
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub original: String,
    pub replacement: String,
    pub args: BTreeMap<String, String>,
    pub edit: Edit,
}

/// One entry of `MutationInfo.json`; field order is the file's key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationInfo {
    pub muid: i64,
    pub operator: OperatorKind,
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub original: String,
    pub replacement: String,
    pub args: BTreeMap<String, String>,
}

impl From<&MutationRecord> for MutationInfo {
    fn from(r: &MutationRecord) -> Self {
        Self {
            muid: r.muid.0,
            operator: r.operator,
            file: r.file.clone(),
            line: r.line,
            column: r.column,
            original: r.original.clone(),
            replacement: r.replacement.clone(),
            args: r.args.clone(),
        }
    }
}

/// Pretty-printed `MutationInfo.json` contents with a trailing newline.
pub fn mutation_info_json(records: &[MutationRecord]) -> String {
    let entries: Vec<MutationInfo> = records.iter().map(MutationInfo::from).collect();
    let mut text = serde_json::to_string_pretty(&entries).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn parse_mutation_info(text: &str) -> Result<Vec<MutationInfo>, serde_json::Error> {
    serde_json::from_str(text)
}

/// Settings shared by both generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationOptions {
    /// Operators in configuration order; this order breaks ties between
    /// operators at the same site.
    pub operators: Vec<OperatorKind>,
    pub seed: u64,
    pub stride: u32,
    pub delay_steps: i64,
    /// Module paths that are copied verbatim and never mutated.
    pub exclude: BTreeSet<String>,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        Self {
            operators: OperatorKind::ALL.to_vec(),
            seed: 0,
            stride: DEFAULT_STRIDE,
            delay_steps: DEFAULT_DELAY_STEPS,
            exclude: BTreeSet::new(),
        }
    }
}

impl GenerationOptions {
    pub fn context(&self, project: &Project) -> OperatorContext {
        OperatorContext::scan(&project.asts, self.delay_steps)
    }

    pub fn is_excluded(&self, path: &str) -> bool {
        self.exclude.contains(path)
    }
}

/// A mutation point with the sites it holds, in mutation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointPlan {
    pub point: MutationPoint,
    pub sites: Vec<(NodeId, OperatorKind)>,
}

/// Mutation points of a (normalized) project in id order.
pub fn enumerate_points(
    project: &Project,
    options: &GenerationOptions,
    ctx: &OperatorContext,
) -> Result<Vec<PointPlan>, PointOverflow> {
    let mut plans: Vec<PointPlan> = Vec::new();
    for (mi, (module, ast)) in project.modules.iter().zip(&project.asts).enumerate() {
        if options.is_excluded(&module.path) {
            continue;
        }
        for site in scan_sites(ast, &options.operators, ctx) {
            match plans.last_mut() {
                Some(plan) if plan.point.module_index == mi && plan.point.node_id == site.point => {
                    plan.sites.push((site.node, site.kind));
                }
                _ => {
                    let index = plans.len();
                    if index >= options.stride as usize {
                        return Err(PointOverflow {
                            p: index,
                            stride: options.stride,
                        });
                    }
                    plans.push(PointPlan {
                        point: MutationPoint {
                            module_index: mi,
                            node_id: site.point,
                            index,
                        },
                        sites: vec![(site.node, site.kind)],
                    });
                }
            }
        }
    }
    Ok(plans)
}

/// All mutation records of a normalized project, point by point and by
/// ordinal within each point.
pub fn generate_records(
    project: &Project,
    options: &GenerationOptions,
) -> Result<Vec<MutationRecord>, MutagenError> {
    let ctx = options.context(project);
    let plans = enumerate_points(project, options, &ctx)?;
    let mut iterators: BTreeMap<OperatorKind, OperatorIterator<'_>> = options
        .operators
        .iter()
        .map(|&k| {
            (
                k,
                OperatorIterator::new(k, &ctx, options.seed, options.stride),
            )
        })
        .collect();
    let mut asts = project.asts.clone();
    let mut records = Vec::new();
    for plan in &plans {
        let mi = plan.point.module_index;
        let module = &project.modules[mi];
        let mut next = 0u32;
        for &(site, kind) in &plan.sites {
            let it = iterators
                .get_mut(&kind)
                .expect("iterator per configured operator");
            it.add_point(
                &asts[mi],
                &module.text,
                &module.path,
                plan.point,
                site,
                next,
            )?;
            while it.has_mutations() {
                let record = it.mutate(&mut asts[mi])?;
                it.restore(&mut asts[mi])?;
                next = record.ordinal + 1;
                records.push(record);
            }
        }
    }
    debug_assert!(asts == project.asts, "every mutation was restored");
    Ok(records)
}
