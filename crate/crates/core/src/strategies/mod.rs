//! Mutant deployment: one project tree per mutant (traditional) or every
//! mutant woven into one tree behind `dispatch (MUID_STATIC)` statements
//! (schemata).
//!
//! Both strategies start from the same normalized project, in which each
//! declaration whose initializer holds a mutation site is split into
//! `var x;` and `x = init;`, so that the assignment can be wrapped in a
//! dispatch without hiding the declaration from later statements.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::lang::visit::walk_preorder;
use crate::lang::{
    unparse, Ast, Block, DispatchArm, FnDecl, NodeId, NodeRef, Project, ProjectError, SourceModule,
    Span, Stmt, StmtKind,
};
use crate::mutagen::{
    generate_records, mutation_info_json, GenerationOptions, MutagenError, MutantId, MutationRecord,
};
use crate::operators::{scan_sites, OperatorKind, NOOP_LISTENER};
use crate::runtime::MUID_CONSTANT;

#[cfg(test)]
mod tests;

pub const MUTATION_INFO_FILE: &str = "MutationInfo.json";
pub const SCHEMATA_DIR: &str = "schemata";
pub const TRADITIONAL_DIR: &str = "traditional";

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error(transparent)]
    Mutagen(#[from] MutagenError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> GenerateError + '_ {
    move |source| GenerateError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Splits declarations whose initializer holds a mutation site. Excluded
/// modules keep their text verbatim; the others are re-printed canonically
/// so spans refer to the text that gets written out.
pub fn normalize(project: &Project, options: &GenerationOptions) -> Result<Project, ProjectError> {
    let ctx = options.context(project);
    let mut modules = Vec::with_capacity(project.modules.len());
    for (module, ast) in project.modules.iter().zip(&project.asts) {
        if options.is_excluded(&module.path) {
            modules.push(module.clone());
            continue;
        }
        let split: BTreeSet<NodeId> = scan_sites(ast, &options.operators, &ctx)
            .into_iter()
            .map(|s| s.point)
            .collect();
        let mut ast = ast.clone();
        for func in &mut ast.functions {
            split_decls(&mut func.body, &split);
        }
        modules.push(SourceModule::new(module.path.clone(), unparse(&ast)));
    }
    Project::from_modules(modules)
}

fn split_decls(block: &mut Block, split: &BTreeSet<NodeId>) {
    let mut out = Vec::with_capacity(block.stmts.len());
    for mut stmt in std::mem::take(&mut block.stmts) {
        match &mut stmt.kind {
            StmtKind::Var { name, init } if init.is_some() && split.contains(&stmt.id) => {
                let value = init.take().expect("checked");
                let assign = Stmt::detached(StmtKind::Assign {
                    name: name.clone(),
                    value,
                });
                out.push(stmt);
                out.push(assign);
                continue;
            }
            StmtKind::If {
                then_block,
                else_block,
                ..
            } => {
                split_decls(then_block, split);
                if let Some(b) = else_block {
                    split_decls(b, split);
                }
            }
            StmtKind::While { body, .. } => split_decls(body, split),
            _ => {}
        }
        out.push(stmt);
    }
    block.stmts = out;
}

/// Normalizes `project` and generates its mutation records.
pub fn prepare(
    project: &Project,
    options: &GenerationOptions,
) -> Result<(Project, Vec<MutationRecord>), GenerateError> {
    let normalized = normalize(project, options)?;
    let records = generate_records(&normalized, options)?;
    Ok((normalized, records))
}

fn noop_fn() -> FnDecl {
    FnDecl {
        id: NodeId::DETACHED,
        span: Span::default(),
        name: NOOP_LISTENER.to_string(),
        params: Vec::new(),
        body: Block::detached(Vec::new()),
    }
}

fn defines_noop(project: &Project) -> bool {
    project
        .asts
        .iter()
        .any(|a| a.find_fn(NOOP_LISTENER).is_some())
}

/// Module texts of the tree for one mutant.
pub fn traditional_tree(project: &Project, record: &MutationRecord) -> Vec<SourceModule> {
    let mi = record.point.module_index;
    let mut modules = project.modules.clone();
    let mut ast = project.asts[mi].clone();
    record
        .edit
        .apply(&mut ast)
        .expect("record was generated from this project");
    if record.operator == OperatorKind::BGL && !defines_noop(project) {
        ast.functions.push(noop_fn());
    }
    modules[mi].text = unparse(&ast);
    modules
}

/// Per-mutant project trees on disk, one directory per muid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaterializedProjectSet {
    pub base_dir: PathBuf,
    /// Muids with a tree, in record order.
    pub muids: Vec<MutantId>,
}

impl MaterializedProjectSet {
    pub fn tree_dir(&self, muid: MutantId) -> PathBuf {
        self.base_dir.join(muid.to_string())
    }
}

/// Writes one tree per record under `base_dir`, plus the normalized
/// original under `base_dir/-1`.
pub fn materialize_traditional(
    project: &Project,
    records: &[MutationRecord],
    base_dir: &Path,
) -> Result<MaterializedProjectSet, GenerateError> {
    reset_dir(base_dir)?;
    write_tree(
        &base_dir.join(MutantId::ORIGINAL.to_string()),
        &project.modules,
    )?;
    for record in records {
        let dir = base_dir.join(record.muid.to_string());
        write_tree(&dir, &traditional_tree(project, record))?;
    }
    Ok(MaterializedProjectSet {
        base_dir: base_dir.to_path_buf(),
        muids: records.iter().map(|r| r.muid).collect(),
    })
}

/// All mutants in one project.
#[derive(Debug, Clone, PartialEq)]
pub struct WovenProject {
    pub modules: Vec<SourceModule>,
    /// Mutant id to (module index, id of its dispatch arm block) in the
    /// woven modules.
    pub dispatch_index: BTreeMap<MutantId, (usize, NodeId)>,
}

impl WovenProject {
    pub fn project(&self) -> Result<Project, ProjectError> {
        Project::from_modules(self.modules.clone())
    }
}

fn dispatch(arms: Vec<DispatchArm>, default: Vec<Stmt>) -> Stmt {
    Stmt::detached(StmtKind::Dispatch {
        selector: MUID_CONSTANT.to_string(),
        arms,
        default: Block::detached(default),
    })
}

fn arm(record: &MutationRecord, body: Vec<Stmt>) -> DispatchArm {
    DispatchArm {
        case: record.muid.0,
        label: Some(record.operator.arm_label(record.ordinal)),
        body: Block::detached(body),
    }
}

/// Weaves every record into the normalized project.
pub fn weave_schemata(
    project: &Project,
    records: &[MutationRecord],
) -> Result<WovenProject, ProjectError> {
    let mut by_point: BTreeMap<(usize, NodeId), Vec<&MutationRecord>> = BTreeMap::new();
    for r in records {
        by_point
            .entry((r.point.module_index, r.point.node_id))
            .or_default()
            .push(r);
    }
    let noop_module = records
        .iter()
        .filter(|r| r.operator == OperatorKind::BGL)
        .map(|r| r.point.module_index)
        .min()
        .filter(|_| !defines_noop(project));
    let mut modules = project.modules.clone();
    for (mi, original) in project.asts.iter().enumerate() {
        let points: Vec<_> = by_point
            .range((mi, NodeId(0))..=(mi, NodeId::DETACHED))
            .collect();
        if points.is_empty() && noop_module != Some(mi) {
            continue;
        }
        let mut woven = original.clone();
        // Innermost points first, so an enclosing point's default arm holds
        // the already woven statement while its mutant arms hold the
        // original one.
        for (&(_, node), recs) in points.into_iter().rev() {
            match original.node(node) {
                Some(NodeRef::Fn(_)) => {
                    let arms = recs
                        .iter()
                        .map(|r| arm(r, r.edit.inserted_stmts()))
                        .collect();
                    let func = woven.fn_by_id_mut(node).expect("point exists");
                    func.body.stmts.insert(0, dispatch(arms, Vec::new()));
                }
                Some(NodeRef::Stmt(stmt)) => {
                    let arms = recs
                        .iter()
                        .map(|r| arm(r, r.edit.mutated_point(stmt)))
                        .collect();
                    let (stmts, pos) = woven.stmt_slot_mut(node).expect("point exists");
                    let current = stmts[pos].clone();
                    stmts[pos] = dispatch(arms, vec![current]);
                }
                _ => unreachable!("mutation points are statements or functions"),
            }
        }
        if noop_module == Some(mi) {
            woven.functions.push(noop_fn());
        }
        modules[mi].text = unparse(&woven);
    }
    let woven = Project::from_modules(modules)?;
    let mut dispatch_index = BTreeMap::new();
    for (mi, ast) in woven.asts.iter().enumerate() {
        dispatch_index.extend(
            dispatch_arms(ast)
                .into_iter()
                .map(|(c, id)| (MutantId(c), (mi, id))),
        );
    }
    Ok(WovenProject {
        modules: woven.modules,
        dispatch_index,
    })
}

/// `(case, arm block id)` of every dispatch arm in `ast`.
pub fn dispatch_arms(ast: &Ast) -> Vec<(i64, NodeId)> {
    let mut out = Vec::new();
    walk_preorder(ast, &mut |n| {
        if let NodeRef::Stmt(Stmt {
            kind: StmtKind::Dispatch { arms, .. },
            ..
        }) = n
        {
            out.extend(arms.iter().map(|a| (a.case, a.body.id)));
        }
    });
    out
}

/// Replaces `dir` with an empty directory.
pub(crate) fn reset_dir(dir: &Path) -> Result<(), GenerateError> {
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn write_tree(dir: &Path, modules: &[SourceModule]) -> Result<(), GenerateError> {
    for m in modules {
        let path = dir.join(&m.path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        fs::write(&path, &m.text).map_err(io_err(&path))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Schemata,
    Traditional,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Schemata => "schemata",
            StrategyKind::Traditional => "traditional",
        }
    }

    pub fn dir(self, out_dir: &Path) -> PathBuf {
        out_dir.join(self.name())
    }
}

/// Result of one generator run.
#[derive(Debug, Clone)]
pub struct GeneratorOutput {
    pub strategy: StrategyKind,
    pub records: Vec<MutationRecord>,
    /// Wall time of normalization, generation and writing.
    pub seconds: f64,
    pub mutation_info: String,
}

/// Runs one generator end to end and writes its tree(s) and its copy of
/// `MutationInfo.json` under `out_dir/<strategy>`.
pub fn run_generator(
    strategy: StrategyKind,
    project: &Project,
    options: &GenerationOptions,
    out_dir: &Path,
) -> Result<GeneratorOutput, GenerateError> {
    let start = Instant::now();
    let (normalized, records) = prepare(project, options)?;
    let dir = strategy.dir(out_dir);
    match strategy {
        StrategyKind::Schemata => {
            let woven = weave_schemata(&normalized, &records)?;
            reset_dir(&dir)?;
            write_tree(&dir, &woven.modules)?;
        }
        StrategyKind::Traditional => {
            materialize_traditional(&normalized, &records, &dir)?;
        }
    }
    let mutation_info = mutation_info_json(&records);
    let info_path = dir.join(MUTATION_INFO_FILE);
    fs::write(&info_path, &mutation_info).map_err(io_err(&info_path))?;
    Ok(GeneratorOutput {
        strategy,
        records,
        seconds: start.elapsed().as_secs_f64(),
        mutation_info,
    })
}
