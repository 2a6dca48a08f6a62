//! Catalog of the fourteen mutation operators.
//!
//! Each operator is an eligibility predicate over Mini-App constructs plus a
//! replacement rule. Sites inside `test_*` functions are never eligible.
//!
//! | Operator | Site | Replacement |
//! |---|---|---|
//! | BMA | binary `+ - * / %` | each of the other four operators |
//! | BGL | `onClick(w, f)` | `onClick(w, "__noop")`; an empty `__noop` function is added to the program |
//! | FVBIRN | assignment whose value is `findViewById(e)` | value `null` |
//! | IPLR | `putExtra(i, k, v)`, `v` not null | `v` becomes `0`, `false` or `""` by the literal type of `v` (`""` when not a literal) |
//! | ITR | `newIntentTo("f")` when the project targets at least two functions | another target, drawn from the seeded stream |
//! | IIFV | `findViewById("id")` | `findViewById("__invalid_id__")` |
//! | IKI | `getExtra(i, "k")` | `getExtra(i, "__invalid_key__")` (the read side, not `putExtra`) |
//! | IVF | statement `requestFocus(w);` | `clearFocus(w);` |
//! | LGC | statement `createWidget(id);` | `sleep(DELAY); createWidget(id);` |
//! | LGL | function registered through `onClick` | `sleep(DELAY);` prepended to its body |
//! | NI | assignment whose value is `newIntent(..)`/`newIntentTo(..)` | value `null` |
//! | NVIPE | `putExtra(i, k, v)`, `v` not null | `v` becomes `null` |
//! | RAID | assignment whose value is `newIntent(..)`/`newIntentTo(..)` | `newIntent(X)`, `X` drawn from [`ACTION_LIST`] minus the current action |
//! | VCNV | statement `createWidget(id);` | `createWidget(id); setVisible(findViewById(id), false);` |
//!
//! `DELAY` is a step count (default [`DEFAULT_DELAY_STEPS`]), so lengthy
//! mutants die through the step budget rather than wall-clock time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::visit::{for_each_own_expr, walk_expr, walk_preorder};
use crate::lang::{Ast, BinaryOp, Block, Expr, ExprKind, FnDecl, NodeId, NodeRef, Stmt, StmtKind};
use crate::mutagen::{Edit, EmptyChoices, SeededStream};

/// Intent actions known to the toy framework, in draw order.
pub const ACTION_LIST: [&str; 5] = ["SEND", "VIEW", "EDIT", "DIAL", "MAIN"];
/// Name of the do-nothing listener installed by BGL.
pub const NOOP_LISTENER: &str = "__noop";
pub const INVALID_ID: &str = "__invalid_id__";
pub const INVALID_KEY: &str = "__invalid_key__";
pub const DEFAULT_DELAY_STEPS: i64 = 10_000;

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    BMA,
    BGL,
    FVBIRN,
    IPLR,
    ITR,
    IIFV,
    IKI,
    IVF,
    LGC,
    LGL,
    NI,
    NVIPE,
    RAID,
    VCNV,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown mutation operator `{0}`")]
pub struct UnknownOperator(pub String);

impl OperatorKind {
    pub const ALL: [OperatorKind; 14] = [
        OperatorKind::BMA,
        OperatorKind::BGL,
        OperatorKind::FVBIRN,
        OperatorKind::IPLR,
        OperatorKind::ITR,
        OperatorKind::IIFV,
        OperatorKind::IKI,
        OperatorKind::IVF,
        OperatorKind::LGC,
        OperatorKind::LGL,
        OperatorKind::NI,
        OperatorKind::NVIPE,
        OperatorKind::RAID,
        OperatorKind::VCNV,
    ];

    pub fn acronym(self) -> &'static str {
        match self {
            OperatorKind::BMA => "BMA",
            OperatorKind::BGL => "BGL",
            OperatorKind::FVBIRN => "FVBIRN",
            OperatorKind::IPLR => "IPLR",
            OperatorKind::ITR => "ITR",
            OperatorKind::IIFV => "IIFV",
            OperatorKind::IKI => "IKI",
            OperatorKind::IVF => "IVF",
            OperatorKind::LGC => "LGC",
            OperatorKind::LGL => "LGL",
            OperatorKind::NI => "NI",
            OperatorKind::NVIPE => "NVIPE",
            OperatorKind::RAID => "RAID",
            OperatorKind::VCNV => "VCNV",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            OperatorKind::BMA => "BinaryArithmetic",
            OperatorKind::BGL => "BuggyGUIListener",
            OperatorKind::FVBIRN => "FindViewByIdReturnsNull",
            OperatorKind::IPLR => "IntentPayloadReplacement",
            OperatorKind::ITR => "IntentTargetReplacement",
            OperatorKind::IIFV => "InvalidIDFindView",
            OperatorKind::IKI => "InvalidKeyIntent",
            OperatorKind::IVF => "InvalidViewFocus",
            OperatorKind::LGC => "LengthyGUICreation",
            OperatorKind::LGL => "LengthyGUIListener",
            OperatorKind::NI => "NullIntent",
            OperatorKind::NVIPE => "NullValueIntentPutExtra",
            OperatorKind::RAID => "RandomActionIntentDefinition",
            OperatorKind::VCNV => "ViewComponentNotVisible",
        }
    }

    /// Comment label of a dispatch arm, e.g. `0_NullIntentOperatorMutator`.
    pub fn arm_label(self, ordinal: u32) -> String {
        format!("{ordinal}_{}OperatorMutator", self.long_name())
    }

    pub fn parse_list<S: AsRef<str>>(names: &[S]) -> Result<Vec<Self>, UnknownOperator> {
        names.iter().map(|n| n.as_ref().parse()).collect()
    }
}

impl FromStr for OperatorKind {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.acronym() == s)
            .ok_or_else(|| UnknownOperator(s.to_string()))
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.acronym())
    }
}

/// Project-wide facts that some operators need.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorContext {
    pub delay_steps: i64,
    /// Distinct literal targets of `newIntentTo`, sorted.
    pub intent_targets: Vec<String>,
    /// Functions registered as listeners through a literal `onClick` name.
    pub listeners: BTreeSet<String>,
}

impl OperatorContext {
    pub fn scan<'a>(asts: impl IntoIterator<Item = &'a Ast>, delay_steps: i64) -> Self {
        let mut targets = BTreeSet::new();
        let mut listeners = BTreeSet::new();
        for ast in asts {
            walk_preorder(ast, &mut |n| {
                let NodeRef::Expr(e) = n else { return };
                if let Some([t]) = e.as_call_to("newIntentTo") {
                    if let Some(name) = t.as_str_lit() {
                        targets.insert(name.to_string());
                    }
                }
                if let Some([_, l]) = e.as_call_to("onClick") {
                    if let Some(name) = l.as_str_lit() {
                        if name != NOOP_LISTENER {
                            listeners.insert(name.to_string());
                        }
                    }
                }
            });
        }
        Self {
            delay_steps,
            intent_targets: targets.into_iter().collect(),
            listeners,
        }
    }
}

/// One eligible node for one operator, with the point it belongs to: the
/// innermost enclosing statement, or the function itself for LGL.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub node: NodeId,
    pub point: NodeId,
    pub kind: OperatorKind,
}

/// Eligible sites of `ast` for the given operators, ordered by point, then
/// site node, then the operators' order in `operators`.
pub fn scan_sites(ast: &Ast, operators: &[OperatorKind], ctx: &OperatorContext) -> Vec<Site> {
    let mut out = Vec::new();
    for func in &ast.functions {
        if !is_mutable_fn(func) {
            continue;
        }
        if operators.contains(&OperatorKind::LGL) && ctx.listeners.contains(&func.name) {
            out.push(Site {
                node: func.id,
                point: func.id,
                kind: OperatorKind::LGL,
            });
        }
        scan_block(&func.body, operators, ctx, &mut out);
    }
    let rank = |k: OperatorKind| operators.iter().position(|o| *o == k);
    out.sort_by_key(|s| (s.point, s.node, rank(s.kind)));
    out
}

/// Test functions and the injected listener are never mutated.
pub fn is_mutable_fn(func: &FnDecl) -> bool {
    !func.is_test() && func.name != NOOP_LISTENER
}

fn scan_block(
    block: &Block,
    operators: &[OperatorKind],
    ctx: &OperatorContext,
    out: &mut Vec<Site>,
) {
    for stmt in &block.stmts {
        for &kind in operators {
            if stmt_site(kind, stmt) {
                out.push(Site {
                    node: stmt.id,
                    point: stmt.id,
                    kind,
                });
            }
        }
        for_each_own_expr(stmt, &mut |e| {
            walk_expr(e, &mut |n| {
                let NodeRef::Expr(x) = n else { return };
                for &kind in operators {
                    if expr_site(kind, x, ctx) {
                        out.push(Site {
                            node: x.id,
                            point: stmt.id,
                            kind,
                        });
                    }
                }
            });
        });
        match &stmt.kind {
            StmtKind::If {
                then_block,
                else_block,
                ..
            } => {
                scan_block(then_block, operators, ctx, out);
                if let Some(b) = else_block {
                    scan_block(b, operators, ctx, out);
                }
            }
            StmtKind::While { body, .. } => scan_block(body, operators, ctx, out),
            StmtKind::Dispatch { arms, default, .. } => {
                for arm in arms {
                    scan_block(&arm.body, operators, ctx, out);
                }
                scan_block(default, operators, ctx, out);
            }
            _ => {}
        }
    }
}

/// Value assigned by an assignment or initialized declaration.
fn assigned_value(stmt: &Stmt) -> Option<&Expr> {
    match &stmt.kind {
        StmtKind::Assign { value, .. } => Some(value),
        StmtKind::Var { init: Some(e), .. } => Some(e),
        _ => None,
    }
}

fn is_intent_constructor(e: &Expr) -> bool {
    e.as_call_to("newIntent").is_some() || e.as_call_to("newIntentTo").is_some()
}

fn statement_call<'a>(stmt: &'a Stmt, name: &str) -> Option<&'a [Expr]> {
    match &stmt.kind {
        StmtKind::Expr(e) => e.as_call_to(name),
        _ => None,
    }
}

fn stmt_site(kind: OperatorKind, stmt: &Stmt) -> bool {
    match kind {
        OperatorKind::NI | OperatorKind::RAID => {
            assigned_value(stmt).is_some_and(is_intent_constructor)
        }
        OperatorKind::FVBIRN => {
            assigned_value(stmt).is_some_and(|v| v.as_call_to("findViewById").is_some())
        }
        OperatorKind::IVF => statement_call(stmt, "requestFocus").is_some_and(|a| a.len() == 1),
        OperatorKind::LGC | OperatorKind::VCNV => {
            statement_call(stmt, "createWidget").is_some_and(|a| a.len() == 1)
        }
        _ => false,
    }
}

fn expr_site(kind: OperatorKind, e: &Expr, ctx: &OperatorContext) -> bool {
    match kind {
        OperatorKind::BMA => matches!(&e.kind, ExprKind::Binary { op, .. } if op.is_arithmetic()),
        OperatorKind::BGL => matches!(
            e.as_call_to("onClick"),
            Some([_, l]) if l.as_str_lit() != Some(NOOP_LISTENER)
        ),
        OperatorKind::IPLR => match e.as_call_to("putExtra") {
            Some([_, _, v]) => payload_default(v).is_some_and(|d| d.kind != v.kind),
            _ => false,
        },
        OperatorKind::NVIPE => {
            matches!(e.as_call_to("putExtra"), Some([_, _, v]) if !matches!(v.kind, ExprKind::Null))
        }
        OperatorKind::ITR => {
            ctx.intent_targets.len() >= 2
                && matches!(e.as_call_to("newIntentTo"), Some([t]) if t.as_str_lit().is_some())
        }
        OperatorKind::IIFV => matches!(
            e.as_call_to("findViewById"),
            Some([id]) if id.as_str_lit().is_some_and(|s| s != INVALID_ID)
        ),
        OperatorKind::IKI => matches!(
            e.as_call_to("getExtra"),
            Some([_, k]) if k.as_str_lit().is_some_and(|s| s != INVALID_KEY)
        ),
        _ => false,
    }
}

/// Default payload replacing `v`, chosen from the syntax of `v`; `None` for
/// a null payload.
fn payload_default(v: &Expr) -> Option<Expr> {
    Some(match v.kind {
        ExprKind::Null => return None,
        ExprKind::Int(_) => Expr::int_lit(0),
        ExprKind::Bool(_) => Expr::detached(ExprKind::Bool(false)),
        _ => Expr::str_lit(""),
    })
}

/// One replacement proposed at a site, before ids are assigned.
#[derive(Debug, Clone, PartialEq)]
pub struct Mutation {
    pub edit: Edit,
    pub args: BTreeMap<String, String>,
}

impl Mutation {
    fn plain(edit: Edit) -> Self {
        Self {
            edit,
            args: BTreeMap::new(),
        }
    }

    fn with_arg(edit: Edit, key: &str, value: &str) -> Self {
        Self {
            edit,
            args: BTreeMap::from([(key.to_string(), value.to_string())]),
        }
    }
}

fn sleep_stmt(steps: i64) -> Stmt {
    Stmt::detached(StmtKind::Expr(Expr::call(
        "sleep",
        vec![Expr::int_lit(steps)],
    )))
}

fn replace_call_args(e: &Expr, f: impl FnOnce(&mut Vec<Expr>)) -> Expr {
    let mut copy = e.clone();
    if let ExprKind::Call { args, .. } = &mut copy.kind {
        f(args);
    }
    copy
}

/// Mutations of `kind` at `site`, drawing from `stream` where the operator
/// is randomized. Returns an empty list when the site does not match.
pub fn mutations_at(
    kind: OperatorKind,
    ast: &Ast,
    site: NodeId,
    ctx: &OperatorContext,
    stream: &mut SeededStream,
) -> Result<Vec<Mutation>, EmptyChoices> {
    let Some(node) = ast.node(site) else {
        return Ok(Vec::new());
    };
    let replace = |with: Expr| Edit::ReplaceExpr { node: site, with };
    Ok(match (kind, node) {
        (OperatorKind::LGL, NodeRef::Fn(func)) if ctx.listeners.contains(&func.name) => {
            vec![Mutation::plain(Edit::PrependBody {
                func: site,
                stmts: vec![sleep_stmt(ctx.delay_steps)],
            })]
        }
        (OperatorKind::NI | OperatorKind::FVBIRN | OperatorKind::RAID, NodeRef::Stmt(stmt))
            if stmt_site(kind, stmt) =>
        {
            let value = assigned_value(stmt).expect("checked by stmt_site");
            let edit = |with| Edit::ReplaceExpr {
                node: value.id,
                with,
            };
            if kind == OperatorKind::RAID {
                let current = value
                    .as_call_to("newIntent")
                    .and_then(|a| a.first())
                    .and_then(Expr::as_str_lit);
                let choices: Vec<&str> = ACTION_LIST
                    .into_iter()
                    .filter(|a| Some(*a) != current)
                    .collect();
                let action = stream.draw(&choices)?;
                vec![Mutation::with_arg(
                    edit(Expr::call("newIntent", vec![Expr::str_lit(action)])),
                    "action",
                    action,
                )]
            } else {
                vec![Mutation::plain(edit(Expr::null()))]
            }
        }
        (OperatorKind::IVF, NodeRef::Stmt(stmt)) if stmt_site(kind, stmt) => {
            let StmtKind::Expr(call) = &stmt.kind else {
                unreachable!("checked by stmt_site")
            };
            let args = call.as_call_to("requestFocus").expect("checked").to_vec();
            vec![Mutation::plain(Edit::ReplaceExpr {
                node: call.id,
                with: Expr::call("clearFocus", args),
            })]
        }
        (OperatorKind::LGC, NodeRef::Stmt(stmt)) if stmt_site(kind, stmt) => {
            vec![Mutation::plain(Edit::ReplaceStmt {
                stmt: site,
                with: vec![sleep_stmt(ctx.delay_steps), stmt.clone()],
            })]
        }
        (OperatorKind::VCNV, NodeRef::Stmt(stmt)) if stmt_site(kind, stmt) => {
            let id = statement_call(stmt, "createWidget").expect("checked")[0].clone();
            let hide = Expr::call(
                "setVisible",
                vec![
                    Expr::call("findViewById", vec![id]),
                    Expr::detached(ExprKind::Bool(false)),
                ],
            );
            vec![Mutation::plain(Edit::ReplaceStmt {
                stmt: site,
                with: vec![stmt.clone(), Stmt::detached(StmtKind::Expr(hide))],
            })]
        }
        (_, NodeRef::Expr(e)) if expr_site(kind, e, ctx) => match kind {
            OperatorKind::BMA => {
                let ExprKind::Binary { op, lhs, rhs } = &e.kind else {
                    unreachable!("checked by expr_site")
                };
                BinaryOp::ARITHMETIC
                    .into_iter()
                    .filter(|alt| alt != op)
                    .map(|alt| {
                        let with = Expr::detached(ExprKind::Binary {
                            op: alt,
                            lhs: lhs.clone(),
                            rhs: rhs.clone(),
                        });
                        Mutation::with_arg(replace(with), "op", alt.symbol())
                    })
                    .collect()
            }
            OperatorKind::BGL => vec![Mutation::plain(replace(replace_call_args(e, |a| {
                a[1] = Expr::str_lit(NOOP_LISTENER)
            })))],
            OperatorKind::IPLR => {
                let v = &e.as_call_to("putExtra").expect("checked")[2];
                let d = payload_default(v).expect("checked");
                vec![Mutation::plain(replace(replace_call_args(e, |a| a[2] = d)))]
            }
            OperatorKind::NVIPE => vec![Mutation::plain(replace(replace_call_args(e, |a| {
                a[2] = Expr::null()
            })))],
            OperatorKind::ITR => {
                let current = e.as_call_to("newIntentTo").expect("checked")[0]
                    .as_str_lit()
                    .expect("checked");
                let others: Vec<&str> = ctx
                    .intent_targets
                    .iter()
                    .map(String::as_str)
                    .filter(|t| *t != current)
                    .collect();
                let target = stream.draw(&others)?;
                vec![Mutation::with_arg(
                    replace(Expr::call("newIntentTo", vec![Expr::str_lit(target)])),
                    "target",
                    target,
                )]
            }
            OperatorKind::IIFV => vec![Mutation::plain(replace(Expr::call(
                "findViewById",
                vec![Expr::str_lit(INVALID_ID)],
            )))],
            OperatorKind::IKI => vec![Mutation::plain(replace(replace_call_args(e, |a| {
                a[1] = Expr::str_lit(INVALID_KEY)
            })))],
            _ => Vec::new(),
        },
        _ => Vec::new(),
    })
}

#[cfg(test)]
mod tests;
