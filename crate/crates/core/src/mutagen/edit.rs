//! Tree edits as data, with exact undo.

use crate::lang::visit::block_expr_mut;
use crate::lang::{print_expr, print_stmts_inline, Ast, Block, Expr, FnDecl, NodeId, Stmt};

#[derive(Debug, Clone, PartialEq)]
pub enum Edit {
    /// Replace an expression subtree.
    ReplaceExpr { node: NodeId, with: Expr },
    /// Replace one statement by a sequence spliced into the same block.
    ReplaceStmt { stmt: NodeId, with: Vec<Stmt> },
    /// Insert statements at the start of a function body.
    PrependBody { func: NodeId, stmts: Vec<Stmt> },
}

/// What an applied edit displaced.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Undo {
    Expr {
        node: NodeId,
        old: Expr,
    },
    Stmt {
        anchor: NodeId,
        count: usize,
        old: Stmt,
    },
    Body {
        func: NodeId,
        count: usize,
    },
}

impl Edit {
    /// The node whose location identifies the edit.
    pub fn target(&self) -> NodeId {
        match self {
            Edit::ReplaceExpr { node, .. } => *node,
            Edit::ReplaceStmt { stmt, .. } => *stmt,
            Edit::PrependBody { func, .. } => *func,
        }
    }

    /// Source text of the region before and after the edit.
    pub fn texts(&self, ast: &Ast) -> Option<(String, String)> {
        Some(match self {
            Edit::ReplaceExpr { node, with } => {
                let old = ast.node(*node)?.as_expr()?;
                (print_expr(old), print_expr(with))
            }
            Edit::ReplaceStmt { stmt, with } => {
                let old = ast.node(*stmt)?.as_stmt()?;
                (
                    print_stmts_inline(std::slice::from_ref(old)),
                    print_stmts_inline(with),
                )
            }
            Edit::PrependBody { func, stmts } => {
                let f = ast.functions.iter().find(|f| f.id == *func)?;
                let header = fn_header(f);
                let with = format!("{header} {}", print_stmts_inline(stmts));
                (header, with)
            }
        })
    }

    pub(crate) fn apply(&self, ast: &mut Ast) -> Option<Undo> {
        match self {
            Edit::ReplaceExpr { node, with } => {
                let slot = ast.expr_mut(*node)?;
                let mut with = with.clone();
                with.id = *node;
                with.span = slot.span;
                let old = std::mem::replace(slot, with);
                Some(Undo::Expr { node: *node, old })
            }
            Edit::ReplaceStmt { stmt, with } => {
                if with.is_empty() {
                    return None;
                }
                let (stmts, pos) = ast.stmt_slot_mut(*stmt)?;
                let mut with = with.clone();
                with[0].id = *stmt;
                let old = stmts.splice(pos..=pos, with.iter().cloned()).next()?;
                Some(Undo::Stmt {
                    anchor: *stmt,
                    count: with.len(),
                    old,
                })
            }
            Edit::PrependBody { func, stmts } => {
                let f = ast.fn_by_id_mut(*func)?;
                f.body.stmts.splice(0..0, stmts.iter().cloned());
                Some(Undo::Body {
                    func: *func,
                    count: stmts.len(),
                })
            }
        }
    }

    /// Statements replacing `point` when this edit is applied inside it;
    /// `point` is the statement the edit belongs to.
    pub fn mutated_point(&self, point: &Stmt) -> Vec<Stmt> {
        match self {
            Edit::ReplaceExpr { node, with } => {
                let mut holder = Block::detached(vec![point.clone()]);
                if let Some(slot) = block_expr_mut(&mut holder, *node) {
                    *slot = with.clone();
                }
                holder.stmts
            }
            Edit::ReplaceStmt { with, .. } => with.clone(),
            Edit::PrependBody { stmts, .. } => stmts.clone(),
        }
    }
}

impl Edit {
    /// Statements added by a body prepend; empty for other edits.
    pub fn inserted_stmts(&self) -> Vec<Stmt> {
        match self {
            Edit::PrependBody { stmts, .. } => stmts.clone(),
            _ => Vec::new(),
        }
    }
}

impl Undo {
    pub(crate) fn revert(self, ast: &mut Ast) -> bool {
        match self {
            Undo::Expr { node, old } => match ast.expr_mut(node) {
                Some(slot) => {
                    *slot = old;
                    true
                }
                None => false,
            },
            Undo::Stmt { anchor, count, old } => match ast.stmt_slot_mut(anchor) {
                Some((stmts, pos)) if pos + count <= stmts.len() => {
                    stmts.splice(pos..pos + count, std::iter::once(old));
                    true
                }
                _ => false,
            },
            Undo::Body { func, count } => match ast.fn_by_id_mut(func) {
                Some(f) if f.body.stmts.len() >= count => {
                    f.body.stmts.drain(..count);
                    true
                }
                _ => false,
            },
        }
    }
}

fn fn_header(f: &FnDecl) -> String {
    format!("fn {}({}) {{", f.name, f.params.join(", "))
}
