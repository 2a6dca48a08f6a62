//! Preorder traversals, renumbering, and node lookup by id.

use super::ast::*;

/// Visits every node in preorder: a node before its children, children in
/// source order.
pub fn walk_preorder<'a>(ast: &'a Ast, f: &mut impl FnMut(NodeRef<'a>)) {
    f(NodeRef::Program(ast));
    for func in &ast.functions {
        walk_fn(func, f);
    }
}

pub fn walk_fn<'a>(func: &'a FnDecl, f: &mut impl FnMut(NodeRef<'a>)) {
    f(NodeRef::Fn(func));
    walk_block(&func.body, f);
}

pub fn walk_block<'a>(block: &'a Block, f: &mut impl FnMut(NodeRef<'a>)) {
    f(NodeRef::Block(block));
    for stmt in &block.stmts {
        walk_stmt(stmt, f);
    }
}

pub fn walk_stmt<'a>(stmt: &'a Stmt, f: &mut impl FnMut(NodeRef<'a>)) {
    f(NodeRef::Stmt(stmt));
    match &stmt.kind {
        StmtKind::Var { init, .. } => {
            if let Some(e) = init {
                walk_expr(e, f);
            }
        }
        StmtKind::Assign { value, .. } => walk_expr(value, f),
        StmtKind::If {
            cond,
            then_block,
            else_block,
        } => {
            walk_expr(cond, f);
            walk_block(then_block, f);
            if let Some(b) = else_block {
                walk_block(b, f);
            }
        }
        StmtKind::While { cond, body } => {
            walk_expr(cond, f);
            walk_block(body, f);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                walk_expr(e, f);
            }
        }
        StmtKind::Expr(e) => walk_expr(e, f),
        StmtKind::Dispatch { arms, default, .. } => {
            for arm in arms {
                walk_block(&arm.body, f);
            }
            walk_block(default, f);
        }
    }
}

pub fn walk_expr<'a>(expr: &'a Expr, f: &mut impl FnMut(NodeRef<'a>)) {
    f(NodeRef::Expr(expr));
    match &expr.kind {
        ExprKind::Unary { operand, .. } => walk_expr(operand, f),
        ExprKind::Binary { lhs, rhs, .. } => {
            walk_expr(lhs, f);
            walk_expr(rhs, f);
        }
        ExprKind::Call { args, .. } => {
            for a in args {
                walk_expr(a, f);
            }
        }
        ExprKind::Int(_)
        | ExprKind::Str(_)
        | ExprKind::Bool(_)
        | ExprKind::Null
        | ExprKind::Ident(_) => {}
    }
}

/// Applies `f` to the id and span of every node, in the same preorder as
/// [`walk_preorder`].
pub fn for_each_meta_mut(ast: &mut Ast, f: &mut impl FnMut(&mut NodeId, &mut Span)) {
    f(&mut ast.id, &mut ast.span);
    for func in &mut ast.functions {
        f(&mut func.id, &mut func.span);
        block_meta_mut(&mut func.body, f);
    }
}

fn block_meta_mut(block: &mut Block, f: &mut impl FnMut(&mut NodeId, &mut Span)) {
    f(&mut block.id, &mut block.span);
    for stmt in &mut block.stmts {
        stmt_meta_mut(stmt, f);
    }
}

fn stmt_meta_mut(stmt: &mut Stmt, f: &mut impl FnMut(&mut NodeId, &mut Span)) {
    f(&mut stmt.id, &mut stmt.span);
    match &mut stmt.kind {
        StmtKind::Var { init, .. } => {
            if let Some(e) = init {
                expr_meta_mut(e, f);
            }
        }
        StmtKind::Assign { value, .. } => expr_meta_mut(value, f),
        StmtKind::If {
            cond,
            then_block,
            else_block,
        } => {
            expr_meta_mut(cond, f);
            block_meta_mut(then_block, f);
            if let Some(b) = else_block {
                block_meta_mut(b, f);
            }
        }
        StmtKind::While { cond, body } => {
            expr_meta_mut(cond, f);
            block_meta_mut(body, f);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                expr_meta_mut(e, f);
            }
        }
        StmtKind::Expr(e) => expr_meta_mut(e, f),
        StmtKind::Dispatch { arms, default, .. } => {
            for arm in arms {
                block_meta_mut(&mut arm.body, f);
            }
            block_meta_mut(default, f);
        }
    }
}

fn expr_meta_mut(expr: &mut Expr, f: &mut impl FnMut(&mut NodeId, &mut Span)) {
    f(&mut expr.id, &mut expr.span);
    match &mut expr.kind {
        ExprKind::Unary { operand, .. } => expr_meta_mut(operand, f),
        ExprKind::Binary { lhs, rhs, .. } => {
            expr_meta_mut(lhs, f);
            expr_meta_mut(rhs, f);
        }
        ExprKind::Call { args, .. } => {
            for a in args {
                expr_meta_mut(a, f);
            }
        }
        _ => {}
    }
}

impl Ast {
    /// Reassigns dense preorder ids `0..N`.
    pub fn renumber(&mut self) {
        let mut next = 0u32;
        for_each_meta_mut(self, &mut |id, _| {
            *id = NodeId(next);
            next += 1;
        });
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        walk_preorder(self, &mut |_| n += 1);
        n
    }

    /// Copy with every span cleared, for structural comparison.
    pub fn without_spans(&self) -> Ast {
        let mut copy = self.clone();
        for_each_meta_mut(&mut copy, &mut |_, span| *span = Span::default());
        copy
    }

    /// Copy with spans cleared and ids renumbered.
    pub fn shape(&self) -> Ast {
        let mut copy = self.without_spans();
        copy.renumber();
        copy
    }

    /// Equality ignoring spans and node ids.
    pub fn structurally_eq(&self, other: &Ast) -> bool {
        self.shape() == other.shape()
    }

    pub fn node(&self, id: NodeId) -> Option<NodeRef<'_>> {
        let mut found = None;
        walk_preorder(self, &mut |n| {
            if found.is_none() && n.id() == id {
                found = Some(n);
            }
        });
        found
    }

    pub fn find_fn(&self, name: &str) -> Option<&FnDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn fn_by_id_mut(&mut self, id: NodeId) -> Option<&mut FnDecl> {
        self.functions.iter_mut().find(|f| f.id == id)
    }

    pub fn expr_mut(&mut self, id: NodeId) -> Option<&mut Expr> {
        self.functions
            .iter_mut()
            .find_map(|f| block_expr_mut(&mut f.body, id))
    }

    pub fn stmt_mut(&mut self, id: NodeId) -> Option<&mut Stmt> {
        self.functions
            .iter_mut()
            .find_map(|f| block_stmt_mut(&mut f.body, id))
    }

    /// The statement list holding statement `id` and its position in it.
    pub fn stmt_slot_mut(&mut self, id: NodeId) -> Option<(&mut Vec<Stmt>, usize)> {
        self.functions
            .iter_mut()
            .find_map(|f| block_slot_mut(&mut f.body, id))
    }
}

fn child_blocks_mut(stmt: &mut Stmt) -> Vec<&mut Block> {
    match &mut stmt.kind {
        StmtKind::If {
            then_block,
            else_block,
            ..
        } => {
            let mut v = vec![then_block];
            if let Some(b) = else_block {
                v.push(b);
            }
            v
        }
        StmtKind::While { body, .. } => vec![body],
        StmtKind::Dispatch { arms, default, .. } => {
            let mut v: Vec<&mut Block> = arms.iter_mut().map(|a| &mut a.body).collect();
            v.push(default);
            v
        }
        _ => Vec::new(),
    }
}

fn child_exprs_mut(stmt: &mut Stmt) -> Vec<&mut Expr> {
    match &mut stmt.kind {
        StmtKind::Var { init: Some(e), .. } => vec![e],
        StmtKind::Assign { value, .. } => vec![value],
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
        StmtKind::Return(Some(e)) | StmtKind::Expr(e) => vec![e],
        _ => Vec::new(),
    }
}

pub fn block_slot_mut(block: &mut Block, id: NodeId) -> Option<(&mut Vec<Stmt>, usize)> {
    if let Some(pos) = block.stmts.iter().position(|s| s.id == id) {
        return Some((&mut block.stmts, pos));
    }
    block
        .stmts
        .iter_mut()
        .flat_map(child_blocks_mut)
        .find_map(|b| block_slot_mut(b, id))
}

fn block_stmt_mut(block: &mut Block, id: NodeId) -> Option<&mut Stmt> {
    block_slot_mut(block, id).map(|(v, i)| &mut v[i])
}

pub fn block_expr_mut(block: &mut Block, id: NodeId) -> Option<&mut Expr> {
    let pos = block.stmts.iter().position(|s| stmt_contains(s, id))?;
    let stmt = &mut block.stmts[pos];
    let in_own_exprs = {
        let mut hit = false;
        for_each_own_expr(stmt, &mut |e| {
            walk_expr(e, &mut |n| hit |= n.id() == id);
        });
        hit
    };
    if in_own_exprs {
        child_exprs_mut(stmt)
            .into_iter()
            .find_map(|e| expr_find_mut(e, id))
    } else {
        child_blocks_mut(stmt)
            .into_iter()
            .find_map(|b| block_expr_mut(b, id))
    }
}

fn stmt_contains(stmt: &Stmt, id: NodeId) -> bool {
    let mut hit = false;
    walk_stmt(stmt, &mut |n| hit |= n.id() == id);
    hit
}

/// Expressions owned directly by `stmt`, excluding nested blocks.
pub fn for_each_own_expr<'a>(stmt: &'a Stmt, f: &mut impl FnMut(&'a Expr)) {
    match &stmt.kind {
        StmtKind::Var { init: Some(e), .. } => f(e),
        StmtKind::Assign { value, .. } => f(value),
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => f(cond),
        StmtKind::Return(Some(e)) | StmtKind::Expr(e) => f(e),
        _ => {}
    }
}

fn expr_find_mut(expr: &mut Expr, id: NodeId) -> Option<&mut Expr> {
    if expr.id == id {
        return Some(expr);
    }
    match &mut expr.kind {
        ExprKind::Unary { operand, .. } => expr_find_mut(operand, id),
        ExprKind::Binary { lhs, rhs, .. } => {
            expr_find_mut(lhs, id).or_else(|| expr_find_mut(rhs, id))
        }
        ExprKind::Call { args, .. } => args.iter_mut().find_map(|a| expr_find_mut(a, id)),
        _ => None,
    }
}
