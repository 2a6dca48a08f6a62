//! Canonical pretty-printer: one statement per line, two-space indent.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "  ";

pub fn unparse(ast: &Ast) -> String {
    let mut out = String::new();
    for (i, func) in ast.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_fn(&mut out, func);
    }
    out
}

fn print_fn(out: &mut String, func: &FnDecl) {
    let _ = write!(out, "fn {}({}) ", func.name, func.params.join(", "));
    print_block(out, &func.body, 0);
    out.push('\n');
}

fn print_block(out: &mut String, block: &Block, depth: usize) {
    out.push_str("{\n");
    for stmt in &block.stmts {
        print_stmt_into(out, stmt, depth + 1);
    }
    push_indent(out, depth);
    out.push('}');
}

fn push_indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

/// Prints one statement (with trailing newline) at the given depth.
pub fn print_stmt(stmt: &Stmt, depth: usize) -> String {
    let mut out = String::new();
    print_stmt_into(&mut out, stmt, depth);
    out
}

/// Prints statements on a single line separated by spaces; compound
/// statements keep their internal line breaks.
pub fn print_stmts_inline(stmts: &[Stmt]) -> String {
    stmts
        .iter()
        .map(|s| print_stmt(s, 0).trim_end().to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_stmt_into(out: &mut String, stmt: &Stmt, depth: usize) {
    push_indent(out, depth);
    match &stmt.kind {
        StmtKind::Var { name, init } => {
            let _ = write!(out, "var {name}");
            if let Some(e) = init {
                let _ = write!(out, " = {}", print_expr(e));
            }
            out.push(';');
        }
        StmtKind::Assign { name, value } => {
            let _ = write!(out, "{name} = {};", print_expr(value));
        }
        StmtKind::If {
            cond,
            then_block,
            else_block,
        } => {
            let _ = write!(out, "if ({}) ", print_expr(cond));
            print_block(out, then_block, depth);
            if let Some(b) = else_block {
                out.push_str(" else ");
                print_block(out, b, depth);
            }
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while ({}) ", print_expr(cond));
            print_block(out, body, depth);
        }
        StmtKind::Return(value) => match value {
            Some(e) => {
                let _ = write!(out, "return {};", print_expr(e));
            }
            None => out.push_str("return;"),
        },
        StmtKind::Expr(e) => {
            let _ = write!(out, "{};", print_expr(e));
        }
        StmtKind::Dispatch {
            selector,
            arms,
            default,
        } => {
            let _ = writeln!(out, "dispatch ({selector}) {{");
            for arm in arms {
                if let Some(label) = &arm.label {
                    push_indent(out, depth + 1);
                    let _ = writeln!(out, "// {label}");
                }
                push_indent(out, depth + 1);
                let _ = write!(out, "case {} ", arm.case);
                print_block(out, &arm.body, depth + 1);
                out.push('\n');
            }
            push_indent(out, depth + 1);
            out.push_str("default ");
            print_block(out, default, depth + 1);
            out.push('\n');
            push_indent(out, depth);
            out.push('}');
        }
    }
    out.push('\n');
}

pub fn print_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, 0);
    out
}

const UNARY_PREC: u8 = 7;

fn write_expr(out: &mut String, expr: &Expr, min_prec: u8) {
    match &expr.kind {
        ExprKind::Int(v) => {
            if *v < 0 {
                // Only reachable for trees built in code; the parser yields Neg.
                let _ = write!(out, "({v})");
            } else {
                let _ = write!(out, "{v}");
            }
        }
        ExprKind::Str(s) => write_str_lit(out, s),
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Null => out.push_str("null"),
        ExprKind::Ident(name) => out.push_str(name),
        ExprKind::Unary { op, operand } => {
            let wrap = UNARY_PREC < min_prec;
            if wrap {
                out.push('(');
            }
            out.push_str(op.symbol());
            write_expr(out, operand, UNARY_PREC);
            if wrap {
                out.push(')');
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            let wrap = prec < min_prec;
            if wrap {
                out.push('(');
            }
            write_expr(out, lhs, prec);
            let _ = write!(out, " {} ", op.symbol());
            // Left-associative: an equal-precedence right operand needs parens.
            write_expr(out, rhs, prec + 1);
            if wrap {
                out.push(')');
            }
        }
        ExprKind::Call { callee, args } => {
            out.push_str(callee);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, 0);
            }
            out.push(')');
        }
    }
}

fn write_str_lit(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
}
