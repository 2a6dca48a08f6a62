//! Recursive-descent parser with precedence climbing for binary operators.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;

pub fn parse_text(text: &str) -> Result<Ast, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        text,
        tokens,
        pos: 0,
    };
    let mut ast = parser.program()?;
    ast.renumber();
    Ok(ast)
}

struct Parser<'t> {
    text: &'t str,
    tokens: Vec<Token>,
    pos: usize,
}

fn detached_id() -> NodeId {
    NodeId::DETACHED
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn current(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].span.end
        }
    }

    fn advance(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(q) if *q == k)
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let tok = self.current();
        let mut err = SyntaxError::at(
            self.text,
            tok.span.start,
            format!("unexpected {}", tok.tok.describe()),
        );
        err.expected = expected.iter().map(|s| s.to_string()).collect();
        err
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.is_punct(p) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&[p]))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), SyntaxError> {
        if self.is_kw(k) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&[k]))
        }
    }

    fn expect_ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(name)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn program(&mut self) -> Result<Ast, SyntaxError> {
        let mut functions = Vec::new();
        while !matches!(self.peek(), Tok::Eof) {
            if !self.is_kw("fn") {
                return Err(self.error(&["fn", "end of input"]));
            }
            functions.push(self.fn_decl()?);
        }
        Ok(Ast {
            id: detached_id(),
            span: Span::new(0, self.text.len()),
            functions,
        })
    }

    fn fn_decl(&mut self) -> Result<FnDecl, SyntaxError> {
        let start = self.current().span.start;
        self.expect_kw("fn")?;
        let name = self.expect_ident()?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.is_punct(")") {
            loop {
                params.push(self.expect_ident()?);
                if self.is_punct(",") {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        let body = self.block()?;
        Ok(FnDecl {
            id: detached_id(),
            span: Span::new(start, self.prev_end()),
            name,
            params,
            body,
        })
    }

    fn block(&mut self) -> Result<Block, SyntaxError> {
        let start = self.current().span.start;
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.error(&["}"]));
            }
            stmts.push(self.stmt()?);
        }
        self.expect_punct("}")?;
        Ok(Block {
            id: detached_id(),
            span: Span::new(start, self.prev_end()),
            stmts,
        })
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let start = self.current().span.start;
        let kind = match self.peek() {
            Tok::Kw("var") => {
                self.advance();
                let name = self.expect_ident()?;
                let init = if self.is_punct("=") {
                    self.advance();
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect_punct(";")?;
                StmtKind::Var { name, init }
            }
            Tok::Kw("if") => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let then_block = self.block()?;
                let else_block = if self.is_kw("else") {
                    self.advance();
                    Some(self.block()?)
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_block,
                    else_block,
                }
            }
            Tok::Kw("while") => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            Tok::Kw("return") => {
                self.advance();
                let value = if self.is_punct(";") {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect_punct(";")?;
                StmtKind::Return(value)
            }
            Tok::Kw("dispatch") => self.dispatch()?,
            Tok::Ident(name) if matches!(self.peek_at(1), Tok::Punct("=")) => {
                let name = name.clone();
                self.advance();
                self.advance();
                let value = self.expr()?;
                self.expect_punct(";")?;
                StmtKind::Assign { name, value }
            }
            _ => {
                let e = self.expr()?;
                self.expect_punct(";")?;
                StmtKind::Expr(e)
            }
        };
        Ok(Stmt {
            id: detached_id(),
            span: Span::new(start, self.prev_end()),
            kind,
        })
    }

    fn dispatch(&mut self) -> Result<StmtKind, SyntaxError> {
        self.expect_kw("dispatch")?;
        self.expect_punct("(")?;
        let selector = self.expect_ident()?;
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        let mut arms = Vec::new();
        while self.is_kw("case") {
            let label = self.current().leading_comment.clone();
            self.advance();
            let case = match self.peek() {
                Tok::Int(v) => *v,
                _ => return Err(self.error(&["integer"])),
            };
            self.advance();
            let body = self.block()?;
            arms.push(DispatchArm { case, label, body });
        }
        if !self.is_kw("default") {
            return Err(self.error(&["case", "default"]));
        }
        self.expect_kw("default")?;
        let default = self.block()?;
        self.expect_punct("}")?;
        Ok(StmtKind::Dispatch {
            selector,
            arms,
            default,
        })
    }

    pub fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        let Tok::Punct(p) = self.peek() else {
            return None;
        };
        Some(match *p {
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "%" => BinaryOp::Rem,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            "&&" => BinaryOp::And,
            "||" => BinaryOp::Or,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(prec + 1)?;
            let span = Span::new(lhs.span.start, rhs.span.end);
            lhs = Expr {
                id: detached_id(),
                span,
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.current().span.start;
        let op = match self.peek() {
            Tok::Punct("-") => Some(UnaryOp::Neg),
            Tok::Punct("!") => Some(UnaryOp::Not),
            _ => None,
        };
        match op {
            Some(op) => {
                self.advance();
                let operand = self.unary()?;
                Ok(Expr {
                    id: detached_id(),
                    span: Span::new(start, operand.span.end),
                    kind: ExprKind::Unary {
                        op,
                        operand: Box::new(operand),
                    },
                })
            }
            None => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        const EXPECTED: &[&str] = &[
            "identifier",
            "integer",
            "string",
            "true",
            "false",
            "null",
            "(",
            "-",
            "!",
        ];
        let start = self.current().span.start;
        let kind = match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                ExprKind::Int(v)
            }
            Tok::Str(s) => {
                self.advance();
                ExprKind::Str(s)
            }
            Tok::Kw("true") => {
                self.advance();
                ExprKind::Bool(true)
            }
            Tok::Kw("false") => {
                self.advance();
                ExprKind::Bool(false)
            }
            Tok::Kw("null") => {
                self.advance();
                ExprKind::Null
            }
            Tok::Punct("(") => {
                self.advance();
                let inner = self.expr()?;
                self.expect_punct(")")?;
                return Ok(inner);
            }
            Tok::Ident(name) => {
                self.advance();
                if self.is_punct("(") {
                    self.advance();
                    let mut args = Vec::new();
                    if !self.is_punct(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.is_punct(",") {
                                self.advance();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_punct(")")?;
                    ExprKind::Call { callee: name, args }
                } else {
                    ExprKind::Ident(name)
                }
            }
            _ => return Err(self.error(EXPECTED)),
        };
        Ok(Expr {
            id: detached_id(),
            span: Span::new(start, self.prev_end()),
            kind,
        })
    }
}
