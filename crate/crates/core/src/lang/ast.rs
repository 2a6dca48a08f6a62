//! Syntax tree for Mini-App programs.
//!
//! Every node carries a [`NodeId`] (dense preorder index within its module)
//! and a [`Span`] of byte offsets into the text it was parsed from. Nodes
//! built by transformations carry [`NodeId::DETACHED`] and an empty span until
//! the tree is renumbered or re-parsed.

use std::fmt;

/// Dense preorder index of a node within one module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const DETACHED: NodeId = NodeId(u32::MAX);
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Half-open byte range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// A parsed module: the `program` production.
#[derive(Debug, Clone, PartialEq)]
pub struct Ast {
    pub id: NodeId,
    pub span: Span,
    pub functions: Vec<FnDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FnDecl {
    pub id: NodeId,
    pub span: Span,
    pub name: String,
    pub params: Vec<String>,
    pub body: Block,
}

impl FnDecl {
    pub fn is_test(&self) -> bool {
        self.name.starts_with("test_")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub id: NodeId,
    pub span: Span,
    pub stmts: Vec<Stmt>,
}

impl Block {
    pub fn detached(stmts: Vec<Stmt>) -> Self {
        Self {
            id: NodeId::DETACHED,
            span: Span::default(),
            stmts,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub id: NodeId,
    pub span: Span,
    pub kind: StmtKind,
}

impl Stmt {
    pub fn detached(kind: StmtKind) -> Self {
        Self {
            id: NodeId::DETACHED,
            span: Span::default(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Var {
        name: String,
        init: Option<Expr>,
    },
    Assign {
        name: String,
        value: Expr,
    },
    If {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
    While {
        cond: Expr,
        body: Block,
    },
    Return(Option<Expr>),
    Expr(Expr),
    /// Generated mutant selector; never written by hand.
    Dispatch {
        selector: String,
        arms: Vec<DispatchArm>,
        default: Block,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchArm {
    pub case: i64,
    /// Comment line printed above the arm, e.g. `0_NullIntentOperatorMutator`.
    pub label: Option<String>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub span: Span,
    pub kind: ExprKind,
}

impl Expr {
    pub fn detached(kind: ExprKind) -> Self {
        Self {
            id: NodeId::DETACHED,
            span: Span::default(),
            kind,
        }
    }

    pub fn call(callee: &str, args: Vec<Expr>) -> Self {
        Self::detached(ExprKind::Call {
            callee: callee.to_string(),
            args,
        })
    }

    pub fn str_lit(s: &str) -> Self {
        Self::detached(ExprKind::Str(s.to_string()))
    }

    pub fn int_lit(v: i64) -> Self {
        Self::detached(ExprKind::Int(v))
    }

    pub fn null() -> Self {
        Self::detached(ExprKind::Null)
    }

    /// Callee name and arguments when this is a call to `name`.
    pub fn as_call_to(&self, name: &str) -> Option<&[Expr]> {
        match &self.kind {
            ExprKind::Call { callee, args } if callee == name => Some(args),
            _ => None,
        }
    }

    pub fn as_str_lit(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Str(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    Ident(String),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        callee: String,
        args: Vec<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Not => "!",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub const ARITHMETIC: [BinaryOp; 5] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter. All levels are left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 6,
        }
    }

    pub fn is_arithmetic(self) -> bool {
        Self::ARITHMETIC.contains(&self)
    }
}

/// Kind tag of a node, one per grammar production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Program,
    FnDecl,
    Block,
    VarDecl,
    Assign,
    If,
    While,
    Return,
    ExprStmt,
    Dispatch,
    Binary,
    Unary,
    Call,
    Int,
    Str,
    Bool,
    Null,
    Ident,
}

/// Borrowed view of any node, used by traversals and predicates.
#[derive(Debug, Clone, Copy)]
pub enum NodeRef<'a> {
    Program(&'a Ast),
    Fn(&'a FnDecl),
    Block(&'a Block),
    Stmt(&'a Stmt),
    Expr(&'a Expr),
}

impl<'a> NodeRef<'a> {
    pub fn id(&self) -> NodeId {
        match self {
            NodeRef::Program(n) => n.id,
            NodeRef::Fn(n) => n.id,
            NodeRef::Block(n) => n.id,
            NodeRef::Stmt(n) => n.id,
            NodeRef::Expr(n) => n.id,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            NodeRef::Program(n) => n.span,
            NodeRef::Fn(n) => n.span,
            NodeRef::Block(n) => n.span,
            NodeRef::Stmt(n) => n.span,
            NodeRef::Expr(n) => n.span,
        }
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            NodeRef::Program(_) => NodeKind::Program,
            NodeRef::Fn(_) => NodeKind::FnDecl,
            NodeRef::Block(_) => NodeKind::Block,
            NodeRef::Stmt(s) => match s.kind {
                StmtKind::Var { .. } => NodeKind::VarDecl,
                StmtKind::Assign { .. } => NodeKind::Assign,
                StmtKind::If { .. } => NodeKind::If,
                StmtKind::While { .. } => NodeKind::While,
                StmtKind::Return(_) => NodeKind::Return,
                StmtKind::Expr(_) => NodeKind::ExprStmt,
                StmtKind::Dispatch { .. } => NodeKind::Dispatch,
            },
            NodeRef::Expr(e) => match e.kind {
                ExprKind::Int(_) => NodeKind::Int,
                ExprKind::Str(_) => NodeKind::Str,
                ExprKind::Bool(_) => NodeKind::Bool,
                ExprKind::Null => NodeKind::Null,
                ExprKind::Ident(_) => NodeKind::Ident,
                ExprKind::Unary { .. } => NodeKind::Unary,
                ExprKind::Binary { .. } => NodeKind::Binary,
                ExprKind::Call { .. } => NodeKind::Call,
            },
        }
    }

    pub fn as_expr(&self) -> Option<&'a Expr> {
        match self {
            NodeRef::Expr(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_stmt(&self) -> Option<&'a Stmt> {
        match self {
            NodeRef::Stmt(s) => Some(s),
            _ => None,
        }
    }
}
