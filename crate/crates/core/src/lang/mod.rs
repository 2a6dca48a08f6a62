//! The Mini-App subject language: parser, pretty-printer, and project model.
//!
//! ```text
//! program    := fnDecl* ;
//! fnDecl     := "fn" IDENT "(" paramList? ")" block ;
//! block      := "{" stmt* "}" ;
//! stmt       := varDecl | assign | ifStmt | whileStmt | returnStmt | exprStmt ;
//! varDecl    := "var" IDENT ("=" expr)? ";" ;
//! assign     := IDENT "=" expr ";" ;
//! ifStmt     := "if" "(" expr ")" block ("else" block)? ;
//! whileStmt  := "while" "(" expr ")" block ;
//! returnStmt := "return" expr? ";" ;
//! exprStmt   := expr ";" ;
//! ```
//!
//! Expressions use the usual precedence ladder (`||` < `&&` < equality <
//! relational < additive < multiplicative < unary) with parentheses for
//! grouping. Woven output additionally contains generated `dispatch`
//! statements, which the parser accepts so that woven trees round-trip.

pub mod ast;
mod lexer;
mod parser;
pub mod printer;
pub mod visit;

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

pub use ast::*;
pub use printer::{print_expr, print_stmt, print_stmts_inline, unparse};

/// File extension of Mini-App sources.
pub const EXTENSION: &str = "mini";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}{}", expected_suffix(.expected))]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", expected.join(", "))
    }
}

impl SyntaxError {
    pub(crate) fn at(text: &str, offset: usize, message: impl Into<String>) -> Self {
        let (line, column) = line_col(text, offset);
        Self {
            line,
            column,
            offset,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let column = before[line_start..].chars().count() + 1;
    (line, column)
}

/// One source file of a project.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceModule {
    /// Path relative to the project root, `/`-separated.
    pub path: String,
    pub text: String,
}

impl SourceModule {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            text: text.into(),
        }
    }
}

pub fn parse(module: &SourceModule) -> Result<Ast, SyntaxError> {
    parser::parse_text(&module.text)
}

pub fn parse_str(text: &str) -> Result<Ast, SyntaxError> {
    parser::parse_text(text)
}

/// Ids of the nodes satisfying `predicate`, in preorder.
pub fn preorder_points(ast: &Ast, predicate: impl Fn(NodeRef<'_>) -> bool) -> Vec<NodeId> {
    let mut out = Vec::new();
    visit::walk_preorder(ast, &mut |n| {
        if predicate(n) {
            out.push(n.id());
        }
    });
    out
}

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("{path}:{source}")]
    Syntax {
        path: String,
        #[source]
        source: SyntaxError,
    },
    #[error("duplicate module path `{0}`")]
    DuplicatePath(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A parsed project: modules with their trees, in a fixed module order.
#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    pub modules: Vec<SourceModule>,
    pub asts: Vec<Ast>,
}

impl Project {
    pub fn from_modules(modules: Vec<SourceModule>) -> Result<Self, ProjectError> {
        let mut seen = std::collections::BTreeSet::new();
        let mut asts = Vec::with_capacity(modules.len());
        for m in &modules {
            if !seen.insert(m.path.clone()) {
                return Err(ProjectError::DuplicatePath(m.path.clone()));
            }
            asts.push(parse(m).map_err(|source| ProjectError::Syntax {
                path: m.path.clone(),
                source,
            })?);
        }
        Ok(Self { modules, asts })
    }

    /// Loads every `.mini` file under `dir`, ordered by relative path.
    pub fn load_dir(dir: &Path) -> Result<Self, ProjectError> {
        Self::from_modules(read_modules(dir)?)
    }

    /// Names of the `test_*` functions, in module then declaration order.
    pub fn entry_tests(&self) -> Vec<String> {
        self.asts
            .iter()
            .flat_map(|a| a.functions.iter())
            .filter(|f| f.is_test())
            .map(|f| f.name.clone())
            .collect()
    }

    pub fn module_index(&self, path: &str) -> Option<usize> {
        self.modules.iter().position(|m| m.path == path)
    }
}

/// Reads the `.mini` files under `dir` without parsing them.
pub fn read_modules(dir: &Path) -> Result<Vec<SourceModule>, ProjectError> {
    let mut modules = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| ProjectError::Io {
            path: e
                .path()
                .map_or_else(|| dir.to_path_buf(), Path::to_path_buf),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("directory walk failed")),
        })?;
        let path = entry.path();
        if !entry.file_type().is_file()
            || path.extension().and_then(|e| e.to_str()) != Some(EXTENSION)
        {
            continue;
        }
        let text = std::fs::read_to_string(path).map_err(|source| ProjectError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let rel = path
            .strip_prefix(dir)
            .unwrap_or(path)
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        modules.push(SourceModule::new(rel, text));
    }
    modules.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(modules)
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests;
