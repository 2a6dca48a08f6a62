//! Linking: function table construction and static arity checks.

use std::collections::HashMap;

use thiserror::Error;

use crate::lang::visit::walk_fn;
use crate::lang::{Ast, ExprKind, FnDecl, NodeRef, Project};

use super::builtins::builtin_arity;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("function `{name}` defined in both `{first}` and `{second}`")]
    DuplicateFunction {
        name: String,
        first: String,
        second: String,
    },
    #[error("`{module}`: function `{name}` shadows a builtin")]
    ShadowsBuiltin { module: String, name: String },
    #[error("`{module}`: call to unknown function `{callee}` in `{caller}`")]
    UnknownFunction {
        module: String,
        caller: String,
        callee: String,
    },
    #[error("`{module}`: `{callee}` takes {expected} argument(s) but `{caller}` passes {found}")]
    Arity {
        module: String,
        caller: String,
        callee: String,
        expected: usize,
        found: usize,
    },
    #[error("`{module}`: test `{name}` must not take parameters")]
    TestWithParams { module: String, name: String },
}

/// A linked, runnable program: the analog of a built and installed app.
#[derive(Debug, Clone)]
pub struct Program {
    modules: Vec<(String, Ast)>,
    functions: HashMap<String, (usize, usize)>,
    tests: Vec<String>,
}

impl Program {
    pub fn load(project: &Project) -> Result<Self, LoadError> {
        let modules = project
            .modules
            .iter()
            .zip(&project.asts)
            .map(|(m, a)| (m.path.clone(), a.clone()))
            .collect();
        Self::from_modules(modules)
    }

    pub fn from_modules(modules: Vec<(String, Ast)>) -> Result<Self, LoadError> {
        let mut functions: HashMap<String, (usize, usize)> = HashMap::new();
        let mut tests = Vec::new();
        for (mi, (path, ast)) in modules.iter().enumerate() {
            for (fi, func) in ast.functions.iter().enumerate() {
                if builtin_arity(&func.name).is_some() || func.name == super::MUID_CONSTANT {
                    return Err(LoadError::ShadowsBuiltin {
                        module: path.clone(),
                        name: func.name.clone(),
                    });
                }
                if let Some(&(pm, _)) = functions.get(&func.name) {
                    return Err(LoadError::DuplicateFunction {
                        name: func.name.clone(),
                        first: modules[pm].0.clone(),
                        second: path.clone(),
                    });
                }
                if func.is_test() {
                    if !func.params.is_empty() {
                        return Err(LoadError::TestWithParams {
                            module: path.clone(),
                            name: func.name.clone(),
                        });
                    }
                    tests.push(func.name.clone());
                }
                functions.insert(func.name.clone(), (mi, fi));
            }
        }
        let program = Self {
            modules,
            functions,
            tests,
        };
        program.check_calls()?;
        Ok(program)
    }

    fn check_calls(&self) -> Result<(), LoadError> {
        for (path, ast) in &self.modules {
            for func in &ast.functions {
                let mut err = None;
                walk_fn(func, &mut |n| {
                    if err.is_some() {
                        return;
                    }
                    let NodeRef::Expr(e) = n else { return };
                    let ExprKind::Call { callee, args } = &e.kind else {
                        return;
                    };
                    let expected = match builtin_arity(callee) {
                        Some(a) => a,
                        None => match self.function(callee) {
                            Some(f) => f.params.len(),
                            None => {
                                err = Some(LoadError::UnknownFunction {
                                    module: path.clone(),
                                    caller: func.name.clone(),
                                    callee: callee.clone(),
                                });
                                return;
                            }
                        },
                    };
                    if expected != args.len() {
                        err = Some(LoadError::Arity {
                            module: path.clone(),
                            caller: func.name.clone(),
                            callee: callee.clone(),
                            expected,
                            found: args.len(),
                        });
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
        }
        Ok(())
    }

    pub fn function(&self, name: &str) -> Option<&FnDecl> {
        self.functions
            .get(name)
            .map(|&(m, f)| &self.modules[m].1.functions[f])
    }

    /// Test function names in module then declaration order.
    pub fn tests(&self) -> &[String] {
        &self.tests
    }

    pub fn modules(&self) -> impl Iterator<Item = (&str, &Ast)> {
        self.modules.iter().map(|(p, a)| (p.as_str(), a))
    }
}
