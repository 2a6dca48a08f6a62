//! Tree-walking evaluation inside one hermetic session.

use std::collections::{BTreeMap, HashMap};

use crate::lang::{BinaryOp, Block, DispatchArm, Expr, ExprKind, FnDecl, Stmt, StmtKind, UnaryOp};

use super::builtins::is_method_style;
use super::program::Program;
use super::value::Value;
use super::{fetch_muid, Environment, Status, TestOutcome, TestRun, MUID_CONSTANT};

/// Nested user-function calls allowed before a runtime error.
pub const MAX_CALL_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Widget {
    pub visible: bool,
    pub focused: bool,
    /// Event name to listener function name.
    pub listeners: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Intent {
    pub action: Option<String>,
    pub target_fn: Option<String>,
    pub extras: BTreeMap<String, Value>,
}

enum Abort {
    Assertion(String),
    Runtime(String),
    Timeout,
}

enum Flow {
    Next,
    Return(Value),
}

type Eval<T> = Result<T, Abort>;

fn rt<T>(msg: impl Into<String>) -> Eval<T> {
    Err(Abort::Runtime(msg.into()))
}

/// State of one test execution. Sessions share nothing with each other.
pub struct Session<'p> {
    program: &'p Program,
    widgets: BTreeMap<String, Widget>,
    intents: Vec<Intent>,
    steps_used: u64,
    step_budget: u64,
    events: Vec<String>,
    muid: i64,
    muid_fetches: u32,
    depth: usize,
    /// Arm chosen by each dispatch on the session constant, keyed by the
    /// address of the dispatch statement.
    dispatch_cache: HashMap<usize, Option<usize>>,
}

impl<'p> Session<'p> {
    pub fn new(program: &'p Program, env: &Environment, step_budget: u64) -> Self {
        let muid = fetch_muid(env);
        Self {
            program,
            widgets: BTreeMap::new(),
            intents: Vec::new(),
            steps_used: 0,
            step_budget,
            events: Vec::new(),
            muid,
            muid_fetches: 1,
            depth: 0,
            dispatch_cache: HashMap::new(),
        }
    }

    pub fn muid(&self) -> i64 {
        self.muid
    }

    pub fn muid_fetches(&self) -> u32 {
        self.muid_fetches
    }

    pub fn steps_used(&self) -> u64 {
        self.steps_used
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn widget(&self, id: &str) -> Option<&Widget> {
        self.widgets.get(id)
    }

    pub fn focused_count(&self) -> usize {
        self.widgets.values().filter(|w| w.focused).count()
    }

    /// Runs the named zero-argument function to completion.
    pub fn run(&mut self, func: &'p FnDecl) -> TestOutcome {
        let result = self.call_user(func, Vec::new());
        let (status, message) = match result {
            Ok(_) => (Status::Pass, String::new()),
            Err(Abort::Assertion(m)) => (Status::AssertionFailure, m),
            Err(Abort::Runtime(m)) => (Status::RuntimeError, m),
            Err(Abort::Timeout) => (
                Status::Timeout,
                format!("step budget of {} exhausted", self.step_budget),
            ),
        };
        TestOutcome {
            status,
            message,
            steps_used: self.steps_used,
        }
    }

    pub fn into_run(mut self, func: &'p FnDecl) -> TestRun {
        let outcome = self.run(func);
        TestRun {
            outcome,
            events: self.events,
        }
    }

    fn tick(&mut self, cost: u64) -> Eval<()> {
        match self.steps_used.checked_add(cost) {
            Some(total) if total <= self.step_budget => {
                self.steps_used = total;
                Ok(())
            }
            _ => {
                self.steps_used = self.step_budget;
                Err(Abort::Timeout)
            }
        }
    }

    fn call_user(&mut self, func: &'p FnDecl, args: Vec<Value>) -> Eval<Value> {
        if args.len() != func.params.len() {
            return rt(format!(
                "`{}` takes {} argument(s), got {}",
                func.name,
                func.params.len(),
                args.len()
            ));
        }
        if self.depth >= MAX_CALL_DEPTH {
            return rt("call depth exceeded");
        }
        self.depth += 1;
        let mut scopes = vec![func.params.iter().cloned().zip(args).collect()];
        let flow = self.exec_block(&func.body, &mut scopes, true);
        self.depth -= 1;
        Ok(match flow? {
            Flow::Return(v) => v,
            Flow::Next => Value::Null,
        })
    }

    /// `counted` is false for dispatch arms, which are free like the
    /// dispatch itself.
    fn exec_block(
        &mut self,
        block: &'p Block,
        scopes: &mut Vec<HashMap<String, Value>>,
        counted: bool,
    ) -> Eval<Flow> {
        if counted {
            self.tick(1)?;
        }
        scopes.push(HashMap::new());
        let mut flow = Ok(Flow::Next);
        for stmt in &block.stmts {
            match self.exec_stmt(stmt, scopes) {
                Ok(Flow::Next) => {}
                other => {
                    flow = other;
                    break;
                }
            }
        }
        scopes.pop();
        flow
    }

    fn exec_stmt(
        &mut self,
        stmt: &'p Stmt,
        scopes: &mut Vec<HashMap<String, Value>>,
    ) -> Eval<Flow> {
        if let StmtKind::Dispatch {
            selector,
            arms,
            default,
        } = &stmt.kind
        {
            let chosen = self.select_arm(stmt, selector, arms, scopes)?;
            let body = chosen.map_or(default, |i| &arms[i].body);
            return self.exec_block(body, scopes, false);
        }
        self.tick(1)?;
        match &stmt.kind {
            StmtKind::Var { name, init } => {
                let v = match init {
                    Some(e) => self.eval(e, scopes)?,
                    None => Value::Null,
                };
                scopes
                    .last_mut()
                    .expect("function scope")
                    .insert(name.clone(), v);
                Ok(Flow::Next)
            }
            StmtKind::Assign { name, value } => {
                let v = self.eval(value, scopes)?;
                match scopes.iter_mut().rev().find_map(|s| s.get_mut(name)) {
                    Some(slot) => {
                        *slot = v;
                        Ok(Flow::Next)
                    }
                    None => rt(format!("assignment to undeclared variable `{name}`")),
                }
            }
            StmtKind::If {
                cond,
                then_block,
                else_block,
            } => {
                if self.eval_bool(cond, scopes, "if condition")? {
                    self.exec_block(then_block, scopes, true)
                } else if let Some(b) = else_block {
                    self.exec_block(b, scopes, true)
                } else {
                    Ok(Flow::Next)
                }
            }
            StmtKind::While { cond, body } => {
                while self.eval_bool(cond, scopes, "while condition")? {
                    if let Flow::Return(v) = self.exec_block(body, scopes, true)? {
                        return Ok(Flow::Return(v));
                    }
                }
                Ok(Flow::Next)
            }
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => self.eval(e, scopes)?,
                    None => Value::Null,
                };
                Ok(Flow::Return(v))
            }
            StmtKind::Expr(e) => {
                self.eval(e, scopes)?;
                Ok(Flow::Next)
            }
            StmtKind::Dispatch { .. } => unreachable!("handled above"),
        }
    }

    fn select_arm(
        &mut self,
        stmt: &'p Stmt,
        selector: &str,
        arms: &'p [DispatchArm],
        scopes: &[HashMap<String, Value>],
    ) -> Eval<Option<usize>> {
        let local = scopes.iter().rev().find_map(|s| s.get(selector));
        let value = match local {
            Some(v) => v.clone(),
            None if selector == MUID_CONSTANT => {
                let key = stmt as *const Stmt as usize;
                if let Some(hit) = self.dispatch_cache.get(&key) {
                    return Ok(*hit);
                }
                let muid = self.muid;
                let hit = arms.iter().position(|a| a.case == muid);
                self.dispatch_cache.insert(key, hit);
                return Ok(hit);
            }
            None => return rt(format!("undefined variable `{selector}`")),
        };
        Ok(match value {
            Value::Int(v) => arms.iter().position(|a| a.case == v),
            Value::Str(s) => arms.iter().position(|a| a.case.to_string() == s),
            other => {
                return rt(format!(
                    "dispatch selector must be int or string, got {}",
                    other.type_name()
                ))
            }
        })
    }

    fn eval_bool(
        &mut self,
        e: &'p Expr,
        scopes: &mut Vec<HashMap<String, Value>>,
        what: &str,
    ) -> Eval<bool> {
        match self.eval(e, scopes)? {
            Value::Bool(b) => Ok(b),
            other => rt(format!("{what} must be bool, got {}", other.type_name())),
        }
    }

    fn eval(&mut self, e: &'p Expr, scopes: &mut Vec<HashMap<String, Value>>) -> Eval<Value> {
        self.tick(1)?;
        match &e.kind {
            ExprKind::Int(v) => Ok(Value::Int(*v)),
            ExprKind::Str(s) => Ok(Value::Str(s.clone())),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Null => Ok(Value::Null),
            ExprKind::Ident(name) => match scopes.iter().rev().find_map(|s| s.get(name)) {
                Some(v) => Ok(v.clone()),
                None if name == MUID_CONSTANT => Ok(Value::Int(self.muid)),
                None => rt(format!("undefined variable `{name}`")),
            },
            ExprKind::Unary { op, operand } => {
                let v = self.eval(operand, scopes)?;
                match (op, v) {
                    (UnaryOp::Neg, Value::Int(i)) => match i.checked_neg() {
                        Some(n) => Ok(Value::Int(n)),
                        None => rt("integer overflow"),
                    },
                    (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                    (op, v) => rt(format!(
                        "operator `{}` not applicable to {}",
                        op.symbol(),
                        v.type_name()
                    )),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => self.eval_binary(*op, lhs, rhs, scopes),
            ExprKind::Call { callee, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval(a, scopes)?);
                }
                self.call(callee, values)
            }
        }
    }

    fn eval_binary(
        &mut self,
        op: BinaryOp,
        lhs: &'p Expr,
        rhs: &'p Expr,
        scopes: &mut Vec<HashMap<String, Value>>,
    ) -> Eval<Value> {
        if matches!(op, BinaryOp::And | BinaryOp::Or) {
            let l = self.eval_bool(lhs, scopes, "logical operand")?;
            let short = match op {
                BinaryOp::And => !l,
                _ => l,
            };
            if short {
                return Ok(Value::Bool(l));
            }
            return Ok(Value::Bool(self.eval_bool(
                rhs,
                scopes,
                "logical operand",
            )?));
        }
        let l = self.eval(lhs, scopes)?;
        let r = self.eval(rhs, scopes)?;
        let overflow = || Abort::Runtime("integer overflow".to_string());
        match (op, &l, &r) {
            (BinaryOp::Eq, _, _) => Ok(Value::Bool(l == r)),
            (BinaryOp::Ne, _, _) => Ok(Value::Bool(l != r)),
            (BinaryOp::Add, Value::Int(a), Value::Int(b)) => {
                a.checked_add(*b).map(Value::Int).ok_or_else(overflow)
            }
            (BinaryOp::Add, Value::Str(_), _) | (BinaryOp::Add, _, Value::Str(_)) => {
                Ok(Value::Str(format!("{l}{r}")))
            }
            (BinaryOp::Sub, Value::Int(a), Value::Int(b)) => {
                a.checked_sub(*b).map(Value::Int).ok_or_else(overflow)
            }
            (BinaryOp::Mul, Value::Int(a), Value::Int(b)) => {
                a.checked_mul(*b).map(Value::Int).ok_or_else(overflow)
            }
            (BinaryOp::Div | BinaryOp::Rem, Value::Int(_), Value::Int(0)) => rt("division by zero"),
            (BinaryOp::Div, Value::Int(a), Value::Int(b)) => {
                a.checked_div(*b).map(Value::Int).ok_or_else(overflow)
            }
            (BinaryOp::Rem, Value::Int(a), Value::Int(b)) => {
                a.checked_rem(*b).map(Value::Int).ok_or_else(overflow)
            }
            (BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge, _, _) => {
                let ord = match (&l, &r) {
                    (Value::Int(a), Value::Int(b)) => a.cmp(b),
                    (Value::Str(a), Value::Str(b)) => a.cmp(b),
                    _ => {
                        return rt(format!(
                            "cannot compare {} with {}",
                            l.type_name(),
                            r.type_name()
                        ))
                    }
                };
                Ok(Value::Bool(match op {
                    BinaryOp::Lt => ord.is_lt(),
                    BinaryOp::Le => ord.is_le(),
                    BinaryOp::Gt => ord.is_gt(),
                    _ => ord.is_ge(),
                }))
            }
            _ => rt(format!(
                "operator `{}` not applicable to {} and {}",
                op.symbol(),
                l.type_name(),
                r.type_name()
            )),
        }
    }

    fn call(&mut self, callee: &str, args: Vec<Value>) -> Eval<Value> {
        if is_method_style(callee) && args[0].is_null() {
            return rt(format!("null dereference in `{callee}`"));
        }
        match callee {
            "createWidget" => {
                let id = self.expect_str(callee, &args[0])?;
                self.widgets.insert(
                    id.clone(),
                    Widget {
                        visible: true,
                        ..Widget::default()
                    },
                );
                Ok(Value::Widget(id))
            }
            "findViewById" => {
                let id = self.expect_str(callee, &args[0])?;
                Ok(if self.widgets.contains_key(&id) {
                    Value::Widget(id)
                } else {
                    Value::Null
                })
            }
            "setVisible" => {
                let id = self.widget_id(callee, &args[0])?;
                let Value::Bool(visible) = args[1] else {
                    return rt("setVisible expects a bool");
                };
                let w = self.widgets.get_mut(&id).expect("checked");
                w.visible = visible;
                if !visible {
                    w.focused = false;
                }
                Ok(Value::Null)
            }
            "requestFocus" => {
                let id = self.widget_id(callee, &args[0])?;
                if !self.widgets[&id].visible {
                    return rt(format!("focus request on invisible widget `{id}`"));
                }
                for (wid, w) in self.widgets.iter_mut() {
                    w.focused = *wid == id;
                }
                Ok(Value::Null)
            }
            "clearFocus" => {
                let id = self.widget_id(callee, &args[0])?;
                self.widgets.get_mut(&id).expect("checked").focused = false;
                Ok(Value::Null)
            }
            "onClick" => {
                let id = self.widget_id(callee, &args[0])?;
                let listener = self.expect_str(callee, &args[1])?;
                self.widgets
                    .get_mut(&id)
                    .expect("checked")
                    .listeners
                    .insert("click".to_string(), listener);
                Ok(Value::Null)
            }
            "click" => {
                let id = self.widget_id(callee, &args[0])?;
                let w = &self.widgets[&id];
                if !w.visible {
                    return rt(format!("click on invisible widget `{id}`"));
                }
                let listener = w.listeners.get("click").cloned();
                self.events.push(format!("CLICK {id}"));
                match listener {
                    Some(name) => {
                        let Some(func) = self.program.function(&name) else {
                            return rt(format!("unknown listener `{name}`"));
                        };
                        self.call_user(func, Vec::new())
                    }
                    None => Ok(Value::Null),
                }
            }
            "newIntent" => {
                let action = self.expect_str(callee, &args[0])?;
                self.intents.push(Intent {
                    action: Some(action),
                    ..Intent::default()
                });
                Ok(Value::Intent(self.intents.len() - 1))
            }
            "newIntentTo" => {
                let target = self.expect_str(callee, &args[0])?;
                self.intents.push(Intent {
                    target_fn: Some(target),
                    ..Intent::default()
                });
                Ok(Value::Intent(self.intents.len() - 1))
            }
            "putExtra" => {
                let h = self.intent_handle(callee, &args[0])?;
                let key = self.expect_str(callee, &args[1])?;
                self.intents[h].extras.insert(key, args[2].clone());
                Ok(Value::Null)
            }
            "getExtra" => {
                let h = self.intent_handle(callee, &args[0])?;
                let key = self.expect_str(callee, &args[1])?;
                Ok(self.intents[h]
                    .extras
                    .get(&key)
                    .cloned()
                    .unwrap_or(Value::Null))
            }
            "send" => {
                let h = self.intent_handle(callee, &args[0])?;
                let intent = &self.intents[h];
                match (&intent.target_fn, &intent.action) {
                    (Some(target), _) => {
                        let target = target.clone();
                        self.events.push(format!("SEND {target}"));
                        let Some(func) = self.program.function(&target) else {
                            return rt(format!("unknown intent target `{target}`"));
                        };
                        let call_args = match func.params.len() {
                            0 => Vec::new(),
                            1 => vec![Value::Intent(h)],
                            n => {
                                return rt(format!("intent target `{target}` takes {n} parameters"))
                            }
                        };
                        self.call_user(func, call_args)
                    }
                    (None, Some(action)) => {
                        let action = action.clone();
                        self.events.push(format!("SEND {action}"));
                        Ok(Value::Str(action))
                    }
                    (None, None) => rt("intent without action or target"),
                }
            }
            "sleep" => match args[0] {
                Value::Int(n) if n >= 0 => {
                    self.tick(n as u64)?;
                    Ok(Value::Null)
                }
                _ => rt("sleep expects a non-negative int"),
            },
            "print" => {
                self.events.push(format!("PRINT {}", args[0]));
                Ok(Value::Null)
            }
            "assertEq" => {
                if args[0] == args[1] {
                    Ok(Value::Null)
                } else {
                    Err(Abort::Assertion(format!(
                        "assertEq failed: {} != {}",
                        args[0], args[1]
                    )))
                }
            }
            "assertTrue" => match args[0] {
                Value::Bool(true) => Ok(Value::Null),
                Value::Bool(false) => Err(Abort::Assertion("assertTrue failed".to_string())),
                ref other => rt(format!(
                    "assertTrue expects a bool, got {}",
                    other.type_name()
                )),
            },
            "getMUID" => Ok(Value::Int(self.muid)),
            user => {
                let Some(func) = self.program.function(user) else {
                    return rt(format!("unknown function `{user}`"));
                };
                self.call_user(func, args)
            }
        }
    }

    fn expect_str(&self, callee: &str, v: &Value) -> Eval<String> {
        match v {
            Value::Str(s) => Ok(s.clone()),
            other => rt(format!(
                "`{callee}` expects a string, got {}",
                other.type_name()
            )),
        }
    }

    fn widget_id(&self, callee: &str, v: &Value) -> Eval<String> {
        match v {
            Value::Widget(id) if self.widgets.contains_key(id) => Ok(id.clone()),
            // Dangling references behave like null.
            Value::Widget(_) => rt(format!("null dereference in `{callee}`")),
            other => rt(format!(
                "`{callee}` expects a widget, got {}",
                other.type_name()
            )),
        }
    }

    fn intent_handle(&self, callee: &str, v: &Value) -> Eval<usize> {
        match v {
            Value::Intent(h) if *h < self.intents.len() => Ok(*h),
            other => rt(format!(
                "`{callee}` expects an intent, got {}",
                other.type_name()
            )),
        }
    }
}
