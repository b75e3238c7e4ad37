//! Reference interpreter.
//!
//! Big-step evaluation with a fresh heap per test method. Tests run in
//! declaration order and stop at the first failure. Every run records
//! which program methods were entered; the search uses those traces to
//! decide which choices a failing test actually depends on.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::*;
use crate::builtins;

pub const STEP_LIMIT: u64 = 1_000_000;
pub const DEPTH_LIMIT: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    Ref(usize),
}

#[derive(Clone, Debug)]
enum Obj {
    Instance { class: String, fields: BTreeMap<String, Value> },
    List(Vec<Value>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    AssertFailed,
    BadCast { wanted: String },
    NullReceiver { member: String },
    StepLimit,
    StackOverflow,
    Runtime(String),
}

impl core::fmt::Display for Failure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Failure::AssertFailed => write!(f, "assertion failed"),
            Failure::BadCast { wanted } => write!(f, "bad cast to {wanted}"),
            Failure::NullReceiver { member } => write!(f, "null receiver for `{member}`"),
            Failure::StepLimit => write!(f, "step limit exceeded"),
            Failure::StackOverflow => write!(f, "call depth limit exceeded"),
            Failure::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TestOutcome {
    /// `Class.method` of the test.
    pub id: String,
    pub failure: Option<Failure>,
    /// Program methods entered while the test ran, in entry order,
    /// deduplicated. Constructors appear as the bare class name.
    pub trace: Vec<String>,
}

impl TestOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, Default)]
pub struct TestReport {
    /// Outcomes for the tests that ran, up to and including the first
    /// failing one.
    pub outcomes: Vec<TestOutcome>,
    /// Total tests declared, for context.
    pub declared: usize,
}

impl TestReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.len() == self.declared && self.outcomes.iter().all(TestOutcome::passed)
    }

    pub fn first_failure(&self) -> Option<&TestOutcome> {
        self.outcomes.iter().find(|o| !o.passed())
    }
}

/// Runs every `@Test` method in declaration order, each on a fresh
/// heap, stopping after the first failure.
pub fn run_tests(program: &Program) -> TestReport {
    let mut report = TestReport::default();
    let tests: Vec<(String, &ClassDecl, &Method)> = program
        .decls
        .iter()
        .filter_map(|d| match d {
            Decl::Class(c) => Some(c),
            Decl::Interface(_) => None,
        })
        .flat_map(|c| {
            c.methods
                .iter()
                .filter(|m| m.is_test)
                .map(move |m| (format!("{}.{}", c.name, m.name), c, m))
        })
        .collect();
    report.declared = tests.len();
    for (id, _c, m) in tests {
        let mut interp = Interp {
            program,
            heap: Vec::new(),
            steps: 0,
            trace: Vec::new(),
        };
        interp.enter(&id);
        let result = interp.exec_body(&m.body, &mut Frame::new(None, BTreeMap::new()), 0);
        let failure = match result {
            Ok(_) => None,
            Err(f) => Some(f),
        };
        let failed = failure.is_some();
        report.outcomes.push(TestOutcome { id, failure, trace: interp.trace });
        if failed {
            break;
        }
    }
    report
}

enum Flow {
    Normal,
    Returned(Value),
}

struct Frame {
    this: Option<Value>,
    scopes: Vec<BTreeMap<String, Value>>,
}

impl Frame {
    fn new(this: Option<Value>, params: BTreeMap<String, Value>) -> Frame {
        Frame { this, scopes: alloc::vec![params] }
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn assign(&mut self, name: &str, v: Value) -> bool {
        for s in self.scopes.iter_mut().rev() {
            if let Some(slot) = s.get_mut(name) {
                *slot = v;
                return true;
            }
        }
        false
    }

    fn declare(&mut self, name: &str, v: Value) {
        self.scopes.last_mut().expect("frame has a scope").insert(name.to_owned(), v);
    }
}

struct Interp<'a> {
    program: &'a Program,
    heap: Vec<Obj>,
    steps: u64,
    trace: Vec<String>,
}

impl<'a> Interp<'a> {
    fn enter(&mut self, id: &str) {
        if !self.trace.iter().any(|t| t == id) {
            self.trace.push(id.to_owned());
        }
    }

    fn tick(&mut self) -> Result<(), Failure> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            Err(Failure::StepLimit)
        } else {
            Ok(())
        }
    }

    fn class(&self, name: &str) -> Option<&'a ClassDecl> {
        self.program.find_class(&Name::concrete(name))
    }

    fn exec_body(&mut self, body: &[Stmt], frame: &mut Frame, depth: usize) -> Result<Flow, Failure> {
        for s in body {
            match self.exec(s, frame, depth)? {
                Flow::Normal => {}
                ret => return Ok(ret),
            }
        }
        Ok(Flow::Normal)
    }

    fn scoped_body(&mut self, body: &[Stmt], frame: &mut Frame, depth: usize) -> Result<Flow, Failure> {
        frame.scopes.push(BTreeMap::new());
        let r = self.exec_body(body, frame, depth);
        frame.scopes.pop();
        r
    }

    fn exec(&mut self, s: &Stmt, frame: &mut Frame, depth: usize) -> Result<Flow, Failure> {
        self.tick()?;
        match s {
            Stmt::Local { name, init, .. } => {
                let v = self.eval(init, frame, depth)?;
                frame.declare(name, v);
                Ok(Flow::Normal)
            }
            Stmt::Assign { target, value } => {
                let v = self.eval(value, frame, depth)?;
                match target {
                    LValue::Var(x) => {
                        if !frame.assign(x, v) {
                            return Err(Failure::Runtime(format!("unknown variable `{x}`")));
                        }
                    }
                    LValue::Field { recv, name } => {
                        let r = self.eval(recv, frame, depth)?;
                        self.store_field(&r, name, v)?;
                    }
                }
                Ok(Flow::Normal)
            }
            Stmt::Expr(e) => {
                self.eval(e, frame, depth)?;
                Ok(Flow::Normal)
            }
            Stmt::Return(None) => Ok(Flow::Returned(Value::Null)),
            Stmt::Return(Some(e)) => {
                let v = self.eval(e, frame, depth)?;
                Ok(Flow::Returned(v))
            }
            Stmt::If { cond, then_body, else_body } => {
                if self.truth(cond, frame, depth)? {
                    self.scoped_body(then_body, frame, depth)
                } else {
                    self.scoped_body(else_body, frame, depth)
                }
            }
            Stmt::While { cond, body } => {
                while self.truth(cond, frame, depth)? {
                    self.tick()?;
                    match self.scoped_body(body, frame, depth)? {
                        Flow::Normal => {}
                        ret => return Ok(ret),
                    }
                }
                Ok(Flow::Normal)
            }
            Stmt::For { init, cond, step, body } => {
                frame.scopes.push(BTreeMap::new());
                let result = (|| {
                    match self.exec(init, frame, depth)? {
                        Flow::Normal => {}
                        ret => return Ok(ret),
                    }
                    while self.truth(cond, frame, depth)? {
                        self.tick()?;
                        match self.scoped_body(body, frame, depth)? {
                            Flow::Normal => {}
                            ret => return Ok(ret),
                        }
                        match self.exec(step, frame, depth)? {
                            Flow::Normal => {}
                            ret => return Ok(ret),
                        }
                    }
                    Ok(Flow::Normal)
                })();
                frame.scopes.pop();
                result
            }
            Stmt::Assert(e) => {
                let v = self.eval(e, frame, depth)?;
                match v {
                    Value::Bool(true) => Ok(Flow::Normal),
                    Value::Bool(false) => Err(Failure::AssertFailed),
                    _ => Err(Failure::Runtime("assert on a non-boolean".into())),
                }
            }
        }
    }

    fn truth(&mut self, e: &Expr, frame: &mut Frame, depth: usize) -> Result<bool, Failure> {
        match self.eval(e, frame, depth)? {
            Value::Bool(b) => Ok(b),
            _ => Err(Failure::Runtime("condition is not a boolean".into())),
        }
    }

    fn eval(&mut self, e: &Expr, frame: &mut Frame, depth: usize) -> Result<Value, Failure> {
        self.tick()?;
        match e {
            Expr::Int(n) => Ok(Value::Int(*n)),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Null => Ok(Value::Null),
            Expr::Var(x) => frame
                .lookup(x)
                .cloned()
                .ok_or_else(|| Failure::Runtime(format!("unknown variable `{x}`"))),
            Expr::This => frame
                .this
                .clone()
                .ok_or_else(|| Failure::Runtime("`this` outside an instance".into())),
            Expr::Field { recv, name } => {
                let r = self.eval(recv, frame, depth)?;
                self.load_field(&r, name)
            }
            Expr::Call { recv, name, args } => {
                let r = self.eval(recv, frame, depth)?;
                let argv = self.eval_args(args, frame, depth)?;
                self.call(r, name, argv, depth)
            }
            Expr::StaticCall { class, name, args } => {
                let argv = self.eval_args(args, frame, depth)?;
                self.static_call(class, name, argv, depth)
            }
            Expr::New { class, args } => {
                let argv = self.eval_args(args, frame, depth)?;
                self.construct(class, argv, depth)
            }
            Expr::Cast { ty, expr } => {
                let v = self.eval(expr, frame, depth)?;
                let wanted = match ty.as_concrete() {
                    Some(s) => s,
                    None => return Err(Failure::Runtime(format!("cast to unfilled `{ty}`"))),
                };
                if self.instance_of(&v, wanted) {
                    Ok(v)
                } else {
                    Err(Failure::BadCast { wanted: wanted.to_owned() })
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs, frame, depth)?;
                let r = self.eval(rhs, frame, depth)?;
                self.binary(*op, l, r)
            }
        }
    }

    fn eval_args(
        &mut self,
        args: &[Expr],
        frame: &mut Frame,
        depth: usize,
    ) -> Result<Vec<Value>, Failure> {
        args.iter().map(|a| self.eval(a, frame, depth)).collect()
    }

    fn binary(&mut self, op: BinOp, l: Value, r: Value) -> Result<Value, Failure> {
        use BinOp::*;
        match op {
            Eq => Ok(Value::Bool(values_equal(&l, &r))),
            Ne => Ok(Value::Bool(!values_equal(&l, &r))),
            Add | Sub | Mul | Lt | Le => match (l, r) {
                (Value::Int(a), Value::Int(b)) => Ok(match op {
                    Add => Value::Int(a.wrapping_add(b)),
                    Sub => Value::Int(a.wrapping_sub(b)),
                    Mul => Value::Int(a.wrapping_mul(b)),
                    Lt => Value::Bool(a < b),
                    Le => Value::Bool(a <= b),
                    Eq | Ne => unreachable!(),
                }),
                _ => Err(Failure::Runtime(format!(
                    "`{}` needs integer operands",
                    op.symbol()
                ))),
            },
        }
    }

    fn load_field(&mut self, recv: &Value, name: &Name) -> Result<Value, Failure> {
        let member = format!("{name}");
        match recv {
            Value::Null => Err(Failure::NullReceiver { member }),
            Value::Ref(i) => match &self.heap[*i] {
                Obj::Instance { fields, .. } => fields
                    .get(&member)
                    .cloned()
                    .ok_or(Failure::Runtime(format!("no field `{member}`"))),
                Obj::List(_) => Err(Failure::Runtime(format!("no field `{member}` on a list"))),
            },
            _ => Err(Failure::Runtime(format!("no field `{member}` on a value"))),
        }
    }

    fn store_field(&mut self, recv: &Value, name: &Name, v: Value) -> Result<(), Failure> {
        let member = format!("{name}");
        match recv {
            Value::Null => Err(Failure::NullReceiver { member }),
            Value::Ref(i) => match &mut self.heap[*i] {
                Obj::Instance { fields, .. } => {
                    if let Some(slot) = fields.get_mut(&member) {
                        *slot = v;
                        Ok(())
                    } else {
                        Err(Failure::Runtime(format!("no field `{member}`")))
                    }
                }
                Obj::List(_) => Err(Failure::Runtime(format!("no field `{member}` on a list"))),
            },
            _ => Err(Failure::Runtime(format!("no field `{member}` on a value"))),
        }
    }

    fn call(
        &mut self,
        recv: Value,
        name: &Name,
        args: Vec<Value>,
        depth: usize,
    ) -> Result<Value, Failure> {
        let member = format!("{name}");
        match &recv {
            Value::Null => Err(Failure::NullReceiver { member }),
            Value::Int(n) => match (member.as_str(), args.len()) {
                ("toString", 0) => Ok(Value::Str(format!("{n}"))),
                _ => Err(Failure::Runtime(format!("no method `{member}` on Integer"))),
            },
            Value::Str(s) => match (member.as_str(), args.as_slice()) {
                ("concat", [Value::Str(t)]) => Ok(Value::Str(format!("{s}{t}"))),
                ("equals", [Value::Str(t)]) => Ok(Value::Bool(s == t)),
                ("contains", [Value::Str(t)]) => Ok(Value::Bool(s.contains(t.as_str()))),
                _ => Err(Failure::Runtime(format!("no method `{member}` on String"))),
            },
            Value::Bool(_) => Err(Failure::Runtime(format!("no method `{member}` on Boolean"))),
            Value::Ref(i) => match &self.heap[*i] {
                Obj::List(_) => self.list_call(*i, &member, args),
                Obj::Instance { class, .. } => {
                    let class = class.clone();
                    self.dispatch(recv.clone(), &class, &member, args, depth)
                }
            },
        }
    }

    fn list_call(&mut self, idx: usize, member: &str, args: Vec<Value>) -> Result<Value, Failure> {
        let items = match &mut self.heap[idx] {
            Obj::List(items) => items,
            Obj::Instance { .. } => unreachable!(),
        };
        match (member, args.as_slice()) {
            ("add", [v]) => {
                items.push(v.clone());
                Ok(Value::Bool(true))
            }
            ("size", []) => Ok(Value::Int(items.len() as i64)),
            ("get", [Value::Int(i)]) => {
                let i = *i;
                if i < 0 || i as usize >= items.len() {
                    Err(Failure::Runtime(format!("list index {i} out of range")))
                } else {
                    Ok(items[i as usize].clone())
                }
            }
            ("contains", [v]) => Ok(Value::Bool(items.iter().any(|x| values_equal(x, v)))),
            _ => Err(Failure::Runtime(format!("no method `{member}` on List"))),
        }
    }

    /// Finds `member` on the runtime class chain and runs it.
    fn dispatch(
        &mut self,
        recv: Value,
        class: &str,
        member: &str,
        args: Vec<Value>,
        depth: usize,
    ) -> Result<Value, Failure> {
        let mut cur = class.to_owned();
        loop {
            let decl = match self.class(&cur) {
                Some(d) => d,
                None => return Err(Failure::Runtime(format!("no method `{member}` on {class}"))),
            };
            let found = decl
                .methods
                .iter()
                .find(|m| !m.is_ctor && m.name == Name::concrete(member));
            if let Some(m) = found {
                if m.params.len() != args.len() {
                    return Err(Failure::Runtime(format!("arity mismatch calling `{member}`")));
                }
                let id = format!("{}.{member}", decl.name);
                let this = if m.is_static { None } else { Some(recv) };
                return self.invoke(&id, m, this, args, depth);
            }
            cur = match decl.superclass.as_concrete() {
                Some(s) if self.class(s).is_some() => s.to_owned(),
                _ => return Err(Failure::Runtime(format!("no method `{member}` on {class}"))),
            };
        }
    }

    fn static_call(
        &mut self,
        class: &Name,
        name: &Name,
        args: Vec<Value>,
        depth: usize,
    ) -> Result<Value, Failure> {
        let member = format!("{name}");
        let cname = match class.as_concrete() {
            Some(s) => s,
            None => return Err(Failure::Runtime(format!("static call on unfilled `{class}`"))),
        };
        let decl = self
            .class(cname)
            .ok_or_else(|| Failure::Runtime(format!("unknown class `{cname}`")))?;
        let m = decl
            .methods
            .iter()
            .find(|m| !m.is_ctor && m.name == Name::concrete(member.as_str()))
            .ok_or_else(|| Failure::Runtime(format!("no method `{member}` on {cname}")))?;
        if !m.is_static {
            return Err(Failure::Runtime(format!("`{member}` is not static")));
        }
        if m.params.len() != args.len() {
            return Err(Failure::Runtime(format!("arity mismatch calling `{member}`")));
        }
        let id = format!("{cname}.{member}");
        self.invoke(&id, m, None, args, depth)
    }

    fn invoke(
        &mut self,
        id: &str,
        m: &'a Method,
        this: Option<Value>,
        args: Vec<Value>,
        depth: usize,
    ) -> Result<Value, Failure> {
        if depth + 1 > DEPTH_LIMIT {
            return Err(Failure::StackOverflow);
        }
        self.enter(id);
        let params: BTreeMap<String, Value> =
            m.params.iter().map(|p| p.name.clone()).zip(args).collect();
        let mut frame = Frame::new(this, params);
        match self.exec_body(&m.body, &mut frame, depth + 1)? {
            Flow::Returned(v) => Ok(v),
            Flow::Normal => Ok(Value::Null),
        }
    }

    fn construct(&mut self, class: &Name, args: Vec<Value>, depth: usize) -> Result<Value, Failure> {
        let cname = match class.as_concrete() {
            Some(s) => s,
            None => return Err(Failure::Runtime(format!("new on unfilled `{class}`"))),
        };
        if cname == builtins::LIST {
            let idx = self.heap.len();
            self.heap.push(Obj::List(Vec::new()));
            return Ok(Value::Ref(idx));
        }
        if cname == builtins::OBJECT {
            let idx = self.heap.len();
            self.heap
                .push(Obj::Instance { class: builtins::OBJECT.to_owned(), fields: BTreeMap::new() });
            return Ok(Value::Ref(idx));
        }
        if builtins::is_builtin_type(cname) {
            return Err(Failure::Runtime(format!("`{cname}` cannot be constructed")));
        }
        let decl = self
            .class(cname)
            .ok_or_else(|| Failure::Runtime(format!("unknown class `{cname}`")))?;

        // Collect default fields over the whole chain, nearest first.
        let mut fields: BTreeMap<String, Value> = BTreeMap::new();
        let mut cur = Some(decl);
        let mut hops = 0usize;
        while let Some(d) = cur {
            hops += 1;
            if hops > self.program.decls.len() + 1 {
                break;
            }
            for f in &d.fields {
                let key = format!("{}", f.name);
                fields.entry(key).or_insert_with(|| default_value(&f.ty));
            }
            cur = d.superclass.as_concrete().and_then(|s| self.class(s));
        }
        let idx = self.heap.len();
        self.heap.push(Obj::Instance { class: cname.to_owned(), fields });
        let recv = Value::Ref(idx);

        if let Some(ctor) = decl.methods.iter().find(|m| m.is_ctor) {
            if ctor.params.len() != args.len() {
                return Err(Failure::Runtime(format!("arity mismatch constructing `{cname}`")));
            }
            // Constructors trace as the bare class name.
            self.invoke(cname, ctor, Some(recv.clone()), args, depth)?;
        } else if !args.is_empty() {
            return Err(Failure::Runtime(format!("`{cname}` takes no constructor arguments")));
        }
        Ok(recv)
    }

    /// Runtime conformance of a value to a named type.
    fn instance_of(&self, v: &Value, wanted: &str) -> bool {
        if wanted == builtins::OBJECT {
            return true;
        }
        match v {
            Value::Null => true,
            Value::Int(_) => wanted == builtins::INTEGER,
            Value::Str(_) => wanted == builtins::STRING,
            Value::Bool(_) => wanted == builtins::BOOLEAN,
            Value::Ref(i) => match &self.heap[*i] {
                Obj::List(_) => wanted == builtins::LIST,
                Obj::Instance { class, .. } => {
                    let mut cur = class.clone();
                    let mut hops = 0usize;
                    loop {
                        hops += 1;
                        if hops > self.program.decls.len() + 2 {
                            return false;
                        }
                        if cur == wanted {
                            return true;
                        }
                        let decl = match self.class(&cur) {
                            Some(d) => d,
                            None => return false,
                        };
                        if decl.interfaces.iter().any(|i| i.as_concrete() == Some(wanted)) {
                            return true;
                        }
                        match decl.superclass.as_concrete() {
                            Some(s) => cur = s.to_owned(),
                            None => return false,
                        }
                    }
                }
            },
        }
    }
}

fn default_value(ty: &Name) -> Value {
    match ty.as_concrete() {
        Some(s) if s == builtins::INTEGER => Value::Int(0),
        Some(s) if s == builtins::BOOLEAN => Value::Bool(false),
        _ => Value::Null,
    }
}

fn values_equal(l: &Value, r: &Value) -> bool {
    match (l, r) {
        (Value::Int(a), Value::Int(b)) => a == b,
        (Value::Str(a), Value::Str(b)) => a == b,
        (Value::Bool(a), Value::Bool(b)) => a == b,
        (Value::Null, Value::Null) => true,
        (Value::Ref(a), Value::Ref(b)) => a == b,
        _ => false,
    }
}
