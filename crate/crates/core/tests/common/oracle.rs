//! An independent checker for hole-free programs, written directly
//! against the language rules rather than as constraints: one pass over
//! the syntax, classifying the program as complete, missing members, or
//! broken. Used to cross-examine the constraint solver.

use lmsynth_core::ast::*;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    /// Well typed with every referenced member declared.
    Complete,
    /// Consistent so far, but some referenced member or ability is
    /// absent and could still be added.
    Incomplete,
    /// No extension can make it well typed.
    Rejected,
}

/// Abstract value types. `Any` and `Result` model the solver's
/// inference variables: `Any` is unbounded (null, members that do not
/// exist yet), `Result` is bounded below by a declared return type —
/// usable as that type, but a cast can reinterpret it freely.
#[derive(Clone, Debug, PartialEq, Eq)]
enum OTy {
    Void,
    Any,
    Exact(String),
    Result(String),
}

const BUILTIN_TYPES: &[&str] = &["Object", "Integer", "String", "Boolean", "List"];

fn builtin_method(owner: &str, m: &str) -> Option<(&'static [&'static str], &'static str)> {
    match (owner, m) {
        ("Integer", "toString") => Some((&[], "String")),
        ("String", "concat") => Some((&["String"], "String")),
        ("String", "equals") => Some((&["String"], "Boolean")),
        ("String", "contains") => Some((&["String"], "Boolean")),
        ("List", "add") => Some((&["Object"], "Boolean")),
        ("List", "get") => Some((&["Integer"], "Object")),
        ("List", "size") => Some((&[], "Integer")),
        ("List", "contains") => Some((&["Object"], "Boolean")),
        _ => None,
    }
}

fn builtin_ctor_arity(owner: &str) -> Option<usize> {
    match owner {
        "Object" | "List" => Some(0),
        _ => None,
    }
}

pub fn check(program: &Program) -> OracleVerdict {
    let mut o = Oracle { program, reject: false, incomplete: false };
    if o.broken_hierarchy() {
        return OracleVerdict::Rejected;
    }
    for d in &program.decls {
        if let Decl::Class(c) = d {
            o.class(c);
        }
    }
    if o.reject {
        OracleVerdict::Rejected
    } else if o.incomplete {
        OracleVerdict::Incomplete
    } else {
        OracleVerdict::Complete
    }
}

enum Kind<'a> {
    Class(&'a ClassDecl),
    Iface(&'a InterfaceDecl),
    Builtin,
    Missing,
}

enum Found {
    Field { ty: String, in_self: bool },
    Method { params: Vec<String>, ret: Option<String>, in_self: bool },
    ImplicitCtor,
    Missing,
}

type Env = BTreeMap<String, String>;

struct Oracle<'a> {
    program: &'a Program,
    reject: bool,
    incomplete: bool,
}

fn concrete(n: &Name) -> &str {
    n.as_concrete().expect("oracle requires hole-free programs")
}

impl<'a> Oracle<'a> {
    fn kind(&self, name: &str) -> Kind<'a> {
        match self.program.find_decl(&Name::concrete(name)) {
            Some(Decl::Class(c)) => Kind::Class(c),
            Some(Decl::Interface(i)) => Kind::Iface(i),
            None if BUILTIN_TYPES.contains(&name) => Kind::Builtin,
            None => Kind::Missing,
        }
    }

    /// Duplicate or builtin-shadowing declarations, classes extending
    /// interfaces, and inheritance cycles are beyond repair.
    fn broken_hierarchy(&self) -> bool {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for d in &self.program.decls {
            let n = concrete(d.name());
            if BUILTIN_TYPES.contains(&n) || !seen.insert(n) {
                return true;
            }
        }
        for d in &self.program.decls {
            let c = match d {
                Decl::Class(c) => c,
                Decl::Interface(_) => continue,
            };
            if matches!(self.kind(concrete(&c.superclass)), Kind::Iface(_)) {
                return true;
            }
            let mut visited: BTreeSet<&str> = BTreeSet::new();
            let mut cur = c;
            loop {
                if !visited.insert(concrete(&cur.name)) {
                    return true;
                }
                match self.kind(concrete(&cur.superclass)) {
                    Kind::Class(next) => cur = next,
                    _ => break,
                }
            }
        }
        false
    }

    /// Declared-hierarchy subtyping: reflexive, everything under
    /// `Object`, classes under their superclass chain and every
    /// interface implemented along it.
    fn sub(&self, a: &str, b: &str) -> bool {
        if a == b || b == "Object" {
            return true;
        }
        let mut cur = a;
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > self.program.decls.len() + 8 {
                return false;
            }
            match self.kind(cur) {
                Kind::Class(c) => {
                    if c.interfaces.iter().any(|i| concrete(i) == b) {
                        return true;
                    }
                    let sup = concrete(&c.superclass);
                    if sup == b {
                        return true;
                    }
                    cur = sup;
                }
                _ => return false,
            }
        }
    }

    /// Member lookup along the superclass chain, mirroring what the
    /// language defines: fields, then methods (constructors included
    /// under their own name), then the implicit zero-argument
    /// constructor, then inherited members; a built-in superclass
    /// contributes only its methods.
    fn lookup(&self, start: &'a ClassDecl, member: &str) -> Found {
        let mut cur = start;
        let mut in_self = true;
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > self.program.decls.len() + 2 {
                return Found::Missing;
            }
            if let Some(f) = cur.fields.iter().find(|f| concrete(&f.name) == member) {
                return Found::Field { ty: concrete(&f.ty).to_string(), in_self };
            }
            if let Some(m) = cur.methods.iter().find(|m| concrete(&m.name) == member) {
                let params = m.params.iter().map(|p| concrete(&p.ty).to_string()).collect();
                let ret = if m.is_ctor {
                    Some(concrete(&cur.name).to_string())
                } else {
                    match &m.ret {
                        RetType::Void => None,
                        RetType::Name(n) => Some(concrete(n).to_string()),
                    }
                };
                return Found::Method { params, ret, in_self };
            }
            if in_self
                && concrete(&cur.name) == member
                && !cur.methods.iter().any(|m| m.is_ctor)
            {
                return Found::ImplicitCtor;
            }
            let sup = concrete(&cur.superclass);
            match self.kind(sup) {
                Kind::Class(c) => {
                    cur = c;
                    in_self = false;
                }
                Kind::Builtin => {
                    return match builtin_method(sup, member) {
                        Some((ps, ret)) => Found::Method {
                            params: ps.iter().map(|s| s.to_string()).collect(),
                            ret: Some(ret.to_string()),
                            in_self: false,
                        },
                        None => Found::Missing,
                    };
                }
                _ => return Found::Missing,
            }
        }
    }

    /// A shape clash on the class itself is final; an inherited one can
    /// still be shadowed by a new member.
    fn mismatch(&mut self, in_self: bool) {
        if in_self {
            self.reject = true;
        } else {
            self.incomplete = true;
        }
    }

    /// A value flowing into a declared type.
    fn flow_named(&mut self, v: &OTy, target: &str) {
        match v {
            OTy::Void => self.reject = true,
            OTy::Any => {}
            OTy::Exact(t) | OTy::Result(t) => {
                if !self.sub(t, target) {
                    self.reject = true;
                }
            }
        }
    }

    fn flow_ret(&mut self, v: &OTy, ret: Option<&str>) {
        match ret {
            Some(r) => self.flow_named(v, r),
            None => match v {
                OTy::Void | OTy::Any => {}
                OTy::Exact(_) | OTy::Result(_) => self.reject = true,
            },
        }
    }

    fn class(&mut self, c: &'a ClassDecl) {
        for i in &c.interfaces {
            match self.kind(concrete(i)) {
                Kind::Iface(decl) => {
                    for sig in decl.signatures.clone() {
                        self.impl_sig(c, &sig);
                    }
                }
                Kind::Class(_) | Kind::Builtin => self.reject = true,
                Kind::Missing => self.incomplete = true,
            }
        }
        for m in &c.methods {
            self.method(c, m);
        }
    }

    fn impl_sig(&mut self, c: &'a ClassDecl, sig: &Sig) {
        match self.lookup(c, concrete(&sig.name)) {
            Found::Method { params, ret, in_self } => {
                if sig.params.len() == params.len() {
                    for (sp, ip) in sig.params.iter().zip(&params) {
                        if !self.sub(concrete(&sp.ty), ip) {
                            self.reject = true;
                        }
                    }
                    match (&sig.ret, ret) {
                        (RetType::Void, None) => {}
                        (RetType::Void, Some(_)) | (RetType::Name(_), None) => self.reject = true,
                        (RetType::Name(n), Some(r)) => {
                            if !self.sub(&r, concrete(n)) {
                                self.reject = true;
                            }
                        }
                    }
                } else {
                    self.mismatch(in_self);
                }
            }
            Found::Field { in_self, .. } => self.mismatch(in_self),
            Found::ImplicitCtor => {
                if sig.params.is_empty() {
                    match &sig.ret {
                        RetType::Void => self.reject = true,
                        RetType::Name(n) => {
                            if !self.sub(concrete(&c.name), concrete(n)) {
                                self.reject = true;
                            }
                        }
                    }
                } else {
                    self.incomplete = true;
                }
            }
            Found::Missing => self.incomplete = true,
        }
    }

    fn method(&mut self, c: &ClassDecl, m: &Method) {
        let mut env: Env = m
            .params
            .iter()
            .map(|p| (p.name.clone(), concrete(&p.ty).to_string()))
            .collect();
        let this = if m.is_static { None } else { Some(concrete(&c.name).to_string()) };
        let ret: Option<String> = if m.is_ctor {
            None
        } else {
            match &m.ret {
                RetType::Void => None,
                RetType::Name(n) => Some(concrete(n).to_string()),
            }
        };
        for s in &m.body {
            self.stmt(s, &mut env, this.as_deref(), ret.as_deref());
        }
    }

    fn scoped(&mut self, body: &[Stmt], env: &mut Env, this: Option<&str>, ret: Option<&str>) {
        let saved = env.clone();
        for s in body {
            self.stmt(s, env, this, ret);
        }
        *env = saved;
    }

    fn stmt(&mut self, s: &Stmt, env: &mut Env, this: Option<&str>, ret: Option<&str>) {
        match s {
            Stmt::Local { ty, name, init } => {
                let t = self.expr(init, env, this);
                let declared = concrete(ty);
                self.flow_named(&t, declared);
                env.insert(name.clone(), declared.to_string());
            }
            Stmt::Assign { target, value } => {
                let v = self.expr(value, env, this);
                match target {
                    LValue::Var(x) => {
                        let t = env.get(x).expect("assignment to unbound variable").clone();
                        self.flow_named(&v, &t);
                    }
                    LValue::Field { recv, name } => {
                        let r = self.expr(recv, env, this);
                        self.field_write(&r, concrete(name), &v);
                    }
                }
            }
            Stmt::Expr(e) => {
                self.expr(e, env, this);
            }
            Stmt::Return(None) => {
                if ret.is_some() {
                    self.reject = true;
                }
            }
            Stmt::Return(Some(e)) => {
                let t = self.expr(e, env, this);
                self.flow_ret(&t, ret);
            }
            Stmt::If { cond, then_body, else_body } => {
                let t = self.expr(cond, env, this);
                self.flow_named(&t, "Boolean");
                self.scoped(then_body, env, this, ret);
                self.scoped(else_body, env, this, ret);
            }
            Stmt::While { cond, body } => {
                let t = self.expr(cond, env, this);
                self.flow_named(&t, "Boolean");
                self.scoped(body, env, this, ret);
            }
            Stmt::For { init, cond, step, body } => {
                let saved = env.clone();
                self.stmt(init, env, this, ret);
                let t = self.expr(cond, env, this);
                self.flow_named(&t, "Boolean");
                self.stmt(step, env, this, ret);
                self.scoped(body, env, this, ret);
                *env = saved;
            }
            Stmt::Assert(e) => {
                let t = self.expr(e, env, this);
                self.flow_named(&t, "Boolean");
            }
        }
    }

    fn expr(&mut self, e: &Expr, env: &Env, this: Option<&str>) -> OTy {
        match e {
            Expr::Var(x) => {
                OTy::Exact(env.get(x).expect("unbound variable reached oracle").clone())
            }
            Expr::This => OTy::Exact(this.expect("`this` in static context").to_string()),
            Expr::Int(_) => OTy::Exact("Integer".to_string()),
            Expr::Str(_) => OTy::Exact("String".to_string()),
            Expr::Bool(_) => OTy::Exact("Boolean".to_string()),
            Expr::Null => OTy::Any,
            Expr::Field { recv, name } => {
                let r = self.expr(recv, env, this);
                self.field_read(&r, concrete(name))
            }
            Expr::Call { recv, name, args } => {
                let r = self.expr(recv, env, this);
                let a: Vec<OTy> = args.iter().map(|x| self.expr(x, env, this)).collect();
                self.call(&r, concrete(name), &a)
            }
            Expr::StaticCall { class, name, args } => {
                let owner = OTy::Exact(concrete(class).to_string());
                let a: Vec<OTy> = args.iter().map(|x| self.expr(x, env, this)).collect();
                self.call(&owner, concrete(name), &a)
            }
            Expr::New { class, args } => {
                let a: Vec<OTy> = args.iter().map(|x| self.expr(x, env, this)).collect();
                self.new_expr(concrete(class), &a)
            }
            Expr::Cast { ty, expr } => {
                let inner = self.expr(expr, env, this);
                self.cast(concrete(ty), &inner)
            }
            Expr::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs, env, this);
                let r = self.expr(rhs, env, this);
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => {
                        self.flow_named(&l, "Integer");
                        self.flow_named(&r, "Integer");
                        OTy::Exact("Integer".to_string())
                    }
                    BinOp::Lt | BinOp::Le => {
                        self.flow_named(&l, "Integer");
                        self.flow_named(&r, "Integer");
                        OTy::Exact("Boolean".to_string())
                    }
                    BinOp::Eq | BinOp::Ne => {
                        // Comparison only demands the operands share a
                        // type, which fails just when one side is void
                        // and the other is a real value.
                        let named =
                            |t: &OTy| matches!(t, OTy::Exact(_) | OTy::Result(_));
                        if (l == OTy::Void && named(&r)) || (r == OTy::Void && named(&l)) {
                            self.reject = true;
                        }
                        OTy::Exact("Boolean".to_string())
                    }
                }
            }
        }
    }

    /// A cast is a downcast check against the source's committed type.
    /// Method results carry no upper commitment, so any cast of them
    /// passes; so does casting `null` or an unknown member's value.
    fn cast(&mut self, target: &str, inner: &OTy) -> OTy {
        match inner {
            OTy::Void => self.reject = true,
            OTy::Any | OTy::Result(_) => {}
            OTy::Exact(t) => {
                if !self.sub(target, t) {
                    self.reject = true;
                }
            }
        }
        OTy::Exact(target.to_string())
    }

    fn receiver_name(&mut self, recv: &OTy) -> Option<String> {
        match recv {
            OTy::Void => {
                self.reject = true;
                None
            }
            OTy::Any => None,
            OTy::Exact(n) | OTy::Result(n) => Some(n.clone()),
        }
    }

    fn call(&mut self, recv: &OTy, member: &str, args: &[OTy]) -> OTy {
        let owner = match self.receiver_name(recv) {
            Some(n) => n,
            None => return OTy::Any,
        };
        match self.kind(&owner) {
            Kind::Builtin => {
                if member == owner {
                    match builtin_ctor_arity(&owner) {
                        Some(arity) if args.len() == arity => OTy::Result(owner),
                        _ => {
                            self.reject = true;
                            OTy::Any
                        }
                    }
                } else {
                    match builtin_method(&owner, member) {
                        Some((ps, ret)) if args.len() == ps.len() => {
                            for (a, p) in args.iter().zip(ps.iter()) {
                                self.flow_named(a, p);
                            }
                            OTy::Result(ret.to_string())
                        }
                        _ => {
                            // The built-in member set is closed.
                            self.reject = true;
                            OTy::Any
                        }
                    }
                }
            }
            Kind::Iface(i) => {
                match i.signatures.iter().find(|s| concrete(&s.name) == member) {
                    Some(sig) => {
                        if args.len() == sig.params.len() {
                            for (a, p) in args.iter().zip(&sig.params) {
                                self.flow_named(a, concrete(&p.ty));
                            }
                            match &sig.ret {
                                RetType::Void => OTy::Void,
                                RetType::Name(n) => OTy::Result(concrete(n).to_string()),
                            }
                        } else {
                            self.reject = true;
                            OTy::Any
                        }
                    }
                    None => {
                        if member == owner {
                            // Interfaces cannot be constructed.
                            self.reject = true;
                        } else {
                            // A signature could still be added.
                            self.incomplete = true;
                        }
                        OTy::Any
                    }
                }
            }
            Kind::Class(c) => match self.lookup(c, member) {
                Found::Field { in_self, .. } => {
                    self.mismatch(in_self);
                    OTy::Any
                }
                Found::Method { params, ret, in_self } => {
                    if args.len() == params.len() {
                        for (a, p) in args.iter().zip(&params) {
                            self.flow_named(a, p);
                        }
                        match ret {
                            None => OTy::Void,
                            Some(r) => OTy::Result(r),
                        }
                    } else {
                        self.mismatch(in_self);
                        OTy::Any
                    }
                }
                Found::ImplicitCtor => {
                    if args.is_empty() {
                        OTy::Result(owner)
                    } else {
                        self.incomplete = true;
                        OTy::Any
                    }
                }
                Found::Missing => {
                    self.incomplete = true;
                    OTy::Any
                }
            },
            Kind::Missing => {
                self.incomplete = true;
                OTy::Any
            }
        }
    }

    fn field_read(&mut self, recv: &OTy, member: &str) -> OTy {
        let owner = match self.receiver_name(recv) {
            Some(n) => n,
            None => return OTy::Any,
        };
        match self.kind(&owner) {
            // Built-ins have no fields and a closed member set;
            // interfaces can never gain a field.
            Kind::Builtin | Kind::Iface(_) => {
                self.reject = true;
                OTy::Any
            }
            Kind::Class(c) => match self.lookup(c, member) {
                Found::Field { ty, .. } => OTy::Exact(ty),
                Found::Method { in_self, .. } => {
                    self.mismatch(in_self);
                    OTy::Any
                }
                // A constructible name used as a field suspends: a
                // parameterized constructor could still be composed in.
                Found::ImplicitCtor | Found::Missing => {
                    self.incomplete = true;
                    OTy::Any
                }
            },
            Kind::Missing => {
                self.incomplete = true;
                OTy::Any
            }
        }
    }

    fn field_write(&mut self, recv: &OTy, member: &str, val: &OTy) {
        let owner = match self.receiver_name(recv) {
            Some(n) => n,
            None => return,
        };
        match self.kind(&owner) {
            Kind::Builtin | Kind::Iface(_) => self.reject = true,
            Kind::Class(c) => match self.lookup(c, member) {
                Found::Field { ty, .. } => self.flow_named(val, &ty),
                Found::Method { in_self, .. } => self.mismatch(in_self),
                Found::ImplicitCtor | Found::Missing => self.incomplete = true,
            },
            Kind::Missing => self.incomplete = true,
        }
    }

    fn new_expr(&mut self, class: &str, args: &[OTy]) -> OTy {
        match self.kind(class) {
            Kind::Builtin => {
                match builtin_ctor_arity(class) {
                    Some(arity) if args.len() == arity => {}
                    _ => self.reject = true,
                }
            }
            Kind::Iface(_) => self.reject = true,
            Kind::Class(c) => match self.lookup(c, class) {
                Found::Method { params, ret, in_self } => {
                    if args.len() == params.len() {
                        for (a, p) in args.iter().zip(&params) {
                            self.flow_named(a, p);
                        }
                        match ret {
                            Some(r) => {
                                if !self.sub(&r, class) {
                                    self.reject = true;
                                }
                            }
                            None => self.reject = true,
                        }
                    } else {
                        self.mismatch(in_self);
                    }
                }
                Found::ImplicitCtor => {
                    if !args.is_empty() {
                        self.incomplete = true;
                    }
                }
                Found::Field { in_self, .. } => self.mismatch(in_self),
                Found::Missing => self.incomplete = true,
            },
            Kind::Missing => self.incomplete = true,
        }
        // The value of `new C(...)` is `C` regardless of whether the
        // construction obligation itself has been met yet.
        OTy::Exact(class.to_string())
    }
}
