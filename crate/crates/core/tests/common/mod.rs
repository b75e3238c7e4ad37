//! Shared helpers for integration tests: a seeded random program
//! generator and an independent checker to compare resolution against.

#![allow(dead_code)]

pub mod oracle;

use lmsynth_core::ast::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Planned shape of a program, fixed before any bodies are generated so
/// expression generation can aim at known types.
struct Skeleton {
    classes: Vec<ClassInfo>,
    ifaces: Vec<IfaceInfo>,
}

struct ClassInfo {
    name: String,
    superclass: String,
    impls: Vec<usize>,
    fields: Vec<(String, String)>,
    /// Explicit constructor parameter types, when one is planned.
    ctor: Option<Vec<String>>,
    methods: Vec<MethodPlan>,
}

struct MethodPlan {
    name: String,
    is_static: bool,
    params: Vec<String>,
    /// `None` is a void method.
    ret: Option<String>,
}

struct IfaceInfo {
    name: String,
    sigs: Vec<SigInfo>,
}

#[derive(Clone)]
struct SigInfo {
    name: String,
    params: Vec<String>,
    ret: Option<String>,
}

/// `Object` is listed last so the first four double as the pool of
/// value-like built-ins.
const POOL_BUILTINS: &[&str] = &["Integer", "String", "Boolean", "List", "Object"];

fn plan(rng: &mut ChaCha8Rng) -> Skeleton {
    let n_ifaces = rng.gen_range(0..=2);
    let mut ifaces = Vec::new();
    for i in 0..n_ifaces {
        let n_sigs = rng.gen_range(1..=2);
        let mut sigs = Vec::new();
        for j in 0..n_sigs {
            let n_params = rng.gen_range(0..=2);
            let params = (0..n_params)
                .map(|_| POOL_BUILTINS[rng.gen_range(0..4)].to_string())
                .collect();
            let ret = if rng.gen_bool(0.3) {
                None
            } else {
                Some(POOL_BUILTINS[rng.gen_range(0..4)].to_string())
            };
            sigs.push(SigInfo { name: format!("im{i}x{j}"), params, ret });
        }
        ifaces.push(IfaceInfo { name: format!("I{i}"), sigs });
    }

    let n_classes = rng.gen_range(2..=4);
    let mut classes: Vec<ClassInfo> = Vec::new();
    for c in 0..n_classes {
        // A rare deliberate flaw: extending an interface.
        let superclass = if !ifaces.is_empty() && rng.gen_bool(0.04) {
            ifaces[rng.gen_range(0..ifaces.len())].name.clone()
        } else if c > 0 && rng.gen_bool(0.4) {
            classes[rng.gen_range(0..c)].name.clone()
        } else {
            "Object".to_string()
        };
        let impls: Vec<usize> = (0..ifaces.len()).filter(|_| rng.gen_bool(0.3)).collect();
        let n_fields = rng.gen_range(0..=3);
        let mut fields = Vec::new();
        for f in 0..n_fields {
            let ty = if rng.gen_bool(0.7) {
                POOL_BUILTINS[rng.gen_range(0..4)].to_string()
            } else if !classes.is_empty() {
                classes[rng.gen_range(0..classes.len())].name.clone()
            } else {
                "Integer".to_string()
            };
            fields.push((format!("f{f}"), ty));
        }
        let ctor = if rng.gen_bool(0.5) {
            let n = rng.gen_range(0..=fields.len());
            Some(fields.iter().take(n).map(|(_, t)| t.clone()).collect())
        } else {
            None
        };
        classes.push(ClassInfo {
            name: format!("C{c}"),
            superclass,
            impls,
            fields,
            ctor,
            methods: Vec::new(),
        });
    }

    // Methods are planned once every type name exists.
    let type_pool: Vec<String> = POOL_BUILTINS
        .iter()
        .map(|s| s.to_string())
        .chain(classes.iter().map(|c| c.name.clone()))
        .chain(ifaces.iter().map(|i| i.name.clone()))
        .collect();
    for c in 0..classes.len() {
        let mut methods = Vec::new();
        for ii in classes[c].impls.clone() {
            for s in ifaces[ii].sigs.clone() {
                let roll: f64 = rng.gen();
                if roll < 0.82 {
                    methods.push(MethodPlan {
                        name: s.name,
                        is_static: false,
                        params: s.params,
                        ret: s.ret,
                    });
                } else if roll < 0.91 {
                    // Shape clash with the signature: a flipped return
                    // or an extra parameter.
                    if rng.gen_bool(0.5) {
                        let ret = match s.ret {
                            None => Some("Integer".to_string()),
                            Some(_) => None,
                        };
                        methods.push(MethodPlan {
                            name: s.name,
                            is_static: false,
                            params: s.params,
                            ret,
                        });
                    } else {
                        let mut params = s.params;
                        params.push("Integer".to_string());
                        methods.push(MethodPlan {
                            name: s.name,
                            is_static: false,
                            params,
                            ret: s.ret,
                        });
                    }
                } // otherwise the obligation is left unimplemented
            }
        }
        let n_own = rng.gen_range(1..=3);
        for m in 0..n_own {
            let n_params = rng.gen_range(0..=2);
            methods.push(MethodPlan {
                name: format!("m{m}"),
                is_static: rng.gen_bool(0.2),
                params: (0..n_params)
                    .map(|_| type_pool[rng.gen_range(0..type_pool.len())].clone())
                    .collect(),
                ret: if rng.gen_bool(0.35) {
                    None
                } else {
                    Some(type_pool[rng.gen_range(0..type_pool.len())].clone())
                },
            });
        }
        classes[c].methods = methods;
    }

    Skeleton { classes, ifaces }
}

struct Ctx<'a> {
    rng: &'a mut ChaCha8Rng,
    sk: &'a Skeleton,
    /// Remaining deliberate flaws to inject into bodies.
    corruptions: u32,
}

type Env = Vec<(String, String)>;

impl<'a> Ctx<'a> {
    fn class_index(&self, name: &str) -> Option<usize> {
        self.sk.classes.iter().position(|c| c.name == name)
    }

    fn type_pool(&self) -> Vec<String> {
        POOL_BUILTINS
            .iter()
            .map(|s| s.to_string())
            .chain(self.sk.classes.iter().map(|c| c.name.clone()))
            .chain(self.sk.ifaces.iter().map(|i| i.name.clone()))
            .collect()
    }

    fn pick_type(&mut self) -> String {
        let pool = self.type_pool();
        pool[self.rng.gen_range(0..pool.len())].clone()
    }

    /// Planned-hierarchy subtyping, used to build sound expressions.
    fn sk_sub(&self, a: &str, b: &str) -> bool {
        if a == b || b == "Object" {
            return true;
        }
        let mut cur = a.to_string();
        let mut guard = 0;
        while let Some(ci) = self.class_index(&cur) {
            guard += 1;
            if guard > self.sk.classes.len() + 1 {
                return false;
            }
            let c = &self.sk.classes[ci];
            if c.impls.iter().any(|&ii| self.sk.ifaces[ii].name == b) {
                return true;
            }
            if c.superclass == b {
                return true;
            }
            cur = c.superclass.clone();
        }
        false
    }

    fn classes_at_or_below(&self, ty: &str) -> Vec<usize> {
        (0..self.sk.classes.len())
            .filter(|&i| self.sk_sub(&self.sk.classes[i].name, ty))
            .collect()
    }

    /// Swaps the requested type occasionally, producing programs the
    /// checker should not accept (some swaps stay benign).
    fn maybe_corrupt(&mut self, ty: &str) -> String {
        if self.corruptions > 0 && self.rng.gen_bool(0.1) {
            self.corruptions -= 1;
            let mut other = self.pick_type();
            for _ in 0..4 {
                if other != ty {
                    break;
                }
                other = self.pick_type();
            }
            other
        } else {
            ty.to_string()
        }
    }

    fn expr_of(&mut self, want: &str, env: &Env, this_class: Option<usize>, depth: u32) -> Expr {
        let ty = self.maybe_corrupt(want);
        if self.corruptions > 0 && depth > 0 && self.rng.gen_bool(0.05) {
            // Spend the budget before descending: nested expressions
            // may consume it too.
            self.corruptions -= 1;
            if let Some(e) = self.void_call(env, this_class, depth) {
                return e;
            }
            self.corruptions += 1;
        }
        self.expr_exact(&ty, env, this_class, depth)
    }

    /// An expression whose static type is `ty` (or a subtype), built
    /// without further corruption at this node.
    fn expr_exact(&mut self, ty: &str, env: &Env, this_class: Option<usize>, depth: u32) -> Expr {
        let vars: Vec<String> =
            env.iter().filter(|(_, t)| t == ty).map(|(n, _)| n.clone()).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.45) {
            return Expr::Var(vars[self.rng.gen_range(0..vars.len())].clone());
        }
        if let Some(ci) = this_class {
            let fields: Vec<String> = self.sk.classes[ci]
                .fields
                .iter()
                .filter(|(_, t)| t == ty)
                .map(|(n, _)| n.clone())
                .collect();
            if !fields.is_empty() && self.rng.gen_bool(0.4) {
                let f = &fields[self.rng.gen_range(0..fields.len())];
                return Expr::Field { recv: Box::new(Expr::This), name: Name::concrete(f) };
            }
        }
        if depth > 0 && self.rng.gen_bool(0.3) {
            if let Some(e) = self.member_source(ty, env, this_class, depth) {
                return e;
            }
        }
        if depth > 0 && self.rng.gen_bool(0.12) {
            if let Some(e) = self.cast_source(ty, env, this_class) {
                return e;
            }
        }
        match ty {
            "Integer" => {
                if depth > 0 && self.rng.gen_bool(0.35) {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul][self.rng.gen_range(0..3)];
                    Expr::Binary {
                        op,
                        lhs: Box::new(self.expr_of("Integer", env, this_class, depth - 1)),
                        rhs: Box::new(self.expr_of("Integer", env, this_class, depth - 1)),
                    }
                } else {
                    Expr::Int(self.rng.gen_range(0..50))
                }
            }
            "String" => {
                if depth > 0 && self.rng.gen_bool(0.25) {
                    Expr::Call {
                        recv: Box::new(self.expr_of("String", env, this_class, depth - 1)),
                        name: Name::concrete("concat"),
                        args: vec![self.expr_of("String", env, this_class, depth - 1)],
                    }
                } else if depth > 0 && self.rng.gen_bool(0.2) {
                    Expr::Call {
                        recv: Box::new(self.expr_of("Integer", env, this_class, depth - 1)),
                        name: Name::concrete("toString"),
                        args: vec![],
                    }
                } else {
                    let words = ["a", "bc", "tag\n", "x\"y", "p\\q"];
                    Expr::Str(words[self.rng.gen_range(0..words.len())].to_string())
                }
            }
            "Boolean" => {
                if depth > 0 && self.rng.gen_bool(0.3) {
                    let op = [BinOp::Lt, BinOp::Le][self.rng.gen_range(0..2)];
                    Expr::Binary {
                        op,
                        lhs: Box::new(self.expr_of("Integer", env, this_class, depth - 1)),
                        rhs: Box::new(self.expr_of("Integer", env, this_class, depth - 1)),
                    }
                } else if depth > 0 && self.rng.gen_bool(0.3) {
                    let shared = self.pick_type();
                    let op = if self.rng.gen_bool(0.5) { BinOp::Eq } else { BinOp::Ne };
                    Expr::Binary {
                        op,
                        lhs: Box::new(self.expr_of(&shared, env, this_class, depth - 1)),
                        rhs: Box::new(self.expr_of(&shared, env, this_class, depth - 1)),
                    }
                } else {
                    Expr::Bool(self.rng.gen_bool(0.5))
                }
            }
            "List" => Expr::New { class: Name::concrete("List"), args: vec![] },
            "Object" => {
                let inner = if self.rng.gen_bool(0.6) {
                    POOL_BUILTINS[self.rng.gen_range(0..4)].to_string()
                } else {
                    let i = self.rng.gen_range(0..self.sk.classes.len());
                    self.sk.classes[i].name.clone()
                };
                self.expr_exact(&inner, env, this_class, depth.saturating_sub(1))
            }
            other => {
                // A declared class or interface.
                if depth == 0 || self.rng.gen_bool(0.25) {
                    return Expr::Null;
                }
                let below = self.classes_at_or_below(other);
                if below.is_empty() {
                    return Expr::Null;
                }
                let ci = below[self.rng.gen_range(0..below.len())];
                self.instance_of(ci, env, this_class, depth - 1)
            }
        }
    }

    fn instance_of(&mut self, ci: usize, env: &Env, this_class: Option<usize>, depth: u32) -> Expr {
        let class = self.sk.classes[ci].name.clone();
        let ptypes = self.sk.classes[ci].ctor.clone().unwrap_or_default();
        let args = ptypes
            .iter()
            .map(|p| self.expr_of(p, env, this_class, depth.min(1)))
            .collect();
        Expr::New { class: Name::concrete(&class), args }
    }

    /// A field read or method call on some object that yields `ty`.
    fn member_source(
        &mut self,
        ty: &str,
        env: &Env,
        this_class: Option<usize>,
        depth: u32,
    ) -> Option<Expr> {
        enum Src {
            Field(usize, String),
            Call(usize, usize),
            Static(usize, usize),
            ISig(usize, usize),
        }
        let mut cands = Vec::new();
        for (ci, c) in self.sk.classes.iter().enumerate() {
            for (f, t) in &c.fields {
                if t == ty {
                    cands.push(Src::Field(ci, f.clone()));
                }
            }
            for (mi, m) in c.methods.iter().enumerate() {
                if m.ret.as_deref() == Some(ty) {
                    if m.is_static {
                        cands.push(Src::Static(ci, mi));
                    } else {
                        cands.push(Src::Call(ci, mi));
                    }
                }
            }
        }
        for (ii, i) in self.sk.ifaces.iter().enumerate() {
            for (si, s) in i.sigs.iter().enumerate() {
                if s.ret.as_deref() == Some(ty) {
                    cands.push(Src::ISig(ii, si));
                }
            }
        }
        if cands.is_empty() {
            return None;
        }
        let pick = cands.swap_remove(self.rng.gen_range(0..cands.len()));
        Some(match pick {
            Src::Field(ci, f) => {
                let recv = self.receiver(ci, env, this_class, depth);
                Expr::Field { recv: Box::new(recv), name: Name::concrete(&f) }
            }
            Src::Call(ci, mi) => {
                let params = self.sk.classes[ci].methods[mi].params.clone();
                let name = self.sk.classes[ci].methods[mi].name.clone();
                let recv = self.receiver(ci, env, this_class, depth);
                let args =
                    params.iter().map(|p| self.expr_of(p, env, this_class, depth - 1)).collect();
                Expr::Call { recv: Box::new(recv), name: Name::concrete(&name), args }
            }
            Src::ISig(ii, si) => {
                let iname = self.sk.ifaces[ii].name.clone();
                let sig = self.sk.ifaces[ii].sigs[si].clone();
                let recv = self.iface_receiver(&iname, env, this_class, depth);
                let args = sig
                    .params
                    .iter()
                    .map(|p| self.expr_of(p, env, this_class, depth - 1))
                    .collect();
                Expr::Call { recv: Box::new(recv), name: Name::concrete(&sig.name), args }
            }
            Src::Static(ci, mi) => {
                let params = self.sk.classes[ci].methods[mi].params.clone();
                let name = self.sk.classes[ci].methods[mi].name.clone();
                let class = self.sk.classes[ci].name.clone();
                let args =
                    params.iter().map(|p| self.expr_of(p, env, this_class, depth - 1)).collect();
                Expr::StaticCall {
                    class: Name::concrete(&class),
                    name: Name::concrete(&name),
                    args,
                }
            }
        })
    }

    fn receiver(&mut self, ci: usize, env: &Env, this_class: Option<usize>, depth: u32) -> Expr {
        if this_class == Some(ci) && self.rng.gen_bool(0.5) {
            Expr::This
        } else {
            let class = self.sk.classes[ci].name.clone();
            self.expr_of(&class, env, this_class, depth - 1)
        }
    }

    /// A value statically typed as the interface itself (rather than as
    /// some implementing class).
    fn iface_receiver(
        &mut self,
        iname: &str,
        env: &Env,
        this_class: Option<usize>,
        depth: u32,
    ) -> Expr {
        let vars: Vec<String> =
            env.iter().filter(|(_, t)| t == iname).map(|(n, _)| n.clone()).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.5) {
            return Expr::Var(vars[self.rng.gen_range(0..vars.len())].clone());
        }
        if self.rng.gen_bool(0.4) {
            // Upcasts are rejected here, so the only always-available
            // interface-typed expression is a cast of an `Object`-bound
            // call result.
            return Expr::Cast {
                ty: Name::concrete(iname),
                expr: Box::new(Expr::Call {
                    recv: Box::new(Expr::New { class: Name::concrete("List"), args: vec![] }),
                    name: Name::concrete("get"),
                    args: vec![Expr::Int(0)],
                }),
            };
        }
        self.expr_of(iname, env, this_class, depth.saturating_sub(1))
    }

    /// A downcast producing `ty`: from a variable or field typed as a
    /// supertype, or from a `List.get` result (which admits any cast).
    fn cast_source(&mut self, ty: &str, env: &Env, this_class: Option<usize>) -> Option<Expr> {
        if !self.type_pool().iter().any(|t| t == ty) {
            return None;
        }
        let mut inners: Vec<Expr> = Vec::new();
        for (v, t) in env {
            if t != ty && self.sk_sub(ty, t) {
                inners.push(Expr::Var(v.clone()));
            }
        }
        if let Some(ci) = this_class {
            for (f, t) in &self.sk.classes[ci].fields {
                if t != ty && self.sk_sub(ty, t) {
                    inners.push(Expr::Field {
                        recv: Box::new(Expr::This),
                        name: Name::concrete(f),
                    });
                }
            }
        }
        inners.push(Expr::Call {
            recv: Box::new(Expr::New { class: Name::concrete("List"), args: vec![] }),
            name: Name::concrete("get"),
            args: vec![Expr::Int(0)],
        });
        // Any call result may be cast, even to a type unrelated to the
        // declared return: the cast constrains the value further but
        // never re-judges it.
        let mut calls = Vec::new();
        for (ci, c) in self.sk.classes.iter().enumerate() {
            for (mi, m) in c.methods.iter().enumerate() {
                if m.ret.is_some() {
                    calls.push((ci, mi));
                }
            }
        }
        if !calls.is_empty() {
            let (ci, mi) = calls[self.rng.gen_range(0..calls.len())];
            let name = self.sk.classes[ci].methods[mi].name.clone();
            let params = self.sk.classes[ci].methods[mi].params.clone();
            let is_static = self.sk.classes[ci].methods[mi].is_static;
            let args: Vec<Expr> =
                params.iter().map(|p| self.expr_exact(p, env, this_class, 0)).collect();
            inners.push(if is_static {
                let class = self.sk.classes[ci].name.clone();
                Expr::StaticCall {
                    class: Name::concrete(&class),
                    name: Name::concrete(&name),
                    args,
                }
            } else {
                let recv = if this_class == Some(ci) && self.rng.gen_bool(0.5) {
                    Expr::This
                } else {
                    self.instance_of(ci, env, this_class, 0)
                };
                Expr::Call { recv: Box::new(recv), name: Name::concrete(&name), args }
            });
        }
        let inner = inners.swap_remove(self.rng.gen_range(0..inners.len()));
        Some(Expr::Cast { ty: Name::concrete(ty), expr: Box::new(inner) })
    }

    /// A call to some planned void method, for use where a value is
    /// expected.
    fn void_call(&mut self, env: &Env, this_class: Option<usize>, depth: u32) -> Option<Expr> {
        enum Vc {
            Method(usize, usize),
            Sig(usize, usize),
        }
        let mut cands = Vec::new();
        for (ci, c) in self.sk.classes.iter().enumerate() {
            for (mi, m) in c.methods.iter().enumerate() {
                if m.ret.is_none() {
                    cands.push(Vc::Method(ci, mi));
                }
            }
        }
        for (ii, i) in self.sk.ifaces.iter().enumerate() {
            for (si, s) in i.sigs.iter().enumerate() {
                if s.ret.is_none() {
                    cands.push(Vc::Sig(ii, si));
                }
            }
        }
        if cands.is_empty() {
            return None;
        }
        match cands.swap_remove(self.rng.gen_range(0..cands.len())) {
            Vc::Method(ci, mi) => {
                let m = &self.sk.classes[ci].methods[mi];
                let name = m.name.clone();
                let params = m.params.clone();
                let is_static = m.is_static;
                let class = self.sk.classes[ci].name.clone();
                let args: Vec<Expr> = params
                    .iter()
                    .map(|p| self.expr_exact(p, env, this_class, depth - 1))
                    .collect();
                Some(if is_static {
                    Expr::StaticCall {
                        class: Name::concrete(&class),
                        name: Name::concrete(&name),
                        args,
                    }
                } else {
                    let recv = if this_class == Some(ci) {
                        Expr::This
                    } else {
                        self.expr_exact(&class, env, this_class, depth - 1)
                    };
                    Expr::Call { recv: Box::new(recv), name: Name::concrete(&name), args }
                })
            }
            Vc::Sig(ii, si) => {
                let iname = self.sk.ifaces[ii].name.clone();
                let sig = self.sk.ifaces[ii].sigs[si].clone();
                let recv = self.iface_receiver(&iname, env, this_class, depth);
                let args: Vec<Expr> = sig
                    .params
                    .iter()
                    .map(|p| self.expr_exact(p, env, this_class, depth - 1))
                    .collect();
                Some(Expr::Call { recv: Box::new(recv), name: Name::concrete(&sig.name), args })
            }
        }
    }

    fn stmt(&mut self, env: &mut Env, this_class: Option<usize>, next_local: &mut u32) -> Stmt {
        match self.rng.gen_range(0..7) {
            0 | 1 => {
                let ty = self.pick_type();
                let name = format!("v{}", *next_local);
                *next_local += 1;
                let init = self.expr_of(&ty, env, this_class, 2);
                env.push((name.clone(), ty.clone()));
                Stmt::Local { ty: Name::concrete(&ty), name, init }
            }
            2 if !env.is_empty() => {
                let i = self.rng.gen_range(0..env.len());
                let (name, ty) = env[i].clone();
                let value = self.expr_of(&ty, env, this_class, 2);
                Stmt::Assign { target: LValue::Var(name), value }
            }
            3 if this_class.map_or(false, |ci| !self.sk.classes[ci].fields.is_empty()) => {
                let info = &self.sk.classes[this_class.unwrap()];
                let (f, ty) = info.fields[self.rng.gen_range(0..info.fields.len())].clone();
                let value = self.expr_of(&ty, env, this_class, 2);
                Stmt::Assign {
                    target: LValue::Field { recv: Expr::This, name: Name::concrete(&f) },
                    value,
                }
            }
            4 => {
                let cond = self.expr_of("Boolean", env, this_class, 2);
                let mut inner = env.clone();
                let body = vec![self.stmt(&mut inner, this_class, next_local)];
                Stmt::If { cond, then_body: body, else_body: vec![] }
            }
            5 => {
                let cond = self.expr_of("Boolean", env, this_class, 2);
                let mut inner = env.clone();
                let body = vec![self.stmt(&mut inner, this_class, next_local)];
                Stmt::While { cond, body }
            }
            _ => {
                if self.rng.gen_bool(0.5) {
                    if let Some(e) = self.call_stmt(env, this_class) {
                        return Stmt::Expr(e);
                    }
                }
                Stmt::Assert(self.expr_of("Boolean", env, this_class, 2))
            }
        }
    }

    /// A statement-position call, result discarded; void methods are
    /// fair game here.
    fn call_stmt(&mut self, env: &Env, this_class: Option<usize>) -> Option<Expr> {
        let mut cands = Vec::new();
        for (ci, c) in self.sk.classes.iter().enumerate() {
            for mi in 0..c.methods.len() {
                cands.push((ci, mi));
            }
        }
        if cands.is_empty() {
            return None;
        }
        let (ci, mi) = cands[self.rng.gen_range(0..cands.len())];
        let m = &self.sk.classes[ci].methods[mi];
        let name = m.name.clone();
        let params = m.params.clone();
        let is_static = m.is_static;
        let args: Vec<Expr> =
            params.iter().map(|p| self.expr_of(p, env, this_class, 1)).collect();
        Some(if is_static {
            let class = self.sk.classes[ci].name.clone();
            Expr::StaticCall { class: Name::concrete(&class), name: Name::concrete(&name), args }
        } else {
            let recv = self.receiver(ci, env, this_class, 2);
            Expr::Call { recv: Box::new(recv), name: Name::concrete(&name), args }
        })
    }

    /// One statement carrying a deliberate flaw, or `None` when the
    /// chosen kind is not expressible in this skeleton.
    fn corrupt_stmt(&mut self, env: &Env, this_class: Option<usize>) -> Option<Stmt> {
        match self.rng.gen_range(0..10) {
            0 => {
                // A member nothing declares.
                let ci = self.rng.gen_range(0..self.sk.classes.len());
                let recv = self.instance_of(ci, env, this_class, 1);
                Some(Stmt::Expr(Expr::Call {
                    recv: Box::new(recv),
                    name: Name::concrete("zz9"),
                    args: vec![],
                }))
            }
            1 => {
                if self.sk.ifaces.is_empty() {
                    return None;
                }
                let i = self.rng.gen_range(0..self.sk.ifaces.len());
                let name = self.sk.ifaces[i].name.clone();
                Some(Stmt::Expr(Expr::New { class: Name::concrete(&name), args: vec![] }))
            }
            2 => {
                // One constructor argument too many.
                let ci = self.rng.gen_range(0..self.sk.classes.len());
                let arity = self.sk.classes[ci].ctor.as_ref().map_or(0, |p| p.len());
                let name = self.sk.classes[ci].name.clone();
                let args = (0..arity + 1).map(|_| Expr::Int(1)).collect();
                Some(Stmt::Expr(Expr::New { class: Name::concrete(&name), args }))
            }
            4 => {
                // An undeclared signature, reached through a receiver
                // statically typed as the interface. Repairable: the
                // interface can still grow a signature.
                let v = self.iface_var(env)?;
                Some(Stmt::Expr(Expr::Call {
                    recv: Box::new(Expr::Var(v)),
                    name: Name::concrete("zz9"),
                    args: vec![],
                }))
            }
            5 => {
                // A field access on an interface value. Interfaces can
                // never gain fields, so this is beyond repair.
                let v = self.iface_var(env)?;
                Some(Stmt::Expr(Expr::Field {
                    recv: Box::new(Expr::Var(v)),
                    name: Name::concrete("f0"),
                }))
            }
            6 => {
                // Built-in constructor misuse.
                Some(Stmt::Expr(if self.rng.gen_bool(0.5) {
                    let t = ["Integer", "String", "Boolean"][self.rng.gen_range(0..3)];
                    Expr::New { class: Name::concrete(t), args: vec![] }
                } else {
                    Expr::New { class: Name::concrete("List"), args: vec![Expr::Int(3)] }
                }))
            }
            7 => {
                // Calling the constructor as a method, with an argument
                // the implicit zero-parameter form cannot take.
                // Repairable by composing in a real constructor.
                let imps: Vec<usize> = (0..self.sk.classes.len())
                    .filter(|&ci| self.sk.classes[ci].ctor.is_none())
                    .collect();
                if imps.is_empty() {
                    return None;
                }
                let ci = imps[self.rng.gen_range(0..imps.len())];
                let name = self.sk.classes[ci].name.clone();
                let recv = self.instance_of(ci, env, this_class, 0);
                Some(Stmt::Expr(Expr::Call {
                    recv: Box::new(recv),
                    name: Name::concrete(&name),
                    args: vec![Expr::Int(1)],
                }))
            }
            8 => {
                // A cast that is not a downcast. Unlike a call result, a
                // variable's type is committed, so this cannot pass.
                let mut pool: Vec<(Expr, String)> = env
                    .iter()
                    .map(|(n, t)| (Expr::Var(n.clone()), t.clone()))
                    .collect();
                if let Some(ci) = this_class {
                    pool.extend(self.sk.classes[ci].fields.iter().map(|(f, t)| {
                        (
                            Expr::Field {
                                recv: Box::new(Expr::This),
                                name: Name::concrete(f),
                            },
                            t.clone(),
                        )
                    }));
                }
                if pool.is_empty() {
                    return None;
                }
                let (e, t) = pool.swap_remove(self.rng.gen_range(0..pool.len()));
                for _ in 0..8 {
                    let target = self.pick_type();
                    if !self.sk_sub(&target, &t) {
                        return Some(Stmt::Expr(Expr::Cast {
                            ty: Name::concrete(&target),
                            expr: Box::new(e),
                        }));
                    }
                }
                None
            }
            9 => {
                // Casting a void result: no extension supplies a value.
                enum Vc {
                    M(usize, usize),
                    S(usize, usize),
                }
                let mut cands = Vec::new();
                for (ci, c) in self.sk.classes.iter().enumerate() {
                    for (mi, m) in c.methods.iter().enumerate() {
                        if m.ret.is_none() {
                            cands.push(Vc::M(ci, mi));
                        }
                    }
                }
                for (ii, i) in self.sk.ifaces.iter().enumerate() {
                    for (si, s) in i.sigs.iter().enumerate() {
                        if s.ret.is_none() {
                            cands.push(Vc::S(ii, si));
                        }
                    }
                }
                if cands.is_empty() {
                    return None;
                }
                let inner = match cands.swap_remove(self.rng.gen_range(0..cands.len())) {
                    Vc::M(ci, mi) => {
                        let name = self.sk.classes[ci].methods[mi].name.clone();
                        let params = self.sk.classes[ci].methods[mi].params.clone();
                        let is_static = self.sk.classes[ci].methods[mi].is_static;
                        let class = self.sk.classes[ci].name.clone();
                        let args: Vec<Expr> = params
                            .iter()
                            .map(|p| self.expr_exact(p, env, this_class, 0))
                            .collect();
                        if is_static {
                            Expr::StaticCall {
                                class: Name::concrete(&class),
                                name: Name::concrete(&name),
                                args,
                            }
                        } else {
                            let recv = self.instance_of(ci, env, this_class, 0);
                            Expr::Call {
                                recv: Box::new(recv),
                                name: Name::concrete(&name),
                                args,
                            }
                        }
                    }
                    Vc::S(ii, si) => {
                        let iname = self.sk.ifaces[ii].name.clone();
                        let sig = self.sk.ifaces[ii].sigs[si].clone();
                        let recv = Expr::Cast {
                            ty: Name::concrete(&iname),
                            expr: Box::new(Expr::Call {
                                recv: Box::new(Expr::New {
                                    class: Name::concrete("List"),
                                    args: vec![],
                                }),
                                name: Name::concrete("get"),
                                args: vec![Expr::Int(0)],
                            }),
                        };
                        let args: Vec<Expr> = sig
                            .params
                            .iter()
                            .map(|p| self.expr_exact(p, env, this_class, 0))
                            .collect();
                        Expr::Call {
                            recv: Box::new(recv),
                            name: Name::concrete(&sig.name),
                            args,
                        }
                    }
                };
                let target = self.pick_type();
                Some(Stmt::Expr(Expr::Cast {
                    ty: Name::concrete(&target),
                    expr: Box::new(inner),
                }))
            }
            _ => {
                // A field used as a method, own or inherited.
                let ci = this_class?;
                let mut fields: Vec<String> = Vec::new();
                let mut cur = ci;
                loop {
                    fields.extend(self.sk.classes[cur].fields.iter().map(|(f, _)| f.clone()));
                    let sup = self.sk.classes[cur].superclass.clone();
                    match self.class_index(&sup) {
                        Some(next) => cur = next,
                        None => break,
                    }
                }
                if fields.is_empty() {
                    return None;
                }
                let f = fields.swap_remove(self.rng.gen_range(0..fields.len()));
                Some(Stmt::Expr(Expr::Call {
                    recv: Box::new(Expr::This),
                    name: Name::concrete(&f),
                    args: vec![],
                }))
            }
        }
    }

    fn iface_var(&mut self, env: &Env) -> Option<String> {
        let vars: Vec<String> = env
            .iter()
            .filter(|(_, t)| self.sk.ifaces.iter().any(|i| &i.name == t))
            .map(|(n, _)| n.clone())
            .collect();
        if vars.is_empty() {
            None
        } else {
            Some(vars[self.rng.gen_range(0..vars.len())].clone())
        }
    }

    fn body(&mut self, params: &Env, ret: Option<&str>, this_class: Option<usize>) -> Vec<Stmt> {
        let mut env: Env = params.clone();
        let mut next_local = 0u32;
        let n = self.rng.gen_range(0..4);
        let mut out = Vec::new();
        for _ in 0..n {
            out.push(self.stmt(&mut env, this_class, &mut next_local));
        }
        if self.corruptions > 0 && self.rng.gen_bool(0.3) {
            self.corruptions -= 1;
            match self.corrupt_stmt(&env, this_class) {
                Some(s) => out.push(s),
                None => self.corruptions += 1,
            }
        }
        match ret {
            Some(ty) if self.rng.gen_bool(0.9) => {
                let e = self.expr_of(ty, &env, this_class, 2);
                out.push(Stmt::Return(Some(e)));
            }
            None if self.rng.gen_bool(0.2) => out.push(Stmt::Return(None)),
            _ => {}
        }
        out
    }
}

fn ret_type(ret: &Option<String>) -> RetType {
    match ret {
        None => RetType::Void,
        Some(t) => RetType::Name(Name::concrete(t)),
    }
}

/// Deterministically generates a hole-free program. Roughly half the
/// seeds carry deliberate flaws: type misuses, unimplemented interface
/// obligations, references to undeclared members.
pub fn random_program(seed: u64) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sk = plan(&mut rng);
    let corruptions = if rng.gen_bool(0.45) { rng.gen_range(1..=2) } else { 0 };
    let mut ctx = Ctx { rng: &mut rng, sk: &sk, corruptions };

    let mut decls: Vec<Decl> = Vec::new();
    for info in &sk.ifaces {
        let signatures = info
            .sigs
            .iter()
            .map(|s| Sig {
                ret: ret_type(&s.ret),
                name: Name::concrete(&s.name),
                params: s
                    .params
                    .iter()
                    .enumerate()
                    .map(|(i, t)| Param { ty: Name::concrete(t), name: format!("p{i}") })
                    .collect(),
            })
            .collect();
        decls.push(Decl::Interface(InterfaceDecl {
            annotation: None,
            name: Name::concrete(&info.name),
            signatures,
        }));
    }

    for ci in 0..sk.classes.len() {
        let info = &sk.classes[ci];
        let mut methods: Vec<Method> = Vec::new();
        if let Some(ptypes) = &info.ctor {
            let params: Env =
                ptypes.iter().enumerate().map(|(i, t)| (format!("a{i}"), t.clone())).collect();
            let mut body: Vec<Stmt> = Vec::new();
            for (i, pty) in ptypes.iter().enumerate() {
                if let Some((f, _)) = info.fields.iter().find(|(_, t)| t == pty) {
                    body.push(Stmt::Assign {
                        target: LValue::Field { recv: Expr::This, name: Name::concrete(f) },
                        value: Expr::Var(format!("a{i}")),
                    });
                }
            }
            if ctx.rng.gen_bool(0.3) {
                let mut env = params.clone();
                let mut next_local = 0;
                let extra = ctx.stmt(&mut env, Some(ci), &mut next_local);
                body.push(extra);
            }
            methods.push(Method {
                is_test: false,
                is_static: false,
                is_ctor: true,
                ret: RetType::Name(Name::concrete(&info.name)),
                name: Name::concrete(&info.name),
                params: params
                    .iter()
                    .map(|(n, t)| Param { ty: Name::concrete(t), name: n.clone() })
                    .collect(),
                body,
            });
        }
        for plan in &info.methods {
            let params: Env = plan
                .params
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("p{i}"), t.clone()))
                .collect();
            let this_class = if plan.is_static { None } else { Some(ci) };
            let body = ctx.body(&params, plan.ret.as_deref(), this_class);
            methods.push(Method {
                is_test: false,
                is_static: plan.is_static,
                is_ctor: false,
                ret: ret_type(&plan.ret),
                name: Name::concrete(&plan.name),
                params: params
                    .iter()
                    .map(|(n, t)| Param { ty: Name::concrete(t), name: n.clone() })
                    .collect(),
                body,
            });
        }
        decls.push(Decl::Class(ClassDecl {
            annotation: None,
            name: Name::concrete(&info.name),
            superclass: Name::concrete(&info.superclass),
            interfaces: info
                .impls
                .iter()
                .map(|&ii| Name::concrete(&sk.ifaces[ii].name))
                .collect(),
            fields: info
                .fields
                .iter()
                .map(|(n, t)| Field { ty: Name::concrete(t), name: Name::concrete(n) })
                .collect(),
            methods,
        }));
    }
    Program { decls }
}
