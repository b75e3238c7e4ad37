//! Constraint resolution.
//!
//! Regenerates the typing constraints of the current program, then
//! drives them to a fixpoint. Each constraint either discharges,
//! suspends (it cannot be judged yet — an unknown name, a missing
//! member), parks on an inference variable, rewrites into simpler
//! constraints, or contradicts. Suspended constraints are re-examined
//! on every resolution, so progress elsewhere can unblock them.
//!
//! Name pattern obligations are checked only after the typing fixpoint:
//! shape errors win over naming errors when both are present.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::ast::*;
use crate::builtins;
use crate::constraints::*;
use crate::infer::{self, GenError};
use crate::pattern::{check_name_constraint, NameCheck};

/// One resolution step, for transcript output.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub rule: &'static str,
    pub input: Constraint,
    pub outcome: Outcome,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Discharged,
    Suspended,
    VarPending,
    Derived(Vec<Constraint>),
    Contradicted,
}

pub fn resolve(program: &Program, obligations: &[Constraint]) -> Result<Verdict, GenError> {
    resolve_with(program, obligations, &mut |_| {})
}

pub fn resolve_with(
    program: &Program,
    obligations: &[Constraint],
    sink: &mut dyn FnMut(TraceStep),
) -> Result<Verdict, GenError> {
    let ctx = Ctx { program };

    if let Some(contra) = ctx.validate_hierarchy() {
        sink(TraceStep {
            rule: contra.rule,
            input: contra.witness.clone(),
            outcome: Outcome::Contradicted,
        });
        return Ok(Verdict::Contradiction(contra));
    }

    let mut supply = VarSupply::default();
    let generated = infer::generate(program, &mut supply)?;

    let mut active: BTreeSet<Constraint> = generated.into_iter().collect();
    let mut seen: BTreeSet<Constraint> = active.clone();
    let mut suspended: BTreeSet<Constraint> = BTreeSet::new();
    let mut var_pending: BTreeSet<Constraint> = BTreeSet::new();

    loop {
        while let Some(c) = active.pop_first() {
            let (rule, step) = step(&ctx, &c);
            let outcome = match &step {
                Step::Discharge => Outcome::Discharged,
                Step::Suspend => Outcome::Suspended,
                Step::VarPending => Outcome::VarPending,
                Step::Derive(cs) => Outcome::Derived(cs.clone()),
                Step::Contra => Outcome::Contradicted,
            };
            sink(TraceStep { rule, input: c.clone(), outcome });
            match step {
                Step::Discharge => {}
                Step::Suspend => {
                    suspended.insert(c);
                }
                Step::VarPending => {
                    var_pending.insert(c);
                }
                Step::Derive(cs) => {
                    for d in cs {
                        if seen.insert(d.clone()) {
                            active.insert(d);
                        }
                    }
                }
                Step::Contra => {
                    return Ok(Verdict::Contradiction(Contradiction { witness: c, rule }));
                }
            }
        }

        let mut progressed = false;

        // Inference variables forced to void propagate eagerly: `void`
        // has no other relatives, so `void <: a` or `a <: void` pins.
        let voided: BTreeSet<VarId> = var_pending
            .iter()
            .filter_map(|c| match c {
                Constraint::Sub(Ty::Void, Ty::Var(v)) | Constraint::Sub(Ty::Var(v), Ty::Void) => {
                    Some(*v)
                }
                _ => None,
            })
            .collect();
        if !voided.is_empty() {
            let pool: Vec<Constraint> = var_pending.iter().chain(suspended.iter()).cloned().collect();
            for c in pool {
                let mut rewritten = c.clone();
                for v in &voided {
                    rewritten = rewritten.subst_var(*v, &Ty::Void);
                }
                if rewritten != c {
                    var_pending.remove(&c);
                    suspended.remove(&c);
                    sink(TraceStep {
                        rule: "var-void",
                        input: c,
                        outcome: Outcome::Derived(alloc::vec![rewritten.clone()]),
                    });
                    if seen.insert(rewritten.clone()) {
                        active.insert(rewritten);
                    }
                    progressed = true;
                }
            }
        }

        // Transitive closure through variables: `x <: a` and `a <: y`
        // give `x <: y`, which the nominal rules can then judge.
        let lowers: Vec<(VarId, Ty)> = var_pending
            .iter()
            .filter_map(|c| match c {
                Constraint::Sub(x, Ty::Var(v)) => Some((*v, x.clone())),
                _ => None,
            })
            .collect();
        let uppers: Vec<(VarId, Ty)> = var_pending
            .iter()
            .filter_map(|c| match c {
                Constraint::Sub(Ty::Var(v), y) => Some((*v, y.clone())),
                _ => None,
            })
            .collect();
        for (v, x) in &lowers {
            for (w, y) in &uppers {
                if v != w || x == y {
                    continue;
                }
                let derived = Constraint::Sub(x.clone(), y.clone());
                if seen.insert(derived.clone()) {
                    sink(TraceStep {
                        rule: "var-closure",
                        input: Constraint::Sub(x.clone(), Ty::Var(*v)),
                        outcome: Outcome::Derived(alloc::vec![derived.clone()]),
                    });
                    active.insert(derived);
                    progressed = true;
                }
            }
        }

        // Member constraints on a variable owner: once the variable has
        // a definite named bound, ask the member of that name instead.
        let member_goals: Vec<Constraint> = var_pending
            .iter()
            .filter(|c| matches!(c, Constraint::HasMember { owner: Ty::Var(_), .. }))
            .cloned()
            .collect();
        for c in member_goals {
            let (v, member, ty) = match &c {
                Constraint::HasMember { owner: Ty::Var(v), member, ty } => (*v, member, ty),
                _ => unreachable!(),
            };
            let lower: BTreeSet<&Name> = lowers
                .iter()
                .filter(|(w, t)| *w == v && t.as_named().is_some())
                .map(|(_, t)| t.as_named().unwrap())
                .collect();
            let upper: BTreeSet<&Name> = uppers
                .iter()
                .filter(|(w, t)| *w == v && t.as_named().is_some())
                .map(|(_, t)| t.as_named().unwrap())
                .collect();
            let pin = lower
                .intersection(&upper)
                .next()
                .copied()
                .or_else(|| if lower.len() == 1 { lower.first().copied() } else { None });
            if let Some(owner) = pin {
                let derived = Constraint::HasMember {
                    owner: Ty::Named(owner.clone()),
                    member: member.clone(),
                    ty: ty.clone(),
                };
                var_pending.remove(&c);
                sink(TraceStep {
                    rule: "var-pin",
                    input: c,
                    outcome: Outcome::Derived(alloc::vec![derived.clone()]),
                });
                if seen.insert(derived.clone()) {
                    active.insert(derived);
                }
                progressed = true;
            }
        }

        if !progressed {
            break;
        }
    }

    // Typing settled; now the naming obligations.
    let mut name_pending = BTreeSet::new();
    for ob in obligations {
        let (name, pat) = match ob {
            Constraint::NameMatch(n, p) => (n, p),
            other => {
                debug_assert!(false, "non-name obligation {other}");
                continue;
            }
        };
        let (rule, check) = ("name-match", check_name_constraint(name, pat));
        match check {
            NameCheck::Discharged => {
                sink(TraceStep { rule, input: ob.clone(), outcome: Outcome::Discharged });
            }
            NameCheck::Pending => {
                sink(TraceStep { rule, input: ob.clone(), outcome: Outcome::Suspended });
                name_pending.insert(ob.clone());
            }
            NameCheck::Contradiction => {
                sink(TraceStep { rule, input: ob.clone(), outcome: Outcome::Contradicted });
                return Ok(Verdict::Contradiction(Contradiction { witness: ob.clone(), rule }));
            }
        }
    }

    Ok(Verdict::Resolved(Residual { suspended, name_pending, var_pending }))
}

enum Step {
    Discharge,
    Suspend,
    VarPending,
    Derive(Vec<Constraint>),
    Contra,
}

enum TypeInfo<'a> {
    Class(&'a ClassDecl),
    Interface(&'a InterfaceDecl),
    Builtin,
    Undeclared,
}

struct Ctx<'a> {
    program: &'a Program,
}

impl<'a> Ctx<'a> {
    fn info(&self, name: &str) -> TypeInfo<'a> {
        let key = Name::concrete(name);
        match self.program.find_decl(&key) {
            Some(Decl::Class(c)) => TypeInfo::Class(c),
            Some(Decl::Interface(i)) => TypeInfo::Interface(i),
            None if builtins::is_builtin_type(name) => TypeInfo::Builtin,
            None => TypeInfo::Undeclared,
        }
    }

    fn is_known(&self, name: &str) -> bool {
        !matches!(self.info(name), TypeInfo::Undeclared)
    }

    /// Structural sanity of the declaration set itself: duplicate or
    /// builtin-shadowing names, classes extending interfaces, and
    /// inheritance cycles all contradict before any constraint runs.
    fn validate_hierarchy(&self) -> Option<Contradiction> {
        let mut seen_names: BTreeSet<&str> = BTreeSet::new();
        for d in &self.program.decls {
            if let Some(s) = d.name().as_concrete() {
                if builtins::is_builtin_type(s) {
                    return Some(Contradiction {
                        witness: Constraint::Exists(d.name().clone()),
                        rule: "builtin-shadow",
                    });
                }
                if !seen_names.insert(s) {
                    return Some(Contradiction {
                        witness: Constraint::Exists(d.name().clone()),
                        rule: "duplicate-declaration",
                    });
                }
            }
        }
        for d in &self.program.decls {
            let c = match d {
                Decl::Class(c) => c,
                Decl::Interface(_) => continue,
            };
            if let Some(sup) = c.superclass.as_concrete() {
                if matches!(self.info(sup), TypeInfo::Interface(_)) {
                    return Some(Contradiction {
                        witness: Constraint::Sub(
                            Ty::Named(c.name.clone()),
                            Ty::Named(c.superclass.clone()),
                        ),
                        rule: "extends-interface",
                    });
                }
            }
            // Walk the concrete superclass chain looking for a cycle.
            let mut visited: BTreeSet<&str> = BTreeSet::new();
            let mut cur = c;
            loop {
                let name = match cur.name.as_concrete() {
                    Some(s) => s,
                    None => break,
                };
                if !visited.insert(name) {
                    return Some(Contradiction {
                        witness: Constraint::Exists(cur.name.clone()),
                        rule: "inheritance-cycle",
                    });
                }
                let sup = match cur.superclass.as_concrete() {
                    Some(s) => s,
                    None => break,
                };
                match self.info(sup) {
                    TypeInfo::Class(next) => cur = next,
                    _ => break,
                }
            }
        }
        None
    }

    /// Everything `a` is a nominal subtype of, along declared edges.
    /// `saw_unknown` records that the walk hit a hole or undeclared
    /// name, so absence from the set is not yet conclusive.
    fn reach(&self, a: &str) -> (BTreeSet<Name>, bool) {
        let mut out: BTreeSet<Name> = BTreeSet::new();
        let mut saw_unknown = false;
        out.insert(Name::concrete(builtins::OBJECT));
        let mut cur = Name::concrete(a);
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > self.program.decls.len() + builtins::TYPE_NAMES.len() + 2 {
                break;
            }
            out.insert(cur.clone());
            let s = match cur.as_concrete() {
                Some(s) => s,
                None => {
                    saw_unknown = true;
                    break;
                }
            };
            match self.info(s) {
                TypeInfo::Class(c) => {
                    for i in &c.interfaces {
                        match i.as_concrete() {
                            Some(_) => {
                                out.insert(i.clone());
                            }
                            None => saw_unknown = true,
                        }
                    }
                    cur = c.superclass.clone();
                }
                TypeInfo::Interface(_) | TypeInfo::Builtin => {
                    if s != builtins::OBJECT {
                        out.insert(Name::concrete(builtins::OBJECT));
                    }
                    break;
                }
                TypeInfo::Undeclared => {
                    saw_unknown = true;
                    break;
                }
            }
        }
        (out, saw_unknown)
    }
}

fn step(ctx: &Ctx, c: &Constraint) -> (&'static str, Step) {
    match c {
        Constraint::Exists(n) => match n.as_concrete() {
            Some(s) if ctx.is_known(s) => ("exists", Step::Discharge),
            _ => ("exists", Step::Suspend),
        },
        Constraint::Impl(a, b) => step_impl(ctx, a, b),
        Constraint::Sub(t1, t2) => step_sub(ctx, t1, t2),
        Constraint::HasMember { owner, member, ty } => step_member(ctx, owner, member, ty),
        Constraint::NameMatch(n, p) => match check_name_constraint(n, p) {
            NameCheck::Discharged => ("name-match", Step::Discharge),
            NameCheck::Pending => ("name-match", Step::Suspend),
            NameCheck::Contradiction => ("name-match", Step::Contra),
        },
    }
}

fn step_impl(ctx: &Ctx, a: &Name, b: &Name) -> (&'static str, Step) {
    let s = match b.as_concrete() {
        Some(s) => s,
        None => return ("impl", Step::Suspend),
    };
    match ctx.info(s) {
        TypeInfo::Undeclared => ("impl", Step::Suspend),
        TypeInfo::Class(_) | TypeInfo::Builtin => ("impl-on-class", Step::Contra),
        TypeInfo::Interface(i) => {
            // Implementation reduces to one member obligation per
            // signature; those carry the work from here on.
            let derived = i
                .signatures
                .iter()
                .map(|sig| Constraint::HasMember {
                    owner: Ty::Named(a.clone()),
                    member: sig.name.clone(),
                    ty: sig_ty(sig),
                })
                .collect();
            ("impl-expand", Step::Derive(derived))
        }
    }
}

fn sig_ty(sig: &Sig) -> Ty {
    let params = sig.params.iter().map(|p| Ty::Named(p.ty.clone())).collect();
    let ret = match &sig.ret {
        RetType::Void => Ty::Void,
        RetType::Name(n) => Ty::Named(n.clone()),
    };
    Ty::Arrow(params, alloc::boxed::Box::new(ret))
}

fn step_sub(ctx: &Ctx, t1: &Ty, t2: &Ty) -> (&'static str, Step) {
    match (t1, t2) {
        (Ty::Void, Ty::Void) => ("sub-refl", Step::Discharge),
        (Ty::Var(v), Ty::Var(w)) if v == w => ("sub-refl", Step::Discharge),
        (Ty::Var(_), _) | (_, Ty::Var(_)) => ("sub-var", Step::VarPending),
        (Ty::Void, _) | (_, Ty::Void) => ("void-mismatch", Step::Contra),
        (Ty::Arrow(p1, r1), Ty::Arrow(p2, r2)) => {
            if p1.len() != p2.len() {
                return ("arrow-arity", Step::Contra);
            }
            let mut derived: Vec<Constraint> = p2
                .iter()
                .zip(p1.iter())
                .map(|(x, y)| Constraint::Sub(x.clone(), y.clone()))
                .collect();
            derived.push(Constraint::Sub((**r1).clone(), (**r2).clone()));
            ("arrow-pointwise", Step::Derive(derived))
        }
        (Ty::Arrow(..), Ty::Named(_)) | (Ty::Named(_), Ty::Arrow(..)) => {
            ("arrow-vs-named", Step::Contra)
        }
        (Ty::Named(a), Ty::Named(b)) => step_sub_named(ctx, a, b),
    }
}

fn step_sub_named(ctx: &Ctx, a: &Name, b: &Name) -> (&'static str, Step) {
    if a == b {
        return ("sub-refl", Step::Discharge);
    }
    let sa = match a.as_concrete() {
        Some(s) => s,
        None => return ("sub-suspend", Step::Suspend),
    };
    let sb = match b.as_concrete() {
        Some(s) => s,
        None => return ("sub-suspend", Step::Suspend),
    };
    if !ctx.is_known(sa) || !ctx.is_known(sb) {
        return ("sub-suspend", Step::Suspend);
    }
    let (reach, saw_unknown) = ctx.reach(sa);
    if reach.contains(b) {
        ("sub-nominal", Step::Discharge)
    } else if saw_unknown {
        ("sub-suspend", Step::Suspend)
    } else {
        ("sub-nominal", Step::Contra)
    }
}

enum Looked {
    Field { ty: Ty, in_self: bool },
    Method { params: Vec<Ty>, ret: Ty, in_self: bool },
    ImplicitCtor,
    NotFound,
}

fn step_member(ctx: &Ctx, owner: &Ty, member: &Name, ty: &Ty) -> (&'static str, Step) {
    let name = match owner {
        Ty::Var(_) => return ("member-var", Step::VarPending),
        Ty::Void | Ty::Arrow(..) => return ("member-on-non-object", Step::Contra),
        Ty::Named(n) => n,
    };
    let s = match name.as_concrete() {
        Some(s) => s,
        None => return ("member-suspend", Step::Suspend),
    };
    match ctx.info(s) {
        TypeInfo::Undeclared => ("member-suspend", Step::Suspend),
        TypeInfo::Builtin => step_member_builtin(s, member, ty),
        TypeInfo::Interface(i) => step_member_interface(i, member, ty),
        TypeInfo::Class(c) => {
            let looked = lookup_in_class(ctx, c, member);
            judge_lookup(c, looked, ty)
        }
    }
}

fn step_member_builtin(owner: &str, member: &Name, ty: &Ty) -> (&'static str, Step) {
    let m = match member.as_concrete() {
        Some(m) => m,
        // Built-in members are a closed set, but a hole could still be
        // filled with one of them.
        None => return ("member-suspend", Step::Suspend),
    };
    if m == owner {
        // Constructor request.
        let params = match builtins::ctor_params(owner) {
            Some(ps) => ps,
            None => return ("builtin-ctor", Step::Contra),
        };
        return match ty {
            Ty::Arrow(args, ret) if args.len() == params.len() => {
                let mut derived: Vec<Constraint> = args
                    .iter()
                    .zip(params.iter())
                    .map(|(a, p)| Constraint::Sub(a.clone(), Ty::named(p)))
                    .collect();
                derived.push(Constraint::Sub(Ty::named(owner), (**ret).clone()));
                ("member-ctor", Step::Derive(derived))
            }
            _ => ("member-shape", Step::Contra),
        };
    }
    match builtins::lookup_method(owner, m) {
        None => ("builtin-member", Step::Contra),
        Some(decl) => match ty {
            Ty::Arrow(args, ret) if args.len() == decl.params.len() => {
                let mut derived: Vec<Constraint> = args
                    .iter()
                    .zip(decl.params.iter())
                    .map(|(a, p)| Constraint::Sub(a.clone(), Ty::named(p)))
                    .collect();
                derived.push(Constraint::Sub(Ty::named(decl.ret), (**ret).clone()));
                ("member-method", Step::Derive(derived))
            }
            _ => ("member-shape", Step::Contra),
        },
    }
}

fn step_member_interface(i: &InterfaceDecl, member: &Name, ty: &Ty) -> (&'static str, Step) {
    match i.signatures.iter().find(|sig| sig.name == *member) {
        Some(sig) => match ty {
            Ty::Arrow(args, ret) if args.len() == sig.params.len() => {
                let mut derived: Vec<Constraint> = args
                    .iter()
                    .zip(sig.params.iter())
                    .map(|(a, p)| Constraint::Sub(a.clone(), Ty::Named(p.ty.clone())))
                    .collect();
                let declared_ret = match &sig.ret {
                    RetType::Void => Ty::Void,
                    RetType::Name(n) => Ty::Named(n.clone()),
                };
                derived.push(Constraint::Sub(declared_ret, (**ret).clone()));
                ("member-method", Step::Derive(derived))
            }
            // Same-named signatures cannot be added, so a shape clash
            // with an interface's own signature is final.
            _ => ("member-shape", Step::Contra),
        },
        None => {
            if member == &i.name {
                ("new-on-interface", Step::Contra)
            } else if !matches!(ty, Ty::Arrow(..)) {
                // Interfaces can gain signatures but never fields.
                ("member-shape", Step::Contra)
            } else {
                ("member-suspend", Step::Suspend)
            }
        }
    }
}

fn lookup_in_class(ctx: &Ctx, start: &ClassDecl, member: &Name) -> Looked {
    let mut cur = start;
    let mut in_self = true;
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > ctx.program.decls.len() + 2 {
            return Looked::NotFound;
        }
        if let Some(f) = cur.fields.iter().find(|f| f.name == *member) {
            return Looked::Field { ty: Ty::Named(f.ty.clone()), in_self };
        }
        if let Some(m) = cur.methods.iter().find(|m| m.name == *member) {
            let params = m.params.iter().map(|p| Ty::Named(p.ty.clone())).collect();
            let ret = if m.is_ctor {
                Ty::Named(cur.name.clone())
            } else {
                match &m.ret {
                    RetType::Void => Ty::Void,
                    RetType::Name(n) => Ty::Named(n.clone()),
                }
            };
            return Looked::Method { params, ret, in_self };
        }
        // Constructors are not inherited, so the implicit zero-argument
        // one only answers on the class being asked.
        if in_self && *member == cur.name && !cur.methods.iter().any(|m| m.is_ctor) {
            return Looked::ImplicitCtor;
        }
        let sup = match cur.superclass.as_concrete() {
            Some(s) => s,
            None => return Looked::NotFound,
        };
        match ctx.info(sup) {
            TypeInfo::Class(c) => {
                cur = c;
                in_self = false;
            }
            TypeInfo::Builtin => {
                if let Some(m) = member.as_concrete() {
                    if let Some(decl) = builtins::lookup_method(sup, m) {
                        return Looked::Method {
                            params: decl.params.iter().map(|p| Ty::named(p)).collect(),
                            ret: Ty::named(decl.ret),
                            in_self: false,
                        };
                    }
                }
                return Looked::NotFound;
            }
            _ => return Looked::NotFound,
        }
    }
}

fn judge_lookup(class: &ClassDecl, looked: Looked, ty: &Ty) -> (&'static str, Step) {
    let mismatch = |in_self: bool| {
        if in_self {
            ("member-shape", Step::Contra)
        } else {
            // An inherited clash can still be shadowed by a new member
            // on the class itself.
            ("member-suspend", Step::Suspend)
        }
    };
    match looked {
        Looked::NotFound => ("member-suspend", Step::Suspend),
        Looked::ImplicitCtor => match ty {
            Ty::Arrow(args, ret) if args.is_empty() => (
                "member-ctor",
                Step::Derive(alloc::vec![Constraint::Sub(
                    Ty::Named(class.name.clone()),
                    (**ret).clone()
                )]),
            ),
            // A constructor with parameters may still be composed in.
            _ => ("member-suspend", Step::Suspend),
        },
        Looked::Field { ty: fty, in_self } => match ty {
            Ty::Arrow(..) => mismatch(in_self),
            goal => (
                "member-field",
                // Exact on reads, checked on writes: the slot equals
                // the declared field type from both sides.
                Step::Derive(alloc::vec![
                    Constraint::Sub(goal.clone(), fty.clone()),
                    Constraint::Sub(fty, goal.clone()),
                ]),
            ),
        },
        Looked::Method { params, ret, in_self } => match ty {
            Ty::Arrow(args, goal_ret) if args.len() == params.len() => {
                let mut derived: Vec<Constraint> = args
                    .iter()
                    .zip(params.iter())
                    .map(|(a, p)| Constraint::Sub(a.clone(), p.clone()))
                    .collect();
                derived.push(Constraint::Sub(ret, (**goal_ret).clone()));
                ("member-method", Step::Derive(derived))
            }
            _ => mismatch(in_self),
        },
    }
}
