//! Constraint language shared by generation and resolution.
//!
//! Types are either named (possibly by a hole), inference variables,
//! method arrows, or `void`. Constraints relate them: subtyping, member
//! requirements, interface implementation, type existence, and name
//! pattern obligations.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::Name;
use crate::pattern::NamePattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    Named(Name),
    Var(VarId),
    Arrow(Vec<Ty>, Box<Ty>),
    Void,
}

impl Ty {
    pub fn named(s: &str) -> Ty {
        Ty::Named(Name::concrete(s))
    }

    pub fn as_named(&self) -> Option<&Name> {
        match self {
            Ty::Named(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<VarId> {
        match self {
            Ty::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn mentions_var(&self) -> bool {
        match self {
            Ty::Var(_) => true,
            Ty::Named(_) | Ty::Void => false,
            Ty::Arrow(ps, r) => ps.iter().any(Ty::mentions_var) || r.mentions_var(),
        }
    }

    /// Replaces every occurrence of `v` by `to`.
    pub fn subst_var(&self, v: VarId, to: &Ty) -> Ty {
        match self {
            Ty::Var(w) if *w == v => to.clone(),
            Ty::Arrow(ps, r) => Ty::Arrow(
                ps.iter().map(|p| p.subst_var(v, to)).collect(),
                Box::new(r.subst_var(v, to)),
            ),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    /// `t1 <: t2`
    Sub(Ty, Ty),
    /// `owner <: [member : ty]` — arrow `ty` means a method, anything
    /// else a field.
    HasMember { owner: Ty, member: Name, ty: Ty },
    /// `impl(a, b)` — `a` implements interface `b`.
    Impl(Name, Name),
    /// `exists(a)`
    Exists(Name),
    /// `name |> pattern`
    NameMatch(Name, NamePattern),
}

impl Constraint {
    pub fn mentions_var(&self) -> bool {
        match self {
            Constraint::Sub(a, b) => a.mentions_var() || b.mentions_var(),
            Constraint::HasMember { owner, ty, .. } => owner.mentions_var() || ty.mentions_var(),
            _ => false,
        }
    }

    pub fn subst_var(&self, v: VarId, to: &Ty) -> Constraint {
        match self {
            Constraint::Sub(a, b) => Constraint::Sub(a.subst_var(v, to), b.subst_var(v, to)),
            Constraint::HasMember { owner, member, ty } => Constraint::HasMember {
                owner: owner.subst_var(v, to),
                member: member.clone(),
                ty: ty.subst_var(v, to),
            },
            other => other.clone(),
        }
    }
}

#[derive(Default)]
pub struct VarSupply {
    next: u32,
}

impl VarSupply {
    pub fn fresh(&mut self) -> VarId {
        let v = VarId(self.next);
        self.next += 1;
        v
    }

    pub fn fresh_ty(&mut self) -> Ty {
        Ty::Var(self.fresh())
    }
}

/// What remains after resolution succeeds without contradiction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Residual {
    /// Constraints that could not make progress yet: unknown names,
    /// missing members, undeclared types. Each is a potential goal.
    pub suspended: BTreeSet<Constraint>,
    /// Name pattern obligations still waiting on hole fills.
    pub name_pending: BTreeSet<Constraint>,
    /// Constraints tied to inference variables nobody pinned down.
    /// These never block completion; runtime checks cover them.
    pub var_pending: BTreeSet<Constraint>,
}

impl Residual {
    /// A program is complete when nothing actionable remains; residual
    /// variable constraints are permitted.
    pub fn is_complete(&self) -> bool {
        self.suspended.is_empty() && self.name_pending.is_empty()
    }

    pub fn iter_all(&self) -> impl Iterator<Item = &Constraint> {
        self.suspended.iter().chain(self.name_pending.iter()).chain(self.var_pending.iter())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contradiction {
    pub witness: Constraint,
    pub rule: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Resolved(Residual),
    Contradiction(Contradiction),
}

impl Verdict {
    pub fn residual(&self) -> Option<&Residual> {
        match self {
            Verdict::Resolved(r) => Some(r),
            Verdict::Contradiction(_) => None,
        }
    }
}

impl core::fmt::Display for Ty {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Ty::Named(n) => write!(f, "{n}"),
            Ty::Var(v) => write!(f, "a{}", v.0),
            Ty::Void => write!(f, "void"),
            Ty::Arrow(ps, r) => {
                write!(f, "(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ") -> {r}")
            }
        }
    }
}

impl core::fmt::Display for Constraint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Constraint::Sub(a, b) => write!(f, "{a} <: {b}"),
            Constraint::HasMember { owner, member, ty } => {
                write!(f, "{owner} <: [{member} : {ty}]")
            }
            Constraint::Impl(a, b) => write!(f, "impl({a}, {b})"),
            Constraint::Exists(a) => write!(f, "exists({a})"),
            Constraint::NameMatch(n, p) => write!(f, "{n} |> {p}"),
        }
    }
}

/// Renders a constraint with inference variables blanked out, so the
/// same goal gets the same key across resolutions that number their
/// variables differently.
pub fn canonical_key(c: &Constraint) -> String {
    use core::fmt::Write;
    fn ty(out: &mut String, t: &Ty) {
        match t {
            Ty::Named(n) => {
                let _ = write!(out, "{n}");
            }
            Ty::Var(_) => out.push('_'),
            Ty::Void => out.push_str("void"),
            Ty::Arrow(ps, r) => {
                out.push('(');
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    ty(out, p);
                }
                out.push_str(") -> ");
                ty(out, r);
            }
        }
    }
    let mut out = String::new();
    match c {
        Constraint::Sub(a, b) => {
            ty(&mut out, a);
            out.push_str(" <: ");
            ty(&mut out, b);
        }
        Constraint::HasMember { owner, member, ty: t } => {
            ty(&mut out, owner);
            let _ = write!(out, " <: [{member} : ");
            ty(&mut out, t);
            out.push(']');
        }
        other => {
            let _ = write!(out, "{other}");
        }
    }
    out
}
