//! Constraint generation.
//!
//! Walks a program and emits the constraints its syntax demands. No
//! solving happens here; unknown names simply flow into constraints
//! that resolution will suspend on.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::*;
use crate::builtins;
use crate::constraints::{Constraint, Ty, VarSupply};
use crate::holes;

/// A program the generator cannot assign meaning to at all, as opposed
/// to one that merely fails to type-check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenError {
    pub msg: String,
}

impl core::fmt::Display for GenError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.msg)
    }
}

impl core::error::Error for GenError {}

/// Emits the typing constraints of a program. Name pattern obligations
/// are not included: they outlive the syntax they came from (filling a
/// hole erases the pattern from the program but not the obligation), so
/// [`name_obligations`] produces them separately and the caller carries
/// them forward.
pub fn generate(program: &Program, supply: &mut VarSupply) -> Result<Vec<Constraint>, GenError> {
    let mut gen = Gen { out: Vec::new(), supply };
    for decl in &program.decls {
        match decl {
            Decl::Class(c) => gen.class(c)?,
            Decl::Interface(i) => gen.interface(i),
        }
    }
    Ok(gen.out)
}

/// The pattern obligations of a program: one `NameMatch` per distinct
/// pattern hole, in first-occurrence order.
pub fn name_obligations(program: &Program) -> Vec<Constraint> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    holes::visit_names(program, &mut |n| {
        if let Name::Pattern(p) = n {
            if seen.insert(p.id) {
                out.push(Constraint::NameMatch(n.clone(), p.pattern.clone()));
            }
        }
    });
    out
}

struct Gen<'a> {
    out: Vec<Constraint>,
    supply: &'a mut VarSupply,
}

struct Env {
    vars: BTreeMap<String, Ty>,
    this: Option<Ty>,
    ret: Ty,
}

impl<'a> Gen<'a> {
    fn push(&mut self, c: Constraint) {
        self.out.push(c);
    }

    fn exists(&mut self, n: &Name) {
        self.push(Constraint::Exists(n.clone()));
    }

    fn class(&mut self, c: &ClassDecl) -> Result<(), GenError> {
        self.exists(&c.superclass);
        for i in &c.interfaces {
            self.exists(i);
            self.push(Constraint::Impl(c.name.clone(), i.clone()));
        }
        for f in &c.fields {
            self.exists(&f.ty);
        }
        for m in &c.methods {
            self.method(c, m)?;
        }
        Ok(())
    }

    fn interface(&mut self, i: &InterfaceDecl) {
        for s in &i.signatures {
            if let RetType::Name(n) = &s.ret {
                self.exists(n);
            }
            for p in &s.params {
                self.exists(&p.ty);
            }
        }
    }

    fn method(&mut self, c: &ClassDecl, m: &Method) -> Result<(), GenError> {
        for p in &m.params {
            self.exists(&p.ty);
        }
        // A constructor's body is checked like a void method's; its
        // member type is `(params) -> Class` but no body expression is
        // expected to produce the class.
        let ret = if m.is_ctor {
            Ty::Void
        } else {
            match &m.ret {
                RetType::Void => Ty::Void,
                RetType::Name(n) => {
                    self.exists(n);
                    Ty::Named(n.clone())
                }
            }
        };
        let mut env = Env {
            vars: m
                .params
                .iter()
                .map(|p| (p.name.clone(), Ty::Named(p.ty.clone())))
                .collect(),
            this: if m.is_static { None } else { Some(Ty::Named(c.name.clone())) },
            ret,
        };
        for s in &m.body {
            self.stmt(s, &mut env, &m.name)?;
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt, env: &mut Env, method: &Name) -> Result<(), GenError> {
        match s {
            Stmt::Local { ty, name, init } => {
                self.exists(ty);
                let t_init = self.expr(init, env, method)?;
                self.push(Constraint::Sub(t_init, Ty::Named(ty.clone())));
                env.vars.insert(name.clone(), Ty::Named(ty.clone()));
            }
            Stmt::Assign { target, value } => {
                let t_val = self.expr(value, env, method)?;
                match target {
                    LValue::Var(x) => {
                        let t_x = env.vars.get(x).cloned().ok_or_else(|| GenError {
                            msg: format!("unknown variable `{x}` in `{method}`"),
                        })?;
                        self.push(Constraint::Sub(t_val, t_x));
                    }
                    LValue::Field { recv, name } => {
                        let t_recv = self.expr(recv, env, method)?;
                        let slot = self.supply.fresh_ty();
                        self.push(Constraint::HasMember {
                            owner: t_recv,
                            member: name.clone(),
                            ty: slot.clone(),
                        });
                        self.push(Constraint::Sub(t_val, slot));
                    }
                }
            }
            Stmt::Expr(e) => {
                self.expr(e, env, method)?;
            }
            Stmt::Return(None) => {
                self.push(Constraint::Sub(Ty::Void, env.ret.clone()));
            }
            Stmt::Return(Some(e)) => {
                let t = self.expr(e, env, method)?;
                self.push(Constraint::Sub(t, env.ret.clone()));
            }
            Stmt::If { cond, then_body, else_body } => {
                let t = self.expr(cond, env, method)?;
                self.push(Constraint::Sub(t, Ty::named(builtins::BOOLEAN)));
                self.scoped(then_body, env, method)?;
                self.scoped(else_body, env, method)?;
            }
            Stmt::While { cond, body } => {
                let t = self.expr(cond, env, method)?;
                self.push(Constraint::Sub(t, Ty::named(builtins::BOOLEAN)));
                self.scoped(body, env, method)?;
            }
            Stmt::For { init, cond, step, body } => {
                let saved = env.vars.clone();
                self.stmt(init, env, method)?;
                let t = self.expr(cond, env, method)?;
                self.push(Constraint::Sub(t, Ty::named(builtins::BOOLEAN)));
                self.stmt(step, env, method)?;
                self.scoped(body, env, method)?;
                env.vars = saved;
            }
            Stmt::Assert(e) => {
                let t = self.expr(e, env, method)?;
                self.push(Constraint::Sub(t, Ty::named(builtins::BOOLEAN)));
            }
        }
        Ok(())
    }

    fn scoped(&mut self, body: &[Stmt], env: &mut Env, method: &Name) -> Result<(), GenError> {
        let saved = env.vars.clone();
        for s in body {
            self.stmt(s, env, method)?;
        }
        env.vars = saved;
        Ok(())
    }

    fn expr(&mut self, e: &Expr, env: &mut Env, method: &Name) -> Result<Ty, GenError> {
        match e {
            Expr::Var(x) => env.vars.get(x).cloned().ok_or_else(|| GenError {
                msg: format!("unknown variable `{x}` in `{method}`"),
            }),
            Expr::This => env.this.clone().ok_or_else(|| GenError {
                msg: format!("`this` used in static method `{method}`"),
            }),
            Expr::Int(_) => Ok(Ty::named(builtins::INTEGER)),
            Expr::Str(_) => Ok(Ty::named(builtins::STRING)),
            Expr::Bool(_) => Ok(Ty::named(builtins::BOOLEAN)),
            Expr::Null => Ok(self.supply.fresh_ty()),
            Expr::Field { recv, name } => {
                let t_recv = self.expr(recv, env, method)?;
                let slot = self.supply.fresh_ty();
                self.push(Constraint::HasMember {
                    owner: t_recv,
                    member: name.clone(),
                    ty: slot.clone(),
                });
                Ok(slot)
            }
            Expr::Call { recv, name, args } => {
                let t_recv = self.expr(recv, env, method)?;
                let t_args = args
                    .iter()
                    .map(|a| self.expr(a, env, method))
                    .collect::<Result<Vec<_>, _>>()?;
                let ret = self.supply.fresh_ty();
                self.push(Constraint::HasMember {
                    owner: t_recv,
                    member: name.clone(),
                    ty: Ty::Arrow(t_args, alloc::boxed::Box::new(ret.clone())),
                });
                Ok(ret)
            }
            Expr::StaticCall { class, name, args } => {
                self.exists(class);
                let t_args = args
                    .iter()
                    .map(|a| self.expr(a, env, method))
                    .collect::<Result<Vec<_>, _>>()?;
                let ret = self.supply.fresh_ty();
                self.push(Constraint::HasMember {
                    owner: Ty::Named(class.clone()),
                    member: name.clone(),
                    ty: Ty::Arrow(t_args, alloc::boxed::Box::new(ret.clone())),
                });
                Ok(ret)
            }
            Expr::New { class, args } => {
                self.exists(class);
                let t_args = args
                    .iter()
                    .map(|a| self.expr(a, env, method))
                    .collect::<Result<Vec<_>, _>>()?;
                self.push(Constraint::HasMember {
                    owner: Ty::Named(class.clone()),
                    member: class.clone(),
                    ty: Ty::Arrow(t_args, alloc::boxed::Box::new(Ty::Named(class.clone()))),
                });
                Ok(Ty::Named(class.clone()))
            }
            Expr::Cast { ty, expr } => {
                let t_e = self.expr(expr, env, method)?;
                self.exists(ty);
                // Downcasts only: the target must be a subtype of the
                // expression's type; the runtime check does the rest.
                self.push(Constraint::Sub(Ty::Named(ty.clone()), t_e));
                Ok(Ty::Named(ty.clone()))
            }
            Expr::Binary { op, lhs, rhs } => {
                let t_l = self.expr(lhs, env, method)?;
                let t_r = self.expr(rhs, env, method)?;
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => {
                        self.push(Constraint::Sub(t_l, Ty::named(builtins::INTEGER)));
                        self.push(Constraint::Sub(t_r, Ty::named(builtins::INTEGER)));
                        Ok(Ty::named(builtins::INTEGER))
                    }
                    BinOp::Lt | BinOp::Le => {
                        self.push(Constraint::Sub(t_l, Ty::named(builtins::INTEGER)));
                        self.push(Constraint::Sub(t_r, Ty::named(builtins::INTEGER)));
                        Ok(Ty::named(builtins::BOOLEAN))
                    }
                    BinOp::Eq | BinOp::Ne => {
                        // Both sides must share some type; nothing more.
                        let common = self.supply.fresh_ty();
                        self.push(Constraint::Sub(t_l, common.clone()));
                        self.push(Constraint::Sub(t_r, common));
                        Ok(Ty::named(builtins::BOOLEAN))
                    }
                }
            }
        }
    }
}
