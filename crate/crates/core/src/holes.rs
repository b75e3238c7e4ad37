//! Walkers over every name position in a program.
//!
//! Substitution, freshening, and hole accounting all reduce to "visit
//! each `Name`", so the traversal lives here once.

use alloc::collections::BTreeSet;

use crate::ast::*;

pub fn visit_names(program: &Program, f: &mut dyn FnMut(&Name)) {
    for d in &program.decls {
        visit_decl(d, f);
    }
}

fn visit_decl(decl: &Decl, f: &mut dyn FnMut(&Name)) {
    match decl {
        Decl::Class(c) => {
            f(&c.name);
            f(&c.superclass);
            for i in &c.interfaces {
                f(i);
            }
            for fld in &c.fields {
                f(&fld.ty);
                f(&fld.name);
            }
            for m in &c.methods {
                if let RetType::Name(n) = &m.ret {
                    f(n);
                }
                f(&m.name);
                for p in &m.params {
                    f(&p.ty);
                }
                for s in &m.body {
                    visit_stmt(s, f);
                }
            }
        }
        Decl::Interface(i) => {
            f(&i.name);
            for s in &i.signatures {
                if let RetType::Name(n) = &s.ret {
                    f(n);
                }
                f(&s.name);
                for p in &s.params {
                    f(&p.ty);
                }
            }
        }
    }
}

fn visit_stmt(stmt: &Stmt, f: &mut dyn FnMut(&Name)) {
    match stmt {
        Stmt::Local { ty, init, .. } => {
            f(ty);
            visit_expr(init, f);
        }
        Stmt::Assign { target, value } => {
            if let LValue::Field { recv, name } = target {
                visit_expr(recv, f);
                f(name);
            }
            visit_expr(value, f);
        }
        Stmt::Expr(e) | Stmt::Assert(e) => visit_expr(e, f),
        Stmt::Return(e) => {
            if let Some(e) = e {
                visit_expr(e, f);
            }
        }
        Stmt::If { cond, then_body, else_body } => {
            visit_expr(cond, f);
            for s in then_body {
                visit_stmt(s, f);
            }
            for s in else_body {
                visit_stmt(s, f);
            }
        }
        Stmt::While { cond, body } => {
            visit_expr(cond, f);
            for s in body {
                visit_stmt(s, f);
            }
        }
        Stmt::For { init, cond, step, body } => {
            visit_stmt(init, f);
            visit_expr(cond, f);
            visit_stmt(step, f);
            for s in body {
                visit_stmt(s, f);
            }
        }
    }
}

fn visit_expr(expr: &Expr, f: &mut dyn FnMut(&Name)) {
    match expr {
        Expr::Var(_) | Expr::This | Expr::Int(_) | Expr::Str(_) | Expr::Bool(_) | Expr::Null => {}
        Expr::Field { recv, name } => {
            visit_expr(recv, f);
            f(name);
        }
        Expr::Call { recv, name, args } => {
            visit_expr(recv, f);
            f(name);
            for a in args {
                visit_expr(a, f);
            }
        }
        Expr::StaticCall { class, name, args } => {
            f(class);
            f(name);
            for a in args {
                visit_expr(a, f);
            }
        }
        Expr::New { class, args } => {
            f(class);
            for a in args {
                visit_expr(a, f);
            }
        }
        Expr::Cast { ty, expr } => {
            f(ty);
            visit_expr(expr, f);
        }
        Expr::Binary { lhs, rhs, .. } => {
            visit_expr(lhs, f);
            visit_expr(rhs, f);
        }
    }
}

pub fn visit_names_mut(program: &mut Program, f: &mut dyn FnMut(&mut Name)) {
    for d in &mut program.decls {
        visit_decl_mut(d, f);
    }
}

fn visit_decl_mut(decl: &mut Decl, f: &mut dyn FnMut(&mut Name)) {
    match decl {
        Decl::Class(c) => {
            f(&mut c.name);
            f(&mut c.superclass);
            for i in &mut c.interfaces {
                f(i);
            }
            for fld in &mut c.fields {
                f(&mut fld.ty);
                f(&mut fld.name);
            }
            for m in &mut c.methods {
                if let RetType::Name(n) = &mut m.ret {
                    f(n);
                }
                f(&mut m.name);
                for p in &mut m.params {
                    f(&mut p.ty);
                }
                for s in &mut m.body {
                    visit_stmt_mut(s, f);
                }
            }
        }
        Decl::Interface(i) => {
            f(&mut i.name);
            for s in &mut i.signatures {
                if let RetType::Name(n) = &mut s.ret {
                    f(n);
                }
                f(&mut s.name);
                for p in &mut s.params {
                    f(&mut p.ty);
                }
            }
        }
    }
}

fn visit_stmt_mut(stmt: &mut Stmt, f: &mut dyn FnMut(&mut Name)) {
    match stmt {
        Stmt::Local { ty, init, .. } => {
            f(ty);
            visit_expr_mut(init, f);
        }
        Stmt::Assign { target, value } => {
            if let LValue::Field { recv, name } = target {
                visit_expr_mut(recv, f);
                f(name);
            }
            visit_expr_mut(value, f);
        }
        Stmt::Expr(e) | Stmt::Assert(e) => visit_expr_mut(e, f),
        Stmt::Return(e) => {
            if let Some(e) = e {
                visit_expr_mut(e, f);
            }
        }
        Stmt::If { cond, then_body, else_body } => {
            visit_expr_mut(cond, f);
            for s in then_body {
                visit_stmt_mut(s, f);
            }
            for s in else_body {
                visit_stmt_mut(s, f);
            }
        }
        Stmt::While { cond, body } => {
            visit_expr_mut(cond, f);
            for s in body {
                visit_stmt_mut(s, f);
            }
        }
        Stmt::For { init, cond, step, body } => {
            visit_stmt_mut(init, f);
            visit_expr_mut(cond, f);
            visit_stmt_mut(step, f);
            for s in body {
                visit_stmt_mut(s, f);
            }
        }
    }
}

fn visit_expr_mut(expr: &mut Expr, f: &mut dyn FnMut(&mut Name)) {
    match expr {
        Expr::Var(_) | Expr::This | Expr::Int(_) | Expr::Str(_) | Expr::Bool(_) | Expr::Null => {}
        Expr::Field { recv, name } => {
            visit_expr_mut(recv, f);
            f(name);
        }
        Expr::Call { recv, name, args } => {
            visit_expr_mut(recv, f);
            f(name);
            for a in args {
                visit_expr_mut(a, f);
            }
        }
        Expr::StaticCall { class, name, args } => {
            f(class);
            f(name);
            for a in args {
                visit_expr_mut(a, f);
            }
        }
        Expr::New { class, args } => {
            f(class);
            for a in args {
                visit_expr_mut(a, f);
            }
        }
        Expr::Cast { ty, expr } => {
            f(ty);
            visit_expr_mut(expr, f);
        }
        Expr::Binary { lhs, rhs, .. } => {
            visit_expr_mut(lhs, f);
            visit_expr_mut(rhs, f);
        }
    }
}

/// Every hole id occurring anywhere in the program, including ids of
/// pattern holes and the holes referenced inside their patterns.
pub fn collect_hole_ids(program: &Program) -> BTreeSet<HoleId> {
    let mut ids = BTreeSet::new();
    visit_names(program, &mut |n| match n {
        Name::Hole(h) => {
            ids.insert(h.id);
        }
        Name::Pattern(p) => {
            ids.insert(p.id);
            ids.extend(p.pattern.holes());
        }
        Name::Concrete(_) => {}
    });
    ids
}

/// True when no name position contains a hole of any kind.
pub fn is_hole_free(program: &Program) -> bool {
    let mut free = true;
    visit_names(program, &mut |n| {
        if !matches!(n, Name::Concrete(_)) {
            free = false;
        }
    });
    free
}
