//! Deterministic pretty-printer.
//!
//! Printing a freshly parsed program and parsing the output yields the
//! same tree: hole ids are assigned by first occurrence on both sides,
//! and the printer preserves occurrence order.

use alloc::string::String;

use crate::ast::*;

pub fn print_program(program: &Program) -> String {
    let mut p = Printer::default();
    for (i, d) in program.decls.iter().enumerate() {
        if i > 0 {
            p.out.push('\n');
        }
        p.decl(d);
    }
    p.out
}

pub fn print_decl(decl: &Decl) -> String {
    let mut p = Printer::default();
    p.decl(decl);
    p.out
}

pub fn print_method(method: &Method) -> String {
    let mut p = Printer::default();
    p.method(method);
    p.out
}

pub fn print_field(field: &Field) -> String {
    let mut p = Printer::default();
    p.field(field);
    p.out
}

pub fn print_sig(sig: &Sig) -> String {
    let mut p = Printer::default();
    p.sig(sig);
    p.out
}

pub fn print_expr(expr: &Expr) -> String {
    let mut p = Printer::default();
    p.expr(expr, 0);
    p.out
}

pub fn print_stmt(stmt: &Stmt) -> String {
    let mut p = Printer::default();
    p.stmt(stmt);
    p.out
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn line_start(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str("  ");
        }
    }

    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn name(&mut self, n: &Name) {
        match n {
            Name::Concrete(s) => self.out.push_str(s),
            Name::Hole(h) => {
                self.out.push('?');
                self.out.push_str(&h.label);
            }
            Name::Pattern(p) => {
                self.out.push_str("?{");
                let rendered = alloc::format!("{}", p.pattern);
                self.out.push_str(&rendered);
                self.out.push('}');
            }
        }
    }

    fn decl(&mut self, decl: &Decl) {
        match decl {
            Decl::Class(c) => self.class(c),
            Decl::Interface(i) => self.interface(i),
        }
    }

    fn annotation(&mut self, a: Option<DeclAnnotation>) {
        if let Some(a) = a {
            self.line_start();
            self.push(match a {
                DeclAnnotation::TypeFragment => "@TypeFragment",
                DeclAnnotation::MemberFragment => "@MemberFragment",
            });
            self.push("\n");
        }
    }

    fn class(&mut self, c: &ClassDecl) {
        self.annotation(c.annotation);
        self.line_start();
        self.push("class ");
        self.name(&c.name);
        if c.superclass != Name::concrete(crate::builtins::OBJECT) {
            self.push(" extends ");
            self.name(&c.superclass);
        }
        if !c.interfaces.is_empty() {
            self.push(" implements ");
            for (i, n) in c.interfaces.iter().enumerate() {
                if i > 0 {
                    self.push(", ");
                }
                self.name(n);
            }
        }
        self.push(" {\n");
        self.indent += 1;
        for f in &c.fields {
            self.line_start();
            self.field(f);
            self.push("\n");
        }
        for (i, m) in c.methods.iter().enumerate() {
            if i > 0 || !c.fields.is_empty() {
                self.push("\n");
            }
            self.method(m);
        }
        self.indent -= 1;
        self.line_start();
        self.push("}\n");
    }

    fn interface(&mut self, i: &InterfaceDecl) {
        self.annotation(i.annotation);
        self.line_start();
        self.push("interface ");
        self.name(&i.name);
        self.push(" {\n");
        self.indent += 1;
        for s in &i.signatures {
            self.line_start();
            self.sig(s);
            self.push("\n");
        }
        self.indent -= 1;
        self.line_start();
        self.push("}\n");
    }

    fn field(&mut self, f: &Field) {
        self.name(&f.ty);
        self.push(" ");
        self.name(&f.name);
        self.push(";");
    }

    fn sig(&mut self, s: &Sig) {
        self.ret(&s.ret);
        self.push(" ");
        self.name(&s.name);
        self.params(&s.params);
        self.push(";");
    }

    fn ret(&mut self, r: &RetType) {
        match r {
            RetType::Void => self.push("void"),
            RetType::Name(n) => self.name(n),
        }
    }

    fn params(&mut self, params: &[Param]) {
        self.push("(");
        for (i, p) in params.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            self.name(&p.ty);
            self.push(" ");
            self.push(&p.name);
        }
        self.push(")");
    }

    fn method(&mut self, m: &Method) {
        if m.is_test {
            self.line_start();
            self.push("@Test\n");
        }
        self.line_start();
        if m.is_static {
            self.push("static ");
        }
        if m.is_ctor {
            self.name(&m.name);
        } else {
            self.ret(&m.ret);
            self.push(" ");
            self.name(&m.name);
        }
        self.params(&m.params);
        self.push(" {\n");
        self.indent += 1;
        for s in &m.body {
            self.stmt(s);
        }
        self.indent -= 1;
        self.line_start();
        self.push("}\n");
    }

    fn block(&mut self, body: &[Stmt]) {
        self.push(" {\n");
        self.indent += 1;
        for s in body {
            self.stmt(s);
        }
        self.indent -= 1;
        self.line_start();
        self.push("}");
    }

    fn stmt(&mut self, s: &Stmt) {
        self.line_start();
        self.simple_stmt(s);
        self.push("\n");
    }

    /// One statement without leading indent or trailing newline; block
    /// statements still print their bodies over multiple lines.
    fn simple_stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Local { ty, name, init } => {
                self.name(ty);
                self.push(" ");
                self.push(name);
                self.push(" = ");
                self.expr(init, 0);
                self.push(";");
            }
            Stmt::Assign { target, value } => {
                match target {
                    LValue::Var(v) => self.push(v),
                    LValue::Field { recv, name } => {
                        self.receiver(recv);
                        self.push(".");
                        self.name(name);
                    }
                }
                self.push(" = ");
                self.expr(value, 0);
                self.push(";");
            }
            Stmt::Expr(e) => {
                self.expr(e, 0);
                self.push(";");
            }
            Stmt::Return(None) => self.push("return;"),
            Stmt::Return(Some(e)) => {
                self.push("return ");
                self.expr(e, 0);
                self.push(";");
            }
            Stmt::If { cond, then_body, else_body } => {
                self.push("if (");
                self.expr(cond, 0);
                self.push(")");
                self.block(then_body);
                if !else_body.is_empty() {
                    self.push(" else");
                    self.block(else_body);
                }
            }
            Stmt::While { cond, body } => {
                self.push("while (");
                self.expr(cond, 0);
                self.push(")");
                self.block(body);
            }
            Stmt::For { init, cond, step, body } => {
                self.push("for (");
                self.for_header(init);
                self.push("; ");
                self.expr(cond, 0);
                self.push("; ");
                self.for_header(step);
                self.push(")");
                self.block(body);
            }
            Stmt::Assert(e) => {
                self.push("assert(");
                self.expr(e, 0);
                self.push(");");
            }
        }
    }

    fn for_header(&mut self, s: &Stmt) {
        // Headers hold only locals and assignments; drop the `;`.
        self.simple_stmt(s);
        if self.out.ends_with(';') {
            self.out.pop();
        }
    }

    fn expr(&mut self, e: &Expr, min_prec: u8) {
        match e {
            Expr::Var(v) => self.push(v),
            Expr::This => self.push("this"),
            Expr::Int(n) => self.push(&alloc::format!("{n}")),
            Expr::Bool(b) => self.push(if *b { "true" } else { "false" }),
            Expr::Null => self.push("null"),
            Expr::Str(s) => {
                self.out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => self.push("\\\""),
                        '\\' => self.push("\\\\"),
                        '\n' => self.push("\\n"),
                        '\t' => self.push("\\t"),
                        c => self.out.push(c),
                    }
                }
                self.out.push('"');
            }
            Expr::Field { recv, name } => {
                self.receiver(recv);
                self.push(".");
                self.name(name);
            }
            Expr::Call { recv, name, args } => {
                self.receiver(recv);
                self.push(".");
                self.name(name);
                self.args(args);
            }
            Expr::StaticCall { class, name, args } => {
                self.name(class);
                self.push(".");
                self.name(name);
                self.args(args);
            }
            Expr::New { class, args } => {
                self.push("new ");
                self.name(class);
                self.args(args);
            }
            Expr::Cast { ty, expr } => {
                self.push("(");
                self.name(ty);
                self.push(") ");
                if matches!(**expr, Expr::Binary { .. }) {
                    self.push("(");
                    self.expr(expr, 0);
                    self.push(")");
                } else {
                    self.expr(expr, 0);
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = prec(*op);
                let wrap = p < min_prec;
                if wrap {
                    self.push("(");
                }
                self.expr(lhs, p);
                self.push(" ");
                self.push(op.symbol());
                self.push(" ");
                self.expr(rhs, p + 1);
                if wrap {
                    self.push(")");
                }
            }
        }
    }

    /// Receivers of `.` chains: casts and binaries rebind without parens.
    fn receiver(&mut self, e: &Expr) {
        if matches!(e, Expr::Cast { .. } | Expr::Binary { .. }) {
            self.push("(");
            self.expr(e, 0);
            self.push(")");
        } else {
            self.expr(e, 0);
        }
    }

    fn args(&mut self, args: &[Expr]) {
        self.push("(");
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            self.expr(a, 0);
        }
        self.push(")");
    }
}

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le => 1,
        BinOp::Add | BinOp::Sub => 2,
        BinOp::Mul => 3,
    }
}
