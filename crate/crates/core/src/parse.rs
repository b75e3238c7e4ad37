//! Lexer and recursive-descent parser.
//!
//! Hole ids are assigned in first-occurrence order; every occurrence of
//! the same spelled hole (`?x`) in one unit gets the same id, and two
//! syntactically identical pattern holes (`?{...}`) also share an id.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::*;
use crate::builtins;
use crate::pattern::{parse_pattern, NamePattern};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    HoleName(String),
    PatternBody(String),
    Annotation(String),
    Punct(&'static str),
    Eof,
}

struct Lexed {
    tok: Tok,
    line: u32,
    col: u32,
}

const KEYWORDS: &[&str] = &[
    "class", "interface", "extends", "implements", "static", "void", "return", "if", "else",
    "while", "for", "assert", "new", "this", "null", "true", "false",
];

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! err {
        ($($arg:tt)*) => {
            return Err(ParseError { line, col, msg: format!($($arg)*) })
        };
    }

    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let mut push = |tok: Tok| out.push(Lexed { tok, line: tline, col: tcol });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                i += 2;
                col += 2;
                loop {
                    if i + 1 >= chars.len() {
                        err!("unterminated block comment");
                    }
                    if chars[i] == '*' && chars[i + 1] == '/' {
                        i += 2;
                        col += 2;
                        break;
                    }
                    if chars[i] == '\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                    i += 1;
                }
            }
            '"' => {
                i += 1;
                col += 1;
                let mut s = String::new();
                loop {
                    if i >= chars.len() {
                        err!("unterminated string literal");
                    }
                    match chars[i] {
                        '"' => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        '\\' => {
                            let esc = chars.get(i + 1).copied();
                            match esc {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                _ => err!("unknown escape in string literal"),
                            }
                            i += 2;
                            col += 2;
                        }
                        '\n' => err!("newline in string literal"),
                        ch => {
                            s.push(ch);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                push(Tok::Str(s));
            }
            '?' => {
                if chars.get(i + 1) == Some(&'{') {
                    i += 2;
                    col += 2;
                    let start = i;
                    while i < chars.len() && chars[i] != '}' {
                        if chars[i] == '\n' {
                            line += 1;
                            col = 1;
                        } else {
                            col += 1;
                        }
                        i += 1;
                    }
                    if i >= chars.len() {
                        err!("unterminated name pattern");
                    }
                    let body: String = chars[start..i].iter().collect();
                    i += 1;
                    col += 1;
                    push(Tok::PatternBody(body));
                } else {
                    i += 1;
                    col += 1;
                    let start = i;
                    while i < chars.len() && ident_char(chars[i]) {
                        i += 1;
                        col += 1;
                    }
                    if start == i {
                        err!("`?` must be followed by a hole name or `{{`");
                    }
                    push(Tok::HoleName(chars[start..i].iter().collect()));
                }
            }
            '@' => {
                i += 1;
                col += 1;
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                    col += 1;
                }
                if start == i {
                    err!("`@` must be followed by an annotation name");
                }
                push(Tok::Annotation(chars[start..i].iter().collect()));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                let text: String = chars[start..i].iter().collect();
                match text.parse::<i64>() {
                    Ok(n) => push(Tok::Int(n)),
                    Err(_) => err!("integer literal out of range"),
                }
            }
            c if ident_char(c) && !c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                    col += 1;
                }
                push(Tok::Ident(chars[start..i].iter().collect()));
            }
            _ => {
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let p2 = ["==", "!=", "<="].iter().find(|p| **p == two);
                if let Some(p) = p2 {
                    i += 2;
                    col += 2;
                    push(Tok::Punct(p));
                    continue;
                }
                let one = ["{", "}", "(", ")", ";", ",", ".", "=", "<", "+", "-", "*"]
                    .iter()
                    .find(|p| p.chars().next() == Some(c));
                match one {
                    Some(p) => {
                        i += 1;
                        col += 1;
                        push(Tok::Punct(p));
                    }
                    None => err!("unexpected character `{c}`"),
                }
            }
        }
    }
    out.push(Lexed { tok: Tok::Eof, line, col });
    Ok(out)
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    hole_ids: BTreeMap<String, HoleId>,
    pattern_ids: BTreeMap<String, HoleId>,
    next_hole: u32,
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        hole_ids: BTreeMap::new(),
        pattern_ids: BTreeMap::new(),
        next_hole: 0,
    };
    let mut decls = Vec::new();
    while !p.at_eof() {
        decls.push(p.decl()?);
    }
    let mut program = Program { decls };
    resolve_static_calls(&mut program);
    Ok(program)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let idx = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: String) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError { line: here.line, col: here.col, msg }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Punct(q) if *q == p => {
                self.bump();
                Ok(())
            }
            other => Err(self.error(format!("expected `{p}`, found {}", describe(other)))),
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", describe(self.peek()))))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", describe(other)))),
        }
    }

    fn intern_hole(&mut self, label: &str) -> HoleId {
        if let Some(id) = self.hole_ids.get(label) {
            return *id;
        }
        let id = HoleId(self.next_hole);
        self.next_hole += 1;
        self.hole_ids.insert(label.to_owned(), id);
        id
    }

    fn at_name(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::HoleName(_) | Tok::PatternBody(_) => true,
            _ => false,
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Name::Concrete(s))
            }
            Tok::HoleName(label) => {
                self.bump();
                let id = self.intern_hole(&label);
                Ok(Name::Hole(Hole { id, label }))
            }
            Tok::PatternBody(body) => {
                self.bump();
                let pattern = self.pattern(&body)?;
                let key = format!("{pattern}");
                let id = if let Some(id) = self.pattern_ids.get(&key) {
                    *id
                } else {
                    let id = HoleId(self.next_hole);
                    self.next_hole += 1;
                    self.pattern_ids.insert(key, id);
                    id
                };
                Ok(Name::Pattern(PatternHole { id, pattern }))
            }
            other => Err(self.error(format!("expected a name, found {}", describe(&other)))),
        }
    }

    fn pattern(&mut self, body: &str) -> Result<NamePattern, ParseError> {
        let mut intern = |label: &str| {
            if let Some(id) = self.hole_ids.get(label) {
                return *id;
            }
            let id = HoleId(self.next_hole);
            self.next_hole += 1;
            self.hole_ids.insert(label.to_owned(), id);
            id
        };
        parse_pattern(body, &mut intern).map_err(|e| {
            let here = &self.toks[self.pos.saturating_sub(1)];
            ParseError { line: here.line, col: here.col, msg: format!("{e}") }
        })
    }

    fn annotations(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        while let Tok::Annotation(a) = self.peek() {
            out.push(a.clone());
            self.bump();
        }
        Ok(out)
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let annots = self.annotations()?;
        let mut annotation = None;
        for a in &annots {
            match a.as_str() {
                "TypeFragment" => annotation = Some(DeclAnnotation::TypeFragment),
                "MemberFragment" => annotation = Some(DeclAnnotation::MemberFragment),
                other => return Err(self.error(format!("unknown declaration annotation `@{other}`"))),
            }
        }
        if self.eat_keyword("interface") {
            let name = self.name()?;
            self.expect_punct("{")?;
            let mut signatures = Vec::new();
            while !self.eat_punct("}") {
                signatures.push(self.signature()?);
            }
            let decl = InterfaceDecl { annotation, name, signatures };
            check_unique_members(decl.signatures.iter().map(|s| &s.name), |msg| self.error(msg))?;
            return Ok(Decl::Interface(decl));
        }
        self.expect_keyword("class")?;
        let name = self.name()?;
        let superclass = if self.eat_keyword("extends") {
            self.name()?
        } else {
            Name::concrete(builtins::OBJECT)
        };
        let mut interfaces = Vec::new();
        if self.eat_keyword("implements") {
            loop {
                interfaces.push(self.name()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct("{")?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.eat_punct("}") {
            self.member(&name, &mut fields, &mut methods)?;
        }
        let decl = ClassDecl { annotation, name, superclass, interfaces, fields, methods };
        check_unique_members(
            decl.fields.iter().map(|f| &f.name).chain(decl.methods.iter().map(|m| &m.name)),
            |msg| self.error(msg),
        )?;
        Ok(Decl::Class(decl))
    }

    fn signature(&mut self) -> Result<Sig, ParseError> {
        let ret = self.ret_type()?;
        let name = self.name()?;
        let params = self.params()?;
        self.expect_punct(";")?;
        Ok(Sig { ret, name, params })
    }

    fn ret_type(&mut self) -> Result<RetType, ParseError> {
        if self.eat_keyword("void") {
            Ok(RetType::Void)
        } else {
            Ok(RetType::Name(self.name()?))
        }
    }

    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.at_punct(")") {
            loop {
                let ty = self.name()?;
                let name = self.ident()?;
                params.push(Param { ty, name });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn member(
        &mut self,
        class_name: &Name,
        fields: &mut Vec<Field>,
        methods: &mut Vec<Method>,
    ) -> Result<(), ParseError> {
        let annots = self.annotations()?;
        let mut is_test = false;
        for a in &annots {
            if a == "Test" {
                is_test = true;
            } else {
                return Err(self.error(format!("unknown member annotation `@{a}`")));
            }
        }
        let is_static = self.eat_keyword("static");

        // Constructor: a lone name immediately followed by `(`.
        if self.at_name() && matches!(self.peek_at(1), Tok::Punct("(")) {
            let name = self.name()?;
            if name != *class_name {
                return Err(self.error(format!(
                    "constructor name `{name}` does not match class name `{class_name}`"
                )));
            }
            if is_static || is_test {
                return Err(self.error("constructors cannot be static or tests".into()));
            }
            let params = self.params()?;
            let body = self.block()?;
            methods.push(Method {
                is_test: false,
                is_static: false,
                is_ctor: true,
                ret: RetType::Name(name.clone()),
                name,
                params,
                body,
            });
            return Ok(());
        }

        let ret = self.ret_type()?;
        let name = self.name()?;
        if self.at_punct("(") {
            let params = self.params()?;
            if is_test && (!is_static || ret != RetType::Void || !params.is_empty()) {
                return Err(self.error("test methods must be static, void, and take no parameters".into()));
            }
            let body = self.block()?;
            methods.push(Method { is_test, is_static, is_ctor: false, ret, name, params, body });
        } else {
            if is_static || is_test {
                return Err(self.error("fields cannot be static or tests".into()));
            }
            let ty = match ret {
                RetType::Name(n) => n,
                RetType::Void => return Err(self.error("fields cannot have type void".into())),
            };
            self.expect_punct(";")?;
            fields.push(Field { ty, name });
        }
        Ok(())
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.eat_punct("}") {
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        if self.at_keyword("return") {
            self.bump();
            if self.eat_punct(";") {
                return Ok(Stmt::Return(None));
            }
            let e = self.expr()?;
            self.expect_punct(";")?;
            return Ok(Stmt::Return(Some(e)));
        }
        if self.at_keyword("if") {
            self.bump();
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then_body = self.block()?;
            let else_body = if self.eat_keyword("else") { self.block()? } else { Vec::new() };
            return Ok(Stmt::If { cond, then_body, else_body });
        }
        if self.at_keyword("while") {
            self.bump();
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = self.block()?;
            return Ok(Stmt::While { cond, body });
        }
        if self.at_keyword("for") {
            self.bump();
            self.expect_punct("(")?;
            let init = self.simple_stmt()?;
            self.expect_punct(";")?;
            let cond = self.expr()?;
            self.expect_punct(";")?;
            let step = self.simple_stmt()?;
            self.expect_punct(")")?;
            let body = self.block()?;
            return Ok(Stmt::For { init: Box::new(init), cond, step: Box::new(step), body });
        }
        if self.at_keyword("assert") {
            self.bump();
            self.expect_punct("(")?;
            let e = self.expr()?;
            self.expect_punct(")")?;
            self.expect_punct(";")?;
            return Ok(Stmt::Assert(e));
        }
        let s = self.simple_stmt()?;
        self.expect_punct(";")?;
        Ok(s)
    }

    /// A local declaration, assignment, or expression statement without
    /// its trailing `;` (shared by `for` headers).
    fn simple_stmt(&mut self) -> Result<Stmt, ParseError> {
        if self.at_name() {
            let second_ident = matches!(self.peek_at(1), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()));
            if second_ident && matches!(self.peek_at(2), Tok::Punct("=")) {
                let ty = self.name()?;
                let name = self.ident()?;
                self.expect_punct("=")?;
                let init = self.expr()?;
                return Ok(Stmt::Local { ty, name, init });
            }
        }
        let e = self.expr()?;
        if self.eat_punct("=") {
            let target = match e {
                Expr::Var(v) => LValue::Var(v),
                Expr::Field { recv, name } => LValue::Field { recv: *recv, name },
                _ => return Err(self.error("invalid assignment target".into())),
            };
            let value = self.expr()?;
            return Ok(Stmt::Assign { target, value });
        }
        Ok(Stmt::Expr(e))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.additive()?;
        loop {
            let op = if self.eat_punct("==") {
                BinOp::Eq
            } else if self.eat_punct("!=") {
                BinOp::Ne
            } else if self.eat_punct("<=") {
                BinOp::Le
            } else if self.at_punct("<") {
                self.bump();
                BinOp::Lt
            } else {
                break;
            };
            let rhs = self.additive()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.eat_punct("+") {
                BinOp::Add
            } else if self.eat_punct("-") {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.multiplicative()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.postfix()?;
        while self.eat_punct("*") {
            let rhs = self.postfix()?;
            lhs = Expr::Binary { op: BinOp::Mul, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while self.eat_punct(".") {
            let name = self.name()?;
            if self.at_punct("(") {
                let args = self.args()?;
                e = Expr::Call { recv: Box::new(e), name, args };
            } else {
                e = Expr::Field { recv: Box::new(e), name };
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.at_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn starts_primary(&self, n: usize) -> bool {
        match self.peek_at(n) {
            Tok::Ident(s) => {
                !KEYWORDS.contains(&s.as_str())
                    || ["this", "null", "true", "false", "new"].contains(&s.as_str())
            }
            Tok::Int(_) | Tok::Str(_) => true,
            Tok::Punct("(") => true,
            _ => false,
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        if self.at_punct("(") {
            // `(Name) expr` is a cast when a primary expression follows the
            // closing parenthesis; otherwise it is a parenthesized expression.
            let name_inside = match self.peek_at(1) {
                Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
                Tok::HoleName(_) | Tok::PatternBody(_) => true,
                _ => false,
            };
            if name_inside && matches!(self.peek_at(2), Tok::Punct(")")) && self.starts_primary(3) {
                self.bump();
                let ty = self.name()?;
                self.expect_punct(")")?;
                let inner = self.postfix()?;
                return Ok(Expr::Cast { ty, expr: Box::new(inner) });
            }
            self.bump();
            let e = self.expr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        if self.eat_keyword("this") {
            return Ok(Expr::This);
        }
        if self.eat_keyword("null") {
            return Ok(Expr::Null);
        }
        if self.eat_keyword("true") {
            return Ok(Expr::Bool(true));
        }
        if self.eat_keyword("false") {
            return Ok(Expr::Bool(false));
        }
        if self.eat_keyword("new") {
            let class = self.name()?;
            let args = self.args()?;
            return Ok(Expr::New { class, args });
        }
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Expr::Var(s))
            }
            other => Err(self.error(format!("expected expression, found {}", describe(&other)))),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("integer `{n}`"),
        Tok::Str(_) => "string literal".into(),
        Tok::HoleName(l) => format!("hole `?{l}`"),
        Tok::PatternBody(_) => "name pattern".into(),
        Tok::Annotation(a) => format!("annotation `@{a}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".into(),
    }
}

fn check_unique_members<'a>(
    names: impl Iterator<Item = &'a Name>,
    mk_err: impl Fn(String) -> ParseError,
) -> Result<(), ParseError> {
    let mut seen: BTreeSet<&Name> = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(mk_err(format!("duplicate member name `{n}`")));
        }
    }
    Ok(())
}

/// Rewrites `x.m(...)` into a static call when `x` is not a variable in
/// scope but names a declared or builtin type. The grammar cannot tell
/// the two apart, so this runs as a post-pass per unit.
fn resolve_static_calls(program: &mut Program) {
    let type_names: BTreeSet<String> = program
        .decls
        .iter()
        .filter_map(|d| d.name().as_concrete().map(String::from))
        .chain(builtins::TYPE_NAMES.iter().map(|s| String::from(*s)))
        .collect();
    let decls = core::mem::take(&mut program.decls);
    program.decls = decls
        .into_iter()
        .map(|d| match d {
            Decl::Class(mut c) => {
                for m in &mut c.methods {
                    let mut scope: BTreeSet<String> =
                        m.params.iter().map(|p| p.name.clone()).collect();
                    rewrite_stmts(&mut m.body, &mut scope, &type_names);
                }
                Decl::Class(c)
            }
            d => d,
        })
        .collect();
}

fn rewrite_stmts(stmts: &mut [Stmt], scope: &mut BTreeSet<String>, types: &BTreeSet<String>) {
    for s in stmts {
        match s {
            Stmt::Local { name, init, .. } => {
                rewrite_expr(init, scope, types);
                scope.insert(name.clone());
            }
            Stmt::Assign { target, value } => {
                if let LValue::Field { recv, .. } = target {
                    rewrite_expr(recv, scope, types);
                }
                rewrite_expr(value, scope, types);
            }
            Stmt::Expr(e) | Stmt::Assert(e) => rewrite_expr(e, scope, types),
            Stmt::Return(Some(e)) => rewrite_expr(e, scope, types),
            Stmt::Return(None) => {}
            Stmt::If { cond, then_body, else_body } => {
                rewrite_expr(cond, scope, types);
                let mut inner = scope.clone();
                rewrite_stmts(then_body, &mut inner, types);
                let mut inner = scope.clone();
                rewrite_stmts(else_body, &mut inner, types);
            }
            Stmt::While { cond, body } => {
                rewrite_expr(cond, scope, types);
                let mut inner = scope.clone();
                rewrite_stmts(body, &mut inner, types);
            }
            Stmt::For { init, cond, step, body } => {
                let mut inner = scope.clone();
                rewrite_stmts(core::slice::from_mut(&mut **init), &mut inner, types);
                rewrite_expr(cond, &mut inner, types);
                rewrite_stmts(core::slice::from_mut(&mut **step), &mut inner, types);
                rewrite_stmts(body, &mut inner, types);
            }
        }
    }
}

fn rewrite_expr(e: &mut Expr, scope: &mut BTreeSet<String>, types: &BTreeSet<String>) {
    match e {
        Expr::Call { recv, name, args } => {
            for a in args.iter_mut() {
                rewrite_expr(a, scope, types);
            }
            if let Expr::Var(v) = &**recv {
                if !scope.contains(v) && types.contains(v) {
                    *e = Expr::StaticCall {
                        class: Name::Concrete(v.clone()),
                        name: name.clone(),
                        args: core::mem::take(args),
                    };
                    return;
                }
            }
            rewrite_expr(recv, scope, types);
        }
        Expr::Field { recv, .. } => rewrite_expr(recv, scope, types),
        Expr::Cast { expr, .. } => rewrite_expr(expr, scope, types),
        Expr::New { args, .. } | Expr::StaticCall { args, .. } => {
            for a in args {
                rewrite_expr(a, scope, types);
            }
        }
        Expr::Binary { lhs, rhs, .. } => {
            rewrite_expr(lhs, scope, types);
            rewrite_expr(rhs, scope, types);
        }
        _ => {}
    }
}
