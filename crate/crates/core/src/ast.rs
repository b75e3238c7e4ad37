//! Syntax trees for the subject language.
//!
//! Programs are lists of class and interface declarations. Any name
//! position (type names, member names, call targets) may carry a hole
//! (`?x`) or a pattern hole (`?{(get)(?field)}`); expressions and
//! statements themselves are always concrete.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::pattern::NamePattern;

/// Identity of a hole. Unique within one parsed unit; made globally
/// unique by freshening before a fragment is spliced into a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HoleId(pub u32);

/// A named hole. The label is the surface spelling (`?field` has label
/// `field`) and is kept only so printing stays readable; identity is
/// the id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hole {
    pub id: HoleId,
    pub label: String,
}

/// A hole constrained by a name pattern, e.g. `?{(set)(?field)}`.
/// Occupies a name position like a plain hole; the pattern feeds a
/// name constraint checked during resolution.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternHole {
    pub id: HoleId,
    pub pattern: NamePattern,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Name {
    Concrete(String),
    Hole(Hole),
    Pattern(PatternHole),
}

impl Name {
    pub fn concrete(s: &str) -> Name {
        Name::Concrete(String::from(s))
    }

    pub fn as_concrete(&self) -> Option<&str> {
        match self {
            Name::Concrete(s) => Some(s),
            _ => None,
        }
    }

    pub fn hole_id(&self) -> Option<HoleId> {
        match self {
            Name::Concrete(_) => None,
            Name::Hole(h) => Some(h.id),
            Name::Pattern(p) => Some(p.id),
        }
    }

    pub fn is_hole(&self) -> bool {
        self.hole_id().is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Program {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Class(ClassDecl),
    Interface(InterfaceDecl),
}

/// Marker annotations on declarations inside library files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclAnnotation {
    /// The whole declaration is a candidate addition to a program.
    TypeFragment,
    /// The declaration's members are candidate additions to an
    /// existing declaration.
    MemberFragment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub annotation: Option<DeclAnnotation>,
    pub name: Name,
    /// Defaults to `Object` when no `extends` clause is written.
    pub superclass: Name,
    pub interfaces: Vec<Name>,
    pub fields: Vec<Field>,
    pub methods: Vec<Method>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub annotation: Option<DeclAnnotation>,
    pub name: Name,
    pub signatures: Vec<Sig>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub ty: Name,
    pub name: Name,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RetType {
    Void,
    Name(Name),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub ty: Name,
    /// Parameter names are plain identifiers, never holes.
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub is_test: bool,
    pub is_static: bool,
    /// Constructors are methods named like their class with no written
    /// return type; `ret` then mirrors the class name.
    pub is_ctor: bool,
    pub ret: RetType,
    pub name: Name,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sig {
    pub ret: RetType,
    pub name: Name,
    pub params: Vec<Param>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Local { ty: Name, name: String, init: Expr },
    Assign { target: LValue, value: Expr },
    Expr(Expr),
    Return(Option<Expr>),
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Vec<Stmt> },
    While { cond: Expr, body: Vec<Stmt> },
    For { init: Box<Stmt>, cond: Expr, step: Box<Stmt>, body: Vec<Stmt> },
    Assert(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LValue {
    Var(String),
    Field { recv: Expr, name: Name },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    This,
    Field { recv: Box<Expr>, name: Name },
    Call { recv: Box<Expr>, name: Name, args: Vec<Expr> },
    StaticCall { class: Name, name: Name, args: Vec<Expr> },
    New { class: Name, args: Vec<Expr> },
    Cast { ty: Name, expr: Box<Expr> },
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Eq,
    Ne,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }
}

impl Decl {
    pub fn name(&self) -> &Name {
        match self {
            Decl::Class(c) => &c.name,
            Decl::Interface(i) => &i.name,
        }
    }

    pub fn annotation(&self) -> Option<DeclAnnotation> {
        match self {
            Decl::Class(c) => c.annotation,
            Decl::Interface(i) => i.annotation,
        }
    }

    pub fn is_interface(&self) -> bool {
        matches!(self, Decl::Interface(_))
    }
}

impl Program {
    /// Finds a declaration by syntactic name equality (holes match only
    /// the identical hole).
    pub fn find_decl(&self, name: &Name) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name() == name)
    }

    pub fn find_class(&self, name: &Name) -> Option<&ClassDecl> {
        match self.find_decl(name) {
            Some(Decl::Class(c)) => Some(c),
            _ => None,
        }
    }

    pub fn find_interface(&self, name: &Name) -> Option<&InterfaceDecl> {
        match self.find_decl(name) {
            Some(Decl::Interface(i)) => Some(i),
            _ => None,
        }
    }
}

impl core::fmt::Display for Name {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Name::Concrete(s) => f.write_str(s),
            Name::Hole(h) => write!(f, "?{}", h.label),
            Name::Pattern(p) => write!(f, "?{{{}}}", p.pattern),
        }
    }
}
