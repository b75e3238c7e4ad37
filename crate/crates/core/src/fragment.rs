//! Fragments and the operations the search applies to them:
//! substitution of hole names, freshening before instantiation, and
//! pairwise composition of declarations.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;

use crate::ast::*;
use crate::constraints::Constraint;
use crate::holes;
use crate::infer;
use crate::resolve;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FragmentKind {
    /// Contributes a whole declaration.
    Type,
    /// Contributes members to an existing declaration.
    Member,
}

/// A library entry: one annotated declaration, already vetted to parse
/// and to resolve without contradiction on its own.
#[derive(Clone, Debug)]
pub struct Fragment {
    pub kind: FragmentKind,
    pub program: Program,
    /// Where it came from, for logs and reports.
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragError {
    pub msg: String,
}

impl core::fmt::Display for FragError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.msg)
    }
}

impl core::error::Error for FragError {}

/// Validates one library fragment from source text.
pub fn fragment_from_source(src: &str, label: &str) -> Result<Fragment, FragError> {
    let program = crate::parse::parse_program(src)
        .map_err(|e| FragError { msg: format!("{label}: {e}") })?;
    if program.decls.len() != 1 {
        return Err(FragError {
            msg: format!("{label}: a fragment holds exactly one declaration"),
        });
    }
    let kind = match program.decls[0].annotation() {
        Some(DeclAnnotation::TypeFragment) => FragmentKind::Type,
        Some(DeclAnnotation::MemberFragment) => FragmentKind::Member,
        None => {
            return Err(FragError {
                msg: format!("{label}: fragment declaration lacks a fragment annotation"),
            })
        }
    };
    let obligations = infer::name_obligations(&program);
    match resolve::resolve(&program, &obligations) {
        Ok(crate::constraints::Verdict::Resolved(_)) => {}
        Ok(crate::constraints::Verdict::Contradiction(c)) => {
            return Err(FragError {
                msg: format!("{label}: fragment contradicts on its own: {} ({})", c.witness, c.rule),
            })
        }
        Err(e) => return Err(FragError { msg: format!("{label}: {e}") }),
    }
    Ok(Fragment { kind, program, label: label.to_owned() })
}

/// Validates an initial program: hole-free and free of contradictions.
pub fn initial_from_source(src: &str, label: &str) -> Result<Program, FragError> {
    let program = crate::parse::parse_program(src)
        .map_err(|e| FragError { msg: format!("{label}: {e}") })?;
    if !holes::is_hole_free(&program) {
        return Err(FragError { msg: format!("{label}: initial programs must be hole-free") });
    }
    match resolve::resolve(&program, &[]) {
        Ok(crate::constraints::Verdict::Resolved(_)) => {}
        Ok(crate::constraints::Verdict::Contradiction(c)) => {
            return Err(FragError {
                msg: format!("{label}: initial program contradicts: {} ({})", c.witness, c.rule),
            })
        }
        Err(e) => return Err(FragError { msg: format!("{label}: {e}") }),
    }
    Ok(program)
}

/// A finite map from hole ids to the concrete names that fill them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(pub BTreeMap<HoleId, String>);

impl Substitution {
    pub fn single(id: HoleId, text: &str) -> Substitution {
        let mut m = BTreeMap::new();
        m.insert(id, text.to_owned());
        Substitution(m)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn merge(&mut self, other: &Substitution) -> bool {
        for (id, text) in &other.0 {
            match self.0.get(id) {
                Some(existing) if existing != text => return false,
                Some(_) => {}
                None => {
                    self.0.insert(*id, text.clone());
                }
            }
        }
        true
    }
}

fn subst_name(n: &mut Name, subst: &Substitution) {
    match n {
        Name::Concrete(_) => {}
        Name::Hole(h) => {
            if let Some(text) = subst.0.get(&h.id) {
                *n = Name::Concrete(text.clone());
            }
        }
        Name::Pattern(p) => {
            // Inner references first: a substituted pattern hole turns
            // into a literal inside the pattern.
            for (id, text) in &subst.0 {
                p.pattern.substitute(*id, text);
            }
            if let Some(text) = subst.0.get(&p.id) {
                *n = Name::Concrete(text.clone());
            }
        }
    }
}

/// Applies a substitution to every name position of a program.
pub fn apply_subst(program: &mut Program, subst: &Substitution) {
    if subst.is_empty() {
        return;
    }
    holes::visit_names_mut(program, &mut |n| subst_name(n, subst));
}

/// Applies a substitution to a pattern obligation. The obligation keeps
/// existing after its name becomes concrete — that is the whole point.
pub fn apply_subst_obligation(c: &Constraint, subst: &Substitution) -> Constraint {
    match c {
        Constraint::NameMatch(name, pattern) => {
            let mut name = name.clone();
            subst_name(&mut name, subst);
            let mut pattern = pattern.clone();
            for (id, text) in &subst.0 {
                pattern.substitute(*id, text);
            }
            Constraint::NameMatch(name, pattern)
        }
        other => other.clone(),
    }
}

/// Renames every hole in the program to a fresh id, consistently, so an
/// instantiation never collides with holes already in play. Labels get
/// the new id as a suffix to keep printed forms unambiguous.
pub fn freshen(program: &Program, next_hole: &mut u32) -> Program {
    let mut map: BTreeMap<HoleId, Hole> = BTreeMap::new();
    let mut out = program.clone();
    holes::visit_names_mut(&mut out, &mut |n| {
        let mut rename = |h: &Hole| -> Hole {
            map.entry(h.id)
                .or_insert_with(|| {
                    let id = HoleId(*next_hole);
                    *next_hole += 1;
                    Hole { id, label: format!("{}_{}", h.label, id.0) }
                })
                .clone()
        };
        match n {
            Name::Concrete(_) => {}
            Name::Hole(h) => *h = rename(h),
            Name::Pattern(p) => {
                let fresh = rename(&Hole { id: p.id, label: String::new() });
                p.id = fresh.id;
                p.pattern.rename_holes(&mut |h| rename(h));
            }
        }
    });
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeError {
    pub msg: String,
}

impl core::fmt::Display for ComposeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.msg)
    }
}

/// Joins two same-named declarations. Classes must agree syntactically
/// on their superclass, member names must not collide, and interface
/// lists union. Interfaces union their signatures under the same
/// no-collision rule.
pub fn compose_decl(a: &Decl, b: &Decl) -> Result<Decl, ComposeError> {
    match (a, b) {
        (Decl::Class(x), Decl::Class(y)) => {
            if x.superclass != y.superclass {
                return Err(ComposeError {
                    msg: format!(
                        "superclass mismatch: `{}` vs `{}`",
                        x.superclass, y.superclass
                    ),
                });
            }
            let mut member_names: BTreeSet<&Name> = BTreeSet::new();
            for n in x.fields.iter().map(|f| &f.name).chain(x.methods.iter().map(|m| &m.name)) {
                member_names.insert(n);
            }
            for n in y.fields.iter().map(|f| &f.name).chain(y.methods.iter().map(|m| &m.name)) {
                if !member_names.insert(n) {
                    return Err(ComposeError { msg: format!("member `{n}` exists on both sides") });
                }
            }
            let mut interfaces = x.interfaces.clone();
            for i in &y.interfaces {
                if !interfaces.contains(i) {
                    interfaces.push(i.clone());
                }
            }
            let mut fields = x.fields.clone();
            fields.extend(y.fields.iter().cloned());
            let mut methods = x.methods.clone();
            methods.extend(y.methods.iter().cloned());
            Ok(Decl::Class(ClassDecl {
                annotation: None,
                name: x.name.clone(),
                superclass: x.superclass.clone(),
                interfaces,
                fields,
                methods,
            }))
        }
        (Decl::Interface(x), Decl::Interface(y)) => {
            let mut sig_names: BTreeSet<&Name> = BTreeSet::new();
            for s in &x.signatures {
                sig_names.insert(&s.name);
            }
            for s in &y.signatures {
                if !sig_names.insert(&s.name) {
                    return Err(ComposeError {
                        msg: format!("signature `{}` exists on both sides", s.name),
                    });
                }
            }
            let mut signatures = x.signatures.clone();
            signatures.extend(y.signatures.iter().cloned());
            Ok(Decl::Interface(InterfaceDecl {
                annotation: None,
                name: x.name.clone(),
                signatures,
            }))
        }
        _ => Err(ComposeError { msg: "class and interface cannot compose".into() }),
    }
}

/// Merges an instantiated fragment into a program: same-named
/// declarations compose, new ones append. Fragment annotations are
/// dropped; the result is ordinary program text.
pub fn compose_program(base: &Program, addition: &Program) -> Result<Program, ComposeError> {
    let mut out = base.clone();
    for add in &addition.decls {
        let slot = out.decls.iter().position(|d| d.name() == add.name());
        match slot {
            Some(i) => {
                let joined = compose_decl(&out.decls[i], add)?;
                out.decls[i] = joined;
            }
            None => {
                let mut add = add.clone();
                match &mut add {
                    Decl::Class(c) => c.annotation = None,
                    Decl::Interface(d) => d.annotation = None,
                }
                out.decls.push(add);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_program;
    use crate::print::print_program;

    const SETTER: &str = r#"
@MemberFragment
class ?S {
  void ?{(set)(?field)}(Integer v) {
    this.?field = v;
  }
}
"#;

    fn hole_of(program: &Program, label: &str) -> HoleId {
        let mut found = None;
        holes::visit_names(program, &mut |n| {
            if let Name::Hole(h) = n {
                if h.label == label {
                    found = Some(h.id);
                }
            }
        });
        found.unwrap_or_else(|| panic!("no hole `{label}`"))
    }

    #[test]
    fn substitution_reaches_pattern_internals() {
        let mut p = parse_program(SETTER).unwrap();
        let field = hole_of(&p, "field");
        apply_subst(&mut p, &Substitution::single(field, "brushX"));
        let printed = print_program(&p);
        assert!(printed.contains("?{(set)(brushX)}"), "{printed}");
        assert!(printed.contains("this.brushX = v;"), "{printed}");
    }

    #[test]
    fn obligation_survives_name_substitution() {
        let p = parse_program(SETTER).unwrap();
        let obs = infer::name_obligations(&p);
        assert_eq!(obs.len(), 1);
        let method_pattern_id = match &obs[0] {
            Constraint::NameMatch(Name::Pattern(ph), _) => ph.id,
            other => panic!("{other}"),
        };
        let field = hole_of(&p, "field");
        let mut subst = Substitution::single(field, "brushY");
        subst.0.insert(method_pattern_id, "setBrushX".into());
        let after = apply_subst_obligation(&obs[0], &subst);
        assert_eq!(alloc::format!("{after}"), "setBrushX |> (set)(brushY)");
    }

    #[test]
    fn freshen_renames_all_holes_consistently() {
        let p = parse_program(SETTER).unwrap();
        let mut next = 100;
        let f = freshen(&p, &mut next);
        let old_ids = holes::collect_hole_ids(&p);
        let new_ids = holes::collect_hole_ids(&f);
        assert_eq!(old_ids.len(), new_ids.len());
        assert!(old_ids.iter().all(|id| id.0 < 100));
        assert!(new_ids.iter().all(|id| id.0 >= 100));
        // The field hole keeps linking the pattern and the body.
        let printed = print_program(&f);
        let field_label = printed
            .split("this.?")
            .nth(1)
            .and_then(|s| s.split(' ').next())
            .unwrap()
            .to_owned();
        assert!(printed.contains(&alloc::format!("(set)(?{field_label})")), "{printed}");
    }

    #[test]
    fn freshen_twice_yields_disjoint_ids() {
        let p = parse_program(SETTER).unwrap();
        let mut next = 10;
        let a = freshen(&p, &mut next);
        let b = freshen(&p, &mut next);
        let ia = holes::collect_hole_ids(&a);
        let ib = holes::collect_hole_ids(&b);
        assert!(ia.is_disjoint(&ib));
    }

    #[test]
    fn compose_unions_members() {
        let base = parse_program("class A { Integer x; A() { this.x = 0; } }").unwrap();
        let add = parse_program("class A { Integer getX() { return this.x; } }").unwrap();
        let merged = compose_program(&base, &add).unwrap();
        let c = merged.find_class(&Name::concrete("A")).unwrap();
        assert_eq!(c.fields.len(), 1);
        assert_eq!(c.methods.len(), 2);
    }

    #[test]
    fn compose_rejects_duplicate_member() {
        let base = parse_program("class A { Integer x; }").unwrap();
        let add = parse_program("class A { Integer x; }").unwrap();
        assert!(compose_program(&base, &add).is_err());
    }

    #[test]
    fn compose_rejects_superclass_mismatch() {
        let base = parse_program("class B { } class A extends B { }").unwrap();
        let add = parse_program("class A { Integer x; }").unwrap();
        assert!(compose_program(&base, &add).is_err());
    }

    #[test]
    fn compose_appends_unknown_decl_and_strips_annotation() {
        let base = parse_program("class A { }").unwrap();
        let add = parse_program("@TypeFragment class B { }").unwrap();
        let merged = compose_program(&base, &add).unwrap();
        assert_eq!(merged.decls.len(), 2);
        assert_eq!(merged.decls[1].annotation(), None);
    }

    #[test]
    fn compose_unions_interface_lists() {
        let base = parse_program("interface I { } class A implements I { }").unwrap();
        let add = parse_program("interface J { } class A implements I, J { }").unwrap();
        // Compose decl-by-decl: the same-named interface decl composes,
        // the class unions its interface list.
        let merged = compose_program(&base, &add).unwrap();
        let c = merged.find_class(&Name::concrete("A")).unwrap();
        assert_eq!(c.interfaces.len(), 2);
    }

    #[test]
    fn fragment_loading_checks_annotation_and_count() {
        assert!(fragment_from_source("class A { }", "f").is_err());
        assert!(fragment_from_source("@TypeFragment class A { } @TypeFragment class B { }", "f")
            .is_err());
        let f = fragment_from_source("@MemberFragment class ?S { Integer g() { return 1; } }", "f")
            .unwrap();
        assert_eq!(f.kind, FragmentKind::Member);
    }

    #[test]
    fn contradictory_fragment_is_refused() {
        let err = fragment_from_source(
            "@MemberFragment class ?S { Integer g() { return true; } }",
            "bad",
        )
        .unwrap_err();
        assert!(err.msg.contains("contradicts"), "{err}");
    }

    #[test]
    fn initial_must_be_hole_free() {
        assert!(initial_from_source("class ?A { }", "i").is_err());
        assert!(initial_from_source("class A { void f() { this.g(); } }", "i").is_ok());
    }
}
