//! Name patterns: a restricted regular-expression language over
//! identifiers used to constrain what concrete names a hole may take.
//!
//! Grammar inside `?{...}`: alternation `|`, grouping `(...)`, implicit
//! concatenation, hole references `?x`, and the bare wildcard `?`.
//! There is no repetition. Matching is case-insensitive and anchored to
//! the whole candidate name; hole references and wildcards both match
//! like `.*` until the hole is substituted with a literal.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{Hole, HoleId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NamePattern {
    pub alts: Vec<PatSeq>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatSeq {
    pub atoms: Vec<PatAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatAtom {
    Lit(String),
    Hole(Hole),
    Wild,
    Group(Box<NamePattern>),
}

impl NamePattern {
    pub fn is_hole_free(&self) -> bool {
        self.holes().is_empty()
    }

    /// Hole ids referenced anywhere in the pattern, in occurrence order.
    pub fn holes(&self) -> Vec<HoleId> {
        let mut out = Vec::new();
        self.collect_holes(&mut out);
        out
    }

    fn collect_holes(&self, out: &mut Vec<HoleId>) {
        for seq in &self.alts {
            for atom in &seq.atoms {
                match atom {
                    PatAtom::Hole(h) => {
                        if !out.contains(&h.id) {
                            out.push(h.id);
                        }
                    }
                    PatAtom::Group(g) => g.collect_holes(out),
                    _ => {}
                }
            }
        }
    }

    /// Replaces every reference to `id` with the literal `text`.
    pub fn substitute(&mut self, id: HoleId, text: &str) {
        for seq in &mut self.alts {
            for atom in &mut seq.atoms {
                match atom {
                    PatAtom::Hole(h) if h.id == id => {
                        *atom = PatAtom::Lit(String::from(text));
                    }
                    PatAtom::Group(g) => g.substitute(id, text),
                    _ => {}
                }
            }
        }
    }

    /// Rewrites every hole reference through `rename`.
    pub fn rename_holes(&mut self, rename: &mut dyn FnMut(&Hole) -> Hole) {
        for seq in &mut self.alts {
            for atom in &mut seq.atoms {
                match atom {
                    PatAtom::Hole(h) => *h = rename(h),
                    PatAtom::Group(g) => g.rename_holes(rename),
                    _ => {}
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternError {
    Empty,
    UnbalancedParen,
    UnexpectedChar(char),
    EmptyBranch,
}

impl core::fmt::Display for PatternError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PatternError::Empty => write!(f, "empty name pattern"),
            PatternError::UnbalancedParen => write!(f, "unbalanced parenthesis in name pattern"),
            PatternError::UnexpectedChar(c) => write!(f, "unexpected character `{c}` in name pattern"),
            PatternError::EmptyBranch => write!(f, "empty branch in name pattern"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Parses the body of a `?{...}` pattern. `intern` maps a hole label to
/// its id so `?field` inside a pattern is the same hole as `?field`
/// elsewhere in the unit.
pub fn parse_pattern(
    src: &str,
    intern: &mut dyn FnMut(&str) -> HoleId,
) -> Result<NamePattern, PatternError> {
    let chars: Vec<char> = src.chars().collect();
    let mut pos = 0usize;
    let pat = parse_alt(&chars, &mut pos, intern)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(if chars[pos] == ')' {
            PatternError::UnbalancedParen
        } else {
            PatternError::UnexpectedChar(chars[pos])
        });
    }
    Ok(pat)
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_alt(
    chars: &[char],
    pos: &mut usize,
    intern: &mut dyn FnMut(&str) -> HoleId,
) -> Result<NamePattern, PatternError> {
    let mut alts = Vec::new();
    loop {
        alts.push(parse_seq(chars, pos, intern)?);
        skip_ws(chars, pos);
        if *pos < chars.len() && chars[*pos] == '|' {
            *pos += 1;
        } else {
            break;
        }
    }
    Ok(NamePattern { alts })
}

fn parse_seq(
    chars: &[char],
    pos: &mut usize,
    intern: &mut dyn FnMut(&str) -> HoleId,
) -> Result<PatSeq, PatternError> {
    let mut atoms = Vec::new();
    loop {
        skip_ws(chars, pos);
        if *pos >= chars.len() {
            break;
        }
        match chars[*pos] {
            '|' | ')' => break,
            '(' => {
                *pos += 1;
                let inner = parse_alt(chars, pos, intern)?;
                skip_ws(chars, pos);
                if *pos >= chars.len() || chars[*pos] != ')' {
                    return Err(PatternError::UnbalancedParen);
                }
                *pos += 1;
                atoms.push(PatAtom::Group(Box::new(inner)));
            }
            '?' => {
                *pos += 1;
                let start = *pos;
                while *pos < chars.len() && is_ident_char(chars[*pos]) {
                    *pos += 1;
                }
                if *pos == start {
                    atoms.push(PatAtom::Wild);
                } else {
                    let label: String = chars[start..*pos].iter().collect();
                    let id = intern(&label);
                    atoms.push(PatAtom::Hole(Hole { id, label }));
                }
            }
            c if is_ident_char(c) => {
                let start = *pos;
                while *pos < chars.len() && is_ident_char(chars[*pos]) {
                    *pos += 1;
                }
                atoms.push(PatAtom::Lit(chars[start..*pos].iter().collect()));
            }
            c => return Err(PatternError::UnexpectedChar(c)),
        }
    }
    if atoms.is_empty() {
        return Err(if chars.is_empty() {
            PatternError::Empty
        } else {
            PatternError::EmptyBranch
        });
    }
    Ok(PatSeq { atoms })
}

impl core::fmt::Display for NamePattern {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, seq) in self.alts.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for atom in &seq.atoms {
                match atom {
                    PatAtom::Lit(s) => f.write_str(s)?,
                    PatAtom::Hole(h) => write!(f, "?{}", h.label)?,
                    PatAtom::Wild => f.write_str("?")?,
                    PatAtom::Group(g) => write!(f, "({g})")?,
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Compiled form: a Thompson-style NFA simulated without backtracking.
// Unsubstituted holes and wildcards compile to `.*`.

#[derive(Clone, Debug)]
enum Inst {
    /// Consume one specific (lowercased) character.
    Char(char, usize),
    /// Consume any character.
    Any(usize),
    Split(usize, usize),
    Match,
}

#[derive(Clone, Debug)]
pub struct CompiledPattern {
    insts: Vec<Inst>,
    start: usize,
}

struct Builder {
    insts: Vec<Inst>,
}

impl Builder {
    fn push(&mut self, inst: Inst) -> usize {
        self.insts.push(inst);
        self.insts.len() - 1
    }

    /// Compiles `pat`; on completion control flows to `next`.
    fn alt(&mut self, pat: &NamePattern, next: usize) -> usize {
        let starts: Vec<usize> = pat.alts.iter().map(|s| self.seq(s, next)).collect();
        starts
            .into_iter()
            .rev()
            .reduce(|acc, s| self.push(Inst::Split(s, acc)))
            .expect("pattern has at least one branch")
    }

    fn seq(&mut self, seq: &PatSeq, next: usize) -> usize {
        let mut target = next;
        for atom in seq.atoms.iter().rev() {
            target = self.atom(atom, target);
        }
        target
    }

    fn atom(&mut self, atom: &PatAtom, next: usize) -> usize {
        match atom {
            PatAtom::Lit(s) => {
                let mut target = next;
                for ch in s.chars().rev() {
                    target = self.push(Inst::Char(ch.to_ascii_lowercase(), target));
                }
                target
            }
            PatAtom::Hole(_) | PatAtom::Wild => {
                // .* as: split -> (any -> split | next)
                let split = self.push(Inst::Split(0, next));
                let any = self.push(Inst::Any(split));
                if let Inst::Split(a, _) = &mut self.insts[split] {
                    *a = any;
                }
                split
            }
            PatAtom::Group(g) => self.alt(g, next),
        }
    }
}

pub fn compile_pattern(pat: &NamePattern) -> CompiledPattern {
    let mut b = Builder { insts: Vec::new() };
    let matched = b.push(Inst::Match);
    let start = b.alt(pat, matched);
    CompiledPattern { insts: b.insts, start }
}

impl CompiledPattern {
    /// Anchored, case-insensitive match against a candidate name.
    pub fn matches(&self, candidate: &str) -> bool {
        let mut current = Vec::new();
        let mut seen = alloc::vec![false; self.insts.len()];
        self.add_state(self.start, &mut current, &mut seen);
        for ch in candidate.chars() {
            let ch = ch.to_ascii_lowercase();
            let mut next = Vec::new();
            let mut next_seen = alloc::vec![false; self.insts.len()];
            for &st in &current {
                match self.insts[st] {
                    Inst::Char(c, tgt) if c == ch => self.add_state(tgt, &mut next, &mut next_seen),
                    Inst::Any(tgt) => self.add_state(tgt, &mut next, &mut next_seen),
                    _ => {}
                }
            }
            current = next;
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&st| matches!(self.insts[st], Inst::Match))
    }

    fn add_state(&self, st: usize, list: &mut Vec<usize>, seen: &mut [bool]) {
        if seen[st] {
            return;
        }
        seen[st] = true;
        if let Inst::Split(a, b) = self.insts[st] {
            self.add_state(a, list, seen);
            self.add_state(b, list, seen);
        } else {
            list.push(st);
        }
    }
}

/// Convenience entry point: compile and match in one step.
pub fn match_name(candidate: &str, pat: &NamePattern) -> bool {
    compile_pattern(pat).matches(candidate)
}

/// Outcome of checking a name constraint `n |> p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameCheck {
    /// Left side concrete, pattern hole-free, and it matches.
    Discharged,
    /// Cannot be decided yet: the left side is still a hole, or the
    /// pattern has holes but the name fits its wildcard relaxation.
    Pending,
    /// Can never match regardless of future substitutions.
    Contradiction,
}

pub fn check_name_constraint(name: &crate::ast::Name, pat: &NamePattern) -> NameCheck {
    let concrete = match name.as_concrete() {
        Some(s) => s,
        None => return NameCheck::Pending,
    };
    // Holes act as wildcards until substituted, so a failed match here is
    // final for both the hole-free and hole-bearing cases.
    if match_name(concrete, pat) {
        if pat.is_hole_free() {
            NameCheck::Discharged
        } else {
            NameCheck::Pending
        }
    } else {
        NameCheck::Contradiction
    }
}
