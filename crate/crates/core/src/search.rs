//! Enumerative synthesis over name holes and library fragments.
//!
//! The search keeps an explicit stack of decision frames. Each frame
//! snapshots the candidate program, picks one unsolved goal out of the
//! resolution residual, and enumerates the actions that could discharge
//! it: filling a name hole with a concrete name, or merging a library
//! fragment into the program. Every action application re-resolves the
//! whole candidate, so later frames always judge current syntax, and
//! only the name-pattern obligations persist across steps.
//!
//! When a complete candidate fails its tests, the interpreter trace of
//! entered methods tells us which decision frames the failing test can
//! actually observe. Backtracking jumps to the deepest such frame, and
//! the decisions popped over are kept in a replay table so the same
//! goals pick them back up first when they reappear.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ast::*;
use crate::builtins;
use crate::constraints::{canonical_key, Constraint, Residual, Ty, Verdict};
use crate::fragment::{self, Fragment, FragmentKind, Substitution};
use crate::holes;
use crate::infer;
use crate::interp;
use crate::pattern::{check_name_constraint, NameCheck};
use crate::print;
use crate::resolve;

/// A candidate under construction: program syntax plus the name-pattern
/// obligations that outlive substitution, plus the hole id supply.
#[derive(Clone, Debug)]
pub struct SynthState {
    pub program: Program,
    pub obligations: Vec<Constraint>,
    pub next_hole: u32,
}

impl SynthState {
    pub fn new(program: Program) -> SynthState {
        let obligations = infer::name_obligations(&program);
        let next_hole = holes::collect_hole_ids(&program)
            .iter()
            .map(|h| h.0 + 1)
            .max()
            .unwrap_or(0);
        SynthState { program, obligations, next_hole }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub seed: u64,
    /// Use failing-test traces to jump over unrelated decisions.
    pub trace_guided: bool,
    /// Run the test methods of complete candidates. When off, every
    /// complete candidate counts as a solution.
    pub execute_tests: bool,
    /// Keep searching after the first solution.
    pub find_all: bool,
    pub max_nodes: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            seed: 0,
            trace_guided: true,
            execute_tests: true,
            find_all: false,
            max_nodes: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Actions that survived resolution and became frames.
    pub nodes_expanded: u64,
    /// Actions rejected by resolution or composition.
    pub rejections: u64,
    /// Complete candidates whose tests were run.
    pub candidates_executed: u64,
    /// Individual test methods executed across all candidates.
    pub tests_executed: u64,
    /// Backtracks that skipped over at least one unrelated frame.
    pub jumps: u64,
    /// Skipped decisions taken back out of the replay table.
    pub replays: u64,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub solutions: Vec<Program>,
    pub stats: Stats,
    /// True when the whole space was explored (no budget cut-off).
    pub exhausted: bool,
}

/// Search progress events, for logs and tests.
#[derive(Clone, Debug)]
pub enum Event {
    Goal { depth: usize, key: String, actions: usize },
    Expanded { depth: usize, action: String },
    Rejected { depth: usize, action: String, rule: String, witness: String },
    Candidate { passed: bool, failing: Option<String>, tests: usize },
    Jump { popped: usize, test: String },
    Replayed { goal: String, action: String },
    Solution { text: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum BindSlot {
    DeclName,
    MemberName,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct SynthBind {
    slot: BindSlot,
    value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Action {
    Fill { hole: HoleId, value: String },
    Synth { lib_idx: usize, binds: Vec<SynthBind> },
}

fn action_key(a: &Action, library: &[Fragment]) -> String {
    match a {
        Action::Fill { value, .. } => format!("fill:{value}"),
        Action::Synth { lib_idx, binds } => {
            let mut s = format!("synth:{}", library[*lib_idx].label);
            for b in binds {
                let slot = match b.slot {
                    BindSlot::DeclName => "decl",
                    BindSlot::MemberName => "member",
                };
                s.push_str(&format!(":{slot}={}", b.value));
            }
            s
        }
    }
}

/// Renders a constraint with hole labels neutralized, so the same goal
/// keeps one key across fragment re-instantiations.
fn neutral_key(c: &Constraint) -> String {
    let rendered = canonical_key(c);
    let mut out = String::new();
    let mut chars = rendered.chars().peekable();
    while let Some(ch) = chars.next() {
        out.push(ch);
        if ch == '?' {
            let mut skipped = false;
            while let Some(&c2) = chars.peek() {
                if c2.is_alphanumeric() || c2 == '_' {
                    chars.next();
                    skipped = true;
                } else {
                    break;
                }
            }
            if skipped {
                out.push('_');
            }
        }
    }
    out
}

/// Hole ids a constraint mentions, in rendering order.
fn constraint_holes(c: &Constraint) -> Vec<HoleId> {
    fn name(out: &mut Vec<HoleId>, n: &Name) {
        match n {
            Name::Concrete(_) => {}
            Name::Hole(h) => out.push(h.id),
            Name::Pattern(p) => out.push(p.id),
        }
    }
    fn ty(out: &mut Vec<HoleId>, t: &Ty) {
        match t {
            Ty::Named(n) => name(out, n),
            Ty::Arrow(ps, r) => {
                for p in ps {
                    ty(out, p);
                }
                ty(out, r);
            }
            Ty::Var(_) | Ty::Void => {}
        }
    }
    let mut out = Vec::new();
    match c {
        Constraint::Sub(a, b) => {
            ty(&mut out, a);
            ty(&mut out, b);
        }
        Constraint::HasMember { owner, member, ty: t } => {
            ty(&mut out, owner);
            name(&mut out, member);
            ty(&mut out, t);
        }
        Constraint::Impl(a, b) => {
            name(&mut out, a);
            name(&mut out, b);
        }
        Constraint::Exists(a) => name(&mut out, a),
        Constraint::NameMatch(n, _) => name(&mut out, n),
    }
    out
}

/// Anchors a goal to the declaration member its hole sits in. Goals of
/// the same shape on different holes would otherwise share a frame key,
/// and a failing test's footprint could not tell their decisions apart.
fn hole_site(program: &Program, c: &Constraint) -> Option<String> {
    let ids = constraint_holes(c);
    if ids.is_empty() {
        return None;
    }
    let hit = |n: &Name| ids.iter().any(|&h| name_mentions(n, h));
    for d in &program.decls {
        match d {
            Decl::Class(cl) => {
                if hit(&cl.name) || hit(&cl.superclass) || cl.interfaces.iter().any(&hit) {
                    return Some(format!("@{}", cl.name));
                }
                for f in &cl.fields {
                    if hit(&f.ty) || hit(&f.name) {
                        return Some(format!("@{}.{}", cl.name, f.name));
                    }
                }
                for m in &cl.methods {
                    if ids.iter().any(|&h| method_mentions(m, h)) {
                        return Some(format!("@{}.{}", cl.name, m.name));
                    }
                }
            }
            Decl::Interface(itf) => {
                if hit(&itf.name) {
                    return Some(format!("@{}", itf.name));
                }
                for s in &itf.signatures {
                    if ids.iter().any(|&h| sig_mentions(s, h)) {
                        return Some(format!("@{}.{}", itf.name, s.name));
                    }
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Method(usize),
    Field,
}

fn shape_of(ty: &Ty) -> Shape {
    match ty {
        Ty::Arrow(args, _) => Shape::Method(args.len()),
        _ => Shape::Field,
    }
}

struct Frame {
    state: SynthState,
    goal: Option<Constraint>,
    key: String,
    actions: Vec<Action>,
    cursor: usize,
}

struct Reject {
    rule: String,
    witness: String,
}

/// (declaration index, 0 = field / 1 = method-or-signature, member index)
type Pos = (usize, u8, usize);

#[derive(Default)]
struct BodyRefs {
    fields: BTreeSet<String>,
    /// Members named at call sites; a run observes their presence (or
    /// absence) on the receiver's chain even when the call faults.
    methods: BTreeSet<String>,
    classes: BTreeSet<String>,
}

pub fn synthesize(initial: &SynthState, library: &[Fragment], opts: &SearchOptions) -> SearchResult {
    let mut stop = || false;
    let mut sink = |_: &Event| {};
    synthesize_with(initial, library, opts, &mut stop, &mut sink)
}

pub fn synthesize_with(
    initial: &SynthState,
    library: &[Fragment],
    opts: &SearchOptions,
    stop: &mut dyn FnMut() -> bool,
    sink: &mut dyn FnMut(&Event),
) -> SearchResult {
    let mut searcher = Searcher {
        library,
        opts: opts.clone(),
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        stats: Stats::default(),
        prov: BTreeMap::new(),
        class_prov: BTreeMap::new(),
        memory: BTreeMap::new(),
        replay: BTreeMap::new(),
        last_failure: None,
        seen: BTreeSet::new(),
        solutions: Vec::new(),
        sink,
        stop,
    };
    searcher.run(initial)
}

/// Counts distinct complete well-typed candidates reachable from the
/// initial state, without running any tests.
pub fn count_well_typed(
    initial: &SynthState,
    library: &[Fragment],
    max_nodes: Option<u64>,
) -> SearchResult {
    let opts = SearchOptions {
        seed: 0,
        trace_guided: false,
        execute_tests: false,
        find_all: true,
        max_nodes,
    };
    synthesize(initial, library, &opts)
}

struct Searcher<'a> {
    library: &'a [Fragment],
    opts: SearchOptions,
    rng: ChaCha8Rng,
    stats: Stats,
    /// Member position -> goal keys whose decisions shaped that member.
    prov: BTreeMap<Pos, BTreeSet<String>>,
    /// Declaration index -> goal keys that touched class-level syntax.
    class_prov: BTreeMap<usize, BTreeSet<String>>,
    /// Failing test id -> goal keys it is known to depend on. Grows
    /// monotonically; a regression after another fix inherits the
    /// previous failure's set.
    memory: BTreeMap<String, BTreeSet<String>>,
    /// Goal key -> action key to try first when the goal reappears.
    replay: BTreeMap<String, String>,
    last_failure: Option<String>,
    seen: BTreeSet<String>,
    solutions: Vec<Program>,
    sink: &'a mut dyn FnMut(&Event),
    stop: &'a mut dyn FnMut() -> bool,
}

impl<'a> Searcher<'a> {
    fn run(&mut self, initial: &SynthState) -> SearchResult {
        let mut stack: Vec<Frame> = Vec::new();
        match self.resolve_state(initial) {
            Ok(residual) => {
                let frame = self.make_frame(initial.clone(), &residual, 0);
                stack.push(frame);
            }
            Err(_) => return self.finish(true),
        }
        let mut truncated = false;
        loop {
            if (self.stop)() {
                truncated = true;
                break;
            }
            if let Some(max) = self.opts.max_nodes {
                if self.stats.nodes_expanded >= max {
                    truncated = true;
                    break;
                }
            }
            let Some(top) = stack.last() else { break };
            let depth = stack.len() - 1;
            if top.goal.is_none() {
                if self.handle_complete(&mut stack) {
                    break;
                }
                if stack.is_empty() {
                    break;
                }
                continue;
            }
            if top.cursor >= top.actions.len() {
                self.handle_exhausted(&mut stack);
                if stack.is_empty() {
                    break;
                }
                continue;
            }
            let applied = {
                let f = stack.last().unwrap();
                self.apply_action(&f.state, &f.actions[f.cursor])
            };
            match applied {
                Err(reject) => {
                    let f = stack.last_mut().unwrap();
                    let action = action_key(&f.actions[f.cursor], self.library);
                    f.cursor += 1;
                    self.stats.rejections += 1;
                    (self.sink)(&Event::Rejected {
                        depth,
                        action,
                        rule: reject.rule,
                        witness: reject.witness,
                    });
                }
                Ok((next, residual)) => {
                    self.stats.nodes_expanded += 1;
                    {
                        let f = stack.last().unwrap();
                        let key = f.key.clone();
                        let action = f.actions[f.cursor].clone();
                        (self.sink)(&Event::Expanded {
                            depth,
                            action: action_key(&action, self.library),
                        });
                        self.record_provenance(&f.state.program, &next.program, &action, &key);
                    }
                    let frame = self.make_frame(next, &residual, depth + 1);
                    stack.push(frame);
                }
            }
        }
        self.finish(!truncated)
    }

    fn finish(&mut self, exhausted: bool) -> SearchResult {
        SearchResult {
            solutions: core::mem::take(&mut self.solutions),
            stats: self.stats.clone(),
            exhausted,
        }
    }

    /// Handles the frame on top of the stack being a complete candidate.
    /// Returns true when the whole search should stop.
    fn handle_complete(&mut self, stack: &mut Vec<Frame>) -> bool {
        let frame = stack.pop().expect("complete frame present");
        let Some(program) = self.concretize(&frame.state) else {
            if let Some(parent) = stack.last_mut() {
                parent.cursor += 1;
            }
            return false;
        };
        let text = print::print_program(&program);
        if !self.opts.execute_tests {
            if self.seen.insert(text.clone()) {
                (self.sink)(&Event::Solution { text });
                self.solutions.push(program);
            }
            if let Some(parent) = stack.last_mut() {
                parent.cursor += 1;
            }
            return false;
        }
        let report = interp::run_tests(&program);
        self.stats.candidates_executed += 1;
        self.stats.tests_executed += report.outcomes.len() as u64;
        if report.all_passed() {
            (self.sink)(&Event::Candidate { passed: true, failing: None, tests: report.outcomes.len() });
            if self.seen.insert(text.clone()) {
                (self.sink)(&Event::Solution { text });
                self.solutions.push(program);
            }
            if !self.opts.find_all {
                return true;
            }
            if let Some(parent) = stack.last_mut() {
                parent.cursor += 1;
            }
            return false;
        }
        let failing = report.first_failure().expect("failed report names a test").clone();
        (self.sink)(&Event::Candidate {
            passed: false,
            failing: Some(failing.id.clone()),
            tests: report.outcomes.len(),
        });
        let deps = self.failing_deps(&program, &failing.trace);
        self.memory.entry(failing.id.clone()).or_default().extend(deps);
        if let Some(prev) = self.last_failure.clone() {
            // A test that regressed after another was fixed depends on
            // everything the previous failure did.
            if prev != failing.id {
                let inherited = self.memory.get(&prev).cloned().unwrap_or_default();
                self.memory.entry(failing.id.clone()).or_default().extend(inherited);
            }
        }
        self.last_failure = Some(failing.id.clone());
        let set = self.memory.get(&failing.id).cloned().unwrap_or_default();
        if !(self.opts.trace_guided && self.jump_to(stack, &set, &failing.id)) {
            if let Some(parent) = stack.last_mut() {
                parent.cursor += 1;
            }
        }
        false
    }

    /// Pops frames outside `set`, stashing their decisions for replay,
    /// until a frame inside `set` can advance. False when none exists.
    fn jump_to(&mut self, stack: &mut Vec<Frame>, set: &BTreeSet<String>, test: &str) -> bool {
        if !stack.iter().any(|f| set.contains(&f.key)) {
            return false;
        }
        let mut popped = 0usize;
        while let Some(top) = stack.last_mut() {
            if set.contains(&top.key) {
                top.cursor += 1;
                if popped > 0 {
                    self.stats.jumps += 1;
                    (self.sink)(&Event::Jump { popped, test: test.to_owned() });
                }
                return true;
            }
            if top.cursor < top.actions.len() {
                let akey = action_key(&top.actions[top.cursor], self.library);
                self.replay.insert(top.key.clone(), akey);
            }
            stack.pop();
            popped += 1;
        }
        true
    }

    fn handle_exhausted(&mut self, stack: &mut Vec<Frame>) {
        let done = stack.pop().expect("exhausted frame present");
        if stack.is_empty() {
            return;
        }
        if self.opts.trace_guided {
            if let Some(test) = self.last_failure.clone() {
                let set = self.memory.get(&test).cloned().unwrap_or_default();
                if set.contains(&done.key) && self.jump_to(stack, &set, &test) {
                    return;
                }
            }
        }
        stack.last_mut().expect("parent frame").cursor += 1;
    }

    fn resolve_state(&self, state: &SynthState) -> Result<Residual, Reject> {
        match resolve::resolve(&state.program, &state.obligations) {
            Ok(Verdict::Resolved(r)) => Ok(r),
            Ok(Verdict::Contradiction(c)) => Err(Reject {
                rule: c.rule.to_owned(),
                witness: format!("{}", c.witness),
            }),
            Err(e) => Err(Reject { rule: "generation".to_owned(), witness: format!("{e}") }),
        }
    }

    fn apply_action(
        &mut self,
        state: &SynthState,
        action: &Action,
    ) -> Result<(SynthState, Residual), Reject> {
        match action {
            Action::Fill { hole, value } => {
                let mut next = state.clone();
                let sub = Substitution::single(*hole, value);
                fragment::apply_subst(&mut next.program, &sub);
                next.obligations = next
                    .obligations
                    .iter()
                    .map(|c| fragment::apply_subst_obligation(c, &sub))
                    .collect();
                let residual = self.resolve_state(&next)?;
                Ok((next, residual))
            }
            Action::Synth { lib_idx, binds } => {
                let mut next = state.clone();
                let frag = &self.library[*lib_idx];
                let fresh = fragment::freshen(&frag.program, &mut next.next_hole);
                let fresh_obligations = infer::name_obligations(&fresh);
                let mut sub = Substitution::default();
                for bind in binds {
                    let target = match bind.slot {
                        BindSlot::DeclName => fresh.decls[0].name().clone(),
                        BindSlot::MemberName => match single_member_name(&fresh.decls[0]) {
                            Some(n) => n,
                            None => {
                                return Err(Reject {
                                    rule: "synth-bind".to_owned(),
                                    witness: format!("{} has no single member", frag.label),
                                })
                            }
                        },
                    };
                    match target.hole_id() {
                        Some(id) => {
                            sub.merge(&Substitution::single(id, &bind.value));
                        }
                        None => {
                            if target.as_concrete() != Some(bind.value.as_str()) {
                                return Err(Reject {
                                    rule: "synth-bind".to_owned(),
                                    witness: format!(
                                        "{} is already named {target}",
                                        frag.label
                                    ),
                                });
                            }
                        }
                    }
                }
                let mut addition = fresh;
                fragment::apply_subst(&mut addition, &sub);
                let added: Vec<Constraint> = fresh_obligations
                    .iter()
                    .map(|c| fragment::apply_subst_obligation(c, &sub))
                    .collect();
                match fragment::compose_program(&next.program, &addition) {
                    Ok(p) => next.program = p,
                    Err(e) => {
                        return Err(Reject { rule: "compose".to_owned(), witness: e.msg })
                    }
                }
                next.obligations.extend(added);
                let residual = self.resolve_state(&next)?;
                Ok((next, residual))
            }
        }
    }

    fn make_frame(&mut self, state: SynthState, residual: &Residual, depth: usize) -> Frame {
        let goal = self.select_goal(&state, residual);
        let (key, actions) = match &goal {
            None => (String::new(), Vec::new()),
            Some(g) => {
                let mut key = neutral_key(g);
                if let Some(site) = hole_site(&state.program, g) {
                    key.push_str(&site);
                }
                let mut actions = self.enumerate(&state, g);
                if let Some(want) = self.replay.remove(&key) {
                    if let Some(at) =
                        actions.iter().position(|a| action_key(a, self.library) == want)
                    {
                        let preferred = actions.remove(at);
                        actions.insert(0, preferred);
                        self.stats.replays += 1;
                        (self.sink)(&Event::Replayed { goal: key.clone(), action: want });
                    }
                }
                (key, actions)
            }
        };
        (self.sink)(&Event::Goal { depth, key: key.clone(), actions: actions.len() });
        Frame { state, goal, key, actions, cursor: 0 }
    }

    /// Picks the next goal: existence first, then members on supertypes
    /// before subtypes, hole-free constraints before hole-bearing ones.
    fn select_goal(&self, state: &SynthState, residual: &Residual) -> Option<Constraint> {
        if residual.suspended.is_empty() {
            // Pattern obligations with no driving typing goal cannot be
            // acted on; such a frame dead-ends with zero actions.
            return residual.name_pending.iter().next().cloned();
        }
        residual
            .suspended
            .iter()
            .min_by_key(|c| {
                let kind = match c {
                    Constraint::Exists(_) => 0u8,
                    Constraint::Impl(..) => 1,
                    Constraint::Sub(..) => 2,
                    Constraint::HasMember { .. } => 3,
                    Constraint::NameMatch(..) => 4,
                };
                let depth = match c {
                    Constraint::HasMember { owner, .. } => match owner.as_named() {
                        Some(n) => self.hier_depth(&state.program, n),
                        None => 200,
                    },
                    _ => 0,
                };
                (kind, depth, goal_has_holes(c), canonical_key(c))
            })
            .cloned()
    }

    fn hier_depth(&self, program: &Program, name: &Name) -> u16 {
        let Some(mut cur) = name.as_concrete().map(ToOwned::to_owned) else { return 200 };
        let mut depth = 0u16;
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > program.decls.len() + 4 {
                return 200;
            }
            if cur == builtins::OBJECT {
                return depth;
            }
            if builtins::is_builtin_type(&cur) {
                return depth + 1;
            }
            match program.find_class(&Name::concrete(&cur)) {
                Some(c) => match c.superclass.as_concrete() {
                    Some(s) => {
                        cur = s.to_owned();
                        depth += 1;
                    }
                    None => return 200,
                },
                None => {
                    return if program.find_interface(&Name::concrete(&cur)).is_some() {
                        1
                    } else {
                        200
                    }
                }
            }
        }
    }

    fn enumerate(&mut self, state: &SynthState, goal: &Constraint) -> Vec<Action> {
        let mut fills: Vec<Action> = Vec::new();
        let mut synths: Vec<Action> = Vec::new();
        match goal {
            Constraint::Exists(n) => match n.hole_id() {
                Some(h) => {
                    for t in self.type_universe(state) {
                        if self.fill_ok(state, h, &t) {
                            fills.push(Action::Fill { hole: h, value: t });
                        }
                    }
                }
                None => {
                    let s = n.as_concrete().expect("concrete");
                    if !self.is_known_type(state, s) {
                        synths = self.synth_type_actions(s);
                    }
                }
            },
            Constraint::Impl(a, b) => {
                if let Some(h) = b.hole_id() {
                    for t in self.interface_universe(state) {
                        if self.fill_ok(state, h, &t) {
                            fills.push(Action::Fill { hole: h, value: t });
                        }
                    }
                } else if !self.is_known_type(state, b.as_concrete().expect("concrete")) {
                    synths = self.synth_type_actions(b.as_concrete().expect("concrete"));
                } else if let Some(h) = a.hole_id() {
                    for t in self.type_universe(state) {
                        if self.fill_ok(state, h, &t) {
                            fills.push(Action::Fill { hole: h, value: t });
                        }
                    }
                } else if !self.is_known_type(state, a.as_concrete().expect("concrete")) {
                    synths = self.synth_type_actions(a.as_concrete().expect("concrete"));
                }
            }
            Constraint::Sub(x, y) => {
                let xn = x.as_named();
                let yn = y.as_named();
                if let Some(h) = xn.and_then(Name::hole_id) {
                    for t in self.type_universe(state) {
                        let fits = match yn.and_then(Name::as_concrete) {
                            Some(to) => self.reaches(state, &t, to) != Some(false),
                            None => true,
                        };
                        if fits && self.fill_ok(state, h, &t) {
                            fills.push(Action::Fill { hole: h, value: t });
                        }
                    }
                } else if let Some(h) = yn.and_then(Name::hole_id) {
                    for t in self.type_universe(state) {
                        let fits = match xn.and_then(Name::as_concrete) {
                            Some(from) => self.reaches(state, from, &t) != Some(false),
                            None => true,
                        };
                        if fits && self.fill_ok(state, h, &t) {
                            fills.push(Action::Fill { hole: h, value: t });
                        }
                    }
                } else {
                    for side in [xn, yn].into_iter().flatten() {
                        if let Some(s) = side.as_concrete() {
                            if !self.is_known_type(state, s) {
                                synths = self.synth_type_actions(s);
                                break;
                            }
                        }
                    }
                }
            }
            Constraint::HasMember { owner, member, ty } => {
                let shape = shape_of(ty);
                let owner_name = owner.as_named();
                let owner_concrete =
                    owner_name.and_then(Name::as_concrete).map(ToOwned::to_owned);
                match member.hole_id() {
                    Some(h) => {
                        if let Some(o) = &owner_concrete {
                            for cand in self.member_candidates(state, o, shape) {
                                if self.fill_ok(state, h, &cand) {
                                    fills.push(Action::Fill { hole: h, value: cand });
                                }
                            }
                        }
                        // Owner still a hole: other goals pin it first.
                    }
                    None => {
                        let m = member.as_concrete().expect("concrete").to_owned();
                        if let Some(h) = owner_name.and_then(Name::hole_id) {
                            for cand in self.types_with_member(state, &m, shape) {
                                if self.fill_ok(state, h, &cand) {
                                    fills.push(Action::Fill { hole: h, value: cand });
                                }
                            }
                        }
                        if let Some(o) = &owner_concrete {
                            synths.extend(self.synth_member_actions(state, o, &m));
                            if !self.is_known_type(state, o) {
                                synths.extend(self.synth_type_actions(o));
                            }
                        }
                    }
                }
            }
            Constraint::NameMatch(..) => {}
        }
        fills.shuffle(&mut self.rng);
        synths.shuffle(&mut self.rng);
        fills.extend(synths);
        fills
    }

    /// Concrete type names usable as hole fills: declared ones first,
    /// then builtins, then names the library could bring in.
    fn type_universe(&self, state: &SynthState) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut seen = BTreeSet::new();
        for d in &state.program.decls {
            if let Some(n) = d.name().as_concrete() {
                if seen.insert(n.to_owned()) {
                    out.push(n.to_owned());
                }
            }
        }
        for n in builtins::TYPE_NAMES {
            if seen.insert((*n).to_owned()) {
                out.push((*n).to_owned());
            }
        }
        for frag in self.library {
            if frag.kind == FragmentKind::Type {
                if let Some(n) = frag.program.decls[0].name().as_concrete() {
                    if seen.insert(n.to_owned()) {
                        out.push(n.to_owned());
                    }
                }
            }
        }
        out
    }

    fn interface_universe(&self, state: &SynthState) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for d in &state.program.decls {
            if let Decl::Interface(i) = d {
                if let Some(n) = i.name.as_concrete() {
                    if seen.insert(n.to_owned()) {
                        out.push(n.to_owned());
                    }
                }
            }
        }
        for frag in self.library {
            if let Decl::Interface(i) = &frag.program.decls[0] {
                if let Some(n) = i.name.as_concrete() {
                    if seen.insert(n.to_owned()) {
                        out.push(n.to_owned());
                    }
                }
            }
        }
        out
    }

    fn is_known_type(&self, state: &SynthState, name: &str) -> bool {
        builtins::is_builtin_type(name)
            || state.program.find_decl(&Name::concrete(name)).is_some()
    }

    /// Rejects a fill early when a pattern obligation on that hole can
    /// never accept the candidate.
    fn fill_ok(&self, state: &SynthState, hole: HoleId, candidate: &str) -> bool {
        for c in &state.obligations {
            if let Constraint::NameMatch(n, p) = c {
                if n.hole_id() == Some(hole) {
                    if check_name_constraint(&Name::concrete(candidate), p)
                        == NameCheck::Contradiction
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Member names visible on `owner` with a matching shape.
    fn member_candidates(&self, state: &SynthState, owner: &str, shape: Shape) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        if let Some(i) = state.program.find_interface(&Name::concrete(owner)) {
            if let Shape::Method(arity) = shape {
                for s in &i.signatures {
                    if s.params.len() == arity {
                        if let Some(n) = s.name.as_concrete() {
                            if seen.insert(n.to_owned()) {
                                out.push(n.to_owned());
                            }
                        }
                    }
                }
            }
            return out;
        }
        let mut cur = owner.to_owned();
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > state.program.decls.len() + 4 {
                break;
            }
            if let Some(c) = state.program.find_class(&Name::concrete(&cur)) {
                match shape {
                    Shape::Field => {
                        for f in &c.fields {
                            if let Some(n) = f.name.as_concrete() {
                                if seen.insert(n.to_owned()) {
                                    out.push(n.to_owned());
                                }
                            }
                        }
                    }
                    Shape::Method(arity) => {
                        for m in &c.methods {
                            if !m.is_ctor && m.params.len() == arity {
                                if let Some(n) = m.name.as_concrete() {
                                    if seen.insert(n.to_owned()) {
                                        out.push(n.to_owned());
                                    }
                                }
                            }
                        }
                    }
                }
                match c.superclass.as_concrete() {
                    Some(s) => cur = s.to_owned(),
                    None => break,
                }
            } else if builtins::is_builtin_type(&cur) {
                if let Shape::Method(arity) = shape {
                    for m in builtins::methods(&cur) {
                        if m.params.len() == arity && seen.insert(m.name.to_owned()) {
                            out.push(m.name.to_owned());
                        }
                    }
                }
                match builtins::superclass(&cur) {
                    Some(s) => cur = s.to_owned(),
                    None => break,
                }
            } else {
                break;
            }
        }
        out
    }

    /// Types (declared, builtin, or library) that already carry a member
    /// with this name and shape.
    fn types_with_member(&self, state: &SynthState, member: &str, shape: Shape) -> Vec<String> {
        let mut out = Vec::new();
        for t in self.type_universe(state) {
            let present = if state.program.find_decl(&Name::concrete(&t)).is_some()
                || builtins::is_builtin_type(&t)
            {
                self.member_candidates(state, &t, shape).iter().any(|m| m == member)
            } else {
                // Library-only type: inspect the fragment body directly.
                self.library.iter().any(|frag| {
                    frag.kind == FragmentKind::Type
                        && frag.program.decls[0].name().as_concrete() == Some(&t)
                        && decl_has_member(&frag.program.decls[0], member, shape)
                })
            };
            if present {
                out.push(t);
            }
        }
        out
    }

    fn synth_type_actions(&self, wanted: &str) -> Vec<Action> {
        let mut out = Vec::new();
        for (i, frag) in self.library.iter().enumerate() {
            if frag.kind != FragmentKind::Type {
                continue;
            }
            let name = frag.program.decls[0].name();
            match name {
                Name::Concrete(s) => {
                    if s == wanted {
                        out.push(Action::Synth { lib_idx: i, binds: Vec::new() });
                    }
                }
                Name::Hole(_) => out.push(Action::Synth {
                    lib_idx: i,
                    binds: alloc::vec![SynthBind {
                        slot: BindSlot::DeclName,
                        value: wanted.to_owned(),
                    }],
                }),
                Name::Pattern(p) => {
                    if check_name_constraint(&Name::concrete(wanted), &p.pattern)
                        != NameCheck::Contradiction
                    {
                        out.push(Action::Synth {
                            lib_idx: i,
                            binds: alloc::vec![SynthBind {
                                slot: BindSlot::DeclName,
                                value: wanted.to_owned(),
                            }],
                        });
                    }
                }
            }
        }
        out
    }

    /// Fragments that could add member `m` to `owner` or one of its
    /// declared superclasses.
    fn synth_member_actions(&self, state: &SynthState, owner: &str, member: &str) -> Vec<Action> {
        let mut out = Vec::new();
        for (i, frag) in self.library.iter().enumerate() {
            if frag.kind != FragmentKind::Member {
                continue;
            }
            let decl = &frag.program.decls[0];
            let Some(frag_member) = single_member_name(decl) else { continue };
            let member_bind = match &frag_member {
                Name::Concrete(s) => {
                    if s != member {
                        continue;
                    }
                    None
                }
                Name::Hole(_) => Some(SynthBind {
                    slot: BindSlot::MemberName,
                    value: member.to_owned(),
                }),
                Name::Pattern(p) => {
                    if check_name_constraint(&Name::concrete(member), &p.pattern)
                        == NameCheck::Contradiction
                    {
                        continue;
                    }
                    Some(SynthBind { slot: BindSlot::MemberName, value: member.to_owned() })
                }
            };
            let shell = decl.name();
            let mut targets: Vec<String> = Vec::new();
            match shell.as_concrete() {
                Some(s) => {
                    if s == owner || self.supertypes(state, owner).iter().any(|t| t == s) {
                        targets.push(s.to_owned());
                    }
                }
                None => {
                    targets.push(owner.to_owned());
                    for t in self.supertypes(state, owner) {
                        targets.push(t);
                    }
                }
            }
            for target in targets {
                let mut binds = Vec::new();
                if shell.is_hole() {
                    binds.push(SynthBind { slot: BindSlot::DeclName, value: target.clone() });
                }
                if let Some(mb) = &member_bind {
                    binds.push(mb.clone());
                }
                out.push(Action::Synth { lib_idx: i, binds });
            }
        }
        out
    }

    /// Proper declared superclasses of a class, nearest first.
    fn supertypes(&self, state: &SynthState, name: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = name.to_owned();
        let mut guard = 0usize;
        while let Some(c) = state.program.find_class(&Name::concrete(&cur)) {
            guard += 1;
            if guard > state.program.decls.len() + 2 {
                break;
            }
            match c.superclass.as_concrete() {
                Some(s) if state.program.find_class(&Name::concrete(s)).is_some() => {
                    out.push(s.to_owned());
                    cur = s.to_owned();
                }
                _ => break,
            }
        }
        out
    }

    /// Whether `from` can reach `to` in the declared hierarchy; `None`
    /// when holes or undeclared names leave it open.
    fn reaches(&self, state: &SynthState, from: &str, to: &str) -> Option<bool> {
        if to == builtins::OBJECT || from == to {
            return Some(true);
        }
        let mut unknown = false;
        let mut cur = from.to_owned();
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > state.program.decls.len() + 4 {
                unknown = true;
                break;
            }
            if cur == to {
                return Some(true);
            }
            if let Some(c) = state.program.find_class(&Name::concrete(&cur)) {
                for i in &c.interfaces {
                    match i.as_concrete() {
                        Some(s) if s == to => return Some(true),
                        Some(_) => {}
                        None => unknown = true,
                    }
                }
                match c.superclass.as_concrete() {
                    Some(s) => cur = s.to_owned(),
                    None => {
                        unknown = true;
                        break;
                    }
                }
            } else if builtins::is_builtin_type(&cur) {
                match builtins::superclass(&cur) {
                    Some(s) => cur = s.to_owned(),
                    None => break,
                }
            } else if state.program.find_interface(&Name::concrete(&cur)).is_some() {
                break;
            } else {
                unknown = true;
                break;
            }
        }
        if unknown {
            None
        } else {
            Some(false)
        }
    }

    /// Gives fresh concrete names to holes that survived resolution
    /// (members nothing constrains), then re-checks the result.
    fn concretize(&self, state: &SynthState) -> Option<Program> {
        let ids = holes::collect_hole_ids(&state.program);
        if ids.is_empty() {
            return Some(state.program.clone());
        }
        let mut used: BTreeSet<String> = BTreeSet::new();
        holes::visit_names(&state.program, &mut |n| {
            if let Some(s) = n.as_concrete() {
                used.insert(s.to_owned());
            }
        });
        let mut sub = Substitution::default();
        let mut counter = state.next_hole;
        for id in ids {
            let label = hole_label(&state.program, id).unwrap_or_else(|| "gen".to_owned());
            let mut cand = label.clone();
            while used.contains(&cand) {
                cand = format!("{label}{counter}");
                counter += 1;
            }
            used.insert(cand.clone());
            sub.merge(&Substitution::single(id, &cand));
        }
        let mut program = state.program.clone();
        fragment::apply_subst(&mut program, &sub);
        let obligations: Vec<Constraint> = state
            .obligations
            .iter()
            .map(|c| fragment::apply_subst_obligation(c, &sub))
            .collect();
        match resolve::resolve(&program, &obligations) {
            Ok(Verdict::Resolved(r)) if r.is_complete() => Some(program),
            _ => None,
        }
    }

    fn record_provenance(
        &mut self,
        before: &Program,
        after: &Program,
        action: &Action,
        key: &str,
    ) {
        if key.is_empty() {
            return;
        }
        match action {
            Action::Fill { hole, .. } => {
                for (d, decl) in before.decls.iter().enumerate() {
                    if decl_level_mentions(decl, *hole) {
                        self.class_prov.entry(d).or_default().insert(key.to_owned());
                        for pos in decl_positions(decl, d) {
                            self.prov.entry(pos).or_default().insert(key.to_owned());
                        }
                    }
                    match decl {
                        Decl::Class(c) => {
                            for (i, f) in c.fields.iter().enumerate() {
                                if name_mentions(&f.ty, *hole) || name_mentions(&f.name, *hole) {
                                    self.prov
                                        .entry((d, 0, i))
                                        .or_default()
                                        .insert(key.to_owned());
                                }
                            }
                            for (i, m) in c.methods.iter().enumerate() {
                                if method_mentions(m, *hole) {
                                    self.prov
                                        .entry((d, 1, i))
                                        .or_default()
                                        .insert(key.to_owned());
                                }
                            }
                        }
                        Decl::Interface(itf) => {
                            for (i, s) in itf.signatures.iter().enumerate() {
                                if sig_mentions(s, *hole) {
                                    self.prov
                                        .entry((d, 1, i))
                                        .or_default()
                                        .insert(key.to_owned());
                                }
                            }
                        }
                    }
                }
            }
            Action::Synth { .. } => {
                for (d, decl) in after.decls.iter().enumerate() {
                    if d >= before.decls.len() {
                        self.class_prov.entry(d).or_default().insert(key.to_owned());
                        for pos in decl_positions(decl, d) {
                            self.prov.entry(pos).or_default().insert(key.to_owned());
                        }
                        continue;
                    }
                    let (bf, bm) = member_counts(&before.decls[d]);
                    let (af, am) = member_counts(decl);
                    if bf != af || bm != am {
                        self.class_prov.entry(d).or_default().insert(key.to_owned());
                        for i in bf..af {
                            self.prov.entry((d, 0, i)).or_default().insert(key.to_owned());
                        }
                        for i in bm..am {
                            self.prov.entry((d, 1, i)).or_default().insert(key.to_owned());
                        }
                    }
                }
            }
        }
    }

    /// Goal keys a failing test's outcome could depend on, derived from
    /// the methods its run entered.
    fn failing_deps(&self, program: &Program, trace: &[String]) -> BTreeSet<String> {
        let mut dep: BTreeSet<String> = BTreeSet::new();
        let idx_of: BTreeMap<&str, usize> = program
            .decls
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.name().as_concrete().map(|n| (n, i)))
            .collect();
        let mut refs = BodyRefs::default();
        for atom in trace {
            if let Some((class, method)) = atom.split_once('.') {
                refs.methods.insert(method.to_owned());
                refs.classes.insert(class.to_owned());
                if let Some(&d) = idx_of.get(class) {
                    if let Decl::Class(c) = &program.decls[d] {
                        if let Some(m) = c
                            .methods
                            .iter()
                            .find(|m| !m.is_ctor && m.name.as_concrete() == Some(method))
                        {
                            scan_stmts(&m.body, &mut refs);
                        }
                    }
                }
            } else if let Some(&d) = idx_of.get(atom.as_str()) {
                if let Decl::Class(c) = &program.decls[d] {
                    if let Some((i, m)) =
                        c.methods.iter().enumerate().find(|(_, m)| m.is_ctor)
                    {
                        if let Some(keys) = self.prov.get(&(d, 1, i)) {
                            dep.extend(keys.iter().cloned());
                        }
                        scan_stmts(&m.body, &mut refs);
                    }
                }
                refs.classes.insert(atom.clone());
            }
        }
        // Tests run on a fresh heap, so every receiver's class ran its
        // constructor and shows up as a bare class atom. Member lookups
        // therefore only ever walk chains rooted at traced classes.
        let mut looked_at: BTreeSet<String> = BTreeSet::new();
        for class in &refs.classes {
            let mut cur = class.clone();
            let mut guard = 0usize;
            while looked_at.insert(cur.clone()) {
                guard += 1;
                if guard > program.decls.len() + 2 {
                    break;
                }
                match idx_of.get(cur.as_str()).map(|&d| &program.decls[d]) {
                    Some(Decl::Class(c)) => match c.superclass.as_concrete() {
                        Some(s) => cur = s.to_owned(),
                        None => break,
                    },
                    _ => break,
                }
            }
        }
        // A declaration of a name the run looked up could have supplied
        // or shadowed what it found, anywhere on a walked chain.
        for (d, decl) in program.decls.iter().enumerate() {
            if !decl.name().as_concrete().is_some_and(|n| looked_at.contains(n)) {
                continue;
            }
            match decl {
                Decl::Class(c) => {
                    for (i, f) in c.fields.iter().enumerate() {
                        if f.name.as_concrete().is_some_and(|n| refs.fields.contains(n)) {
                            if let Some(keys) = self.prov.get(&(d, 0, i)) {
                                dep.extend(keys.iter().cloned());
                            }
                        }
                    }
                    for (i, m) in c.methods.iter().enumerate() {
                        if m.is_ctor {
                            continue;
                        }
                        if m.name.as_concrete().is_some_and(|n| refs.methods.contains(n)) {
                            if let Some(keys) = self.prov.get(&(d, 1, i)) {
                                dep.extend(keys.iter().cloned());
                            }
                        }
                    }
                }
                Decl::Interface(itf) => {
                    for (i, s) in itf.signatures.iter().enumerate() {
                        if s.name.as_concrete().is_some_and(|n| refs.methods.contains(n)) {
                            if let Some(keys) = self.prov.get(&(d, 1, i)) {
                                dep.extend(keys.iter().cloned());
                            }
                        }
                    }
                }
            }
        }
        for class in &refs.classes {
            // A referenced class's shape: hierarchy edges and the field
            // set construction fills with defaults. Entered methods are
            // already covered by their own trace atoms.
            let mut cur = class.clone();
            let mut guard = 0usize;
            while let Some(&d) = idx_of.get(cur.as_str()) {
                guard += 1;
                if guard > program.decls.len() + 2 {
                    break;
                }
                if let Some(keys) = self.class_prov.get(&d) {
                    dep.extend(keys.iter().cloned());
                }
                if let Decl::Class(c) = &program.decls[d] {
                    for i in 0..c.fields.len() {
                        if let Some(keys) = self.prov.get(&(d, 0, i)) {
                            dep.extend(keys.iter().cloned());
                        }
                    }
                }
                match &program.decls[d] {
                    Decl::Class(c) => match c.superclass.as_concrete() {
                        Some(s) => cur = s.to_owned(),
                        None => break,
                    },
                    Decl::Interface(_) => break,
                }
            }
            // Hierarchy edges pointing at this type matter for casts.
            for (d, decl) in program.decls.iter().enumerate() {
                if let Decl::Class(c) = decl {
                    let touches = c.superclass.as_concrete() == Some(class)
                        || c.interfaces.iter().any(|i| i.as_concrete() == Some(class.as_str()));
                    if touches {
                        if let Some(keys) = self.class_prov.get(&d) {
                            dep.extend(keys.iter().cloned());
                        }
                    }
                }
            }
        }
        dep
    }
}

fn single_member_name(decl: &Decl) -> Option<Name> {
    match decl {
        Decl::Class(c) => {
            if c.fields.len() == 1 && c.methods.is_empty() {
                Some(c.fields[0].name.clone())
            } else if c.methods.len() == 1 && c.fields.is_empty() {
                Some(c.methods[0].name.clone())
            } else {
                None
            }
        }
        Decl::Interface(i) => {
            if i.signatures.len() == 1 {
                Some(i.signatures[0].name.clone())
            } else {
                None
            }
        }
    }
}

fn decl_has_member(decl: &Decl, member: &str, shape: Shape) -> bool {
    match decl {
        Decl::Class(c) => match shape {
            Shape::Field => c.fields.iter().any(|f| f.name.as_concrete() == Some(member)),
            Shape::Method(arity) => c.methods.iter().any(|m| {
                !m.is_ctor && m.params.len() == arity && m.name.as_concrete() == Some(member)
            }),
        },
        Decl::Interface(i) => match shape {
            Shape::Field => false,
            Shape::Method(arity) => i
                .signatures
                .iter()
                .any(|s| s.params.len() == arity && s.name.as_concrete() == Some(member)),
        },
    }
}

fn goal_has_holes(c: &Constraint) -> bool {
    fn ty_holed(t: &Ty) -> bool {
        match t {
            Ty::Named(n) => n.is_hole(),
            Ty::Arrow(args, ret) => args.iter().any(ty_holed) || ty_holed(ret),
            Ty::Var(_) | Ty::Void => false,
        }
    }
    match c {
        Constraint::Sub(a, b) => ty_holed(a) || ty_holed(b),
        Constraint::HasMember { owner, member, ty } => {
            ty_holed(owner) || member.is_hole() || ty_holed(ty)
        }
        Constraint::Impl(a, b) => a.is_hole() || b.is_hole(),
        Constraint::Exists(n) => n.is_hole(),
        Constraint::NameMatch(n, p) => n.is_hole() || !p.is_hole_free(),
    }
}

fn name_mentions(n: &Name, h: HoleId) -> bool {
    match n {
        Name::Concrete(_) => false,
        Name::Hole(x) => x.id == h,
        Name::Pattern(p) => p.id == h || p.pattern.holes().contains(&h),
    }
}

fn decl_level_mentions(decl: &Decl, h: HoleId) -> bool {
    match decl {
        Decl::Class(c) => {
            name_mentions(&c.name, h)
                || name_mentions(&c.superclass, h)
                || c.interfaces.iter().any(|i| name_mentions(i, h))
        }
        Decl::Interface(i) => name_mentions(&i.name, h),
    }
}

fn method_mentions(m: &Method, h: HoleId) -> bool {
    let shell = Program {
        decls: alloc::vec![Decl::Class(ClassDecl {
            annotation: None,
            name: Name::concrete("X"),
            superclass: Name::concrete(builtins::OBJECT),
            interfaces: Vec::new(),
            fields: Vec::new(),
            methods: alloc::vec![m.clone()],
        })],
    };
    holes::collect_hole_ids(&shell).contains(&h)
}

fn sig_mentions(s: &Sig, h: HoleId) -> bool {
    if name_mentions(&s.name, h) {
        return true;
    }
    if let RetType::Name(n) = &s.ret {
        if name_mentions(n, h) {
            return true;
        }
    }
    s.params.iter().any(|p| name_mentions(&p.ty, h))
}

fn member_counts(decl: &Decl) -> (usize, usize) {
    match decl {
        Decl::Class(c) => (c.fields.len(), c.methods.len()),
        Decl::Interface(i) => (0, i.signatures.len()),
    }
}

fn decl_positions(decl: &Decl, d: usize) -> Vec<Pos> {
    let mut out = Vec::new();
    let (nf, nm) = member_counts(decl);
    for i in 0..nf {
        out.push((d, 0, i));
    }
    for i in 0..nm {
        out.push((d, 1, i));
    }
    out
}

fn hole_label(program: &Program, id: HoleId) -> Option<String> {
    let mut found: Option<String> = None;
    holes::visit_names(program, &mut |n| {
        if found.is_none() {
            if let Name::Hole(h) = n {
                if h.id == id {
                    found = Some(h.label.clone());
                }
            }
        }
    });
    found
}

fn scan_stmts(body: &[Stmt], refs: &mut BodyRefs) {
    for s in body {
        match s {
            Stmt::Local { init, .. } => scan_expr(init, refs),
            Stmt::Assign { target, value } => {
                if let LValue::Field { recv, name } = target {
                    scan_expr(recv, refs);
                    if let Some(n) = name.as_concrete() {
                        refs.fields.insert(n.to_owned());
                    }
                }
                scan_expr(value, refs);
            }
            Stmt::Expr(e) => scan_expr(e, refs),
            Stmt::Return(e) => {
                if let Some(e) = e {
                    scan_expr(e, refs);
                }
            }
            Stmt::If { cond, then_body, else_body } => {
                scan_expr(cond, refs);
                scan_stmts(then_body, refs);
                scan_stmts(else_body, refs);
            }
            Stmt::While { cond, body } => {
                scan_expr(cond, refs);
                scan_stmts(body, refs);
            }
            Stmt::For { init, cond, step, body } => {
                scan_stmts(core::slice::from_ref(init), refs);
                scan_expr(cond, refs);
                scan_stmts(core::slice::from_ref(step), refs);
                scan_stmts(body, refs);
            }
            Stmt::Assert(e) => scan_expr(e, refs),
        }
    }
}

fn scan_expr(e: &Expr, refs: &mut BodyRefs) {
    match e {
        Expr::Var(_) | Expr::This | Expr::Int(_) | Expr::Str(_) | Expr::Bool(_) | Expr::Null => {}
        Expr::Field { recv, name } => {
            scan_expr(recv, refs);
            if let Some(n) = name.as_concrete() {
                refs.fields.insert(n.to_owned());
            }
        }
        Expr::Call { recv, name, args } => {
            scan_expr(recv, refs);
            if let Some(n) = name.as_concrete() {
                refs.methods.insert(n.to_owned());
            }
            for a in args {
                scan_expr(a, refs);
            }
        }
        Expr::StaticCall { class, name, args } => {
            if let Some(c) = class.as_concrete() {
                refs.classes.insert(c.to_owned());
            }
            if let Some(n) = name.as_concrete() {
                refs.methods.insert(n.to_owned());
            }
            for a in args {
                scan_expr(a, refs);
            }
        }
        Expr::New { class, args } => {
            if let Some(c) = class.as_concrete() {
                refs.classes.insert(c.to_owned());
            }
            for a in args {
                scan_expr(a, refs);
            }
        }
        Expr::Cast { ty, expr } => {
            if let Some(c) = ty.as_concrete() {
                refs.classes.insert(c.to_owned());
            }
            scan_expr(expr, refs);
        }
        Expr::Binary { lhs, rhs, .. } => {
            scan_expr(lhs, refs);
            scan_expr(rhs, refs);
        }
    }
}
