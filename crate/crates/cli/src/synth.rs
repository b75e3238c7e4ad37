//! The `synth` and `count` commands: drive the search with a wall
//! clock, reconstruct the chosen action path, and serialize reports.

use std::time::{Duration, Instant};

use lmsynth_core::ast::Program;
use lmsynth_core::fragment::Fragment;
use lmsynth_core::search::{self, Event, SearchOptions, Stats, SynthState};
use serde::Serialize;

use crate::load::strip_patterns;

#[derive(Clone, Debug)]
pub struct SynthJob {
    pub initial: Program,
    pub library: Vec<Fragment>,
    pub seed: u64,
    pub trace_guided: bool,
    pub name_patterns: bool,
    pub timeout: Duration,
    pub max_nodes: Option<u64>,
    /// Mirror every search event to stderr.
    pub log: bool,
}

#[derive(Clone, Debug)]
pub struct SynthOutcome {
    pub solution: Option<Program>,
    pub solution_path: Vec<String>,
    pub stats: Stats,
    pub wall: Duration,
    pub timed_out: bool,
}

/// Runs one synthesis job to the first solution or the deadline.
/// Callers are responsible for giving this a large-stack thread.
pub fn run_synth(job: &SynthJob) -> SynthOutcome {
    let mut initial = job.initial.clone();
    let mut library = job.library.clone();
    if !job.name_patterns {
        strip_patterns(&mut initial);
        for frag in &mut library {
            strip_patterns(&mut frag.program);
        }
    }
    let state = SynthState::new(initial);
    let opts = SearchOptions {
        seed: job.seed,
        trace_guided: job.trace_guided,
        execute_tests: true,
        find_all: false,
        max_nodes: job.max_nodes,
    };
    let start = Instant::now();
    let deadline = job.timeout;
    let mut stop = move || start.elapsed() >= deadline;

    // The actions applied on the current stack, one per frame; a
    // solution snapshot of this vector is the path that produced it.
    let mut trail: Vec<String> = Vec::new();
    let mut path: Vec<String> = Vec::new();
    let log = job.log;
    let mut sink = |ev: &Event| {
        if log {
            log_event(ev);
        }
        match ev {
            Event::Expanded { depth, action } => {
                trail.truncate(*depth);
                trail.push(action.clone());
            }
            Event::Solution { .. } => {
                if path.is_empty() {
                    path = trail.clone();
                }
            }
            _ => {}
        }
    };
    let result = search::synthesize_with(&state, &library, &opts, &mut stop, &mut sink);
    let wall = start.elapsed();
    let solved = !result.solutions.is_empty();
    SynthOutcome {
        solution: result.solutions.into_iter().next(),
        solution_path: path,
        stats: result.stats,
        wall,
        timed_out: !solved && !result.exhausted,
    }
}

fn log_event(ev: &Event) {
    match ev {
        Event::Goal { depth, key, actions } => {
            if key.is_empty() {
                eprintln!("{:depth$}candidate complete", "");
            } else {
                eprintln!("{:depth$}goal {key} ({actions} actions)", "");
            }
        }
        Event::Expanded { depth, action } => eprintln!("{:depth$}take {action}", ""),
        Event::Rejected { depth, action, rule, witness } => {
            eprintln!("{:depth$}reject {action}: {rule}: {witness}", "")
        }
        Event::Candidate { passed: true, tests, .. } => {
            eprintln!("tests: all {tests} passed")
        }
        Event::Candidate { passed: false, failing, tests } => eprintln!(
            "tests: {} of {tests} failed",
            failing.as_deref().unwrap_or("?"),
        ),
        Event::Jump { popped, test } => eprintln!("jump over {popped} frames for {test}"),
        Event::Replayed { goal, action } => eprintln!("replay {action} at {goal}"),
        Event::Solution { .. } => eprintln!("solution"),
    }
}

/// Exhaustively counts complete candidates, tests disabled.
pub fn run_count(
    initial: &Program,
    library: &[Fragment],
    name_patterns: bool,
    max_nodes: Option<u64>,
) -> (u64, bool) {
    let mut initial = initial.clone();
    let mut library = library.to_vec();
    if !name_patterns {
        strip_patterns(&mut initial);
        for frag in &mut library {
            strip_patterns(&mut frag.program);
        }
    }
    let state = SynthState::new(initial);
    let result = search::count_well_typed(&state, &library, max_nodes);
    (result.solutions.len() as u64, result.exhausted)
}

#[derive(Serialize)]
pub struct OptionsEcho {
    pub seed: u64,
    pub trace_guided: bool,
    pub name_patterns: bool,
    pub timeout_secs: u64,
}

/// On-disk report for one `synth` invocation.
#[derive(Serialize)]
pub struct SynthReport {
    pub solved: bool,
    pub nodes_expanded: u64,
    pub candidates_executed: u64,
    pub tests_run: u64,
    pub wall_ms: u64,
    pub solution_path: Vec<String>,
    pub options: OptionsEcho,
}

pub fn report_of(job: &SynthJob, out: &SynthOutcome) -> SynthReport {
    SynthReport {
        solved: out.solution.is_some(),
        nodes_expanded: out.stats.nodes_expanded,
        candidates_executed: out.stats.candidates_executed,
        tests_run: out.stats.tests_executed,
        wall_ms: out.wall.as_millis() as u64,
        solution_path: out.solution_path.clone(),
        options: OptionsEcho {
            seed: job.seed,
            trace_guided: job.trace_guided,
            name_patterns: job.name_patterns,
            timeout_secs: job.timeout.as_secs(),
        },
    }
}
