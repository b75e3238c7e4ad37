//! The `run` command: execute a program's unit tests and report.

use anyhow::{bail, Result};
use lmsynth_core::constraints::Verdict;
use lmsynth_core::holes::is_hole_free;
use lmsynth_core::interp::{run_tests, TestReport};
use lmsynth_core::{infer, resolve};

/// Runs every test in the program, after refusing programs that are
/// not complete (holes remaining or contradictory typing).
pub fn run_program(program: &lmsynth_core::ast::Program) -> Result<TestReport> {
    if !is_hole_free(program) {
        bail!("program still contains holes; synthesize it first");
    }
    let obligations = infer::name_obligations(program);
    match resolve::resolve(program, &obligations).map_err(|e| anyhow::anyhow!("{e}"))? {
        Verdict::Contradiction(c) => {
            bail!("program does not typecheck: {} ({})", c.witness, c.rule)
        }
        Verdict::Resolved(r) if !r.is_complete() => {
            let open = r.suspended.iter().chain(r.name_pending.iter()).next();
            bail!(
                "program is incomplete: unresolved constraint {}",
                open.map(|c| c.to_string()).unwrap_or_default()
            )
        }
        Verdict::Resolved(_) => {}
    }
    Ok(run_tests(program))
}

pub fn render_report(report: &TestReport) -> String {
    let mut out = String::new();
    for o in &report.outcomes {
        match &o.failure {
            None => out.push_str(&format!("test {} ... ok\n", o.id)),
            Some(f) => out.push_str(&format!("test {} ... FAILED: {}\n", o.id, f)),
        }
    }
    let failed = report.outcomes.iter().filter(|o| !o.passed()).count();
    let passed = report.outcomes.len() - failed;
    let skipped = report.declared - report.outcomes.len();
    out.push_str(&format!(
        "{} passed, {} failed, {} not run\n",
        passed, failed, skipped
    ));
    out
}
