//! The `check` command: constraint dumps and resolution transcripts.

use std::fmt::Write;

use anyhow::Result;
use lmsynth_core::ast::Program;
use lmsynth_core::constraints::{Constraint, Verdict};
use lmsynth_core::resolve::{resolve_with, Outcome, TraceStep};
use lmsynth_core::{constraints::VarSupply, infer};

/// Dumps the generated constraint set, then the resolution result.
/// Constraints that end the run suspended are wrapped in `|_ ... _|`.
pub fn emit_constraints(program: &Program) -> Result<String> {
    let mut supply = VarSupply::default();
    let generated =
        infer::generate(program, &mut supply).map_err(|e| anyhow::anyhow!("{e}"))?;
    let obligations = infer::name_obligations(program);
    let mut out = String::new();
    writeln!(out, "generated:")?;
    for c in generated.iter().chain(obligations.iter()) {
        writeln!(out, "  {c}")?;
    }
    match resolve_with(program, &obligations, &mut |_| {})
        .map_err(|e| anyhow::anyhow!("{e}"))?
    {
        Verdict::Contradiction(c) => {
            writeln!(out, "contradiction:")?;
            writeln!(out, "  {}  ({})", c.witness, c.rule)?;
        }
        Verdict::Resolved(r) => {
            writeln!(out, "residual:")?;
            for c in r.suspended.iter().chain(r.name_pending.iter()) {
                writeln!(out, "  |_ {c} _|")?;
            }
            for c in &r.var_pending {
                writeln!(out, "  {c}")?;
            }
            if r.is_complete() {
                writeln!(out, "complete")?;
            } else {
                writeln!(out, "incomplete")?;
            }
        }
    }
    Ok(out)
}

fn render_step(step: &TraceStep) -> String {
    let rhs = match &step.outcome {
        Outcome::Discharged => "ok".to_owned(),
        Outcome::Suspended => format!("|_ {} _|", step.input),
        Outcome::VarPending => format!("{}", step.input),
        Outcome::Contradicted => "contradiction".to_owned(),
        Outcome::Derived(cs) => {
            if cs.is_empty() {
                "ok".to_owned()
            } else {
                cs.iter().map(Constraint::to_string).collect::<Vec<_>>().join(", ")
            }
        }
    };
    format!("{}: {} ==> {}", step.rule, step.input, rhs)
}

/// Emits every rewrite the resolver applied, one `rule: C ==> C'` line
/// per step, in application order.
pub fn transcript(program: &Program) -> Result<String> {
    let obligations = infer::name_obligations(program);
    let mut out = String::new();
    let verdict = resolve_with(program, &obligations, &mut |step| {
        out.push_str(&render_step(&step));
        out.push('\n');
    })
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    match verdict {
        Verdict::Contradiction(c) => {
            out.push_str(&format!("=> contradiction: {} ({})\n", c.witness, c.rule))
        }
        Verdict::Resolved(r) => {
            if r.is_complete() {
                out.push_str("=> complete\n");
            } else {
                out.push_str("=> incomplete\n");
            }
        }
    }
    Ok(out)
}
