//! Reading task files and fragment libraries from disk.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lmsynth_core::ast::{Hole, Name, Program};
use lmsynth_core::fragment::{fragment_from_source, Fragment};
use lmsynth_core::holes::visit_names_mut;
use lmsynth_core::parse::parse_program;

/// Parses a task file. Tasks may carry holes; they are synthesis
/// inputs, not finished programs.
pub fn load_task(path: &Path) -> Result<Program> {
    let src = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_program(&src).map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e))
}

/// Loads every `*.lm` file in a directory as one library fragment,
/// in sorted filename order so labels and action order are stable.
pub fn load_library(dir: &Path) -> Result<Vec<Fragment>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading library directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lm"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .lm files in {}", dir.display());
    }
    let mut out = Vec::new();
    for p in paths {
        let src = fs::read_to_string(&p)
            .with_context(|| format!("reading {}", p.display()))?;
        let label = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "fragment".to_owned());
        let frag = fragment_from_source(&src, &label)
            .map_err(|e| anyhow::anyhow!("{}: {}", p.display(), e.msg))?;
        out.push(frag);
    }
    Ok(out)
}

/// Demotes every pattern hole to a plain hole, so no name-match
/// obligations are generated for this program.
pub fn strip_patterns(program: &mut Program) {
    visit_names_mut(program, &mut |n| {
        if let Name::Pattern(p) = n {
            *n = Name::Hole(Hole { id: p.id, label: format!("h{}", p.id.0) });
        }
    });
}
