//! Benchmark harness: generates scaled cases, runs seeded trials per
//! search mode on a small worker pool, and writes CSV/JSON reports.

pub mod gen;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use lmsynth_core::ast::Program;
use lmsynth_core::fragment::Fragment;

use crate::load;
use crate::stack;
use crate::synth::{run_synth, SynthJob};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    /// No trace guidance, no name patterns.
    Base,
    /// Trace-guided backtracking, plain holes.
    Trace,
    /// Trace-guided backtracking plus name patterns.
    TracePatterns,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Base => "base",
            Mode::Trace => "trace",
            Mode::TracePatterns => "trace+patterns",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        Ok(match s.trim() {
            "base" => Mode::Base,
            "trace" => Mode::Trace,
            "trace+patterns" => Mode::TracePatterns,
            other => bail!("unknown mode `{other}` (expected base, trace, trace+patterns)"),
        })
    }

    pub fn trace_guided(self) -> bool {
        !matches!(self, Mode::Base)
    }

    pub fn name_patterns(self) -> bool {
        matches!(self, Mode::TracePatterns)
    }
}

pub fn parse_modes(s: &str) -> Result<Vec<Mode>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let m = Mode::parse(part)?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Parses `3` or an inclusive range `1..4`.
pub fn parse_scales(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let lo: u32 = a.trim().parse().context("bad scale range start")?;
        let hi: u32 = b.trim().parse().context("bad scale range end")?;
        if lo == 0 || hi < lo {
            bail!("bad scale range `{s}`");
        }
        Ok((lo..=hi).collect())
    } else {
        let n: u32 = s.parse().with_context(|| format!("bad scale `{s}`"))?;
        if n == 0 {
            bail!("scale must be at least 1");
        }
        Ok(vec![n])
    }
}

pub struct BenchConfig {
    pub benchmarks: Vec<String>,
    pub scales: Vec<u32>,
    pub trials: u32,
    pub modes: Vec<Mode>,
    pub timeout: Duration,
    pub out: PathBuf,
    pub workers: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub benchmark: String,
    pub mode: String,
    pub n: u32,
    pub trial: u32,
    pub solved: bool,
    pub wall_ms: u64,
    pub candidates: u64,
    pub nodes: u64,
    #[serde(skip)]
    pub timed_out: bool,
}

/// Per-(benchmark, mode, scale) aggregate. Medians are taken over the
/// trials that finished before the deadline; a cell where most trials
/// timed out is kept but marked unreported.
#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub benchmark: String,
    pub mode: String,
    pub n: u32,
    pub trials: u32,
    pub completed: u32,
    pub timeouts: u32,
    pub solved: u32,
    pub median_wall_ms: Option<u64>,
    pub median_candidates: Option<u64>,
    pub median_nodes: Option<u64>,
    pub reported: bool,
}

#[derive(Serialize)]
struct BenchReport {
    benchmarks: Vec<String>,
    scales: Vec<u32>,
    trials: u32,
    modes: Vec<String>,
    timeout_secs: u64,
    seed: u64,
    cells: Vec<CellReport>,
}

struct LoadedCase {
    name: String,
    scale: u32,
    task: Program,
    library: Vec<Fragment>,
    library_plain: Vec<Fragment>,
}

struct Job {
    case_idx: usize,
    mode: Mode,
    trial: u32,
    seed: u64,
}

/// Writes one generated case under `cases/<name>_n<scale>/` and loads
/// it back through the regular file loaders.
fn materialize(dir: &Path, name: &str, n: u32) -> Result<LoadedCase> {
    let case = gen::generate(name, n)?;
    let root = dir.join(format!("{name}_n{n}"));
    let lib_dir = root.join("library");
    let plain_dir = root.join("library_plain");
    std::fs::create_dir_all(&lib_dir)?;
    std::fs::create_dir_all(&plain_dir)?;
    std::fs::write(root.join("task.lm"), &case.task)?;
    for (file, src) in &case.library {
        std::fs::write(lib_dir.join(file), src)?;
    }
    for (file, src) in &case.library_plain {
        std::fs::write(plain_dir.join(file), src)?;
    }
    Ok(LoadedCase {
        name: case.name,
        scale: case.scale,
        task: load::load_task(&root.join("task.lm"))?,
        library: load::load_library(&lib_dir)?,
        library_plain: load::load_library(&plain_dir)?,
    })
}

fn median(mut values: Vec<u64>) -> Option<u64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    Some(values[(values.len() - 1) / 2])
}

/// Groups raw rows into per-cell summaries, preserving row order.
pub fn aggregate(rows: &[TrialRow]) -> Vec<CellReport> {
    let mut cells: Vec<CellReport> = Vec::new();
    let mut keys: Vec<(String, String, u32)> = rows
        .iter()
        .map(|r| (r.benchmark.clone(), r.mode.clone(), r.n))
        .collect();
    keys.dedup();
    for (benchmark, mode, n) in keys {
        let group: Vec<&TrialRow> = rows
            .iter()
            .filter(|r| r.benchmark == benchmark && r.mode == mode && r.n == n)
            .collect();
        let trials = group.len() as u32;
        let timeouts = group.iter().filter(|r| r.timed_out).count() as u32;
        let completed: Vec<&&TrialRow> = group.iter().filter(|r| !r.timed_out).collect();
        let solved = group.iter().filter(|r| r.solved).count() as u32;
        let reported = timeouts * 2 <= trials;
        let (mw, mc, mn) = if reported {
            (
                median(completed.iter().map(|r| r.wall_ms).collect()),
                median(completed.iter().map(|r| r.candidates).collect()),
                median(completed.iter().map(|r| r.nodes).collect()),
            )
        } else {
            (None, None, None)
        };
        cells.push(CellReport {
            benchmark,
            mode,
            n,
            trials,
            completed: completed.len() as u32,
            timeouts,
            solved,
            median_wall_ms: mw,
            median_candidates: mc,
            median_nodes: mn,
            reported,
        });
    }
    cells
}

fn write_csv(path: &Path, rows: &[TrialRow]) -> Result<()> {
    let mut out = String::from("benchmark,mode,n,trial,solved,wall_ms,candidates,nodes\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.benchmark, r.mode, r.n, r.trial, r.solved, r.wall_ms, r.candidates, r.nodes
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Runs every (benchmark, scale, mode, trial) combination and returns
/// the raw rows after writing `results.csv` and `report.json`.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<TrialRow>> {
    let cases_dir = cfg.out.join("cases");
    std::fs::create_dir_all(&cases_dir)?;

    let mut cases: Vec<LoadedCase> = Vec::new();
    for name in &cfg.benchmarks {
        for &n in &cfg.scales {
            cases.push(materialize(&cases_dir, name, n)?);
        }
    }

    let mut jobs: Vec<Job> = Vec::new();
    for (case_idx, _) in cases.iter().enumerate() {
        for &mode in &cfg.modes {
            for trial in 0..cfg.trials {
                jobs.push(Job {
                    case_idx,
                    mode,
                    trial,
                    seed: cfg.seed.wrapping_add(u64::from(trial)),
                });
            }
        }
    }

    let rows = run_jobs(&cases, &jobs, cfg);
    let mut rows = rows;
    rows.sort_by(|a, b| {
        (&a.benchmark, a.n, &a.mode, a.trial).cmp(&(&b.benchmark, b.n, &b.mode, b.trial))
    });

    write_csv(&cfg.out.join("results.csv"), &rows)?;
    let cells = aggregate(&rows);
    for c in &cells {
        if c.reported {
            println!(
                "{} n={} {}: solved {}/{}, median {} ms, {} candidates, {} nodes",
                c.benchmark,
                c.n,
                c.mode,
                c.solved,
                c.trials,
                c.median_wall_ms.unwrap_or(0),
                c.median_candidates.unwrap_or(0),
                c.median_nodes.unwrap_or(0),
            );
        } else {
            println!(
                "{} n={} {}: unreported ({} of {} trials timed out)",
                c.benchmark, c.n, c.mode, c.timeouts, c.trials,
            );
        }
    }
    let report = BenchReport {
        benchmarks: cfg.benchmarks.clone(),
        scales: cfg.scales.clone(),
        trials: cfg.trials,
        modes: cfg.modes.iter().map(|m| m.label().to_owned()).collect(),
        timeout_secs: cfg.timeout.as_secs(),
        seed: cfg.seed,
        cells,
    };
    std::fs::write(
        cfg.out.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(rows)
}

fn run_trial(case: &LoadedCase, mode: Mode, trial: u32, seed: u64, timeout: Duration) -> TrialRow {
    let library = if mode.name_patterns() {
        case.library.clone()
    } else {
        case.library_plain.clone()
    };
    let job = SynthJob {
        initial: case.task.clone(),
        library,
        seed,
        trace_guided: mode.trace_guided(),
        name_patterns: mode.name_patterns(),
        timeout,
        max_nodes: None,
        log: false,
    };
    let outcome = run_synth(&job);
    TrialRow {
        benchmark: case.name.clone(),
        mode: mode.label().to_owned(),
        n: case.scale,
        trial,
        solved: outcome.solution.is_some(),
        wall_ms: outcome.wall.as_millis() as u64,
        candidates: outcome.stats.candidates_executed,
        nodes: outcome.stats.nodes_expanded,
        timed_out: outcome.timed_out,
    }
}

fn run_jobs(cases: &[LoadedCase], jobs: &[Job], cfg: &BenchConfig) -> Vec<TrialRow> {
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(jobs.len()));
    let workers = cfg.workers.max(1).min(jobs.len().max(1));
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..workers {
            handles.push(stack::spawn_scoped_big(scope, || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let row = run_trial(
                    &cases[job.case_idx],
                    job.mode,
                    job.trial,
                    job.seed,
                    cfg.timeout,
                );
                rows.lock().unwrap().push(row);
            }));
        }
        for h in handles {
            h.join().expect("bench worker panicked");
        }
    });
    rows.into_inner().unwrap()
}
