use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use lmsynth_cli::bench::{self, gen};
use lmsynth_cli::check;
use lmsynth_cli::load;
use lmsynth_cli::runner;
use lmsynth_cli::stack;
use lmsynth_cli::synth::{report_of, run_count, run_synth, SynthJob};
use lmsynth_core::print::print_program;

#[derive(Parser)]
#[command(name = "lmsynth", version, about = "Type- and name-guided program synthesizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a complete program and run its tests.
    Run {
        /// Program file (.lm).
        file: PathBuf,
    },
    /// Resolve a program's constraints without running anything.
    Check {
        /// Program file (.lm), holes allowed.
        file: PathBuf,
        /// Print the generated constraint set and the residual.
        #[arg(long)]
        emit_constraints: bool,
        /// Print one line per resolution step.
        #[arg(long)]
        transcript: bool,
    },
    /// Complete a program with holes against a fragment library.
    Synth {
        /// Task file with holes.
        #[arg(long)]
        input: PathBuf,
        /// Directory of fragment files (*.lm).
        #[arg(long)]
        library: PathBuf,
        /// Disable trace-guided backtracking.
        #[arg(long)]
        no_trace_guided: bool,
        /// Drop name-pattern constraints at load time.
        #[arg(long)]
        no_name_patterns: bool,
        /// Give up after this many seconds.
        #[arg(long, default_value_t = 120)]
        timeout: u64,
        /// Seed for enumeration-order shuffling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the completed program here instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Write a JSON run report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print the search log (goals, actions, rejections, test
        /// outcomes, jumps) to stderr.
        #[arg(long)]
        log: bool,
    },
    /// Count distinct well-typed completions (tests are not run).
    Count {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        library: PathBuf,
        #[arg(long)]
        no_name_patterns: bool,
        /// Stop counting after this many expanded nodes.
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// Generate benchmark cases and measure the search modes on them.
    Bench {
        /// Benchmark name, or `all`.
        #[arg(long, default_value = "all")]
        benchmark: String,
        /// Scale factor: a number or an inclusive range like `1..4`.
        #[arg(long, default_value = "1..4")]
        scale: String,
        /// Seeded trials per (benchmark, scale, mode) cell.
        #[arg(long, default_value_t = 3)]
        trials: u32,
        /// Comma-separated subset of base, trace, trace+patterns.
        #[arg(long, default_value = "base,trace,trace+patterns")]
        modes: String,
        /// Per-trial timeout in seconds.
        #[arg(long, default_value_t = 120)]
        timeout: u64,
        /// Output directory for reports and generated sources.
        #[arg(long)]
        out: PathBuf,
        /// Concurrent trial workers.
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Base seed; trial k runs with seed + k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match stack::with_big_stack(move || dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { file } => {
            let program = load::load_task(&file)?;
            let report = runner::run_program(&program)?;
            print!("{}", runner::render_report(&report));
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Check {
            file,
            emit_constraints,
            transcript,
        } => {
            let program = load::load_task(&file)?;
            if transcript {
                print!("{}", check::transcript(&program)?);
            }
            if emit_constraints || !transcript {
                print!("{}", check::emit_constraints(&program)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth {
            input,
            library,
            no_trace_guided,
            no_name_patterns,
            timeout,
            seed,
            emit,
            report,
            log,
        } => {
            let job = SynthJob {
                initial: load::load_task(&input)?,
                library: load::load_library(&library)?,
                seed,
                trace_guided: !no_trace_guided,
                name_patterns: !no_name_patterns,
                timeout: Duration::from_secs(timeout),
                max_nodes: None,
                log,
            };
            let outcome = run_synth(&job);
            let synth_report = report_of(&job, &outcome);
            if let Some(path) = &report {
                std::fs::write(path, serde_json::to_string_pretty(&synth_report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match &outcome.solution {
                Some(program) => {
                    let text = print_program(program);
                    eprintln!(
                        "solved in {} ms: {} nodes, {} candidates executed, {} tests run, {} jumps, {} replays",
                        synth_report.wall_ms,
                        synth_report.nodes_expanded,
                        synth_report.candidates_executed,
                        synth_report.tests_run,
                        outcome.stats.jumps,
                        outcome.stats.replays,
                    );
                    match &emit {
                        Some(path) => std::fs::write(path, text)
                            .with_context(|| format!("writing {}", path.display()))?,
                        None => print!("{text}"),
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    let why = if outcome.timed_out {
                        "timed out"
                    } else {
                        "search space exhausted"
                    };
                    eprintln!(
                        "no solution ({why}) after {} ms: {} nodes, {} candidates executed",
                        synth_report.wall_ms,
                        synth_report.nodes_expanded,
                        synth_report.candidates_executed,
                    );
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Count {
            input,
            library,
            no_name_patterns,
            max_nodes,
        } => {
            let program = load::load_task(&input)?;
            let fragments = load::load_library(&library)?;
            let (count, exhausted) = run_count(&program, &fragments, !no_name_patterns, max_nodes);
            if exhausted {
                println!("{count}");
            } else {
                println!("{count} (search budget hit before exhaustion)");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            benchmark,
            scale,
            trials,
            modes,
            timeout,
            out,
            workers,
            seed,
        } => {
            let benchmarks: Vec<String> = if benchmark == "all" {
                gen::NAMES.iter().map(|s| (*s).to_owned()).collect()
            } else {
                let name = benchmark.as_str();
                if !gen::NAMES.contains(&name) {
                    anyhow::bail!(
                        "unknown benchmark `{name}` (expected one of {} or all)",
                        gen::NAMES.join(", ")
                    );
                }
                vec![benchmark]
            };
            let cfg = bench::BenchConfig {
                benchmarks,
                scales: bench::parse_scales(&scale)?,
                trials,
                modes: bench::parse_modes(&modes)?,
                timeout: Duration::from_secs(timeout),
                out,
                workers,
                seed,
            };
            bench::run_bench(&cfg)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
