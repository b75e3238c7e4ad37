//! Front end for the synthesizer: file loading, the `run`/`check`/
//! `synth`/`count` commands, and the benchmark generators plus trial
//! harness behind `bench`.
//!
//! Everything here is std-side plumbing around `lmsynth_core`; the
//! binary in `main.rs` is a thin argument parser over these modules.

pub mod bench;
pub mod check;
pub mod load;
pub mod runner;
pub mod stack;
pub mod synth;
