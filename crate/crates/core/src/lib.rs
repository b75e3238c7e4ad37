//! Core of a type- and name-directed program synthesizer for a small
//! class-based language.
//!
//! The pipeline: parse a program with named holes ([`parse`]), generate
//! typing constraints ([`infer`]), resolve them to a residual or a
//! contradiction ([`resolve`]), and search over hole fills and fragment
//! compositions ([`search`]) until the program's tests pass under the
//! reference interpreter ([`interp`]).
//!
//! Everything here is `no_std + alloc`; all IO lives in the companion
//! CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ast;
pub mod builtins;
pub mod constraints;
pub mod fragment;
pub mod holes;
pub mod infer;
pub mod interp;
pub mod parse;
pub mod pattern;
pub mod print;
pub mod resolve;
pub mod search;
