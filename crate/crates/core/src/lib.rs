//! An interpreter for DATR lexicons with an LTAG layer.
//!
//! * [`theory`] and [`parse`]: the abstract syntax and the `.dtr` text format.
//! * [`eval`]: query evaluation by default inheritance.
//! * [`ltag`]: feature extraction and elementary-tree reconstruction.
//! * [`rules`]: lexical-rule chaining driven by `alt` flags.

pub mod corpus;
pub mod eval;
pub mod lint;
pub mod ltag;
pub mod parse;
pub mod rules;
pub mod theory;

pub use eval::{evaluate, Engine, EvalOutcome, TraceStep, UndefinedReason, Value};
pub use parse::{parse_theory, ParseError, TheoryBuilder};
pub use theory::{Atom, Descriptor, NodeName, Path, Rvalue, Sentence, Theory};
