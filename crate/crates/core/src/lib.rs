//! Satisfiability checking for SHOQ knowledge bases.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, file formats and
//! the command-line driver live in the companion `shoq` crate.

#![no_std]

extern crate alloc;

pub mod closure;
pub mod engine;
pub mod extract;
pub mod graph;
pub mod ilp;
pub mod kb;
pub mod model;
pub mod relevance;
mod rules;
pub mod syntax;
pub mod trace;

pub use engine::{EngineConfig, EngineError, RunOutcome, Verdict, run};
pub use kb::{KbBuilder, KbError, KnowledgeBase, RBoxClosure, RoleAxiom};
pub use syntax::{Concept, ConceptExpr, ConceptName, Formula, Individual, Role};
