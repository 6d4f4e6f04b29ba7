//! A workbench for restriction rules over finite structures.

pub mod deduction;
pub mod diagrams;
pub mod formats;
pub mod glp;
pub mod infinitary;
pub mod structures;
pub mod syntax;
pub mod universe;

pub use syntax::{Formula, Symbol, Term, Vocabulary};
