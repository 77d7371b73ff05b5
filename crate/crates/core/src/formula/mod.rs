//! First-order formulas in the language of groups, their concrete syntax, a
//! finite-model evaluator, and emitters for the envelope and dimension
//! formulas.

mod ast;
mod emit;
mod eval;
mod syntax;

pub use ast::{cost_estimate, quantifier_depth, Formula, Term};
pub use emit::{emit_envelope_formula, envelope_formula, fcd_sentence, DISTINGUISHED};
pub use eval::{evaluate, evaluate_with, holds, EvalOptions};
pub use syntax::{parse, print};
