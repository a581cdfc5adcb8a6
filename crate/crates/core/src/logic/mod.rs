//! First-order syntax, semantics and quantifier-prefix analysis.

mod eval;
mod formula;
mod parser;
mod prenex;
mod render;

pub use eval::{evaluate, evaluate_naive, evaluate_sentence, Assignment, CompiledFormula};
pub use formula::{Formula, Quantifier, Term};
pub use parser::{parse, parse_inferring_vocab};
pub use prenex::{classify_prefix, rectify, to_prenex, PrefixClass};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("`{symbol}` expects {expected} arguments, got {got}")]
    Arity {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("variable `{0}` is not bound by the assignment")]
    UnboundVariable(String),
    #[error("variable `{0}` is assigned an element outside the universe")]
    NotInUniverse(String),
    #[error("formula has free variables: {0}")]
    NotASentence(String),
}
