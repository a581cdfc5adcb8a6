//! Finite relational structures over vocabularies of relation and constant symbols.

mod iso;
mod model;
mod subsets;
mod text;
mod vocab;

pub use iso::{find_isomorphism, PartialMap, DEFAULT_ISO_LIMIT};
pub(crate) use iso::MapChecker;
pub use model::{is_extension, Relation, Structure, StructureBuilder};
pub use subsets::{enumerate_substructures, subsets_containing, SubsetIter};
pub use text::{parse_structure, TextError};
pub use vocab::{RelationSymbol, Vocabulary};

use thiserror::Error;

/// Universe elements are plain integers.
pub type Element = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("symbol `{0}` declared more than once")]
    DuplicateSymbol(String),
    #[error("relation `{0}` has arity 0")]
    ZeroArity(String),
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("constant `{0}` is not interpreted")]
    UninterpretedConstant(String),
    #[error("tuple {tuple:?} of `{relation}` has arity {got}, expected {expected}")]
    ArityMismatch {
        relation: String,
        tuple: Vec<Element>,
        got: usize,
        expected: usize,
    },
    #[error("element {0} is not in the universe")]
    NotInUniverse(Element),
    #[error("subset omits the interpretation {element} of constant `{constant}`")]
    MissingConstant { constant: String, element: Element },
    #[error("element {0} of the subset is not in the universe")]
    NotASubset(Element),
    #[error("structures are over different vocabularies")]
    VocabularyMismatch,
    #[error("universe of size {size} exceeds the limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
}
