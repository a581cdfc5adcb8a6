use std::collections::HashSet;
use std::fmt;

use super::StructureError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// A relational vocabulary: ordered relation symbols with arities, then constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    relations: Vec<RelationSymbol>,
    constants: Vec<String>,
}

impl Vocabulary {
    pub fn new<R, C>(relations: R, constants: C) -> Result<Self, StructureError>
    where
        R: IntoIterator,
        R::Item: Into<(String, usize)>,
        C: IntoIterator,
        C::Item: Into<String>,
    {
        let relations: Vec<RelationSymbol> = relations
            .into_iter()
            .map(|r| {
                let (name, arity) = r.into();
                RelationSymbol { name, arity }
            })
            .collect();
        let constants: Vec<String> = constants.into_iter().map(Into::into).collect();

        let mut seen = HashSet::new();
        for r in &relations {
            if r.arity == 0 {
                return Err(StructureError::ZeroArity(r.name.clone()));
            }
            if !seen.insert(r.name.as_str()) {
                return Err(StructureError::DuplicateSymbol(r.name.clone()));
            }
        }
        for c in &constants {
            if !seen.insert(c.as_str()) {
                return Err(StructureError::DuplicateSymbol(c.clone()));
            }
        }
        Ok(Vocabulary {
            relations,
            constants,
        })
    }

    /// Convenience constructor from `&str` pairs; panics on an invalid vocabulary.
    pub fn of(relations: &[(&str, usize)], constants: &[&str]) -> Self {
        Self::new(
            relations.iter().map(|(n, a)| (n.to_string(), *a)),
            constants.iter().map(|c| c.to_string()),
        )
        .expect("invalid vocabulary")
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relation_index(name).map(|i| self.relations[i].arity)
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vocab")?;
        for r in &self.relations {
            write!(f, " {}/{}", r.name, r.arity)?;
        }
        write!(f, " ;")?;
        for c in &self.constants {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}
