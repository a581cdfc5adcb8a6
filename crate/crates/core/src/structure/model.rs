use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{Element, StructureError, Vocabulary};

const DENSE_LIMIT: u64 = 1 << 22;

/// The interpretation of one relation symbol.
///
/// Tuples are stored canonically in a sorted set; a bitmap keyed by raw
/// element values is kept alongside when it stays small, since membership
/// tests dominate evaluation and partial-isomorphism checks.
#[derive(Debug, Clone)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<Element>>,
    dense: Option<Dense>,
}

#[derive(Debug, Clone)]
struct Dense {
    stride: u64,
    bits: Vec<u64>,
}

impl Relation {
    fn new(arity: usize, tuples: BTreeSet<Vec<Element>>, max_element: Element) -> Self {
        let stride = max_element as u64 + 1;
        let dense = stride
            .checked_pow(arity as u32)
            .filter(|&n| n <= DENSE_LIMIT)
            .map(|n| {
                let mut bits = vec![0u64; (n as usize).div_ceil(64)];
                for t in &tuples {
                    let i = dense_index(stride, t);
                    bits[(i / 64) as usize] |= 1 << (i % 64);
                }
                Dense { stride, bits }
            });
        Relation {
            arity,
            tuples,
            dense,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[Element]> {
        self.tuples.iter().map(Vec::as_slice)
    }

    pub fn tuple_set(&self) -> &BTreeSet<Vec<Element>> {
        &self.tuples
    }

    #[inline]
    pub fn contains(&self, tuple: &[Element]) -> bool {
        match &self.dense {
            Some(d) => {
                if tuple.iter().any(|&e| e as u64 >= d.stride) {
                    return false;
                }
                let i = dense_index(d.stride, tuple);
                d.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
            }
            None => self.tuples.contains(tuple),
        }
    }
}

#[inline]
fn dense_index(stride: u64, tuple: &[Element]) -> u64 {
    tuple.iter().fold(0, |acc, &e| acc * stride + e as u64)
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.tuples == other.tuples
    }
}

impl Eq for Relation {}

impl Hash for Relation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.arity.hash(state);
        self.tuples.hash(state);
    }
}

/// A finite structure: a non-empty universe, one table per relation symbol
/// and an element for every constant symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    vocab: Arc<Vocabulary>,
    universe: Vec<Element>,
    relations: Vec<Relation>,
    constants: Vec<Element>,
}

impl Structure {
    pub fn builder(
        vocab: impl Into<Arc<Vocabulary>>,
        universe: impl IntoIterator<Item = Element>,
    ) -> StructureBuilder {
        StructureBuilder::new(vocab, universe)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vocab_arc(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    /// Sorted, duplicate-free universe.
    pub fn universe(&self) -> &[Element] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn contains(&self, e: Element) -> bool {
        self.universe.binary_search(&e).is_ok()
    }

    pub fn relation(&self, index: usize) -> &Relation {
        &self.relations[index]
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation_named(&self, name: &str) -> Option<&Relation> {
        self.vocab.relation_index(name).map(|i| &self.relations[i])
    }

    #[inline]
    pub fn holds(&self, relation: usize, tuple: &[Element]) -> bool {
        self.relations[relation].contains(tuple)
    }

    pub fn constant(&self, index: usize) -> Element {
        self.constants[index]
    }

    pub fn constant_named(&self, name: &str) -> Option<Element> {
        self.vocab.constant_index(name).map(|i| self.constants[i])
    }

    pub fn constants(&self) -> &[Element] {
        &self.constants
    }

    /// Sorted, duplicate-free set of constant interpretations.
    pub fn pinned(&self) -> Vec<Element> {
        let mut p = self.constants.clone();
        p.sort_unstable();
        p.dedup();
        p
    }

    /// The induced substructure on `subset`.
    pub fn induced_substructure(&self, subset: &[Element]) -> Result<Structure, StructureError> {
        let mut sub: Vec<Element> = subset.to_vec();
        sub.sort_unstable();
        sub.dedup();
        if let Some(&e) = sub.iter().find(|&&e| !self.contains(e)) {
            return Err(StructureError::NotASubset(e));
        }
        for (i, &c) in self.constants.iter().enumerate() {
            if sub.binary_search(&c).is_err() {
                return Err(StructureError::MissingConstant {
                    constant: self.vocab.constants()[i].clone(),
                    element: c,
                });
            }
        }
        if sub.is_empty() {
            return Err(StructureError::EmptyUniverse);
        }
        Ok(self.restrict_sorted(sub))
    }

    /// Restriction to a sorted, valid subset; preconditions are the caller's.
    pub(crate) fn restrict_sorted(&self, sub: Vec<Element>) -> Structure {
        let max = *sub.last().expect("non-empty subset");
        let relations = self
            .relations
            .iter()
            .map(|r| {
                let tuples: BTreeSet<Vec<Element>> = r
                    .tuples
                    .iter()
                    .filter(|t| t.iter().all(|e| sub.binary_search(e).is_ok()))
                    .cloned()
                    .collect();
                Relation::new(r.arity, tuples, max)
            })
            .collect();
        Structure {
            vocab: self.vocab.clone(),
            universe: sub,
            relations,
            constants: self.constants.clone(),
        }
    }

    /// True iff `self` is an induced substructure of `other`.
    pub fn is_substructure_of(&self, other: &Structure) -> Result<bool, StructureError> {
        is_extension(self, other)
    }

    /// Renames elements through `map`, which must be injective on the universe.
    pub fn relabel(&self, map: impl Fn(Element) -> Element) -> Structure {
        let mut universe: Vec<Element> = self.universe.iter().map(|&e| map(e)).collect();
        universe.sort_unstable();
        universe.dedup();
        assert_eq!(universe.len(), self.universe.len(), "relabelling is not injective");
        let max = *universe.last().unwrap();
        let relations = self
            .relations
            .iter()
            .map(|r| {
                let tuples = r
                    .tuples
                    .iter()
                    .map(|t| t.iter().map(|&e| map(e)).collect())
                    .collect();
                Relation::new(r.arity, tuples, max)
            })
            .collect();
        Structure {
            vocab: self.vocab.clone(),
            universe,
            relations,
            constants: self.constants.iter().map(|&e| map(e)).collect(),
        }
    }

    /// Isomorphic copy on the universe `1..=size`, preserving element order.
    pub fn compacted(&self) -> Structure {
        let index: BTreeMap<Element, Element> = self
            .universe
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as Element + 1))
            .collect();
        self.relabel(|e| index[&e])
    }
}

/// `b` extends `a`: `a` is exactly the substructure of `b` induced on `a`'s universe.
pub fn is_extension(a: &Structure, b: &Structure) -> Result<bool, StructureError> {
    if a.vocab != b.vocab {
        return Err(StructureError::VocabularyMismatch);
    }
    if a.constants != b.constants || !a.universe.iter().all(|&e| b.contains(e)) {
        return Ok(false);
    }
    for (ra, rb) in a.relations.iter().zip(&b.relations) {
        if !ra.tuples.iter().all(|t| rb.tuples.contains(t)) {
            return Ok(false);
        }
        let restricted = rb
            .tuples
            .iter()
            .filter(|t| t.iter().all(|&e| a.contains(e)))
            .count();
        if restricted != ra.tuples.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Collects relation tables and constants by name, validating on `build`.
#[derive(Debug, Clone)]
pub struct StructureBuilder {
    vocab: Arc<Vocabulary>,
    universe: Vec<Element>,
    tables: Vec<BTreeSet<Vec<Element>>>,
    constants: Vec<Option<Element>>,
    error: Option<StructureError>,
}

impl StructureBuilder {
    pub fn new(
        vocab: impl Into<Arc<Vocabulary>>,
        universe: impl IntoIterator<Item = Element>,
    ) -> Self {
        let vocab = vocab.into();
        let mut universe: Vec<Element> = universe.into_iter().collect();
        universe.sort_unstable();
        universe.dedup();
        StructureBuilder {
            tables: vec![BTreeSet::new(); vocab.relations().len()],
            constants: vec![None; vocab.constants().len()],
            vocab,
            universe,
            error: None,
        }
    }

    pub fn tuple(mut self, relation: &str, tuple: &[Element]) -> Self {
        self.add_tuple(relation, tuple);
        self
    }

    pub fn tuples<'a>(
        mut self,
        relation: &str,
        tuples: impl IntoIterator<Item = &'a [Element]>,
    ) -> Self {
        for t in tuples {
            self.add_tuple(relation, t);
        }
        self
    }

    pub fn add_tuple(&mut self, relation: &str, tuple: &[Element]) {
        if self.error.is_some() {
            return;
        }
        let Some(i) = self.vocab.relation_index(relation) else {
            self.error = Some(StructureError::UnknownRelation(relation.to_string()));
            return;
        };
        let arity = self.vocab.relations()[i].arity;
        if tuple.len() != arity {
            self.error = Some(StructureError::ArityMismatch {
                relation: relation.to_string(),
                tuple: tuple.to_vec(),
                got: tuple.len(),
                expected: arity,
            });
            return;
        }
        if let Some(&e) = tuple
            .iter()
            .find(|e| self.universe.binary_search(e).is_err())
        {
            self.error = Some(StructureError::NotInUniverse(e));
            return;
        }
        self.tables[i].insert(tuple.to_vec());
    }

    pub fn constant(mut self, name: &str, element: Element) -> Self {
        self.set_constant(name, element);
        self
    }

    pub fn set_constant(&mut self, name: &str, element: Element) {
        if self.error.is_some() {
            return;
        }
        match self.vocab.constant_index(name) {
            None => self.error = Some(StructureError::UnknownConstant(name.to_string())),
            Some(_) if self.universe.binary_search(&element).is_err() => {
                self.error = Some(StructureError::NotInUniverse(element))
            }
            Some(i) => self.constants[i] = Some(element),
        }
    }

    pub fn build(self) -> Result<Structure, StructureError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let Some(&max) = self.universe.last() else {
            return Err(StructureError::EmptyUniverse);
        };
        let constants = self
            .constants
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    StructureError::UninterpretedConstant(self.vocab.constants()[i].clone())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let relations = self
            .tables
            .into_iter()
            .zip(self.vocab.relations())
            .map(|(t, sym)| Relation::new(sym.arity, t, max))
            .collect();
        Ok(Structure {
            vocab: self.vocab,
            universe: self.universe,
            relations,
            constants,
        })
    }
}
