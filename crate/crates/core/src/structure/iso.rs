use std::collections::HashMap;

use super::{Element, Structure, StructureError};

/// Default bound on universe size for [`find_isomorphism`].
pub const DEFAULT_ISO_LIMIT: usize = 12;

/// A finite correspondence between elements of a source and a target structure.
///
/// The pairs are kept as given; repeated identical pairs are harmless.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PartialMap {
    pairs: Vec<(Element, Element)>,
}

impl PartialMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Element, Element)>) -> Self {
        PartialMap {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn push(&mut self, source: Element, target: Element) {
        self.pairs.push((source, target));
    }

    pub fn pairs(&self) -> &[(Element, Element)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, source: Element) -> Option<Element> {
        self.pairs.iter().find(|p| p.0 == source).map(|p| p.1)
    }

    pub fn inverse(&self) -> PartialMap {
        PartialMap::from_pairs(self.pairs.iter().map(|&(s, t)| (t, s)))
    }

    /// `other ∘ self`; `None` if some image of `self` is outside `other`'s domain.
    pub fn then(&self, other: &PartialMap) -> Option<PartialMap> {
        self.pairs
            .iter()
            .map(|&(s, t)| other.get(t).map(|u| (s, u)))
            .collect::<Option<Vec<_>>>()
            .map(PartialMap::from_pairs)
    }

    /// Sorted, deduplicated pairs, or `None` when the map is not a function or not injective.
    pub fn normalized(&self) -> Option<Vec<(Element, Element)>> {
        let mut pairs = self.pairs.clone();
        pairs.sort_unstable();
        pairs.dedup();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        let mut targets: Vec<Element> = pairs.iter().map(|p| p.1).collect();
        targets.sort_unstable();
        if targets.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(pairs)
    }

    /// Whether the map, together with the pairs `(c^source, c^target)` for
    /// every constant `c`, is an injective function that preserves and reflects
    /// every relation on its domain.
    ///
    /// Malformed maps (elements outside the universes, different vocabularies)
    /// yield `false`.
    pub fn is_partial_isomorphism(&self, source: &Structure, target: &Structure) -> bool {
        if source.vocab() != target.vocab() {
            return false;
        }
        let mut extended = self.clone();
        for (&cs, &ct) in source.constants().iter().zip(target.constants()) {
            extended.push(cs, ct);
        }
        let Some(pairs) = extended.normalized() else {
            return false;
        };
        if !pairs
            .iter()
            .all(|&(s, t)| source.contains(s) && target.contains(t))
        {
            return false;
        }
        let dom: Vec<Element> = pairs.iter().map(|p| p.0).collect();
        let img: Vec<Element> = pairs.iter().map(|p| p.1).collect();
        for (r, sym) in source.vocab().relations().iter().enumerate() {
            let a = sym.arity;
            if dom.is_empty() && a > 0 {
                continue;
            }
            let mut idx = vec![0usize; a];
            let mut ts = vec![0; a];
            let mut tt = vec![0; a];
            loop {
                for j in 0..a {
                    ts[j] = dom[idx[j]];
                    tt[j] = img[idx[j]];
                }
                if source.holds(r, &ts) != target.holds(r, &tt) {
                    return false;
                }
                // odometer over dom^a
                let mut j = 0;
                while j < a {
                    idx[j] += 1;
                    if idx[j] < dom.len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == a {
                    break;
                }
            }
        }
        true
    }
}

/// Incrementally grown partial map with consistency checked on every push.
///
/// Each push only inspects the tuples that involve the new pair, so a
/// depth-first search pays for the new element alone.
#[derive(Debug, Clone)]
pub(crate) struct MapChecker<'a> {
    source: &'a Structure,
    target: &'a Structure,
    dom: Vec<Element>,
    img: Vec<Element>,
    // false for pushes that repeated an existing pair
    added: Vec<bool>,
    scratch_s: Vec<Element>,
    scratch_t: Vec<Element>,
    idx: Vec<usize>,
}

impl<'a> MapChecker<'a> {
    pub(crate) fn new(source: &'a Structure, target: &'a Structure) -> Self {
        MapChecker {
            source,
            target,
            dom: Vec::new(),
            img: Vec::new(),
            added: Vec::new(),
            scratch_s: Vec::new(),
            scratch_t: Vec::new(),
            idx: Vec::new(),
        }
    }

    /// Starts from the constant pairs; `None` if those alone are inconsistent.
    pub(crate) fn with_constants(source: &'a Structure, target: &'a Structure) -> Option<Self> {
        let mut m = Self::new(source, target);
        for (&s, &t) in source.constants().iter().zip(target.constants()) {
            if !m.try_push(s, t) {
                return None;
            }
        }
        Some(m)
    }

    pub(crate) fn try_push(&mut self, s: Element, t: Element) -> bool {
        if let Some(i) = self.dom.iter().position(|&d| d == s) {
            if self.img[i] == t {
                self.added.push(false);
                return true;
            }
            return false;
        }
        if self.img.contains(&t) {
            return false;
        }
        self.dom.push(s);
        self.img.push(t);
        if self.new_pair_consistent() {
            self.added.push(true);
            true
        } else {
            self.dom.pop();
            self.img.pop();
            false
        }
    }

    pub(crate) fn pop(&mut self) {
        if self.added.pop().expect("pop on empty map") {
            self.dom.pop();
            self.img.pop();
        }
    }

    fn new_pair_consistent(&mut self) -> bool {
        let last = self.dom.len() - 1;
        let n = self.dom.len();
        for (r, sym) in self.source.vocab().relations().iter().enumerate() {
            let a = sym.arity;
            self.idx.clear();
            self.idx.resize(a, 0);
            self.scratch_s.resize(a, 0);
            self.scratch_t.resize(a, 0);
            loop {
                if self.idx.contains(&last) {
                    for j in 0..a {
                        self.scratch_s[j] = self.dom[self.idx[j]];
                        self.scratch_t[j] = self.img[self.idx[j]];
                    }
                    if self.source.holds(r, &self.scratch_s) != self.target.holds(r, &self.scratch_t)
                    {
                        return false;
                    }
                }
                let mut j = 0;
                while j < a {
                    self.idx[j] += 1;
                    if self.idx[j] < n {
                        break;
                    }
                    self.idx[j] = 0;
                    j += 1;
                }
                if j == a {
                    break;
                }
            }
        }
        true
    }
}

/// Per-element invariant: how often the element occurs at each position of each relation.
fn signature(s: &Structure) -> HashMap<Element, Vec<usize>> {
    let width: usize = s.vocab().relations().iter().map(|r| r.arity).sum();
    let mut sig: HashMap<Element, Vec<usize>> =
        s.universe().iter().map(|&e| (e, vec![0; width])).collect();
    let mut offset = 0;
    for rel in s.relations() {
        for t in rel.tuples() {
            for (j, e) in t.iter().enumerate() {
                sig.get_mut(e).unwrap()[offset + j] += 1;
            }
        }
        offset += rel.arity();
    }
    sig
}

/// A total isomorphism from `a` onto `b`, found by backtracking.
pub fn find_isomorphism(
    a: &Structure,
    b: &Structure,
    limit: usize,
) -> Result<Option<PartialMap>, StructureError> {
    if a.vocab() != b.vocab() {
        return Err(StructureError::VocabularyMismatch);
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    if a.size() > limit {
        return Err(StructureError::SizeLimitExceeded {
            size: a.size(),
            limit,
        });
    }
    let Some(mut checker) = MapChecker::with_constants(a, b) else {
        return Ok(None);
    };
    let sig_a = signature(a);
    let sig_b = signature(b);
    let pinned = a.pinned();
    let mut order = pinned.clone();
    order.extend(a.universe().iter().filter(|e| !pinned.contains(e)));
    let candidates: Vec<Vec<Element>> = order
        .iter()
        .map(|e| {
            b.universe()
                .iter()
                .copied()
                .filter(|f| sig_b[f] == sig_a[e])
                .collect()
        })
        .collect();

    fn go(
        pos: usize,
        order: &[Element],
        candidates: &[Vec<Element>],
        checker: &mut MapChecker<'_>,
        out: &mut Vec<(Element, Element)>,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        for &t in &candidates[pos] {
            if checker.try_push(order[pos], t) {
                out.push((order[pos], t));
                if go(pos + 1, order, candidates, checker, out) {
                    return true;
                }
                out.pop();
                checker.pop();
            }
        }
        false
    }

    let mut out = Vec::with_capacity(order.len());
    Ok(go(0, &order, &candidates, &mut checker, &mut out).then(|| PartialMap::from_pairs(out)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Vocabulary;

    fn order(elements: &[Element], pairs: &[(Element, Element)]) -> Structure {
        let v = Vocabulary::of(&[("Leq", 2)], &[]);
        let mut b = Structure::builder(v, elements.iter().copied());
        for &(x, y) in pairs {
            b.add_tuple("Leq", &[x, y]);
        }
        b.build().unwrap()
    }

    #[test]
    fn identity_is_partial_iso() {
        let s = order(&[1, 2, 3], &[(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)]);
        let id = PartialMap::from_pairs(s.universe().iter().map(|&e| (e, e)));
        assert!(id.is_partial_isomorphism(&s, &s));
    }

    #[test]
    fn non_injective_and_non_functional_rejected() {
        let s = order(&[1, 2], &[(1, 1), (2, 2)]);
        assert!(!PartialMap::from_pairs([(1, 1), (2, 1)]).is_partial_isomorphism(&s, &s));
        assert!(!PartialMap::from_pairs([(1, 1), (1, 2)]).is_partial_isomorphism(&s, &s));
        assert!(!PartialMap::from_pairs([(1, 9)]).is_partial_isomorphism(&s, &s));
    }

    #[test]
    fn finds_order_preserving_bijection() {
        let a = order(&[1, 2], &[(1, 1), (1, 2), (2, 2)]);
        let b = order(&[1, 2], &[(1, 1), (2, 1), (2, 2)]);
        let m = find_isomorphism(&a, &b, DEFAULT_ISO_LIMIT).unwrap().unwrap();
        assert_eq!(m.get(1), Some(2));
        assert_eq!(m.get(2), Some(1));
        assert!(m.is_partial_isomorphism(&a, &b));
    }

    #[test]
    fn order_versus_two_cycle() {
        let a = order(&[1, 2], &[(1, 1), (1, 2), (2, 2)]);
        let b = order(&[1, 2], &[(1, 2), (2, 1)]);
        assert_eq!(find_isomorphism(&a, &b, DEFAULT_ISO_LIMIT).unwrap(), None);
    }

    #[test]
    fn size_limit() {
        let a = order(&[1, 2, 3], &[]);
        assert!(matches!(
            find_isomorphism(&a, &a, 2),
            Err(StructureError::SizeLimitExceeded { size: 3, limit: 2 })
        ));
    }

    #[test]
    fn checker_matches_full_check() {
        let s = order(&[1, 2, 3, 4], &[(1, 2), (2, 3), (3, 4), (4, 4)]);
        let t = order(&[1, 2, 3, 4], &[(2, 3), (3, 1), (1, 4), (4, 4)]);
        let elems = [1, 2, 3, 4];
        for &a in &elems {
            for &b in &elems {
                for &c in &elems {
                    for &d in &elems {
                        let m = PartialMap::from_pairs([(a, b), (c, d)]);
                        let mut ch = MapChecker::new(&s, &t);
                        let inc = ch.try_push(a, b) && ch.try_push(c, d);
                        assert_eq!(inc, m.is_partial_isomorphism(&s, &t), "{m:?}");
                    }
                }
            }
        }
    }
}
