use super::{Element, Structure};

/// Lexicographic enumeration of the sorted subsets of a sorted universe that
/// contain every `required` element and have at most `bound` elements.
///
/// The empty subset is never produced. Subsets are emitted in preorder of the
/// prefix tree, which is exactly lexicographic order on sorted element lists.
#[derive(Debug, Clone)]
pub struct SubsetIter<'a> {
    universe: &'a [Element],
    required: Vec<bool>,
    required_total: usize,
    required_in: usize,
    bound: usize,
    stack: Vec<usize>,
    started: bool,
}

impl<'a> SubsetIter<'a> {
    fn push(&mut self, i: usize) {
        self.stack.push(i);
        if self.required[i] {
            self.required_in += 1;
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let i = self.stack.pop()?;
        if self.required[i] {
            self.required_in -= 1;
        }
        Some(i)
    }

    fn advance(&mut self) -> bool {
        let n = self.universe.len();
        if !self.started {
            self.started = true;
            if self.bound > 0 && n > 0 {
                self.push(0);
                return true;
            }
            return false;
        }
        if self.stack.len() < self.bound {
            let next = self.stack.last().map_or(0, |&i| i + 1);
            if next < n {
                self.push(next);
                return true;
            }
        }
        while let Some(i) = self.pop() {
            // moving to the sibling skips element i for good
            if !self.required[i] && i + 1 < n {
                self.push(i + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for SubsetIter<'_> {
    type Item = Vec<Element>;

    fn next(&mut self) -> Option<Vec<Element>> {
        loop {
            if !self.advance() {
                return None;
            }
            if self.required_in == self.required_total {
                return Some(self.stack.iter().map(|&i| self.universe[i]).collect());
            }
        }
    }
}

/// Subsets of `universe` (sorted) containing all of `required`, of size at most `bound`.
pub fn subsets_containing<'a>(
    universe: &'a [Element],
    required: &[Element],
    bound: Option<usize>,
) -> SubsetIter<'a> {
    let flags: Vec<bool> = universe
        .iter()
        .map(|e| required.contains(e))
        .collect();
    let required_total = flags.iter().filter(|&&f| f).count();
    SubsetIter {
        universe,
        required: flags,
        required_total,
        required_in: 0,
        bound: bound.unwrap_or(universe.len()),
        stack: Vec::new(),
        started: false,
    }
}

/// Every induced substructure of `s`, each once, in lexicographic order of universes.
pub fn enumerate_substructures(
    s: &Structure,
    size_bound: Option<usize>,
) -> impl Iterator<Item = Structure> + '_ {
    let pinned = s.pinned();
    subsets_containing(s.universe(), &pinned, size_bound).map(move |sub| s.restrict_sorted(sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Vocabulary;

    fn all_subsets_sorted(universe: &[Element], required: &[Element], bound: usize) -> Vec<Vec<Element>> {
        let n = universe.len();
        let mut out: Vec<Vec<Element>> = (1u32..(1 << n))
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| universe[i]).collect::<Vec<_>>())
            .filter(|s: &Vec<Element>| s.len() <= bound && required.iter().all(|r| s.contains(r)))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn matches_sorted_brute_force() {
        let u = [1, 2, 4, 7, 8];
        for req in [&[][..], &[2][..], &[1, 8][..], &[4, 7, 8][..]] {
            for bound in 0..=5 {
                let got: Vec<_> = subsets_containing(&u, req, Some(bound)).collect();
                assert_eq!(got, all_subsets_sorted(&u, req, bound), "req {req:?} bound {bound}");
            }
        }
    }

    #[test]
    fn two_element_universe_with_constant() {
        let v = Vocabulary::of(&[], &["c"]);
        let s = Structure::builder(v, [1, 2]).constant("c", 1).build().unwrap();
        let subs: Vec<_> = enumerate_substructures(&s, None).map(|x| x.universe().to_vec()).collect();
        assert_eq!(subs, vec![vec![1], vec![1, 2]]);
        assert_eq!(enumerate_substructures(&s, Some(1)).count(), 1);
    }
}
