use crate::structure::{subsets_containing, Element};

use super::{PreservationError, MAX_FREE_ELEMENTS};

/// Bit positions for the elements of an ambient universe.
#[derive(Debug, Clone)]
pub(crate) struct Frame {
    elems: Vec<Element>,
    pinned: u64,
}

impl Frame {
    pub(crate) fn new(universe: &[Element], pinned: &[Element]) -> Result<Frame, PreservationError> {
        let free = universe.len() - pinned.len();
        if free > MAX_FREE_ELEMENTS || universe.len() > 63 {
            return Err(PreservationError::HostTooLarge {
                size: free,
                limit: MAX_FREE_ELEMENTS,
            });
        }
        let mut f = Frame {
            elems: universe.to_vec(),
            pinned: 0,
        };
        f.pinned = f.mask_of(pinned);
        Ok(f)
    }

    pub(crate) fn len(&self) -> usize {
        self.elems.len()
    }

    pub(crate) fn full(&self) -> u64 {
        (1u64 << self.elems.len()) - 1
    }

    pub(crate) fn mask_of(&self, set: &[Element]) -> u64 {
        set.iter()
            .map(|e| 1u64 << self.elems.binary_search(e).expect("element of the frame"))
            .fold(0, |a, b| a | b)
    }

    pub(crate) fn elements(&self, mask: u64) -> Vec<Element> {
        (0..self.elems.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.elems[i])
            .collect()
    }

    /// Non-empty submasks of `host` that contain every pinned position.
    pub(crate) fn submasks(&self, host: u64) -> Vec<u64> {
        let free = host & !self.pinned;
        let mut out = Vec::with_capacity(1 << free.count_ones());
        let mut s = free;
        loop {
            let m = s | self.pinned;
            if m != 0 {
                out.push(m);
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & free;
        }
        out
    }

    /// Masks of the subsets of `host` with at most `k` elements, the empty
    /// set first and the rest in lexicographic order of element lists.
    pub(crate) fn small_subsets(&self, host: u64, k: usize) -> Vec<u64> {
        let els = self.elements(host);
        std::iter::once(0)
            .chain(subsets_containing(&els, &[], Some(k)).map(|s| self.mask_of(&s)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submasks_keep_pinned() {
        let f = Frame::new(&[1, 2, 3], &[2]).unwrap();
        let mut subs = f.submasks(f.full());
        subs.sort();
        assert_eq!(subs, vec![0b010, 0b011, 0b110, 0b111]);
        let g = Frame::new(&[1, 2], &[]).unwrap();
        assert_eq!(g.submasks(g.full()).len(), 3);
    }

    #[test]
    fn small_subsets_in_lex_order() {
        let f = Frame::new(&[4, 5, 6], &[]).unwrap();
        let sets: Vec<_> = f
            .small_subsets(f.full(), 2)
            .into_iter()
            .map(|m| f.elements(m))
            .collect();
        assert_eq!(
            sets,
            vec![vec![], vec![4], vec![4, 5], vec![4, 6], vec![5], vec![5, 6], vec![6]]
        );
    }
}
