//! A sentence family that is hereditary over finite structures but cannot be
//! written with `k` leading existentials followed by universals.
//!
//! For each `k` the sentence [`phi`] holds in the linear order [`build_a`]
//! with `k + 1` marked points, one in the middle of each block of length
//! `8n + 1`, and fails in [`build_b`], which drops one of those marks. The
//! Duplicator's answer in [`duplicator_response`] shows that no
//! `exists^k forall^n` sentence tells the two apart: after the Spoiler fixes
//! `k` elements of `A`, there is a block they miss, and every `n` elements
//! chosen in `B` can be mirrored in `A` by shifting the segments that fall
//! inside that block away from its marked point.

mod sentences;
pub(crate) mod strategy;
mod verify;

use std::sync::Arc;

use thiserror::Error;

use crate::structure::{Element, Structure, Vocabulary};

pub use sentences::{phi, phi_prenex, random_near_model, xi};
pub use strategy::{
    choose_istar, duplicator_response, duplicator_response_with, segment_plan, Invariant,
    InvariantViolation, Response, SegmentPlan, SegmentRule,
};
pub use verify::{verify_counterexample, LiteralComparison, VerifyMode, VerifyReport, LITERAL_COMPARISON_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterexampleError {
    #[error("n must be at least 1")]
    ZeroN,
    #[error("no sentence xi{0}; indices run from 1 to 5")]
    InvalidXiIndex(usize),
    #[error("block index {istar} out of range 0..={k}")]
    IStarOutOfRange { istar: usize, k: usize },
    #[error("{got} witnesses given but k = {k}")]
    TooManyWitnesses { got: usize, k: usize },
    #[error("expected a tuple of {expected} elements, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("element {element} outside 1..={size}")]
    NotInUniverse { element: Element, size: Element },
    #[error("{required} checks exceed the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

/// The parameters `n` (universal budget) and `k` (existential budget).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CxParams {
    pub n: usize,
    pub k: usize,
}

impl CxParams {
    pub fn new(n: usize, k: usize) -> Result<CxParams, CounterexampleError> {
        if n == 0 {
            return Err(CounterexampleError::ZeroN);
        }
        Ok(CxParams { n, k })
    }

    /// Length `8n + 1` of each block.
    pub fn block_len(&self) -> Element {
        8 * self.n as Element + 1
    }

    pub fn size(&self) -> Element {
        self.block_len() * (self.k as Element + 1)
    }

    /// First and last element of block `i`.
    pub fn block(&self, i: usize) -> (Element, Element) {
        let b = self.block_len();
        (b * i as Element + 1, b * (i as Element + 1))
    }

    /// Block containing `e` (1-based element).
    pub fn block_of(&self, e: Element) -> usize {
        ((e - 1) / self.block_len()) as usize
    }

    /// 1-based position of `e` inside its block.
    pub fn offset(&self, e: Element) -> Element {
        (e - 1) % self.block_len() + 1
    }

    /// The marked point `(4n + 1) + i(8n + 1)` of block `i`.
    pub fn p_point(&self, i: usize) -> Element {
        4 * self.n as Element + 1 + i as Element * self.block_len()
    }

    pub(crate) fn check_elements(&self, xs: &[Element]) -> Result<(), CounterexampleError> {
        match xs.iter().find(|&&e| e == 0 || e > self.size()) {
            Some(&element) => Err(CounterexampleError::NotInUniverse {
                element,
                size: self.size(),
            }),
            None => Ok(()),
        }
    }
}

/// The vocabulary `{Leq/2, S/2, P/1; c, d}`.
pub fn tau() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::of(&[("Leq", 2), ("S", 2), ("P", 1)], &["c", "d"]))
}

fn build(p: CxParams, marks: impl Iterator<Item = Element>) -> Structure {
    let n = p.size();
    let mut b = Structure::builder(tau(), 1..=n);
    for x in 1..=n {
        for y in x..=n {
            b.add_tuple("Leq", &[x, y]);
        }
        if x < n {
            b.add_tuple("S", &[x, x + 1]);
        }
    }
    for m in marks {
        b.add_tuple("P", &[m]);
    }
    b.set_constant("c", 1);
    b.set_constant("d", n);
    b.build().expect("construction is well formed")
}

/// The model: `1..(8n+1)(k+1)` with its order and successor, `c` and `d`
/// the endpoints, and `P` the middle point of every block.
pub fn build_a(n: usize, k: usize) -> Result<Structure, CounterexampleError> {
    let p = CxParams::new(n, k)?;
    Ok(build(p, (0..=k).map(|i| p.p_point(i))))
}

/// The non-model: [`build_a`] with the mark of block `istar` removed.
pub fn build_b(n: usize, k: usize, istar: usize) -> Result<Structure, CounterexampleError> {
    let p = CxParams::new(n, k)?;
    if istar > k {
        return Err(CounterexampleError::IStarOutOfRange { istar, k });
    }
    Ok(build(p, (0..=k).filter(|&i| i != istar).map(|i| p.p_point(i))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn marks(s: &Structure) -> Vec<Element> {
        s.relation_named("P").unwrap().tuples().map(|t| t[0]).collect()
    }

    #[test]
    fn structure_shapes() {
        let a = build_a(1, 1).unwrap();
        assert_eq!(a.size(), 18);
        assert_eq!(marks(&a), vec![5, 14]);
        assert_eq!(a.constant_named("c"), Some(1));
        assert_eq!(a.constant_named("d"), Some(18));
        assert_eq!(a.relation_named("S").unwrap().len(), 17);
        assert_eq!(a.relation_named("Leq").unwrap().len(), 18 * 19 / 2);
        let a = build_a(2, 3).unwrap();
        assert_eq!(a.size(), 68);
        assert_eq!(marks(&a), vec![9, 26, 43, 60]);
        let a = build_a(1, 0).unwrap();
        assert_eq!(a.size(), 9);
        assert_eq!(marks(&a), vec![5]);
        assert_eq!(marks(&build_b(1, 1, 0).unwrap()), vec![14]);
        assert_eq!(marks(&build_b(1, 1, 1).unwrap()), vec![5]);
        assert_eq!(
            build_b(1, 1, 2),
            Err(CounterexampleError::IStarOutOfRange { istar: 2, k: 1 })
        );
        assert_eq!(build_a(0, 1), Err(CounterexampleError::ZeroN));
    }

    #[test]
    fn params_arithmetic() {
        let p = CxParams::new(2, 1).unwrap();
        assert_eq!(p.block(0), (1, 17));
        assert_eq!(p.block(1), (18, 34));
        assert_eq!(p.block_of(17), 0);
        assert_eq!(p.block_of(18), 1);
        assert_eq!(p.offset(18), 1);
        assert_eq!(p.offset(26), 9);
        assert_eq!(p.p_point(1), 26);
    }
}
