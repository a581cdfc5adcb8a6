use std::fmt;

use crate::structure::{Element, PartialMap};

use super::{CounterexampleError, CxParams};

/// How the Duplicator splits the Spoiler's universal picks into segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentRule {
    /// Segments are taken over the picks, the existential witnesses and both
    /// endpoints together; a segment holding an endpoint stays in place, and
    /// the shifted segments start two past the furthest element held in place
    /// on the left of the chosen block (but no earlier than offset `n + 1`).
    Anchored,
    /// Segments over the universal picks alone, shifted to start at offset
    /// `n + 1`. Kept for comparison: it is refuted by exhaustive search already
    /// at `n = 1, k = 0`.
    Unanchored,
}

impl fmt::Display for SegmentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegmentRule::Anchored => "anchored",
            SegmentRule::Unanchored => "unanchored",
        })
    }
}

/// The Duplicator's bookkeeping for one position.
///
/// Intervals are inclusive `(first, last)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPlan {
    pub params: CxParams,
    pub istar: usize,
    pub rule: SegmentRule,
    /// Maximal runs of consecutive elements, in increasing order.
    pub segments: Vec<(Element, Element)>,
    /// Segments answered by themselves.
    pub cs1: Vec<(Element, Element)>,
    /// Segments inside block `istar` that get moved.
    pub cs2: Vec<(Element, Element)>,
    /// Targets of the `cs2` segments, pairwise.
    pub cs3: Vec<(Element, Element)>,
    /// The answer `f` to the picks `e`, position by position.
    pub response: Vec<Element>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Invariant {
    /// The moved segments end by offset `3n + 1` of the block.
    ImageBound,
    /// No moved segment covers the mark that was removed.
    RemovedMark,
    /// Segments kept in place reach into the block only near its ends, clear
    /// of the moved segments.
    Intrusion,
    /// Consecutive moved segments are separated by exactly one element.
    Spacing,
    /// Moved segments lie in the block, keep their lengths and stay ordered.
    Shape,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantViolation {
    pub invariant: Invariant,
    pub detail: String,
}

fn runs(points: &mut Vec<Element>) -> Vec<(Element, Element)> {
    points.sort_unstable();
    points.dedup();
    let mut out: Vec<(Element, Element)> = Vec::new();
    for &x in points.iter() {
        match out.last_mut() {
            Some(last) if last.1 + 1 == x => last.1 = x,
            _ => out.push((x, x)),
        }
    }
    out
}

/// Smallest block index containing none of `witnesses`.
pub fn choose_istar(witnesses: &[Element], n: usize, k: usize) -> Result<usize, CounterexampleError> {
    let p = CxParams::new(n, k)?;
    if witnesses.len() > k {
        return Err(CounterexampleError::TooManyWitnesses {
            got: witnesses.len(),
            k,
        });
    }
    p.check_elements(witnesses)?;
    Ok((0..=k)
        .find(|&i| witnesses.iter().all(|&a| p.block_of(a) != i))
        .expect("k witnesses miss one of k + 1 blocks"))
}

/// Splits the picks `e` into segments and computes the answer in `A`.
///
/// `witnesses` only matter for [`SegmentRule::Anchored`]; they must avoid
/// block `istar` for the answer to be sound.
pub fn segment_plan(
    e: &[Element],
    n: usize,
    k: usize,
    istar: usize,
    witnesses: &[Element],
    rule: SegmentRule,
) -> Result<SegmentPlan, CounterexampleError> {
    let p = CxParams::new(n, k)?;
    if e.len() != n {
        return Err(CounterexampleError::WrongArity {
            expected: n,
            got: e.len(),
        });
    }
    if istar > k {
        return Err(CounterexampleError::IStarOutOfRange { istar, k });
    }
    p.check_elements(e)?;
    p.check_elements(witnesses)?;
    Ok(plan_unchecked(p, e, istar, witnesses, rule))
}

pub(crate) fn plan_unchecked(
    p: CxParams,
    e: &[Element],
    istar: usize,
    witnesses: &[Element],
    rule: SegmentRule,
) -> SegmentPlan {
    let (lo, hi) = p.block(istar);
    let last = p.size();
    let base = lo - 1;
    let mut points = e.to_vec();
    if rule == SegmentRule::Anchored {
        points.extend_from_slice(witnesses);
        points.extend([1, last]);
    }
    let segments = runs(&mut points);
    let (mut cs1, mut cs2) = (Vec::new(), Vec::new());
    for &s in &segments {
        let outside = s.0 < lo || s.1 > hi;
        let endpoint = rule == SegmentRule::Anchored && (s.0 == 1 || s.1 == last);
        if outside || endpoint {
            cs1.push(s);
        } else {
            cs2.push(s);
        }
    }
    let mut start = base + p.n as Element + 1;
    if rule == SegmentRule::Anchored {
        let reach = left_reach(&p, &cs1, istar);
        start = start.max(base + reach + 2);
    }
    let mut cs3 = Vec::with_capacity(cs2.len());
    let mut cur = start;
    for &(a, b) in &cs2 {
        cs3.push((cur, cur + (b - a)));
        cur += b - a + 2;
    }
    let response = e
        .iter()
        .map(|&x| {
            cs2.iter()
                .zip(&cs3)
                .find(|(s, _)| s.0 <= x && x <= s.1)
                .map_or(x, |(s, t)| t.0 + (x - s.0))
        })
        .collect();
    SegmentPlan {
        params: p,
        istar,
        rule,
        segments,
        cs1,
        cs2,
        cs3,
        response,
    }
}

/// Largest offset inside block `istar`, left of the mark, held by a kept segment (0 if none).
fn left_reach(p: &CxParams, cs1: &[(Element, Element)], istar: usize) -> Element {
    let (lo, hi) = p.block(istar);
    let mark = 4 * p.n as Element + 1;
    cs1.iter()
        .flat_map(|&(a, b)| a.max(lo)..=b.min(hi))
        .map(|x| x - lo + 1)
        .filter(|&o| o < mark)
        .max()
        .unwrap_or(0)
}

impl SegmentPlan {
    /// The partial map from `B` to `A`: both endpoints and every witness to
    /// themselves, and each pick to its answer.
    pub fn rho(&self, witnesses: &[Element], e: &[Element]) -> PartialMap {
        let last = self.params.size();
        let mut m = PartialMap::from_pairs([(1, 1), (last, last)]);
        for &a in witnesses {
            m.push(a, a);
        }
        for (&x, &f) in e.iter().zip(&self.response) {
            m.push(x, f);
        }
        m
    }

    /// Checks the calibration invariants; an empty result means all hold.
    pub fn violations(&self, e: &[Element]) -> Vec<InvariantViolation> {
        let p = &self.params;
        let n = p.n as Element;
        let (lo, hi) = p.block(self.istar);
        let base = lo - 1;
        let mut out = Vec::new();
        let mut flag = |invariant, detail: String| out.push(InvariantViolation { invariant, detail });

        if self.cs2.len() != self.cs3.len()
            || self.cs2.iter().zip(&self.cs3).any(|(s, t)| s.1 - s.0 != t.1 - t.0)
            || self.cs2.iter().any(|s| s.0 < lo || s.1 > hi)
        {
            flag(Invariant::Shape, format!("cs2 {:?} cs3 {:?}", self.cs2, self.cs3));
        }
        if let Some(&(_, j)) = self.cs3.last() {
            if j > base + 3 * n + 1 {
                flag(Invariant::ImageBound, format!("last target {j} beyond {}", base + 3 * n + 1));
            }
        }
        let mark = p.p_point(self.istar);
        if self.cs3.iter().any(|t| t.0 <= mark && mark <= t.1) {
            flag(Invariant::RemovedMark, format!("a target interval covers {mark}"));
        }
        for w in self.cs3.windows(2) {
            if w[1].0 != w[0].1 + 2 {
                flag(Invariant::Spacing, format!("{:?} then {:?}", w[0], w[1]));
            }
        }

        // Offsets held in place inside the block, split at the mark.
        let mid = 4 * n + 1;
        let kept: Vec<(Element, bool)> = self
            .cs1
            .iter()
            .flat_map(|&(a, b)| {
                let pure = (a..=b).all(|x| e.contains(&x));
                let crosses = a < lo || b > hi;
                (a.max(lo)..=b.min(hi)).map(move |x| (x - base, pure && crosses))
            })
            .collect();
        let left = kept.iter().filter(|k| k.0 < mid).map(|k| k.0).max();
        let right = kept.iter().filter(|k| k.0 > mid).map(|k| k.0).min();
        if kept.iter().any(|k| k.0 == mid) {
            flag(Invariant::Intrusion, format!("offset {mid} is held in place"));
        }
        if let Some(l) = left {
            let first = self.cs3.first().map_or(Element::MAX, |t| t.0 - base);
            if l > n + 1 || (self.rule == SegmentRule::Anchored && first < l + 2) {
                flag(Invariant::Intrusion, format!("left reach {l}, targets start at offset {first}"));
            }
        }
        if let Some(r) = right {
            let end = self.cs3.last().map_or(0, |t| t.1 - base);
            if r < 7 * n + 1 || end + 2 > r {
                flag(Invariant::Intrusion, format!("right reach {r}, targets end at offset {end}"));
            }
        }
        // Segments made of picks alone that cross a block boundary.
        for &(o, _) in kept.iter().filter(|k| k.1) {
            if (o < mid && o + 1 > n) || (o > mid && o < 7 * n + 2) {
                flag(Invariant::Intrusion, format!("crossing pick segment at offset {o}"));
            }
        }
        out
    }
}

/// The Duplicator's full answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub istar: usize,
    pub f: Vec<Element>,
    /// From `B` (with mark `istar` removed) to `A`.
    pub rho: PartialMap,
    pub plan: SegmentPlan,
}

/// Answer to existential witnesses `witnesses` in `A` and universal picks `e`
/// in `B`, using [`SegmentRule::Anchored`].
pub fn duplicator_response(
    n: usize,
    k: usize,
    witnesses: &[Element],
    e: &[Element],
) -> Result<Response, CounterexampleError> {
    duplicator_response_with(n, k, witnesses, e, SegmentRule::Anchored)
}

pub fn duplicator_response_with(
    n: usize,
    k: usize,
    witnesses: &[Element],
    e: &[Element],
    rule: SegmentRule,
) -> Result<Response, CounterexampleError> {
    let istar = choose_istar(witnesses, n, k)?;
    let plan = segment_plan(e, n, k, istar, witnesses, rule)?;
    Ok(Response {
        istar,
        f: plan.response.clone(),
        rho: plan.rho(witnesses, e),
        plan,
    })
}
