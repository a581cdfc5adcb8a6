use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::logic::{classify_prefix, CompiledFormula, PrefixClass, Quantifier};
use crate::random::seeded;
use crate::report::{join_elements, Report};
use crate::structure::{Element, Structure};

use super::strategy::plan_unchecked;
use super::{build_a, build_b, choose_istar, phi, phi_prenex, CounterexampleError, CxParams, SegmentRule};

/// Exhaustive runs compare against [`SegmentRule::Unanchored`] when the
/// position space has at most this many elements.
pub const LITERAL_COMPARISON_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyMode::Exhaustive => f.write_str("exhaustive"),
            VerifyMode::Sample { count, seed } => write!(f, "sample count={count} seed={seed}"),
        }
    }
}

/// Outcome of running the unanchored rule over the same positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralComparison {
    pub checks: u64,
    pub failures: u64,
    pub first_failure: Option<(Vec<Element>, Vec<Element>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub params: CxParams,
    pub mode: VerifyMode,
    pub a_models_phi: bool,
    /// Indexed by the removed block.
    pub b_models_phi: Vec<bool>,
    pub prenex_prefix: PrefixClass,
    /// Number of universals after the leading existentials.
    pub prenex_universals: usize,
    pub prenex_agrees: bool,
    pub strategy_checks: u64,
    pub strategy_failures: u64,
    /// Lexicographically first failing `(witnesses, picks)`.
    pub first_failure: Option<(Vec<Element>, Vec<Element>)>,
    pub invariant_violations: u64,
    pub first_violation: Option<(Vec<Element>, Vec<Element>, String)>,
    pub literal: Option<LiteralComparison>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.a_models_phi
            && self.b_models_phi.iter().all(|b| !b)
            && self.prenex_agrees
            && self.strategy_failures == 0
            && self.invariant_violations == 0
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new("verify");
        r.push("n", self.params.n).push("k", self.params.k).push("mode", self.mode);
        r.push("universe", self.params.size());
        r.push("a_models_phi", self.a_models_phi);
        for (i, b) in self.b_models_phi.iter().enumerate() {
            r.push("b_models_phi", format!("istar={i} {b}"));
        }
        r.push("prenex_prefix", &self.prenex_prefix);
        r.push("prenex_universals", self.prenex_universals);
        r.push("prenex_agrees", self.prenex_agrees);
        r.push("strategy_checks", self.strategy_checks);
        r.push("strategy_failures", self.strategy_failures);
        if let Some((a, e)) = &self.first_failure {
            r.push("first_failure", format!("a={} e={}", join_elements(a), join_elements(e)));
        }
        r.push("invariant_violations", self.invariant_violations);
        if let Some((a, e, what)) = &self.first_violation {
            r.push(
                "first_violation",
                format!("a={} e={} {what}", join_elements(a), join_elements(e)),
            );
        }
        match &self.literal {
            Some(l) => {
                r.push("unanchored_checks", l.checks);
                r.push("unanchored_failures", l.failures);
                if let Some((a, e)) = &l.first_failure {
                    r.push(
                        "unanchored_first_failure",
                        format!("a={} e={}", join_elements(a), join_elements(e)),
                    );
                }
            }
            None => {
                r.push("unanchored_checks", 0);
            }
        }
        r.push("verdict", if self.passed() { "pass" } else { "fail" });
        r
    }
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    first_failure: Option<u64>,
    violations: u64,
    first_violation: Option<(u64, String)>,
    literal_checks: u64,
    literal_failures: u64,
    literal_first: Option<u64>,
}

fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.checks += o.checks;
        self.failures += o.failures;
        self.first_failure = min_opt(self.first_failure, o.first_failure);
        self.violations += o.violations;
        self.first_violation = match (self.first_violation, o.first_violation) {
            (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
            (x, y) => x.or(y),
        };
        self.literal_checks += o.literal_checks;
        self.literal_failures += o.literal_failures;
        self.literal_first = min_opt(self.literal_first, o.literal_first);
        self
    }
}

struct Checker {
    p: CxParams,
    a: Structure,
    bs: Vec<Structure>,
    literal: bool,
}

impl Checker {
    fn run(&self, mut t: Tally, tag: u64, w: &[Element], e: &[Element]) -> Tally {
        let istar = choose_istar(w, self.p.n, self.p.k).expect("tuples are in range");
        let plan = plan_unchecked(self.p, e, istar, w, SegmentRule::Anchored);
        t.checks += 1;
        if !plan.rho(w, e).is_partial_isomorphism(&self.bs[istar], &self.a) {
            t.failures += 1;
            t.first_failure = min_opt(t.first_failure, Some(tag));
        }
        let v = plan.violations(e);
        if !v.is_empty() {
            t.violations += 1;
            if t.first_violation.as_ref().is_none_or(|f| tag < f.0) {
                t.first_violation = Some((tag, format!("{:?}: {}", v[0].invariant, v[0].detail)));
            }
        }
        if self.literal {
            let lit = plan_unchecked(self.p, e, istar, w, SegmentRule::Unanchored);
            t.literal_checks += 1;
            if !lit.rho(w, e).is_partial_isomorphism(&self.bs[istar], &self.a) {
                t.literal_failures += 1;
                t.literal_first = min_opt(t.literal_first, Some(tag));
            }
        }
        t
    }
}

fn decode(mut idx: u64, size: Element, len: usize) -> Vec<Element> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % size as u64) as Element + 1;
        idx /= size as u64;
    }
    out
}

/// Checks the model and non-model facts, the prenex form, and the
/// Duplicator's answer at every position (or a seeded sample of positions).
///
/// A position is a tuple of `k` witnesses in `A` followed by `n` picks in
/// `B`; exhaustive runs visit `|A|^(k+n)` of them and fail with
/// [`CounterexampleError::BudgetExceeded`] beyond `budget`.
pub fn verify_counterexample(
    n: usize,
    k: usize,
    mode: VerifyMode,
    budget: u64,
) -> Result<VerifyReport, CounterexampleError> {
    let p = CxParams::new(n, k)?;
    let space = (p.size() as u128).pow((k + n) as u32);
    if mode == VerifyMode::Exhaustive && space > budget as u128 {
        return Err(CounterexampleError::BudgetExceeded {
            required: space,
            budget,
        });
    }
    let a = build_a(n, k)?;
    let bs: Vec<Structure> = (0..=k).map(|i| build_b(n, k, i)).collect::<Result<_, _>>()?;

    let tau = a.vocab_arc().clone();
    let f = CompiledFormula::new(&phi(k), &tau).expect("phi fits its vocabulary");
    let g = CompiledFormula::new(&phi_prenex(k), &tau).expect("prenex form fits its vocabulary");
    let a_models_phi = f.check(&a);
    let b_models_phi: Vec<bool> = bs.iter().map(|b| f.check(b)).collect();
    let prenex_agrees =
        g.check(&a) == a_models_phi && bs.iter().zip(&b_models_phi).all(|(b, &v)| g.check(b) == v);
    let prenex_prefix = classify_prefix(&phi_prenex(k)).expect("a sentence");
    let prenex_universals = match prenex_prefix.blocks.as_slice() {
        [(Quantifier::Exists, _), (Quantifier::Forall, m)] => *m,
        _ => 0,
    };

    let literal = mode == VerifyMode::Exhaustive && space <= LITERAL_COMPARISON_LIMIT;
    let checker = Checker { p, a, bs, literal };
    let size = p.size();
    let width = k + n;

    let (tally, positions): (Tally, Option<Vec<Vec<Element>>>) = match mode {
        VerifyMode::Exhaustive => {
            let t = (0..space as u64)
                .into_par_iter()
                .fold(Tally::default, |t, idx| {
                    let tuple = decode(idx, size, width);
                    checker.run(t, idx, &tuple[..k], &tuple[k..])
                })
                .reduce(Tally::default, Tally::merge);
            (t, None)
        }
        VerifyMode::Sample { count, seed } => {
            let mut rng = seeded(seed);
            let samples: Vec<Vec<Element>> = (0..count)
                .map(|_| (0..width).map(|_| rng.gen_range(1..=size)).collect())
                .collect();
            let t = samples
                .par_iter()
                .enumerate()
                .fold(Tally::default, |t, (i, tuple)| {
                    checker.run(t, i as u64, &tuple[..k], &tuple[k..])
                })
                .reduce(Tally::default, Tally::merge);
            (t, Some(samples))
        }
    };
    let position = |tag: u64| {
        let tuple = match &positions {
            Some(s) => s[tag as usize].clone(),
            None => decode(tag, size, width),
        };
        (tuple[..k].to_vec(), tuple[k..].to_vec())
    };

    Ok(VerifyReport {
        params: p,
        mode,
        a_models_phi,
        b_models_phi,
        prenex_prefix,
        prenex_universals,
        prenex_agrees,
        strategy_checks: tally.checks,
        strategy_failures: tally.failures,
        first_failure: tally.first_failure.map(position),
        invariant_violations: tally.violations,
        first_violation: tally.first_violation.map(|(tag, what)| {
            let (a, e) = position(tag);
            (a, e, what)
        }),
        literal: literal.then(|| LiteralComparison {
            checks: tally.literal_checks,
            failures: tally.literal_failures,
            first_failure: tally.literal_first.map(position),
        }),
    })
}
