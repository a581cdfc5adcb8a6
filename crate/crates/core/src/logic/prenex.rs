use std::collections::BTreeSet;
use std::fmt;

use super::{Formula, LogicError, Quantifier, Term};

/// Renames bound variables so that no variable is bound twice and no bound
/// variable also occurs free. The first binder of each name keeps it.
pub fn rectify(f: &Formula) -> Formula {
    let free = f.free_vars();
    let mut used = f.all_vars();
    let mut bound_once = BTreeSet::new();
    let mut scope = Vec::new();
    rect(f, &free, &mut used, &mut bound_once, &mut scope)
}

fn fresh(base: &str, used: &mut BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !used.contains(n))
        .inspect(|n| {
            used.insert(n.clone());
        })
        .unwrap()
}

fn rect(
    f: &Formula,
    free: &BTreeSet<String>,
    used: &mut BTreeSet<String>,
    bound_once: &mut BTreeSet<String>,
    scope: &mut Vec<(String, String)>,
) -> Formula {
    let term = |t: &Term, scope: &Vec<(String, String)>| match t {
        Term::Var(v) => Term::Var(
            scope
                .iter()
                .rev()
                .find(|(from, _)| from == v)
                .map_or_else(|| v.clone(), |(_, to)| to.clone()),
        ),
        c => c.clone(),
    };
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(r, ts) => Formula::Atom(r.clone(), ts.iter().map(|t| term(t, scope)).collect()),
        Formula::Eq(a, b) => Formula::Eq(term(a, scope), term(b, scope)),
        Formula::Not(g) => Formula::not(rect(g, free, used, bound_once, scope)),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let l = rect(a, free, used, bound_once, scope);
            let r = rect(b, free, used, bound_once, scope);
            match f {
                Formula::And(..) => Formula::and(l, r),
                Formula::Or(..) => Formula::or(l, r),
                _ => Formula::implies(l, r),
            }
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let name = if free.contains(v) || bound_once.contains(v) {
                fresh(v, used)
            } else {
                bound_once.insert(v.clone());
                v.clone()
            };
            scope.push((v.clone(), name.clone()));
            let body = rect(g, free, used, bound_once, scope);
            scope.pop();
            let q = if matches!(f, Formula::Exists(..)) {
                Quantifier::Exists
            } else {
                Quantifier::Forall
            };
            Formula::quantified(q, name, body)
        }
    }
}

type Prefix = Vec<(Quantifier, String)>;

fn dual(p: Prefix) -> Prefix {
    p.into_iter().map(|(q, v)| (q.dual(), v)).collect()
}

fn pull(f: &Formula) -> (Prefix, Formula) {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => (Vec::new(), f.clone()),
        Formula::Not(g) => {
            let (p, m) = pull(g);
            (dual(p), Formula::not(m))
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let (pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            let (mut prefix, matrix) = match f {
                Formula::And(..) => (pa, Formula::and(ma, mb)),
                Formula::Or(..) => (pa, Formula::or(ma, mb)),
                // the antecedent sits under a negation
                _ => (dual(pa), Formula::implies(ma, mb)),
            };
            prefix.extend(pb);
            (prefix, matrix)
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let q = if matches!(f, Formula::Exists(..)) {
                Quantifier::Exists
            } else {
                Quantifier::Forall
            };
            let (p, m) = pull(g);
            let mut prefix = vec![(q, v.clone())];
            prefix.extend(p);
            (prefix, m)
        }
    }
}

/// An equivalent formula in prenex normal form.
///
/// The input is rectified first; quantifiers are then hoisted left to right,
/// outermost first, with polarity flipped under negation and in antecedents.
/// Equivalence assumes non-empty universes.
pub fn to_prenex(f: &Formula) -> Formula {
    let (prefix, matrix) = pull(&rectify(f));
    prefix
        .into_iter()
        .rev()
        .fold(matrix, |acc, (q, v)| Formula::quantified(q, v, acc))
}

/// Quantifier blocks of a prenex form, read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefixClass {
    pub blocks: Vec<(Quantifier, usize)>,
    pub matrix_quantifier_free: bool,
}

impl PrefixClass {
    /// Block structure of a formula that is already prenex (after its leading quantifiers).
    pub fn of_prenex(f: &Formula) -> PrefixClass {
        let mut blocks: Vec<(Quantifier, usize)> = Vec::new();
        let mut cur = f;
        loop {
            let (q, body) = match cur {
                Formula::Exists(_, b) => (Quantifier::Exists, b),
                Formula::Forall(_, b) => (Quantifier::Forall, b),
                _ => break,
            };
            match blocks.last_mut() {
                Some((last, n)) if *last == q => *n += 1,
                _ => blocks.push((q, 1)),
            }
            cur = body;
        }
        PrefixClass {
            blocks,
            matrix_quantifier_free: cur.is_quantifier_free(),
        }
    }

    pub fn quantifier_count(&self) -> usize {
        self.blocks.iter().map(|b| b.1).sum()
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_existential(&self) -> bool {
        self.blocks.iter().all(|b| b.0 == Quantifier::Exists)
    }

    pub fn is_universal(&self) -> bool {
        self.blocks.iter().all(|b| b.0 == Quantifier::Forall)
    }

    /// Number of quantifiers in the leading block of kind `q` (0 if the prefix starts otherwise).
    pub fn leading(&self, q: Quantifier) -> usize {
        match self.blocks.first() {
            Some(&(first, n)) if first == q => n,
            _ => 0,
        }
    }

    fn is_two_block(&self, first: Quantifier, count: usize) -> bool {
        let rest = if count == 0 {
            &self.blocks[..]
        } else {
            match self.blocks.first() {
                Some(&(q, n)) if q == first && n == count => &self.blocks[1..],
                _ => return false,
            }
        };
        rest.len() <= 1 && rest.iter().all(|b| b.0 == first.dual())
    }

    /// `∃^k ∀^*`: exactly `k` leading existentials, then only universals.
    pub fn is_ek_forall_star(&self, k: usize) -> bool {
        self.is_two_block(Quantifier::Exists, k)
    }

    /// `∀^k ∃^*`.
    pub fn is_fk_exists_star(&self, k: usize) -> bool {
        self.is_two_block(Quantifier::Forall, k)
    }

    pub fn dual(&self) -> PrefixClass {
        PrefixClass {
            blocks: self.blocks.iter().map(|&(q, n)| (q.dual(), n)).collect(),
            matrix_quantifier_free: self.matrix_quantifier_free,
        }
    }
}

impl fmt::Display for PrefixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("quantifier-free");
        }
        for (q, n) in &self.blocks {
            write!(f, "{}^{}", q.symbol(), n)?;
        }
        Ok(())
    }
}

/// Prefix class of the prenex form of a sentence.
pub fn classify_prefix(f: &Formula) -> Result<PrefixClass, LogicError> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(LogicError::NotASentence(
            free.into_iter().collect::<Vec<_>>().join(", "),
        ));
    }
    Ok(PrefixClass::of_prenex(&to_prenex(f)))
}
