//! Seeded generators for structures, formulas and subsets.
//!
//! Everything here is driven by a caller-supplied RNG so that sampled runs
//! are reproducible from a seed.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::logic::{Formula, Quantifier, Term};
use crate::structure::{Element, Structure, Vocabulary};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Universe `1..=size`; each tuple is present independently with probability `density`.
pub fn random_structure<R: Rng>(
    vocab: &Arc<Vocabulary>,
    size: usize,
    density: f64,
    rng: &mut R,
) -> Structure {
    let n = size as Element;
    let mut b = Structure::builder(vocab.clone(), 1..=n);
    for sym in vocab.relations() {
        let mut tuple = vec![1; sym.arity];
        loop {
            if rng.gen_bool(density) {
                b.add_tuple(&sym.name, &tuple);
            }
            let mut j = 0;
            while j < sym.arity {
                tuple[j] += 1;
                if tuple[j] <= n {
                    break;
                }
                tuple[j] = 1;
                j += 1;
            }
            if j == sym.arity {
                break;
            }
        }
    }
    for c in vocab.constants() {
        b.set_constant(c, rng.gen_range(1..=n));
    }
    b.build().expect("generated structure is well formed")
}

pub fn graph_vocab() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::of(&[("E", 2)], &[]))
}

/// Simple undirected graph on `1..=n` as a symmetric irreflexive `E`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Structure {
    let mut edges = Vec::new();
    for x in 1..=n as Element {
        for y in x + 1..=n as Element {
            if rng.gen_bool(p) {
                edges.push((x, y));
            }
        }
    }
    graph_from_edges(n, &edges)
}

pub fn graph_from_edges(n: usize, edges: &[(Element, Element)]) -> Structure {
    let mut b = Structure::builder(graph_vocab(), 1..=n as Element);
    for &(x, y) in edges {
        b.add_tuple("E", &[x, y]);
        b.add_tuple("E", &[y, x]);
    }
    b.build().expect("edges lie in the universe")
}

/// Every labelled simple graph on `1..=n`, ordered by edge bitmask.
pub fn all_graphs(n: usize) -> Vec<Structure> {
    let pairs: Vec<(Element, Element)> = (1..=n as Element)
        .flat_map(|x| (x + 1..=n as Element).map(move |y| (x, y)))
        .collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            graph_from_edges(n, &edges)
        })
        .collect()
}

fn random_term<R: Rng>(vocab: &Vocabulary, vars: &[String], rng: &mut R) -> Term {
    let consts = vocab.constants();
    if !consts.is_empty() && (vars.is_empty() || rng.gen_bool(0.2)) {
        Term::Const(consts.choose(rng).unwrap().clone())
    } else {
        Term::Var(vars.choose(rng).expect("need a variable or constant").clone())
    }
}

fn random_atom<R: Rng>(vocab: &Vocabulary, vars: &[String], rng: &mut R) -> Formula {
    let rels = vocab.relations();
    if rels.is_empty() || rng.gen_bool(0.2) {
        return Formula::eq(random_term(vocab, vars, rng), random_term(vocab, vars, rng));
    }
    let r = rels.choose(rng).unwrap();
    Formula::atom(
        r.name.clone(),
        (0..r.arity).map(|_| random_term(vocab, vars, rng)).collect(),
    )
}

/// Boolean combination of atoms over `vars`, of nesting depth at most `depth`.
pub fn random_quantifier_free<R: Rng>(
    vocab: &Vocabulary,
    vars: &[String],
    depth: usize,
    rng: &mut R,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_atom(vocab, vars, rng);
    }
    let sub = |rng: &mut R| random_quantifier_free(vocab, vars, depth - 1, rng);
    match rng.gen_range(0..4) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        _ => Formula::implies(sub(rng), sub(rng)),
    }
}

/// Arbitrary formula with variables drawn from `vars`; quantifiers may shadow.
pub fn random_formula<R: Rng>(
    vocab: &Vocabulary,
    vars: &[String],
    depth: usize,
    rng: &mut R,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.15) {
        return random_atom(vocab, vars, rng);
    }
    let sub = |rng: &mut R| random_formula(vocab, vars, depth - 1, rng);
    match rng.gen_range(0..6) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::exists(vars.choose(rng).unwrap().clone(), sub(rng)),
        _ => Formula::forall(vars.choose(rng).unwrap().clone(), sub(rng)),
    }
}

pub fn var_pool(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// A random formula whose free variables are closed off by random outer quantifiers.
pub fn random_sentence<R: Rng>(vocab: &Vocabulary, depth: usize, rng: &mut R) -> Formula {
    let vars = var_pool(3);
    let body = random_formula(vocab, &vars, depth, rng);
    let free: Vec<String> = body.free_vars().into_iter().collect();
    free.into_iter().rev().fold(body, |acc, v| {
        let q = if rng.gen_bool(0.5) {
            Quantifier::Exists
        } else {
            Quantifier::Forall
        };
        Formula::quantified(q, v, acc)
    })
}

/// Prenex sentence with the given quantifier prefix over fresh variables
/// `x1, x2, ...` and a random quantifier-free matrix.
pub fn random_prefixed_sentence<R: Rng>(
    vocab: &Vocabulary,
    prefix: &[Quantifier],
    depth: usize,
    rng: &mut R,
) -> Formula {
    let vars = var_pool(prefix.len());
    let matrix = if vars.is_empty() && vocab.constants().is_empty() {
        if rng.gen_bool(0.5) {
            Formula::True
        } else {
            Formula::False
        }
    } else {
        random_quantifier_free(vocab, &vars, depth, rng)
    };
    prefix
        .iter()
        .zip(vars)
        .rev()
        .fold(matrix, |acc, (&q, v)| Formula::quantified(q, v, acc))
}

/// A random subset of the universe that contains every constant interpretation.
pub fn random_subset<R: Rng>(s: &Structure, rng: &mut R) -> Vec<Element> {
    let pinned = s.pinned();
    let mut sub: Vec<Element> = s
        .universe()
        .iter()
        .copied()
        .filter(|e| pinned.contains(e) || rng.gen_bool(0.5))
        .collect();
    if sub.is_empty() {
        sub.push(*s.universe().choose(rng).unwrap());
    }
    sub
}

/// An isomorphic copy under a random permutation of the universe.
pub fn random_relabel<R: Rng>(s: &Structure, rng: &mut R) -> Structure {
    let mut image: Vec<Element> = s.universe().to_vec();
    image.shuffle(rng);
    let from: Vec<Element> = s.universe().to_vec();
    s.relabel(|e| image[from.binary_search(&e).unwrap()])
}
