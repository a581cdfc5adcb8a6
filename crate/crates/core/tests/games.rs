//! Game verdicts against independent oracles over the unary vocabulary
//! `{P/1}` with universes of size at most 3.

use std::collections::BTreeSet;
use std::sync::Arc;

use fmtk_core::counterexample::{build_a, build_b};
use fmtk_core::games::{
    check_certificate, check_family_certificate, separating_sentence, solve_family_game, solve_prefix_game, GameConfig,
    Winner,
};
use fmtk_core::logic::{evaluate_sentence, parse};
use fmtk_core::preservation::Family;
use fmtk_core::random::{random_prefixed_sentence, seeded};
use fmtk_core::{Element, Formula, Quantifier, Structure, Vocabulary};
use rand::Rng;

fn unary() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::of(&[("P", 1)], &[]))
}

fn small_structures() -> Vec<Structure> {
    Family::all_structures(&unary(), 3).unwrap().hosts().collect()
}

/// Block labels of a set partition of `m` items in restricted growth form.
fn partitions(m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let next = p.iter().max().map_or(0, |b| b + 1);
                (0..=next).map(move |b| {
                    let mut q = p.clone();
                    q.push(b);
                    q
                })
            })
            .collect();
    }
    out
}

/// Every complete atomic type over `vars`, written as a conjunction.
fn complete_types(vars: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for p in partitions(vars.len()) {
        let blocks = p.iter().max().map_or(0, |b| b + 1);
        for signs in 0..1u32 << blocks {
            let mut lits = vec!["true".to_string()];
            for i in 0..vars.len() {
                for j in i + 1..vars.len() {
                    let op = if p[i] == p[j] { "=" } else { "!=" };
                    lits.push(format!("{} {op} {}", vars[i], vars[j]));
                }
                let neg = if signs >> p[i] & 1 == 1 { "" } else { "!" };
                lits.push(format!("{neg}P({})", vars[i]));
            }
            out.push(format!("({})", lits.join(" & ")));
        }
    }
    out
}

/// All `exists^k forall^n` sentences whose matrix is a disjunction of
/// complete atomic types. Up to equivalence these are all such sentences.
fn all_prefix_sentences(k: usize, n: usize) -> Vec<Formula> {
    let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let vars: Vec<String> = xs.iter().chain(&ys).cloned().collect();
    let types = complete_types(&vars);
    let prefix: String = xs
        .iter()
        .map(|x| format!("exists {x}. "))
        .chain(ys.iter().map(|y| format!("forall {y}. ")))
        .collect();
    (0..1u64 << types.len())
        .map(|pick| {
            let chosen: Vec<&str> = (0..types.len())
                .filter(|t| pick >> t & 1 == 1)
                .map(|t| types[t].as_str())
                .collect();
            let matrix = if chosen.is_empty() {
                "false".to_string()
            } else {
                chosen.join(" | ")
            };
            parse(&format!("{prefix}{matrix}"), &unary()).unwrap()
        })
        .collect()
}

fn tuples(u: &[Element], len: usize) -> Vec<Vec<Element>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                u.iter().map(move |&e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

type AtomicType = (Vec<bool>, Vec<bool>);

fn type_of(s: &Structure, t: &[Element]) -> AtomicType {
    let eq = (0..t.len())
        .flat_map(|i| (i + 1..t.len()).map(move |j| (i, j)))
        .map(|(i, j)| t[i] == t[j])
        .collect();
    (eq, t.iter().map(|&e| s.holds(0, &[e])).collect())
}

/// Types realized by `head` followed by any `n`-tuple of `s`.
fn realized(s: &Structure, head: &[Element], n: usize) -> BTreeSet<AtomicType> {
    tuples(s.universe(), n)
        .into_iter()
        .map(|tail| {
            let t: Vec<Element> = head.iter().chain(&tail).copied().collect();
            type_of(s, &t)
        })
        .collect()
}

/// Every `exists^k forall^n` sentence true in `a` holds in some target: the
/// types a witness tuple of `a` forces are met by some tuple of a target.
fn transfers(a: &Structure, targets: &[Structure], k: usize, n: usize) -> bool {
    tuples(a.universe(), k).iter().all(|x| {
        let forced = realized(a, x, n);
        targets
            .iter()
            .any(|b| tuples(b.universe(), k).iter().any(|y| realized(b, y, n).is_subset(&forced)))
    })
}

fn verdict(a: &Structure, targets: &[Structure], k: usize, n: usize) -> Winner {
    let cfg = GameConfig::new(k, n);
    let out = solve_family_game(a, targets, cfg).unwrap();
    assert!(check_family_certificate(a, targets, &cfg, &out).unwrap());
    if out.winner == Winner::Spoiler {
        let s = separating_sentence(a, &cfg, &out).unwrap();
        assert!(evaluate_sentence(a, &s).unwrap(), "{s}");
        for b in targets {
            assert!(!evaluate_sentence(b, &s).unwrap(), "{s}");
        }
    }
    out.winner
}

#[test]
fn single_targets_match_sentence_enumeration() {
    let structures = small_structures();
    assert_eq!(structures.len(), 14);
    let mut spoiler = 0;
    for (k, n) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
        let sentences = all_prefix_sentences(k, n);
        for a in &structures {
            let truth_a: Vec<bool> = sentences.iter().map(|s| evaluate_sentence(a, s).unwrap()).collect();
            for b in &structures {
                let transfers = sentences
                    .iter()
                    .zip(&truth_a)
                    .all(|(s, &ta)| !ta || evaluate_sentence(b, s).unwrap());
                let w = verdict(a, std::slice::from_ref(b), k, n);
                assert_eq!(w == Winner::Duplicator, transfers, "k={k} n={n}\n{a:?}\n{b:?}");
                spoiler += usize::from(w == Winner::Spoiler);
            }
        }
    }
    assert!(spoiler > 0);
}

#[test]
fn single_and_family_targets_match_type_inclusion() {
    let structures = small_structures();
    for (k, n) in [(3, 0), (2, 1), (1, 2), (0, 3), (1, 1)] {
        for a in &structures {
            for b in &structures {
                let targets = std::slice::from_ref(b);
                assert_eq!(
                    verdict(a, targets, k, n) == Winner::Duplicator,
                    transfers(a, targets, k, n),
                    "k={k} n={n}"
                );
            }
        }
    }
    for (k, n) in [(1, 1), (2, 1), (1, 2)] {
        for a in &structures {
            for (i, b) in structures.iter().enumerate() {
                let c = &structures[(i * 5 + 3) % structures.len()];
                let targets = [b.clone(), c.clone()];
                assert_eq!(
                    verdict(a, &targets, k, n) == Winner::Duplicator,
                    transfers(a, &targets, k, n),
                    "k={k} n={n}"
                );
            }
        }
    }
}

#[test]
fn random_sentences_transfer_to_some_non_model() {
    let mut rng = seeded(31);
    for (n, k) in [(1, 0), (1, 1)] {
        let a = build_a(n, k).unwrap();
        let bs: Vec<Structure> = (0..=k).map(|i| build_b(n, k, i).unwrap()).collect();
        let out = solve_family_game(&a, &bs, GameConfig::new(k, n)).unwrap();
        assert_eq!(out.winner, Winner::Duplicator);
        let prefix: Vec<Quantifier> = std::iter::repeat_n(Quantifier::Exists, k)
            .chain(std::iter::repeat_n(Quantifier::Forall, n))
            .collect();
        let mut true_in_a = 0;
        for _ in 0..400 {
            let depth = rng.gen_range(1..=3);
            let s = random_prefixed_sentence(a.vocab(), &prefix, depth, &mut rng);
            if evaluate_sentence(&a, &s).unwrap() {
                true_in_a += 1;
                assert!(bs.iter().any(|b| evaluate_sentence(b, &s).unwrap()), "{s}");
            }
        }
        assert!(true_in_a > 0);
    }
}

#[test]
fn fixed_non_model_separation_is_sound() {
    let a = build_a(1, 1).unwrap();
    for istar in 0..=1 {
        let b = build_b(1, 1, istar).unwrap();
        let cfg = GameConfig::new(1, 1);
        let out = solve_prefix_game(&a, &b, cfg).unwrap();
        assert_eq!(out.winner, Winner::Spoiler);
        assert!(check_certificate(&a, &b, &cfg, &out).unwrap());
        let s = separating_sentence(&a, &cfg, &out).unwrap();
        assert!(evaluate_sentence(&a, &s).unwrap());
        assert!(!evaluate_sentence(&b, &s).unwrap());
        let other = build_b(1, 1, 1 - istar).unwrap();
        assert!(evaluate_sentence(&other, &s).unwrap());
    }
}
