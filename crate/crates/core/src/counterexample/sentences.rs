use rand::seq::SliceRandom;
use rand::Rng;

use crate::logic::{Formula, Quantifier, Term};
use crate::structure::{Element, Structure};

use super::{tau, CounterexampleError};

fn v(name: &str) -> Term {
    Term::var(name)
}

fn leq(a: Term, b: Term) -> Formula {
    Formula::atom("Leq", vec![a, b])
}

fn succ(a: Term, b: Term) -> Formula {
    Formula::atom("S", vec![a, b])
}

fn p(a: Term) -> Formula {
    Formula::atom("P", vec![a])
}

/// Linear-order axioms for `Leq` as a quantifier-free matrix in `u, v, w`.
fn order_matrix() -> Formula {
    let (u, vv, w) = (|| v("u"), || v("v"), || v("w"));
    Formula::conj([
        leq(u(), u()),
        Formula::implies(Formula::and(leq(u(), vv()), leq(vv(), u())), Formula::eq(u(), vv())),
        Formula::implies(Formula::and(leq(u(), vv()), leq(vv(), w())), leq(u(), w())),
        Formula::or(leq(u(), vv()), leq(vv(), u())),
    ])
}

/// `c` is the least and `d` the greatest element, as a matrix in `u`.
fn endpoints_matrix() -> Formula {
    Formula::and(leq(Term::cst("c"), v("u")), leq(v("u"), Term::cst("d")))
}

/// `S(u, v)` only if `v` is the immediate `Leq`-successor of `u`; `w` ranges
/// over the elements that could sit in between.
fn successor_matrix() -> Formula {
    let (u, vv, w) = (|| v("u"), || v("v"), || v("w"));
    Formula::implies(
        succ(u(), vv()),
        Formula::conj([
            leq(u(), vv()),
            Formula::neq(u(), vv()),
            Formula::implies(
                Formula::and(leq(u(), w()), leq(w(), vv())),
                Formula::or(Formula::eq(w(), u()), Formula::eq(w(), vv())),
            ),
        ]),
    )
}

fn uvw(body: Formula) -> Formula {
    Formula::quantify_all(Quantifier::Forall, ["u", "v", "w"], body)
}

fn xs(k: usize) -> Vec<String> {
    (1..=k + 1).map(|i| format!("x{i}")).collect()
}

fn all_marked(vars: &[String]) -> Formula {
    Formula::conj(vars.iter().map(|x| p(v(x))))
}

fn pairs(vars: &[String]) -> impl Iterator<Item = (&String, &String)> {
    vars.iter()
        .enumerate()
        .flat_map(move |(i, a)| vars[i + 1..].iter().map(move |b| (a, b)))
}

/// The five conjuncts of [`phi`].
///
/// 1. `Leq` is a linear order; 2. `c` and `d` are its endpoints;
/// 3. `S` is contained in the successor relation of `Leq`;
/// 4. every element except `d` has an `S`-successor;
/// 5. at most `k` elements are marked by `P`.
pub fn xi(index: usize, k: usize) -> Result<Formula, CounterexampleError> {
    Ok(match index {
        1 => uvw(order_matrix()),
        2 => Formula::forall("u", endpoints_matrix()),
        3 => uvw(successor_matrix()),
        4 => Formula::forall(
            "x",
            Formula::implies(
                Formula::neq(v("x"), Term::cst("d")),
                Formula::exists("y", succ(v("x"), v("y"))),
            ),
        ),
        5 => {
            let vars = xs(k);
            let some_equal = Formula::disj(pairs(&vars).map(|(a, b)| Formula::eq(v(a), v(b))));
            Formula::quantify_all(
                Quantifier::Forall,
                vars.clone(),
                Formula::implies(all_marked(&vars), some_equal),
            )
        }
        _ => return Err(CounterexampleError::InvalidXiIndex(index)),
    })
}

/// `(xi1 & xi2 & xi3) & !(xi4 & xi5)`.
pub fn phi(k: usize) -> Formula {
    let x = |i| xi(i, k).expect("index in range");
    Formula::and(
        Formula::conj([x(1), x(2), x(3)]),
        Formula::not(Formula::and(x(4), x(5))),
    )
}

/// A prenex sentence `exists^{k+1} forall^3` equivalent to [`phi`].
///
/// The negated conjuncts share their existential block: `x1` serves both as
/// the element without a successor and as the first of `k + 1` distinct marked
/// points. The universal `u` that rules out a successor of `x1` is the same
/// `u` used by the order, endpoint and successor matrices.
pub fn phi_prenex(k: usize) -> Formula {
    let vars = xs(k);
    let no_successor = Formula::and(
        Formula::neq(v("x1"), Term::cst("d")),
        Formula::not(succ(v("x1"), v("u"))),
    );
    let many_marked = Formula::and(
        all_marked(&vars),
        Formula::conj(pairs(&vars).map(|(a, b)| Formula::neq(v(a), v(b)))),
    );
    let matrix = Formula::and(
        Formula::or(no_successor, many_marked),
        Formula::conj([order_matrix(), endpoints_matrix(), successor_matrix()]),
    );
    Formula::quantify_all(Quantifier::Exists, vars, uvw(matrix))
}

/// A random structure over the vocabulary of [`phi`] on `1..=size`.
///
/// Most draws are close to models: a random linear order with its endpoints
/// as constants, a random part of its successor relation and a random set of
/// marks. One draw in eight also scrambles the order so that the first three
/// conjuncts fail.
pub fn random_near_model<R: Rng>(size: usize, rng: &mut R) -> Structure {
    let n = size as Element;
    let mut order: Vec<Element> = (1..=n).collect();
    order.shuffle(rng);
    let mut b = Structure::builder(tau(), 1..=n);
    let keep_successor = rng.gen_range(0.5..=1.0);
    for (i, &x) in order.iter().enumerate() {
        for &y in &order[i..] {
            b.add_tuple("Leq", &[x, y]);
        }
        if i + 1 < order.len() && rng.gen_bool(keep_successor) {
            b.add_tuple("S", &[x, order[i + 1]]);
        }
        if rng.gen_bool(0.3) {
            b.add_tuple("P", &[x]);
        }
    }
    if rng.gen_bool(0.125) {
        let x = rng.gen_range(1..=n);
        let y = rng.gen_range(1..=n);
        b.add_tuple("Leq", &[y, x]);
        b.add_tuple("S", &[x, y]);
    }
    b.set_constant("c", order[0]);
    b.set_constant("d", *order.last().unwrap());
    b.build().expect("elements lie in the universe")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::{build_a, build_b};
    use crate::logic::{classify_prefix, evaluate_naive, evaluate_sentence, parse, Assignment};
    use crate::random::{random_structure, seeded};

    #[test]
    fn prefixes() {
        for k in 0..4 {
            assert!(classify_prefix(&xi(1, k).unwrap()).unwrap().is_fk_exists_star(3));
            assert_eq!(classify_prefix(&xi(3, k).unwrap()).unwrap().quantifier_count(), 3);
            assert_eq!(classify_prefix(&xi(2, k).unwrap()).unwrap().to_string(), "∀^1");
            let p5 = classify_prefix(&xi(5, k).unwrap()).unwrap();
            assert!(p5.is_universal() && p5.quantifier_count() == k + 1);
            let pp = classify_prefix(&phi_prenex(k)).unwrap();
            assert_eq!(pp.to_string(), format!("∃^{}∀^3", k + 1));
            assert!(pp.is_ek_forall_star(k + 1));
            assert_eq!(phi_prenex(k), crate::logic::to_prenex(&phi_prenex(k)));
        }
        assert_eq!(classify_prefix(&xi(5, 1).unwrap()).unwrap().to_string(), "∀^2");
        assert_eq!(xi(6, 1), Err(CounterexampleError::InvalidXiIndex(6)));
    }

    #[test]
    fn xi4_examples() {
        let a = build_a(1, 1).unwrap();
        assert!(evaluate_sentence(&a, &xi(4, 1).unwrap()).unwrap());
        let bare = Structure::builder(tau(), 1..=2)
            .tuple("Leq", &[1, 1])
            .tuple("Leq", &[1, 2])
            .tuple("Leq", &[2, 2])
            .constant("c", 1)
            .constant("d", 2)
            .build()
            .unwrap();
        assert!(!evaluate_sentence(&bare, &xi(4, 1).unwrap()).unwrap());
    }

    #[test]
    fn single_point_is_not_a_model() {
        let s = Structure::builder(tau(), [1])
            .tuple("Leq", &[1, 1])
            .constant("c", 1)
            .constant("d", 1)
            .build()
            .unwrap();
        assert!(!evaluate_sentence(&s, &phi(0)).unwrap());
        assert!(!evaluate_sentence(&s, &phi_prenex(0)).unwrap());
    }

    #[test]
    fn grid_facts_and_prenex_agreement() {
        for n in 1..=2 {
            for k in 0..=2 {
                let a = build_a(n, k).unwrap();
                assert!(evaluate_sentence(&a, &phi(k)).unwrap());
                assert!(evaluate_sentence(&a, &phi_prenex(k)).unwrap());
                for i in 0..=k {
                    let b = build_b(n, k, i).unwrap();
                    assert!(!evaluate_sentence(&b, &phi(k)).unwrap());
                    assert!(!evaluate_sentence(&b, &phi_prenex(k)).unwrap());
                    assert!(evaluate_sentence(&b, &xi(5, k).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn prenex_agrees_on_random_structures() {
        let mut rng = seeded(7);
        let vocab = tau();
        for i in 0..200 {
            let size = 1 + i % 5;
            let s = if i % 2 == 0 {
                random_near_model(size, &mut rng)
            } else {
                random_structure(&vocab, size, 0.4, &mut rng)
            };
            for k in 0..3 {
                let expected = evaluate_naive(&s, &phi(k), &Assignment::new()).unwrap();
                assert_eq!(evaluate_sentence(&s, &phi_prenex(k)).unwrap(), expected);
                assert_eq!(evaluate_naive(&s, &phi_prenex(k), &Assignment::new()).unwrap(), expected);
            }
        }
    }

    #[test]
    fn xi3_matches_successor_reading() {
        let f = parse(
            "forall u. forall v. S(u,v) -> (Leq(u,v) & u != v & !(exists w. Leq(u,w) & Leq(w,v) & w != u & w != v))",
            &tau(),
        )
        .unwrap();
        let mut rng = seeded(3);
        for i in 0..100 {
            let s = random_near_model(1 + i % 5, &mut rng);
            assert_eq!(
                evaluate_sentence(&s, &f).unwrap(),
                evaluate_sentence(&s, &xi(3, 0).unwrap()).unwrap()
            );
        }
    }
}
