//! The `exists^k forall^n` variant of the Ehrenfeucht-Fraisse game.
//!
//! The Spoiler picks `k` elements of `A`, the Duplicator answers in `B`, the
//! Spoiler picks `n` elements of `B` and the Duplicator answers in `A`. The
//! Duplicator wins a play when the picked elements, together with the
//! constants, form a partial isomorphism from `A` to `B`. A Duplicator win
//! means every `exists^k forall^n` sentence true in `A` is true in `B`.
//!
//! Against a family of targets the Duplicator may choose the target after
//! seeing the Spoiler's opening; a win then means every such sentence true in
//! `A` holds in at least one target.

mod certificate;
mod solver;
mod transfer;

use thiserror::Error;

use crate::structure::Element;

pub use certificate::{check_certificate, check_family_certificate, separating_sentence};
pub use solver::{solve_family_game, solve_prefix_game, ANSWER_TABLE_LIMIT};
pub use transfer::{transfer_separation_report, FixedTargetRun, GameMethod, TransferReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("game needs {required} positions, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("the structures have different vocabularies")]
    VocabularyMismatch,
    #[error("no target structures given")]
    NoTargets,
    #[error("outcome carries no certificate")]
    MissingCertificate,
    #[error("a separating sentence needs a Spoiler certificate")]
    NotASpoilerWin,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error(transparent)]
    Counterexample(#[from] crate::counterexample::CounterexampleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameConfig {
    /// Elements the Spoiler picks in `A` first.
    pub k: usize,
    /// Elements the Spoiler picks in `B` next.
    pub n: usize,
    /// Upper bound on `|A|^k |B|^k |B|^n |A|^n`, summed over targets.
    pub budget: u64,
}

impl GameConfig {
    pub fn new(k: usize, n: usize) -> GameConfig {
        GameConfig {
            k,
            n,
            budget: crate::DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(self, budget: u64) -> GameConfig {
        GameConfig { budget, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Winner {
    Duplicator,
    Spoiler,
}

impl Winner {
    pub fn as_str(self) -> &'static str {
        match self {
            Winner::Duplicator => "duplicator",
            Winner::Spoiler => "spoiler",
        }
    }
}

/// The Duplicator's answers for one opening `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyRow {
    pub a: Vec<Element>,
    /// Index of the chosen target (always 0 against a single structure).
    pub target: usize,
    pub b: Vec<Element>,
    /// One answer per `e` in `B^n`, lexicographic; `None` when elided.
    pub answers: Option<Vec<Vec<Element>>>,
}

/// A pick `e` in target `target` that no answer to `(a, b)` survives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub target: usize,
    pub b: Vec<Element>,
    pub e: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// An opening `a` and one refutation per target and reply `b`, targets
    /// in order and replies lexicographic.
    Spoiler {
        a: Vec<Element>,
        refutations: Vec<Refutation>,
    },
    /// One row per opening in `A^k`, lexicographic.
    Duplicator { rows: Vec<StrategyRow> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameOutcome {
    pub winner: Winner,
    pub certificate: Option<Certificate>,
    /// `(a, b, e)` triples examined.
    pub positions: u64,
}

/// Every tuple of length `len` over `universe`, lexicographic.
pub(crate) fn tuples(universe: &[Element], len: usize) -> impl Iterator<Item = Vec<Element>> + '_ {
    let size = universe.len() as u128;
    let count = size.pow(len as u32);
    (0..count).map(move |mut idx| {
        let mut out = vec![0; len];
        for slot in out.iter_mut().rev() {
            *slot = universe[(idx % size) as usize];
            idx /= size;
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::counterexample::{build_a, build_b};
    use crate::logic::evaluate_sentence;
    use crate::random::{random_graph, seeded};
    use crate::report::Report;
    use crate::structure::{Structure, Vocabulary};

    fn unary(size: Element, marked: &[Element]) -> Structure {
        let v = Arc::new(Vocabulary::of(&[("P", 1)], &[]));
        let mut b = Structure::builder(v, 1..=size);
        for &m in marked {
            b.add_tuple("P", &[m]);
        }
        b.build().unwrap()
    }

    fn solve_checked(a: &Structure, b: &Structure, cfg: GameConfig) -> GameOutcome {
        let out = solve_prefix_game(a, b, cfg).unwrap();
        assert!(check_certificate(a, b, &cfg, &out).unwrap());
        out
    }

    #[test]
    fn tuples_are_lexicographic() {
        let t: Vec<_> = tuples(&[1, 2], 2).collect();
        assert_eq!(t, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(tuples(&[1, 2, 3], 0).collect::<Vec<_>>(), vec![Vec::<Element>::new()]);
    }

    #[test]
    fn reflexive() {
        let mut rng = seeded(3);
        for _ in 0..5 {
            let g = random_graph(4, 0.5, &mut rng);
            for (k, n) in [(0, 1), (1, 1), (2, 1), (1, 2)] {
                let out = solve_checked(&g, &g, GameConfig::new(k, n));
                assert_eq!(out.winner, Winner::Duplicator);
            }
        }
    }

    #[test]
    fn unary_spoiler_example() {
        let a = unary(2, &[1, 2]);
        let b = unary(2, &[1]);
        let cfg = GameConfig::new(0, 1);
        let out = solve_checked(&a, &b, cfg);
        assert_eq!(out.winner, Winner::Spoiler);
        assert_eq!(
            out.certificate,
            Some(Certificate::Spoiler {
                a: vec![],
                refutations: vec![Refutation {
                    target: 0,
                    b: vec![],
                    e: vec![2],
                }],
            })
        );
        let sep = separating_sentence(&a, &cfg, &out).unwrap();
        assert!(evaluate_sentence(&a, &sep).unwrap());
        assert!(!evaluate_sentence(&b, &sep).unwrap());
        // the other direction is an existential claim the Duplicator survives
        assert_eq!(solve_checked(&b, &a, cfg).winner, Winner::Duplicator);
    }

    #[test]
    fn counterexample_family_games() {
        for (n, k) in [(1, 0), (1, 1)] {
            let a = build_a(n, k).unwrap();
            let bs: Vec<Structure> = (0..=k).map(|i| build_b(n, k, i).unwrap()).collect();
            let cfg = GameConfig::new(k, n);
            let out = solve_family_game(&a, &bs, cfg).unwrap();
            assert!(check_family_certificate(&a, &bs, &cfg, &out).unwrap());
            assert_eq!(out.winner, Winner::Duplicator, "(n,k)=({n},{k})");
        }
    }

    #[test]
    fn a_fixed_non_model_can_lose() {
        // with k = 0 there is only one non-model
        let out = solve_checked(&build_a(1, 0).unwrap(), &build_b(1, 0, 0).unwrap(), GameConfig::new(0, 1));
        assert_eq!(out.winner, Winner::Duplicator);

        // the point after the second mark, three steps before d, has no
        // counterpart in a structure whose only mark is the first one
        let a = build_a(1, 1).unwrap();
        let b = build_b(1, 1, 1).unwrap();
        let cfg = GameConfig::new(1, 1);
        let out = solve_checked(&a, &b, cfg);
        assert_eq!(out.winner, Winner::Spoiler);
        let Some(Certificate::Spoiler { a: opening, .. }) = &out.certificate else {
            panic!("expected a Spoiler certificate");
        };
        assert_eq!(opening, &vec![15]);
        let sep = separating_sentence(&a, &cfg, &out).unwrap();
        assert!(evaluate_sentence(&a, &sep).unwrap());
        assert!(!evaluate_sentence(&b, &sep).unwrap());
        assert!(evaluate_sentence(&build_b(1, 1, 0).unwrap(), &sep).unwrap());
    }

    #[test]
    fn one_more_existential_wins_for_spoiler() {
        let a = build_a(1, 0).unwrap();
        let b = build_b(1, 0, 0).unwrap();
        let cfg = GameConfig::new(1, 1);
        let out = solve_checked(&a, &b, cfg);
        assert_eq!(out.winner, Winner::Spoiler);
        let sep = separating_sentence(&a, &cfg, &out).unwrap();
        assert!(evaluate_sentence(&a, &sep).unwrap());
        assert!(!evaluate_sentence(&b, &sep).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let a = build_a(1, 1).unwrap();
        let b = build_b(1, 1, 0).unwrap();
        let err = solve_prefix_game(&a, &b, GameConfig::new(1, 1).with_budget(1000)).unwrap_err();
        assert_eq!(
            err,
            GameError::BudgetExceeded {
                required: 18u128.pow(4),
                budget: 1000
            }
        );
    }

    #[test]
    fn vocabulary_mismatch() {
        let g = random_graph(2, 0.5, &mut seeded(1));
        let u = unary(2, &[1]);
        assert_eq!(
            solve_prefix_game(&g, &u, GameConfig::new(0, 1)).unwrap_err(),
            GameError::VocabularyMismatch
        );
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let a = unary(2, &[1, 2]);
        let b = unary(2, &[1]);
        let cfg = GameConfig::new(0, 1);
        let mut out = solve_checked(&a, &b, cfg);
        if let Some(Certificate::Spoiler { refutations, .. }) = &mut out.certificate {
            refutations[0].e = vec![1];
        }
        assert!(!check_certificate(&a, &b, &cfg, &out).unwrap());

        let a = build_a(1, 1).unwrap();
        let bs: Vec<Structure> = (0..2).map(|i| build_b(1, 1, i).unwrap()).collect();
        let cfg = GameConfig::new(1, 1);
        let mut out = solve_family_game(&a, &bs, cfg).unwrap();
        let Some(Certificate::Duplicator { rows }) = &mut out.certificate else {
            panic!("expected a strategy table");
        };
        let answers = rows[4].answers.as_mut().unwrap();
        // the pick 2 must be answered by a successor of c
        answers[1] = vec![7];
        assert!(!check_family_certificate(&a, &bs, &cfg, &out).unwrap());

        let mut wrong_target = solve_family_game(&a, &bs, cfg).unwrap();
        if let Some(Certificate::Duplicator { rows }) = &mut wrong_target.certificate {
            rows[0].target = 2;
        }
        assert!(!check_family_certificate(&a, &bs, &cfg, &wrong_target).unwrap());

        let a = build_a(1, 0).unwrap();
        let b = build_b(1, 0, 0).unwrap();
        let cfg = GameConfig::new(0, 1);
        let mut wrong_winner = solve_checked(&a, &b, cfg);
        wrong_winner.winner = Winner::Spoiler;
        assert!(!check_certificate(&a, &b, &cfg, &wrong_winner).unwrap());
        wrong_winner.certificate = None;
        assert_eq!(
            check_certificate(&a, &b, &cfg, &wrong_winner),
            Err(GameError::MissingCertificate)
        );
    }

    #[test]
    fn elided_answers_are_searched() {
        let a = build_a(1, 1).unwrap();
        let bs: Vec<Structure> = (0..2).map(|i| build_b(1, 1, i).unwrap()).collect();
        let cfg = GameConfig::new(1, 1);
        let mut out = solve_family_game(&a, &bs, cfg).unwrap();
        if let Some(Certificate::Duplicator { rows }) = &mut out.certificate {
            rows.iter_mut().for_each(|r| r.answers = None);
        }
        assert!(check_family_certificate(&a, &bs, &cfg, &out).unwrap());
    }

    #[test]
    fn certificates_round_trip_through_reports() {
        let a = build_a(1, 0).unwrap();
        let b = build_b(1, 0, 0).unwrap();
        for cfg in [GameConfig::new(0, 1), GameConfig::new(1, 1), GameConfig::new(0, 2)] {
            let out = solve_checked(&a, &b, cfg);
            let text = out.to_report(&cfg).to_machine();
            let (cfg2, out2) = GameOutcome::from_report(&Report::parse(&text).unwrap()).unwrap();
            assert_eq!((cfg2, &out2), (cfg, &out));
            assert!(check_certificate(&a, &b, &cfg2, &out2).unwrap());
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn monotone_in_both_rounds() {
        let mut rng = seeded(11);
        for _ in 0..12 {
            let a = random_graph(4, 0.5, &mut rng);
            let b = random_graph(4, 0.5, &mut rng);
            let mut wins = [[false; 3]; 3];
            for k in 0..3 {
                for n in 0..3 {
                    wins[k][n] = solve_checked(&a, &b, GameConfig::new(k, n)).winner == Winner::Duplicator;
                }
            }
            for k in 0..3 {
                for n in 0..3 {
                    if wins[k][n] {
                        for k2 in 0..=k {
                            for n2 in 0..=n {
                                assert!(wins[k2][n2], "({k},{n}) won but ({k2},{n2}) lost");
                            }
                        }
                    }
                }
            }
        }
    }
}
