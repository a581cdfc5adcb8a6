use rayon::prelude::*;

use crate::structure::{Element, MapChecker, Structure};

use super::{tuples, Certificate, GameConfig, GameError, GameOutcome, Refutation, StrategyRow, Winner};

/// Duplicator tables keep every answer while `|A|^k |B|^n` stays below this.
pub const ANSWER_TABLE_LIMIT: u128 = 1 << 20;

pub(crate) fn game_size(a: &Structure, targets: &[Structure], cfg: &GameConfig) -> u128 {
    let sa = a.size() as u128;
    let outer = sa.pow(cfg.k as u32).saturating_mul(sa.pow(cfg.n as u32));
    let inner = targets.iter().fold(0u128, |acc, b| {
        let sb = b.size() as u128;
        acc.saturating_add(sb.pow(cfg.k as u32).saturating_mul(sb.pow(cfg.n as u32)))
    });
    outer.saturating_mul(inner)
}

pub(crate) fn keeps_answers(a: &Structure, targets: &[Structure], cfg: &GameConfig) -> bool {
    let widest = targets.iter().map(Structure::size).max().unwrap_or(0) as u128;
    (a.size() as u128).pow(cfg.k as u32) * widest.pow(cfg.n as u32) <= ANSWER_TABLE_LIMIT
}

/// Extends the map with answers `f -> e[j..]`, depth first.
fn answer(chk: &mut MapChecker<'_>, from: &[Element], e: &[Element], out: &mut Vec<Element>) -> bool {
    let Some((&t, rest)) = e.split_first() else {
        return true;
    };
    for &f in from {
        if chk.try_push(f, t) {
            out.push(f);
            let ok = answer(chk, from, rest, out);
            chk.pop();
            if ok {
                return true;
            }
            out.pop();
        }
    }
    false
}

pub(crate) enum Row {
    Duplicator(StrategyRow),
    Spoiler(Vec<Refutation>),
}

/// Plays every pick against the reply `b` to `a`. Returns the answers (empty
/// unless `keep_answers`) or the pick that defeats `b`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn try_reply(
    chk: &mut MapChecker<'_>,
    a_s: &Structure,
    b_s: &Structure,
    cfg: &GameConfig,
    a: &[Element],
    b: &[Element],
    keep_answers: bool,
    positions: &mut u64,
) -> Result<Vec<Vec<Element>>, Vec<Element>> {
    let mut pushed = 0;
    while pushed < cfg.k && chk.try_push(a[pushed], b[pushed]) {
        pushed += 1;
    }
    let mut result = Ok(Vec::new());
    if pushed < cfg.k {
        result = Err(first_pick(b_s, cfg));
    } else {
        let mut f = Vec::with_capacity(cfg.n);
        for e in tuples(b_s.universe(), cfg.n) {
            *positions += 1;
            f.clear();
            if !answer(chk, a_s.universe(), &e, &mut f) {
                result = Err(e);
                break;
            }
            if let (true, Ok(answers)) = (keep_answers, result.as_mut()) {
                answers.push(f.clone());
            }
        }
    }
    for _ in 0..pushed {
        chk.pop();
    }
    result
}

fn first_pick(b_s: &Structure, cfg: &GameConfig) -> Vec<Element> {
    tuples(b_s.universe(), cfg.n).next().unwrap_or_default()
}

/// Finds the first target and reply `b` to `a` that survive every pick, or
/// the Spoiler's refutation of every target and reply.
pub(crate) fn solve_row(
    a_s: &Structure,
    targets: &[Structure],
    cfg: &GameConfig,
    a: &[Element],
    keep_answers: bool,
    positions: &mut u64,
) -> Row {
    let mut refutations = Vec::new();
    for (target, b_s) in targets.iter().enumerate() {
        let Some(mut chk) = MapChecker::with_constants(a_s, b_s) else {
            for b in tuples(b_s.universe(), cfg.k) {
                refutations.push(Refutation {
                    target,
                    b,
                    e: first_pick(b_s, cfg),
                });
            }
            continue;
        };
        for b in tuples(b_s.universe(), cfg.k) {
            match try_reply(&mut chk, a_s, b_s, cfg, a, &b, keep_answers, positions) {
                Err(e) => refutations.push(Refutation { target, b, e }),
                Ok(answers) => {
                    return Row::Duplicator(StrategyRow {
                        a: a.to_vec(),
                        target,
                        b,
                        answers: keep_answers.then_some(answers),
                    })
                }
            }
        }
    }
    Row::Spoiler(refutations)
}

pub(crate) fn check_inputs(a: &Structure, targets: &[Structure], cfg: &GameConfig) -> Result<(), GameError> {
    if targets.is_empty() {
        return Err(GameError::NoTargets);
    }
    if targets.iter().any(|b| a.vocab() != b.vocab()) {
        return Err(GameError::VocabularyMismatch);
    }
    let required = game_size(a, targets, cfg);
    if required > cfg.budget as u128 {
        return Err(GameError::BudgetExceeded {
            required,
            budget: cfg.budget,
        });
    }
    Ok(())
}

/// Assembles per-opening rows, in lexicographic order of openings, into an
/// outcome: the first Spoiler row wins, otherwise the table is the
/// Duplicator's certificate.
pub(crate) fn assemble(openings: Vec<Vec<Element>>, rows: Vec<Row>, positions: u64) -> GameOutcome {
    let mut table = Vec::with_capacity(rows.len());
    for (a, row) in openings.into_iter().zip(rows) {
        match row {
            Row::Duplicator(r) => table.push(r),
            Row::Spoiler(refutations) => {
                return GameOutcome {
                    winner: Winner::Spoiler,
                    certificate: Some(Certificate::Spoiler { a, refutations }),
                    positions,
                }
            }
        }
    }
    GameOutcome {
        winner: Winner::Duplicator,
        certificate: Some(Certificate::Duplicator { rows: table }),
        positions,
    }
}

/// Decides the game against a single target by exhaustive search.
///
/// Openings are tried in lexicographic order; each opening's replies are
/// searched in lexicographic order and the first surviving reply is kept, so
/// the outcome and its certificate are deterministic.
pub fn solve_prefix_game(a: &Structure, b: &Structure, cfg: GameConfig) -> Result<GameOutcome, GameError> {
    solve_family_game(a, std::slice::from_ref(b), cfg)
}

/// Decides the game where the Duplicator picks one of `targets` after the
/// opening. Targets are tried in order.
pub fn solve_family_game(a: &Structure, targets: &[Structure], cfg: GameConfig) -> Result<GameOutcome, GameError> {
    check_inputs(a, targets, &cfg)?;
    let keep = keeps_answers(a, targets, &cfg);
    let openings: Vec<Vec<Element>> = tuples(a.universe(), cfg.k).collect();
    let rows: Vec<(Row, u64)> = openings
        .par_iter()
        .map(|op| {
            let mut positions = 0;
            let row = solve_row(a, targets, &cfg, op, keep, &mut positions);
            (row, positions)
        })
        .collect();
    let positions = rows.iter().map(|r| r.1).sum();
    Ok(assemble(openings, rows.into_iter().map(|r| r.0).collect(), positions))
}
