use std::collections::HashSet;

use crate::logic::{Formula, Quantifier, Term};
use crate::report::{join_elements, split_elements, Report};
use crate::structure::{Element, PartialMap, Structure};

use super::{tuples, Certificate, GameConfig, GameError, GameOutcome, Refutation, StrategyRow, Winner};

fn play(a: &[Element], b: &[Element], f: &[Element], e: &[Element]) -> PartialMap {
    PartialMap::from_pairs(a.iter().copied().zip(b.iter().copied()).chain(f.iter().copied().zip(e.iter().copied())))
}

fn some_answer(a_s: &Structure, b_s: &Structure, a: &[Element], b: &[Element], e: &[Element]) -> bool {
    tuples(a_s.universe(), e.len()).any(|f| play(a, b, &f, e).is_partial_isomorphism(a_s, b_s))
}

/// Re-verifies a certificate with plain partial-isomorphism checks.
///
/// A Spoiler certificate must refute every reply in `B^k`; a Duplicator
/// table must answer every opening in `A^k` and every pick in `B^n`. Elided
/// answers are searched for again.
pub fn check_certificate(
    a_s: &Structure,
    b_s: &Structure,
    cfg: &GameConfig,
    outcome: &GameOutcome,
) -> Result<bool, GameError> {
    check_family_certificate(a_s, std::slice::from_ref(b_s), cfg, outcome)
}

/// [`check_certificate`] for a game against several targets.
pub fn check_family_certificate(
    a_s: &Structure,
    targets: &[Structure],
    cfg: &GameConfig,
    outcome: &GameOutcome,
) -> Result<bool, GameError> {
    let cert = outcome
        .certificate
        .as_ref()
        .ok_or(GameError::MissingCertificate)?;
    match (outcome.winner, cert) {
        (Winner::Spoiler, Certificate::Spoiler { a, refutations }) => {
            if a.len() != cfg.k || a.iter().any(|&x| !a_s.contains(x)) {
                return Ok(false);
            }
            let mut expected = targets
                .iter()
                .enumerate()
                .flat_map(|(t, b_s)| tuples(b_s.universe(), cfg.k).map(move |b| (t, b)));
            for r in refutations {
                let Some((t, b)) = expected.next() else {
                    return Ok(false);
                };
                let b_s = &targets[t];
                if r.target != t
                    || r.b != b
                    || r.e.len() != cfg.n
                    || r.e.iter().any(|&x| !b_s.contains(x))
                    || some_answer(a_s, b_s, a, &r.b, &r.e)
                {
                    return Ok(false);
                }
            }
            Ok(expected.next().is_none())
        }
        (Winner::Duplicator, Certificate::Duplicator { rows }) => {
            let mut openings = tuples(a_s.universe(), cfg.k);
            for row in rows {
                if openings.next().as_ref() != Some(&row.a) {
                    return Ok(false);
                }
                match targets.get(row.target) {
                    Some(b_s) if row_holds(a_s, b_s, cfg, row) => {}
                    _ => return Ok(false),
                }
            }
            Ok(openings.next().is_none())
        }
        _ => Ok(false),
    }
}

fn row_holds(a_s: &Structure, b_s: &Structure, cfg: &GameConfig, row: &StrategyRow) -> bool {
    if row.a.len() != cfg.k || row.b.len() != cfg.k || row.b.iter().any(|&x| !b_s.contains(x)) {
        return false;
    }
    match &row.answers {
        Some(answers) => {
            let picks = (b_s.size() as u128).pow(cfg.n as u32);
            answers.len() as u128 == picks
                && tuples(b_s.universe(), cfg.n).zip(answers).all(|(e, f)| {
                    f.len() == cfg.n && play(&row.a, &row.b, f, &e).is_partial_isomorphism(a_s, b_s)
                })
        }
        None => tuples(b_s.universe(), cfg.n).all(|e| some_answer(a_s, b_s, &row.a, &row.b, &e)),
    }
}

/// Complete atomic type of `values` in `s`, over `terms`.
pub(crate) fn atomic_type(s: &Structure, terms: &[Term], values: &[Element]) -> Formula {
    let mut lits = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let eq = Formula::eq(terms[i].clone(), terms[j].clone());
            lits.push(if values[i] == values[j] { eq } else { Formula::not(eq) });
        }
    }
    for (r, sym) in s.vocab().relations().iter().enumerate() {
        for idx in tuples(&(0..terms.len() as Element).collect::<Vec<_>>(), sym.arity) {
            let args: Vec<Term> = idx.iter().map(|&i| terms[i as usize].clone()).collect();
            let tuple: Vec<Element> = idx.iter().map(|&i| values[i as usize]).collect();
            let atom = Formula::atom(sym.name.clone(), args);
            lits.push(if s.holds(r, &tuple) { atom } else { Formula::not(atom) });
        }
    }
    Formula::conj(lits)
}

/// An `exists^k forall^n` sentence true in `A` and false in every target,
/// read off a Spoiler certificate: with `x` bound to the Spoiler's opening, every `y`
/// realises one of the atomic types that `(a, f)` realises in `A`.
pub fn separating_sentence(
    a_s: &Structure,
    cfg: &GameConfig,
    outcome: &GameOutcome,
) -> Result<Formula, GameError> {
    let a = match &outcome.certificate {
        Some(Certificate::Spoiler { a, .. }) => a,
        Some(_) => return Err(GameError::NotASpoilerWin),
        None => return Err(GameError::MissingCertificate),
    };
    let xs: Vec<String> = (1..=cfg.k).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=cfg.n).map(|i| format!("y{i}")).collect();
    let mut terms: Vec<Term> = xs.iter().chain(&ys).map(|v| Term::var(v.clone())).collect();
    terms.extend(a_s.vocab().constants().iter().map(|c| Term::cst(c.clone())));
    let mut seen = HashSet::new();
    let mut types = Vec::new();
    for f in tuples(a_s.universe(), cfg.n) {
        let mut values: Vec<Element> = a.iter().chain(&f).copied().collect();
        values.extend_from_slice(a_s.constants());
        let t = atomic_type(a_s, &terms, &values);
        if seen.insert(t.clone()) {
            types.push(t);
        }
    }
    let body = Formula::quantify_all(Quantifier::Forall, ys, Formula::disj(types));
    Ok(Formula::quantify_all(Quantifier::Exists, xs, body))
}

fn malformed(what: impl Into<String>) -> GameError {
    GameError::MalformedCertificate(what.into())
}

fn elements(s: &str) -> Result<Vec<Element>, GameError> {
    split_elements(s).ok_or_else(|| malformed(format!("bad element list `{s}`")))
}

fn target(s: &str) -> Result<usize, GameError> {
    s.parse().map_err(|_| malformed(format!("bad target `{s}`")))
}

impl GameOutcome {
    pub fn to_report(&self, cfg: &GameConfig) -> Report {
        let mut r = Report::new("game");
        r.push("k", cfg.k).push("n", cfg.n).push("budget", cfg.budget);
        r.push("winner", self.winner.as_str());
        r.push("positions", self.positions);
        match &self.certificate {
            None => {
                r.push("certificate", "none");
            }
            Some(Certificate::Spoiler { a, refutations }) => {
                r.push("certificate", "spoiler");
                r.push("opening", join_elements(a));
                for x in refutations {
                    r.push(
                        "refute",
                        format!("{};{};{}", x.target, join_elements(&x.b), join_elements(&x.e)),
                    );
                }
            }
            Some(Certificate::Duplicator { rows }) => {
                r.push("certificate", "duplicator");
                for row in rows {
                    let answers = match &row.answers {
                        None => "*".to_string(),
                        Some(fs) => fs.iter().map(|f| join_elements(f)).collect::<Vec<_>>().join(" "),
                    };
                    r.push(
                        "row",
                        format!(
                            "{};{};{};{}",
                            join_elements(&row.a),
                            row.target,
                            join_elements(&row.b),
                            answers
                        ),
                    );
                }
            }
        }
        r
    }

    /// Inverse of [`to_report`](Self::to_report).
    pub fn from_report(r: &Report) -> Result<(GameConfig, GameOutcome), GameError> {
        let num = |key: &str| -> Result<u64, GameError> {
            r.parse_value::<u64>(key).map_err(|e| malformed(e.to_string()))
        };
        if r.kind != "game" {
            return Err(malformed(format!("report kind `{}`", r.kind)));
        }
        let cfg = GameConfig {
            k: num("k")? as usize,
            n: num("n")? as usize,
            budget: num("budget")?,
        };
        let winner = match r.get("winner") {
            Some("duplicator") => Winner::Duplicator,
            Some("spoiler") => Winner::Spoiler,
            other => return Err(malformed(format!("winner {other:?}"))),
        };
        let certificate = match r.get("certificate") {
            Some("none") | None => None,
            Some("spoiler") => {
                let a = elements(r.get("opening").ok_or_else(|| malformed("missing opening"))?)?;
                let refutations = r
                    .get_all("refute")
                    .map(|v| {
                        let parts: Vec<&str> = v.split(';').collect();
                        let [t, b, e] = parts[..] else {
                            return Err(malformed(v));
                        };
                        Ok(Refutation {
                            target: target(t)?,
                            b: elements(b)?,
                            e: elements(e)?,
                        })
                    })
                    .collect::<Result<_, GameError>>()?;
                Some(Certificate::Spoiler { a, refutations })
            }
            Some("duplicator") => {
                let rows = r
                    .get_all("row")
                    .map(|v| {
                        let parts: Vec<&str> = v.split(';').collect();
                        let [a, t, b, fs] = parts[..] else {
                            return Err(malformed(v));
                        };
                        let answers = if fs == "*" {
                            None
                        } else {
                            Some(fs.split(' ').filter(|s| !s.is_empty()).map(elements).collect::<Result<_, _>>()?)
                        };
                        Ok(StrategyRow {
                            a: elements(a)?,
                            target: target(t)?,
                            b: elements(b)?,
                            answers,
                        })
                    })
                    .collect::<Result<_, GameError>>()?;
                Some(Certificate::Duplicator { rows })
            }
            Some(other) => return Err(malformed(format!("certificate kind `{other}`"))),
        };
        Ok((
            cfg,
            GameOutcome {
                winner,
                certificate,
                positions: num("positions")?,
            },
        ))
    }
}
