//! Recursive-descent parser for the formula syntax.
//!
//! ```text
//! imp   := or ( "->" imp )?
//! or    := and ( "|" and )*
//! and   := unary ( "&" unary )*
//! unary := "!" unary | ("forall" | "exists") ident+ "." imp | primary
//! primary := "true" | "false" | "(" imp ")" | ident "(" term,* ")" | term ("=" | "!=") term
//! ```

use std::collections::BTreeMap;

use super::{Formula, LogicError, Term};
use crate::structure::Vocabulary;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Arrow,
    Bang,
    Eq,
    Neq,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Neq => "`!=`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, LogicError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'=' => Tok::Eq,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Neq
            }
            b'!' => Tok::Bang,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(LogicError::Syntax {
                    pos: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

const KEYWORDS: [&str; 4] = ["forall", "exists", "true", "false"];

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vocab: Option<&'v Vocabulary>,
    inferred: BTreeMap<String, usize>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Syntax {
            pos: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), LogicError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", describe(&t), describe(self.peek())))
        }
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let mut vars = Vec::new();
                while let Tok::Ident(v) = self.peek().clone() {
                    if KEYWORDS.contains(&v.as_str()) || self.is_constant(&v) {
                        return self.error(format!("`{v}` cannot be bound"));
                    }
                    self.bump();
                    vars.push(v);
                }
                if vars.is_empty() {
                    return self.error("expected a variable after quantifier");
                }
                self.expect(Tok::Dot)?;
                let body = self.implication()?;
                let q = if kw == "forall" {
                    super::Quantifier::Forall
                } else {
                    super::Quantifier::Exists
                };
                Ok(Formula::quantify_all(q, vars, body))
            }
            _ => self.primary(),
        }
    }

    fn is_constant(&self, name: &str) -> bool {
        self.vocab.is_some_and(|v| v.constant_index(name).is_some())
    }

    fn is_relation(&self, name: &str) -> bool {
        match self.vocab {
            Some(v) => v.relation_index(name).is_some(),
            None => self.inferred.contains_key(name),
        }
    }

    fn primary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(k) if k == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) if self.toks[self.pos + 1].0 == Tok::LParen => {
                self.bump();
                self.atom(name)
            }
            Tok::Ident(_) => {
                let a = self.term()?;
                let at = self.pos;
                let negated = match self.bump() {
                    Tok::Eq => false,
                    Tok::Neq => true,
                    other => {
                        self.pos = at;
                        return self.error(format!("expected `=` or `!=`, found {}", describe(&other)));
                    }
                };
                let b = self.term()?;
                let eq = Formula::eq(a, b);
                Ok(if negated { Formula::not(eq) } else { eq })
            }
            other => self.error(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn atom(&mut self, name: String) -> Result<Formula, LogicError> {
        let at = self.toks[self.pos - 1].1;
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let expected = match self.vocab {
            Some(v) => v
                .arity(&name)
                .ok_or_else(|| LogicError::UnknownSymbol(name.clone()))?,
            None => {
                if args.is_empty() {
                    return Err(LogicError::Syntax {
                        pos: at,
                        message: format!("relation `{name}` needs arguments"),
                    });
                }
                *self.inferred.entry(name.clone()).or_insert(args.len())
            }
        };
        if expected != args.len() {
            return Err(LogicError::Arity {
                symbol: name,
                expected,
                got: args.len(),
            });
        }
        Ok(Formula::atom(name, args))
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                if self.is_relation(&name) {
                    return self.error(format!("relation `{name}` used as a term"));
                }
                self.bump();
                Ok(if self.is_constant(&name) {
                    Term::Const(name)
                } else {
                    Term::Var(name)
                })
            }
            other => self.error(format!("expected a term, found {}", describe(&other))),
        }
    }
}

fn run(src: &str, vocab: Option<&Vocabulary>) -> Result<(Formula, BTreeMap<String, usize>), LogicError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vocab,
        inferred: BTreeMap::new(),
    };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok((f, p.inferred))
}

/// Parses and type-checks a formula against `vocab`. Identifiers that name a
/// constant of `vocab` are constants; every other term identifier is a variable.
pub fn parse(src: &str, vocab: &Vocabulary) -> Result<Formula, LogicError> {
    run(src, Some(vocab)).map(|(f, _)| f)
}

/// Parses a formula without a vocabulary, inferring relation arities from use.
/// The inferred vocabulary has no constants.
pub fn parse_inferring_vocab(src: &str) -> Result<(Formula, Vocabulary), LogicError> {
    let (f, rels) = run(src, None)?;
    let vocab = Vocabulary::new(rels, Vec::<String>::new())
        .map_err(|e| LogicError::UnknownSymbol(e.to_string()))?;
    Ok((f, vocab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{classify_prefix, Quantifier};

    fn tau() -> Vocabulary {
        Vocabulary::of(&[("Leq", 2), ("S", 2), ("P", 1)], &["c", "d"])
    }

    #[test]
    fn parses_universal_with_constant() {
        let f = parse("forall x. forall y. (S(x,y) -> !(y = c))", &tau()).unwrap();
        let expected = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::implies(
                    Formula::atom("S", vec![Term::var("x"), Term::var("y")]),
                    Formula::not(Formula::eq(Term::var("y"), Term::cst("c"))),
                ),
            ),
        );
        assert_eq!(f, expected);
        let p = classify_prefix(&f).unwrap();
        assert_eq!(p.blocks, vec![(Quantifier::Forall, 2)]);
    }

    #[test]
    fn parses_dominating_set_k1() {
        let g = Vocabulary::of(&[("E", 2)], &[]);
        let f = parse("exists x1. forall y. (y = x1 | E(y,x1))", &g).unwrap();
        assert!(f.is_sentence());
        assert_eq!(
            classify_prefix(&f).unwrap().blocks,
            vec![(Quantifier::Exists, 1), (Quantifier::Forall, 1)]
        );
    }

    #[test]
    fn arity_and_unknown_symbol_errors() {
        assert_eq!(
            parse("P(x,y)", &tau()),
            Err(LogicError::Arity {
                symbol: "P".into(),
                expected: 1,
                got: 2
            })
        );
        assert_eq!(parse("Q(x)", &tau()), Err(LogicError::UnknownSymbol("Q".into())));
    }

    #[test]
    fn syntax_error_positions() {
        match parse("forall x P(x)", &tau()) {
            Err(LogicError::Syntax { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("{other:?}"),
        }
        match parse("P(x) &", &tau()) {
            Err(LogicError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("P(x) $ P(y)", &tau()), Err(LogicError::Syntax { pos: 5, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        let v = Vocabulary::of(&[("A", 1), ("B", 1), ("C", 1)], &[]);
        let a = || Formula::atom("A", vec![Term::var("x")]);
        let b = || Formula::atom("B", vec![Term::var("x")]);
        let c = || Formula::atom("C", vec![Term::var("x")]);
        assert_eq!(
            parse("!A(x) & B(x) | C(x)", &v).unwrap(),
            Formula::or(Formula::and(Formula::not(a()), b()), c())
        );
        assert_eq!(
            parse("A(x) -> B(x) -> C(x)", &v).unwrap(),
            Formula::implies(a(), Formula::implies(b(), c()))
        );
        // quantifier bodies extend as far right as possible
        assert_eq!(
            parse("A(x) & forall x. B(x) | C(x)", &v).unwrap(),
            Formula::and(a(), Formula::forall("x", Formula::or(b(), c())))
        );
        assert_eq!(
            parse("x != y", &v).unwrap(),
            Formula::neq(Term::var("x"), Term::var("y"))
        );
    }

    #[test]
    fn inferred_vocabulary() {
        let (f, v) = parse_inferring_vocab("exists x. P(x) & forall y. E(x, y)").unwrap();
        assert!(f.is_sentence());
        assert_eq!(v.arity("P"), Some(1));
        assert_eq!(v.arity("E"), Some(2));
        assert!(matches!(
            parse_inferring_vocab("P(x) & P(x, y)"),
            Err(LogicError::Arity { .. })
        ));
    }
}
