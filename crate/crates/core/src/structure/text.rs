//! The plain-text structure format.
//!
//! ```text
//! vocab Leq/2 S/2 P/1 ; c d
//! universe 4
//! rel Leq: (1,1) (1,2) ...
//! rel P: (3)
//! const c = 1
//! ```
//!
//! Elements are `1..=N`. `#` starts a comment. Tokens may be separated by any
//! whitespace, including newlines. Relations that are never listed are empty.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use super::{Element, Structure, StructureBuilder, StructureError, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("universe is not 1..={0}; compact the structure before export")]
    NonContiguousUniverse(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Punct(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, TextError> {
    let mut out = Vec::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = lineno + 1;
        let text = raw.split('#').next().unwrap_or("");
        let mut chars = text.char_indices().peekable();
        while let Some(&(i, ch)) = chars.peek() {
            if ch.is_whitespace() {
                chars.next();
            } else if ch.is_ascii_digit() {
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    end = j + c.len_utf8();
                    chars.next();
                }
                let n = text[i..end].parse().map_err(|_| TextError::Syntax {
                    line,
                    message: format!("number `{}` out of range", &text[i..end]),
                })?;
                out.push((Tok::Num(n), line));
            } else if ch.is_alphabetic() || ch == '_' {
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if !(c.is_alphanumeric() || c == '_' || c == '\'') {
                        break;
                    }
                    end = j + c.len_utf8();
                    chars.next();
                }
                out.push((Tok::Ident(text[i..end].to_string()), line));
            } else if "/;:(),=".contains(ch) {
                out.push((Tok::Punct(ch), line));
                chars.next();
            } else {
                return Err(TextError::Syntax {
                    line,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, TextError> {
        Err(TextError::Syntax {
            line: self.line(),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn ident(&mut self, what: &str) -> Result<String, TextError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.pos -= 1;
                self.err(format!("expected {what}"))
            }
        }
    }

    fn num(&mut self, what: &str) -> Result<u64, TextError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(n),
            _ => {
                self.pos -= 1;
                self.err(format!("expected {what}"))
            }
        }
    }

    fn punct(&mut self, c: char) -> Result<(), TextError> {
        match self.next() {
            Some(Tok::Punct(p)) if p == c => Ok(()),
            _ => {
                self.pos -= 1;
                self.err(format!("expected `{c}`"))
            }
        }
    }

    fn at_keyword(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(k)) if k == "rel" || k == "const")
    }
}

fn element(n: u64, size: u64, c: &Cursor) -> Result<Element, TextError> {
    if n == 0 || n > size {
        return c.err(format!("element {n} outside 1..={size}"));
    }
    Ok(n as Element)
}

/// Parses a structure in the text format.
pub fn parse_structure(src: &str) -> Result<Structure, TextError> {
    let mut c = Cursor {
        toks: tokenize(src)?,
        pos: 0,
    };
    if c.ident("`vocab`")? != "vocab" {
        c.pos -= 1;
        return c.err("expected `vocab`");
    }
    let mut relations = Vec::new();
    while matches!(c.peek(), Some(Tok::Ident(k)) if k != "universe") {
        let name = c.ident("relation name")?;
        c.punct('/')?;
        let arity = c.num("arity")? as usize;
        relations.push((name, arity));
    }
    // The `;` may be left out when there are no constants.
    let mut constants = Vec::new();
    if c.peek() == Some(&Tok::Punct(';')) {
        c.next();
        while matches!(c.peek(), Some(Tok::Ident(k)) if k != "universe") {
            constants.push(c.ident("constant name")?);
        }
    }
    let vocab = Arc::new(Vocabulary::new(relations, constants)?);

    if c.ident("`universe`")? != "universe" {
        c.pos -= 1;
        return c.err("expected `universe`");
    }
    let size = c.num("universe size")?;
    if size == 0 {
        return Err(StructureError::EmptyUniverse.into());
    }
    if size > Element::MAX as u64 {
        return c.err("universe too large");
    }
    let mut b = StructureBuilder::new(vocab.clone(), 1..=size as Element);

    while let Some(tok) = c.peek().cloned() {
        match tok {
            Tok::Ident(k) if k == "rel" => {
                c.next();
                let name = c.ident("relation name")?;
                let Some(arity) = vocab.arity(&name) else {
                    return c.err(format!("unknown relation `{name}`"));
                };
                c.punct(':')?;
                while !c.at_keyword() && c.peek().is_some() {
                    c.punct('(')?;
                    let mut tuple = Vec::with_capacity(arity);
                    loop {
                        let n = c.num("element")?;
                        tuple.push(element(n, size, &c)?);
                        if c.peek() == Some(&Tok::Punct(',')) {
                            c.next();
                        } else {
                            break;
                        }
                    }
                    c.punct(')')?;
                    if tuple.len() != arity {
                        return c.err(format!(
                            "tuple of `{name}` has {} entries, expected {arity}",
                            tuple.len()
                        ));
                    }
                    b.add_tuple(&name, &tuple);
                }
            }
            Tok::Ident(k) if k == "const" => {
                c.next();
                let name = c.ident("constant name")?;
                if vocab.constant_index(&name).is_none() {
                    return c.err(format!("unknown constant `{name}`"));
                }
                c.punct('=')?;
                let n = c.num("element")?;
                let e = element(n, size, &c)?;
                b.set_constant(&name, e);
            }
            _ => return c.err("expected `rel` or `const`"),
        }
    }
    Ok(b.build()?)
}

impl Structure {
    /// Renders the structure in the text format; the universe must be `1..=N`.
    pub fn to_text(&self) -> Result<String, TextError> {
        let n = self.size();
        if self.universe().iter().enumerate().any(|(i, &e)| e as usize != i + 1) {
            return Err(TextError::NonContiguousUniverse(n));
        }
        let mut out = String::new();
        writeln!(out, "{}", self.vocab()).unwrap();
        writeln!(out, "universe {n}").unwrap();
        for (sym, rel) in self.vocab().relations().iter().zip(self.relations()) {
            write!(out, "rel {}:", sym.name).unwrap();
            for t in rel.tuples() {
                let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                write!(out, " ({})", parts.join(",")).unwrap();
            }
            out.push('\n');
        }
        for (name, e) in self.vocab().constants().iter().zip(self.constants()) {
            writeln!(out, "const {name} = {e}").unwrap();
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# a three-element chain
vocab Leq/2 P/1 ; c
universe 3
rel Leq: (1,1) (1,2) (1,3)
         (2,2) (2,3) (3,3)
rel P: ( 2 )
const c = 1
";

    #[test]
    fn parses_sample() {
        let s = parse_structure(SAMPLE).unwrap();
        assert_eq!(s.size(), 3);
        assert_eq!(s.relation_named("Leq").unwrap().len(), 6);
        assert!(s.relation_named("P").unwrap().contains(&[2]));
        assert_eq!(s.constant_named("c"), Some(1));
    }

    #[test]
    fn round_trip() {
        let s = parse_structure(SAMPLE).unwrap();
        let text = s.to_text().unwrap();
        assert_eq!(parse_structure(&text).unwrap(), s);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = "vocab P/1 ;\nuniverse 2\nrel P: (3)\n";
        match parse_structure(bad) {
            Err(TextError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let bad = "vocab E/2 ;\nuniverse 2\nrel E: (1)\n";
        assert!(matches!(parse_structure(bad), Err(TextError::Syntax { line: 3, .. })));
        let bare = parse_structure("vocab E/2\nuniverse 2\nrel E: (1,2)\n").unwrap();
        assert_eq!(bare, parse_structure("vocab E/2 ;\nuniverse 2\nrel E: (1,2)\n").unwrap());
        let missing = "vocab P/1 ; c\nuniverse 2\n";
        assert_eq!(
            parse_structure(missing),
            Err(TextError::Structure(StructureError::UninterpretedConstant("c".into())))
        );
    }

    #[test]
    fn export_requires_contiguous_universe() {
        let s = parse_structure(SAMPLE).unwrap();
        let sub = s.induced_substructure(&[1, 3]).unwrap();
        assert_eq!(sub.to_text(), Err(TextError::NonContiguousUniverse(2)));
        assert!(sub.compacted().to_text().is_ok());
    }
}
