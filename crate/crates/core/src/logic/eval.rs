//! Tarskian satisfaction over finite structures.
//!
//! [`CompiledFormula`] resolves symbols to indices once, puts the formula in
//! negation normal form with one slot per bound variable, and pushes
//! quantifiers inward past subformulas that do not mention the bound
//! variable. The rewrite is equivalence-preserving on non-empty universes and
//! turns most prenex sentences from `|U|^depth` loops into nested small ones.
//! [`evaluate_naive`] walks the syntax tree directly and serves as the oracle.

use std::collections::BTreeMap;

use super::{Formula, LogicError, Term};
use crate::structure::{Element, Structure, Vocabulary};

/// Values of free variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, Element>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, e: Element) -> Self {
        self.0.insert(var.into(), e);
        self
    }

    pub fn set(&mut self, var: impl Into<String>, e: Element) {
        self.0.insert(var.into(), e);
    }

    pub fn get(&self, var: &str) -> Option<Element> {
        self.0.get(var).copied()
    }
}

impl<S: Into<String>> FromIterator<(S, Element)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, Element)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arg {
    Slot(usize),
    Const(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Lit(bool),
    Atom {
        rel: usize,
        args: Vec<Arg>,
        positive: bool,
    },
    Eq {
        a: Arg,
        b: Arg,
        positive: bool,
    },
    And(Vec<Node>),
    Or(Vec<Node>),
    Forall(usize, Box<Node>),
    Exists(usize, Box<Node>),
}

type Mask = u128;
const MASK_BITS: usize = 128;

fn bit(slot: usize) -> Mask {
    if slot < MASK_BITS {
        1 << slot
    } else {
        0
    }
}

impl Node {
    fn free(&self) -> Mask {
        let arg = |a: &Arg| match a {
            Arg::Slot(s) => bit(*s),
            Arg::Const(_) => 0,
        };
        match self {
            Node::Lit(_) => 0,
            Node::Atom { args, .. } => args.iter().map(arg).fold(0, |m, b| m | b),
            Node::Eq { a, b, .. } => arg(a) | arg(b),
            Node::And(cs) | Node::Or(cs) => cs.iter().fold(0, |m, c| m | c.free()),
            Node::Forall(s, b) | Node::Exists(s, b) => b.free() & !bit(*s),
        }
    }

    fn weight(&self) -> usize {
        match self {
            Node::Lit(_) | Node::Atom { .. } | Node::Eq { .. } => 0,
            Node::And(cs) | Node::Or(cs) => cs.iter().map(Node::weight).max().unwrap_or(0),
            Node::Forall(_, b) | Node::Exists(_, b) => 1 + b.weight(),
        }
    }
}

fn and(children: Vec<Node>) -> Node {
    let mut flat = Vec::new();
    for c in children {
        match c {
            Node::Lit(true) => {}
            Node::Lit(false) => return Node::Lit(false),
            Node::And(cs) => flat.extend(cs),
            c => flat.push(c),
        }
    }
    match flat.len() {
        0 => Node::Lit(true),
        1 => flat.pop().unwrap(),
        _ => Node::And(flat),
    }
}

fn or(children: Vec<Node>) -> Node {
    let mut flat = Vec::new();
    for c in children {
        match c {
            Node::Lit(false) => {}
            Node::Lit(true) => return Node::Lit(true),
            Node::Or(cs) => flat.extend(cs),
            c => flat.push(c),
        }
    }
    match flat.len() {
        0 => Node::Lit(false),
        1 => flat.pop().unwrap(),
        _ => Node::Or(flat),
    }
}

struct Compiler<'v> {
    vocab: &'v Vocabulary,
    scope: Vec<(String, usize)>,
    slots: Vec<String>,
    free: Vec<(String, usize)>,
}

impl Compiler<'_> {
    fn new_slot(&mut self, name: &str) -> usize {
        self.slots.push(name.to_string());
        self.slots.len() - 1
    }

    fn arg(&mut self, t: &Term) -> Result<Arg, LogicError> {
        match t {
            Term::Const(c) => self
                .vocab
                .constant_index(c)
                .map(Arg::Const)
                .ok_or_else(|| LogicError::UnknownSymbol(c.clone())),
            Term::Var(v) => {
                if let Some(&(_, s)) = self.scope.iter().rev().find(|(n, _)| n == v) {
                    return Ok(Arg::Slot(s));
                }
                if let Some(&(_, s)) = self.free.iter().find(|(n, _)| n == v) {
                    return Ok(Arg::Slot(s));
                }
                let s = self.new_slot(v);
                self.free.push((v.clone(), s));
                Ok(Arg::Slot(s))
            }
        }
    }

    fn nnf(&mut self, f: &Formula, positive: bool) -> Result<Node, LogicError> {
        Ok(match f {
            Formula::True => Node::Lit(positive),
            Formula::False => Node::Lit(!positive),
            Formula::Atom(r, ts) => {
                let rel = self
                    .vocab
                    .relation_index(r)
                    .ok_or_else(|| LogicError::UnknownSymbol(r.clone()))?;
                let arity = self.vocab.relations()[rel].arity;
                if arity != ts.len() {
                    return Err(LogicError::Arity {
                        symbol: r.clone(),
                        expected: arity,
                        got: ts.len(),
                    });
                }
                let args = ts.iter().map(|t| self.arg(t)).collect::<Result<_, _>>()?;
                Node::Atom {
                    rel,
                    args,
                    positive,
                }
            }
            Formula::Eq(a, b) => Node::Eq {
                a: self.arg(a)?,
                b: self.arg(b)?,
                positive,
            },
            Formula::Not(g) => self.nnf(g, !positive)?,
            Formula::And(a, b) | Formula::Or(a, b) => {
                let l = self.nnf(a, positive)?;
                let r = self.nnf(b, positive)?;
                if matches!(f, Formula::And(..)) == positive {
                    and(vec![l, r])
                } else {
                    or(vec![l, r])
                }
            }
            Formula::Implies(a, b) => {
                let l = self.nnf(a, !positive)?;
                let r = self.nnf(b, positive)?;
                if positive {
                    or(vec![l, r])
                } else {
                    and(vec![l, r])
                }
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let slot = self.new_slot(v);
                self.scope.push((v.clone(), slot));
                let body = self.nnf(g, positive);
                self.scope.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::Forall(..)) == positive {
                    Node::Forall(slot, body)
                } else {
                    Node::Exists(slot, body)
                }
            }
        })
    }
}

/// Pushes quantifiers toward the leaves. Children are miniscoped first.
fn miniscope(node: Node) -> Node {
    match node {
        Node::And(cs) => and(cs.into_iter().map(miniscope).collect()),
        Node::Or(cs) => or(cs.into_iter().map(miniscope).collect()),
        Node::Forall(s, b) => push_quantifier(true, s, miniscope(*b)),
        Node::Exists(s, b) => push_quantifier(false, s, miniscope(*b)),
        n => n,
    }
}

fn push_quantifier(universal: bool, slot: usize, body: Node) -> Node {
    let m = bit(slot);
    if body.free() & m == 0 {
        // non-empty universe
        return body;
    }
    let wrap = |b: Node| {
        if universal {
            Node::Forall(slot, Box::new(b))
        } else {
            Node::Exists(slot, Box::new(b))
        }
    };
    match body {
        // forall distributes over and, exists over or
        Node::And(cs) if universal => and(cs
            .into_iter()
            .map(|c| push_quantifier(true, slot, c))
            .collect()),
        Node::Or(cs) if !universal => or(cs
            .into_iter()
            .map(|c| push_quantifier(false, slot, c))
            .collect()),
        Node::And(cs) | Node::Or(cs) => {
            let is_and = !universal;
            let (mut dep, indep): (Vec<Node>, Vec<Node>) = cs.into_iter().partition(|c| c.free() & m != 0);
            let mut parts = indep;
            if dep.len() == 1 {
                // a lone dependent child may still split further
                parts.push(push_quantifier(universal, slot, dep.pop().unwrap()));
            } else {
                parts.push(wrap(if is_and { and(dep) } else { or(dep) }));
            }
            if is_and {
                and(parts)
            } else {
                or(parts)
            }
        }
        b => wrap(b),
    }
}

fn order_children(node: &mut Node) {
    match node {
        Node::And(cs) | Node::Or(cs) => {
            cs.iter_mut().for_each(order_children);
            cs.sort_by_key(Node::weight);
        }
        Node::Forall(_, b) | Node::Exists(_, b) => order_children(b),
        _ => {}
    }
}

/// A formula prepared for repeated evaluation over structures of one vocabulary.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    root: Node,
    slot_count: usize,
    free: Vec<(String, usize)>,
}

impl CompiledFormula {
    pub fn new(f: &Formula, vocab: &Vocabulary) -> Result<Self, LogicError> {
        let mut c = Compiler {
            vocab,
            scope: Vec::new(),
            slots: Vec::new(),
            free: Vec::new(),
        };
        let root = c.nnf(f, true)?;
        let mut root = if c.slots.len() <= MASK_BITS {
            miniscope(root)
        } else {
            root
        };
        order_children(&mut root);
        Ok(CompiledFormula {
            root,
            slot_count: c.slots.len(),
            free: c.free,
        })
    }

    pub fn free_vars(&self) -> impl Iterator<Item = &str> {
        self.free.iter().map(|(n, _)| n.as_str())
    }

    pub fn is_sentence(&self) -> bool {
        self.free.is_empty()
    }

    pub fn eval(&self, s: &Structure, a: &Assignment) -> Result<bool, LogicError> {
        let mut env = vec![0; self.slot_count];
        for (name, slot) in &self.free {
            let e = a
                .get(name)
                .ok_or_else(|| LogicError::UnboundVariable(name.clone()))?;
            if !s.contains(e) {
                return Err(LogicError::NotInUniverse(name.clone()));
            }
            env[*slot] = e;
        }
        let mut scratch = Vec::new();
        Ok(run(&self.root, s, &mut env, &mut scratch))
    }

    /// Truth value of a sentence; `Err` if the formula has free variables.
    pub fn holds(&self, s: &Structure) -> Result<bool, LogicError> {
        self.eval(s, &Assignment::new())
    }

    /// Like [`holds`](Self::holds) for callers that already know the formula is a sentence.
    pub fn check(&self, s: &Structure) -> bool {
        debug_assert!(self.is_sentence());
        let mut env = vec![0; self.slot_count];
        let mut scratch = Vec::new();
        run(&self.root, s, &mut env, &mut scratch)
    }
}

#[inline]
fn value(a: Arg, s: &Structure, env: &[Element]) -> Element {
    match a {
        Arg::Slot(i) => env[i],
        Arg::Const(c) => s.constant(c),
    }
}

fn run(node: &Node, s: &Structure, env: &mut [Element], scratch: &mut Vec<Element>) -> bool {
    match node {
        Node::Lit(b) => *b,
        Node::Atom {
            rel,
            args,
            positive,
        } => {
            scratch.clear();
            scratch.extend(args.iter().map(|&a| value(a, s, env)));
            s.holds(*rel, scratch) == *positive
        }
        Node::Eq { a, b, positive } => (value(*a, s, env) == value(*b, s, env)) == *positive,
        Node::And(cs) => cs.iter().all(|c| run(c, s, env, scratch)),
        Node::Or(cs) => cs.iter().any(|c| run(c, s, env, scratch)),
        Node::Forall(slot, body) => s.universe().iter().all(|&e| {
            env[*slot] = e;
            run(body, s, env, scratch)
        }),
        Node::Exists(slot, body) => s.universe().iter().any(|&e| {
            env[*slot] = e;
            run(body, s, env, scratch)
        }),
    }
}

/// `S ⊨ f[a]`.
pub fn evaluate(s: &Structure, f: &Formula, a: &Assignment) -> Result<bool, LogicError> {
    CompiledFormula::new(f, s.vocab())?.eval(s, a)
}

/// Truth value of a sentence.
pub fn evaluate_sentence(s: &Structure, f: &Formula) -> Result<bool, LogicError> {
    evaluate(s, f, &Assignment::new())
}

/// Direct structural recursion over the syntax tree, without any rewriting.
pub fn evaluate_naive(s: &Structure, f: &Formula, a: &Assignment) -> Result<bool, LogicError> {
    f.type_check(s.vocab())?;
    let mut env: Vec<(String, Element)> = a.0.iter().map(|(k, &v)| (k.clone(), v)).collect();
    if let Some((k, _)) = env.iter().find(|(_, e)| !s.contains(*e)) {
        return Err(LogicError::NotInUniverse(k.clone()));
    }
    naive(s, f, &mut env)
}

fn naive(s: &Structure, f: &Formula, env: &mut Vec<(String, Element)>) -> Result<bool, LogicError> {
    let term = |t: &Term, env: &Vec<(String, Element)>| -> Result<Element, LogicError> {
        match t {
            Term::Const(c) => Ok(s.constant_named(c).expect("type-checked")),
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|p| p.1)
                .ok_or_else(|| LogicError::UnboundVariable(v.clone())),
        }
    };
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(r, ts) => {
            let tuple = ts.iter().map(|t| term(t, env)).collect::<Result<Vec<_>, _>>()?;
            s.relation_named(r).expect("type-checked").contains(&tuple)
        }
        Formula::Eq(a, b) => term(a, env)? == term(b, env)?,
        Formula::Not(g) => !naive(s, g, env)?,
        Formula::And(a, b) => naive(s, a, env)? && naive(s, b, env)?,
        Formula::Or(a, b) => naive(s, a, env)? || naive(s, b, env)?,
        Formula::Implies(a, b) => !naive(s, a, env)? || naive(s, b, env)?,
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let universal = matches!(f, Formula::Forall(..));
            for &e in s.universe() {
                env.push((v.clone(), e));
                let r = naive(s, g, env);
                env.pop();
                if r? != universal {
                    return Ok(!universal);
                }
            }
            universal
        }
    })
}
