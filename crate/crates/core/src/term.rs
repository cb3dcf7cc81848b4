//! Signatures, term syntax, parsing/printing and substitution.
//!
//! Terms are plain trees over named variables. No simplification happens
//! here: every engine owns its own normal forms, so parsing and printing
//! stay bit-stable.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::TermError;
use crate::Rational;

/// The varieties supported by the library, each with a fixed signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signature {
    /// Lattices: `∧`, `∨`.
    Lat,
    /// Distributive lattices: same symbols as [`Signature::Lat`].
    DLat,
    /// Semigroups: `·`.
    Sgrp,
    /// Groups: `·`, `⁻¹`, `e`.
    Grp,
    /// Abelian ℓ-groups: `∧`, `∨`, `+`, `−`, `0`.
    Abl,
    /// Vector spaces over ℚ: `+`, `−`, `0` and one scalar per rational.
    VecQ,
}

impl Signature {
    pub const ALL: [Signature; 6] = [
        Signature::Lat,
        Signature::DLat,
        Signature::Sgrp,
        Signature::Grp,
        Signature::Abl,
        Signature::VecQ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Signature::Lat => "LAT",
            Signature::DLat => "DLAT",
            Signature::Sgrp => "SGRP",
            Signature::Grp => "GRP",
            Signature::Abl => "ABL",
            Signature::VecQ => "VECQ",
        }
    }

    pub fn from_name(name: &str) -> Option<Signature> {
        Signature::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Operation symbols with their arities. Scalars of `VECQ` are listed
    /// once, with `q = 1` as a representative.
    pub fn ops(self) -> Vec<(Op, usize)> {
        let ops = match self {
            Signature::Lat | Signature::DLat => vec![Op::Meet, Op::Join],
            Signature::Sgrp => vec![Op::Mul],
            Signature::Grp => vec![Op::Mul, Op::Inv, Op::Unit],
            Signature::Abl => vec![Op::Meet, Op::Join, Op::Add, Op::Neg, Op::Zero],
            Signature::VecQ => vec![
                Op::Add,
                Op::Neg,
                Op::Zero,
                Op::Scale(Rational::from_integer(BigInt::from(1))),
            ],
        };
        ops.into_iter()
            .map(|op| {
                let arity = op.arity();
                (op, arity)
            })
            .collect()
    }

    pub fn contains(self, op: &Op) -> bool {
        match op {
            Op::Scale(_) => self == Signature::VecQ,
            _ => self.ops().iter().any(|(o, _)| o == op),
        }
    }

    /// Whether `s <= t` notation is available (the signature contains `∧`).
    pub fn has_order(self) -> bool {
        matches!(self, Signature::Lat | Signature::DLat | Signature::Abl)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// An operation symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Meet,
    Join,
    Mul,
    Inv,
    Unit,
    Add,
    Neg,
    Zero,
    Scale(Rational),
}

impl Op {
    pub fn arity(&self) -> usize {
        match self {
            Op::Meet | Op::Join | Op::Mul | Op::Add => 2,
            Op::Inv | Op::Neg | Op::Scale(_) => 1,
            Op::Unit | Op::Zero => 0,
        }
    }

    /// Mathematical symbol, used in error messages.
    pub fn symbol(&self) -> String {
        match self {
            Op::Meet => "∧".into(),
            Op::Join => "∨".into(),
            Op::Mul => "·".into(),
            Op::Inv => "⁻¹".into(),
            Op::Unit => "e".into(),
            Op::Add => "+".into(),
            Op::Neg => "−".into(),
            Op::Zero => "0".into(),
            Op::Scale(q) => format!("{q}·"),
        }
    }
}

/// A term over named variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(Op, Vec<Term>),
}

pub type Substitution = BTreeMap<String, Term>;

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::App(Op::Meet, vec![a, b])
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::App(Op::Join, vec![a, b])
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::App(Op::Mul, vec![a, b])
    }

    pub fn inv(a: Term) -> Term {
        Term::App(Op::Inv, vec![a])
    }

    pub fn unit() -> Term {
        Term::App(Op::Unit, vec![])
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::App(Op::Add, vec![a, b])
    }

    pub fn neg(a: Term) -> Term {
        Term::App(Op::Neg, vec![a])
    }

    pub fn zero() -> Term {
        Term::App(Op::Zero, vec![])
    }

    pub fn scale(q: Rational, a: Term) -> Term {
        Term::App(Op::Scale(q), vec![a])
    }

    /// Left-associated fold of `op` over `items`; `None` when empty.
    pub fn fold(op: Op, items: impl IntoIterator<Item = Term>) -> Option<Term> {
        items
            .into_iter()
            .reduce(|acc, t| Term::App(op.clone(), vec![acc, t]))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Homomorphic replacement of variables; unmapped variables are kept.
    pub fn subst(&self, map: &Substitution) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(op, args) => {
                Term::App(op.clone(), args.iter().map(|a| a.subst(map)).collect())
            }
        }
    }

    /// Checks that every symbol belongs to `sig` with the right arity.
    pub fn check_signature(&self, sig: Signature) -> Result<(), TermError> {
        match self {
            Term::Var(name) => {
                if valid_identifier(name) {
                    Ok(())
                } else {
                    Err(TermError::BadVariable(name.clone()))
                }
            }
            Term::App(op, args) => {
                if !sig.contains(op) {
                    return Err(TermError::SignatureMismatch {
                        symbol: op.symbol(),
                        signature: sig,
                    });
                }
                if args.len() != op.arity() {
                    return Err(TermError::ArityMismatch {
                        symbol: op.symbol(),
                        expected: op.arity(),
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check_signature(sig))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_term(self))
    }
}

/// `s ≈ t` or the sugared `s ≤ t` (meaning `s ∧ t ≈ s`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Eq,
    Leq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub relation: Relation,
}

impl Equation {
    pub fn eq(lhs: Term, rhs: Term) -> Equation {
        Equation {
            lhs,
            rhs,
            relation: Relation::Eq,
        }
    }

    pub fn leq(lhs: Term, rhs: Term) -> Equation {
        Equation {
            lhs,
            rhs,
            relation: Relation::Leq,
        }
    }

    /// The plain equation this stands for: `s ≤ t` becomes `s ∧ t ≈ s`.
    /// Inverse of [`Equation::desugar`] where the shape allows: `s ∧ t ≈ s`
    /// and `s ∨ t ≈ t` become `s ≤ t`.
    pub fn resugar(&self) -> Equation {
        if self.relation == Relation::Leq {
            return self.clone();
        }
        for (side, other) in [(&self.lhs, &self.rhs), (&self.rhs, &self.lhs)] {
            if let Term::App(op @ (Op::Meet | Op::Join), args) = side {
                let (a, b) = (&args[0], &args[1]);
                // x is the side equal to `other`.
                let hit = |x: &Term, y: &Term| match op {
                    Op::Meet => Equation::leq(x.clone(), y.clone()),
                    _ => Equation::leq(y.clone(), x.clone()),
                };
                if a == other {
                    return hit(a, b);
                }
                if b == other {
                    return hit(b, a);
                }
            }
        }
        self.clone()
    }

    pub fn desugar(&self) -> Equation {
        match self.relation {
            Relation::Eq => self.clone(),
            Relation::Leq => Equation::eq(
                Term::meet(self.lhs.clone(), self.rhs.clone()),
                self.lhs.clone(),
            ),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        let mut out = self.lhs.free_vars();
        for v in self.rhs.free_vars() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn subst(&self, map: &Substitution) -> Equation {
        Equation {
            lhs: self.lhs.subst(map),
            rhs: self.rhs.subst(map),
            relation: self.relation,
        }
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }

    pub fn check_signature(&self, sig: Signature) -> Result<(), TermError> {
        if self.relation == Relation::Leq && !sig.has_order() {
            return Err(TermError::OrderUnavailable(sig));
        }
        self.lhs.check_signature(sig)?;
        self.rhs.check_signature(sig)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_equation(self))
    }
}

impl Serialize for Equation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_equation(self))
    }
}

/// Name of the `i`-th witness variable (1-based): `y1`, `y2`, ...
pub fn witness_var(i: usize) -> String {
    format!("y{i}")
}

/// Whether `name` is reserved for witness variables (`y` followed by digits).
pub fn is_witness_var(name: &str) -> bool {
    witness_index(name).is_some()
}

/// The index `k` of a witness variable `yk`.
pub fn witness_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('y')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// The variables `y1, ..., yn` as terms.
pub fn witness_vars(n: usize) -> Vec<Term> {
    (1..=n).map(|i| Term::Var(witness_var(i))).collect()
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "v"
}

/// Substitution with a signature check on every image term.
pub fn substitute(t: &Term, map: &Substitution, sig: Signature) -> Result<Term, TermError> {
    for image in map.values() {
        image.check_signature(sig)?;
    }
    Ok(t.subst(map))
}

/// Replaces `yi` by `terms[i-1]` on both sides of `eq`.
pub fn instantiate(eq: &Equation, terms: &[Term]) -> Result<Equation, TermError> {
    let mut map = Substitution::new();
    for v in eq.free_vars() {
        match witness_index(&v) {
            Some(k) if k >= 1 && k <= terms.len() => {
                map.insert(v, terms[k - 1].clone());
            }
            _ => {
                return Err(TermError::IndexOutOfRange {
                    var: v,
                    n: terms.len(),
                })
            }
        }
    }
    Ok(eq.subst(&map))
}

/// Variables of `t` in first-occurrence order.
pub fn free_vars(t: &Term) -> Vec<String> {
    t.free_vars()
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(Rational),
    Meet,
    InvPostfix,
    Join,
    Star,
    Plus,
    Minus,
    Pipe,
    LParen,
    RParen,
    Equals,
    LessEq,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(q) => format!("number `{q}`"),
            Tok::Meet => "`^`".into(),
            Tok::InvPostfix => "`^-1`".into(),
            Tok::Join => "`v`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Equals => "`=`".into(),
            Tok::LessEq => "`<=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, TermError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let skip_ws = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_whitespace() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'^' => {
                // `^-1` is postfix inversion; anything else is a meet.
                let j = skip_ws(i + 1);
                let mut inv_end = None;
                if j < bytes.len() && bytes[j] == b'-' {
                    let k = skip_ws(j + 1);
                    if k < bytes.len() && bytes[k] == b'1' {
                        let after = skip_ws(k + 1);
                        let next = bytes.get(after).copied();
                        let continues_number = matches!(next, Some(b'0'..=b'9' | b'/' | b'|'))
                            || matches!(bytes.get(k + 1), Some(b'0'..=b'9'));
                        if !continues_number {
                            inv_end = Some(k + 1);
                        }
                    }
                }
                match inv_end {
                    Some(end) => {
                        i = end;
                        Tok::InvPostfix
                    }
                    None => {
                        i += 1;
                        Tok::Meet
                    }
                }
            }
            b'*' => {
                i += 1;
                Tok::Star
            }
            b'+' => {
                i += 1;
                Tok::Plus
            }
            b'-' => {
                i += 1;
                Tok::Minus
            }
            b'|' => {
                i += 1;
                Tok::Pipe
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'=' => {
                i += 1;
                Tok::Equals
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::LessEq
                } else {
                    return Err(TermError::Syntax {
                        offset: i,
                        message: "expected `<=`".into(),
                    });
                }
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let numer: BigInt = text[i..j].parse().expect("digits");
                let mut denom = BigInt::from(1);
                if j < bytes.len() && bytes[j] == b'/' {
                    let k = j + 1;
                    let mut m = k;
                    while m < bytes.len() && bytes[m].is_ascii_digit() {
                        m += 1;
                    }
                    if m == k {
                        return Err(TermError::Syntax {
                            offset: j,
                            message: "expected denominator after `/`".into(),
                        });
                    }
                    denom = text[k..m].parse().expect("digits");
                    if denom.is_zero() {
                        return Err(TermError::Syntax {
                            offset: k,
                            message: "zero denominator".into(),
                        });
                    }
                    j = m;
                }
                i = j;
                Tok::Number(Rational::new(numer, denom))
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                i = j;
                if word == "v" {
                    Tok::Join
                } else {
                    Tok::Ident(word.to_string())
                }
            }
            _ => {
                return Err(TermError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                })
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: Signature,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, TermError> {
        Err(TermError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn require(&self, op: &Op, offset: usize) -> Result<(), TermError> {
        if self.sig.contains(op) {
            Ok(())
        } else {
            Err(TermError::UnknownSymbol {
                offset,
                symbol: op.symbol(),
                signature: self.sig,
            })
        }
    }

    fn binary_level(
        &mut self,
        tok: Tok,
        op: Op,
        next: fn(&mut Parser) -> Result<Term, TermError>,
    ) -> Result<Term, TermError> {
        let mut lhs = next(self)?;
        while *self.peek() == tok {
            let off = self.offset();
            self.require(&op, off)?;
            self.bump();
            let rhs = next(self)?;
            lhs = Term::App(op.clone(), vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn add(&mut self) -> Result<Term, TermError> {
        self.binary_level(Tok::Plus, Op::Add, Parser::join)
    }

    fn join(&mut self) -> Result<Term, TermError> {
        self.binary_level(Tok::Join, Op::Join, Parser::meet)
    }

    fn meet(&mut self) -> Result<Term, TermError> {
        self.binary_level(Tok::Meet, Op::Meet, Parser::mul)
    }

    fn mul(&mut self) -> Result<Term, TermError> {
        self.binary_level(Tok::Star, Op::Mul, Parser::unary)
    }

    fn unary(&mut self) -> Result<Term, TermError> {
        let off = self.offset();
        match self.peek().clone() {
            Tok::Minus => {
                if let (Tok::Number(q), Tok::Pipe) = (self.peek_at(1).clone(), self.peek_at(2)) {
                    self.require(&Op::Scale(q.clone()), off)?;
                    self.bump();
                    self.bump();
                    self.bump();
                    let arg = self.unary()?;
                    return Ok(Term::scale(-q, arg));
                }
                self.require(&Op::Neg, off)?;
                self.bump();
                let arg = self.unary()?;
                Ok(Term::neg(arg))
            }
            Tok::Number(q) if *self.peek_at(1) == Tok::Pipe => {
                self.require(&Op::Scale(q.clone()), off)?;
                self.bump();
                self.bump();
                let arg = self.unary()?;
                Ok(Term::scale(q, arg))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Term, TermError> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::InvPostfix {
            let off = self.offset();
            self.require(&Op::Inv, off)?;
            self.bump();
            t = Term::inv(t);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, TermError> {
        let off = self.offset();
        match self.bump() {
            Tok::Ident(name) => {
                if name == "e" && self.sig == Signature::Grp {
                    Ok(Term::unit())
                } else {
                    Ok(Term::Var(name))
                }
            }
            Tok::Number(q) => {
                if q.is_zero() {
                    self.require(&Op::Zero, off)?;
                    Ok(Term::zero())
                } else {
                    Err(TermError::Syntax {
                        offset: off,
                        message: format!("numeric literal `{q}` must be a scalar prefix `{q}|`"),
                    })
                }
            }
            Tok::LParen => {
                let t = self.add()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax(format!("expected `)`, found {}", self.peek().describe()));
                }
                self.bump();
                Ok(t)
            }
            other => Err(TermError::Syntax {
                offset: off,
                message: format!("expected a term, found {}", other.describe()),
            }),
        }
    }

    fn finish(&self) -> Result<(), TermError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.syntax(format!("unexpected {}", self.peek().describe()))
        }
    }
}

/// Parses a term of the given signature.
pub fn parse_term(text: &str, sig: Signature) -> Result<Term, TermError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let t = p.add()?;
    p.finish()?;
    Ok(t)
}

/// Parses `s = t` or `s <= t`.
pub fn parse_equation(text: &str, sig: Signature) -> Result<Equation, TermError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let lhs = p.add()?;
    let off = p.offset();
    let relation = match p.bump() {
        Tok::Equals => Relation::Eq,
        Tok::LessEq => {
            if !sig.has_order() {
                return Err(TermError::OrderUnavailable(sig));
            }
            Relation::Leq
        }
        other => {
            return Err(TermError::Syntax {
                offset: off,
                message: format!("expected `=` or `<=`, found {}", other.describe()),
            })
        }
    };
    let rhs = p.add()?;
    p.finish()?;
    Ok(Equation { lhs, rhs, relation })
}

// ---------------------------------------------------------------------------
// Printer

const PREC_ADD: u8 = 1;
const PREC_JOIN: u8 = 2;
const PREC_MEET: u8 = 3;
const PREC_MUL: u8 = 4;
const PREC_UNARY: u8 = 5;
const PREC_POSTFIX: u8 = 6;
const PREC_ATOM: u8 = 7;

fn precedence(t: &Term) -> u8 {
    match t {
        Term::Var(_) => PREC_ATOM,
        Term::App(op, _) => match op {
            Op::Add => PREC_ADD,
            Op::Join => PREC_JOIN,
            Op::Meet => PREC_MEET,
            Op::Mul => PREC_MUL,
            Op::Neg | Op::Scale(_) => PREC_UNARY,
            Op::Inv => PREC_POSTFIX,
            Op::Unit | Op::Zero => PREC_ATOM,
        },
    }
}

fn write_term(t: &Term, min_prec: u8, out: &mut String) {
    let prec = precedence(t);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match t {
        Term::Var(v) => out.push_str(v),
        Term::App(op, args) => match op {
            Op::Meet | Op::Join | Op::Mul | Op::Add => {
                let sym = match op {
                    Op::Meet => " ^ ",
                    Op::Join => " v ",
                    Op::Mul => " * ",
                    _ => " + ",
                };
                write_term(&args[0], prec, out);
                out.push_str(sym);
                write_term(&args[1], prec + 1, out);
            }
            Op::Neg => {
                out.push('-');
                // `-2|x` would read back as a negative scalar.
                if matches!(&args[0], Term::App(Op::Scale(_), _)) {
                    write_term(&args[0], PREC_ATOM, out);
                } else {
                    write_term(&args[0], PREC_UNARY, out);
                }
            }
            Op::Scale(q) => {
                out.push_str(&q.to_string());
                out.push('|');
                write_term(&args[0], PREC_UNARY, out);
            }
            Op::Inv => {
                write_term(&args[0], PREC_POSTFIX, out);
                out.push_str("^-1");
            }
            Op::Unit => out.push('e'),
            Op::Zero => out.push('0'),
        },
    }
    if parens {
        out.push(')');
    }
}

/// Renders a term in the ASCII grammar accepted by [`parse_term`].
pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, 0, &mut out);
    out
}

pub fn render_equation(eq: &Equation) -> String {
    let rel = match eq.relation {
        Relation::Eq => "=",
        Relation::Leq => "<=",
    };
    format!("{} {} {}", render_term(&eq.lhs), rel, render_term(&eq.rhs))
}

/// Renders a rational with an explicit sign only when negative.
pub fn render_rational(q: &Rational) -> String {
    if q.is_negative() {
        format!("-{}", -q)
    } else {
        q.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(name: &str) -> Term {
        Term::var(name)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_lattice_example() {
        let t = parse_term("x1 ^ (x2 v x3)", Signature::Lat).unwrap();
        assert_eq!(t, Term::meet(v("x1"), Term::join(v("x2"), v("x3"))));
    }

    #[test]
    fn parses_single_variable() {
        assert_eq!(parse_term("x", Signature::Sgrp).unwrap(), v("x"));
    }

    #[test]
    fn parses_abl_tree() {
        let t = parse_term("(x v y) + -(z)", Signature::Abl).unwrap();
        assert_eq!(
            t,
            Term::add(Term::join(v("x"), v("y")), Term::neg(v("z")))
        );
    }

    #[test]
    fn precedence_order() {
        // unary > * > ^ > v > +
        let t = parse_term("x v y ^ z + -x", Signature::Abl).unwrap();
        assert_eq!(
            t,
            Term::add(
                Term::join(v("x"), Term::meet(v("y"), v("z"))),
                Term::neg(v("x"))
            )
        );
        let g = parse_term("x * y^-1 * e", Signature::Grp).unwrap();
        assert_eq!(
            g,
            Term::mul(Term::mul(v("x"), Term::inv(v("y"))), Term::unit())
        );
    }

    #[test]
    fn parses_scalars() {
        let t = parse_term("2|x1 + -3/4|x2 + -(1/2|x3)", Signature::VecQ).unwrap();
        assert_eq!(
            t,
            Term::add(
                Term::add(
                    Term::scale(q(2, 1), v("x1")),
                    Term::scale(q(-3, 4), v("x2"))
                ),
                Term::neg(Term::scale(q(1, 2), v("x3")))
            )
        );
        assert_eq!(parse_term("0", Signature::VecQ).unwrap(), Term::zero());
    }

    #[test]
    fn inverse_with_spaces() {
        let t = parse_term("(x * y) ^ -1", Signature::Grp).unwrap();
        assert_eq!(t, Term::inv(Term::mul(v("x"), v("y"))));
    }

    #[test]
    fn rejects_foreign_symbols() {
        let err = parse_term("x ^ y", Signature::Sgrp).unwrap_err();
        assert!(matches!(err, TermError::UnknownSymbol { offset: 2, .. }), "{err:?}");
        let err = parse_term("x * y", Signature::Lat).unwrap_err();
        assert!(matches!(err, TermError::UnknownSymbol { .. }));
        let err = parse_term("2|x", Signature::Abl).unwrap_err();
        assert!(matches!(err, TermError::UnknownSymbol { .. }));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_term("x ^ (y v", Signature::Lat).unwrap_err() {
            TermError::Syntax { offset, .. } => assert_eq!(offset, 8),
            e => panic!("{e:?}"),
        }
        match parse_term("x $ y", Signature::Lat).unwrap_err() {
            TermError::Syntax { offset, .. } => assert_eq!(offset, 2),
            e => panic!("{e:?}"),
        }
        assert!(parse_term("3", Signature::Abl).is_err());
        assert!(parse_term("", Signature::Lat).is_err());
    }

    #[test]
    fn renders_examples() {
        assert_eq!(render_term(&v("x")), "x");
        assert_eq!(
            render_term(&Term::meet(v("x1"), Term::join(v("x2"), v("x3")))),
            "x1 ^ (x2 v x3)"
        );
        assert_eq!(
            render_term(&Term::mul(v("x"), Term::mul(v("y"), v("x")))),
            "x * (y * x)"
        );
        assert_eq!(
            render_term(&Term::neg(Term::scale(q(2, 1), v("x")))),
            "-(2|x)"
        );
        assert_eq!(render_term(&Term::scale(q(-2, 1), v("x"))), "-2|x");
        assert_eq!(render_term(&Term::inv(Term::inv(v("x")))), "x^-1^-1");
    }

    #[test]
    fn equations() {
        let eq = parse_equation("x <= x v y", Signature::Lat).unwrap();
        assert_eq!(eq.relation, Relation::Leq);
        assert_eq!(render_equation(&eq), "x <= x v y");
        assert!(matches!(
            parse_equation("x <= y", Signature::Grp),
            Err(TermError::OrderUnavailable(Signature::Grp))
        ));
        let eq = parse_equation("x * y = y * x", Signature::Sgrp).unwrap();
        assert_eq!(eq.relation, Relation::Eq);
    }

    #[test]
    fn substitute_examples() {
        let eq = Equation::leq(v("y1"), v("y2"));
        let t1 = parse_term("x1 ^ (x2 v x3)", Signature::Lat).unwrap();
        let t2 = parse_term("x2 v (x1 ^ x3)", Signature::Lat).unwrap();
        let map: Substitution = [("y1".to_string(), t1.clone()), ("y2".to_string(), t2.clone())]
            .into_iter()
            .collect();
        let d = eq.desugar().subst(&map);
        assert_eq!(d, Equation::eq(Term::meet(t1.clone(), t2), t1.clone()));

        assert_eq!(t1.subst(&Substitution::new()), t1);

        let j = Term::join(v("y1"), v("y2"));
        let map: Substitution = [("y1".to_string(), v("x")), ("y2".to_string(), v("x"))]
            .into_iter()
            .collect();
        assert_eq!(j.subst(&map), Term::join(v("x"), v("x")));

        let bad: Substitution = [("y1".to_string(), Term::mul(v("x"), v("x")))]
            .into_iter()
            .collect();
        assert!(substitute(&j, &bad, Signature::Lat).is_err());
    }

    #[test]
    fn instantiate_examples() {
        let t1 = parse_term("x1 ^ (x2 v x3)", Signature::Lat).unwrap();
        let t2 = parse_term("x2 v (x1 ^ x3)", Signature::Lat).unwrap();
        let inst = instantiate(&Equation::leq(v("y1"), v("y2")), &[t1.clone(), t2.clone()]).unwrap();
        assert_eq!(inst, Equation::leq(t1, t2));

        let t = v("x");
        assert_eq!(
            instantiate(&Equation::eq(v("y1"), v("y1")), std::slice::from_ref(&t)).unwrap(),
            Equation::eq(t.clone(), t)
        );

        let x = v("x");
        let xy = Term::mul(v("x"), v("y"));
        let yx = Term::mul(v("y"), v("x"));
        let eq = Equation::eq(Term::mul(v("y1"), v("y3")), Term::mul(v("y2"), v("y1")));
        let inst = instantiate(&eq, &[x.clone(), xy.clone(), yx.clone()]).unwrap();
        assert_eq!(inst.lhs, Term::mul(x.clone(), yx));
        assert_eq!(inst.rhs, Term::mul(xy, x));

        assert!(matches!(
            instantiate(&Equation::eq(v("y3"), v("y1")), &[v("x")]),
            Err(TermError::IndexOutOfRange { .. })
        ));
        assert!(instantiate(&Equation::eq(v("z"), v("y1")), &[v("x")]).is_err());
    }

    #[test]
    fn free_vars_examples() {
        let t = parse_term("x1 ^ (x2 v x3)", Signature::Lat).unwrap();
        assert_eq!(free_vars(&t), vec!["x1", "x2", "x3"]);
        assert!(free_vars(&Term::unit()).is_empty());
        assert_eq!(free_vars(&Term::join(v("x"), v("x"))), vec!["x"]);
    }

    #[test]
    fn witness_names() {
        assert!(is_witness_var("y1"));
        assert!(is_witness_var("y12"));
        assert!(!is_witness_var("y"));
        assert!(!is_witness_var("y1a"));
        assert!(!is_witness_var("x1"));
        assert_eq!(witness_index("y7"), Some(7));
    }

    fn arb_var() -> impl Strategy<Value = Term> {
        prop::sample::select(vec!["x", "y", "z1", "e2", "w_3"]).prop_map(Term::var)
    }

    fn arb_term(sig: Signature) -> BoxedStrategy<Term> {
        let leaf = match sig {
            Signature::Grp => prop_oneof![arb_var(), Just(Term::unit())].boxed(),
            Signature::Abl | Signature::VecQ => prop_oneof![arb_var(), Just(Term::zero())].boxed(),
            _ => arb_var().boxed(),
        };
        leaf.prop_recursive(4, 24, 2, move |inner| {
            let bin = |op: Op, inner: BoxedStrategy<Term>| {
                (inner.clone(), inner)
                    .prop_map(move |(a, b)| Term::App(op.clone(), vec![a, b]))
                    .boxed()
            };
            match sig {
                Signature::Lat | Signature::DLat => {
                    prop_oneof![bin(Op::Meet, inner.clone()), bin(Op::Join, inner)].boxed()
                }
                Signature::Sgrp => bin(Op::Mul, inner),
                Signature::Grp => prop_oneof![
                    bin(Op::Mul, inner.clone()),
                    inner.prop_map(Term::inv)
                ]
                .boxed(),
                Signature::Abl => prop_oneof![
                    bin(Op::Meet, inner.clone()),
                    bin(Op::Join, inner.clone()),
                    bin(Op::Add, inner.clone()),
                    inner.prop_map(Term::neg)
                ]
                .boxed(),
                Signature::VecQ => prop_oneof![
                    bin(Op::Add, inner.clone()),
                    inner.clone().prop_map(Term::neg),
                    (-5i64..6, 1i64..4, inner)
                        .prop_map(|(n, d, t)| Term::scale(Rational::new(n.into(), d.into()), t))
                ]
                .boxed(),
            }
        })
        .boxed()
    }

    fn arb_sig_term() -> impl Strategy<Value = (Signature, Term)> {
        prop::sample::select(Signature::ALL.to_vec())
            .prop_flat_map(|sig| arb_term(sig).prop_map(move |t| (sig, t)))
    }

    proptest! {
        #[test]
        fn parse_render_round_trip((sig, t) in arb_sig_term()) {
            let text = render_term(&t);
            let back = parse_term(&text, sig).unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn substitution_composes(
            t in arb_term(Signature::Lat),
            a in arb_term(Signature::Lat),
            b in arb_term(Signature::Lat),
            c in arb_term(Signature::Lat),
        ) {
            let sigma: Substitution = [("x".to_string(), a), ("y".to_string(), b)].into_iter().collect();
            let tau: Substitution = [("x".to_string(), c.clone()), ("z1".to_string(), c)].into_iter().collect();
            // (tau ∘ sigma)(v) = tau(sigma(v)), falling back to tau(v).
            let mut composed: Substitution = sigma.iter().map(|(k, v)| (k.clone(), v.subst(&tau))).collect();
            for (k, v) in &tau {
                composed.entry(k.clone()).or_insert_with(|| v.clone());
            }
            prop_assert_eq!(t.subst(&sigma).subst(&tau), t.subst(&composed));
        }

        #[test]
        fn instantiate_stays_within_term_vars(
            u in arb_term(Signature::Lat),
            w in arb_term(Signature::Lat),
            t1 in arb_term(Signature::Lat),
            t2 in arb_term(Signature::Lat),
        ) {
            let rename: Substitution = [
                ("x".to_string(), Term::var("y1")),
                ("y".to_string(), Term::var("y2")),
                ("z1".to_string(), Term::var("y1")),
                ("e2".to_string(), Term::var("y2")),
                ("w_3".to_string(), Term::var("y1")),
            ].into_iter().collect();
            let eq = Equation::eq(u.subst(&rename), w.subst(&rename));
            let inst = instantiate(&eq, &[t1.clone(), t2.clone()]).unwrap();
            let mut allowed = t1.free_vars();
            allowed.extend(t2.free_vars());
            for v in inst.free_vars() {
                prop_assert!(allowed.contains(&v));
            }
        }
    }
}
