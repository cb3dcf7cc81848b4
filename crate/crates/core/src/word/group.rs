//! Free groups: free reduction and Nielsen reduction of tuples.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::term::{witness_var, Equation, Op, Signature, Term};
use crate::verdict::{Certificate, Evidence, Verdict};

/// A generator or its inverse. Ordered as `x < x⁻¹ < y < y⁻¹ < …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GLetter {
    pub gen: String,
    pub inv: bool,
}

impl GLetter {
    pub fn new(gen: impl Into<String>, inv: bool) -> Self {
        GLetter {
            gen: gen.into(),
            inv,
        }
    }

    pub fn inverse(&self) -> GLetter {
        GLetter {
            gen: self.gen.clone(),
            inv: !self.inv,
        }
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GWord(Vec<GLetter>);

impl GWord {
    pub fn identity() -> GWord {
        GWord(Vec::new())
    }

    pub fn letter(gen: impl Into<String>) -> GWord {
        GWord(vec![GLetter::new(gen, false)])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = GLetter>) -> GWord {
        let mut out: Vec<GLetter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|p| p.gen == l.gen && p.inv != l.inv) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GWord(out)
    }

    /// Parses `xyX`-style words: lowercase letters are generators,
    /// uppercase their inverses.
    pub fn from_letters(s: &str) -> GWord {
        GWord::reduce(s.chars().map(|c| {
            if c.is_uppercase() {
                GLetter::new(c.to_lowercase().to_string(), true)
            } else {
                GLetter::new(c.to_string(), false)
            }
        }))
    }

    pub fn letters(&self) -> &[GLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GWord {
        GWord(self.0.iter().rev().map(GLetter::inverse).collect())
    }

    pub fn mul(&self, other: &GWord) -> GWord {
        GWord::reduce(self.0.iter().chain(other.0.iter()).cloned())
    }

    /// Integer power (negative powers invert).
    pub fn pow(&self, k: i64) -> GWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = GWord::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Image under `gen ↦ word`; unmapped generators are kept.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<GWord>) -> GWord {
        let mut acc = GWord::identity();
        for l in &self.0 {
            let base = map(&l.gen).unwrap_or_else(|| GWord::letter(l.gen.clone()));
            acc = acc.mul(&if l.inv { base.inverse() } else { base });
        }
        acc
    }

    /// The word as a group term; the identity becomes `e`.
    pub fn to_term(&self) -> Term {
        Term::fold(
            Op::Mul,
            self.0.iter().map(|l| {
                let v = Term::var(l.gen.clone());
                if l.inv {
                    Term::inv(v)
                } else {
                    v
                }
            }),
        )
        .unwrap_or_else(Term::unit)
    }
}

impl fmt::Display for GWord {
    /// Single-letter generators are written compactly (`xyX`); otherwise
    /// letters are space separated with `^-1` for inverses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let compact = self
            .0
            .iter()
            .all(|l| l.gen.chars().count() == 1 && l.gen.chars().all(|c| c.is_lowercase()));
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| match (compact, l.inv) {
                (true, true) => l.gen.to_uppercase(),
                (true, false) => l.gen.clone(),
                (false, true) => format!("{}^-1", l.gen),
                (false, false) => l.gen.clone(),
            })
            .collect();
        f.write_str(&parts.join(if compact { "" } else { " " }))
    }
}

impl Serialize for GWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Freely reduced form of a group term.
pub fn grp_normalize(t: &Term) -> Result<GWord> {
    t.check_signature(Signature::Grp)?;
    Ok(reduce_term(t))
}

fn reduce_term(t: &Term) -> GWord {
    match t {
        Term::Var(v) => GWord::letter(v.clone()),
        Term::App(Op::Mul, args) => reduce_term(&args[0]).mul(&reduce_term(&args[1])),
        Term::App(Op::Inv, args) => reduce_term(&args[0]).inverse(),
        Term::App(Op::Unit, _) => GWord::identity(),
        Term::App(..) => unreachable!("checked against the group signature"),
    }
}

/// Validity of a group equation: both sides reduce to the same word.
pub fn grp_valid(eq: &Equation) -> Result<bool> {
    Ok(grp_normalize(&eq.lhs)? == grp_normalize(&eq.rhs)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

/// An elementary Nielsen transformation; indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum NielsenStep {
    Swap { i: usize, j: usize },
    Invert { i: usize },
    /// `w_i ← w_i·w_j^{±1}` (right) or `w_j^{±1}·w_i` (left).
    Multiply {
        target: usize,
        by: usize,
        side: Side,
        inverse: bool,
    },
}

impl NielsenStep {
    pub fn apply(&self, tuple: &mut [GWord]) {
        match *self {
            NielsenStep::Swap { i, j } => tuple.swap(i, j),
            NielsenStep::Invert { i } => tuple[i] = tuple[i].inverse(),
            NielsenStep::Multiply {
                target,
                by,
                side,
                inverse,
            } => {
                let m = if inverse {
                    tuple[by].inverse()
                } else {
                    tuple[by].clone()
                };
                tuple[target] = match side {
                    Side::Right => tuple[target].mul(&m),
                    Side::Left => m.mul(&tuple[target]),
                };
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NielsenTrace {
    pub initial: Vec<GWord>,
    pub steps: Vec<NielsenStep>,
    #[serde(rename = "final")]
    pub final_tuple: Vec<GWord>,
}

impl NielsenTrace {
    pub fn replay(&self) -> Vec<GWord> {
        let mut t = self.initial.clone();
        for s in &self.steps {
            s.apply(&mut t);
        }
        t
    }
}

/// Result of Nielsen reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NielsenResult {
    pub tuple: Vec<GWord>,
    pub trace: NielsenTrace,
    /// Entries that are the identity, in the order they became trivial.
    pub trivial: Vec<usize>,
    /// Each entry as a word in the original tuple's positions `y1, y2, …`.
    pub expressions: Vec<GWord>,
}

/// Ordering key on words: length, then the lexicographically smaller and
/// larger of the left halves of `w` and `w⁻¹`.
fn half_key(w: &GWord) -> (usize, Vec<GLetter>, Vec<GLetter>) {
    let half = w.len().div_ceil(2);
    let a = w.letters()[..half].to_vec();
    let b = w.inverse().letters()[..half].to_vec();
    if a <= b {
        (w.len(), a, b)
    } else {
        (w.len(), b, a)
    }
}

fn improves(candidate: &GWord, current: &GWord, strict_length: bool) -> bool {
    if strict_length {
        candidate.len() < current.len()
    } else {
        candidate.len() == current.len() && half_key(candidate).cmp(&half_key(current)) == Ordering::Less
    }
}

fn products(tuple: &[GWord], i: usize, j: usize) -> [(Side, bool, GWord); 4] {
    let (wi, wj) = (&tuple[i], &tuple[j]);
    let wj_inv = wj.inverse();
    [
        (Side::Right, false, wi.mul(wj)),
        (Side::Right, true, wi.mul(&wj_inv)),
        (Side::Left, false, wj.mul(wi)),
        (Side::Left, true, wj_inv.mul(wi)),
    ]
}

fn find_move(tuple: &[GWord], strict_length: bool) -> Option<NielsenStep> {
    let n = tuple.len();
    for i in 0..n {
        if tuple[i].is_empty() {
            continue;
        }
        for j in 0..n {
            if i == j || tuple[j].is_empty() {
                continue;
            }
            for (side, inverse, p) in products(tuple, i, j) {
                if improves(&p, &tuple[i], strict_length) {
                    return Some(NielsenStep::Multiply {
                        target: i,
                        by: j,
                        side,
                        inverse,
                    });
                }
            }
        }
    }
    None
}

/// Checks the two Nielsen conditions on the nontrivial entries: for
/// `u, v, w` among them and their inverses, `|uv| ≥ |u|, |v|` when
/// `uv ≠ e`, and `|uvw| > |u| − |v| + |w|` when `uv ≠ e ≠ vw`.
pub fn is_nielsen_reduced(tuple: &[GWord]) -> bool {
    let mut gens: Vec<GWord> = Vec::new();
    for w in tuple.iter().filter(|w| !w.is_empty()) {
        gens.push(w.clone());
        gens.push(w.inverse());
    }
    for (a, u) in gens.iter().enumerate() {
        for (b, v) in gens.iter().enumerate() {
            let uv = u.mul(v);
            let trivial_uv = uv.is_empty() && a / 2 == b / 2;
            if uv.is_empty() && !trivial_uv {
                // Two entries are equal or mutually inverse.
                return false;
            }
            if !trivial_uv && (uv.len() < u.len() || uv.len() < v.len()) {
                return false;
            }
            if trivial_uv {
                continue;
            }
            for (c, w) in gens.iter().enumerate() {
                let vw = v.mul(w);
                if vw.is_empty() && b / 2 == c / 2 {
                    continue;
                }
                let uvw = uv.mul(w);
                if (uvw.len() + v.len()) <= u.len() + w.len() {
                    return false;
                }
            }
        }
    }
    true
}

/// Nielsen reduction: length-decreasing moves first, then moves that keep
/// the length and decrease the half-word key; finally each entry is inverted
/// if its inverse is lexicographically smaller.
pub fn nielsen_reduce(initial: &[GWord]) -> Result<NielsenResult> {
    let n = initial.len();
    let mut tuple = initial.to_vec();
    let mut steps = Vec::new();
    let mut trivial: Vec<usize> = (0..n).filter(|&i| tuple[i].is_empty()).collect();
    let mut expressions: Vec<GWord> = (1..=n).map(|i| GWord::letter(witness_var(i))).collect();
    loop {
        let mv = find_move(&tuple, true).or_else(|| find_move(&tuple, false));
        let Some(step) = mv else { break };
        step.apply(&mut tuple);
        step.apply(&mut expressions);
        if let NielsenStep::Multiply { target, .. } = step {
            if tuple[target].is_empty() {
                trivial.push(target);
            }
        }
        steps.push(step);
    }
    for i in 0..n {
        let inv = tuple[i].inverse();
        if inv < tuple[i] {
            let step = NielsenStep::Invert { i };
            step.apply(&mut tuple);
            step.apply(&mut expressions);
            steps.push(step);
        }
    }
    if !is_nielsen_reduced(&tuple) {
        return Err(Error::Internal("Nielsen reduction stopped at a non-reduced tuple".into()));
    }
    let trace = NielsenTrace {
        initial: initial.to_vec(),
        steps,
        final_tuple: tuple.clone(),
    };
    Ok(NielsenResult {
        tuple,
        trace,
        trivial,
        expressions,
    })
}

/// Dependence of group terms via the rank of the generated subgroup.
pub fn grp_dependence(terms: &[Term]) -> Result<Verdict> {
    if terms.is_empty() {
        return Err(Error::InvalidArgument("at least one term is required".into()));
    }
    let words = terms.iter().map(grp_normalize).collect::<Result<Vec<_>>>()?;
    let red = nielsen_reduce(&words)?;
    match red.trivial.first() {
        Some(&i) => {
            let rel = &red.expressions[i];
            if rel.is_empty() {
                return Err(Error::Internal("Nielsen relation collapsed".into()));
            }
            Ok(Verdict::Dependent {
                witness: Equation::eq(rel.to_term(), Term::unit()),
                evidence: Evidence::Nielsen {
                    entry: i + 1,
                    trace: red.trace,
                },
            })
        }
        None => Ok(Verdict::Independent {
            certificate: Certificate::NielsenBasis {
                basis: red.tuple.iter().map(GWord::to_string).collect(),
                trace: red.trace,
            },
        }),
    }
}

/// First nontrivial reduced word over `y1 … yn` of length at most
/// `max_len` (by length, then letter order) that maps to the identity under
/// `yᵢ ↦ tuple[i]`.
pub fn brute_relation(tuple: &[GWord], max_len: usize) -> Option<GWord> {
    let letters: Vec<GLetter> = (1..=tuple.len())
        .flat_map(|i| [GLetter::new(witness_var(i), false), GLetter::new(witness_var(i), true)])
        .collect();
    let image = |w: &GWord| {
        w.substitute(&|g: &str| crate::term::witness_index(g).map(|i| tuple[i - 1].clone()))
    };
    let mut layer = vec![GWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in &letters {
                if w.letters().last().is_some_and(|last| *last == l.inverse()) {
                    continue;
                }
                let mut ls = w.letters().to_vec();
                ls.push(l.clone());
                let v = GWord(ls);
                if image(&v).is_empty() {
                    return Some(v);
                }
                next.push(v);
            }
        }
        layer = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{instantiate, parse_equation, parse_term, render_equation};
    use proptest::prelude::*;

    fn g(s: &str) -> Term {
        parse_term(s, Signature::Grp).unwrap()
    }

    fn w(s: &str) -> GWord {
        GWord::from_letters(s)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(grp_normalize(&g("x * x^-1")).unwrap(), GWord::identity());
        assert_eq!(grp_normalize(&g("(x * y)^-1")).unwrap(), w("YX"));
        assert_eq!(grp_normalize(&g("x * (y * x)")).unwrap(), w("xyx"));
        assert_eq!(w("YX").to_string(), "YX");
    }

    #[test]
    fn nielsen_examples() {
        let r = nielsen_reduce(&[w("xx"), w("xxx")]).unwrap();
        let nontrivial: Vec<_> = r.tuple.iter().filter(|t| !t.is_empty()).collect();
        assert_eq!(nontrivial, vec![&w("x")]);
        assert_eq!(r.tuple.iter().filter(|t| t.is_empty()).count(), 1);
        assert_eq!(r.trace.replay(), r.tuple);

        let r = nielsen_reduce(&[w("x"), w("y")]).unwrap();
        assert_eq!(r.tuple, vec![w("x"), w("y")]);
        assert!(r.trace.steps.is_empty());

        // Already reduced, so only same-length key-decreasing moves apply.
        let r = nielsen_reduce(&[w("xy"), w("yx")]).unwrap();
        assert_eq!(r.tuple, vec![w("xy"), w("XY")]);
        assert!(is_nielsen_reduced(&r.tuple));
        assert_eq!(r.trace.replay(), r.tuple);
    }

    #[test]
    fn brute_relations() {
        let r = brute_relation(&[w("xx"), w("xxx")], 5).unwrap();
        assert_eq!(r.to_string(), "y1 y2 y1^-1 y2^-1");
        assert_eq!(brute_relation(&[w("x"), w("yxy")], 4), None);
        assert_eq!(brute_relation(&[GWord::identity()], 1).unwrap().to_string(), "y1");
    }

    #[test]
    fn reduced_tuple_checks() {
        assert!(is_nielsen_reduced(&[w("x"), w("y")]));
        assert!(!is_nielsen_reduced(&[w("xy"), w("y")]));
        assert!(!is_nielsen_reduced(&[w("x"), w("x")]));
    }

    #[test]
    fn dependence_examples() {
        let terms = [g("x * x"), g("x * x * x")];
        let v = grp_dependence(&terms).unwrap();
        let wit = v.witness().unwrap().clone();
        assert!(!grp_valid(&wit).unwrap());
        assert!(grp_valid(&instantiate(&wit, &terms).unwrap()).unwrap());
        // The classical relation is accepted as well.
        let classic = parse_equation("y1 * y1 * y1 = y2 * y2", Signature::Grp).unwrap();
        assert!(grp_valid(&instantiate(&classic, &terms).unwrap()).unwrap());
        assert!(!grp_valid(&classic).unwrap());

        assert!(!grp_dependence(&[g("x"), g("y * x * y")]).unwrap().is_dependent());
        let v = grp_dependence(&[g("e")]).unwrap();
        assert_eq!(render_equation(v.witness().unwrap()), "y1 = e");
        assert!(!grp_dependence(&[g("x")]).unwrap().is_dependent());
    }

    fn arb_word() -> impl Strategy<Value = GWord> {
        prop::collection::vec((0u8..3, any::<bool>()), 0..6).prop_map(|ls| {
            GWord::reduce(ls.into_iter().map(|(g, inv)| GLetter::new(["x", "y", "z"][g as usize], inv)))
        })
    }

    proptest! {
        #[test]
        fn trace_replays_and_length_never_grows(ws in prop::collection::vec(arb_word(), 1..4)) {
            let r = nielsen_reduce(&ws).unwrap();
            prop_assert_eq!(r.trace.replay(), r.tuple.clone());
            let mut t = ws.clone();
            let mut total: usize = t.iter().map(GWord::len).sum();
            for s in &r.trace.steps {
                s.apply(&mut t);
                let now: usize = t.iter().map(GWord::len).sum();
                prop_assert!(now <= total);
                total = now;
            }
            prop_assert!(is_nielsen_reduced(&r.tuple));
        }

        #[test]
        fn expressions_map_to_entries(ws in prop::collection::vec(arb_word(), 1..4)) {
            let r = nielsen_reduce(&ws).unwrap();
            for (e, t) in r.expressions.iter().zip(&r.tuple) {
                let img = e.substitute(&|g: &str| {
                    crate::term::witness_index(g).map(|k| ws[k - 1].clone())
                });
                prop_assert_eq!(&img, t);
                prop_assert!(!e.is_empty());
            }
        }
    }
}
