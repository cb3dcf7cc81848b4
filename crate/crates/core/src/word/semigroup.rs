//! Free semigroups: flattening, quotients and the Sardinas–Patterson test.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::term::{witness_var, Equation, Op, Signature, Term};
use crate::verdict::{Certificate, Evidence, Verdict};

/// A nonempty word over generator names.
pub type SWord = Vec<String>;

/// Renders a word; single-character letters are concatenated.
pub fn render_sword(w: &[String]) -> String {
    if w.iter().all(|l| l.chars().count() == 1) {
        w.concat()
    } else {
        w.join(" ")
    }
}

/// Splits a compact word like `xyx` into one-letter generators.
pub fn sword_from_letters(s: &str) -> SWord {
    s.chars().map(|c| c.to_string()).collect()
}

/// The leaf sequence of a semigroup term.
pub fn sg_normalize(t: &Term) -> Result<SWord> {
    t.check_signature(Signature::Sgrp)?;
    let mut out = Vec::new();
    flatten(t, &mut out);
    Ok(out)
}

fn flatten(t: &Term, out: &mut SWord) {
    match t {
        Term::Var(v) => out.push(v.clone()),
        Term::App(_, args) => args.iter().for_each(|a| flatten(a, out)),
    }
}

/// `Y⁻¹Z`: all nonempty `t` with `s·t ∈ Z` for some `s ∈ Y`.
pub fn left_quotient(y: &BTreeSet<SWord>, z: &BTreeSet<SWord>) -> BTreeSet<SWord> {
    let mut out = BTreeSet::new();
    for s in y {
        for w in z {
            if w.len() > s.len() && w.starts_with(s) {
                out.insert(w[s.len()..].to_vec());
            }
        }
    }
    out
}

/// How a residual was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Codeword `index` itself (step 0).
    Codeword(usize),
    /// From `X⁻¹U`: codeword `codeword` was stripped from residual `parent`.
    StripCodeword { parent: usize, codeword: usize },
    /// From `U⁻¹X`: residual `parent` was stripped from codeword `codeword`.
    StripResidual { parent: usize, codeword: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub word: SWord,
    pub origin: Origin,
}

/// One set `Uₙ`, with parent links into the previous state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPState {
    pub step: usize,
    pub residuals: Vec<Residual>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpOutcome {
    /// `Uₙ` became empty or repeated; `steps` sets were computed.
    Code { steps: usize },
    /// Residual `residual` of `Uₙ` (n = `step`) is a codeword.
    NotCode {
        step: usize,
        residual: usize,
        history: Vec<SPState>,
    },
}

/// The Sardinas–Patterson iteration `U₀ = X`, `Uₙ₊₁ = X⁻¹Uₙ ∪ Uₙ⁻¹X`.
///
/// `code` must list distinct nonempty words; indices into it name the codewords.
pub fn sardinas_patterson(code: &[SWord]) -> SpOutcome {
    assert!(!code.is_empty(), "code must be nonempty");
    assert!(code.iter().all(|w| !w.is_empty()), "codewords must be nonempty");
    let index: HashMap<&SWord, usize> = code.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut history = vec![SPState {
        step: 0,
        residuals: code
            .iter()
            .enumerate()
            .map(|(i, w)| Residual {
                word: w.clone(),
                origin: Origin::Codeword(i),
            })
            .collect(),
    }];
    let mut seen: HashSet<BTreeSet<SWord>> = HashSet::new();
    seen.insert(code.iter().cloned().collect());
    loop {
        let prev = history.last().expect("nonempty history");
        let step = prev.step + 1;
        let mut residuals: Vec<Residual> = Vec::new();
        let mut present: HashSet<SWord> = HashSet::new();
        let mut add = |word: SWord, origin: Origin, residuals: &mut Vec<Residual>| {
            if present.insert(word.clone()) {
                residuals.push(Residual { word, origin });
            }
        };
        for (p, r) in prev.residuals.iter().enumerate() {
            for (c, w) in code.iter().enumerate() {
                if r.word.len() > w.len() && r.word.starts_with(w) {
                    add(
                        r.word[w.len()..].to_vec(),
                        Origin::StripCodeword {
                            parent: p,
                            codeword: c,
                        },
                        &mut residuals,
                    );
                }
            }
        }
        for (p, r) in prev.residuals.iter().enumerate() {
            for (c, w) in code.iter().enumerate() {
                if w.len() > r.word.len() && w.starts_with(&r.word) {
                    add(
                        w[r.word.len()..].to_vec(),
                        Origin::StripResidual {
                            parent: p,
                            codeword: c,
                        },
                        &mut residuals,
                    );
                }
            }
        }
        let hit = residuals.iter().position(|r| index.contains_key(&r.word));
        let set: BTreeSet<SWord> = residuals.iter().map(|r| r.word.clone()).collect();
        let empty = residuals.is_empty();
        history.push(SPState { step, residuals });
        if let Some(residual) = hit {
            return SpOutcome::NotCode {
                step,
                residual,
                history,
            };
        }
        if empty || !seen.insert(set) {
            return SpOutcome::Code { steps: step };
        }
    }
}

/// Two distinct codeword sequences spelling the same word, read off the
/// parent links of a `NotCode` outcome. Indices are 0-based.
///
/// The first sequence is the one starting with the shorter codeword.
pub fn sg_witness(
    code: &[SWord],
    history: &[SPState],
    step: usize,
    residual: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let broken = |why: &str| Error::Internal(format!("inconsistent residual links: {why}"));
    // Walk back to step 0 collecting the events, then replay them forward.
    let mut events = Vec::new();
    let mut cur = residual;
    for s in (0..=step).rev() {
        let state = history.get(s).ok_or_else(|| broken("missing step"))?;
        let r = state.residuals.get(cur).ok_or_else(|| broken("missing residual"))?;
        events.push(r.origin.clone());
        cur = match r.origin {
            Origin::Codeword(_) => {
                if s != 0 {
                    return Err(broken("codeword origin after step 0"));
                }
                0
            }
            Origin::StripCodeword { parent, .. } | Origin::StripResidual { parent, .. } => parent,
        };
    }
    events.reverse();
    // `lead` spells `lag` followed by the current residual.
    let (mut lead, mut lag) = match events.first() {
        Some(Origin::Codeword(i)) => (vec![*i], Vec::new()),
        _ => return Err(broken("history does not start at a codeword")),
    };
    for ev in &events[1..] {
        match *ev {
            Origin::StripCodeword { codeword, .. } => lag.push(codeword),
            Origin::StripResidual { codeword, .. } => {
                lag.push(codeword);
                std::mem::swap(&mut lead, &mut lag);
            }
            Origin::Codeword(_) => return Err(broken("codeword origin after step 0")),
        }
    }
    let last = &history[step].residuals[residual].word;
    let finish = code
        .iter()
        .position(|w| w == last)
        .ok_or_else(|| broken("final residual is not a codeword"))?;
    lag.push(finish);

    let spell = |seq: &[usize]| seq.iter().flat_map(|&i| code[i].iter().cloned()).collect::<SWord>();
    if lead == lag || spell(&lead) != spell(&lag) {
        return Err(broken("factorizations do not agree"));
    }
    let (a, b) = if code[lead[0]].len() <= code[lag[0]].len() {
        (lead, lag)
    } else {
        (lag, lead)
    };
    Ok((a, b))
}

/// The product `y_{i1} · y_{i2} · …` (left-associated) for 0-based indices.
pub fn y_product(seq: &[usize]) -> Term {
    Term::fold(Op::Mul, seq.iter().map(|&i| Term::var(witness_var(i + 1)))).expect("nonempty")
}

/// Dependence of semigroup terms: duplicates or a non-code.
pub fn sg_dependence(terms: &[Term]) -> Result<Verdict> {
    if terms.is_empty() {
        return Err(Error::InvalidArgument("at least one term is required".into()));
    }
    let words = terms.iter().map(sg_normalize).collect::<Result<Vec<_>>>()?;
    for j in 0..words.len() {
        for i in 0..j {
            if words[i] == words[j] {
                return Ok(Verdict::Dependent {
                    witness: Equation::eq(
                        Term::var(witness_var(i + 1)),
                        Term::var(witness_var(j + 1)),
                    ),
                    evidence: Evidence::DuplicateTerms {
                        first: i + 1,
                        second: j + 1,
                    },
                });
            }
        }
    }
    match sardinas_patterson(&words) {
        SpOutcome::Code { steps } => Ok(Verdict::Independent {
            certificate: Certificate::SardinasPatterson { steps },
        }),
        SpOutcome::NotCode {
            step,
            residual,
            history,
        } => {
            let (u, v) = sg_witness(&words, &history, step, residual)?;
            let word: SWord = u.iter().flat_map(|&i| words[i].iter().cloned()).collect();
            Ok(Verdict::Dependent {
                witness: Equation::eq(y_product(&u), y_product(&v)),
                evidence: Evidence::NotCode {
                    step,
                    word: render_sword(&word),
                },
            })
        }
    }
}

/// Every set of between one and `max_words` distinct words of length
/// `1..=max_len` over `alphabet`, each set sorted, in lexicographic order.
pub fn all_word_sets(alphabet: &[&str], max_len: usize, max_words: usize) -> Vec<Vec<SWord>> {
    let mut words: Vec<SWord> = Vec::new();
    let mut layer: Vec<SWord> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |a| {
                    let mut v = w.clone();
                    v.push(a.to_string());
                    v
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    words.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<SWord>)> = vec![(0, Vec::new())];
    while let Some((start, set)) = stack.pop() {
        if !set.is_empty() {
            out.push(set.clone());
        }
        if set.len() == max_words {
            continue;
        }
        for i in (start..words.len()).rev() {
            let mut next = set.clone();
            next.push(words[i].clone());
            stack.push((i + 1, next));
        }
    }
    out
}

/// Brute-force search for two distinct sequences of at most `max_len`
/// codewords spelling the same word. Returns the pair found first in
/// order of sequence length.
pub fn brute_ambiguity(code: &[SWord], max_len: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut spelled: HashMap<SWord, Vec<usize>> = HashMap::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &layer {
            for c in 0..code.len() {
                let mut s = seq.clone();
                s.push(c);
                let word: SWord = s.iter().flat_map(|&i| code[i].iter().cloned()).collect();
                match spelled.get(&word) {
                    Some(other) if *other != s => return Some((other.clone(), s)),
                    Some(_) => {}
                    None => {
                        spelled.insert(word, s.clone());
                    }
                }
                next.push(s);
            }
        }
        layer = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, render_equation};

    fn words(ws: &[&str]) -> Vec<SWord> {
        ws.iter().map(|w| sword_from_letters(w)).collect()
    }

    fn set(ws: &[&str]) -> BTreeSet<SWord> {
        words(ws).into_iter().collect()
    }

    fn sg(s: &str) -> Term {
        parse_term(s, Signature::Sgrp).unwrap()
    }

    #[test]
    fn word_set_counts() {
        // 14 words: 14 + C(14, 2) + C(14, 3) sets.
        let sets = all_word_sets(&["x", "y"], 3, 3);
        assert_eq!(sets.len(), 14 + 91 + 364);
        assert_eq!(sets[0], words(&["x"]));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(sg_normalize(&sg("x * (y * x)")).unwrap(), sword_from_letters("xyx"));
        assert_eq!(sg_normalize(&sg("(x * y) * x")).unwrap(), sword_from_letters("xyx"));
        assert_eq!(sg_normalize(&sg("x")).unwrap(), sword_from_letters("x"));
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(left_quotient(&set(&["x"]), &set(&["xy"])), set(&["y"]));
        assert_eq!(left_quotient(&set(&["y"]), &set(&["yx"])), set(&["x"]));
        assert!(left_quotient(&set(&["x"]), &set(&["x"])).is_empty());
    }

    #[test]
    fn sp_examples() {
        let x = words(&["x", "xy", "yx"]);
        match sardinas_patterson(&x) {
            SpOutcome::NotCode { step, residual, history } => {
                assert_eq!(step, 2);
                let u1: Vec<_> = history[1].residuals.iter().map(|r| r.word.clone()).collect();
                let u2: Vec<_> = history[2].residuals.iter().map(|r| r.word.clone()).collect();
                assert_eq!(u1, words(&["y"]));
                assert_eq!(u2, words(&["x"]));
                assert_eq!(sg_witness(&x, &history, step, residual).unwrap(), (vec![0, 2], vec![1, 0]));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(sardinas_patterson(&words(&["x", "xy"])), SpOutcome::Code { .. }));
        assert!(matches!(sardinas_patterson(&words(&["x"])), SpOutcome::Code { .. }));
    }

    fn witness_of(ws: &[&str]) -> (Vec<usize>, Vec<usize>) {
        let x = words(ws);
        match sardinas_patterson(&x) {
            SpOutcome::NotCode { step, residual, history } => sg_witness(&x, &history, step, residual).unwrap(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn witness_examples() {
        assert_eq!(witness_of(&["x", "y", "xy"]), (vec![0, 1], vec![2]));
        // y·xy = yx·y
        assert_eq!(witness_of(&["xy", "y", "yx"]), (vec![1, 0], vec![2, 1]));
    }

    #[test]
    fn dependence_examples() {
        let v = sg_dependence(&[sg("x"), sg("x * y"), sg("y * x")]).unwrap();
        assert_eq!(render_equation(v.witness().unwrap()), "y1 * y3 = y2 * y1");
        assert!(!sg_dependence(&[sg("x"), sg("x * y")]).unwrap().is_dependent());
        let v = sg_dependence(&[sg("x"), sg("x")]).unwrap();
        assert_eq!(render_equation(v.witness().unwrap()), "y1 = y2");
    }

    #[test]
    fn brute_finds_double_factorization() {
        let (a, b) = brute_ambiguity(&words(&["x", "xy", "yx"]), 6).unwrap();
        assert_ne!(a, b);
        assert!(brute_ambiguity(&words(&["x", "xy"]), 6).is_none());
    }
}
