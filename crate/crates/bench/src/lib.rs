//! Shared fixtures for the benchmarks.

use depdec_core::linear::{Constraint, LinForm};
use depdec_core::word::{sword_from_letters, GWord, SWord};
use depdec_core::{parse_problem, parse_term, DependenceProblem, Signature, Term};

pub fn problem(sig: Signature, terms: &[&str]) -> DependenceProblem {
    DependenceProblem::new(sig, terms.iter().map(|t| parse_term(t, sig).unwrap()).collect(), vec![]).unwrap()
}

/// `x1 ^ (x2 v x3)` and `x2 v (x1 ^ x3)` under `sig`.
pub fn distributive_pair(sig: Signature) -> DependenceProblem {
    problem(sig, &["x1 ^ (x2 v x3)", "x2 v (x1 ^ x3)"])
}

/// Balanced alternating meet/join tree of the given depth over `x1 … x4`.
pub fn lattice_tree(depth: usize, offset: usize) -> Term {
    fn go(depth: usize, k: &mut usize) -> Term {
        if depth == 0 {
            *k += 1;
            return Term::var(format!("x{}", *k % 4 + 1));
        }
        let l = go(depth - 1, k);
        let r = go(depth - 1, k);
        if depth.is_multiple_of(2) {
            Term::meet(l, r)
        } else {
            Term::join(l, r)
        }
    }
    let mut k = offset;
    go(depth, &mut k)
}

pub fn words(ws: &[&str]) -> Vec<SWord> {
    ws.iter().map(|w| sword_from_letters(w)).collect()
}

pub fn group_words(ws: &[&str]) -> Vec<GWord> {
    ws.iter().map(|w| GWord::from_letters(w)).collect()
}

/// `count` random-looking inequalities `0 ≤ Σ cᵢ vᵢ` over `x, y1 … y4`.
pub fn fm_system(count: usize) -> Vec<Constraint> {
    let vars = ["x", "y1", "y2", "y3", "y4"];
    (0..count)
        .map(|i| {
            let pairs: Vec<(&str, i64)> = vars
                .iter()
                .enumerate()
                .map(|(j, v)| (*v, ((i * 7 + j * 3) % 5) as i64 - 2))
                .collect();
            Constraint::ge(LinForm::from_ints(&pairs))
        })
        .collect()
}

pub fn abl_problem(text: &str) -> DependenceProblem {
    parse_problem(text).unwrap()
}
