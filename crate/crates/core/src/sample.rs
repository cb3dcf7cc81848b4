//! Random terms for property tests and harnesses.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::problem::DependenceProblem;
use crate::term::{Op, Signature, Term};
use crate::Rational;

fn scalars() -> [Rational; 3] {
    [
        Rational::from_integer((-1).into()),
        Rational::from_integer(2.into()),
        Rational::new(1.into(), 2.into()),
    ]
}

/// A random term over `vars` of size at most `max_size` (at least 1).
pub fn random_term<R: Rng>(sig: Signature, vars: &[String], max_size: usize, rng: &mut R) -> Term {
    assert!(!vars.is_empty(), "random terms need variables");
    let budget = rng.gen_range(1..=max_size.max(1));
    build(sig, vars, budget, rng)
}

fn leaf<R: Rng>(sig: Signature, vars: &[String], rng: &mut R) -> Term {
    let constant = match sig {
        Signature::Grp => Some(Term::unit()),
        Signature::Abl | Signature::VecQ => Some(Term::zero()),
        _ => None,
    };
    match constant {
        Some(c) if rng.gen_ratio(1, 6) => c,
        _ => Term::var(vars.choose(rng).expect("nonempty").clone()),
    }
}

fn build<R: Rng>(sig: Signature, vars: &[String], budget: usize, rng: &mut R) -> Term {
    if budget <= 1 || rng.gen_ratio(1, 4) {
        return leaf(sig, vars, rng);
    }
    let mut choices: Vec<Op> = Vec::new();
    for (op, arity) in sig.ops() {
        match (op, arity) {
            (Op::Scale(_), _) => choices.extend(scalars().into_iter().map(Op::Scale)),
            (op, 1) => choices.push(op),
            (op, 2) if budget >= 3 => choices.push(op),
            _ => {}
        }
    }
    let Some(op) = choices.choose(rng).cloned() else {
        return leaf(sig, vars, rng);
    };
    if op.arity() == 1 {
        let a = build(sig, vars, budget - 1, rng);
        return Term::App(op, vec![a]);
    }
    let left_budget = rng.gen_range(1..=budget - 2);
    let a = build(sig, vars, left_budget, rng);
    let b = build(sig, vars, budget - 1 - a.size(), rng);
    Term::App(op, vec![a, b])
}

/// A small problem with an empty `Σ`: one to three terms over `x1, x2` of
/// size at most `max_size`.
pub fn random_problem<R: Rng>(sig: Signature, max_size: usize, rng: &mut R) -> DependenceProblem {
    let vars = ["x1".to_string(), "x2".to_string()];
    let n = rng.gen_range(1..=3);
    let terms = (0..n).map(|_| random_term(sig, &vars, max_size, rng)).collect();
    DependenceProblem::new(sig, terms, Vec::new()).expect("sampled terms fit the signature")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_size_and_signature() {
        let vars: Vec<String> = ["y1", "y2"].iter().map(|s| s.to_string()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for sig in Signature::ALL {
            for _ in 0..200 {
                let t = random_term(sig, &vars, 7, &mut rng);
                assert!(t.size() <= 7);
                t.check_signature(sig).unwrap();
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let vars = vec!["y1".to_string()];
        let a: Vec<Term> = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            (0..20).map(|_| random_term(Signature::Abl, &vars, 6, &mut rng)).collect()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b: Vec<Term> = (0..20).map(|_| random_term(Signature::Abl, &vars, 6, &mut rng)).collect();
        assert_eq!(a, b);
    }
}
