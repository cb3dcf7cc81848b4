//! Engines against the finite and brute-force oracles.

use depdec_core::oracle::{brute_dependence, lattices, marczewski_check, refute_in};
use depdec_core::{
    backend, decide, dlat_leq, instantiate, lat_leq, parse_term, random_problem, random_term, render_equation, render_term,
    DependenceProblem, Equation, Signature, Term,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn problem(sig: Signature, terms: &[&str]) -> DependenceProblem {
    DependenceProblem::new(sig, terms.iter().map(|t| parse_term(t, sig).unwrap()).collect(), vec![]).unwrap()
}

fn lat_vars() -> Vec<String> {
    ["a", "b", "c"].iter().map(|s| s.to_string()).collect()
}

#[test]
fn engines_agree_with_brute_force_on_random_instances() {
    for sig in Signature::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = random_problem(sig, 4, &mut rng);
            let engine = decide(&p).unwrap();
            if let Some(w) = brute_dependence(&p, 7).unwrap() {
                let terms: Vec<String> = p.terms.iter().map(render_term).collect();
                assert!(engine.is_dependent(), "{sig} {terms:?}: brute force found {}", render_equation(&w));
            }
        }
    }
}

#[test]
fn marczewski_agrees_with_brute_force() {
    let cases: &[(Signature, &[&str], usize)] = &[
        (Signature::Lat, &["x", "x v y"], 5),
        (Signature::Lat, &["x"], 5),
        (Signature::DLat, &["x1 ^ (x2 v x3)", "x2 v (x1 ^ x3)"], 7),
        (Signature::Sgrp, &["x", "y"], 4),
        (Signature::Sgrp, &["x", "x * y", "y * x"], 6),
        (Signature::Sgrp, &["x", "x"], 2),
        (Signature::Grp, &["x", "y"], 5),
        (Signature::Abl, &["x v 0"], 5),
        (Signature::Abl, &["x1 v x2", "x1 ^ x2"], 6),
        (Signature::VecQ, &["x1", "2|x1"], 5),
    ];
    for &(sig, terms, bound) in cases {
        let p = problem(sig, terms);
        let m = marczewski_check(&p, bound).unwrap();
        let b = brute_dependence(&p, bound).unwrap();
        assert_eq!(m, b, "{sig} {terms:?}");
    }
}

/// `F(x)` is abelian, so the commutator found by the free search is no
/// Marczewski witness there; the first one is the power relation.
#[test]
fn marczewski_in_a_one_generated_group() {
    let p = problem(Signature::Grp, &["x * x", "x * x * x"]);
    let free = brute_dependence(&p, 6).unwrap().map(|e| render_equation(&e));
    assert_eq!(free.as_deref(), Some("y1 * y2 = y2 * y1"));
    assert_eq!(marczewski_check(&p, 6).unwrap(), None);
    let m = marczewski_check(&p, 8).unwrap().map(|e| render_equation(&e));
    assert_eq!(m.as_deref(), Some("y2 * y2 = y1 * (y1 * y1)"));
}

#[test]
fn every_brute_witness_is_a_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for sig in Signature::ALL {
        for _ in 0..30 {
            let p = random_problem(sig, 4, &mut rng);
            if let Some(w) = brute_dependence(&p, 6).unwrap() {
                let b = backend(sig);
                assert!(b.valid(&instantiate(&w, &p.terms).unwrap()).unwrap().is_valid());
                assert!(!b.valid(&w).unwrap().is_valid());
            }
        }
    }
}

#[test]
fn valid_lattice_inequations_have_no_finite_refutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let vars = lat_vars();
    let mut valid = 0;
    for k in 0..200 {
        let s = random_term(Signature::Lat, &vars, 5, &mut rng);
        let t = random_term(Signature::Lat, &vars, 5, &mut rng);
        // Every third pair is forced valid so the sample is not vacuous.
        let (l, r) = match k % 3 {
            0 => (Term::meet(s.clone(), t.clone()), Term::join(s, t)),
            1 => (s.clone(), Term::join(t, s)),
            _ => (s, t),
        };
        let (holds, trace) = lat_leq(&l, &r).unwrap();
        assert!(trace.verify());
        if holds {
            valid += 1;
            let eq = Equation::leq(l.clone(), r.clone());
            assert!(refute_in(&eq, lattices()).unwrap().is_none(), "{}", render_equation(&eq));
            assert!(dlat_leq(&l, &r).unwrap().0);
        }
    }
    assert!(valid >= 134);
}

#[test]
fn lat_leq_is_a_preorder_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let vars = lat_vars();
    for _ in 0..200 {
        let a = random_term(Signature::Lat, &vars, 5, &mut rng);
        let b = random_term(Signature::Lat, &vars, 5, &mut rng);
        let c = random_term(Signature::Lat, &vars, 5, &mut rng);
        assert!(lat_leq(&a, &a).unwrap().0);
        assert!(lat_leq(&a, &Term::join(a.clone(), a.clone())).unwrap().0);
        assert!(lat_leq(&Term::meet(a.clone(), Term::join(a.clone(), b.clone())), &a).unwrap().0);
        let ab = lat_leq(&a, &b).unwrap().0;
        let bc = lat_leq(&b, &c).unwrap().0;
        if ab && bc {
            assert!(lat_leq(&a, &c).unwrap().0);
        }
    }
}
