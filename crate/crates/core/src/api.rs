//! Uniform entry point over all engines, plus the property harnesses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{dlat_leq, lat_valid, lattice_dependence, RefutingSet};
use crate::linear::{self, LaValidity};
use crate::oracle;
use crate::problem::DependenceProblem;
use crate::sample::random_term;
use crate::term::{
    instantiate, render_equation, witness_vars, Equation, Relation, Signature, Substitution, Term,
};
use crate::verdict::{Certificate, Evidence, Verdict};
use crate::word;

/// Result of a validity check, with a human-readable counterexample when one
/// is available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid { counterexample: Option<String> },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }

    fn from_bool(valid: bool) -> Validity {
        if valid {
            Validity::Valid
        } else {
            Validity::Invalid { counterexample: None }
        }
    }
}

pub trait VarietyBackend: Sync {
    fn signature(&self) -> Signature;

    fn supports_sigma(&self) -> bool;

    /// Decides `⊨ eq`.
    fn valid(&self, eq: &Equation) -> Result<Validity>;

    /// Decides `Σ ⊨ eq`.
    fn entails(&self, sigma: &[Equation], eq: &Equation) -> Result<Validity> {
        if sigma.is_empty() {
            self.valid(eq)
        } else {
            Err(Error::UnsupportedSigma(self.signature()))
        }
    }

    fn dependence(&self, problem: &DependenceProblem) -> Result<Verdict>;
}

fn render_assignment<'a, V: std::fmt::Display + 'a>(pairs: impl IntoIterator<Item = (&'a String, V)>) -> String {
    pairs
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub struct LatBackend;
pub struct DLatBackend;
pub struct SgrpBackend;
pub struct GrpBackend;
pub struct AblBackend;
pub struct VecQBackend;

impl VarietyBackend for LatBackend {
    fn signature(&self) -> Signature {
        Signature::Lat
    }
    fn supports_sigma(&self) -> bool {
        false
    }
    fn valid(&self, eq: &Equation) -> Result<Validity> {
        if lat_valid(eq)? {
            return Ok(Validity::Valid);
        }
        let counterexample = oracle::refute_in(eq, oracle::lattices())?.map(|(a, asg)| {
            format!("in {}: {}", a.name, render_assignment(asg.iter()))
        });
        Ok(Validity::Invalid { counterexample })
    }
    fn dependence(&self, problem: &DependenceProblem) -> Result<Verdict> {
        lattice_dependence(Signature::Lat, &problem.terms)
    }
}

impl VarietyBackend for DLatBackend {
    fn signature(&self) -> Signature {
        Signature::DLat
    }
    fn supports_sigma(&self) -> bool {
        false
    }
    fn valid(&self, eq: &Equation) -> Result<Validity> {
        // `s ≈ t` fails iff one of the two inequalities does.
        let sides = match eq.relation {
            Relation::Leq => vec![(&eq.lhs, &eq.rhs)],
            Relation::Eq => vec![(&eq.lhs, &eq.rhs), (&eq.rhs, &eq.lhs)],
        };
        for (s, t) in sides {
            if let (false, Some(asg)) = dlat_leq(s, t)? {
                let shown = asg.iter().map(|(k, v)| (k, u8::from(*v)));
                return Ok(Validity::Invalid {
                    counterexample: Some(format!("in C2: {}", render_assignment(shown))),
                });
            }
        }
        Ok(Validity::Valid)
    }
    fn dependence(&self, problem: &DependenceProblem) -> Result<Verdict> {
        lattice_dependence(Signature::DLat, &problem.terms)
    }
}

impl VarietyBackend for SgrpBackend {
    fn signature(&self) -> Signature {
        Signature::Sgrp
    }
    fn supports_sigma(&self) -> bool {
        false
    }
    fn valid(&self, eq: &Equation) -> Result<Validity> {
        let l = word::sg_normalize(&eq.lhs)?;
        let r = word::sg_normalize(&eq.rhs)?;
        Ok(if l == r {
            Validity::Valid
        } else {
            Validity::Invalid {
                counterexample: Some(format!(
                    "{} != {}",
                    word::render_sword(&l),
                    word::render_sword(&r)
                )),
            }
        })
    }
    fn dependence(&self, problem: &DependenceProblem) -> Result<Verdict> {
        word::sg_dependence(&problem.terms)
    }
}

impl VarietyBackend for GrpBackend {
    fn signature(&self) -> Signature {
        Signature::Grp
    }
    fn supports_sigma(&self) -> bool {
        false
    }
    fn valid(&self, eq: &Equation) -> Result<Validity> {
        let l = word::grp_normalize(&eq.lhs)?;
        let r = word::grp_normalize(&eq.rhs)?;
        Ok(if l == r {
            Validity::Valid
        } else {
            Validity::Invalid {
                counterexample: Some(format!("{l} != {r}")),
            }
        })
    }
    fn dependence(&self, problem: &DependenceProblem) -> Result<Verdict> {
        word::grp_dependence(&problem.terms)
    }
}

fn la_validity(v: LaValidity) -> Validity {
    match v {
        LaValidity::Valid => Validity::Valid,
        LaValidity::Invalid { point } => Validity::Invalid {
            counterexample: Some(render_assignment(
                point.iter().map(|(k, q)| (k, crate::term::render_rational(q))),
            )),
        },
    }
}

impl VarietyBackend for AblBackend {
    fn signature(&self) -> Signature {
        Signature::Abl
    }
    fn supports_sigma(&self) -> bool {
        true
    }
    fn valid(&self, eq: &Equation) -> Result<Validity> {
        Ok(la_validity(linear::la_valid(eq)?))
    }
    fn entails(&self, sigma: &[Equation], eq: &Equation) -> Result<Validity> {
        Ok(la_validity(linear::la_entails(sigma, eq)?))
    }
    fn dependence(&self, problem: &DependenceProblem) -> Result<Verdict> {
        linear::la_dependence(problem)
    }
}

impl VarietyBackend for VecQBackend {
    fn signature(&self) -> Signature {
        Signature::VecQ
    }
    fn supports_sigma(&self) -> bool {
        true
    }
    fn valid(&self, eq: &Equation) -> Result<Validity> {
        Ok(Validity::from_bool(linear::vs_valid(eq)?))
    }
    fn entails(&self, sigma: &[Equation], eq: &Equation) -> Result<Validity> {
        Ok(Validity::from_bool(linear::vs_entails(sigma, eq)?))
    }
    fn dependence(&self, problem: &DependenceProblem) -> Result<Verdict> {
        linear::vs_dependence(problem)
    }
}

pub fn backend(sig: Signature) -> &'static dyn VarietyBackend {
    match sig {
        Signature::Lat => &LatBackend,
        Signature::DLat => &DLatBackend,
        Signature::Sgrp => &SgrpBackend,
        Signature::Grp => &GrpBackend,
        Signature::Abl => &AblBackend,
        Signature::VecQ => &VecQBackend,
    }
}

pub fn backend_by_name(name: &str) -> Result<&'static dyn VarietyBackend> {
    Signature::from_name(name)
        .map(backend)
        .ok_or_else(|| Error::UnknownVariety(name.to_string()))
}

/// Checks a dependent verdict: `Σ ⊨ ε(t̄)` and `⊭ ε`, plus the gap point
/// for ℓ-groups.
pub fn verify_verdict(problem: &DependenceProblem, verdict: &Verdict) -> Result<()> {
    let Verdict::Dependent { witness, evidence } = verdict else {
        return Ok(());
    };
    let b = backend(problem.variety);
    let fail = |what: &str| {
        Err(Error::Internal(format!(
            "witness {} {what}",
            render_equation(witness)
        )))
    };
    let inst = instantiate(witness, &problem.terms)?;
    if !b.entails(&problem.sigma, &inst)?.is_valid() {
        return fail("does not hold at the terms");
    }
    if b.valid(witness)?.is_valid() {
        return fail("is valid");
    }
    if let Evidence::Gap { point, .. } = evidence {
        let p: linear::Point = witness_vars(problem.n())
            .iter()
            .zip(point)
            .map(|(y, q)| {
                let Term::Var(name) = y else { unreachable!() };
                let value: crate::Rational = q
                    .parse()
                    .map_err(|_| Error::Internal(format!("bad gap coordinate {q}")))?;
                Ok((name.clone(), value))
            })
            .collect::<Result<_>>()?;
        if linear::abl::holds_at(witness, &p)? {
            return fail("holds at the gap point");
        }
    }
    Ok(())
}

/// Dispatches to the engine for the problem's variety and re-verifies the
/// witness before returning.
pub fn decide(problem: &DependenceProblem) -> Result<Verdict> {
    let b = backend(problem.variety);
    if !problem.sigma.is_empty() && !b.supports_sigma() {
        return Err(Error::UnsupportedSigma(problem.variety));
    }
    let verdict = b.dependence(problem)?;
    verify_verdict(problem, &verdict)?;
    Ok(verdict)
}

/// Scans `delta` in order; the first member valid at the terms is a witness.
pub fn check_refuting(
    terms: &[Term],
    delta: &RefutingSet,
    valid: &dyn Fn(&Equation) -> bool,
) -> Result<Verdict> {
    if terms.len() != delta.n {
        return Err(Error::ArityMismatch {
            expected: delta.n,
            found: terms.len(),
        });
    }
    for (index, eq) in delta.equations.iter().enumerate() {
        if valid(&instantiate(eq, terms)?) {
            return Ok(Verdict::Dependent {
                witness: eq.clone(),
                evidence: Evidence::RefutingSet {
                    index,
                    size: delta.equations.len(),
                    trace: None,
                },
            });
        }
    }
    Ok(Verdict::Independent {
        certificate: Certificate::RefutingSetExhausted {
            checked: delta.equations.len(),
        },
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HarnessReport {
    pub checked: usize,
    /// Equations valid at the terms (over `Σ`) but not valid outright.
    pub violations: Vec<Equation>,
}

impl HarnessReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples random pairs `u ≈ v` over `ȳ` and reports those with
/// `Σ ⊨ u(t̄) ≈ v(t̄)` but `⊭ u ≈ v`. `include`, if given, is checked first.
pub fn harness_independence(
    problem: &DependenceProblem,
    samples: usize,
    max_size: usize,
    seed: u64,
    include: Option<&Equation>,
) -> Result<HarnessReport> {
    let b = backend(problem.variety);
    let ys: Vec<String> = (1..=problem.n()).map(crate::term::witness_var).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HarnessReport::default();
    let mut candidates: Vec<Equation> = include.into_iter().cloned().collect();
    while candidates.len() < samples.max(candidates.len()) {
        let u = random_term(problem.variety, &ys, max_size, &mut rng);
        let v = random_term(problem.variety, &ys, max_size, &mut rng);
        candidates.push(Equation::eq(u, v));
    }
    for eq in candidates {
        report.checked += 1;
        let inst = instantiate(&eq, &problem.terms)?;
        if b.entails(&problem.sigma, &inst)?.is_valid() && !b.valid(&eq)?.is_valid() {
            report.violations.push(eq);
        }
    }
    Ok(report)
}

/// `true` unless `σ` refutes `Γ ⊦̃ Δ`: some `σ(γ)` is invalid or some
/// `σ(δ)` is valid.
pub fn check_admissible_instance(
    gamma: &[Equation],
    delta: &[Equation],
    sigma: &Substitution,
    valid: &dyn Fn(&Equation) -> bool,
) -> bool {
    gamma.iter().any(|g| !valid(&g.subst(sigma))) || delta.iter().any(|d| valid(&d.subst(sigma)))
}

/// An admissibility statement `Γ ⊦̃ Δ` together with the variables a
/// substitution must leave fixed (generators, for the irreducibility laws).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityLaw {
    pub name: String,
    pub gamma: Vec<Equation>,
    pub delta: Vec<Equation>,
    pub fixed: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub checked: usize,
    /// Samples whose premises all held, so the conclusion side was tested.
    pub premises_held: usize,
    pub violations: Vec<Substitution>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn law(name: &str, gamma: &[&str], delta: &[&str], fixed: &[&str]) -> AdmissibilityLaw {
    let p = |s: &&str| crate::term::parse_equation(s, Signature::Lat).expect("well-formed law");
    AdmissibilityLaw {
        name: name.into(),
        gamma: gamma.iter().map(p).collect(),
        delta: delta.iter().map(p).collect(),
        fixed: fixed.iter().map(|s| s.to_string()).collect(),
    }
}

/// The lattice laws (i)–(viii) and Whitman's condition. Two-part laws are
/// split; (vii) and (viii) keep `y` a generator.
pub fn lattice_admissibility_laws() -> Vec<AdmissibilityLaw> {
    vec![
        law("(i)", &["x1 <= y", "x2 <= y"], &["x1 v x2 <= y"], &[]),
        law("(ii.1)", &["x1 v x2 <= y"], &["x1 <= y"], &[]),
        law("(ii.2)", &["x1 v x2 <= y"], &["x2 <= y"], &[]),
        law("(iii.1)", &["x <= y1"], &["x <= y1 v y2"], &[]),
        law("(iii.2)", &["x <= y2"], &["x <= y1 v y2"], &[]),
        law("(iv)", &["x <= y1", "x <= y2"], &["x <= y1 ^ y2"], &[]),
        law("(v.1)", &["x <= y1 ^ y2"], &["x <= y1"], &[]),
        law("(v.2)", &["x <= y1 ^ y2"], &["x <= y2"], &[]),
        law("(vi.1)", &["x1 <= y"], &["x1 ^ x2 <= y"], &[]),
        law("(vi.2)", &["x2 <= y"], &["x1 ^ x2 <= y"], &[]),
        law("(vii)", &["y <= t1 v t2"], &["y <= t1", "y <= t2"], &["y"]),
        law("(viii)", &["s1 ^ s2 <= y"], &["s1 <= y", "s2 <= y"], &["y"]),
        law(
            "whitman",
            &["x1 ^ x2 <= y1 v y2"],
            &["x1 <= y1 v y2", "x2 <= y1 v y2", "x1 ^ x2 <= y1", "x1 ^ x2 <= y2"],
            &[],
        ),
    ]
}

/// Checks `law` on `samples` random substitutions into lattice terms over
/// `p, q` (and the fixed generators) of size at most `max_size`.
pub fn admissibility_harness(
    law: &AdmissibilityLaw,
    samples: usize,
    max_size: usize,
    seed: u64,
    valid: &dyn Fn(&Equation) -> bool,
) -> AdmissibilityReport {
    let mut vars: Vec<String> = law.gamma.iter().chain(&law.delta).flat_map(|e| e.free_vars()).collect();
    vars.sort();
    vars.dedup();
    let mut pool: Vec<String> = vec!["p".into(), "q".into()];
    pool.extend(law.fixed.iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AdmissibilityReport::default();
    for _ in 0..samples {
        let sigma: Substitution = vars
            .iter()
            .filter(|v| !law.fixed.contains(v))
            .map(|v| (v.clone(), random_term(Signature::Lat, &pool, max_size, &mut rng)))
            .collect();
        report.checked += 1;
        if law.gamma.iter().all(|g| valid(&g.subst(&sigma))) {
            report.premises_held += 1;
        }
        if !check_admissible_instance(&law.gamma, &law.delta, &sigma, valid) {
            report.violations.push(sigma);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lat_holds, refuting_set};
    use crate::term::{parse_equation, parse_term};

    fn problem(sig: Signature, terms: &[&str]) -> DependenceProblem {
        DependenceProblem::new(sig, terms.iter().map(|t| parse_term(t, sig).unwrap()).collect(), vec![])
            .unwrap()
    }

    #[test]
    fn decide_examples() {
        let p = problem(Signature::DLat, &["x1 ^ (x2 v x3)", "x2 v (x1 ^ x3)"]);
        assert_eq!(render_equation(decide(&p).unwrap().witness().unwrap()), "y1 <= y2");
        let p = problem(Signature::Grp, &["x"]);
        assert!(!decide(&p).unwrap().is_dependent());
        let p = problem(Signature::Abl, &["x v 0"]);
        assert_eq!(render_equation(decide(&p).unwrap().witness().unwrap()), "0 <= y1");
    }

    #[test]
    fn sigma_support() {
        let sig = Signature::Lat;
        let p = DependenceProblem::new(
            sig,
            vec![parse_term("x", sig).unwrap()],
            vec![parse_equation("x <= z", sig).unwrap()],
        )
        .unwrap();
        assert!(matches!(decide(&p), Err(Error::UnsupportedSigma(Signature::Lat))));
        assert!(matches!(backend_by_name("RING"), Err(Error::UnknownVariety(_))));
    }

    #[test]
    fn refuting_scan_examples() {
        let lat = |s: &str| parse_term(s, Signature::Lat).unwrap();
        let valid = |e: &Equation| lat_valid(e).unwrap();
        let d2 = refuting_set(Signature::Lat, 2).unwrap();
        let v = check_refuting(&[lat("x1 ^ (x2 v x3)"), lat("x2 v (x1 ^ x3)")], &d2, &valid).unwrap();
        assert!(!v.is_dependent());
        let v = check_refuting(&[lat("x"), lat("x v y")], &d2, &valid).unwrap();
        assert_eq!(render_equation(v.witness().unwrap()), "y1 <= y2");
        let empty = RefutingSet {
            variety: Signature::Lat,
            n: 2,
            equations: vec![],
        };
        assert!(!check_refuting(&[lat("x"), lat("y")], &empty, &valid).unwrap().is_dependent());
        assert!(matches!(
            check_refuting(&[lat("x")], &d2, &valid),
            Err(Error::ArityMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn lattice_decide_is_the_refuting_scan() {
        let p = problem(Signature::Lat, &["x", "x v y", "y"]);
        let direct = check_refuting(
            &p.terms,
            &refuting_set(Signature::Lat, 3).unwrap(),
            &|e: &Equation| lat_valid(e).unwrap(),
        )
        .unwrap();
        assert_eq!(decide(&p).unwrap().witness(), direct.witness());
    }

    #[test]
    fn harness_examples() {
        let p = problem(Signature::Sgrp, &["x", "x"]);
        let r = harness_independence(&p, 50, 3, 1, None).unwrap();
        assert!(r.violations.iter().any(|e| render_equation(e) == "y1 = y2"));
        let p = problem(Signature::Lat, &["x1 ^ (x2 v x3)", "x2 v (x1 ^ x3)"]);
        assert!(harness_independence(&p, 500, 5, 2, None).unwrap().passed());
    }

    #[test]
    fn admissible_instances() {
        let lat = |s: &str| parse_equation(s, Signature::Lat).unwrap();
        let valid = |e: &Equation| lat_valid(e).unwrap();
        let id = Substitution::new();
        assert!(check_admissible_instance(
            &[lat("x1 v x2 <= y")],
            &[lat("x1 <= y")],
            &id,
            &valid
        ));
        let mut both = Substitution::new();
        both.insert("y1".into(), Term::var("x"));
        both.insert("y2".into(), Term::var("x"));
        assert!(!check_admissible_instance(&[lat("y1 <= y2")], &[], &both, &valid));
        assert!(lat_holds(&parse_term("x", Signature::Lat).unwrap(), &parse_term("x v y", Signature::Lat).unwrap()).unwrap());
        let whitman = &lattice_admissibility_laws()[12];
        assert!(check_admissible_instance(&whitman.gamma, &whitman.delta, &id, &valid));
    }

    #[test]
    fn admissibility_laws_hold() {
        let valid = |e: &Equation| lat_valid(e).unwrap();
        for law in lattice_admissibility_laws() {
            let r = admissibility_harness(&law, 50, 5, 3, &valid);
            assert!(r.passed(), "{}", law.name);
            assert!(r.premises_held > 0, "{} was never exercised", law.name);
        }
    }

    #[test]
    fn admissibility_harness_catches_false_laws() {
        let valid = |e: &Equation| lat_valid(e).unwrap();
        let bogus = law("bogus", &["x <= y1 v y2"], &["x <= y1", "x <= y2"], &[]);
        assert!(!admissibility_harness(&bogus, 200, 5, 3, &valid).passed());
    }
}
