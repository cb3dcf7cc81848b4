//! Abelian ℓ-groups: validity, consequence, and dependence by cone cover.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;

use super::cond::{negate, satisfy, tree_cond, tree_zero, Cmp, Cond};
use super::fm::{feasible, is_contradictory, project_out, random_point, simplify};
use super::form::{int, Cone, Constraint, LinForm, Point, Rel};
use super::pl::{compile_pl, eval_abl, pl_regions, PLTree};
use crate::error::{Error, Result};
use crate::problem::DependenceProblem;
use crate::term::{render_rational, witness_var, Equation, Relation, Signature, Term};
use crate::verdict::{Certificate, Evidence, Verdict};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LaValidity {
    Valid,
    Invalid { point: Point },
}

impl LaValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, LaValidity::Valid)
    }
}

/// Difference tree of an equation: `rhs − lhs`. For `s ≤ t` it must be
/// nonnegative; for `s ≈ t` it must vanish.
fn difference(eq: &Equation) -> Result<PLTree> {
    compile_pl(&Term::add(eq.rhs.clone(), Term::neg(eq.lhs.clone())))
}

/// Points where `eq` fails.
fn failure(eq: &Equation) -> Result<Cond> {
    eq.check_signature(Signature::Abl)?;
    let d = difference(eq)?;
    Ok(match eq.relation {
        Relation::Leq => tree_cond(&d, Cmp::Neg),
        Relation::Eq => Cond::Any(vec![tree_cond(&d, Cmp::Neg), tree_cond(&d, Cmp::Pos)]),
    })
}

/// Whether `eq` holds at `p`, evaluated directly on the terms.
pub fn holds_at(eq: &Equation, p: &Point) -> Result<bool> {
    let l = eval_abl(&eq.lhs, p)?;
    let r = eval_abl(&eq.rhs, p)?;
    Ok(match eq.relation {
        Relation::Eq => l == r,
        Relation::Leq => l <= r,
    })
}

/// Small integer points first; most invalid equations fail on `{-1, 0, 1}ᵏ`.
fn grid_counterexample(eq: &Equation, vars: &[String]) -> Result<Option<Point>> {
    if vars.len() > 4 {
        return Ok(None);
    }
    let total = 3usize.pow(vars.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut p = Point::new();
        for v in vars {
            p.insert(v.clone(), int((c % 3) as i64 - 1));
            c /= 3;
        }
        if !holds_at(eq, &p)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Decides `⊨ eq` in abelian ℓ-groups, with an exact counterexample.
pub fn la_valid(eq: &Equation) -> Result<LaValidity> {
    let cond = failure(eq)?;
    let vars = eq.free_vars();
    if let Some(point) = grid_counterexample(eq, &vars)? {
        return Ok(LaValidity::Invalid { point });
    }
    Ok(match satisfy(&[], &cond, &vars) {
        Some(point) => LaValidity::Invalid { point },
        None => LaValidity::Valid,
    })
}

/// `Σ` as a condition: every difference tree vanishes.
fn sigma_cond(sigma: &[Equation]) -> Result<Cond> {
    let mut parts = Vec::new();
    for e in sigma {
        e.check_signature(Signature::Abl)?;
        let d = difference(&e.desugar())?;
        parts.push(tree_zero(&d));
    }
    Ok(Cond::All(parts))
}

/// Decides `Σ ⊨ eq`; the counterexample satisfies `Σ` and violates `eq`.
pub fn la_entails(sigma: &[Equation], eq: &Equation) -> Result<LaValidity> {
    if sigma.is_empty() {
        return la_valid(eq);
    }
    let cond = Cond::All(vec![sigma_cond(sigma)?, failure(eq)?]);
    let mut vars = eq.free_vars();
    for e in sigma {
        for v in e.free_vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    Ok(match satisfy(&[], &cond, &vars) {
        Some(point) => LaValidity::Invalid { point },
        None => LaValidity::Valid,
    })
}

/// A continuous piecewise-linear map `x̄ ↦ (t₁, …, tₙ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseMap {
    pub vars: Vec<String>,
    pub pieces: Vec<Piece>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub domain: Cone,
    pub rows: Vec<LinForm>,
}

impl PiecewiseMap {
    pub fn of_terms(terms: &[Term]) -> Result<PiecewiseMap> {
        let trees = terms.iter().map(compile_pl).collect::<Result<Vec<_>>>()?;
        let mut vars: Vec<String> = Vec::new();
        for t in terms {
            for v in t.free_vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let pieces = pl_regions(&trees)
            .into_iter()
            .map(|r| Piece {
                domain: Cone::new(vars.clone(), r.constraints),
                rows: r.forms,
            })
            .collect();
        Ok(PiecewiseMap { vars, pieces })
    }

    /// Pieces whose domain contains `p`.
    pub fn pieces_at<'a>(&'a self, p: &'a Point) -> impl Iterator<Item = &'a Piece> + 'a {
        self.pieces.iter().filter(move |piece| piece.domain.contains(p))
    }

    /// The value at `p`, or `None` if no piece contains it or two pieces disagree.
    pub fn eval(&self, p: &Point) -> Option<Vec<Rational>> {
        let mut value: Option<Vec<Rational>> = None;
        for piece in self.pieces_at(p) {
            let v: Vec<Rational> = piece.rows.iter().map(|f| f.eval(p)).collect();
            match &value {
                None => value = Some(v),
                Some(w) if *w == v => {}
                Some(_) => return None,
            }
        }
        value
    }
}

fn y_vars(n: usize) -> Vec<String> {
    (1..=n).map(witness_var).collect()
}

fn require_abl(problem: &DependenceProblem) -> Result<()> {
    if problem.variety != Signature::Abl {
        return Err(Error::InvalidArgument(format!(
            "expected an ABL problem, got {}",
            problem.variety
        )));
    }
    Ok(())
}

/// `A ⊆ B` for cones given by constraint lists.
fn cone_within(a: &[Constraint], b: &[Constraint], vars: &[String]) -> bool {
    b.iter().all(|c| satisfy(a, &negate(c), vars).is_none())
}

/// Drops cones contained in others, keeping the first of equal ones.
fn prune_cones(cones: Vec<Vec<Constraint>>, vars: &[String]) -> Vec<Vec<Constraint>> {
    let mut kept: Vec<Vec<Constraint>> = Vec::new();
    for c in cones {
        if kept.contains(&c) || kept.iter().any(|k| cone_within(&c, k, vars)) {
            continue;
        }
        kept.retain(|k| !cone_within(k, &c, vars));
        kept.push(c);
    }
    kept
}

/// Projection of `Σ ∪ {yᵢ = tᵢ}` onto the `y` coordinates, as closed cones.
pub fn project_graph(problem: &DependenceProblem) -> Result<Vec<Cone>> {
    require_abl(problem)?;
    let n = problem.n();
    let ys = y_vars(n);
    let xs = problem.x_vars();
    let mut trees = problem.terms.iter().map(compile_pl).collect::<Result<Vec<_>>>()?;
    for e in &problem.sigma {
        trees.push(difference(&e.desugar())?);
    }
    let mut raw: Vec<Vec<Constraint>> = Vec::new();
    for region in pl_regions(&trees) {
        let mut cs = region.constraints.clone();
        for f in &region.forms[n..] {
            cs.push(Constraint::eq(f.clone()));
        }
        for (y, f) in ys.iter().zip(&region.forms[..n]) {
            cs.push(Constraint::eq(LinForm::var(y.clone()).sub(f)));
        }
        let projected = project_out(&cs, &xs);
        if is_contradictory(&projected) {
            continue;
        }
        let projected = simplify(projected);
        if !raw.contains(&projected) {
            raw.push(projected);
        }
    }
    Ok(prune_cones(raw, &ys)
        .into_iter()
        .map(|cs| Cone::new(ys.clone(), cs))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coverage {
    Covered,
    Gap { point: Point },
}

/// Whether the cones cover the space spanned by `vars`.
pub fn cover_complement(cones: &[Cone], vars: &[String]) -> Coverage {
    let outside = Cond::All(
        cones
            .iter()
            .map(|c| Cond::Any(c.constraints.iter().map(negate).collect()))
            .collect(),
    );
    match satisfy(&[], &outside, vars) {
        Some(point) => Coverage::Gap { point },
        None => Coverage::Covered,
    }
}

/// `k·y` as a `k`-fold sum of `y` or `-y`.
fn multiple(y: &str, k: &BigInt) -> Vec<Term> {
    let unit = if k.is_negative() {
        Term::neg(Term::var(y))
    } else {
        Term::var(y)
    };
    let count: usize = k.abs().try_into().expect("coefficient fits in usize");
    vec![unit; count]
}

/// An integer linear form as an ℓ-group term.
pub fn form_term(f: &LinForm) -> Term {
    let (g, _) = f.primitive();
    let summands: Vec<Term> = g
        .integer_coeffs()
        .iter()
        .flat_map(|(v, k)| multiple(v, k))
        .collect();
    Term::fold(crate::term::Op::Add, summands).unwrap_or_else(Term::zero)
}

/// `⋁_b (0 ∧ ⋀ L)` over the cones; vanishes exactly on their union.
fn cover_witness(cones: &[Cone]) -> Equation {
    let pieces: Vec<Term> = cones
        .iter()
        .map(|c| {
            let mut atoms = vec![Term::zero()];
            for k in &c.constraints {
                atoms.push(form_term(&k.form));
                if k.rel == Rel::Eq {
                    atoms.push(form_term(&k.form.neg()));
                }
            }
            Term::fold(crate::term::Op::Meet, atoms).expect("nonempty")
        })
        .collect();
    let w = Term::fold(crate::term::Op::Join, pieces).unwrap_or_else(Term::zero);
    Equation::eq(w, Term::zero()).resugar()
}

pub fn la_dependence(problem: &DependenceProblem) -> Result<Verdict> {
    require_abl(problem)?;
    let ys = y_vars(problem.n());
    let cones = project_graph(problem)?;
    let rendered: Vec<Vec<String>> = cones.iter().map(Cone::render).collect();
    Ok(match cover_complement(&cones, &ys) {
        Coverage::Covered => Verdict::Independent {
            certificate: Certificate::ConeCover { cones: rendered },
        },
        Coverage::Gap { point } => Verdict::Dependent {
            witness: cover_witness(&cones),
            evidence: Evidence::Gap {
                point: ys
                    .iter()
                    .map(|y| render_rational(&point.get(y).cloned().unwrap_or_else(Rational::zero)))
                    .collect(),
                cones: rendered,
            },
        },
    })
}

/// One elimination step in the shape `0 ≤ sᵢ + n·x`, `0 ≤ tⱼ − n·x`,
/// `0 ≤ uₖ`: lower and upper bounds are scaled to a common `±n` and summed
/// pairwise. Equations contribute both directions.
pub fn la_eliminate_conjunctive(gamma: &[Constraint], x: &str) -> Vec<Constraint> {
    let mut cs: Vec<Constraint> = Vec::new();
    for c in gamma {
        match c.rel {
            Rel::Eq => {
                cs.push(Constraint::ge(c.form.clone()));
                cs.push(Constraint::ge(c.form.neg()));
            }
            _ => cs.push(c.clone()),
        }
    }
    let cs: Vec<Constraint> = cs
        .into_iter()
        .map(|c| {
            let (f, _) = c.form.primitive();
            Constraint::new(f, c.rel)
        })
        .collect();
    let mut n = BigInt::from(1);
    for c in &cs {
        let a = c.form.coeff(x);
        if !a.is_zero() {
            n = n.lcm(&a.abs().to_integer());
        }
    }
    let n = Rational::from_integer(n);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut rest = Vec::new();
    for c in &cs {
        let a = c.form.coeff(x);
        if a.is_zero() {
            rest.push(c.clone());
            continue;
        }
        let scaled = Constraint::new(c.form.scale(&(&n / a.abs())), c.rel);
        if a.is_positive() {
            lower.push(scaled);
        } else {
            upper.push(scaled);
        }
    }
    let mut out = Vec::new();
    for s in &lower {
        for t in &upper {
            let rel = if s.rel == Rel::Gt || t.rel == Rel::Gt { Rel::Gt } else { Rel::Ge };
            out.push(Constraint::new(s.form.add(&t.form), rel));
        }
    }
    out.extend(rest);
    out
}

/// Random rational point with coordinates `a/b`, `|a| ≤ 50`, `1 ≤ b ≤ 8`.
pub fn random_rational_point<R: Rng>(vars: &[String], rng: &mut R) -> Point {
    vars.iter()
        .map(|v| {
            let q = Rational::new(rng.gen_range(-50..=50).into(), rng.gen_range(1..=8).into());
            (v.clone(), q)
        })
        .collect()
}

/// Random points of `ℝ^{x̄}` satisfying `Σ`. Without `Σ` these are uniform
/// small rationals; otherwise each is drawn from a random feasible piece of
/// the solution set.
pub fn sample_sigma_points<R: Rng>(
    sigma: &[Equation],
    vars: &[String],
    count: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if sigma.is_empty() {
        return Ok((0..count).map(|_| random_rational_point(vars, rng)).collect());
    }
    let trees = sigma
        .iter()
        .map(|e| difference(&e.desugar()))
        .collect::<Result<Vec<_>>>()?;
    let pieces: Vec<Vec<Constraint>> = pl_regions(&trees)
        .into_iter()
        .map(|r| {
            let mut cs = r.constraints;
            cs.extend(r.forms.into_iter().map(Constraint::eq));
            simplify(cs)
        })
        .filter(|cs| feasible(cs))
        .collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count && !pieces.is_empty() {
        let cs = &pieces[rng.gen_range(0..pieces.len())];
        if let Some(p) = random_point(cs, vars, rng) {
            out.push(p);
        }
    }
    Ok(out)
}

/// `(t₁(p), …, tₙ(p))` as a point over `y₁ … yₙ`.
pub fn graph_point(terms: &[Term], p: &Point) -> Result<Point> {
    terms
        .iter()
        .enumerate()
        .map(|(i, t)| Ok((witness_var(i + 1), eval_abl(t, p)?)))
        .collect()
}
