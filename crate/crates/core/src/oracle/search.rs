//! Exhaustive searches: refutations in finite algebras and bounded
//! enumeration of dependence witnesses.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::algebra::{assignments, holds, Assignment, FiniteAlgebra};
use super::catalog::algebra;
use crate::error::{Error, Result};
use crate::lattice::{dlat_valid, lat_valid};
use crate::linear::{self, vecq::Echelon, LinForm};
use crate::problem::DependenceProblem;
use crate::term::{instantiate, render_term, witness_var, Equation, Op, Signature, Term};
use crate::word::{sg_valid, grp_valid, GWord, SWord};
use crate::Rational;

/// First refutation of `eq` in catalog order, with the first refuting
/// assignment (first variable varying fastest).
pub fn refute_in<'a>(
    eq: &Equation,
    algebras: &[&'a FiniteAlgebra],
) -> Result<Option<(&'a FiniteAlgebra, Assignment)>> {
    let vars = eq.free_vars();
    for &a in algebras {
        if !a.supports_equation(eq) {
            continue;
        }
        for asg in assignments(&vars, a.size) {
            if !holds(eq, a, &asg)? {
                return Ok(Some((a, asg)));
            }
        }
    }
    Ok(None)
}

/// A value of a term in one evaluation context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Val {
    Elem(usize),
    Word(SWord),
    Group(GWord),
    Form(LinForm),
    Int(i128),
}

/// A list of evaluation contexts of one kind. For table-based kinds each
/// context carries its algebra.
struct Space {
    sig: Signature,
    algebras: Vec<Option<&'static FiniteAlgebra>>,
}

impl Space {
    fn len(&self) -> usize {
        self.algebras.len()
    }

    fn constant(&self, op: &Op) -> Val {
        match op {
            Op::Unit => Val::Group(GWord::identity()),
            Op::Zero => match self.sig {
                Signature::VecQ => Val::Form(LinForm::zero()),
                _ => Val::Int(0),
            },
            _ => unreachable!("nullary operations only"),
        }
    }

    fn apply(&self, ctx: usize, op: &Op, args: &[&Val]) -> Val {
        if let Some(a) = self.algebras[ctx] {
            let (Val::Elem(x), Val::Elem(y)) = (args[0], args[1]) else { unreachable!() };
            return Val::Elem(a.table(op).expect("lattice operation")[*x][*y]);
        }
        match (op, args) {
            (Op::Mul, [Val::Word(u), Val::Word(v)]) => Val::Word([u.as_slice(), v.as_slice()].concat()),
            (Op::Mul, [Val::Group(u), Val::Group(v)]) => Val::Group(u.mul(v)),
            (Op::Inv, [Val::Group(u)]) => Val::Group(u.inverse()),
            (Op::Add, [Val::Form(u), Val::Form(v)]) => Val::Form(u.add(v)),
            (Op::Neg, [Val::Form(u)]) => Val::Form(u.neg()),
            (Op::Scale(q), [Val::Form(u)]) => Val::Form(u.scale(q)),
            (Op::Add, [Val::Int(u), Val::Int(v)]) => Val::Int(u + v),
            (Op::Neg, [Val::Int(u)]) => Val::Int(-u),
            (Op::Meet, [Val::Int(u), Val::Int(v)]) => Val::Int(*u.min(v)),
            (Op::Join, [Val::Int(u), Val::Int(v)]) => Val::Int(*u.max(v)),
            _ => unreachable!("operation outside the signature"),
        }
    }

    /// Pointwise operation on value vectors.
    fn lift(&self, op: &Op, args: &[&Vec<Val>]) -> Vec<Val> {
        (0..self.len())
            .map(|c| {
                let here: Vec<&Val> = args.iter().map(|a| &a[c]).collect();
                self.apply(c, op, &here)
            })
            .collect()
    }

    fn eval(&self, t: &Term, leaves: &HashMap<String, Vec<Val>>) -> Vec<Val> {
        match t {
            Term::Var(v) => leaves[v].clone(),
            Term::App(op, args) if args.is_empty() => vec![self.constant(op); self.len()],
            Term::App(op, args) => {
                let vals: Vec<Vec<Val>> = args.iter().map(|a| self.eval(a, leaves)).collect();
                let refs: Vec<&Vec<Val>> = vals.iter().collect();
                self.lift(op, &refs)
            }
        }
    }
}

/// Per-algebra cap on enumerated assignments.
const MAX_ASSIGNMENTS: usize = 4096;

/// Contexts for `vars`: assignments into finite algebras, symbolic values
/// for word and linear kinds, integer points for ℓ-groups.
fn space_for(
    sig: Signature,
    vars: &[String],
    int_points: &[Vec<i128>],
) -> (Space, HashMap<String, Vec<Val>>) {
    let mut leaves: HashMap<String, Vec<Val>> = vars.iter().map(|v| (v.clone(), Vec::new())).collect();
    let mut algebras = Vec::new();
    match sig {
        Signature::Lat | Signature::DLat => {
            let names: &[&str] = if sig == Signature::Lat { &["C2", "N5", "M3"] } else { &["C2"] };
            for name in names {
                let a = algebra(name).expect("catalog lattice");
                for asg in assignments(vars, a.size).take(MAX_ASSIGNMENTS) {
                    algebras.push(Some(a));
                    for v in vars {
                        leaves.get_mut(v).expect("var").push(Val::Elem(asg[v]));
                    }
                }
            }
        }
        Signature::Abl => {
            for p in int_points {
                algebras.push(None);
                for (v, x) in vars.iter().zip(p) {
                    leaves.get_mut(v).expect("var").push(Val::Int(*x));
                }
            }
        }
        _ => {
            algebras.push(None);
            for v in vars {
                let val = match sig {
                    Signature::Sgrp => Val::Word(vec![v.clone()]),
                    Signature::Grp => Val::Group(GWord::letter(v.clone())),
                    _ => Val::Form(LinForm::var(v.clone())),
                };
                leaves.get_mut(v).expect("var").push(val);
            }
        }
    }
    (Space { sig, algebras }, leaves)
}

/// Integer points of `{-2..2}ᵏ` followed by `extra` seeded points in `[-30, 30]ᵏ`.
fn grid_points(k: usize, extra: usize) -> Vec<Vec<i128>> {
    let mut out = Vec::new();
    if k <= 4 {
        let total = 5usize.pow(k as u32);
        for mut code in 0..total {
            let mut p = Vec::with_capacity(k);
            for _ in 0..k {
                p.push((code % 5) as i128 - 2);
                code /= 5;
            }
            out.push(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..extra.max(if k > 4 { 200 } else { 0 }) {
        out.push((0..k).map(|_| rng.gen_range(-30..=30)).collect());
    }
    out
}

/// Integer points satisfying `Σ`: positive multiples of sampled points.
fn sigma_int_points(sigma: &[Equation], vars: &[String]) -> Result<Vec<Vec<i128>>> {
    if sigma.is_empty() {
        return Ok(grid_points(vars.len(), 40));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x516a);
    let points = linear::sample_sigma_points(sigma, vars, 150, &mut rng)?;
    let mut out: Vec<Vec<i128>> = vec![vec![0; vars.len()]];
    for p in points {
        let q = linear::integral_multiple(&p);
        let coords: Option<Vec<i128>> = vars
            .iter()
            .map(|v| {
                let c = q.get(v).cloned().unwrap_or_else(|| Rational::from_integer(0.into()));
                i128::try_from(c.to_integer()).ok()
            })
            .collect();
        if let Some(c) = coords {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

fn exact_valid(sig: Signature, eq: &Equation) -> Result<bool> {
    match sig {
        Signature::Lat => lat_valid(eq),
        Signature::DLat => dlat_valid(eq),
        Signature::Sgrp => sg_valid(eq),
        Signature::Grp => grp_valid(eq),
        Signature::Abl => Ok(linear::la_valid(eq)?.is_valid()),
        Signature::VecQ => linear::vs_valid(eq),
    }
}

fn exact_entails(sig: Signature, sigma: &[Equation], eq: &Equation) -> Result<bool> {
    if sigma.is_empty() {
        return exact_valid(sig, eq);
    }
    match sig {
        Signature::Abl => Ok(linear::la_entails(sigma, eq)?.is_valid()),
        Signature::VecQ => linear::vs_entails(sigma, eq),
        other => Err(Error::UnsupportedSigma(other)),
    }
}

struct Rep {
    term: Term,
    size: usize,
    free: Vec<Val>,
    inst: Vec<Val>,
}

/// Operations used to build candidate terms; VECQ gets two scalars.
fn building_ops(sig: Signature) -> Vec<Op> {
    let mut ops = Vec::new();
    for (op, _) in sig.ops() {
        match op {
            Op::Scale(_) => {
                ops.push(Op::Scale(Rational::from_integer(2.into())));
                ops.push(Op::Scale(Rational::new(1.into(), 2.into())));
            }
            op => ops.push(op),
        }
    }
    ops
}

/// How ȳ-terms are told apart.
enum Distinguish {
    /// In the free algebra of the variety.
    Free,
    /// As term functions on the subalgebra pool of `F(x̄)`.
    Functions,
}

fn search(problem: &DependenceProblem, bound: usize, mode: Distinguish) -> Result<Option<Equation>> {
    let sig = problem.variety;
    if !problem.sigma.is_empty() && !matches!(sig, Signature::Abl | Signature::VecQ) {
        return Err(Error::UnsupportedSigma(sig));
    }
    let n = problem.n();
    let ys: Vec<String> = (1..=n).map(witness_var).collect();
    let xs = problem.x_vars();

    // Instantiated values live in the x-space.
    let xpoints = if sig == Signature::Abl {
        sigma_int_points(&problem.sigma, &xs)?
    } else {
        Vec::new()
    };
    let (xspace, xleaves) = space_for(sig, &xs, &xpoints);
    let sigma_basis = if sig == Signature::VecQ {
        Some(Echelon::of(
            problem
                .sigma
                .iter()
                .map(|e| Ok(linear::compile_linear(&e.lhs)?.sub(&linear::compile_linear(&e.rhs)?)))
                .collect::<Result<Vec<_>>>()?,
        ))
    } else {
        None
    };
    let reduce = |vals: Vec<Val>| -> Vec<Val> {
        match &sigma_basis {
            Some(b) => vals
                .into_iter()
                .map(|v| match v {
                    Val::Form(f) => Val::Form(b.reduce(&f)),
                    other => other,
                })
                .collect(),
            None => vals,
        }
    };
    let inst_leaves: HashMap<String, Vec<Val>> = ys
        .iter()
        .zip(&problem.terms)
        .map(|(y, t)| (y.clone(), reduce(xspace.eval(t, &xleaves))))
        .collect();

    // The space where ȳ-terms are compared.
    let (yspace, yleaves) = match mode {
        Distinguish::Free => {
            let pts = if sig == Signature::Abl { grid_points(n, 16) } else { Vec::new() };
            space_for(sig, &ys, &pts)
        }
        Distinguish::Functions => {
            let pool = element_pool(sig, &xspace, &xleaves, &xs);
            let count = pool.len().checked_pow(n as u32).unwrap_or(usize::MAX).min(64);
            let mut algebras = Vec::new();
            let mut leaves: HashMap<String, Vec<Val>> = ys.iter().map(|y| (y.clone(), Vec::new())).collect();
            for mut code in 0..count {
                let mut choice = Vec::with_capacity(n);
                for _ in 0..n {
                    choice.push(code % pool.len());
                    code /= pool.len();
                }
                for c in 0..xspace.len() {
                    algebras.push(xspace.algebras[c]);
                    for (y, &k) in ys.iter().zip(&choice) {
                        leaves.get_mut(y).expect("y").push(pool[k][c].clone());
                    }
                }
            }
            (Space { sig, algebras }, leaves)
        }
    };
    let exact_free = matches!(mode, Distinguish::Free) && sig != Signature::Lat;

    // Bottom-up enumeration of ȳ-terms, one representative per class.
    let ops = building_ops(sig);
    let mut reps: Vec<Rep> = Vec::new();
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); bound.max(1)];
    let mut classes: HashMap<Vec<Val>, Vec<usize>> = HashMap::new();
    for size in 1..bound {
        let mut batch: Vec<(String, Term, Vec<Val>, Vec<Val>)> = Vec::new();
        if size == 1 {
            for y in &ys {
                let t = Term::var(y.clone());
                batch.push((render_term(&t), t, yleaves[y].clone(), inst_leaves[y].clone()));
            }
            for op in &ops {
                if op.arity() == 0 {
                    let t = Term::App(op.clone(), vec![]);
                    batch.push((
                        render_term(&t),
                        t,
                        vec![yspace.constant(op); yspace.len()],
                        vec![xspace.constant(op); xspace.len()],
                    ));
                }
            }
        }
        for op in &ops {
            match op.arity() {
                1 if size >= 2 => {
                    for &a in &by_size[size - 1] {
                        let r = &reps[a];
                        let t = Term::App(op.clone(), vec![r.term.clone()]);
                        let yv = yspace.lift(op, &[&r.free]);
                        let iv = xspace.lift(op, &[&r.inst]);
                        batch.push((render_term(&t), t, yv, iv));
                    }
                }
                2 if size >= 3 => {
                    for left in 1..size - 1 {
                        for &a in &by_size[left] {
                            for &b in &by_size[size - 1 - left] {
                                let (ra, rb) = (&reps[a], &reps[b]);
                                let t = Term::App(op.clone(), vec![ra.term.clone(), rb.term.clone()]);
                                let yv = yspace.lift(op, &[&ra.free, &rb.free]);
                                let iv = xspace.lift(op, &[&ra.inst, &rb.inst]);
                                batch.push((render_term(&t), t, yv, iv));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        batch.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, term, yv, iv) in batch {
            let same = classes.get(&yv).cloned().unwrap_or_default();
            let duplicate = if exact_free || matches!(mode, Distinguish::Functions) {
                !same.is_empty()
            } else {
                let mut dup = false;
                for &r in &same {
                    if lat_valid(&Equation::eq(term.clone(), reps[r].term.clone()))? {
                        dup = true;
                        break;
                    }
                }
                dup
            };
            if duplicate {
                continue;
            }
            let idx = reps.len();
            classes.entry(yv.clone()).or_default().push(idx);
            by_size[size].push(idx);
            reps.push(Rep {
                term,
                size,
                free: yv,
                inst: reduce(iv),
            });
        }
    }

    // Pairs with equal instantiated values, in (total size, later, earlier)
    // order; the earlier representative is written on the left.
    let mut groups: HashMap<&Vec<Val>, Vec<usize>> = HashMap::new();
    for (i, r) in reps.iter().enumerate() {
        groups.entry(&r.inst).or_default().push(i);
    }
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
    for members in groups.values() {
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                let total = reps[i].size + reps[j].size;
                if total <= bound {
                    candidates.push((total, j.max(i), j.min(i)));
                }
            }
        }
    }
    candidates.sort_unstable();
    for (_, later, earlier) in candidates {
        let eq = Equation::eq(reps[earlier].term.clone(), reps[later].term.clone());
        let inst = instantiate(&eq, &problem.terms)?;
        if !exact_entails(sig, &problem.sigma, &inst)? {
            continue;
        }
        let distinct = match mode {
            Distinguish::Free => !exact_valid(sig, &eq)?,
            // Differing values on the pool already prove distinct functions.
            Distinguish::Functions => reps[earlier].free != reps[later].free,
        };
        if distinct {
            return Ok(Some(eq.resugar()));
        }
    }
    Ok(None)
}

/// Distinct elements of `F(x̄)` given by terms of size ≤ 3, at most eight.
fn element_pool(sig: Signature, xspace: &Space, xleaves: &HashMap<String, Vec<Val>>, xs: &[String]) -> Vec<Vec<Val>> {
    let mut pool: Vec<Vec<Val>> = Vec::new();
    let mut level: Vec<Vec<Vec<Val>>> = vec![Vec::new(); 4];
    let push = |v: Vec<Val>, pool: &mut Vec<Vec<Val>>| -> bool {
        if pool.contains(&v) {
            false
        } else {
            pool.push(v);
            true
        }
    };
    let ops = building_ops(sig);
    for x in xs {
        if push(xleaves[x].clone(), &mut pool) {
            level[1].push(xleaves[x].clone());
        }
    }
    for op in &ops {
        if op.arity() == 0 {
            let v = vec![xspace.constant(op); xspace.len()];
            if push(v.clone(), &mut pool) {
                level[1].push(v);
            }
        }
    }
    for size in 2..=3 {
        for op in &ops {
            let made: Vec<Vec<Val>> = match op.arity() {
                1 => level[size - 1].iter().map(|a| xspace.lift(op, &[a])).collect(),
                2 if size == 3 => level[1]
                    .iter()
                    .flat_map(|a| level[1].iter().map(move |b| (a, b)))
                    .map(|(a, b)| xspace.lift(op, &[a, b]))
                    .collect(),
                _ => Vec::new(),
            };
            for v in made {
                if push(v.clone(), &mut pool) {
                    level[size].push(v);
                }
            }
        }
    }
    pool.truncate(8);
    pool
}

/// First equation `ε` over `ȳ`, in order of total size, with `Σ ⊨ ε(t̄)`
/// and `⊭ ε`; terms are compared in the variety's free algebra.
pub fn brute_dependence(problem: &DependenceProblem, bound: usize) -> Result<Option<Equation>> {
    search(problem, bound, Distinguish::Free)
}

/// The same search with `ε` read as an identity between term functions on
/// `F(x̄)` itself: `⊭ ε` is witnessed by elements of `F(x̄)` built from
/// terms of size ≤ 3.
pub fn marczewski_check(problem: &DependenceProblem, bound: usize) -> Result<Option<Equation>> {
    search(problem, bound, Distinguish::Functions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::catalog::lattices;
    use crate::term::{parse_equation, parse_term, render_equation};

    fn problem(sig: Signature, terms: &[&str]) -> DependenceProblem {
        DependenceProblem::new(sig, terms.iter().map(|t| parse_term(t, sig).unwrap()).collect(), vec![])
            .unwrap()
    }

    fn shown(e: Option<Equation>) -> Option<String> {
        e.map(|e| render_equation(&e))
    }

    #[test]
    fn refutation_examples() {
        let e = parse_equation("y1 <= y2", Signature::Lat).unwrap();
        let (a, asg) = refute_in(&e, lattices()).unwrap().unwrap();
        assert_eq!(a.name, "C2");
        assert_eq!((asg["y1"], asg["y2"]), (1, 0));
        let e = parse_equation("x = x", Signature::Lat).unwrap();
        assert!(refute_in(&e, lattices()).unwrap().is_none());
        let e = parse_equation("x ^ (y v z) = (x ^ y) v (x ^ z)", Signature::Lat).unwrap();
        let (a, _) = refute_in(&e, lattices()).unwrap().unwrap();
        assert!(a.name == "N5" || a.name == "M3");
    }

    #[test]
    fn brute_examples() {
        let p = problem(Signature::Lat, &["x", "x v y"]);
        assert_eq!(shown(brute_dependence(&p, 5).unwrap()).as_deref(), Some("y1 <= y2"));
        let p = problem(Signature::Lat, &["x1 ^ (x2 v x3)", "x2 v (x1 ^ x3)"]);
        assert_eq!(brute_dependence(&p, 7).unwrap(), None);
        let p = problem(Signature::Sgrp, &["x", "x"]);
        assert_eq!(shown(brute_dependence(&p, 2).unwrap()).as_deref(), Some("y1 = y2"));
        let p = problem(Signature::DLat, &["x1 ^ (x2 v x3)", "x2 v (x1 ^ x3)"]);
        assert_eq!(shown(brute_dependence(&p, 7).unwrap()).as_deref(), Some("y1 <= y2"));
    }

    #[test]
    fn marczewski_examples() {
        let p = problem(Signature::Lat, &["x"]);
        assert_eq!(marczewski_check(&p, 5).unwrap(), None);
        let p = problem(Signature::Sgrp, &["x", "y"]);
        assert_eq!(marczewski_check(&p, 4).unwrap(), None);
    }
}
