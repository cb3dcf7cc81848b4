//! ℓ-group terms as max/min trees of linear forms.

use num_traits::{Signed, Zero};

use super::fm::{feasible, simplify};
use super::form::{Constraint, LinForm, Point};
use crate::error::{Error, Result};
use crate::term::{Op, Signature, Term};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PLTree {
    Leaf(LinForm),
    Join(Vec<PLTree>),
    Meet(Vec<PLTree>),
}

impl PLTree {
    pub fn eval(&self, p: &Point) -> Rational {
        match self {
            PLTree::Leaf(f) => f.eval(p),
            PLTree::Join(cs) => cs.iter().map(|c| c.eval(p)).max().expect("nonempty join"),
            PLTree::Meet(cs) => cs.iter().map(|c| c.eval(p)).min().expect("nonempty meet"),
        }
    }

    pub fn neg(&self) -> PLTree {
        match self {
            PLTree::Leaf(f) => PLTree::Leaf(f.neg()),
            PLTree::Join(cs) => PLTree::Meet(cs.iter().map(PLTree::neg).collect()),
            PLTree::Meet(cs) => PLTree::Join(cs.iter().map(PLTree::neg).collect()),
        }
    }

    /// Multiplication by a positive scalar commutes with max and min.
    fn scale(&self, k: &Rational) -> PLTree {
        debug_assert!(k.is_positive());
        match self {
            PLTree::Leaf(f) => PLTree::Leaf(f.scale(k)),
            PLTree::Join(cs) => PLTree::Join(cs.iter().map(|c| c.scale(k)).collect()),
            PLTree::Meet(cs) => PLTree::Meet(cs.iter().map(|c| c.scale(k)).collect()),
        }
    }

    fn times(&self, k: i64) -> PLTree {
        match k.signum() {
            0 => PLTree::Leaf(LinForm::zero()),
            1 => self.scale(&Rational::from_integer(k.into())),
            _ => self.neg().scale(&Rational::from_integer((-k).into())),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            PLTree::Leaf(_) => 1,
            PLTree::Join(cs) | PLTree::Meet(cs) => cs.iter().map(PLTree::leaf_count).sum(),
        }
    }
}

fn mk(join: bool, items: Vec<PLTree>) -> PLTree {
    let mut children: Vec<PLTree> = Vec::new();
    for it in items {
        let nested = match (join, it) {
            (true, PLTree::Join(cs)) | (false, PLTree::Meet(cs)) => cs,
            (_, other) => vec![other],
        };
        for c in nested {
            if !children.contains(&c) {
                children.push(c);
            }
        }
    }
    if children.len() == 1 {
        children.pop().expect("one child")
    } else if join {
        PLTree::Join(children)
    } else {
        PLTree::Meet(children)
    }
}

/// Translation distributes over max and min.
fn add(a: &PLTree, b: &PLTree) -> PLTree {
    match (a, b) {
        (PLTree::Leaf(f), PLTree::Leaf(g)) => PLTree::Leaf(f.add(g)),
        (PLTree::Join(cs), _) => mk(true, cs.iter().map(|c| add(c, b)).collect()),
        (PLTree::Meet(cs), _) => mk(false, cs.iter().map(|c| add(c, b)).collect()),
        (_, PLTree::Join(cs)) => mk(true, cs.iter().map(|c| add(a, c)).collect()),
        (_, PLTree::Meet(cs)) => mk(false, cs.iter().map(|c| add(a, c)).collect()),
    }
}

fn collect_summands(t: &Term, sign: i64, out: &mut Vec<(Term, i64)>) {
    match t {
        Term::App(Op::Add, args) => {
            collect_summands(&args[0], sign, out);
            collect_summands(&args[1], sign, out);
        }
        Term::App(Op::Neg, args) => collect_summands(&args[0], -sign, out),
        Term::App(Op::Zero, _) => {}
        other => match out.iter_mut().find(|(s, _)| s == other) {
            Some((_, k)) => *k += sign,
            None => out.push((other.clone(), sign)),
        },
    }
}

fn compile(t: &Term) -> PLTree {
    match t {
        Term::Var(v) => PLTree::Leaf(LinForm::var(v.clone())),
        Term::App(Op::Zero, _) => PLTree::Leaf(LinForm::zero()),
        Term::App(Op::Join, args) => mk(true, vec![compile(&args[0]), compile(&args[1])]),
        Term::App(Op::Meet, args) => mk(false, vec![compile(&args[0]), compile(&args[1])]),
        Term::App(Op::Add | Op::Neg, _) => {
            // Equal summands are merged first: k·(a ∨ b) = k·a ∨ k·b.
            let mut parts = Vec::new();
            collect_summands(t, 1, &mut parts);
            let mut acc = PLTree::Leaf(LinForm::zero());
            for (s, k) in parts {
                if k != 0 {
                    acc = add(&acc, &compile(&s).times(k));
                }
            }
            acc
        }
        Term::App(..) => unreachable!("checked against the ABL signature"),
    }
}

/// Compiles an ℓ-group term, pushing `+` and `−` to the leaves.
pub fn compile_pl(t: &Term) -> Result<PLTree> {
    t.check_signature(Signature::Abl)?;
    Ok(compile(t))
}

/// Operational evaluation of an ℓ-group term at a rational point.
pub fn eval_abl(t: &Term, p: &Point) -> Result<Rational> {
    Ok(match t {
        Term::Var(v) => p
            .get(v)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("no value for `{v}`")))?,
        Term::App(op, args) => match op {
            Op::Zero => Rational::zero(),
            Op::Neg => -eval_abl(&args[0], p)?,
            Op::Add => eval_abl(&args[0], p)? + eval_abl(&args[1], p)?,
            Op::Join => eval_abl(&args[0], p)?.max(eval_abl(&args[1], p)?),
            Op::Meet => eval_abl(&args[0], p)?.min(eval_abl(&args[1], p)?),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "`{}` is not an ℓ-group operation",
                    other.symbol()
                )))
            }
        },
    })
}

/// Integer evaluation of an ℓ-group term; `values` are indexed like `vars`.
pub fn eval_abl_int(t: &Term, vars: &[String], values: &[i128]) -> i128 {
    match t {
        Term::Var(v) => values[vars.iter().position(|w| w == v).expect("variable in scope")],
        Term::App(op, args) => match op {
            Op::Zero => 0,
            Op::Neg => -eval_abl_int(&args[0], vars, values),
            Op::Add => eval_abl_int(&args[0], vars, values) + eval_abl_int(&args[1], vars, values),
            Op::Join => eval_abl_int(&args[0], vars, values).max(eval_abl_int(&args[1], vars, values)),
            Op::Meet => eval_abl_int(&args[0], vars, values).min(eval_abl_int(&args[1], vars, values)),
            _ => unreachable!("checked against the ABL signature"),
        },
    }
}

/// A closed cone on which every tree is linear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub constraints: Vec<Constraint>,
    pub forms: Vec<LinForm>,
}

/// Whether the constraints (all `≥`) have a common strict solution.
fn has_interior(cs: &[Constraint]) -> bool {
    let strict: Vec<Constraint> = cs.iter().filter(|c| !c.form.is_zero()).map(Constraint::strict).collect();
    feasible(&strict)
}

/// Pieces of `tree` inside the region `ctx`: extra constraints and the form.
fn resolve(tree: &PLTree, ctx: &[Constraint]) -> Vec<(Vec<Constraint>, LinForm)> {
    match tree {
        PLTree::Leaf(f) => vec![(Vec::new(), f.clone())],
        PLTree::Join(cs) => resolve_children(cs, ctx, true),
        PLTree::Meet(cs) => resolve_children(cs, ctx, false),
    }
}

fn resolve_children(children: &[PLTree], ctx: &[Constraint], join: bool) -> Vec<(Vec<Constraint>, LinForm)> {
    // Combinations of child pieces, each pruned for an interior.
    let mut combos: Vec<(Vec<Constraint>, Vec<LinForm>)> = vec![(Vec::new(), Vec::new())];
    for child in children {
        let mut next = Vec::new();
        for (added, forms) in &combos {
            let mut local: Vec<Constraint> = ctx.to_vec();
            local.extend(added.iter().cloned());
            for (more, f) in resolve(child, &local) {
                let mut a = added.clone();
                a.extend(more);
                let mut fs = forms.clone();
                fs.push(f);
                next.push((a, fs));
            }
        }
        combos = next;
    }
    let mut out = Vec::new();
    for (added, forms) in combos {
        for (k, winner) in forms.iter().enumerate() {
            if forms[..k].contains(winner) {
                continue;
            }
            let mut region = added.clone();
            for (j, other) in forms.iter().enumerate() {
                if j != k && other != winner {
                    let diff = if join { winner.sub(other) } else { other.sub(winner) };
                    region.push(Constraint::ge(diff));
                }
            }
            let region = simplify(region);
            let mut all: Vec<Constraint> = ctx.to_vec();
            all.extend(region.iter().cloned());
            if has_interior(&all) {
                out.push((region, winner.clone()));
            }
        }
    }
    out
}

/// Common linearity regions of `trees`: full-dimensional closed cones whose
/// union is the whole space, with the linear form of each tree on each.
pub fn pl_regions(trees: &[PLTree]) -> Vec<Region> {
    let mut regions = vec![Region {
        constraints: Vec::new(),
        forms: Vec::new(),
    }];
    for tree in trees {
        let mut next = Vec::new();
        for r in &regions {
            for (added, f) in resolve(tree, &r.constraints) {
                let mut constraints = r.constraints.clone();
                constraints.extend(added);
                let mut forms = r.forms.clone();
                forms.push(f);
                next.push(Region {
                    constraints: simplify(constraints),
                    forms,
                });
            }
        }
        regions = next;
    }
    regions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::form::int;
    use crate::term::parse_term;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn abl(s: &str) -> Term {
        parse_term(s, Signature::Abl).unwrap()
    }

    fn leaf(pairs: &[(&str, i64)]) -> PLTree {
        PLTree::Leaf(LinForm::from_ints(pairs))
    }

    #[test]
    fn compile_examples() {
        assert_eq!(compile_pl(&abl("x v 0")).unwrap(), PLTree::Join(vec![leaf(&[("x", 1)]), leaf(&[])]));
        assert_eq!(
            compile_pl(&abl("x + (y ^ z)")).unwrap(),
            PLTree::Meet(vec![leaf(&[("x", 1), ("y", 1)]), leaf(&[("x", 1), ("z", 1)])])
        );
        assert_eq!(
            compile_pl(&abl("-(x ^ y)")).unwrap(),
            PLTree::Join(vec![leaf(&[("x", -1)]), leaf(&[("y", -1)])])
        );
        // Repeated summands merge instead of multiplying out.
        assert_eq!(
            compile_pl(&abl("(x v y) + (x v y)")).unwrap(),
            PLTree::Join(vec![leaf(&[("x", 2)]), leaf(&[("y", 2)])])
        );
    }

    #[test]
    fn region_examples() {
        let r = pl_regions(&[compile_pl(&abl("x v 0")).unwrap()]);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].constraints, vec![Constraint::ge(LinForm::var("x"))]);
        assert_eq!(r[0].forms, vec![LinForm::var("x")]);
        assert_eq!(r[1].constraints, vec![Constraint::ge(LinForm::from_ints(&[("x", -1)]))]);
        assert_eq!(r[1].forms, vec![LinForm::zero()]);

        let r = pl_regions(&[compile_pl(&abl("x")).unwrap()]);
        assert_eq!(r.len(), 1);
        assert!(r[0].constraints.is_empty());

        let r = pl_regions(&[compile_pl(&abl("x v y")).unwrap()]);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].constraints, vec![Constraint::ge(LinForm::from_ints(&[("x", 1), ("y", -1)]))]);
        assert_eq!(r[1].forms, vec![LinForm::var("y")]);
    }

    #[test]
    fn degenerate_ties_keep_coverage() {
        // Both children resolve to x on x ≤ y; the region must survive once.
        let t = compile_pl(&abl("(x ^ y) v x")).unwrap();
        let r = pl_regions(&[t]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p: Point = [("x", rng.gen_range(-9..10)), ("y", rng.gen_range(-9..10))]
                .into_iter()
                .map(|(v, k)| (v.to_string(), int(k)))
                .collect();
            assert!(r.iter().any(|reg| reg.constraints.iter().all(|c| c.holds_at(&p))));
        }
    }

    fn arb_abl() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
            Just(Term::zero())
        ];
        leaf.prop_recursive(4, 20, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::meet(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::join(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
                inner.prop_map(Term::neg),
            ]
        })
    }

    fn random_point(rng: &mut ChaCha8Rng) -> Point {
        ["x", "y", "z"]
            .iter()
            .map(|v| {
                let q = Rational::new(rng.gen_range(-50..51).into(), rng.gen_range(1..8).into());
                (v.to_string(), q)
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn compile_preserves_semantics(t in arb_abl(), seed in any::<u64>()) {
            let tree = compile_pl(&t).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..1000 {
                let p = random_point(&mut rng);
                prop_assert_eq!(tree.eval(&p), eval_abl(&t, &p).unwrap());
            }
        }

        #[test]
        fn regions_agree_with_trees(t in arb_abl(), seed in any::<u64>()) {
            let tree = compile_pl(&t).unwrap();
            let regions = pl_regions(std::slice::from_ref(&tree));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..50 {
                let p = random_point(&mut rng);
                let inside: Vec<&Region> = regions.iter().filter(|r| r.constraints.iter().all(|c| c.holds_at(&p))).collect();
                prop_assert!(!inside.is_empty());
                for r in inside {
                    prop_assert_eq!(r.forms[0].eval(&p), tree.eval(&p));
                }
            }
        }
    }
}
