//! Fourier–Motzkin elimination and point recovery.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::form::{int, Constraint, LinForm, Point, Rel};
use crate::Rational;

/// Normalizes, drops tautologies and duplicates; a contradiction collapses
/// the whole system to `[0 > 0]`.
pub fn simplify(cs: impl IntoIterator<Item = Constraint>) -> Vec<Constraint> {
    let mut set = BTreeSet::new();
    for c in cs {
        let c = c.normalized();
        if c.is_contradiction() {
            return vec![Constraint::contradiction()];
        }
        if !c.is_tautology() {
            set.insert(c);
        }
    }
    // `L > 0` subsumes `L ≥ 0`.
    let stricts: Vec<LinForm> = set.iter().filter(|c| c.rel == Rel::Gt).map(|c| c.form.clone()).collect();
    for f in stricts {
        set.remove(&Constraint::ge(f));
    }
    set.into_iter().collect()
}

pub fn is_contradictory(cs: &[Constraint]) -> bool {
    cs.iter().any(Constraint::is_contradiction)
}

/// Eliminates `var`. Equations containing `var` are used for substitution;
/// otherwise every lower bound is paired with every upper bound, strict if
/// either parent is.
pub fn fm_eliminate(cs: &[Constraint], var: &str) -> Vec<Constraint> {
    if let Some(pos) = cs.iter().position(|c| c.rel == Rel::Eq && !c.form.coeff(var).is_zero()) {
        let e = &cs[pos];
        let c = e.form.coeff(var);
        // var = -(rest)/c
        let by = e.form.without(var).scale(&(-Rational::one() / c));
        let rest = cs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, k)| Constraint::new(k.form.substitute(var, &by), k.rel));
        return simplify(rest);
    }
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut out = Vec::new();
    for c in cs {
        let a = c.form.coeff(var);
        if a.is_zero() {
            out.push(c.clone());
        } else if a.is_positive() {
            lower.push((c, a));
        } else {
            upper.push((c, -a));
        }
    }
    for (l, a) in &lower {
        for (u, b) in &upper {
            // b·l + a·u cancels var.
            let form = l.form.scale(b).add(&u.form.scale(a));
            let rel = if l.rel == Rel::Gt || u.rel == Rel::Gt {
                Rel::Gt
            } else {
                Rel::Ge
            };
            out.push(Constraint::new(form, rel));
        }
    }
    simplify(out)
}

fn bound_counts(cs: &[Constraint], var: &str) -> (bool, usize) {
    let mut has_eq = false;
    let (mut lo, mut hi) = (0usize, 0usize);
    for c in cs {
        let a = c.form.coeff(var);
        if a.is_zero() {
            continue;
        }
        if c.rel == Rel::Eq {
            has_eq = true;
        } else if a.is_positive() {
            lo += 1;
        } else {
            hi += 1;
        }
    }
    (has_eq, lo * hi)
}

/// Picks the next variable: one with an equation, else the fewest pairings.
fn pick_var(cs: &[Constraint], vars: &[String]) -> Option<usize> {
    let mut best: Option<(usize, (bool, usize))> = None;
    for (i, v) in vars.iter().enumerate() {
        if cs.iter().all(|c| c.form.coeff(v).is_zero()) {
            continue;
        }
        let (eq, pairs) = bound_counts(cs, v);
        let key = (!eq, pairs);
        if best.as_ref().is_none_or(|(_, k)| key < *k) {
            best = Some((i, key));
        }
    }
    best.map(|(i, _)| i)
}

/// Elimination stages: each variable with the system it was eliminated from.
fn eliminate_all(cs: &[Constraint], vars: &[String]) -> (Vec<(String, Vec<Constraint>)>, Vec<Constraint>) {
    let mut current = simplify(cs.iter().cloned());
    let mut remaining: Vec<String> = vars.to_vec();
    let mut stages = Vec::new();
    while !is_contradictory(&current) {
        let Some(i) = pick_var(&current, &remaining) else { break };
        let v = remaining.remove(i);
        let next = fm_eliminate(&current, &v);
        stages.push((v, std::mem::replace(&mut current, next)));
    }
    (stages, current)
}

/// Whether the system has a solution.
pub fn feasible(cs: &[Constraint]) -> bool {
    let vars: BTreeSet<String> = cs.iter().flat_map(|c| c.form.vars().cloned()).collect();
    let vars: Vec<String> = vars.into_iter().collect();
    let (_, last) = eliminate_all(cs, &vars);
    !is_contradictory(&last)
}

/// Eliminates each of `vars` in turn, in the given order.
pub fn project_out(cs: &[Constraint], vars: &[String]) -> Vec<Constraint> {
    let mut current = simplify(cs.iter().cloned());
    for v in vars {
        if is_contradictory(&current) {
            break;
        }
        current = fm_eliminate(&current, v);
    }
    current
}

#[derive(Clone, Debug)]
pub struct Bound {
    pub value: Rational,
    pub strict: bool,
}

/// Interval of admissible values for `var` with all other variables fixed.
pub struct Interval {
    pub exact: Option<Rational>,
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl Interval {
    pub fn admits(&self, v: &Rational) -> bool {
        if let Some(e) = &self.exact {
            return e == v;
        }
        let lo_ok = self.lower.as_ref().is_none_or(|b| if b.strict { v > &b.value } else { v >= &b.value });
        let hi_ok = self.upper.as_ref().is_none_or(|b| if b.strict { v < &b.value } else { v <= &b.value });
        lo_ok && hi_ok
    }
}

pub fn interval(cs: &[Constraint], var: &str, p: &Point) -> Interval {
    let mut iv = Interval {
        exact: None,
        lower: None,
        upper: None,
    };
    for c in cs {
        let a = c.form.coeff(var);
        if a.is_zero() {
            continue;
        }
        let bound = -c.form.without(var).eval(p) / &a;
        match c.rel {
            Rel::Eq => {
                iv.exact = Some(bound);
            }
            _ => {
                let strict = c.rel == Rel::Gt;
                let slot = if a.is_positive() { &mut iv.lower } else { &mut iv.upper };
                let tighter = match slot.as_ref() {
                    None => true,
                    Some(b) => {
                        if a.is_positive() {
                            bound > b.value || (bound == b.value && strict)
                        } else {
                            bound < b.value || (bound == b.value && strict)
                        }
                    }
                };
                if tighter {
                    *slot = Some(Bound { value: bound, strict });
                }
            }
        }
    }
    iv
}

/// A small, preferably integral value in the interval.
pub fn nice_value(iv: &Interval) -> Rational {
    if let Some(e) = &iv.exact {
        return e.clone();
    }
    let zero = Rational::zero();
    if iv.admits(&zero) {
        return zero;
    }
    match (&iv.lower, &iv.upper) {
        (Some(l), None) => l.value.floor() + Rational::one(),
        (None, Some(u)) => u.value.ceil() - Rational::one(),
        (Some(l), Some(u)) => {
            // The interval lies on one side of 0; try the integer nearest to 0.
            let candidate = if l.value.is_positive() || (l.value.is_zero() && l.strict) {
                let c = l.value.ceil();
                if c == l.value && l.strict {
                    c + Rational::one()
                } else {
                    c
                }
            } else {
                let c = u.value.floor();
                if c == u.value && u.strict {
                    c - Rational::one()
                } else {
                    c
                }
            };
            if iv.admits(&candidate) {
                candidate
            } else {
                (&l.value + &u.value) / int(2)
            }
        }
        (None, None) => zero,
    }
}

/// A random value in the interval; unbounded sides extend up to 8 units.
fn random_value<R: Rng>(iv: &Interval, rng: &mut R) -> Rational {
    if let Some(e) = &iv.exact {
        return e.clone();
    }
    let frac = |rng: &mut R| Rational::new(rng.gen_range(1..16).into(), 16.into());
    let spread = |rng: &mut R| Rational::new(rng.gen_range(1..=64).into(), 8.into());
    let v = match (&iv.lower, &iv.upper) {
        (Some(l), Some(u)) => &l.value + (&u.value - &l.value) * frac(rng),
        (Some(l), None) => &l.value + spread(rng),
        (None, Some(u)) => &u.value - spread(rng),
        (None, None) => Rational::new(rng.gen_range(-64..=64).into(), 8.into()),
    };
    if iv.admits(&v) {
        v
    } else {
        nice_value(iv)
    }
}

fn back_substitute(
    stages: &[(String, Vec<Constraint>)],
    mut p: Point,
    choose: &mut dyn FnMut(&Interval) -> Rational,
) -> Point {
    for (v, system) in stages.iter().rev() {
        let iv = interval(system, v, &p);
        let value = choose(&iv);
        p.insert(v.clone(), value);
    }
    p
}

/// A solution with small coordinates, or `None` if infeasible. Every
/// variable in `vars` gets a coordinate; unconstrained ones are 0 unless
/// needed.
pub fn find_point(cs: &[Constraint], vars: &[String]) -> Option<Point> {
    let mut all: Vec<String> = vars.to_vec();
    for c in cs {
        for v in c.form.vars() {
            if !all.contains(v) {
                all.push(v.clone());
            }
        }
    }
    let (stages, last) = eliminate_all(cs, &all);
    if is_contradictory(&last) {
        return None;
    }
    let start: Point = all.iter().map(|v| (v.clone(), Rational::zero())).collect();
    let p = back_substitute(&stages, start, &mut nice_value);
    debug_assert!(cs.iter().all(|c| c.holds_at(&p)));
    Some(p)
}

/// A random solution, or `None` if infeasible.
pub fn random_point<R: Rng>(cs: &[Constraint], vars: &[String], rng: &mut R) -> Option<Point> {
    let mut order: Vec<String> = vars.to_vec();
    for c in cs {
        for v in c.form.vars() {
            if !order.contains(v) {
                order.push(v.clone());
            }
        }
    }
    let (stages, last) = eliminate_all(cs, &order);
    if is_contradictory(&last) {
        return None;
    }
    // Variables without a stage are free; fix them first.
    let staged: BTreeSet<&String> = stages.iter().map(|(v, _)| v).collect();
    let mut start = Point::new();
    for v in &order {
        let value = if staged.contains(v) {
            Rational::zero()
        } else {
            Rational::new(rng.gen_range(-64..=64).into(), 8.into())
        };
        start.insert(v.clone(), value);
    }
    let p = back_substitute(&stages, start, &mut |iv| random_value(iv, rng));
    debug_assert!(cs.iter().all(|c| c.holds_at(&p)));
    Some(p)
}

/// Scales a point by the lcm of its denominators (keeps cone membership).
pub fn integral_multiple(p: &Point) -> Point {
    let mut l = num_bigint::BigInt::one();
    for v in p.values() {
        l = l.lcm(v.denom());
    }
    let k = Rational::from_integer(l);
    p.iter().map(|(v, c)| (v.clone(), c * &k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(pairs: &[(&str, i64)]) -> LinForm {
        LinForm::from_ints(pairs)
    }

    #[test]
    fn eliminates_example_system() {
        let cs = vec![
            Constraint::ge(f(&[("y1", 1), ("x", 1)])),
            Constraint::ge(f(&[("y2", 1), ("x", -1)])),
            Constraint::ge(f(&[("y3", 1)])),
        ];
        let out = fm_eliminate(&cs, "x");
        assert_eq!(
            out,
            vec![Constraint::ge(f(&[("y1", 1), ("y2", 1)])), Constraint::ge(f(&[("y3", 1)]))]
        );
    }

    #[test]
    fn lower_bound_only_projects_to_everything() {
        assert!(fm_eliminate(&[Constraint::ge(f(&[("x", 1)]))], "x").is_empty());
    }

    #[test]
    fn strict_opposites_are_infeasible() {
        let cs = vec![Constraint::gt(f(&[("x", 1)])), Constraint::gt(f(&[("x", -1)]))];
        assert_eq!(fm_eliminate(&cs, "x"), vec![Constraint::contradiction()]);
        assert!(!feasible(&cs));
    }

    #[test]
    fn equations_substitute() {
        let cs = vec![
            Constraint::eq(f(&[("y", 1), ("x", -2)])),
            Constraint::gt(f(&[("x", 1)])),
        ];
        assert_eq!(fm_eliminate(&cs, "x"), vec![Constraint::gt(f(&[("y", 1)]))]);
    }

    #[test]
    fn nice_points() {
        let vars = vec!["y".to_string()];
        let p = find_point(&[Constraint::gt(f(&[("y", -1)]))], &vars).unwrap();
        assert_eq!(p["y"], int(-1));
        let p = find_point(&[Constraint::ge(f(&[("y", 1)]))], &vars).unwrap();
        assert_eq!(p["y"], int(0));
        let two = vec!["a".to_string(), "b".to_string()];
        let p = find_point(
            &[Constraint::gt(f(&[("a", 1), ("b", -1)])), Constraint::gt(f(&[("b", 1)]))],
            &two,
        )
        .unwrap();
        assert!(p["a"] > p["b"] && p["b"] > int(0));
    }

    fn arb_constraint() -> impl Strategy<Value = Constraint> {
        (
            -3i64..4,
            -3i64..4,
            -3i64..4,
            prop::sample::select(vec![Rel::Ge, Rel::Gt, Rel::Eq]),
        )
            .prop_map(|(a, b, c, rel)| Constraint::new(f(&[("x", a), ("u", b), ("w", c)]), rel))
    }

    proptest! {
        #[test]
        fn projection_property(
            cs in prop::collection::vec(arb_constraint(), 1..5),
            seed in any::<u64>(),
        ) {
            let out = fm_eliminate(&cs, "x");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vars = vec!["u".to_string(), "w".to_string()];
            // Points of the projection extend to points of the input.
            if let Some(q) = random_point(&out, &vars, &mut rng) {
                let iv = interval(&cs, "x", &q);
                let mut p = q.clone();
                p.insert("x".into(), nice_value(&iv));
                prop_assert!(cs.iter().all(|c| c.holds_at(&p)), "no extension for {:?}", q);
            }
            // Restrictions of input points satisfy the projection.
            if let Some(p) = random_point(&cs, &["x".to_string(), "u".to_string(), "w".to_string()], &mut rng) {
                prop_assert!(out.iter().all(|c| c.holds_at(&p)));
            }
        }

        #[test]
        fn found_points_satisfy(cs in prop::collection::vec(arb_constraint(), 1..5)) {
            let vars = vec!["x".to_string(), "u".to_string(), "w".to_string()];
            match find_point(&cs, &vars) {
                Some(p) => prop_assert!(cs.iter().all(|c| c.holds_at(&p))),
                None => prop_assert!(!feasible(&cs)),
            }
        }
    }
}
