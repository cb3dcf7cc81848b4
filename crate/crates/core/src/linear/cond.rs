//! Boolean combinations of linear constraints and a satisfiability search.

use super::fm::{feasible, find_point};
use super::form::{Constraint, Point};
use super::pl::PLTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Atom(Constraint),
    All(Vec<Cond>),
    Any(Vec<Cond>),
}

/// Sign conditions on a tree's value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Pos,
    NonNeg,
    Neg,
    NonPos,
}

impl Cmp {
    fn lower(self) -> bool {
        matches!(self, Cmp::Pos | Cmp::NonNeg)
    }
}

/// `tree ⋈ 0` as a condition on linear forms.
pub fn tree_cond(tree: &PLTree, cmp: Cmp) -> Cond {
    match tree {
        PLTree::Leaf(f) => Cond::Atom(match cmp {
            Cmp::Pos => Constraint::gt(f.clone()),
            Cmp::NonNeg => Constraint::ge(f.clone()),
            Cmp::Neg => Constraint::gt(f.neg()),
            Cmp::NonPos => Constraint::ge(f.neg()),
        }),
        // max > 0 iff some child > 0; max < 0 iff all are.
        PLTree::Join(cs) => {
            let parts = cs.iter().map(|c| tree_cond(c, cmp)).collect();
            if cmp.lower() {
                Cond::Any(parts)
            } else {
                Cond::All(parts)
            }
        }
        PLTree::Meet(cs) => {
            let parts = cs.iter().map(|c| tree_cond(c, cmp)).collect();
            if cmp.lower() {
                Cond::All(parts)
            } else {
                Cond::Any(parts)
            }
        }
    }
}

/// `tree = 0`.
pub fn tree_zero(tree: &PLTree) -> Cond {
    Cond::All(vec![tree_cond(tree, Cmp::NonNeg), tree_cond(tree, Cmp::NonPos)])
}

/// Negation of a single constraint: `¬(L ≥ 0)` is `-L > 0`, and so on.
pub fn negate(c: &Constraint) -> Cond {
    use super::form::Rel;
    match c.rel {
        Rel::Ge => Cond::Atom(Constraint::gt(c.form.neg())),
        Rel::Gt => Cond::Atom(Constraint::ge(c.form.neg())),
        Rel::Eq => Cond::Any(vec![
            Cond::Atom(Constraint::gt(c.form.clone())),
            Cond::Atom(Constraint::gt(c.form.neg())),
        ]),
    }
}

/// A satisfying point of `base ∧ cond`, or `None`. Every variable in `vars`
/// gets a coordinate.
pub fn satisfy(base: &[Constraint], cond: &Cond, vars: &[String]) -> Option<Point> {
    if !feasible(base) {
        return None;
    }
    let mut acc = base.to_vec();
    if search(&mut acc, &mut vec![cond]) {
        find_point(&acc, vars)
    } else {
        None
    }
}

/// Depth-first over disjunctions with a feasibility check after each atom.
/// `todo` is a stack of pending conjuncts.
fn search<'a>(acc: &mut Vec<Constraint>, todo: &mut Vec<&'a Cond>) -> bool {
    let Some(next) = todo.pop() else { return true };
    let ok = match next {
        Cond::Atom(c) => {
            acc.push(c.clone());
            let ok = feasible(acc) && search(acc, todo);
            if !ok {
                acc.pop();
            }
            ok
        }
        Cond::All(parts) => {
            let mark = todo.len();
            todo.extend(parts.iter().rev());
            let ok = search(acc, todo);
            if !ok {
                todo.truncate(mark);
            }
            ok
        }
        Cond::Any(parts) => {
            let mut ok = false;
            for p in parts {
                let saved_acc = acc.len();
                let saved_todo: Vec<&'a Cond> = todo.clone();
                todo.push(p);
                if search(acc, todo) {
                    ok = true;
                    break;
                }
                acc.truncate(saved_acc);
                *todo = saved_todo;
            }
            ok
        }
    };
    if !ok {
        todo.push(next);
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::form::{int, LinForm};
    use crate::linear::pl::compile_pl;
    use crate::term::{parse_term, Signature};

    fn tree(s: &str) -> PLTree {
        compile_pl(&parse_term(s, Signature::Abl).unwrap()).unwrap()
    }

    #[test]
    fn join_positive() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let c = tree_cond(&tree("x v y"), Cmp::Neg);
        let p = satisfy(&[], &c, &vars).unwrap();
        assert!(p["x"] < int(0) && p["y"] < int(0));
        let c = Cond::All(vec![
            tree_cond(&tree("x v -x"), Cmp::Neg),
        ]);
        assert!(satisfy(&[], &c, &vars).is_none());
    }

    #[test]
    fn disjunction_backtracks() {
        let vars = vec!["x".to_string()];
        let c = Cond::All(vec![
            Cond::Any(vec![
                Cond::Atom(Constraint::gt(LinForm::var("x"))),
                Cond::Atom(Constraint::gt(LinForm::var("x").neg())),
            ]),
            Cond::Atom(Constraint::ge(LinForm::var("x").neg())),
        ]);
        let p = satisfy(&[], &c, &vars).unwrap();
        assert!(p["x"] < int(0));
    }

    #[test]
    fn negations() {
        let vars = vec!["x".to_string()];
        let eq = Constraint::eq(LinForm::var("x"));
        let p = satisfy(&[], &negate(&eq), &vars).unwrap();
        assert!(!eq.holds_at(&p));
    }
}
