//! Finite algebras given by operation tables.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::term::{Equation, Op, Relation, Signature, Term};

/// Values of variables in a finite algebra.
pub type Assignment = BTreeMap<String, usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub sig: Signature,
    pub meet: Option<Vec<Vec<usize>>>,
    pub join: Option<Vec<Vec<usize>>>,
    pub mul: Option<Vec<Vec<usize>>>,
    pub inv: Option<Vec<usize>>,
    pub unit: Option<usize>,
}

fn missing(name: &str, op: &Op) -> Error {
    Error::InvalidArgument(format!("{name} has no `{}` operation", op.symbol()))
}

impl FiniteAlgebra {
    pub fn lattice(name: &str, sig: Signature, meet: Vec<Vec<usize>>, join: Vec<Vec<usize>>) -> Self {
        FiniteAlgebra {
            name: name.into(),
            size: meet.len(),
            sig,
            meet: Some(meet),
            join: Some(join),
            mul: None,
            inv: None,
            unit: None,
        }
    }

    pub fn table(&self, op: &Op) -> Option<&Vec<Vec<usize>>> {
        match op {
            Op::Meet => self.meet.as_ref(),
            Op::Join => self.join.as_ref(),
            Op::Mul => self.mul.as_ref(),
            _ => None,
        }
    }

    /// Whether every operation of `t` has a table here.
    pub fn supports(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(op, args) => {
                let here = match op {
                    Op::Inv => self.inv.is_some(),
                    Op::Unit => self.unit.is_some(),
                    _ => self.table(op).is_some(),
                };
                here && args.iter().all(|a| self.supports(a))
            }
        }
    }

    pub fn supports_equation(&self, eq: &Equation) -> bool {
        self.supports(&eq.lhs)
            && self.supports(&eq.rhs)
            && (eq.relation == Relation::Eq || self.meet.is_some())
    }

    /// `a ∧ b = a`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet.as_ref().is_some_and(|m| m[a][b] == a)
    }

    /// Checks the axioms of `sig` on the tables.
    pub fn check_axioms(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("{}: {what}", self.name)));
        let m = self.size;
        let shape_ok = |t: &Vec<Vec<usize>>| t.len() == m && t.iter().all(|r| r.len() == m && r.iter().all(|&v| v < m));
        for t in [&self.meet, &self.join, &self.mul].into_iter().flatten() {
            if !shape_ok(t) {
                return bad("table is not total");
            }
        }
        let assoc = |t: &Vec<Vec<usize>>| {
            (0..m).all(|a| (0..m).all(|b| (0..m).all(|c| t[t[a][b]][c] == t[a][t[b][c]])))
        };
        let comm = |t: &Vec<Vec<usize>>| (0..m).all(|a| (0..m).all(|b| t[a][b] == t[b][a]));
        let idem = |t: &Vec<Vec<usize>>| (0..m).all(|a| t[a][a] == a);
        match self.sig {
            Signature::Lat | Signature::DLat => {
                let (Some(me), Some(jo)) = (&self.meet, &self.join) else {
                    return bad("lattices need meet and join");
                };
                if !(assoc(me) && assoc(jo) && comm(me) && comm(jo) && idem(me) && idem(jo)) {
                    return bad("not a lattice");
                }
                let absorb = (0..m).all(|a| (0..m).all(|b| me[a][jo[a][b]] == a && jo[a][me[a][b]] == a));
                if !absorb {
                    return bad("absorption fails");
                }
                if self.sig == Signature::DLat {
                    let dist = (0..m).all(|a| {
                        (0..m).all(|b| (0..m).all(|c| me[a][jo[b][c]] == jo[me[a][b]][me[a][c]]))
                    });
                    if !dist {
                        return bad("not distributive");
                    }
                }
            }
            Signature::Sgrp => {
                let Some(mu) = &self.mul else { return bad("semigroups need mul") };
                if !assoc(mu) {
                    return bad("not associative");
                }
            }
            Signature::Grp => {
                let (Some(mu), Some(inv), Some(e)) = (&self.mul, &self.inv, self.unit) else {
                    return bad("groups need mul, inv and e");
                };
                if inv.len() != m || e >= m || !assoc(mu) {
                    return bad("not a group");
                }
                let ok = (0..m).all(|a| mu[a][e] == a && mu[e][a] == a && mu[a][inv[a]] == e && mu[inv[a]][a] == e);
                if !ok {
                    return bad("not a group");
                }
            }
            other => return bad(&format!("no finite models are kept for {other}")),
        }
        Ok(())
    }
}

/// Bottom-up evaluation of `t` under `asg`.
pub fn eval_term(t: &Term, a: &FiniteAlgebra, asg: &Assignment) -> Result<usize> {
    match t {
        Term::Var(v) => asg
            .get(v)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("no value for `{v}`"))),
        Term::App(op, args) => match op {
            Op::Unit => a.unit.ok_or_else(|| missing(&a.name, op)),
            Op::Inv => {
                let x = eval_term(&args[0], a, asg)?;
                Ok(a.inv.as_ref().ok_or_else(|| missing(&a.name, op))?[x])
            }
            _ => {
                let table = a.table(op).ok_or_else(|| missing(&a.name, op))?;
                let x = eval_term(&args[0], a, asg)?;
                let y = eval_term(&args[1], a, asg)?;
                Ok(table[x][y])
            }
        },
    }
}

/// Whether `eq` holds in `a` under `asg`.
pub fn holds(eq: &Equation, a: &FiniteAlgebra, asg: &Assignment) -> Result<bool> {
    let l = eval_term(&eq.lhs, a, asg)?;
    let r = eval_term(&eq.rhs, a, asg)?;
    Ok(match eq.relation {
        Relation::Eq => l == r,
        Relation::Leq => {
            if a.meet.is_none() {
                return Err(missing(&a.name, &Op::Meet));
            }
            a.leq(l, r)
        }
    })
}

/// All assignments of `vars` into `0..m`, the first variable varying fastest.
pub fn assignments(vars: &[String], m: usize) -> impl Iterator<Item = Assignment> + '_ {
    let total = m.checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut code| {
        let mut asg = Assignment::new();
        for v in vars {
            asg.insert(v.clone(), code % m);
            code /= m;
        }
        asg
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn c2() -> FiniteAlgebra {
        FiniteAlgebra::lattice("C2", Signature::Lat, vec![vec![0, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]])
    }

    fn z2() -> FiniteAlgebra {
        FiniteAlgebra {
            name: "Z2".into(),
            size: 2,
            sig: Signature::Grp,
            meet: None,
            join: None,
            mul: Some(vec![vec![0, 1], vec![1, 0]]),
            inv: Some(vec![0, 1]),
            unit: Some(0),
        }
    }

    fn asg(pairs: &[(&str, usize)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn evaluation_examples() {
        let l = |s: &str| parse_term(s, Signature::Lat).unwrap();
        let a = asg(&[("x", 1), ("y", 0)]);
        assert_eq!(eval_term(&l("x ^ y"), &c2(), &a).unwrap(), 0);
        assert_eq!(eval_term(&l("x v (x ^ y)"), &c2(), &a).unwrap(), 1);
        let s = parse_term("x * x", Signature::Sgrp).unwrap();
        assert_eq!(eval_term(&s, &z2(), &asg(&[("x", 1)])).unwrap(), 0);
        assert!(eval_term(&l("x ^ z"), &c2(), &a).is_err());
    }

    #[test]
    fn axioms() {
        c2().check_axioms().unwrap();
        z2().check_axioms().unwrap();
        let mut broken = c2();
        broken.join = Some(vec![vec![0, 0], vec![0, 1]]);
        assert!(broken.check_axioms().is_err());
    }

    #[test]
    fn assignment_order() {
        let vars = vec!["a".to_string(), "b".to_string()];
        let all: Vec<Assignment> = assignments(&vars, 2).collect();
        assert_eq!(all[1], asg(&[("a", 1), ("b", 0)]));
        assert_eq!(all.len(), 4);
    }
}
