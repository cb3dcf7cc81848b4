//! Free lattices (Whitman's recursion) and free distributive lattices
//! (two-element evaluation), with the refuting sets used for dependence.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::api::check_refuting;
use crate::error::{Error, Result};
use crate::term::{witness_vars, Equation, Op, Relation, Signature, Term};
use crate::verdict::{Evidence, Verdict};

/// Rule applied at a node of a [`WhitmanTrace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// `s1 ∨ s2 ≤ t`: both halves.
    JoinLeft,
    /// `s ≤ t1 ∧ t2`: both halves.
    MeetRight,
    /// `x ≤ t1 ∨ t2`: one of them.
    VarJoin,
    /// `s1 ∧ s2 ≤ y`: one of them.
    MeetVar,
    /// `x ≤ y`: equal generators.
    VarVar,
    /// `s1 ∧ s2 ≤ t1 ∨ t2`: one of four.
    Whitman,
}

/// Proof tree for a `lat_leq` verdict.
///
/// A true node of a conjunctive clause lists both subgoals, a false one
/// lists one failing subgoal. Disjunctive clauses are dual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhitmanTrace {
    pub lhs: Term,
    pub rhs: Term,
    pub clause: Clause,
    pub holds: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<WhitmanTrace>,
}

fn clause_for(s: &Term, t: &Term) -> Clause {
    match (s, t) {
        (Term::App(Op::Join, _), _) => Clause::JoinLeft,
        (_, Term::App(Op::Meet, _)) => Clause::MeetRight,
        (Term::Var(_), Term::Var(_)) => Clause::VarVar,
        (Term::Var(_), _) => Clause::VarJoin,
        (_, Term::Var(_)) => Clause::MeetVar,
        _ => Clause::Whitman,
    }
}

fn subgoals(s: &Term, t: &Term, clause: Clause) -> Vec<(Term, Term)> {
    let halves = |u: &Term| match u {
        Term::App(_, args) => (args[0].clone(), args[1].clone()),
        Term::Var(_) => unreachable!("clause requires a compound term"),
    };
    match clause {
        Clause::JoinLeft | Clause::MeetVar => {
            let (s1, s2) = halves(s);
            vec![(s1, t.clone()), (s2, t.clone())]
        }
        Clause::MeetRight | Clause::VarJoin => {
            let (t1, t2) = halves(t);
            vec![(s.clone(), t1), (s.clone(), t2)]
        }
        Clause::Whitman => {
            let (s1, s2) = halves(s);
            let (t1, t2) = halves(t);
            vec![
                (s1, t.clone()),
                (s2, t.clone()),
                (s.clone(), t1),
                (s.clone(), t2),
            ]
        }
        Clause::VarVar => vec![],
    }
}

impl WhitmanTrace {
    /// Re-checks every node locally against the recursion.
    pub fn verify(&self) -> bool {
        let clause = clause_for(&self.lhs, &self.rhs);
        if clause != self.clause {
            return false;
        }
        if clause == Clause::VarVar {
            return self.children.is_empty() && self.holds == (self.lhs == self.rhs);
        }
        let goals = subgoals(&self.lhs, &self.rhs, clause);
        let is_goal = |c: &WhitmanTrace| goals.iter().any(|(a, b)| *a == c.lhs && *b == c.rhs);
        let conjunctive = matches!(clause, Clause::JoinLeft | Clause::MeetRight);
        let shape_ok = if conjunctive == self.holds {
            // All subgoals, in order, with the node's outcome.
            self.children.len() == goals.len()
                && self
                    .children
                    .iter()
                    .zip(&goals)
                    .all(|(c, (a, b))| c.lhs == *a && c.rhs == *b && c.holds == self.holds)
        } else {
            self.children.len() == 1 && is_goal(&self.children[0]) && self.children[0].holds == self.holds
        };
        shape_ok && self.children.iter().all(WhitmanTrace::verify)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(WhitmanTrace::node_count).sum::<usize>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Var(u32),
    Meet(u32, u32),
    Join(u32, u32),
}

/// Hash-consed lattice terms with a memo over subgoal pairs.
#[derive(Default)]
struct Whitman {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    vars: HashMap<String, u32>,
    memo: HashMap<(u32, u32), bool>,
}

impl Whitman {
    fn node(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }

    fn intern(&mut self, t: &Term) -> u32 {
        match t {
            Term::Var(name) => {
                let next = self.vars.len() as u32;
                let v = *self.vars.entry(name.clone()).or_insert(next);
                self.node(Node::Var(v))
            }
            Term::App(Op::Meet, args) => {
                let a = self.intern(&args[0]);
                let b = self.intern(&args[1]);
                self.node(Node::Meet(a, b))
            }
            Term::App(Op::Join, args) => {
                let a = self.intern(&args[0]);
                let b = self.intern(&args[1]);
                self.node(Node::Join(a, b))
            }
            Term::App(..) => unreachable!("checked against the lattice signature"),
        }
    }

    fn leq(&mut self, s: u32, t: u32) -> bool {
        if s == t {
            return true;
        }
        if let Some(&r) = self.memo.get(&(s, t)) {
            return r;
        }
        let r = match (self.nodes[s as usize], self.nodes[t as usize]) {
            (Node::Join(s1, s2), _) => self.leq(s1, t) && self.leq(s2, t),
            (_, Node::Meet(t1, t2)) => self.leq(s, t1) && self.leq(s, t2),
            (Node::Var(x), Node::Var(y)) => x == y,
            (Node::Var(_), Node::Join(t1, t2)) => self.leq(s, t1) || self.leq(s, t2),
            (Node::Meet(s1, s2), Node::Var(_)) => self.leq(s1, t) || self.leq(s2, t),
            (Node::Meet(s1, s2), Node::Join(t1, t2)) => {
                self.leq(s1, t) || self.leq(s2, t) || self.leq(s, t1) || self.leq(s, t2)
            }
        };
        self.memo.insert((s, t), r);
        r
    }

    fn trace(&mut self, s: &Term, t: &Term) -> WhitmanTrace {
        let si = self.intern(s);
        let ti = self.intern(t);
        let holds = self.leq(si, ti);
        let clause = clause_for(s, t);
        let goals = subgoals(s, t, clause);
        let conjunctive = matches!(clause, Clause::JoinLeft | Clause::MeetRight);
        let mut children = Vec::new();
        if clause != Clause::VarVar {
            if conjunctive == holds {
                for (a, b) in &goals {
                    children.push(self.trace(a, b));
                }
            } else {
                // The first subgoal whose outcome decides the node.
                for (a, b) in &goals {
                    let (ai, bi) = (self.intern(a), self.intern(b));
                    if self.leq(ai, bi) == holds {
                        children.push(self.trace(a, b));
                        break;
                    }
                }
            }
        }
        WhitmanTrace {
            lhs: s.clone(),
            rhs: t.clone(),
            clause,
            holds,
            children,
        }
    }
}

fn check_lattice(t: &Term) -> Result<()> {
    t.check_signature(Signature::Lat).map_err(Error::from)
}

/// Decides `⊨ s ≤ t` in all lattices, with a proof trace.
pub fn lat_leq(s: &Term, t: &Term) -> Result<(bool, WhitmanTrace)> {
    check_lattice(s)?;
    check_lattice(t)?;
    let mut w = Whitman::default();
    let trace = w.trace(s, t);
    Ok((trace.holds, trace))
}

/// [`lat_leq`] without building a trace.
pub fn lat_holds(s: &Term, t: &Term) -> Result<bool> {
    check_lattice(s)?;
    check_lattice(t)?;
    let mut w = Whitman::default();
    let (a, b) = (w.intern(s), w.intern(t));
    Ok(w.leq(a, b))
}

/// Validity of an equation or inequation in all lattices.
pub fn lat_valid(eq: &Equation) -> Result<bool> {
    check_lattice(&eq.lhs)?;
    check_lattice(&eq.rhs)?;
    let mut w = Whitman::default();
    let (a, b) = (w.intern(&eq.lhs), w.intern(&eq.rhs));
    Ok(match eq.relation {
        Relation::Leq => w.leq(a, b),
        Relation::Eq => w.leq(a, b) && w.leq(b, a),
    })
}

/// A 0/1 assignment.
pub type BoolAssignment = BTreeMap<String, bool>;

fn eval_bool(t: &Term, vars: &[String], mask: u64) -> bool {
    match t {
        Term::Var(v) => {
            let i = vars.iter().position(|w| w == v).expect("variable collected");
            mask >> i & 1 == 1
        }
        Term::App(Op::Meet, args) => eval_bool(&args[0], vars, mask) && eval_bool(&args[1], vars, mask),
        Term::App(Op::Join, args) => eval_bool(&args[0], vars, mask) || eval_bool(&args[1], vars, mask),
        Term::App(..) => unreachable!("checked against the lattice signature"),
    }
}

fn dlat_search(lhs: &Term, rhs: &Term, relation: Relation) -> Option<BoolAssignment> {
    let eq = Equation {
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        relation,
    };
    let vars = eq.free_vars();
    assert!(vars.len() < 64, "too many variables for two-element evaluation");
    (0..1u64 << vars.len()).find_map(|mask| {
        let a = eval_bool(lhs, &vars, mask);
        let b = eval_bool(rhs, &vars, mask);
        let ok = match relation {
            Relation::Leq => !a || b,
            Relation::Eq => a == b,
        };
        (!ok).then(|| {
            vars.iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), mask >> i & 1 == 1))
                .collect()
        })
    })
}

/// Decides `⊨ s ≤ t` in distributive lattices; on failure returns a
/// falsifying 0/1 assignment.
pub fn dlat_leq(s: &Term, t: &Term) -> Result<(bool, Option<BoolAssignment>)> {
    check_lattice(s)?;
    check_lattice(t)?;
    let cex = dlat_search(s, t, Relation::Leq);
    Ok((cex.is_none(), cex))
}

pub fn dlat_valid(eq: &Equation) -> Result<bool> {
    check_lattice(&eq.lhs)?;
    check_lattice(&eq.rhs)?;
    Ok(dlat_search(&eq.lhs, &eq.rhs, eq.relation).is_none())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefutingSet {
    pub variety: Signature,
    pub n: usize,
    pub equations: Vec<Equation>,
}

/// The refuting set for `n` witness variables.
///
/// LAT lists `yi ≤ ⋁_{j≠i} yj` for each i, then `⋀_{j≠i} yj ≤ yi`, as a
/// set (for n = 2 the two halves coincide). DLAT lists
/// `⋀_{i∈I} yi ≤ ⋁_{j∉I} yj` for masks 1..2ⁿ−2, bit i−1 meaning yi ∈ I.
pub fn refuting_set(variety: Signature, n: usize) -> Result<RefutingSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("refuting sets need n ≥ 1".into()));
    }
    let ys = witness_vars(n);
    let mut equations: Vec<Equation> = Vec::new();
    match variety {
        Signature::Lat if n >= 2 => {
            let others = |i: usize| ys.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, y)| y.clone());
            let mut push = |eq: Equation| {
                if !equations.contains(&eq) {
                    equations.push(eq);
                }
            };
            for i in 0..n {
                let join = Term::fold(Op::Join, others(i)).expect("n ≥ 2");
                push(Equation::leq(ys[i].clone(), join));
            }
            for i in 0..n {
                let meet = Term::fold(Op::Meet, others(i)).expect("n ≥ 2");
                push(Equation::leq(meet, ys[i].clone()));
            }
        }
        Signature::DLat if n >= 2 => {
            if n >= 63 {
                return Err(Error::InvalidArgument("n too large for a DLAT refuting set".into()));
            }
            for mask in 1..(1u64 << n) - 1 {
                let pick = |inside: bool| {
                    ys.iter()
                        .enumerate()
                        .filter(move |(i, _)| (mask >> i & 1 == 1) == inside)
                        .map(|(_, y)| y.clone())
                };
                let lhs = Term::fold(Op::Meet, pick(true)).expect("nonempty");
                let rhs = Term::fold(Op::Join, pick(false)).expect("proper");
                equations.push(Equation::leq(lhs, rhs));
            }
        }
        Signature::Lat | Signature::DLat => {}
        other => {
            return Err(Error::InvalidArgument(format!(
                "refuting sets are available for LAT and DLAT, not {other}"
            )))
        }
    }
    Ok(RefutingSet {
        variety,
        n,
        equations,
    })
}

/// Dependence in LAT or DLAT by scanning the refuting set.
pub fn lattice_dependence(variety: Signature, terms: &[Term]) -> Result<Verdict> {
    if !matches!(variety, Signature::Lat | Signature::DLat) {
        return Err(Error::InvalidArgument(format!("{variety} is not a lattice variety")));
    }
    if terms.is_empty() {
        return Err(Error::InvalidArgument("at least one term is required".into()));
    }
    for t in terms {
        check_lattice(t)?;
    }
    let delta = refuting_set(variety, terms.len())?;
    let valid = |eq: &Equation| match variety {
        Signature::Lat => lat_valid(eq).expect("lattice terms"),
        _ => dlat_valid(eq).expect("lattice terms"),
    };
    let verdict = check_refuting(terms, &delta, &valid)?;
    Ok(match verdict {
        Verdict::Dependent {
            witness,
            evidence: Evidence::RefutingSet { index, size, .. },
        } if variety == Signature::Lat => {
            let inst = crate::term::instantiate(&witness, terms)?;
            let (_, trace) = lat_leq(&inst.lhs, &inst.rhs)?;
            Verdict::Dependent {
                witness,
                evidence: Evidence::RefutingSet {
                    index,
                    size,
                    trace: Some(trace),
                },
            }
        }
        other => other,
    })
}
