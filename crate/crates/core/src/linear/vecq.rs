//! Rational vector spaces: terms are linear forms, dependence is linear algebra.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::form::LinForm;
use crate::error::{Error, Result};
use crate::problem::DependenceProblem;
use crate::term::{render_rational, witness_var, Equation, Op, Signature, Term};
use crate::verdict::{Certificate, Evidence, Verdict};
use crate::Rational;

/// The linear form a vector-space term denotes.
pub fn compile_linear(t: &Term) -> Result<LinForm> {
    t.check_signature(Signature::VecQ)?;
    Ok(linear(t))
}

fn linear(t: &Term) -> LinForm {
    match t {
        Term::Var(v) => LinForm::var(v.clone()),
        Term::App(Op::Zero, _) => LinForm::zero(),
        Term::App(Op::Add, a) => linear(&a[0]).add(&linear(&a[1])),
        Term::App(Op::Neg, a) => linear(&a[0]).neg(),
        Term::App(Op::Scale(q), a) => linear(&a[0]).scale(q),
        Term::App(..) => unreachable!("checked against the VECQ signature"),
    }
}

fn difference(eq: &Equation) -> Result<LinForm> {
    eq.check_signature(Signature::VecQ)?;
    Ok(linear(&eq.lhs).sub(&linear(&eq.rhs)))
}

pub fn vs_valid(eq: &Equation) -> Result<bool> {
    Ok(difference(eq)?.is_zero())
}

/// Reduced echelon basis: each row has a pivot variable with coefficient 1
/// that appears in no other row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Echelon {
    rows: BTreeMap<String, LinForm>,
}

impl Echelon {
    pub fn of(forms: impl IntoIterator<Item = LinForm>) -> Echelon {
        let mut e = Echelon::default();
        for f in forms {
            e.insert(f);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Canonical remainder of `f` modulo the span.
    pub fn reduce(&self, f: &LinForm) -> LinForm {
        let mut r = f.clone();
        for (pivot, row) in &self.rows {
            let c = r.coeff(pivot);
            if !c.is_zero() {
                r = r.sub(&row.scale(&c));
            }
        }
        r
    }

    /// Adds `f` to the span; `false` if it was already there.
    pub fn insert(&mut self, f: LinForm) -> bool {
        let r = self.reduce(&f);
        let Some((pivot, c)) = r.iter().next().map(|(v, c)| (v.clone(), c.clone())) else {
            return false;
        };
        let row = r.scale(&(Rational::one() / c));
        for other in self.rows.values_mut() {
            let k = other.coeff(&pivot);
            if !k.is_zero() {
                *other = other.sub(&row.scale(&k));
            }
        }
        self.rows.insert(pivot, row);
        true
    }
}

/// `f` modulo the span of the `Σ` differences.
pub fn reduce_modulo(f: &LinForm, sigma: &[Equation]) -> Result<LinForm> {
    let basis = Echelon::of(sigma.iter().map(difference).collect::<Result<Vec<_>>>()?);
    Ok(basis.reduce(f))
}

pub fn vs_entails(sigma: &[Equation], eq: &Equation) -> Result<bool> {
    Ok(reduce_modulo(&difference(eq)?, sigma)?.is_zero())
}

/// First kernel vector of the rows, by elimination with an identity
/// augmentation. All-zero when the rows are independent.
fn kernel_vector(rows: &[LinForm]) -> (usize, Option<Vec<Rational>>) {
    let n = rows.len();
    let unit = |i: usize| -> Vec<Rational> {
        (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()
    };
    let mut pivots: Vec<(String, LinForm, Vec<Rational>)> = Vec::new();
    let mut nullity = 0;
    let mut first = None;
    for (i, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        let mut aug = unit(i);
        for (pivot, prow, paug) in &pivots {
            let c = r.coeff(pivot);
            if !c.is_zero() {
                r = r.sub(&prow.scale(&c));
                for (a, p) in aug.iter_mut().zip(paug) {
                    *a -= &c * p;
                }
            }
        }
        let lead = r.iter().next().map(|(v, c)| (v.clone(), c.clone()));
        match lead {
            Some((pivot, c)) => {
                let inv = Rational::one() / c;
                let aug: Vec<Rational> = aug.iter().map(|a| a * &inv).collect();
                pivots.push((pivot, r.scale(&inv), aug));
            }
            None => {
                nullity += 1;
                first.get_or_insert(aug);
            }
        }
    }
    (nullity, first)
}

/// Scales to coprime integers with a positive first nonzero entry.
fn primitive_vector(v: &[Rational]) -> Vec<Rational> {
    let as_form = LinForm::from_pairs(v.iter().enumerate().map(|(i, c)| (format!("{i:08}"), c.clone())));
    let (mut p, _) = as_form.primitive();
    if p.first_coeff().is_some_and(|c| c.is_negative()) {
        p = p.neg();
    }
    (0..v.len()).map(|i| p.coeff(&format!("{i:08}"))).collect()
}

fn coefficient_term(c: &Rational, y: Term) -> Term {
    if c.is_one() {
        y
    } else if (-c).is_one() {
        Term::neg(y)
    } else {
        Term::scale(c.clone(), y)
    }
}

pub fn vs_dependence(problem: &DependenceProblem) -> Result<Verdict> {
    if problem.variety != Signature::VecQ {
        return Err(Error::InvalidArgument(format!(
            "expected a VECQ problem, got {}",
            problem.variety
        )));
    }
    let sigma = Echelon::of(problem.sigma.iter().map(difference).collect::<Result<Vec<_>>>()?);
    let rows: Vec<LinForm> = problem
        .terms
        .iter()
        .map(|t| compile_linear(t).map(|f| sigma.reduce(&f)))
        .collect::<Result<_>>()?;
    let n = rows.len();
    let rank = Echelon::of(rows.iter().cloned()).rank();
    let (nullity, kernel) = kernel_vector(&rows);
    if rank + nullity != n {
        return Err(Error::Internal(format!("rank {rank} + nullity {nullity} != {n}")));
    }
    let Some(k) = kernel else {
        return Ok(Verdict::Independent {
            certificate: Certificate::FullRank { rank },
        });
    };
    let k = primitive_vector(&k);
    let summands: Vec<Term> = k
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| coefficient_term(c, Term::var(witness_var(i + 1))))
        .collect();
    let lhs = Term::fold(Op::Add, summands).expect("nonzero kernel vector");
    Ok(Verdict::Dependent {
        witness: Equation::eq(lhs, Term::zero()),
        evidence: Evidence::Kernel {
            coefficients: k.iter().map(render_rational).collect(),
        },
    })
}
