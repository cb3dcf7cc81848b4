//! Homogeneous linear forms and constraints with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::term::render_rational;
use crate::Rational;

/// A point: coordinates by variable name. Missing coordinates read as 0.
pub type Point = BTreeMap<String, Rational>;

/// `Σ cᵥ·v` with nonzero coefficients only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinForm {
    coeffs: BTreeMap<String, Rational>,
}

impl LinForm {
    pub fn zero() -> LinForm {
        LinForm::default()
    }

    pub fn var(name: impl Into<String>) -> LinForm {
        LinForm::term(name, Rational::one())
    }

    pub fn term(name: impl Into<String>, c: Rational) -> LinForm {
        let mut f = LinForm::zero();
        f.add_term(name.into(), c);
        f
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Rational)>) -> LinForm {
        let mut f = LinForm::zero();
        for (v, c) in pairs {
            f.add_term(v.into(), c);
        }
        f
    }

    /// Integer coefficients, convenient in tests.
    pub fn from_ints(pairs: &[(&str, i64)]) -> LinForm {
        LinForm::from_pairs(pairs.iter().map(|(v, c)| (*v, Rational::from_integer(BigInt::from(*c)))))
    }

    fn add_term(&mut self, v: String, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(v.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn coeff(&self, v: &str) -> Rational {
        self.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.coeffs.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LinForm) -> LinForm {
        let mut f = self.clone();
        for (v, c) in &other.coeffs {
            f.add_term(v.clone(), c.clone());
        }
        f
    }

    pub fn sub(&self, other: &LinForm) -> LinForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LinForm {
        LinForm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> LinForm {
        if k.is_zero() {
            return LinForm::zero();
        }
        LinForm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
        }
    }

    pub fn eval(&self, p: &Point) -> Rational {
        self.coeffs
            .iter()
            .map(|(v, c)| c * p.get(v).cloned().unwrap_or_else(Rational::zero))
            .sum()
    }

    /// Replaces `v` by `by`.
    pub fn substitute(&self, v: &str, by: &LinForm) -> LinForm {
        let c = self.coeff(v);
        if c.is_zero() {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.coeffs.remove(v);
        rest.add(&by.scale(&c))
    }

    /// The form without `v`.
    pub fn without(&self, v: &str) -> LinForm {
        let mut f = self.clone();
        f.coeffs.remove(v);
        f
    }

    /// Positive multiple with coprime integer coefficients, and the factor used.
    pub fn primitive(&self) -> (LinForm, Rational) {
        if self.is_zero() {
            return (LinForm::zero(), Rational::one());
        }
        let mut lcm_den = BigInt::one();
        for c in self.coeffs.values() {
            lcm_den = lcm_den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            let n = c.numer() * (&lcm_den / c.denom());
            g = g.gcd(&n);
        }
        let factor = Rational::new(lcm_den, g.abs());
        (self.scale(&factor), factor)
    }

    /// Coefficients as integers; only meaningful after [`LinForm::primitive`].
    pub fn integer_coeffs(&self) -> Vec<(String, BigInt)> {
        self.coeffs
            .iter()
            .map(|(v, c)| {
                assert!(c.is_integer(), "integer coefficients expected");
                (v.clone(), c.to_integer())
            })
            .collect()
    }

    pub fn first_coeff(&self) -> Option<&Rational> {
        self.coeffs.values().next()
    }
}

impl fmt::Display for LinForm {
    /// `y1 + -x + 2|z`, in the term grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(v, c)| {
                if c.is_one() {
                    v.clone()
                } else if (-c).is_one() {
                    format!("-{v}")
                } else {
                    format!("{}|{v}", render_rational(c))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Comparison of a form with 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    /// `form ≥ 0`
    Ge,
    /// `form > 0`
    Gt,
    /// `form = 0`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub form: LinForm,
    pub rel: Rel,
}

impl Constraint {
    pub fn new(form: LinForm, rel: Rel) -> Constraint {
        Constraint { form, rel }
    }

    pub fn ge(form: LinForm) -> Constraint {
        Constraint::new(form, Rel::Ge)
    }

    pub fn gt(form: LinForm) -> Constraint {
        Constraint::new(form, Rel::Gt)
    }

    pub fn eq(form: LinForm) -> Constraint {
        Constraint::new(form, Rel::Eq)
    }

    /// The infeasible `0 > 0`.
    pub fn contradiction() -> Constraint {
        Constraint::gt(LinForm::zero())
    }

    pub fn is_contradiction(&self) -> bool {
        self.form.is_zero() && self.rel == Rel::Gt
    }

    pub fn is_tautology(&self) -> bool {
        self.form.is_zero() && self.rel != Rel::Gt
    }

    pub fn holds_at(&self, p: &Point) -> bool {
        let v = self.form.eval(p);
        match self.rel {
            Rel::Ge => !v.is_negative(),
            Rel::Gt => v.is_positive(),
            Rel::Eq => v.is_zero(),
        }
    }

    /// Primitive integer form; equations get a positive leading coefficient.
    pub fn normalized(&self) -> Constraint {
        let (mut form, _) = self.form.primitive();
        if self.rel == Rel::Eq && form.first_coeff().is_some_and(|c| c.is_negative()) {
            form = form.neg();
        }
        Constraint::new(form, self.rel)
    }

    /// The same constraint with `>` in place of `≥`.
    pub fn strict(&self) -> Constraint {
        match self.rel {
            Rel::Ge => Constraint::gt(self.form.clone()),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.rel {
            Rel::Ge => "<=",
            Rel::Gt => "<",
            Rel::Eq => "=",
        };
        write!(f, "0 {rel} {}", self.form)
    }
}

/// A conjunction of homogeneous constraints over named variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    pub vars: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl Cone {
    pub fn new(vars: Vec<String>, constraints: Vec<Constraint>) -> Cone {
        Cone { vars, constraints }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.constraints.iter().all(|c| c.holds_at(p))
    }

    pub fn is_closed(&self) -> bool {
        self.constraints.iter().all(|c| c.rel != Rel::Gt)
    }

    pub fn render(&self) -> Vec<String> {
        self.constraints.iter().map(Constraint::to_string).collect()
    }
}

/// `Σ zᵢ·vars[i]` as a point.
pub fn point_from(vars: &[String], values: &[Rational]) -> Point {
    vars.iter().cloned().zip(values.iter().cloned()).collect()
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let f = LinForm::from_ints(&[("x", 2), ("y", -3)]);
        let g = LinForm::from_ints(&[("x", -2), ("z", 1)]);
        assert_eq!(f.add(&g), LinForm::from_ints(&[("y", -3), ("z", 1)]));
        let p: Point = [("x".to_string(), int(1)), ("y".to_string(), int(2))].into_iter().collect();
        assert_eq!(f.eval(&p), int(-4));
        assert_eq!(f.substitute("x", &LinForm::var("y")), LinForm::from_ints(&[("y", -1)]));
    }

    #[test]
    fn primitive_forms() {
        let half = Rational::new(1.into(), 2.into());
        let f = LinForm::from_pairs([("x", half.clone()), ("y", -half)]);
        assert_eq!(f.primitive().0, LinForm::from_ints(&[("x", 1), ("y", -1)]));
        let g = LinForm::from_ints(&[("x", 4), ("y", 6)]);
        assert_eq!(g.primitive().0, LinForm::from_ints(&[("x", 2), ("y", 3)]));
        let e = Constraint::eq(LinForm::from_ints(&[("x", -2), ("y", 2)])).normalized();
        assert_eq!(e.form, LinForm::from_ints(&[("x", 1), ("y", -1)]));
    }

    #[test]
    fn display() {
        let f = LinForm::from_ints(&[("x", -1), ("y1", 1), ("z", 3)]);
        assert_eq!(f.to_string(), "-x + y1 + 3|z");
        assert_eq!(Constraint::ge(f).to_string(), "0 <= -x + y1 + 3|z");
        assert_eq!(Constraint::contradiction().to_string(), "0 < 0");
    }
}
