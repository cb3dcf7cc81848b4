//! Dependence problems and the line-oriented problem file format.
//!
//! ```text
//! variety: DLAT
//! # comment
//! term: x1 ^ (x2 v x3)
//! term: x2 v (x1 ^ x3)
//! sigma: x <= y        (ABL and VECQ only)
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result, TermError};
use crate::term::{
    is_witness_var, parse_equation, parse_term, render_equation, render_term, Equation, Signature,
    Term,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceProblem {
    pub variety: Signature,
    pub terms: Vec<Term>,
    pub sigma: Vec<Equation>,
}

impl DependenceProblem {
    /// Builds a problem, checking that all terms and equations fit `variety`.
    pub fn new(variety: Signature, terms: Vec<Term>, sigma: Vec<Equation>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("at least one term is required".into()));
        }
        for t in &terms {
            t.check_signature(variety)?;
        }
        let reserved = terms
            .iter()
            .flat_map(|t| t.free_vars())
            .chain(sigma.iter().flat_map(|e| e.free_vars()))
            .find(|v| is_witness_var(v));
        if let Some(v) = reserved {
            return Err(TermError::BadVariable(v).into());
        }
        for eq in &sigma {
            eq.check_signature(variety)?;
        }
        Ok(DependenceProblem {
            variety,
            terms,
            sigma,
        })
    }

    pub fn n(&self) -> usize {
        self.terms.len()
    }

    /// Variables of the terms and of sigma, in first-occurrence order.
    pub fn x_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let all = self
            .terms
            .iter()
            .flat_map(|t| t.free_vars())
            .chain(self.sigma.iter().flat_map(|e| e.free_vars()));
        for v in all {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}

fn problem_err(line: usize, message: impl Into<String>) -> Error {
    Error::Problem {
        line,
        message: message.into(),
    }
}

fn check_reserved(line: usize, vars: Vec<String>) -> Result<()> {
    match vars.into_iter().find(|v| is_witness_var(v)) {
        Some(v) => Err(problem_err(
            line,
            format!("variable `{v}` is reserved for witness equations"),
        )),
        None => Ok(()),
    }
}

/// Parses a problem file; errors carry 1-based line numbers.
pub fn parse_problem(text: &str) -> Result<DependenceProblem> {
    let mut variety: Option<Signature> = None;
    let mut terms = Vec::new();
    let mut sigma = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once(':')
            .ok_or_else(|| problem_err(line, "expected `key: value`"))?;
        let key = key.trim();
        let value = value.trim();
        match (key, variety) {
            ("variety", None) => {
                let sig = Signature::from_name(value)
                    .ok_or_else(|| Error::UnknownVariety(value.to_string()))?;
                variety = Some(sig);
            }
            ("variety", Some(_)) => return Err(problem_err(line, "duplicate `variety` line")),
            (_, None) => return Err(problem_err(line, "the first entry must be `variety: <name>`")),
            ("term", Some(sig)) => {
                let t = parse_term(value, sig).map_err(|e| problem_err(line, e.to_string()))?;
                check_reserved(line, t.free_vars())?;
                terms.push(t);
            }
            ("sigma", Some(sig)) => {
                let eq = parse_equation(value, sig).map_err(|e| problem_err(line, e.to_string()))?;
                check_reserved(line, eq.free_vars())?;
                sigma.push(eq);
            }
            (other, Some(_)) => return Err(problem_err(line, format!("unknown key `{other}`"))),
        }
    }
    let variety = variety.ok_or_else(|| problem_err(1, "missing `variety` line"))?;
    if terms.is_empty() {
        return Err(problem_err(last_line.max(1), "at least one `term:` line is required"));
    }
    DependenceProblem::new(variety, terms, sigma)
}

pub fn render_problem(p: &DependenceProblem) -> String {
    let mut out = format!("variety: {}\n", p.variety);
    for t in &p.terms {
        let _ = writeln!(out, "term: {}", render_term(t));
    }
    for eq in &p.sigma {
        let _ = writeln!(out, "sigma: {}", render_equation(eq));
    }
    out
}
