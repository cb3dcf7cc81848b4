//! Decision procedures for dependence of terms in varieties of algebras.
//!
//! Terms `t₁ … tₙ` are dependent when some equation `ε(y₁ … yₙ)` fails in
//! the variety but holds once each `yᵢ` is replaced by `tᵢ`. Every engine
//! returns a [`Verdict`] with a checkable witness or certificate.

pub mod api;
pub mod error;
pub mod lattice;
pub mod linear;
pub mod oracle;
pub mod problem;
pub mod sample;
pub mod term;
pub mod verdict;
pub mod word;

/// Exact rationals used throughout.
pub type Rational = num_rational::BigRational;

pub use api::{
    admissibility_harness, backend, backend_by_name, check_admissible_instance, check_refuting,
    decide, harness_independence, lattice_admissibility_laws, verify_verdict, AdmissibilityLaw,
    AdmissibilityReport, HarnessReport, Validity, VarietyBackend,
};
pub use error::{Error, Result, TermError};
pub use lattice::{
    dlat_leq, dlat_valid, lat_holds, lat_leq, lat_valid, lattice_dependence, refuting_set,
    RefutingSet, WhitmanTrace,
};
pub use sample::{random_problem, random_term};
pub use problem::{parse_problem, render_problem, DependenceProblem};
pub use term::{
    instantiate, parse_equation, parse_term, render_equation, render_term, substitute, Equation,
    Op, Relation, Signature, Substitution, Term,
};
pub use verdict::{Certificate, Evidence, Verdict};
