//! Brute-force oracles over finite algebras and bounded term enumeration.

pub mod algebra;
pub mod catalog;
pub mod search;

pub use algebra::{assignments, eval_term, holds, Assignment, FiniteAlgebra};
pub use catalog::{
    algebra, catalog, generate_catalog, generate_catalog_text, groups, lattices, parse_catalog,
    render_catalog, semigroups, CATALOG_TEXT,
};
pub use search::{brute_dependence, marczewski_check, refute_in};
