//! Free semigroups and free groups.

pub mod group;
pub mod semigroup;

pub use group::{
    brute_relation, grp_dependence, grp_normalize, grp_valid, is_nielsen_reduced, nielsen_reduce, GLetter, GWord,
    NielsenResult, NielsenStep, NielsenTrace, Side,
};
pub use semigroup::{
    all_word_sets, brute_ambiguity, left_quotient, render_sword, sardinas_patterson, sg_dependence, sg_normalize,
    sg_witness, sword_from_letters, y_product, Origin, Residual, SPState, SWord, SpOutcome,
};

use crate::error::Result;
use crate::term::Equation;

/// Validity of a semigroup equation: equal leaf sequences.
pub fn sg_valid(eq: &Equation) -> Result<bool> {
    Ok(sg_normalize(&eq.lhs)? == sg_normalize(&eq.rhs)?)
}
