//! Linear engines: abelian ℓ-groups over exact rationals and ℚ-vector spaces.

pub mod abl;
pub mod cond;
pub mod fm;
pub mod form;
pub mod pl;
pub mod vecq;

pub use abl::{
    cover_complement, graph_point, la_dependence, la_eliminate_conjunctive, la_entails, la_valid,
    project_graph, random_rational_point, sample_sigma_points, Coverage, LaValidity, Piece,
    PiecewiseMap,
};
pub use fm::{feasible, find_point, fm_eliminate, integral_multiple, project_out, random_point, simplify};
pub use form::{Cone, Constraint, LinForm, Point, Rel};
pub use pl::{compile_pl, eval_abl, pl_regions, PLTree, Region};
pub use vecq::{compile_linear, reduce_modulo, vs_dependence, vs_entails, vs_valid};
