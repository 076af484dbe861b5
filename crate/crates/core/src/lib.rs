//! Approximate border bases of vanishing ideals.
//!
//! The ABM algorithm computes, from a finite point set, an order ideal `O`
//! and a set of approximately vanishing polynomials, one per screened border
//! term. Candidates are normalized either by their coefficient vector or by
//! the gradient-weighted norm, which makes the output consistent under
//! scaling of the input points.

pub mod abm;
pub mod error;
pub mod evaluation;
pub mod experiments;
pub mod json;
pub mod monomial;
pub mod order_ideal;
pub mod points;
pub mod polynomial;
pub mod solver;
pub mod varieties;

pub use abm::{
    abm, exact_mode_check, exact_threshold, to_prebasis, AbmConfig, BasisComputation, BasisPolynomial,
    NormalizationMode, TraceEntry,
};
pub use error::{AbmError, Result};
pub use evaluation::{
    eval_matrix, grad_eval, gradient_norm, gradient_weighted_norm, gradient_weighted_norm_on, term_eval,
    term_gradient_norm, WeightTable, ZConvention,
};
pub use monomial::{compare, partial_derivative_term, Monomial, TermOrder};
pub use order_ideal::{border, is_order_ideal, OrderIdealSet};
pub use points::PointSet;
pub use polynomial::{coefficient_norm, Polynomial};
pub use solver::{
    smallest_constrained_vanisher, smallest_singular_direction, ConstrainedMinProblem, MinSolution,
};
pub use varieties::{
    perturb_and_recenter, preprocess, sample, scale, NoiseConvention, NoiseSpec, Variety, VarietySpec,
};
pub use json::{from_json_str, read_json, to_json_string, write_json};
