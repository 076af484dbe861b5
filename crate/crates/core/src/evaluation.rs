//! Evaluation vectors and matrices, analytic gradients, and the two
//! data-dependent norms built on them.
//!
//! The gradient norm of a non-constant polynomial `g` on `X` is
//! `sqrt(sum_{x in X} |grad g(x)|^2) / Z` with `Z = sqrt(sum_k deg_k(g)^2)`
//! (or `Z = 1` under [`ZConvention::Unit`]); constants have gradient norm 0.
//! The gradient-weighted norm of `g = sum_i c_i t_i` reweights each
//! coefficient by the gradient norm of its term.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{AbmError, Result};
use crate::monomial::Monomial;
use crate::points::PointSet;
use crate::polynomial::Polynomial;

/// Normalizing constant used by the gradient norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZConvention {
    /// `Z = sqrt(sum_k deg_k(g)^2)`.
    #[default]
    DegreeWeighted,
    /// `Z = 1`.
    Unit,
}

impl ZConvention {
    fn z(&self, degrees: impl Iterator<Item = u32>) -> f64 {
        match self {
            ZConvention::DegreeWeighted => degrees.map(|d| (d as f64).powi(2)).sum::<f64>().sqrt(),
            ZConvention::Unit => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ZConvention::DegreeWeighted => "deg",
            ZConvention::Unit => "one",
        }
    }
}

impl std::str::FromStr for ZConvention {
    type Err = AbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deg" | "degree_weighted" => Ok(ZConvention::DegreeWeighted),
            "one" | "unit" => Ok(ZConvention::Unit),
            other => Err(AbmError::InvalidInput(format!("unknown z convention `{other}`"))),
        }
    }
}

/// Evaluation vector `t(X)` of a single term.
pub fn term_eval(t: &Monomial, x: &PointSet) -> DVector<f64> {
    let pts = x.matrix();
    let mut out = DVector::from_element(x.len(), 1.0);
    for (k, &e) in t.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        for i in 0..x.len() {
            out[i] *= pts[(i, k)].powi(e as i32);
        }
    }
    out
}

/// Evaluation matrix: column `j` is `terms[j](X)`.
pub fn eval_matrix(terms: &[Monomial], x: &PointSet) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(x.len(), terms.len());
    for (j, t) in terms.iter().enumerate() {
        m.set_column(j, &term_eval(t, x));
    }
    m
}

/// Concatenation of `grad g(x)` over all `x in X` (length `n * N`).
pub fn grad_eval(g: &Polynomial, x: &PointSet) -> DVector<f64> {
    let n = x.nvars();
    let mut out = DVector::zeros(n * x.len());
    for (t, c) in g.terms() {
        for k in 0..n {
            let (dk, q) = t.partial_derivative(k);
            let Some(q) = q else { continue };
            let scale = c * dk as f64;
            let qx = term_eval(&q, x);
            for i in 0..x.len() {
                out[i * n + k] += scale * qx[i];
            }
        }
    }
    out
}

/// `|grad t(X)|` for a term, computed from the `x_k`-quotients.
fn term_grad_norm_sq(t: &Monomial, x: &PointSet) -> f64 {
    (0..t.nvars())
        .filter_map(|k| {
            let (dk, q) = t.partial_derivative(k);
            q.map(|q| (dk as f64).powi(2) * term_eval(&q, x).norm_squared())
        })
        .sum()
}

/// Gradient norm of a single term.
pub fn term_gradient_norm(t: &Monomial, x: &PointSet, z: ZConvention) -> f64 {
    if t.is_one() {
        return 0.0;
    }
    term_grad_norm_sq(t, x).sqrt() / z.z(t.exponents().iter().copied())
}

/// Gradient norm of a polynomial.
pub fn gradient_norm(g: &Polynomial, x: &PointSet, z: ZConvention) -> f64 {
    if g.is_constant() {
        return 0.0;
    }
    grad_eval(g, x).norm() / z.z((0..g.nvars()).map(|k| g.degree_in(k)))
}

/// Per-term gradient norms on one fixed point set, filled on demand.
#[derive(Clone, Debug)]
pub struct WeightTable {
    fingerprint: u64,
    z: ZConvention,
    weights: HashMap<Monomial, f64>,
}

impl WeightTable {
    pub fn new(x: &PointSet, z: ZConvention) -> Self {
        WeightTable {
            fingerprint: x.fingerprint(),
            z,
            weights: HashMap::new(),
        }
    }

    pub fn z_convention(&self) -> ZConvention {
        self.z
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Cached weight, if present.
    pub fn get(&self, t: &Monomial) -> Option<f64> {
        self.weights.get(t).copied()
    }

    /// Weight of `t`, computing and caching it when missing.
    pub fn weight(&mut self, t: &Monomial, x: &PointSet) -> Result<f64> {
        if x.fingerprint() != self.fingerprint {
            return Err(AbmError::WeightTableMismatch);
        }
        Ok(self.weight_unchecked(t, x))
    }

    /// Same as [`WeightTable::weight`] for callers that already verified `x`.
    pub(crate) fn weight_unchecked(&mut self, t: &Monomial, x: &PointSet) -> f64 {
        if let Some(w) = self.weights.get(t) {
            return *w;
        }
        let w = term_gradient_norm(t, x, self.z);
        self.weights.insert(t.clone(), w);
        w
    }
}

/// Gradient-weighted norm `sqrt(sum_i c_i^2 w(t_i)^2)`.
pub fn gradient_weighted_norm(g: &Polynomial, table: &mut WeightTable, x: &PointSet) -> Result<f64> {
    if x.fingerprint() != table.fingerprint {
        return Err(AbmError::WeightTableMismatch);
    }
    Ok(g.terms()
        .iter()
        .map(|(t, c)| {
            let w = table.weight_unchecked(t, x);
            c * c * w * w
        })
        .sum::<f64>()
        .sqrt())
}

/// Gradient-weighted norm with a throwaway weight table.
pub fn gradient_weighted_norm_on(g: &Polynomial, x: &PointSet, z: ZConvention) -> f64 {
    let mut table = WeightTable::new(x, z);
    gradient_weighted_norm(g, &mut table, x).expect("fresh table matches its own point set")
}
