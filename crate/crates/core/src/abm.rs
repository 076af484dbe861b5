//! Approximate Buchberger–Möller (ABM) border basis computation.
//!
//! Terms are screened degree by degree. At degree `d` the candidates are the
//! degree-`d` border terms of the current order ideal, visited from the
//! smallest to the largest. Each candidate `b` is paired with the current
//! order terms, the smallest normalized vanisher over `{b} ∪ O` is computed,
//! and `b` either produces a basis polynomial (extent `<= epsilon`) or joins
//! `O`.
//!
//! The candidate list for degree `d` is built once. Adding a degree-`d` term
//! `b` to `O` only creates border terms `x_k b` of degree `d + 1`, and every
//! remaining candidate keeps a divisor in `O`, so recomputing the list after
//! each step would visit exactly the same terms.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{AbmError, Result};
use crate::evaluation::{term_eval, WeightTable, ZConvention};
use crate::monomial::{Monomial, TermOrder};
use crate::order_ideal::{is_order_ideal, raw_border, OrderIdealSet};
use crate::points::PointSet;
use crate::polynomial::Polynomial;
use crate::solver::{smallest_constrained_vanisher, smallest_singular_direction, ConstrainedMinProblem};

/// Smallest admissible magnitude of the normalized border coefficient.
const BORDER_COEFF_FLOOR: f64 = 1e-12;

/// How candidate polynomials are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Unit coefficient vector; the classical ABM algorithm.
    Coefficient,
    /// Unit gradient-weighted norm.
    #[default]
    GradientWeighted,
}

impl NormalizationMode {
    pub fn short_name(&self) -> &'static str {
        match self {
            NormalizationMode::Coefficient => "coeff",
            NormalizationMode::GradientWeighted => "gradw",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for NormalizationMode {
    type Err = AbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coeff" | "coefficient" => Ok(NormalizationMode::Coefficient),
            "gradw" | "gradient_weighted" => Ok(NormalizationMode::GradientWeighted),
            other => Err(AbmError::InvalidInput(format!("unknown normalization `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbmConfig {
    pub epsilon: f64,
    pub order: TermOrder,
    pub mode: NormalizationMode,
    pub z_convention: ZConvention,
    /// Fail with [`AbmError::DegreeGuard`] if candidates of a higher degree appear.
    pub max_degree_guard: Option<u32>,
    /// Stop cleanly after processing this degree. The output is then exact up
    /// to that degree and empty above it.
    pub stop_after_degree: Option<u32>,
}

impl AbmConfig {
    pub fn new(epsilon: f64, mode: NormalizationMode) -> Self {
        AbmConfig {
            epsilon,
            order: TermOrder::DegRevLex,
            mode,
            z_convention: ZConvention::DegreeWeighted,
            max_degree_guard: None,
            stop_after_degree: None,
        }
    }

    pub fn with_order(mut self, order: TermOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_z(mut self, z: ZConvention) -> Self {
        self.z_convention = z;
        self
    }

    pub fn with_stop_after_degree(mut self, d: u32) -> Self {
        self.stop_after_degree = Some(d);
        self
    }

    pub fn with_degree_guard(mut self, d: u32) -> Self {
        self.max_degree_guard = Some(d);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisPolynomial {
    pub poly: Polynomial,
    pub border_term: Monomial,
    /// `|g(X)|` at acceptance (square root of the minimal objective).
    pub vanishing_extent: f64,
}

impl BasisPolynomial {
    pub fn degree(&self) -> u32 {
        self.border_term.degree()
    }
}

/// One screened candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub term: Monomial,
    pub lambda: f64,
    /// `true` if the term joined the order ideal.
    pub kept_as_order_term: bool,
}

impl TraceEntry {
    pub fn extent(&self) -> f64 {
        self.lambda.max(0.0).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisComputation {
    pub nvars: usize,
    pub order: TermOrder,
    pub mode: NormalizationMode,
    pub z_convention: ZConvention,
    pub epsilon: f64,
    /// Order terms in ascending order (the order they were added in).
    pub order_ideal: Vec<Monomial>,
    pub basis: Vec<BasisPolynomial>,
    pub trace: Vec<TraceEntry>,
}

impl BasisComputation {
    /// Number of basis polynomials of each degree `0..=max_degree`.
    pub fn degree_counts(&self, max_degree: u32) -> Vec<usize> {
        let mut counts = vec![0; max_degree as usize + 1];
        for g in &self.basis {
            if let Some(c) = counts.get_mut(g.degree() as usize) {
                *c += 1;
            }
        }
        counts
    }

    pub fn basis_up_to(&self, max_degree: u32) -> impl Iterator<Item = &BasisPolynomial> {
        self.basis.iter().filter(move |g| g.degree() <= max_degree)
    }

    pub fn order_ideal_up_to(&self, max_degree: u32) -> Vec<Monomial> {
        self.order_ideal
            .iter()
            .filter(|t| t.degree() <= max_degree)
            .cloned()
            .collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.order_ideal
            .iter()
            .map(|t| t.degree())
            .chain(self.basis.iter().map(|g| g.degree()))
            .max()
            .unwrap_or(0)
    }

    pub fn order_ideal_set(&self) -> Result<OrderIdealSet> {
        OrderIdealSet::new(self.nvars, self.order, self.order_ideal.iter().cloned())
    }

    pub fn is_order_ideal(&self) -> bool {
        is_order_ideal(&self.order_ideal)
    }

    /// Half-open range `[lo, hi)` of acceptance thresholds that reproduce this
    /// exact run: every accepted extent is `<= lo` and every rejected one is
    /// `>= hi`. Any threshold in the range makes identical decisions.
    pub fn trajectory_interval(&self) -> (f64, f64) {
        let mut lo = 0.0_f64;
        let mut hi = f64::INFINITY;
        for e in &self.trace {
            if e.kept_as_order_term {
                hi = hi.min(e.extent());
            } else {
                lo = lo.max(e.extent());
            }
        }
        (lo, hi)
    }
}

/// Run ABM on `x`.
pub fn abm(x: &PointSet, cfg: &AbmConfig) -> Result<BasisComputation> {
    if !(cfg.epsilon >= 0.0) || !cfg.epsilon.is_finite() {
        return Err(AbmError::InvalidInput(format!("epsilon must be finite and >= 0, got {}", cfg.epsilon)));
    }
    run(x, cfg, cfg.epsilon)
}

fn run(x: &PointSet, cfg: &AbmConfig, threshold: f64) -> Result<BasisComputation> {
    let n = x.nvars();
    let npts = x.len();
    let mut weights = WeightTable::new(x, cfg.z_convention);
    let one = Monomial::one(n);

    let mut o_terms = vec![one.clone()];
    let mut o_cols = vec![DVector::from_element(npts, 1.0)];
    let mut o_weights = vec![match cfg.mode {
        NormalizationMode::Coefficient => 1.0,
        NormalizationMode::GradientWeighted => weights.weight_unchecked(&one, x),
    }];
    let mut basis = Vec::new();
    let mut trace = Vec::new();

    for d in 1u32.. {
        if cfg.stop_after_degree.is_some_and(|s| d > s) {
            break;
        }
        let candidates: Vec<Monomial> = raw_border(&o_terms, n, cfg.order)
            .into_iter()
            .filter(|b| b.degree() == d)
            .collect();
        if candidates.is_empty() {
            break;
        }
        if let Some(guard) = cfg.max_degree_guard {
            if d > guard {
                return Err(AbmError::DegreeGuard { degree: d, guard });
            }
        }
        for b in candidates {
            let b_col = term_eval(&b, x);
            let s = o_terms.len();
            let mut m = DMatrix::zeros(npts, s + 1);
            m.set_column(0, &b_col);
            for (j, c) in o_cols.iter().enumerate() {
                m.set_column(j + 1, c);
            }
            let (sol, b_weight) = match cfg.mode {
                NormalizationMode::Coefficient => (smallest_singular_direction(&m)?, 1.0),
                NormalizationMode::GradientWeighted => {
                    let wb = weights.weight_unchecked(&b, x);
                    let mut dvec = DVector::zeros(s + 1);
                    dvec[0] = wb;
                    for (j, w) in o_weights.iter().enumerate() {
                        dvec[j + 1] = *w;
                    }
                    (smallest_constrained_vanisher(&ConstrainedMinProblem::new(m, dvec)?)?, wb)
                }
            };
            let lambda = sol.lambda.max(0.0);
            let extent = lambda.sqrt();
            if extent <= threshold {
                if (sol.v[0] * b_weight).abs() < BORDER_COEFF_FLOOR {
                    return Err(AbmError::Invariant(format!(
                        "border coefficient of accepted polynomial for {b} is {:e}",
                        sol.v[0]
                    )));
                }
                let poly = Polynomial::new(
                    n,
                    std::iter::once((b.clone(), sol.v[0]))
                        .chain(o_terms.iter().cloned().zip(sol.v.iter().skip(1).copied())),
                )?;
                trace.push(TraceEntry {
                    term: b.clone(),
                    lambda,
                    kept_as_order_term: false,
                });
                basis.push(BasisPolynomial {
                    poly,
                    border_term: b,
                    vanishing_extent: extent,
                });
            } else {
                trace.push(TraceEntry {
                    term: b.clone(),
                    lambda,
                    kept_as_order_term: true,
                });
                o_weights.push(b_weight);
                o_cols.push(b_col);
                o_terms.push(b);
            }
        }
    }

    Ok(BasisComputation {
        nvars: n,
        order: cfg.order,
        mode: cfg.mode,
        z_convention: cfg.z_convention,
        epsilon: cfg.epsilon,
        order_ideal: o_terms,
        basis,
        trace,
    })
}

/// Divide every basis polynomial by its border coefficient, giving the
/// border prebasis form `b - sum_o c_o o`.
pub fn to_prebasis(result: &BasisComputation, order: TermOrder) -> Result<Vec<Polynomial>> {
    result
        .basis
        .iter()
        .map(|g| {
            let lead = g.poly.coefficient(&g.border_term);
            if lead == 0.0 {
                return Err(AbmError::Invariant(format!("zero border coefficient on {}", g.border_term)));
            }
            if g.poly.leading_term(order) != Some(&g.border_term) {
                return Err(AbmError::Invariant(format!(
                    "border term {} is not the leading term under {}",
                    g.border_term,
                    order.name()
                )));
            }
            Ok(g.poly.scale(1.0 / lead))
        })
        .collect()
}

/// Acceptance threshold for runs with `epsilon = 0`: floating point cannot
/// realize exact zeros, so extents up to
/// `1e-10 * (1 + max |coordinate|) * sqrt(N)` count as vanishing.
pub fn exact_threshold(x: &PointSet) -> f64 {
    1e-10 * (1.0 + x.max_abs()) * (x.len() as f64).sqrt()
}

/// ABM with `epsilon = 0` under the [`exact_threshold`] tolerance.
pub fn exact_mode_check(x: &PointSet, order: TermOrder, mode: NormalizationMode) -> Result<BasisComputation> {
    let cfg = AbmConfig::new(0.0, mode).with_order(order);
    run(x, &cfg, exact_threshold(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::gradient_weighted_norm_on;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    fn pts(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_origin_point() {
        let x = pts(&[&[0.0, 0.0]]);
        for mode in [NormalizationMode::Coefficient, NormalizationMode::GradientWeighted] {
            for eps in [0.0, 0.3] {
                let r = abm(&x, &AbmConfig::new(eps, mode)).unwrap();
                assert_eq!(r.order_ideal, vec![m(&[0, 0])]);
                let borders: Vec<_> = r.basis.iter().map(|g| g.border_term.clone()).collect();
                assert_eq!(borders, vec![m(&[0, 1]), m(&[1, 0])]);
                for g in &r.basis {
                    assert_eq!(g.poly.terms().len(), 1);
                    assert_eq!(g.vanishing_extent, 0.0);
                }
            }
        }
    }

    /// Hand trace on X = {(0,0), (1,0)} with gradient weights.
    #[test]
    fn two_point_hand_trace() {
        let x = pts(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let r = abm(&x, &AbmConfig::new(0.1, NormalizationMode::GradientWeighted)).unwrap();
        assert_eq!(r.order_ideal, vec![m(&[0, 0]), m(&[1, 0])]);
        let rejected = r.trace.iter().find(|e| e.term == m(&[1, 0])).unwrap();
        assert!(rejected.kept_as_order_term);
        assert!((rejected.extent() - 0.5).abs() < 1e-14);

        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let expect = [
            (m(&[0, 1]), vec![(m(&[0, 1]), 1.0 / s2)]),
            (m(&[1, 1]), vec![(m(&[1, 1]), s2)]),
            (m(&[2, 0]), vec![(m(&[2, 0]), 1.0 / s3), (m(&[1, 0]), -1.0 / s3)]),
        ];
        assert_eq!(r.basis.len(), 3);
        for (g, (border, terms)) in r.basis.iter().zip(expect) {
            assert_eq!(g.border_term, border);
            assert!(g.vanishing_extent < 1e-14);
            for (t, c) in terms {
                assert!((g.poly.coefficient(&t) - c).abs() < 1e-13, "{t}: {}", g.poly);
            }
            let rest: f64 = g.poly.terms().iter().map(|(_, c)| c * c).sum::<f64>().sqrt();
            assert!(rest < 2.0);
            let gw = gradient_weighted_norm_on(&g.poly, &x, ZConvention::DegreeWeighted);
            assert!((gw - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prebasis_form() {
        let x = pts(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let r = abm(&x, &AbmConfig::new(0.1, NormalizationMode::GradientWeighted)).unwrap();
        let pre = to_prebasis(&r, TermOrder::DegRevLex).unwrap();
        let last = &pre[2];
        assert!((last.coefficient(&m(&[2, 0])) - 1.0).abs() < 1e-14);
        assert!((last.coefficient(&m(&[1, 0])) + 1.0).abs() < 1e-12);
        assert!(last.coefficient(&m(&[0, 0])).abs() < 1e-12);

        let mut fake = r.clone();
        fake.basis = vec![BasisPolynomial {
            poly: Polynomial::new(2, [(m(&[0, 1]), 2.0)]).unwrap(),
            border_term: m(&[0, 1]),
            vanishing_extent: 0.0,
        }];
        assert_eq!(to_prebasis(&fake, TermOrder::DegRevLex).unwrap()[0], Polynomial::from_term(m(&[0, 1])));

        fake.basis = vec![BasisPolynomial {
            poly: Polynomial::new(2, [(m(&[1, 0]), -0.5), (m(&[0, 0]), 0.25)]).unwrap(),
            border_term: m(&[1, 0]),
            vanishing_extent: 0.0,
        }];
        let p = &to_prebasis(&fake, TermOrder::DegRevLex).unwrap()[0];
        assert_eq!(p.coefficient(&m(&[1, 0])), 1.0);
        assert_eq!(p.coefficient(&m(&[0, 0])), -0.5);

        fake.basis[0].border_term = m(&[0, 1]);
        assert!(matches!(to_prebasis(&fake, TermOrder::DegRevLex), Err(AbmError::Invariant(_))));
    }

    #[test]
    fn exact_mode_small_cases() {
        let x = pts(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let r = exact_mode_check(&x, TermOrder::DegRevLex, NormalizationMode::GradientWeighted).unwrap();
        assert_eq!(r.order_ideal, vec![m(&[0, 0]), m(&[1, 0])]);
        assert!(r.basis.iter().all(|g| g.vanishing_extent <= exact_threshold(&x)));

        let x = pts(&[&[0.3, -1.1], &[2.0, 0.7], &[-0.4, 0.9]]);
        for mode in [NormalizationMode::Coefficient, NormalizationMode::GradientWeighted] {
            let r = exact_mode_check(&x, TermOrder::DegRevLex, mode).unwrap();
            assert_eq!(r.order_ideal.len(), 3);
        }
    }

    #[test]
    fn guard_and_truncation() {
        let x = pts(&[&[0.3, -1.1], &[2.0, 0.7], &[-0.4, 0.9], &[1.0, 1.0], &[0.2, 0.1]]);
        let cfg = AbmConfig::new(1e-6, NormalizationMode::GradientWeighted);
        let full = abm(&x, &cfg).unwrap();
        assert!(full.max_degree() >= 2);
        assert!(matches!(abm(&x, &cfg.with_degree_guard(1)), Err(AbmError::DegreeGuard { .. })));
        let cut = abm(&x, &cfg.with_stop_after_degree(1)).unwrap();
        assert_eq!(cut.order_ideal, full.order_ideal_up_to(1));
        assert!(abm(&x, &AbmConfig::new(-1.0, NormalizationMode::Coefficient)).is_err());
    }

    #[test]
    fn trajectory_interval_reproduces_decisions() {
        let x = pts(&[&[0.3, -1.1], &[2.0, 0.7], &[-0.4, 0.9], &[1.0, 1.0], &[0.2, 0.1], &[-1.0, -0.5]]);
        let r = abm(&x, &AbmConfig::new(0.2, NormalizationMode::GradientWeighted)).unwrap();
        let (lo, hi) = r.trajectory_interval();
        assert!(lo <= 0.2 && 0.2 < hi);
        for eps in [lo, (lo + hi.min(10.0)) / 2.0] {
            let again = abm(&x, &AbmConfig::new(eps, NormalizationMode::GradientWeighted)).unwrap();
            assert_eq!(again.order_ideal, r.order_ideal);
            assert_eq!(again.trace, r.trace);
        }
    }
}
