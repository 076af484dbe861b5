#![allow(dead_code)]

use abm_core::{
    abm, eval_matrix, grad_eval, gradient_weighted_norm_on, term_gradient_norm, AbmConfig, BasisComputation,
    Monomial, NormalizationMode, PointSet, ZConvention,
};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Random point set with `n <= 3`, `|X| <= max_points`, and a threshold.
/// Half of the instances are noisy samples of a quadric so that the runs
/// produce low-degree vanishing polynomials, the rest are uniform in a box.
pub fn random_instance(seed: u64, max_points: usize) -> (PointSet, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=3usize);
    let npts = rng.random_range(2..=max_points);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let structured = rng.random::<bool>() && n > 1;
    let rows: Vec<Vec<f64>> = (0..npts)
        .map(|_| {
            if structured {
                let mut p: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let r = p.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
                p.iter_mut().for_each(|v| *v = *v / r + noise.sample(&mut rng));
                p
            } else {
                (0..n).map(|_| rng.random_range(-1.5..1.5)).collect()
            }
        })
        .collect();
    let eps = 10f64.powf(rng.random_range(-2.5..-0.3));
    (PointSet::from_rows(&rows).unwrap(), eps)
}

pub fn raw_gradient_norm(g: &abm_core::Polynomial, x: &PointSet) -> f64 {
    grad_eval(g, x).norm()
}

/// Invariant families checked by [`invariant_violations`].
pub const CLOSURE: &str = "closure";
pub const RANK: &str = "rank";
pub const ACCEPTANCE: &str = "acceptance";
pub const GRADIENT_LB: &str = "gradient-lower-bound";
pub const GRADIENT_UB: &str = "gradient-upper-bound";
pub const COEFF_BOUND: &str = "coefficient-bound";
pub const COEFF_BOUND_PROOF: &str = "coefficient-bound-from-proof";

/// Every invariant of a single run; returns `(family, description)` for
/// each violation.
pub fn invariant_violations(x: &PointSet, r: &BasisComputation) -> Vec<(&'static str, String)> {
    let mut bad: Vec<(&'static str, String)> = Vec::new();
    let n = x.nvars();
    let npts = x.len() as f64;
    let eps = r.epsilon;
    let z = r.z_convention;
    let o = &r.order_ideal;
    let contains = |t: &Monomial| o.contains(t);

    // closure: every non-constant order term and every border term has a
    // divisor x_k-quotient in O
    for t in o.iter().filter(|t| !t.is_one()) {
        if !(0..n).any(|k| t.div_var(k).is_some_and(|q| contains(&q))) {
            bad.push((CLOSURE, format!("order term {t} has no quotient in O")));
        }
    }
    for g in &r.basis {
        if !(0..n).any(|k| g.border_term.div_var(k).is_some_and(|q| contains(&q))) {
            bad.push((CLOSURE, format!("border term {} has no quotient in O", g.border_term)));
        }
    }

    // cardinality and rank
    if o.len() > x.len() {
        bad.push((RANK, format!("|O| = {} exceeds |X| = {}", o.len(), x.len())));
    }
    let m = eval_matrix(o, x);
    let smin = m.clone().svd(false, false).singular_values.min();
    if o.len() <= x.len() && !(smin > 0.0) {
        bad.push((RANK, format!("O evaluation matrix is rank deficient (smin {smin:e})")));
    }

    // acceptance and unitarity
    for g in &r.basis {
        let norm = match r.mode {
            NormalizationMode::Coefficient => g.poly.coefficient_norm(),
            NormalizationMode::GradientWeighted => gradient_weighted_norm_on(&g.poly, x, z),
        };
        if (norm - 1.0).abs() > 1e-8 {
            bad.push((ACCEPTANCE, format!("basis polynomial for {} has norm {norm}", g.border_term)));
        }
        let ext = g.poly.eval_vector(x).norm();
        if (ext - g.vanishing_extent).abs() > 1e-8 || ext > eps + 1e-8 {
            bad.push((ACCEPTANCE, format!("extent {ext} vs recorded {} at eps {eps}", g.vanishing_extent)));
        }
        if g.poly.leading_term(r.order) != Some(&g.border_term) || g.poly.coefficient(&g.border_term) == 0.0 {
            bad.push((ACCEPTANCE, format!("border term {} is not the leading term", g.border_term)));
        }
    }
    // rejection
    for e in r.trace.iter().filter(|e| e.kept_as_order_term) {
        if !(e.extent() > eps) {
            bad.push((ACCEPTANCE, format!("term {} kept with extent {} <= eps {eps}", e.term, e.extent())));
        }
    }

    if r.mode == NormalizationMode::GradientWeighted {
        // lower bound on order-term gradient norms; degree-1 terms attain it
        for t in o.iter().filter(|t| !t.is_one()) {
            let gn = term_gradient_norm(t, x, ZConvention::DegreeWeighted);
            let lb = eps.powi(t.degree() as i32 - 1) * npts.sqrt();
            if gn < lb * (1.0 - 1e-12) || (t.degree() > 1 && !(gn > lb)) {
                bad.push((GRADIENT_LB, format!("order term {t}: gradient norm {gn} below {lb}")));
            }
        }
        for g in &r.basis {
            let raw = raw_gradient_norm(&g.poly, x);
            let ub = match z {
                ZConvention::DegreeWeighted => g.degree() as f64 * npts.sqrt(),
                ZConvention::Unit => npts.sqrt(),
            };
            if raw > ub * (1.0 + 1e-10) {
                bad.push((GRADIENT_UB, format!("{}: |grad g(X)| = {raw} above {ub}", g.border_term)));
            }
            if z == ZConvention::DegreeWeighted {
                let c0 = g.poly.coefficient(&Monomial::one(n));
                let gw = gradient_weighted_norm_on(&g.poly, x, z);
                let denom = eps.powi(g.degree() as i32 - 1).min(1.0) * npts.sqrt();
                let cn = g.poly.coefficient_norm();
                let ub = (gw * gw + c0 * c0).sqrt() / denom;
                if cn > ub * (1.0 + 1e-10) {
                    bad.push((COEFF_BOUND, format!("{}: coefficient norm {cn} above {ub}", g.border_term)));
                }
                if x.rows().any(|p| p.iter().all(|v| *v == 0.0)) {
                    let ub0 = (gw * gw + eps * eps).sqrt() / denom;
                    if cn > ub0 * (1.0 + 1e-10) {
                        bad.push((COEFF_BOUND, format!("{}: coefficient norm {cn} above {ub0} with origin in X", g.border_term)));
                    }
                }
                // the form that follows from the per-term lower bound
                // |t(X)|_gw^2 >= m: |c'|^2 <= |g|_gw^2 / m
                let m = denom * denom;
                let ub_proof = (gw * gw / m + c0 * c0).sqrt();
                if cn > ub_proof * (1.0 + 1e-10) {
                    bad.push((COEFF_BOUND_PROOF, format!("{}: coefficient norm {cn} above {ub_proof}", g.border_term)));
                }
            }
        }
    }
    bad
}

/// Runs (X, eps) and (alpha X, |alpha| eps) with gradient-weighted
/// normalization and compares order ideals, per-degree coefficient scaling
/// and evaluation vectors.
pub fn scaling_mismatch(x: &PointSet, eps: f64, alpha: f64, tol: f64) -> Option<String> {
    let cfg = AbmConfig::new(eps, NormalizationMode::GradientWeighted);
    let r = abm(x, &cfg).ok()?;
    let xa = PointSet::new(x.matrix() * alpha).unwrap();
    let ra = abm(&xa, &AbmConfig { epsilon: eps * alpha.abs(), ..cfg }).ok()?;
    if r.order_ideal != ra.order_ideal {
        return Some(format!("order ideals differ at alpha {alpha}"));
    }
    if r.basis.len() != ra.basis.len() {
        return Some(format!("basis sizes differ at alpha {alpha}"));
    }
    for (g, h) in r.basis.iter().zip(&ra.basis) {
        if g.border_term != h.border_term {
            return Some(format!("border terms differ at alpha {alpha}"));
        }
        let support = g.poly.support(r.order);
        if support != h.poly.support(r.order) {
            return Some(format!("supports differ for {} at alpha {alpha}", g.border_term));
        }
        let v = DVector::from_iterator(support.len(), support.iter().map(|t| g.poly.coefficient(t)));
        let w = DVector::from_iterator(
            support.len(),
            support
                .iter()
                .map(|t| h.poly.coefficient(t) * alpha.powi(t.degree() as i32 - 1)),
        );
        let s = if v.dot(&w) < 0.0 { -1.0 } else { 1.0 };
        let rel = (&v - s * &w).norm() / v.norm();
        if rel > tol {
            return Some(format!("coefficients of {} off by {rel:e} at alpha {alpha}", g.border_term));
        }
        let gx = g.poly.eval_vector(x) * alpha;
        let hx = h.poly.eval_vector(&xa);
        // exactly vanishing polynomials evaluate to round-off, which is
        // compared against the size of the summands instead
        let summands: f64 = g
            .poly
            .terms()
            .iter()
            .map(|(t, c)| c.abs() * abm_core::term_eval(t, x).norm())
            .sum();
        let diff = (&hx - s * &gx).norm();
        if diff > tol * gx.norm() + 1e-12 * alpha.abs() * summands {
            return Some(format!(
                "evaluations of {} off by {:e} at alpha {alpha}",
                g.border_term,
                diff / gx.norm()
            ));
        }
    }
    None
}

/// Random weighted problem with an optional zero-weight column of ones.
pub fn random_problem(seed: u64, with_constant: bool) -> (DMatrix<f64>, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = rng.random_range(2..=5usize);
    let nrows = rng.random_range(s + 1..=8);
    let mut m = DMatrix::from_fn(nrows, s, |_, _| rng.random_range(-2.0..2.0));
    let mut d = DVector::from_fn(s, |_, _| rng.random_range(0.2..3.0));
    if with_constant {
        m.column_mut(0).fill(1.0);
        d[0] = 0.0;
    }
    (m, d)
}

/// Smallest value of `v^T A v` subject to `v^T D^2 v = 1` from the Gram
/// matrix: eliminate the zero-weight block by its Schur complement and take
/// the smallest eigenvalue of the rescaled symmetric matrix.
pub fn dense_oracle(m: &DMatrix<f64>, d: &DVector<f64>) -> f64 {
    let a = m.transpose() * m;
    let p: Vec<usize> = (0..d.len()).filter(|&i| d[i] > 0.0).collect();
    let zs: Vec<usize> = (0..d.len()).filter(|&i| d[i] == 0.0).collect();
    let app = a.select_rows(&p).select_columns(&p);
    let schur = if zs.is_empty() {
        app
    } else {
        let apz = a.select_rows(&p).select_columns(&zs);
        let azz = a.select_rows(&zs).select_columns(&zs);
        let inv = azz.pseudo_inverse(1e-14).unwrap();
        &app - &apz * inv * apz.transpose()
    };
    let dinv = DMatrix::from_diagonal(&DVector::from_iterator(p.len(), p.iter().map(|&i| 1.0 / d[i])));
    let c = &dinv * schur * &dinv;
    let c = (&c + c.transpose()) * 0.5;
    SymmetricEigen::new(c).eigenvalues.min().max(0.0)
}
