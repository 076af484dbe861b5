use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abm::{abm, exact_threshold, AbmConfig, BasisComputation, NormalizationMode};
use crate::error::{AbmError, Result};
use crate::points::PointSet;
use crate::varieties::{perturb_and_recenter, preprocess, sample, scale, NoiseConvention, NoiseSpec, Variety};

use super::retrieval::{configuration_retrieval, epsilon_grid, search_grid, target_configuration};
use super::trial_seeds;

/// Lower bound `xi` on the scale factors at which coefficient-normalized ABM
/// can still reproduce a reference order ideal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum XiBound {
    Applicable {
        tau: u32,
        omega: u32,
        g_norm: f64,
        o_norm: f64,
        xi: f64,
    },
    NotApplicable {
        reason: String,
    },
}

impl XiBound {
    pub fn xi(&self) -> Option<f64> {
        match self {
            XiBound::Applicable { xi, .. } => Some(*xi),
            XiBound::NotApplicable { .. } => None,
        }
    }
}

/// `(g_norm / o_norm)^(1 / (omega - tau))`; `None` unless `omega > tau` and
/// both norms are positive.
pub fn xi_value(g_norm: f64, o_norm: f64, omega: u32, tau: u32) -> Option<f64> {
    (omega > tau && g_norm > 0.0 && o_norm > 0.0).then(|| (g_norm / o_norm).powf(1.0 / (omega - tau) as f64))
}

/// Bound from an existing run on `x`, using basis and order terms of degree
/// `<= max_degree`. `tau` is the lowest basis degree and `omega` the highest
/// order-term degree. Among the degree-`tau` basis polynomials the one with
/// the largest `|g(X)|` is used (every choice gives a valid bound; this one
/// is the tightest), and among degree-`omega` order terms the smallest
/// `|o(X)|`.
pub fn xi_from_basis(x: &PointSet, result: &BasisComputation, max_degree: u32) -> XiBound {
    let na = |reason: &str| XiBound::NotApplicable { reason: reason.into() };
    let Some(tau) = result.basis_up_to(max_degree).map(|g| g.degree()).min() else {
        return na("no basis polynomial up to the truncation degree");
    };
    let g_norm = result
        .basis_up_to(max_degree)
        .filter(|g| g.degree() == tau)
        .map(|g| g.poly.eval_vector(x).norm())
        .fold(0.0, f64::max);
    let order = result.order_ideal_up_to(max_degree);
    let omega = order.iter().map(|t| t.degree()).max().unwrap_or(0);
    if omega <= tau {
        return na("no order term above the lowest basis degree");
    }
    if g_norm <= exact_threshold(x) {
        return na("basis polynomial vanishes exactly");
    }
    let o_norm = order
        .iter()
        .filter(|t| t.degree() == omega)
        .map(|t| crate::evaluation::term_eval(t, x).norm())
        .fold(f64::INFINITY, f64::min);
    match xi_value(g_norm, o_norm, omega, tau) {
        Some(xi) => XiBound::Applicable {
            tau,
            omega,
            g_norm,
            o_norm,
            xi,
        },
        None => na("order term vanishes on the points"),
    }
}

/// Runs coefficient-normalized ABM on `x` at `epsilon` and derives the bound.
pub fn failure_bound_xi(x: &PointSet, epsilon: f64, max_degree: u32) -> Result<XiBound> {
    let cfg = AbmConfig::new(epsilon, NormalizationMode::Coefficient).with_stop_after_degree(max_degree);
    let r = abm(x, &cfg)?;
    Ok(xi_from_basis(x, &r, max_degree))
}

/// `0.01, 0.02, ..., 1.00`.
pub fn beta_grid() -> Vec<f64> {
    (1..=100).map(|k| k as f64 / 100.0).collect()
}

/// For every `beta`, does some threshold on the grid scaled by `beta * alpha`
/// reproduce `reference` order terms up to `max_degree` on `beta * x_hat`?
pub fn beta_search(
    x_hat: &PointSet,
    alpha: f64,
    reference: &BasisComputation,
    max_degree: u32,
    betas: &[f64],
) -> Result<Vec<bool>> {
    let want = reference.order_ideal_up_to(max_degree);
    let base = AbmConfig::new(0.0, NormalizationMode::Coefficient).with_stop_after_degree(max_degree);
    betas
        .par_iter()
        .map(|&beta| {
            let xb = scale(x_hat, beta)?;
            let s = search_grid(&xb, &epsilon_grid(beta * alpha), &base, |r| {
                r.order_ideal_up_to(max_degree) == want
            });
            Ok(s.any())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundSettings {
    pub variety: Variety,
    pub alphas: Vec<f64>,
    pub nu: f64,
    pub trials: usize,
    pub seed: u64,
    pub points: usize,
    pub noise_convention: NoiseConvention,
}

impl Default for BoundSettings {
    fn default() -> Self {
        BoundSettings {
            variety: Variety::V2,
            alphas: vec![1.0, 5.0, 10.0],
            nu: 0.01,
            trials: 5,
            seed: 0,
            points: 50,
            noise_convention: NoiseConvention::StdDev,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub dataset: Variety,
    pub alpha: f64,
    pub nu: f64,
    pub trial: usize,
    /// Smallest threshold at which coefficient-normalized ABM retrieves the
    /// target configuration on the scaled points; `None` if none does.
    pub epsilon_ref: Option<f64>,
    pub xi: XiBound,
    pub betas: Vec<f64>,
    pub success: Vec<bool>,
}

impl BoundReport {
    /// Successful scale factors at or below the bound.
    pub fn violations(&self) -> Vec<f64> {
        match self.xi.xi() {
            Some(xi) => self
                .betas
                .iter()
                .zip(&self.success)
                .filter(|(b, s)| **s && **b <= xi)
                .map(|(b, _)| *b)
                .collect(),
            None => vec![],
        }
    }

    pub fn holds(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn min_success_beta(&self) -> Option<f64> {
        self.betas.iter().zip(&self.success).find(|(_, s)| **s).map(|(b, _)| *b)
    }
}

/// For every scale and trial: perturb, scale, find the reference run with
/// coefficient normalization, compute `xi`, then sweep `beta`.
pub fn bound_experiment(settings: &BoundSettings) -> Result<Vec<BoundReport>> {
    if settings.trials == 0 {
        return Err(AbmError::InvalidInput("trials must be at least 1".into()));
    }
    if let Some(a) = settings.alphas.iter().find(|a| **a == 0.0 || !a.is_finite()) {
        return Err(AbmError::InvalidInput(format!("invalid scale {a}")));
    }
    let spec = settings.variety.spec();
    let target = target_configuration(&spec, settings.seed)?;
    let t = target.truncation_degree;
    let betas = beta_grid();

    let jobs: Vec<(f64, usize)> = settings
        .alphas
        .iter()
        .flat_map(|&a| (0..settings.trials).map(move |k| (a, k)))
        .collect();
    jobs.par_iter()
        .map(|&(alpha, trial)| {
            let seeds = trial_seeds(settings.seed, trial);
            let clean = preprocess(&sample(&spec, settings.points, seeds.sample)?)?;
            let noise = NoiseSpec {
                nu: settings.nu,
                seed: seeds.noise,
                convention: settings.noise_convention,
            };
            let x_hat = scale(&perturb_and_recenter(&clean, &noise)?, alpha)?;
            let base = AbmConfig::new(0.0, NormalizationMode::Coefficient).with_stop_after_degree(t);
            let search = search_grid(&x_hat, &epsilon_grid(alpha), &base, |r| configuration_retrieval(&target, r));
            let mut report = BoundReport {
                dataset: settings.variety,
                alpha,
                nu: settings.nu,
                trial,
                epsilon_ref: None,
                xi: XiBound::NotApplicable {
                    reason: "no reference run retrieves the target configuration".into(),
                },
                betas: betas.clone(),
                success: vec![false; betas.len()],
            };
            if let Some((eps, _)) = search.interval() {
                let reference = abm(&x_hat, &AbmConfig { epsilon: eps, ..base })?;
                report.epsilon_ref = Some(eps);
                report.xi = xi_from_basis(&x_hat, &reference, t);
                report.success = beta_search(&x_hat, alpha, &reference, t, &betas)?;
            }
            Ok(report)
        })
        .collect()
}
