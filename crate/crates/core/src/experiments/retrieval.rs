use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abm::{abm, AbmConfig, BasisComputation, NormalizationMode};
use crate::error::Result;
use crate::evaluation::ZConvention;
use crate::monomial::{Monomial, TermOrder};
use crate::points::PointSet;
use crate::varieties::{perturb_and_recenter, preprocess, sample, scale, NoiseConvention, NoiseSpec, Variety, VarietySpec};

use super::trial_seeds;

/// Points and tolerance used to build the reference systems.
const TARGET_POINTS: usize = 500;
const TARGET_EPSILON: f64 = 1e-8;

/// Per-degree basis sizes of a reference system, `counts[t] = |G_t|` for
/// `t = 0..=truncation_degree`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetConfiguration {
    pub variety: Variety,
    pub truncation_degree: u32,
    pub counts: Vec<usize>,
    pub points: usize,
    pub epsilon: f64,
}

/// Reference configuration: 500 exact points, preprocessed, gradient-weighted
/// ABM at `epsilon = 1e-8`, counted up to the variety's truncation degree.
pub fn target_configuration(spec: &VarietySpec, seed: u64) -> Result<TargetConfiguration> {
    let x = preprocess(&sample(spec, TARGET_POINTS, seed)?)?;
    let t = spec.truncation_degree;
    let cfg = AbmConfig::new(TARGET_EPSILON, NormalizationMode::GradientWeighted).with_stop_after_degree(t);
    let r = abm(&x, &cfg)?;
    Ok(TargetConfiguration {
        variety: spec.id,
        truncation_degree: t,
        counts: r.degree_counts(t),
        points: TARGET_POINTS,
        epsilon: TARGET_EPSILON,
    })
}

/// `|G_t|` agrees with the target for every `t <= T`.
pub fn configuration_retrieval(target: &TargetConfiguration, result: &BasisComputation) -> bool {
    result.degree_counts(target.truncation_degree) == target.counts
}

/// `|alpha| * (1e-5 + k * 1e-3)` for every `k` with value below `|alpha|`.
pub fn epsilon_grid(alpha: f64) -> Vec<f64> {
    let a = alpha.abs();
    (0..)
        .map(|k| 1e-5 + k as f64 * 1e-3)
        .take_while(|u| *u < 1.0)
        .map(|u| a * u)
        .collect()
}

/// Outcome of a threshold sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonSearch {
    pub grid: Vec<f64>,
    pub success: Vec<bool>,
    /// ABM runs actually executed.
    pub runs: usize,
}

impl EpsilonSearch {
    pub fn success_indices(&self) -> Vec<usize> {
        self.success
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.then_some(i))
            .collect()
    }

    /// Smallest and largest successful grid value.
    pub fn interval(&self) -> Option<(f64, f64)> {
        let idx = self.success_indices();
        Some((self.grid[*idx.first()?], self.grid[*idx.last()?]))
    }

    pub fn any(&self) -> bool {
        self.success.iter().any(|s| *s)
    }
}

/// Evaluate `accept` on the ABM output for every threshold in `grid`
/// (ascending). A run's trajectory interval is reused for every grid value
/// it covers, which gives the same answer as running each value separately.
pub fn search_grid<F>(x: &PointSet, grid: &[f64], base: &AbmConfig, accept: F) -> EpsilonSearch
where
    F: Fn(&BasisComputation) -> bool,
{
    let mut success = vec![false; grid.len()];
    let mut runs = 0;
    let mut k = 0;
    while k < grid.len() {
        let cfg = AbmConfig {
            epsilon: grid[k],
            ..*base
        };
        runs += 1;
        match abm(x, &cfg) {
            Ok(r) => {
                let ok = accept(&r);
                let (_, hi) = r.trajectory_interval();
                let mut j = k;
                while j < grid.len() && (j == k || grid[j] < hi) {
                    success[j] = ok;
                    j += 1;
                }
                k = j;
            }
            // a numerically broken run counts as a failure for this threshold
            Err(_) => k += 1,
        }
    }
    EpsilonSearch {
        grid: grid.to_vec(),
        success,
        runs,
    }
}

/// Configuration-retrieval sweep over [`epsilon_grid`]`(alpha)`.
pub fn epsilon_linear_search(
    x: &PointSet,
    alpha: f64,
    mode: NormalizationMode,
    target: &TargetConfiguration,
) -> EpsilonSearch {
    let base = AbmConfig::new(0.0, mode).with_stop_after_degree(target.truncation_degree);
    search_grid(x, &epsilon_grid(alpha), &base, |r| configuration_retrieval(target, r))
}

/// Mean of `|g(X_clean)|` over basis polynomials of degree `<= T`; `None`
/// when there are none.
pub fn extent_of_vanishing(g: &BasisComputation, x_clean: &PointSet, max_degree: u32) -> Option<f64> {
    let norms: Vec<f64> = g
        .basis_up_to(max_degree)
        .map(|b| b.poly.eval_vector(x_clean).norm())
        .collect();
    (!norms.is_empty()).then(|| norms.iter().sum::<f64>() / norms.len() as f64)
}

/// Mean distance between unit-normalized, sign-aligned coefficient vectors of
/// basis polynomials with matching border terms (degree `<= T`). Each
/// polynomial without a partner contributes `sqrt(2)`.
pub fn coefficient_distance(a: &BasisComputation, b: &BasisComputation, max_degree: u32) -> f64 {
    let index_b: HashMap<&Monomial, _> = b.basis_up_to(max_degree).map(|g| (&g.border_term, g)).collect();
    let mut matched_b = 0usize;
    let mut dists = Vec::new();
    for ga in a.basis_up_to(max_degree) {
        let Some(gb) = index_b.get(&ga.border_term) else {
            dists.push(std::f64::consts::SQRT_2);
            continue;
        };
        matched_b += 1;
        let mut support: Vec<Monomial> = ga
            .poly
            .terms()
            .iter()
            .chain(gb.poly.terms())
            .map(|(m, _)| m.clone())
            .collect();
        TermOrder::DegRevLex.sort(&mut support);
        support.dedup();
        let unit = |p: &crate::polynomial::Polynomial| {
            let sign = if p.coefficient(&ga.border_term) < 0.0 { -1.0 } else { 1.0 };
            let n = p.coefficient_norm();
            support.iter().map(|m| sign * p.coefficient(m) / n).collect::<Vec<f64>>()
        };
        let (ua, ub) = (unit(&ga.poly), unit(&gb.poly));
        dists.push(ua.iter().zip(&ub).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt());
    }
    let unmatched_b = b.basis_up_to(max_degree).count() - matched_b;
    dists.extend(std::iter::repeat_n(std::f64::consts::SQRT_2, unmatched_b));
    if dists.is_empty() {
        0.0
    } else {
        dists.iter().sum::<f64>() / dists.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetrievalSettings {
    pub varieties: Vec<Variety>,
    pub alphas: Vec<f64>,
    pub nus: Vec<f64>,
    pub modes: Vec<NormalizationMode>,
    pub trials: usize,
    pub seed: u64,
    pub points: usize,
    pub noise_convention: NoiseConvention,
}

impl Default for RetrievalSettings {
    fn default() -> Self {
        RetrievalSettings {
            varieties: Variety::ALL.to_vec(),
            alphas: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            nus: vec![0.01],
            modes: vec![NormalizationMode::Coefficient, NormalizationMode::GradientWeighted],
            trials: 10,
            seed: 0,
            points: 50,
            noise_convention: NoiseConvention::StdDev,
        }
    }
}

/// One (dataset, normalization, scale, noise, trial) outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub dataset: Variety,
    pub normalization: NormalizationMode,
    pub alpha: f64,
    pub nu: f64,
    pub trial: usize,
    pub seed: u64,
    pub interval: Option<(f64, f64)>,
    /// Grid indices of every successful threshold.
    pub success_indices: Vec<usize>,
    pub extent_vanishing: Option<f64>,
    pub coeff_dist: Option<f64>,
    pub abm_runs: usize,
}

/// Aggregate over trials for one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub dataset: Variety,
    pub normalization: NormalizationMode,
    pub alpha: f64,
    pub nu: f64,
    pub trials: usize,
    pub successes: usize,
    /// Mean of the per-trial interval end points over successful trials.
    pub range: Option<(f64, f64)>,
    pub coeff_dist: Option<f64>,
    pub extent_vanishing: Option<f64>,
    pub records: Vec<TrialRecord>,
}

impl RetrievalReport {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Full sweep. Per trial: sample, preprocess, perturb and recenter, then for
/// every scale and normalization run the threshold search. Cells come back
/// ordered by (variety, nu, normalization, alpha) as given in `settings`.
pub fn retrieval_experiment(settings: &RetrievalSettings) -> Result<Vec<RetrievalReport>> {
    if settings.trials == 0 {
        return Err(crate::AbmError::InvalidInput("trials must be at least 1".into()));
    }
    if let Some(a) = settings.alphas.iter().find(|a| **a == 0.0 || !a.is_finite()) {
        return Err(crate::AbmError::InvalidInput(format!("invalid scale {a}")));
    }
    let targets: Vec<TargetConfiguration> = settings
        .varieties
        .par_iter()
        .map(|v| target_configuration(&v.spec(), settings.seed))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, f64, usize)> = (0..settings.varieties.len())
        .flat_map(|vi| settings.nus.iter().flat_map(move |&nu| (0..settings.trials).map(move |t| (vi, nu, t))))
        .collect();

    let per_trial: Vec<Vec<TrialRecord>> = jobs
        .par_iter()
        .map(|&(vi, nu, trial)| run_trial(settings, &targets[vi], nu, trial))
        .collect::<Result<_>>()?;

    let mut cells: BTreeMap<(usize, usize, usize, usize), Vec<TrialRecord>> = BTreeMap::new();
    for rec in per_trial.into_iter().flatten() {
        let vi = settings.varieties.iter().position(|v| *v == rec.dataset).unwrap();
        let ni = settings.nus.iter().position(|n| *n == rec.nu).unwrap();
        let mi = settings.modes.iter().position(|m| *m == rec.normalization).unwrap();
        let ai = settings.alphas.iter().position(|a| *a == rec.alpha).unwrap();
        cells.entry((vi, ni, mi, ai)).or_default().push(rec);
    }

    Ok(cells
        .into_values()
        .map(|mut records| {
            records.sort_by_key(|r| r.trial);
            let ok: Vec<&TrialRecord> = records.iter().filter(|r| r.interval.is_some()).collect();
            let first = &records[0];
            RetrievalReport {
                dataset: first.dataset,
                normalization: first.normalization,
                alpha: first.alpha,
                nu: first.nu,
                trials: records.len(),
                successes: ok.len(),
                range: mean(ok.iter().map(|r| r.interval.unwrap().0))
                    .zip(mean(ok.iter().map(|r| r.interval.unwrap().1))),
                coeff_dist: mean(ok.iter().filter_map(|r| r.coeff_dist)),
                extent_vanishing: mean(ok.iter().filter_map(|r| r.extent_vanishing)),
                records,
            }
        })
        .collect())
}

fn run_trial(
    settings: &RetrievalSettings,
    target: &TargetConfiguration,
    nu: f64,
    trial: usize,
) -> Result<Vec<TrialRecord>> {
    let spec = target.variety.spec();
    let t = target.truncation_degree;
    let seeds = trial_seeds(settings.seed, trial);
    let clean = preprocess(&sample(&spec, settings.points, seeds.sample)?)?;
    let noise = NoiseSpec {
        nu,
        seed: seeds.noise,
        convention: settings.noise_convention,
    };
    let noisy = perturb_and_recenter(&clean, &noise)?;
    let reference = preprocess(&sample(&spec, TARGET_POINTS, seeds.reference)?)?;

    let mut out = Vec::new();
    for &alpha in &settings.alphas {
        let x = scale(&noisy, alpha)?;
        let x_clean = scale(&clean, alpha)?;
        let ref_cfg = AbmConfig::new(TARGET_EPSILON * alpha.abs(), NormalizationMode::GradientWeighted)
            .with_stop_after_degree(t);
        let ref_basis = abm(&scale(&reference, alpha)?, &ref_cfg)?;
        for &mode in &settings.modes {
            let search = epsilon_linear_search(&x, alpha, mode, target);
            let interval = search.interval();
            let (ev, cd) = match interval {
                Some((lo, _)) => {
                    let cfg = AbmConfig::new(lo, mode).with_stop_after_degree(t).with_z(ZConvention::DegreeWeighted);
                    let basis = abm(&x, &cfg)?;
                    (
                        extent_of_vanishing(&basis, &x_clean, t),
                        Some(coefficient_distance(&basis, &ref_basis, t)),
                    )
                }
                None => (None, None),
            };
            out.push(TrialRecord {
                dataset: target.variety,
                normalization: mode,
                alpha,
                nu,
                trial,
                seed: seeds.sample,
                interval,
                success_indices: search.success_indices(),
                extent_vanishing: ev,
                coeff_dist: cd,
                abm_runs: search.runs,
            });
        }
    }
    Ok(out)
}
