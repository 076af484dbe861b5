//! Synthetic point sets on three affine varieties, plus the preprocessing,
//! noise and scaling steps applied before basis computation.
//!
//! * `v1`: `(x^2 + y^2)^3 - 4 x^2 y^2 = 0` (four-petal rose)
//! * `v2`: `x + y - z = 0`, `x^3 - 9 (x^2 - 3 y^2) = 0`
//! * `v3`: `x^2 - y^2 z^2 + z^3 = 0`
//!
//! Random numbers come from ChaCha8 seeded with a `u64`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, RowDVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{AbmError, Result};
use crate::monomial::Monomial;
use crate::points::PointSet;
use crate::polynomial::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variety {
    V1,
    V2,
    V3,
}

impl Variety {
    pub const ALL: [Variety; 3] = [Variety::V1, Variety::V2, Variety::V3];

    pub fn name(&self) -> &'static str {
        match self {
            Variety::V1 => "v1",
            Variety::V2 => "v2",
            Variety::V3 => "v3",
        }
    }

    pub fn spec(&self) -> VarietySpec {
        VarietySpec::new(*self)
    }

    /// Number of random parameters consumed per point.
    fn param_count(&self) -> usize {
        match self {
            Variety::V1 => 1,
            Variety::V2 => 2,
            Variety::V3 => 2,
        }
    }

    /// Map parameters to a point on the variety.
    ///
    /// * `v1`: `[theta]`
    /// * `v2`: `[x, sign]` with `x` in `[0, 9]`; `sign < 0` selects the lower branch
    /// * `v3`: `[s, t]`
    pub fn point_from_params(&self, p: &[f64]) -> Vec<f64> {
        match self {
            Variety::V1 => {
                let theta = p[0];
                let r = (2.0 * theta).sin();
                vec![r * theta.cos(), r * theta.sin()]
            }
            Variety::V2 => {
                let x = p[0];
                let s = if p[1] < 0.0 { -1.0 } else { 1.0 };
                let y = s * x * ((9.0 - x).max(0.0) / 27.0).sqrt();
                vec![x, y, x + y]
            }
            Variety::V3 => {
                let (s, t) = (p[0], p[1]);
                let z = s * s - t * t;
                vec![t * z, s, z]
            }
        }
    }

    fn draw_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Variety::V1 => vec![rng.random_range(0.0..2.0 * PI)],
            Variety::V2 => vec![rng.random_range(0.0..=9.0), if rng.random::<bool>() { 1.0 } else { -1.0 }],
            Variety::V3 => vec![rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)],
        }
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variety {
    type Err = AbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(Variety::V1),
            "v2" => Ok(Variety::V2),
            "v3" => Ok(Variety::V3),
            other => Err(AbmError::InvalidInput(format!("unknown variety `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarietySpec {
    pub id: Variety,
    pub nvars: usize,
    /// Largest total degree among the defining polynomials.
    pub truncation_degree: u32,
    pub defining_polynomials: Vec<Polynomial>,
}

impl VarietySpec {
    pub fn new(id: Variety) -> Self {
        let p = |n: usize, terms: &[(&[u32], f64)]| {
            Polynomial::new(n, terms.iter().map(|(e, c)| (Monomial::new(e.to_vec()), *c)))
                .expect("well-formed defining polynomial")
        };
        match id {
            Variety::V1 => VarietySpec {
                id,
                nvars: 2,
                truncation_degree: 6,
                // (x^2+y^2)^3 - 4x^2y^2
                defining_polynomials: vec![p(
                    2,
                    &[
                        (&[6, 0], 1.0),
                        (&[4, 2], 3.0),
                        (&[2, 4], 3.0),
                        (&[0, 6], 1.0),
                        (&[2, 2], -4.0),
                    ],
                )],
            },
            Variety::V2 => VarietySpec {
                id,
                nvars: 3,
                truncation_degree: 3,
                defining_polynomials: vec![
                    p(3, &[(&[1, 0, 0], 1.0), (&[0, 1, 0], 1.0), (&[0, 0, 1], -1.0)]),
                    p(3, &[(&[3, 0, 0], 1.0), (&[2, 0, 0], -9.0), (&[0, 2, 0], 27.0)]),
                ],
            },
            Variety::V3 => VarietySpec {
                id,
                nvars: 3,
                truncation_degree: 4,
                defining_polynomials: vec![p(3, &[(&[2, 0, 0], 1.0), (&[0, 2, 2], -1.0), (&[0, 0, 3], 1.0)])],
            },
        }
    }

    /// Largest absolute defining-polynomial value over the points.
    pub fn max_residual(&self, x: &PointSet) -> f64 {
        self.defining_polynomials
            .iter()
            .map(|g| g.eval_vector(x).amax())
            .fold(0.0, f64::max)
    }
}

/// How `nu` is turned into the per-coordinate noise distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseConvention {
    /// `N(0, nu^2)`: `nu` is the standard deviation.
    #[default]
    StdDev,
    /// `N(0, nu)`: `nu` is the variance.
    Variance,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub nu: f64,
    pub seed: u64,
    pub convention: NoiseConvention,
}

impl NoiseSpec {
    pub fn new(nu: f64, seed: u64) -> Self {
        NoiseSpec {
            nu,
            seed,
            convention: NoiseConvention::StdDev,
        }
    }

    pub fn std_dev(&self) -> f64 {
        match self.convention {
            NoiseConvention::StdDev => self.nu,
            NoiseConvention::Variance => self.nu.sqrt(),
        }
    }
}

/// `count` exact points on the variety.
pub fn sample(spec: &VarietySpec, count: usize, seed: u64) -> Result<PointSet> {
    if count == 0 {
        return Err(AbmError::InvalidInput("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let params = spec.id.draw_params(&mut rng);
            debug_assert_eq!(params.len(), spec.id.param_count());
            spec.id.point_from_params(&params)
        })
        .collect();
    PointSet::from_rows(&rows)
}

fn column_mean(m: &DMatrix<f64>) -> RowDVector<f64> {
    m.row_mean()
}

fn center(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mean = column_mean(m);
    let mut c = m.clone();
    for mut row in c.row_iter_mut() {
        row -= &mean;
    }
    c
}

/// Subtract the mean and scale so that the mean Euclidean norm of the
/// points is one.
pub fn preprocess(x: &PointSet) -> Result<PointSet> {
    let c = center(x.matrix());
    let mean_norm = c.row_iter().map(|r| r.norm()).sum::<f64>() / x.len() as f64;
    let spread = x.max_abs().max(f64::MIN_POSITIVE);
    if mean_norm <= 1e-14 * spread || mean_norm == 0.0 {
        return Err(AbmError::ZeroSpread);
    }
    PointSet::new(c / mean_norm)
}

/// Add i.i.d. Gaussian noise per coordinate, then subtract the new mean.
pub fn perturb_and_recenter(x: &PointSet, noise: &NoiseSpec) -> Result<PointSet> {
    let sd = noise.std_dev();
    if !(sd >= 0.0) || !sd.is_finite() {
        return Err(AbmError::InvalidInput(format!("noise level must be finite and >= 0, got {}", noise.nu)));
    }
    let mut m = x.matrix().clone();
    if sd > 0.0 {
        let normal = Normal::new(0.0, sd).expect("valid standard deviation");
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        // row-major draw order so the stream does not depend on storage layout
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] += normal.sample(&mut rng);
            }
        }
    }
    PointSet::new(center(&m))
}

/// Multiply every coordinate by `alpha`.
pub fn scale(x: &PointSet, alpha: f64) -> Result<PointSet> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(AbmError::InvalidInput(format!("scale factor must be finite and nonzero, got {alpha}")));
    }
    PointSet::new(x.matrix() * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn parametrizations_hit_the_variety() {
        let p = Variety::V1.point_from_params(&[PI / 4.0]);
        let h = 2f64.sqrt() / 2.0;
        assert!((p[0] - h).abs() < 1e-15 && (p[1] - h).abs() < 1e-15);
        assert!(Variety::V1.spec().max_residual(&PointSet::from_rows(&[p]).unwrap()) < 1e-15);

        assert_eq!(Variety::V2.point_from_params(&[9.0, 1.0]), vec![9.0, 0.0, 9.0]);
        let r = Variety::V2.spec().max_residual(&pts(&[&[9.0, 0.0, 9.0]]));
        assert_eq!(r, 0.0);

        assert_eq!(Variety::V3.point_from_params(&[1.0, 0.0]), vec![0.0, 1.0, 1.0]);
        assert_eq!(Variety::V3.spec().max_residual(&pts(&[&[0.0, 1.0, 1.0]])), 0.0);
    }

    #[test]
    fn samples_satisfy_defining_polynomials() {
        for v in Variety::ALL {
            let spec = v.spec();
            let x = sample(&spec, 500, 7).unwrap();
            assert_eq!(x.nvars(), spec.nvars);
            assert!(spec.max_residual(&x) <= 1e-9, "{v}: {}", spec.max_residual(&x));
            assert_eq!(x, sample(&spec, 500, 7).unwrap());
        }
        assert!(sample(&Variety::V1.spec(), 0, 1).is_err());
    }

    #[test]
    fn truncation_degrees() {
        for (v, t) in [(Variety::V1, 6), (Variety::V2, 3), (Variety::V3, 4)] {
            let spec = v.spec();
            assert_eq!(spec.truncation_degree, t);
            assert_eq!(spec.defining_polynomials.iter().map(|g| g.degree()).max(), Some(t));
        }
    }

    #[test]
    fn preprocess_examples() {
        let x = pts(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(preprocess(&x).unwrap(), x);
        assert_eq!(preprocess(&pts(&[&[2.0, 0.0], &[0.0, 0.0]])).unwrap(), x);
        assert!(matches!(preprocess(&pts(&[&[3.0, 4.0], &[3.0, 4.0]])), Err(AbmError::ZeroSpread)));
    }

    #[test]
    fn preprocess_properties() {
        for v in Variety::ALL {
            let x = sample(&v.spec(), 200, 3).unwrap();
            let p = preprocess(&x).unwrap();
            let mean = p.matrix().row_mean();
            assert!(mean.amax() < 1e-12);
            let mn = p.matrix().row_iter().map(|r| r.norm()).sum::<f64>() / p.len() as f64;
            assert!((mn - 1.0).abs() < 1e-12);
            let pp = preprocess(&p).unwrap();
            assert!((pp.matrix() - p.matrix()).amax() < 1e-12);
        }
    }

    #[test]
    fn noise_is_deterministic_and_calibrated() {
        let x = preprocess(&sample(&Variety::V3.spec(), 50, 11).unwrap()).unwrap();
        let a = perturb_and_recenter(&x, &NoiseSpec::new(0.01, 5)).unwrap();
        let b = perturb_and_recenter(&x, &NoiseSpec::new(0.01, 5)).unwrap();
        assert_eq!(a, b);
        let c = perturb_and_recenter(&x, &NoiseSpec::new(0.01, 6)).unwrap();
        assert_ne!(a, c);
        assert!((perturb_and_recenter(&x, &NoiseSpec::new(0.0, 5)).unwrap().matrix() - x.matrix()).amax() < 1e-15);

        // empirical standard deviation over 1e5 points
        let zero = PointSet::new(DMatrix::zeros(100_000, 2)).unwrap();
        for (conv, expect) in [(NoiseConvention::StdDev, 0.01), (NoiseConvention::Variance, 0.1)] {
            let spec = NoiseSpec {
                nu: 0.01,
                seed: 9,
                convention: conv,
            };
            let noisy = perturb_and_recenter(&zero, &spec).unwrap();
            for j in 0..2 {
                let col = noisy.matrix().column(j);
                let sd = (col.norm_squared() / col.len() as f64).sqrt();
                assert!((sd / expect - 1.0).abs() < 0.02, "{sd}");
            }
        }
    }

    #[test]
    fn scaling() {
        let x = pts(&[&[1.0, 2.0], &[-3.0, 0.5]]);
        assert_eq!(scale(&x, 1.0).unwrap(), x);
        assert_eq!(scale(&x, -1.0).unwrap().matrix(), &(-x.matrix()));
        let s = scale(&pts(&[&[1.0, 2.0]]), 0.01).unwrap();
        assert_eq!(s.point(0), vec![0.01, 0.02]);
        assert!(scale(&x, 0.0).is_err());
        for a in [0.01, -7.0, 100.0] {
            let back = scale(&scale(&x, a).unwrap(), 1.0 / a).unwrap();
            assert!((back.matrix() - x.matrix()).amax() <= 1e-12 * x.max_abs());
        }
    }
}
