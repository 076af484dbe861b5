//! Smallest constrained vanisher: minimize `|M v|^2` subject to
//! `v^T D^2 v = 1` for a diagonal, non-negative `D`.
//!
//! Coordinates with zero weight are unconstrained. They are eliminated first
//! by projecting the weighted columns onto the orthogonal complement of the
//! zero-weight columns; the remaining problem is a plain smallest singular
//! pair of `Q M_P D_P^{-1}`. The zero-weight coefficients are then recovered
//! by least squares. With every weight equal to one this is the smallest
//! right singular vector of `M`.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{AbmError, Result};

/// Relative cutoff for the numerical rank of the zero-weight block.
const RANK_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct ConstrainedMinProblem {
    pub matrix: DMatrix<f64>,
    pub weights: DVector<f64>,
}

impl ConstrainedMinProblem {
    pub fn new(matrix: DMatrix<f64>, weights: DVector<f64>) -> Result<Self> {
        if matrix.ncols() != weights.len() {
            return Err(AbmError::InvalidInput(format!(
                "matrix has {} columns but {} weights were given",
                matrix.ncols(),
                weights.len()
            )));
        }
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(AbmError::InvalidInput("empty constrained problem".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(AbmError::NonFinite("problem matrix"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(AbmError::InvalidInput("weights must be finite and non-negative".into()));
        }
        Ok(ConstrainedMinProblem { matrix, weights })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinSolution {
    /// Smallest attainable `|M v|^2`, clamped at zero.
    pub lambda: f64,
    pub v: DVector<f64>,
}

impl MinSolution {
    pub fn extent(&self) -> f64 {
        self.lambda.max(0.0).sqrt()
    }
}

/// Flip `v` so that its first nonzero entry is positive.
pub fn normalize_sign(v: &mut DVector<f64>) {
    if let Some(first) = v.iter().copied().find(|x| *x != 0.0) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Smallest singular value and its right singular vector; zero rows are
/// appended when `M` is wide so that the null space is represented.
fn smallest_right_singular(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (r, c) = m.shape();
    if c == 1 {
        return (m.column(0).norm(), DVector::from_element(1, 1.0));
    }
    let svd = if r < c {
        let mut padded = DMatrix::zeros(c, c);
        padded.view_mut((0, 0), (r, c)).copy_from(m);
        SVD::new(padded, false, true)
    } else {
        SVD::new(m.clone(), false, true)
    };
    let (imin, smin) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one singular value");
    let v_t = svd.v_t.expect("right singular vectors requested");
    (smin, v_t.row(imin).transpose())
}

/// Coefficient-normalized minimizer: smallest right singular vector of `M`.
pub fn smallest_singular_direction(m: &DMatrix<f64>) -> Result<MinSolution> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(AbmError::InvalidInput("empty matrix".into()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(AbmError::NonFinite("problem matrix"));
    }
    let (s, mut v) = smallest_right_singular(m);
    normalize_sign(&mut v);
    Ok(MinSolution { lambda: s * s, v })
}

/// Gradient-weighted minimizer; see the module docs for the reduction.
pub fn smallest_constrained_vanisher(p: &ConstrainedMinProblem) -> Result<MinSolution> {
    let m = &p.matrix;
    let nrows = m.nrows();
    let free: Vec<usize> = (0..m.ncols()).filter(|&j| p.weights[j] == 0.0).collect();
    let weighted: Vec<usize> = (0..m.ncols()).filter(|&j| p.weights[j] > 0.0).collect();
    if weighted.is_empty() {
        return Err(AbmError::DegenerateProblem);
    }

    let mp = m.select_columns(&weighted);
    let mut b = mp.clone();
    let mz = (!free.is_empty()).then(|| m.select_columns(&free));

    // orthonormal basis of span(M_Z) and the projection of M_P away from it
    if let Some(mz) = &mz {
        let basis = orthonormal_basis(mz);
        if basis.ncols() > 0 {
            let coef = basis.transpose() * &b;
            b -= &basis * coef;
        }
    }
    for (col, &j) in weighted.iter().enumerate() {
        let w = p.weights[j];
        b.column_mut(col).scale_mut(1.0 / w);
    }

    let (s, w) = smallest_right_singular(&b);
    let vp = DVector::from_iterator(weighted.len(), weighted.iter().zip(w.iter()).map(|(&j, wi)| wi / p.weights[j]));

    let mut v = DVector::zeros(m.ncols());
    for (i, &j) in weighted.iter().enumerate() {
        v[j] = vp[i];
    }
    if let Some(mz) = &mz {
        let rhs = -(&mp * &vp);
        let vz = least_squares(mz, &rhs, nrows);
        for (i, &j) in free.iter().enumerate() {
            v[j] = vz[i];
        }
    }
    normalize_sign(&mut v);
    Ok(MinSolution { lambda: s * s, v })
}

fn orthonormal_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 1 {
        let n = a.column(0).norm();
        if n == 0.0 {
            return DMatrix::zeros(a.nrows(), 0);
        }
        return a / n;
    }
    let svd = SVD::new(a.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > RANK_TOL * smax * a.nrows().max(a.ncols()) as f64)
        .collect();
    u.select_columns(&keep)
}

/// Minimum-norm least-squares solution of `a x = rhs`.
fn least_squares(a: &DMatrix<f64>, rhs: &DVector<f64>, nrows: usize) -> DVector<f64> {
    if a.ncols() == 1 {
        let n2 = a.column(0).norm_squared();
        if n2 == 0.0 {
            return DVector::zeros(1);
        }
        return DVector::from_element(1, a.column(0).dot(rhs) / n2);
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.max();
    let eps = RANK_TOL * smax * nrows.max(a.ncols()) as f64;
    svd.solve(rhs, eps).expect("u and v were computed").column(0).into_owned()
}
