use std::collections::HashMap;
use std::fmt;

use nalgebra::DVector;

use crate::error::{AbmError, Result};
use crate::monomial::{Monomial, TermOrder};
use crate::points::PointSet;

/// A sparse real polynomial. No zero coefficient is ever stored; terms are
/// kept ascending in degrevlex.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Monomial, f64)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    /// Sum of `coefficient * term` pairs; repeated terms are merged.
    pub fn new(nvars: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Result<Self> {
        let mut acc: HashMap<Monomial, f64> = HashMap::new();
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(AbmError::VariableMismatch {
                    expected: nvars,
                    found: m.nvars(),
                });
            }
            if !c.is_finite() {
                return Err(AbmError::NonFinite("polynomial coefficients"));
            }
            *acc.entry(m).or_insert(0.0) += c;
        }
        let mut terms: Vec<(Monomial, f64)> = acc.into_iter().filter(|(_, c)| *c != 0.0).collect();
        terms.sort_by(|a, b| TermOrder::DegRevLex.cmp_terms(&a.0, &b.0));
        Ok(Polynomial { nvars, terms })
    }

    pub fn from_term(m: Monomial) -> Self {
        let nvars = m.nvars();
        Polynomial {
            nvars,
            terms: vec![(m, 1.0)],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map_or(0.0, |(_, c)| *c)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// Largest exponent of `x_k` over the support.
    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_in(k)).max().unwrap_or(0)
    }

    /// Support in ascending `order`.
    pub fn support(&self, order: TermOrder) -> Vec<Monomial> {
        let mut s: Vec<Monomial> = self.terms.iter().map(|(m, _)| m.clone()).collect();
        order.sort(&mut s);
        s
    }

    pub fn leading_term(&self, order: TermOrder) -> Option<&Monomial> {
        self.terms
            .iter()
            .map(|(m, _)| m)
            .max_by(|a, b| order.cmp_terms(a, b))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        if s == 0.0 {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.eval(point)).sum()
    }

    /// Evaluation vector `g(X)`.
    pub fn eval_vector(&self, x: &PointSet) -> DVector<f64> {
        let pts = x.matrix();
        let mut buf = vec![0.0; x.nvars()];
        DVector::from_fn(x.len(), |i, _| {
            for (j, b) in buf.iter_mut().enumerate() {
                *b = pts[(i, j)];
            }
            self.eval(&buf)
        })
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c * c).sum::<f64>().sqrt()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if *c < 0.0 { ("-", -c) } else { ("+", *c) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if m.is_one() {
                write!(f, "{mag:.4}")?;
            } else {
                write!(f, "{mag:.4}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Free-function form of [`Polynomial::coefficient_norm`].
pub fn coefficient_norm(g: &Polynomial) -> f64 {
    g.coefficient_norm()
}
