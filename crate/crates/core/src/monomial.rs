//! Terms (monomials) over a fixed number of variables and degree-compatible
//! term orderings.
//!
//! Variables are ranked `x_1 > x_2 > ... > x_n`; index `k` below is 0-based.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AbmError, Result};

/// A term `x_1^{e_1} ... x_n^{e_n}` stored as a dense exponent vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        let degree = exponents.iter().sum();
        Monomial { exponents, degree }
    }

    /// The constant term `1` in `nvars` variables.
    pub fn one(nvars: usize) -> Self {
        Monomial {
            exponents: vec![0; nvars],
            degree: 0,
        }
    }

    /// The variable `x_k` (0-based).
    pub fn var(nvars: usize, k: usize) -> Self {
        let mut exponents = vec![0; nvars];
        exponents[k] = 1;
        Monomial {
            exponents,
            degree: 1,
        }
    }

    pub fn nvars(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Exponent of `x_k`.
    pub fn degree_in(&self, k: usize) -> u32 {
        self.exponents[k]
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    /// `x_k * self`.
    pub fn mul_var(&self, k: usize) -> Monomial {
        let mut exponents = self.exponents.clone();
        exponents[k] += 1;
        Monomial {
            exponents,
            degree: self.degree + 1,
        }
    }

    /// `self / x_k`, or `None` when `x_k` does not divide `self`.
    pub fn div_var(&self, k: usize) -> Option<Monomial> {
        if self.exponents[k] == 0 {
            return None;
        }
        let mut exponents = self.exponents.clone();
        exponents[k] -= 1;
        Some(Monomial {
            exponents,
            degree: self.degree - 1,
        })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.nvars() == other.nvars()
            && self
                .exponents
                .iter()
                .zip(&other.exponents)
                .all(|(a, b)| a <= b)
    }

    /// All divisors of `self`, including `1` and `self`.
    pub fn divisors(&self) -> Vec<Monomial> {
        let mut out = vec![Vec::with_capacity(self.nvars())];
        for &e in &self.exponents {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=e).map(move |p| {
                        let mut v = prefix.clone();
                        v.push(p);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(Monomial::new).collect()
    }

    /// Partial derivative with respect to `x_k` as `(deg_k(t), t / x_k)`.
    ///
    /// Returns `(0, None)` when the derivative vanishes identically.
    pub fn partial_derivative(&self, k: usize) -> (u32, Option<Monomial>) {
        match self.div_var(k) {
            Some(q) => (self.exponents[k], Some(q)),
            None => (0, None),
        }
    }

    /// Value of the term at `point`.
    #[inline]
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(point)
            .fold(1.0, |acc, (&e, &x)| if e == 0 { acc } else { acc * x.powi(e as i32) })
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (k, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match e {
                1 => write!(f, "x{}", k + 1)?,
                _ => write!(f, "x{}^{}", k + 1, e)?,
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.exponents.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Vec::<u32>::deserialize(deserializer).map(Monomial::new)
    }
}

/// Partial derivative of `t` with respect to `x_k`; free-function form of
/// [`Monomial::partial_derivative`].
pub fn partial_derivative_term(t: &Monomial, k: usize) -> (u32, Option<Monomial>) {
    t.partial_derivative(k)
}

/// Degree-compatible term orderings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermOrder {
    /// Graded reverse lexicographic.
    #[default]
    DegRevLex,
    /// Graded lexicographic.
    GrLex,
}

impl TermOrder {
    /// Compare two terms; both must live in the same number of variables.
    pub fn compare(&self, s: &Monomial, t: &Monomial) -> Result<Ordering> {
        if s.nvars() != t.nvars() {
            return Err(AbmError::VariableMismatch {
                expected: s.nvars(),
                found: t.nvars(),
            });
        }
        Ok(self.cmp_terms(s, t))
    }

    /// Infallible comparison for terms already known to share a variable count.
    pub fn cmp_terms(&self, s: &Monomial, t: &Monomial) -> Ordering {
        debug_assert_eq!(s.nvars(), t.nvars());
        s.degree().cmp(&t.degree()).then_with(|| match self {
            // last differing exponent decides; the smaller exponent wins
            TermOrder::DegRevLex => s
                .exponents()
                .iter()
                .zip(t.exponents())
                .rev()
                .find(|(a, b)| a != b)
                .map_or(Ordering::Equal, |(a, b)| b.cmp(a)),
            TermOrder::GrLex => s.exponents().cmp(t.exponents()),
        })
    }

    pub fn sort(&self, terms: &mut [Monomial]) {
        terms.sort_by(|a, b| self.cmp_terms(a, b));
    }

    pub fn name(&self) -> &'static str {
        match self {
            TermOrder::DegRevLex => "degrevlex",
            TermOrder::GrLex => "grlex",
        }
    }
}

impl std::str::FromStr for TermOrder {
    type Err = AbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degrevlex" => Ok(TermOrder::DegRevLex),
            "grlex" => Ok(TermOrder::GrLex),
            other => Err(AbmError::InvalidInput(format!("unknown term order `{other}`"))),
        }
    }
}

/// Free-function form of [`TermOrder::compare`].
pub fn compare(order: TermOrder, s: &Monomial, t: &Monomial) -> Result<Ordering> {
    order.compare(s, t)
}

/// All terms of total degree exactly `d` in `nvars` variables.
pub fn terms_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == nvars {
            prefix.push(d);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(nvars, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial::new(Vec::new()));
        }
        return out;
    }
    rec(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
    out
}
