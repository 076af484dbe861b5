//! Order ideals and their borders.

use std::collections::HashSet;

use crate::error::{AbmError, Result};
use crate::monomial::{Monomial, TermOrder};

/// A finite, divisor-closed set of terms kept in ascending term order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderIdealSet {
    nvars: usize,
    order: TermOrder,
    terms: Vec<Monomial>,
}

impl OrderIdealSet {
    /// Build from arbitrary terms; duplicates are merged and closure under
    /// division is checked.
    pub fn new(nvars: usize, order: TermOrder, terms: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let mut terms: Vec<Monomial> = terms.into_iter().collect();
        for t in &terms {
            if t.nvars() != nvars {
                return Err(AbmError::VariableMismatch {
                    expected: nvars,
                    found: t.nvars(),
                });
            }
        }
        order.sort(&mut terms);
        terms.dedup();
        check_closure(&terms)?;
        Ok(OrderIdealSet { nvars, order, terms })
    }

    /// `{1}`
    pub fn unit(nvars: usize, order: TermOrder) -> Self {
        OrderIdealSet {
            nvars,
            order,
            terms: vec![Monomial::one(nvars)],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, t: &Monomial) -> bool {
        self.terms
            .binary_search_by(|probe| self.order.cmp_terms(probe, t))
            .is_ok()
    }

    /// The border `(x_1 O ∪ ... ∪ x_n O) \ O`, ascending.
    pub fn border(&self) -> Vec<Monomial> {
        raw_border(&self.terms, self.nvars, self.order)
    }
}

fn check_closure(terms: &[Monomial]) -> Result<()> {
    let set: HashSet<&Monomial> = terms.iter().collect();
    for t in terms {
        // closure under division by a single variable implies full closure
        for k in 0..t.nvars() {
            if let Some(q) = t.div_var(k) {
                if !set.contains(&q) {
                    return Err(AbmError::NotOrderIdeal {
                        term: t.clone(),
                        missing: q,
                    });
                }
            }
        }
    }
    Ok(())
}

/// True iff every divisor of every element is also an element.
pub fn is_order_ideal(terms: &[Monomial]) -> bool {
    check_closure(terms).is_ok()
}

/// Border of an order ideal given as a plain term list, ascending in
/// `order`. Fails if `terms` is not an order ideal.
pub fn border(terms: &[Monomial], nvars: usize, order: TermOrder) -> Result<Vec<Monomial>> {
    if let Some(t) = terms.iter().find(|t| t.nvars() != nvars) {
        return Err(AbmError::VariableMismatch {
            expected: nvars,
            found: t.nvars(),
        });
    }
    check_closure(terms)?;
    Ok(raw_border(terms, nvars, order))
}

/// `(∪_k x_k·terms) \ terms` without any closure check.
pub(crate) fn raw_border(terms: &[Monomial], nvars: usize, order: TermOrder) -> Vec<Monomial> {
    let inside: HashSet<&Monomial> = terms.iter().collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in terms {
        for k in 0..nvars {
            let b = t.mul_var(k);
            if !inside.contains(&b) && seen.insert(b.clone()) {
                out.push(b);
            }
        }
    }
    order.sort(&mut out);
    out
}
