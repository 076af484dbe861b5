//! JSON form of a [`BasisComputation`].
//!
//! ```json
//! {"variables": 2, "order": "degrevlex", "normalization": "gradient_weighted",
//!  "z_convention": "degree_weighted", "epsilon": 0.1,
//!  "order_ideal": [[0,0],[0,1]],
//!  "basis": [{"border": [1,0], "terms": [{"m": [1,0], "c": 1.0}], "extent": 0.0}]}
//! ```
//!
//! Floats are written in shortest round-trip form, so parsing gives back the
//! exact `f64` values. The trace is not stored.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::abm::{BasisComputation, BasisPolynomial, NormalizationMode};
use crate::error::{AbmError, Result};
use crate::evaluation::ZConvention;
use crate::monomial::{Monomial, TermOrder};
use crate::polynomial::Polynomial;

#[derive(Serialize, Deserialize)]
struct TermJson {
    m: Monomial,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct BasisPolyJson {
    border: Monomial,
    terms: Vec<TermJson>,
    extent: f64,
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    variables: usize,
    order: TermOrder,
    normalization: NormalizationMode,
    z_convention: ZConvention,
    epsilon: f64,
    order_ideal: Vec<Monomial>,
    basis: Vec<BasisPolyJson>,
}

impl From<&BasisComputation> for BasisJson {
    fn from(r: &BasisComputation) -> Self {
        BasisJson {
            variables: r.nvars,
            order: r.order,
            normalization: r.mode,
            z_convention: r.z_convention,
            epsilon: r.epsilon,
            order_ideal: r.order_ideal.clone(),
            basis: r
                .basis
                .iter()
                .map(|g| BasisPolyJson {
                    border: g.border_term.clone(),
                    terms: g
                        .poly
                        .terms()
                        .iter()
                        .map(|(m, c)| TermJson { m: m.clone(), c: *c })
                        .collect(),
                    extent: g.vanishing_extent,
                })
                .collect(),
        }
    }
}

pub fn to_json_string(r: &BasisComputation) -> Result<String> {
    Ok(serde_json::to_string_pretty(&BasisJson::from(r))?)
}

pub fn write_json<W: Write>(w: W, r: &BasisComputation) -> Result<()> {
    serde_json::to_writer_pretty(w, &BasisJson::from(r))?;
    Ok(())
}

/// Parse a basis written by [`write_json`]. The trace comes back empty.
pub fn read_json<R: Read>(r: R) -> Result<BasisComputation> {
    let j: BasisJson = serde_json::from_reader(r)?;
    from_json(j)
}

pub fn from_json_str(s: &str) -> Result<BasisComputation> {
    from_json(serde_json::from_str(s)?)
}

fn from_json(j: BasisJson) -> Result<BasisComputation> {
    let n = j.variables;
    let check = |m: &Monomial| {
        if m.nvars() == n {
            Ok(())
        } else {
            Err(AbmError::VariableMismatch {
                expected: n,
                found: m.nvars(),
            })
        }
    };
    for t in &j.order_ideal {
        check(t)?;
    }
    let mut basis = Vec::with_capacity(j.basis.len());
    for g in j.basis {
        check(&g.border)?;
        let terms: Vec<(Monomial, f64)> = g.terms.into_iter().map(|t| (t.m, t.c)).collect();
        basis.push(BasisPolynomial {
            poly: Polynomial::new(n, terms)?,
            border_term: g.border,
            vanishing_extent: g.extent,
        });
    }
    Ok(BasisComputation {
        nvars: n,
        order: j.order,
        mode: j.normalization,
        z_convention: j.z_convention,
        epsilon: j.epsilon,
        order_ideal: j.order_ideal,
        basis,
        trace: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abm::{abm, AbmConfig};
    use crate::points::PointSet;

    #[test]
    fn round_trip_reproduces_extents() {
        let x = PointSet::from_rows(&[
            vec![0.3, -0.7],
            vec![1.1, 0.2],
            vec![-0.4, 0.9],
            vec![0.05, 0.5],
            vec![-1.2, -0.3],
        ])
        .unwrap();
        for mode in [NormalizationMode::Coefficient, NormalizationMode::GradientWeighted] {
            let r = abm(&x, &AbmConfig::new(0.05, mode)).unwrap();
            let back = from_json_str(&to_json_string(&r).unwrap()).unwrap();
            assert_eq!(back.order_ideal, r.order_ideal);
            assert_eq!(back.basis, r.basis);
            for g in &back.basis {
                let e = g.poly.eval_vector(&x).norm();
                assert!((e - g.vanishing_extent).abs() <= 1e-10, "{e} vs {}", g.vanishing_extent);
            }
        }
    }

    #[test]
    fn layout() {
        let x = PointSet::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let r = abm(&x, &AbmConfig::new(0.1, NormalizationMode::GradientWeighted)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json_string(&r).unwrap()).unwrap();
        assert_eq!(v["variables"], 2);
        assert_eq!(v["order"], "degrevlex");
        assert_eq!(v["order_ideal"], serde_json::json!([[0, 0]]));
        assert_eq!(v["basis"].as_array().unwrap().len(), 2);
        assert!(v["basis"][0]["terms"][0]["m"].is_array());
    }

    #[test]
    fn rejects_mismatched_terms() {
        let s = r#"{"variables":2,"order":"degrevlex","normalization":"coefficient","z_convention":"degree_weighted",
            "epsilon":0.1,"order_ideal":[[0,0,0]],"basis":[]}"#;
        assert!(from_json_str(s).is_err());
    }
}
