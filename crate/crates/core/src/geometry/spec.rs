//! JSON body specifications.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::body::{ConvexBody, Monomial, Polynomial};
use crate::scalar::{lit, Float};

/// `{"type":"ellipsoid","r":[...]}` or `{"type":"generic","coeffs":[...]}`
/// with coefficients `{"c": value, "e": [exponents]}` over the `2n` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Ellipsoid { r: Vec<f64> },
    Generic { coeffs: Vec<Monomial<f64>> },
}

impl BodySpec {
    pub fn build<T: Float>(&self) -> Result<ConvexBody<T>> {
        match self {
            BodySpec::Ellipsoid { r } => ConvexBody::ellipsoid(r.iter().map(|&v| lit::<T>(v)).collect()),
            BodySpec::Generic { coeffs } => {
                let dim = coeffs
                    .first()
                    .map(|m| m.e.len())
                    .ok_or_else(|| Error::Dimension("generic body without coefficients".into()))?;
                let terms = coeffs.iter().map(|m| Monomial { c: lit::<T>(m.c), e: m.e.clone() }).collect();
                ConvexBody::generic(Polynomial::new(dim, terms)?)
            }
        }
    }

    pub fn n(&self) -> usize {
        match self {
            BodySpec::Ellipsoid { r } => r.len(),
            BodySpec::Generic { coeffs } => coeffs.first().map_or(0, |m| m.e.len() / 2),
        }
    }
}
