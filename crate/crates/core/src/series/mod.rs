//! Truncated multivariate power series, matrices of series, and global
//! polynomials.

mod matrix;
mod monomial;
mod poly;
mod truncated;

pub use matrix::SeriesMatrix;
pub use monomial::{monomials_of_degree, monomials_up_to, Monomial};
pub use poly::{Polynomial, RawPoly};
pub use truncated::{int_as, series_diff, series_invert, series_mul, TruncatedSeries};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{RawComplex, Scalar};

/// JSON form `{d, center, K, terms: [{exps, re, im}]}`.
pub fn series_to_json<T: Scalar>(s: &TruncatedSeries<T>) -> Value {
    let center: Vec<Value> = s.center().iter().map(crate::scalar::scalar_to_json).collect();
    let terms: Vec<Value> = s
        .terms()
        .map(|(m, c)| {
            let (re, im) = c.json_parts();
            json!({"exps": m.0, "re": re, "im": im})
        })
        .collect();
    json!({"d": s.vars(), "center": center, "K": s.order(), "terms": terms})
}

/// Series parsed from JSON with its coefficient mode still open.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub center: Vec<RawComplex>,
    pub order: u32,
    pub poly: RawPoly,
}

impl RawSeries {
    pub fn parse(v: &Value) -> Result<RawSeries> {
        let d =
            v.get("d").and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput("series needs d".into()))? as usize;
        let order =
            v.get("K").and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput("series needs K".into()))? as u32;
        let center = match v.get("center") {
            Some(Value::Array(a)) => a.iter().map(RawComplex::parse).collect::<Result<Vec<_>>>()?,
            _ => vec![RawComplex::parse(&json!(0))?; d],
        };
        if center.len() != d {
            return Err(Error::InvalidInput("center length differs from d".into()));
        }
        let poly = RawPoly::parse(v.get("terms").unwrap_or(&json!([])), d)?;
        Ok(RawSeries { center, order, poly })
    }

    pub fn is_exact(&self) -> bool {
        self.poly.is_exact() && self.center.iter().all(RawComplex::is_exact)
    }

    pub fn to_series<T: Scalar>(&self) -> Result<TruncatedSeries<T>> {
        let center = self.center.iter().map(|c| c.to_scalar()).collect::<Result<Vec<T>>>()?;
        let p = self.poly.to_poly::<T>()?;
        for (m, _) in p.terms() {
            if m.degree() > self.order {
                return Err(Error::InvalidInput(format!("term of degree {} exceeds K = {}", m.degree(), self.order)));
            }
        }
        Ok(TruncatedSeries::from_terms(center, self.order, p.terms().map(|(m, c)| (m.clone(), c.clone()))))
    }
}

/// JSON form `{n, d, center, K, entries: [[terms]]}` where each entry is a
/// term list as in [`series_to_json`].
pub fn series_matrix_to_json<T: Scalar>(m: &SeriesMatrix<T>) -> Value {
    let n = m.size();
    let center: Vec<Value> = m.center().iter().map(crate::scalar::scalar_to_json).collect();
    let rows: Vec<Value> =
        (0..n).map(|i| Value::Array((0..n).map(|j| series_to_json(m.get(i, j))["terms"].clone()).collect())).collect();
    json!({"n": n, "d": m.center().len(), "center": center, "K": m.order(), "entries": rows})
}

/// Matrix of series parsed from JSON with its coefficient mode still open.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeriesMatrix {
    pub n: usize,
    pub center: Vec<RawComplex>,
    pub order: u32,
    pub entries: Vec<RawPoly>,
}

impl RawSeriesMatrix {
    /// Parses `{n, d, center, K, entries}`; missing entries are zero.
    pub fn parse(v: &Value) -> Result<RawSeriesMatrix> {
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput("series matrix needs n".into()))?
            as usize;
        let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput("series matrix needs d".into()))?
            as usize;
        let order =
            v.get("K").and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput("series matrix needs K".into()))?
                as u32;
        let center = match v.get("center") {
            Some(Value::Array(a)) => a.iter().map(RawComplex::parse).collect::<Result<Vec<_>>>()?,
            _ => vec![RawComplex::parse(&json!(0))?; d],
        };
        if center.len() != d {
            return Err(Error::InvalidInput("center length differs from d".into()));
        }
        let mut entries = vec![RawPoly { d, terms: Vec::new() }; n * n];
        if let Some(rows) = v.get("entries").and_then(Value::as_array) {
            if rows.len() != n {
                return Err(Error::InvalidInput(format!("entries must have {n} rows")));
            }
            for (i, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .filter(|r| r.len() == n)
                    .ok_or_else(|| Error::InvalidInput(format!("each row must have {n} entries")))?;
                for (j, e) in row.iter().enumerate() {
                    entries[i * n + j] = RawPoly::parse(e, d)?;
                }
            }
        }
        Ok(RawSeriesMatrix { n, center, order, entries })
    }

    pub fn is_exact(&self) -> bool {
        self.center.iter().all(RawComplex::is_exact) && self.entries.iter().all(RawPoly::is_exact)
    }

    pub fn to_matrix<T: Scalar>(&self) -> Result<SeriesMatrix<T>> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for p in &self.entries {
            let raw = RawSeries { center: self.center.clone(), order: self.order, poly: p.clone() };
            out.push(raw.to_series::<T>()?);
        }
        if out.is_empty() {
            let center = self.center.iter().map(|c| c.to_scalar()).collect::<Result<Vec<T>>>()?;
            return Ok(SeriesMatrix::zero(0, center, self.order));
        }
        SeriesMatrix::from_entries(self.n, out)
    }
}
