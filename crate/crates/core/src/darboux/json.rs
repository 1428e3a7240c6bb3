use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{RawComplex, Scalar};
use crate::series::{series_matrix_to_json, RawPoly};

use super::{DEJet, DEProblem, ResidualReport};

/// Problem JSON `{d, n, x0, f: [poly], b: [complex], F0: [[complex]]}` read
/// before the coefficient mode is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct RawProblem {
    pub d: usize,
    pub n: usize,
    pub x0: Vec<RawComplex>,
    pub f: Vec<RawPoly>,
    pub b: Vec<RawComplex>,
    pub f0: Option<Vec<Vec<RawComplex>>>,
}

fn complex_list(v: Option<&Value>, what: &str) -> Result<Vec<RawComplex>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput(format!("problem needs {what}")))?
        .iter()
        .map(RawComplex::parse)
        .collect()
}

impl RawProblem {
    pub fn parse(v: &Value) -> Result<RawProblem> {
        let get =
            |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput(format!("problem needs {k}")));
        let d = get("d")? as usize;
        let n = get("n")? as usize;
        let x0 = complex_list(v.get("x0"), "x0")?;
        let b = complex_list(v.get("b"), "b")?;
        let f = v
            .get("f")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("problem needs f".into()))?
            .iter()
            .map(|p| RawPoly::parse(p, d))
            .collect::<Result<Vec<_>>>()?;
        if x0.len() != d || f.len() != n || b.len() != n {
            return Err(Error::InvalidInput("x0, f, b must have lengths d, n, n".into()));
        }
        let f0 = match v.get("F0") {
            None | Some(Value::Null) => None,
            Some(rows) => {
                let rows = rows
                    .as_array()
                    .filter(|r| r.len() == n)
                    .ok_or_else(|| Error::InvalidInput(format!("F0 must have {n} rows")))?;
                let mut out = Vec::with_capacity(n);
                for r in rows {
                    let r = complex_list(Some(r), "F0 rows")?;
                    if r.len() != n {
                        return Err(Error::InvalidInput(format!("F0 rows must have {n} entries")));
                    }
                    out.push(r);
                }
                Some(out)
            }
        };
        Ok(RawProblem { d, n, x0, f, b, f0 })
    }

    pub fn is_exact(&self) -> bool {
        self.x0.iter().chain(&self.b).all(RawComplex::is_exact)
            && self.f.iter().all(RawPoly::is_exact)
            && self.f0.iter().flatten().flatten().all(RawComplex::is_exact)
    }
}

/// Converts a parsed problem into the chosen scalar mode, returning the
/// problem and its initial value (zero when absent).
pub fn problem_from_json<T: Scalar>(raw: &RawProblem, tol: f64) -> Result<(DEProblem<T>, Vec<Vec<T>>)> {
    let x0 = raw.x0.iter().map(|c| c.to_scalar()).collect::<Result<Vec<T>>>()?;
    let b = raw.b.iter().map(|c| c.to_scalar()).collect::<Result<Vec<T>>>()?;
    let f = raw.f.iter().map(|p| p.to_poly()).collect::<Result<Vec<_>>>()?;
    let f0 = match &raw.f0 {
        Some(rows) => rows
            .iter()
            .map(|r| r.iter().map(|c| c.to_scalar()).collect::<Result<Vec<T>>>())
            .collect::<Result<Vec<_>>>()?,
        None => vec![vec![T::zero(); raw.n]; raw.n],
    };
    Ok((DEProblem::with_tol(x0, f, b, tol)?, f0))
}

pub fn jet_to_json<T: Scalar>(jet: &DEJet<T>) -> Value {
    series_matrix_to_json(&jet.f)
}

pub fn residual_to_json(r: &ResidualReport) -> Value {
    json!({
        "order": r.order,
        "de1": r.de1,
        "de2": r.de2,
        "base_constraint": r.base_constraint,
        "vanishes": r.vanishes,
        "max": r.max(),
    })
}
