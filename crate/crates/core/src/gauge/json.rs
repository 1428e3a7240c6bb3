use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{scalar_to_json, RawComplex, Scalar};
use crate::series::{series_matrix_to_json, RawPoly, RawSeriesMatrix, SeriesMatrix, TruncatedSeries};

use super::{
    build_connection, DvWitness, FramedConnection, GaugeResidual, GaugeSeries, HolconReport, IntegrabilityReport,
};

/// A matrix of functions given either as `[[poly]]` in global coordinates
/// or as a series-matrix object in local coordinates at the center.
#[derive(Debug, Clone, PartialEq)]
enum RawField {
    Global(Vec<RawPoly>),
    Local(RawSeriesMatrix),
}

impl RawField {
    fn parse(v: &Value, n: usize, d: usize, what: &str) -> Result<RawField> {
        if v.is_object() {
            let m = RawSeriesMatrix::parse(v)?;
            if m.n != n || m.center.len() != d {
                return Err(Error::Mismatch(format!("{what} has the wrong size")));
            }
            return Ok(RawField::Local(m));
        }
        let rows = v
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| Error::InvalidInput(format!("{what} must have {n} rows")))?;
        let mut out = Vec::with_capacity(n * n);
        for r in rows {
            let r = r
                .as_array()
                .filter(|r| r.len() == n)
                .ok_or_else(|| Error::InvalidInput(format!("{what} rows must have {n} entries")))?;
            for p in r {
                out.push(RawPoly::parse(p, d)?);
            }
        }
        Ok(RawField::Global(out))
    }

    fn is_exact(&self) -> bool {
        match self {
            RawField::Global(ps) => ps.iter().all(RawPoly::is_exact),
            RawField::Local(m) => m.is_exact(),
        }
    }

    fn to_matrix<T: Scalar>(&self, n: usize, center: &[T], order: u32) -> Result<SeriesMatrix<T>> {
        match self {
            RawField::Global(ps) => {
                let entries =
                    ps.iter().map(|p| Ok(p.to_poly::<T>()?.taylor(center, order))).collect::<Result<Vec<_>>>()?;
                SeriesMatrix::from_entries(n, entries)
            }
            RawField::Local(m) => {
                let out = m.to_matrix::<T>()?;
                if out.center() != center || out.order() != order {
                    return Err(Error::Mismatch("series matrix frame differs from the center and K".into()));
                }
                Ok(out)
            }
        }
    }
}

struct Header {
    d: usize,
    n: usize,
    center: Vec<RawComplex>,
    order: u32,
    delta0: Vec<RawPoly>,
}

impl Header {
    fn parse(v: &Value) -> Result<Header> {
        let get = |k: &str| {
            v.get(k).and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput(format!("connection needs {k}")))
        };
        let d = get("d")? as usize;
        let n = get("n")? as usize;
        let order = get("K")? as u32;
        let center = v
            .get("center")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("connection needs center".into()))?
            .iter()
            .map(RawComplex::parse)
            .collect::<Result<Vec<_>>>()?;
        let delta0 = v
            .get("Delta0")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("connection needs Delta0".into()))?
            .iter()
            .map(|p| RawPoly::parse(p, d))
            .collect::<Result<Vec<_>>>()?;
        if center.len() != d || delta0.len() != n {
            return Err(Error::InvalidInput("center and Delta0 must have lengths d and n".into()));
        }
        Ok(Header { d, n, center, order, delta0 })
    }

    fn is_exact(&self) -> bool {
        self.center.iter().all(RawComplex::is_exact) && self.delta0.iter().all(RawPoly::is_exact)
    }

    fn center<T: Scalar>(&self) -> Result<Vec<T>> {
        self.center.iter().map(|c| c.to_scalar()).collect()
    }

    fn delta0<T: Scalar>(&self, center: &[T]) -> Result<Vec<TruncatedSeries<T>>> {
        self.delta0.iter().map(|p| Ok(p.to_poly::<T>()?.taylor(center, self.order))).collect()
    }
}

/// Connection JSON `{d, n, center, K, Delta0: [poly], Bdiag: [complex], L}`
/// read before the coefficient mode is fixed. `L` is `[[poly]]` in global
/// coordinates or a series-matrix object at the center.
pub struct RawConnection {
    header: Header,
    bdiag: Vec<RawComplex>,
    l: RawField,
}

impl RawConnection {
    pub fn parse(v: &Value) -> Result<RawConnection> {
        let header = Header::parse(v)?;
        let bdiag = v
            .get("Bdiag")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("connection needs Bdiag".into()))?
            .iter()
            .map(RawComplex::parse)
            .collect::<Result<Vec<_>>>()?;
        if bdiag.len() != header.n {
            return Err(Error::InvalidInput(format!("Bdiag must have {} entries", header.n)));
        }
        let l = match v.get("L") {
            Some(l) => RawField::parse(l, header.n, header.d, "L")?,
            None => RawField::Global(vec![RawPoly { d: header.d, terms: Vec::new() }; header.n * header.n]),
        };
        Ok(RawConnection { header, bdiag, l })
    }

    pub fn n(&self) -> usize {
        self.header.n
    }

    pub fn is_exact(&self) -> bool {
        self.header.is_exact() && self.bdiag.iter().all(RawComplex::is_exact) && self.l.is_exact()
    }

    pub fn to_connection<T: Scalar>(&self, tol: f64) -> Result<FramedConnection<T>> {
        let center = self.header.center::<T>()?;
        let delta0 = self.header.delta0(&center)?;
        let bdiag = self.bdiag.iter().map(|c| c.to_scalar()).collect::<Result<Vec<T>>>()?;
        let l = self.l.to_matrix(self.header.n, &center, self.header.order)?;
        Ok(build_connection(delta0, bdiag, l)?.with_tol(tol))
    }
}

/// Frame data `(Δ0, 𝔅, ϖ)` in one coefficient mode.
pub struct Frame<T> {
    pub delta0: Vec<TruncatedSeries<T>>,
    pub b: SeriesMatrix<T>,
    pub varpi: Vec<SeriesMatrix<T>>,
}

/// Frame JSON `{d, n, center, K, Delta0: [poly], B, varpi: [..; d]}` where
/// `B` and each `varpi` component are given like `L` in [`RawConnection`].
pub struct RawFrame {
    header: Header,
    b: RawField,
    varpi: Vec<RawField>,
}

impl RawFrame {
    pub fn parse(v: &Value) -> Result<RawFrame> {
        let header = Header::parse(v)?;
        let b = RawField::parse(
            v.get("B").ok_or_else(|| Error::InvalidInput("frame needs B".into()))?,
            header.n,
            header.d,
            "B",
        )?;
        let varpi = v
            .get("varpi")
            .and_then(Value::as_array)
            .filter(|a| a.len() == header.d)
            .ok_or_else(|| Error::InvalidInput(format!("frame needs varpi with {} components", header.d)))?
            .iter()
            .map(|w| RawField::parse(w, header.n, header.d, "varpi"))
            .collect::<Result<Vec<_>>>()?;
        Ok(RawFrame { header, b, varpi })
    }

    pub fn order(&self) -> u32 {
        self.header.order
    }

    pub fn is_exact(&self) -> bool {
        self.header.is_exact() && self.b.is_exact() && self.varpi.iter().all(RawField::is_exact)
    }

    pub fn to_frame<T: Scalar>(&self) -> Result<Frame<T>> {
        let center = self.header.center::<T>()?;
        let (n, k) = (self.header.n, self.header.order);
        Ok(Frame {
            delta0: self.header.delta0(&center)?,
            b: self.b.to_matrix(n, &center, k)?,
            varpi: self.varpi.iter().map(|w| w.to_matrix(n, &center, k)).collect::<Result<Vec<_>>>()?,
        })
    }
}

/// Gauge series JSON `{K, F: [series matrix]}`.
pub struct RawGaugeSeries {
    f: Vec<RawSeriesMatrix>,
}

impl RawGaugeSeries {
    pub fn parse(v: &Value) -> Result<RawGaugeSeries> {
        let f = v
            .get("F")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("gauge series needs F".into()))?
            .iter()
            .map(RawSeriesMatrix::parse)
            .collect::<Result<Vec<_>>>()?;
        if let Some(k) = v.get("K").and_then(Value::as_u64) {
            if k as usize != f.len() {
                return Err(Error::Mismatch(format!("K = {k} but {} terms given", f.len())));
            }
        }
        Ok(RawGaugeSeries { f })
    }

    pub fn is_exact(&self) -> bool {
        self.f.iter().all(RawSeriesMatrix::is_exact)
    }

    pub fn to_series<T: Scalar>(&self) -> Result<GaugeSeries<T>> {
        Ok(GaugeSeries { f: self.f.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>>>()? })
    }
}

impl<T: Scalar> GaugeSeries<T> {
    pub fn to_json(&self) -> Value {
        json!({"K": self.k(), "F": self.f.iter().map(series_matrix_to_json).collect::<Vec<_>>()})
    }
}

impl<T: Scalar> FramedConnection<T> {
    /// Derived data `{Delta0, B, omega}` at the center as series matrices.
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n(),
            "d": self.d(),
            "Bdiag": self.bdiag().iter().map(scalar_to_json).collect::<Vec<_>>(),
            "Delta0": series_matrix_to_json(&self.delta0_matrix()),
            "L": series_matrix_to_json(self.l()),
            "B": series_matrix_to_json(self.b()),
            "omega": self.omega().iter().map(series_matrix_to_json).collect::<Vec<_>>(),
            "coalescent_pairs": self.coalescent_pairs(),
        })
    }
}

pub fn integrability_to_json(r: &IntegrabilityReport) -> Value {
    json!({
        "order": r.order,
        "commutation": r.commutation,
        "flatness": r.flatness,
        "wedge": r.wedge,
        "curvature": r.curvature,
        "max": r.max(),
        "vanishes": r.vanishes,
    })
}

pub fn witness_to_json<T: Scalar>(w: &DvWitness<T>) -> Value {
    json!({
        "L": w.l.as_ref().map(series_matrix_to_json),
        "obstructions": w.obstructions.iter().map(|o| json!({"i": o.i, "j": o.j, "reason": o.reason})).collect::<Vec<_>>(),
    })
}

pub fn gauge_residual_to_json(r: &GaugeResidual) -> Value {
    json!({
        "K": r.k,
        "dz": r.dz,
        "dx": r.dx,
        "tail_dz": r.tail_dz,
        "tail_dx": r.tail_dx,
        "max_determined": r.max_determined,
        "vanishes": r.vanishes,
    })
}

pub fn holcon_to_json(r: &HolconReport) -> Value {
    let c = |z: &crate::scalar::C64| json!([z.re, z.im]);
    json!({
        "pair": [r.i, r.j],
        "samples": r.samples,
        "lhs": r.lhs.iter().map(c).collect::<Vec<_>>(),
        "gap": r.gap.iter().map(c).collect::<Vec<_>>(),
        "ratios": r.ratios.iter().map(c).collect::<Vec<_>>(),
        "spread": r.spread,
        "bounded": r.bounded,
    })
}
