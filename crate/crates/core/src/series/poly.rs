use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{RawComplex, Ring, Scalar};

use super::monomial::Monomial;
use super::truncated::{int_as, TruncatedSeries};

/// Sparse multivariate polynomial in global coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    d: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Ring> Polynomial<T> {
    pub fn zero(d: usize) -> Self {
        Polynomial { d, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: T) -> Self {
        let mut p = Self::zero(d);
        p.add_term(Monomial::one(d), c);
        p
    }

    pub fn variable(d: usize, i: usize) -> Self {
        let mut p = Self::zero(d);
        p.add_term(Monomial::unit(d, i), T::one());
        p
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Self::zero(d);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    /// Highest monomial in the graded order with its coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &T)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        assert_eq!(m.vars(), self.d, "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(m, v);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Polynomial { d: self.d, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::from_terms(self.d, self.terms.iter().map(|(m, c)| (m.clone(), c.product(k))))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.d);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(mb), ca.product(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.d, T::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn diff(&self, i: usize) -> Self {
        let mut out = Self::zero(self.d);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut k = m.clone();
                k.0[i] -= 1;
                out.add_term(k, c.clone() * int_as::<T>(e as i64));
            }
        }
        out
    }

    pub fn eval(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t * x[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitutes `x_i -> subs[i]`, all substitutes sharing one arity.
    pub fn substitute(&self, subs: &[Polynomial<T>]) -> Polynomial<T> {
        assert_eq!(subs.len(), self.d, "substitution arity mismatch");
        let d2 = subs.first().map_or(0, |p| p.d);
        let mut out = Polynomial::zero(d2);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(d2, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&subs[i]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Taylor expansion at `center`, truncated at `order`.
    pub fn taylor(&self, center: &[T], order: u32) -> TruncatedSeries<T> {
        let subs: Vec<Polynomial<T>> = (0..self.d)
            .map(|i| Polynomial::variable(self.d, i).add(&Polynomial::constant(self.d, center[i].clone())))
            .collect();
        let shifted = self.substitute(&subs);
        TruncatedSeries::from_terms(center.to_vec(), order, shifted.terms)
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::from_terms(self.d, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    let (re, im) = c.json_parts();
                    json!({"exps": m.0, "re": re, "im": im})
                })
                .collect(),
        )
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}

/// Polynomial parsed from JSON before the coefficient mode is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct RawPoly {
    pub d: usize,
    pub terms: Vec<(Monomial, RawComplex)>,
}

impl RawPoly {
    /// Parses `[{exps: [..], re, im}]` with arity `d`.
    pub fn parse(v: &Value, d: usize) -> Result<RawPoly> {
        let arr = v.as_array().ok_or_else(|| Error::InvalidInput("polynomial must be a list of terms".into()))?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let exps = t
                .get("exps")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidInput("term without exps".into()))?;
            if exps.len() != d {
                return Err(Error::InvalidInput(format!("term has {} exponents, expected {d}", exps.len())));
            }
            let mut e = Vec::with_capacity(d);
            for x in exps {
                let v =
                    x.as_u64().ok_or_else(|| Error::InvalidInput("exponents must be non-negative integers".into()))?;
                e.push(v as u32);
            }
            terms.push((Monomial(e), RawComplex::parse(t)?));
        }
        Ok(RawPoly { d, terms })
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_exact())
    }

    pub fn to_poly<T: Scalar>(&self) -> Result<Polynomial<T>> {
        let mut p = Polynomial::zero(self.d);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.to_scalar()?);
        }
        Ok(p)
    }
}
