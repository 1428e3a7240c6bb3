use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};

use super::monomial::{monomials_up_to, Monomial};

/// Multivariate power series in local coordinates `y = x - center`,
/// truncated at total degree `order`.
///
/// `reliable` is the largest degree whose coefficients are trustworthy;
/// differentiation lowers it by one while the declared order is kept.
/// A value of `-1` means no coefficient is reliable.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    d: usize,
    center: Vec<T>,
    order: u32,
    reliable: i64,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Ring> TruncatedSeries<T> {
    pub fn zero(center: Vec<T>, order: u32) -> Self {
        TruncatedSeries { d: center.len(), center, order, reliable: order as i64, terms: BTreeMap::new() }
    }

    pub fn constant(value: T, center: Vec<T>, order: u32) -> Self {
        let mut s = Self::zero(center, order);
        let one = Monomial::one(s.d);
        s.insert(one, value);
        s
    }

    /// The local coordinate `y_i = x_i - center_i`.
    pub fn variable(i: usize, center: Vec<T>, order: u32) -> Self {
        let mut s = Self::zero(center, order);
        let m = Monomial::unit(s.d, i);
        s.insert(m, T::one());
        s
    }

    pub fn from_terms(center: Vec<T>, order: u32, terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut s = Self::zero(center, order);
        for (m, c) in terms {
            s.add_to(m, c);
        }
        s
    }

    /// A zero series sharing this one's frame.
    pub fn zero_like(&self) -> Self {
        Self::zero(self.center.clone(), self.order)
    }

    pub fn constant_like(&self, value: T) -> Self {
        Self::constant(value, self.center.clone(), self.order)
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn reliable_degree(&self) -> i64 {
        self.reliable
    }

    pub fn with_reliable(mut self, reliable: i64) -> Self {
        self.reliable = reliable.min(self.order as i64);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeff_ref(&self, m: &Monomial) -> Option<&T> {
        self.terms.get(m)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&Monomial::one(self.d))
    }

    /// Sets a coefficient; degrees above the order are discarded.
    pub fn insert(&mut self, m: Monomial, value: T) {
        if m.degree() > self.order {
            return;
        }
        if value.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, value);
        }
    }

    /// Adds to a coefficient; degrees above the order are discarded.
    pub fn add_to(&mut self, m: Monomial, value: T) {
        if m.degree() > self.order || value.is_zero() {
            return;
        }
        let entry = self.terms.remove(&m);
        let v = match entry {
            Some(old) => old + value,
            None => value,
        };
        if !v.is_zero() {
            self.terms.insert(m, v);
        }
    }

    pub fn same_frame(&self, other: &Self) -> bool {
        self.d == other.d && self.order == other.order && self.center == other.center
    }

    pub fn check_frame(&self, other: &Self) -> Result<()> {
        if self.same_frame(other) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "series frames differ (d {} vs {}, K {} vs {})",
                self.d, other.d, self.order, other.order
            )))
        }
    }

    fn assert_frame(&self, other: &Self) {
        assert!(self.d == other.d && self.order == other.order, "series frame mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_frame(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_to(m.clone(), c.clone());
        }
        out.reliable = self.reliable.min(other.reliable);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_frame(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_to(m.clone(), -c.clone());
        }
        out.reliable = self.reliable.min(other.reliable);
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, k: &T) -> Self {
        let mut out = self.zero_like();
        out.reliable = self.reliable;
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.product(k));
        }
        out
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.zero_like();
        out.add_product(self, other);
        out.reliable = self.reliable.min(other.reliable);
        out
    }

    /// `self += a * b` truncated at the order of `self`; the reliable degree
    /// is left unchanged.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        self.assert_frame(a);
        self.assert_frame(b);
        for (ma, ca) in &a.terms {
            let da = ma.degree();
            if da > self.order {
                break;
            }
            for (mb, cb) in &b.terms {
                if da + mb.degree() > self.order {
                    break;
                }
                let p = ca.product(cb);
                match self.terms.get_mut(&ma.mul(mb)) {
                    Some(v) => *v = std::mem::replace(v, T::zero()) + p,
                    None => {
                        self.terms.insert(ma.mul(mb), p);
                    }
                }
            }
        }
        self.terms.retain(|_, v| !v.is_zero());
    }

    /// Coefficient of `m` in `self * other`, without forming the product.
    pub fn product_coeff(&self, other: &Self, m: &Monomial) -> T {
        let mut acc = T::zero();
        for (ma, ca) in &self.terms {
            if ma.degree() > m.degree() {
                break;
            }
            if let Some(rest) = m.checked_div(ma) {
                if let Some(cb) = other.terms.get(&rest) {
                    acc = acc + ca.product(cb);
                }
            }
        }
        acc
    }

    /// Formal partial derivative in variable `i`; the declared order is kept
    /// and the reliable degree drops by one.
    pub fn diff(&self, i: usize) -> Self {
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut k = m.clone();
            k.0[i] -= 1;
            out.insert(k, c.clone() * int_as::<T>(e as i64));
        }
        out.reliable = self.reliable - 1;
        out
    }

    /// Coefficient of `m` in `∂_i self`.
    pub fn diff_coeff(&self, i: usize, m: &Monomial) -> T {
        let mut k = m.clone();
        k.0[i] += 1;
        match self.terms.get(&k) {
            Some(c) => c.clone() * int_as::<T>(k.0[i] as i64),
            None => T::zero(),
        }
    }

    /// Drops terms above degree `k` (the declared order is unchanged).
    pub fn truncated(&self, k: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|m, _| m.degree() <= k);
        out
    }

    /// Same coefficients with a different declared order.
    pub fn with_order(&self, order: u32) -> Self {
        let mut out = Self::zero(self.center.clone(), order);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.clone());
        }
        out.reliable = self.reliable.min(order as i64);
        out
    }

    /// Evaluates the truncated polynomial at local offset `y`.
    pub fn eval_local(&self, y: &[T]) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t * y[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> TruncatedSeries<U> {
        let mut out = TruncatedSeries::zero(self.center.iter().map(&f).collect(), self.order);
        for (m, c) in &self.terms {
            out.insert(m.clone(), f(c));
        }
        out.reliable = self.reliable;
        out
    }
}

/// Embeds a small integer into a ring by repeated addition of one.
pub fn int_as<T: Ring>(v: i64) -> T {
    let mut acc = T::zero();
    let mut base = T::one();
    let mut k = v.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc + base.clone();
        }
        base = base.clone() + base;
        k >>= 1;
    }
    if v < 0 {
        -acc
    } else {
        acc
    }
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Multiplicative inverse to the declared order.
    pub fn invert(&self, tol: f64) -> Result<Self> {
        let a0 = self.constant_term();
        if a0.is_negligible(tol) {
            return Err(Error::NotInvertible(format!("constant term {:?} vanishes", a0.to_c64())));
        }
        let inv0 = T::one() / a0;
        let mut out = self.zero_like();
        out.insert(Monomial::one(self.d), inv0.clone());
        for m in monomials_up_to(self.d, self.order).into_iter().skip(1) {
            let mut acc = T::zero();
            for (g, ag) in &self.terms {
                if g.degree() == 0 {
                    continue;
                }
                if g.degree() > m.degree() {
                    break;
                }
                if let Some(rest) = m.checked_div(g) {
                    if let Some(b) = out.terms.get(&rest) {
                        acc = acc + ag.product(b);
                    }
                }
            }
            out.insert(m, -(acc * inv0.clone()));
        }
        out.reliable = self.reliable;
        Ok(out)
    }

    /// Largest coefficient magnitude for each degree `0..=k`.
    pub fn magnitudes_by_degree(&self, k: u32) -> Vec<f64> {
        let mut out = vec![0.0; k as usize + 1];
        for (m, c) in &self.terms {
            let deg = m.degree();
            if deg <= k {
                let v = c.magnitude();
                if v > out[deg as usize] {
                    out[deg as usize] = v;
                }
            }
        }
        out
    }

    pub fn to_c64(&self) -> TruncatedSeries<crate::scalar::C64> {
        self.map(|c| c.to_c64())
    }

    /// Re-expands the truncated polynomial around `center + delta`.
    pub fn recentered(&self, delta: &[T]) -> Self {
        let new_center: Vec<T> = self.center.iter().zip(delta).map(|(c, e)| c.clone() + e.clone()).collect();
        let mut out = Self::zero(new_center.clone(), self.order);
        for (m, c) in &self.terms {
            // (delta + y)^m expanded one variable at a time.
            let mut partial = TruncatedSeries::constant(c.clone(), new_center.clone(), self.order);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut lin = TruncatedSeries::variable(i, new_center.clone(), self.order);
                lin.add_to(Monomial::one(self.d), delta[i].clone());
                for _ in 0..e {
                    partial = partial.mul(&lin);
                }
            }
            out = out.add(&partial);
        }
        out.reliable = self.reliable;
        out
    }
}

/// Checked product with frame validation.
pub fn series_mul<T: Ring>(a: &TruncatedSeries<T>, b: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    a.check_frame(b)?;
    Ok(a.mul(b))
}

/// Partial derivative with index validation.
pub fn series_diff<T: Ring>(a: &TruncatedSeries<T>, i: usize) -> Result<TruncatedSeries<T>> {
    if i >= a.vars() {
        return Err(Error::InvalidInput(format!("variable index {i} out of range for d = {}", a.vars())));
    }
    Ok(a.diff(i))
}

/// Multiplicative inverse.
pub fn series_invert<T: Scalar>(a: &TruncatedSeries<T>, tol: f64) -> Result<TruncatedSeries<T>> {
    a.invert(tol)
}
