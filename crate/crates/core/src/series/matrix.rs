use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};

use super::truncated::TruncatedSeries;

/// Square matrix of truncated series sharing one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix<T> {
    n: usize,
    entries: Vec<TruncatedSeries<T>>,
}

impl<T: Ring> SeriesMatrix<T> {
    pub fn zero(n: usize, center: Vec<T>, order: u32) -> Self {
        SeriesMatrix { n, entries: vec![TruncatedSeries::zero(center, order); n * n] }
    }

    pub fn identity(n: usize, center: Vec<T>, order: u32) -> Self {
        let mut m = Self::zero(n, center.clone(), order);
        for i in 0..n {
            m.set(i, i, TruncatedSeries::constant(T::one(), center.clone(), order));
        }
        m
    }

    /// Builds from row-major entries, checking the common frame.
    pub fn from_entries(n: usize, entries: Vec<TruncatedSeries<T>>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Mismatch(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        for e in &entries[1..] {
            entries[0].check_frame(e)?;
        }
        Ok(SeriesMatrix { n, entries })
    }

    pub fn diagonal(entries: Vec<TruncatedSeries<T>>) -> Self {
        let n = entries.len();
        let proto = entries[0].zero_like();
        let mut m = SeriesMatrix { n, entries: vec![proto; n * n] };
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    /// Constant matrix embedded in the frame of `proto`.
    pub fn constant(values: &[Vec<T>], proto: &TruncatedSeries<T>) -> Self {
        let n = values.len();
        let mut m = SeriesMatrix { n, entries: vec![proto.zero_like(); n * n] };
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, proto.constant_like(values[i][j].clone()));
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries<T> {
        &self.entries[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut TruncatedSeries<T> {
        &mut self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TruncatedSeries<T>) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[TruncatedSeries<T>] {
        &self.entries
    }

    pub fn proto(&self) -> TruncatedSeries<T> {
        self.entries[0].zero_like()
    }

    pub fn order(&self) -> u32 {
        self.entries[0].order()
    }

    pub fn center(&self) -> &[T] {
        self.entries[0].center()
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        self.map_entries(|a| a.neg())
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map_entries(|a| a.scale(k))
    }

    pub fn diff(&self, i: usize) -> Self {
        self.map_entries(|a| a.diff(i))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n, self.center().to_vec(), self.order());
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.proto();
                let mut rel = i64::MAX;
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    rel = rel.min(a.reliable_degree()).min(b.reliable_degree());
                    if a.is_empty() || b.is_empty() {
                        continue;
                    }
                    acc.add_product(a, b);
                }
                out.set(i, j, acc.with_reliable(rel));
            }
        }
        out
    }

    /// `[self, o] = self*o - o*self`.
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// Diagonal part.
    pub fn diag_part(&self) -> Self {
        let mut out = self.map_entries(|a| a.zero_like().with_reliable(a.reliable_degree()));
        for i in 0..self.n {
            out.set(i, i, self.get(i, i).clone());
        }
        out
    }

    /// Off-diagonal part.
    pub fn offdiag_part(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let z = self.get(i, i).zero_like().with_reliable(self.get(i, i).reliable_degree());
            out.set(i, i, z);
        }
        out
    }

    pub fn reliable_degree(&self) -> i64 {
        self.entries.iter().map(|e| e.reliable_degree()).min().unwrap_or(-1)
    }

    pub fn map_entries<U: Ring>(&self, f: impl Fn(&TruncatedSeries<T>) -> TruncatedSeries<U>) -> SeriesMatrix<U> {
        SeriesMatrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    fn zip(&self, o: &Self, f: impl Fn(&TruncatedSeries<T>, &TruncatedSeries<T>) -> TruncatedSeries<T>) -> Self {
        assert_eq!(self.n, o.n, "matrix size mismatch");
        SeriesMatrix { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect() }
    }
}

impl<T: Scalar> SeriesMatrix<T> {
    /// Largest coefficient magnitude per degree `0..=k` over all entries.
    pub fn magnitudes_by_degree(&self, k: u32) -> Vec<f64> {
        let mut out = vec![0.0; k as usize + 1];
        for e in &self.entries {
            for (d, v) in e.magnitudes_by_degree(k).into_iter().enumerate() {
                if v > out[d] {
                    out[d] = v;
                }
            }
        }
        out
    }

    /// Constant-term matrix.
    pub fn constant_values(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).constant_term()).collect()).collect()
    }
}
