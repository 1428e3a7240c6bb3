//! Ordinary and double partitions (Segre symbols) and their counts.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Sorts the parts and rejects zeros.
    pub fn new(mut parts: Vec<u32>) -> Result<Partition> {
        if parts.contains(&0) {
            return Err(Error::InvalidInput("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub(crate) fn from_sorted(parts: Vec<u32>) -> Partition {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]) && !parts.contains(&0));
        Partition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Ferrers transpose.
    pub fn conjugate(&self) -> Partition {
        let first = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=first).map(|k| self.parts.iter().filter(|&&p| p >= k).count() as u32).collect();
        Partition { parts }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Canonical member order: weight descending, then parts descending.
fn member_order(a: &Partition, b: &Partition) -> Ordering {
    b.weight().cmp(&a.weight()).then_with(|| b.parts.cmp(&a.parts))
}

/// A multiset of partitions (one per distinct eigenvalue), kept in
/// canonical order so that equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct SegreSymbol {
    partitions: Vec<Partition>,
    n: u32,
}

impl SegreSymbol {
    pub fn new(mut partitions: Vec<Partition>) -> Result<SegreSymbol> {
        if partitions.iter().any(Partition::is_empty) {
            return Err(Error::InvalidInput("member partitions must be non-empty".into()));
        }
        if partitions.is_empty() {
            return Err(Error::InvalidInput("a symbol needs at least one partition".into()));
        }
        partitions.sort_by(member_order);
        let n = partitions.iter().map(Partition::weight).sum();
        Ok(SegreSymbol { partitions, n })
    }

    /// Builds from nested part lists, e.g. `[[2,1],[1]]`.
    pub fn from_lists(lists: &[Vec<u32>]) -> Result<SegreSymbol> {
        let parts = lists.iter().map(|l| Partition::new(l.clone())).collect::<Result<Vec<_>>>()?;
        SegreSymbol::new(parts)
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of member partitions (distinct eigenvalues).
    pub fn rough_length(&self) -> usize {
        self.partitions.len()
    }

    pub fn to_lists(&self) -> Vec<Vec<u32>> {
        self.partitions.iter().map(|p| p.parts.clone()).collect()
    }
}

impl TryFrom<Vec<Vec<u32>>> for SegreSymbol {
    type Error = Error;

    fn try_from(v: Vec<Vec<u32>>) -> Result<Self> {
        SegreSymbol::from_lists(&v)
    }
}

impl From<SegreSymbol> for Vec<Vec<u32>> {
    fn from(s: SegreSymbol) -> Self {
        s.to_lists()
    }
}

impl PartialOrd for SegreSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used for deterministic listings: members compared in turn
/// by the canonical member order, shorter lists first on ties.
impl Ord for SegreSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.partitions.iter().zip(&other.partitions) {
            let c = member_order(a, b);
            if c != Ordering::Equal {
                return c;
            }
        }
        self.partitions.len().cmp(&other.partitions.len())
    }
}

impl fmt::Display for SegreSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.partitions.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// All partitions of `n` in descending lexicographic order.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    partitions_rec(n, n, &mut cur, &mut out);
    out
}

fn partitions_rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if left == 0 {
        out.push(Partition::from_sorted(cur.clone()));
        return;
    }
    for p in (1..=max.min(left)).rev() {
        cur.push(p);
        partitions_rec(left - p, p, cur, out);
        cur.pop();
    }
}

/// All double partitions of `n` in canonical order.
pub fn enumerate_double_partitions(n: u32) -> Result<Vec<SegreSymbol>> {
    if n == 0 {
        return Err(Error::InvalidInput("double partitions need n >= 1".into()));
    }
    // Every partition of weight 1..=n, sorted in the canonical member order.
    let mut pool: Vec<Partition> = (1..=n).flat_map(enumerate_partitions).collect();
    pool.sort_by(member_order);
    let mut out = Vec::new();
    let mut cur = Vec::new();
    multiset_rec(&pool, 0, n, &mut cur, &mut out);
    out.sort();
    Ok(out)
}

fn multiset_rec(pool: &[Partition], start: usize, left: u32, cur: &mut Vec<Partition>, out: &mut Vec<SegreSymbol>) {
    if left == 0 {
        let n = cur.iter().map(Partition::weight).sum();
        out.push(SegreSymbol { partitions: cur.clone(), n });
        return;
    }
    for (i, p) in pool.iter().enumerate().skip(start) {
        if p.weight() <= left {
            cur.push(p.clone());
            multiset_rec(pool, i, left - p.weight(), cur, out);
            cur.pop();
        }
    }
}

/// Coefficients `[z^0..z^n]` of `∏_{m≥1} (1 - z^m)^{-e_m}`.
fn euler_product(exponents: &[BigUint], n: usize) -> Vec<BigUint> {
    let mut c = vec![BigUint::zero(); n + 1];
    c[0] = BigUint::one();
    for m in 1..=n {
        let e = &exponents[m];
        if e.is_zero() {
            continue;
        }
        // (1 - z^m)^{-e} = Σ_k C(e+k-1, k) z^{mk}
        let kmax = n / m;
        let mut binom = vec![BigUint::one(); kmax + 1];
        for k in 1..=kmax {
            binom[k] = &binom[k - 1] * (e + BigUint::from(k - 1)) / BigUint::from(k);
        }
        let mut next = vec![BigUint::zero(); n + 1];
        for (i, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (k, b) in binom.iter().enumerate() {
                let j = i + m * k;
                if j > n {
                    break;
                }
                next[j] += ci * b;
            }
        }
        c = next;
    }
    c
}

/// Coefficients `p(r, 0..=n)` of the generating product with fold `r`.
pub fn fold_partition_counts(r: u32, n: usize) -> Result<Vec<BigUint>> {
    if r == 0 {
        return Err(Error::InvalidInput("fold r must be >= 1".into()));
    }
    // p(0, m) = 1 for m >= 1 gives the classical Euler product at r = 1.
    let mut exps = vec![BigUint::one(); n + 1];
    exps[0] = BigUint::zero();
    let mut counts = Vec::new();
    for _ in 0..r {
        counts = euler_product(&exps, n);
        exps = counts.clone();
        exps[0] = BigUint::zero();
    }
    Ok(counts)
}

/// `p(r, n)`: number of `r`-fold partitions of `n`.
pub fn count_fold_partitions(r: u32, n: u32) -> Result<BigUint> {
    let counts = fold_partition_counts(r, n as usize)?;
    if r == 2 {
        let check = double_partition_counts_by_recursion(n as usize);
        if check[n as usize] != counts[n as usize] {
            return Err(Error::InvalidInput(format!(
                "internal disagreement for p(2,{n}): {} vs {}",
                counts[n as usize], check[n as usize]
            )));
        }
    }
    Ok(counts[n as usize].clone())
}

/// `p(2, 0..=n)` via `p(2,n) = (1/n) Σ_k σ(k) p(2,n-k)` with
/// `σ(k) = Σ_{d|k} d·p(d)`.
pub fn double_partition_counts_by_recursion(n: usize) -> Vec<BigUint> {
    let p = classical_partition_counts(n);
    let sigma: Vec<BigUint> = (0..=n)
        .map(|k| {
            if k == 0 {
                return BigUint::zero();
            }
            (1..=k).filter(|d| k % d == 0).map(|d| BigUint::from(d) * &p[d]).sum()
        })
        .collect();
    let mut q = vec![BigUint::zero(); n + 1];
    q[0] = BigUint::one();
    for m in 1..=n {
        let s: BigUint = (1..=m).map(|k| &sigma[k] * &q[m - k]).sum();
        q[m] = s / BigUint::from(m);
    }
    q
}

/// Classical `p(0..=n)` by Euler's pentagonal recurrence.
pub fn classical_partition_counts(n: usize) -> Vec<BigUint> {
    let mut p: Vec<num_bigint::BigInt> = vec![num_bigint::BigInt::zero(); n + 1];
    p[0] = num_bigint::BigInt::one();
    for m in 1..=n {
        let mut acc = num_bigint::BigInt::zero();
        let mut k: i64 = 1;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += &p[m - g1] * sign;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                acc += &p[m - g2] * sign;
            }
            k += 1;
        }
        p[m] = acc;
    }
    p.into_iter().map(|v| v.to_biguint().expect("partition counts are positive")).collect()
}

/// Elementwise Ferrers transpose.
pub fn conjugate_symbol(s: &SegreSymbol) -> SegreSymbol {
    SegreSymbol::new(s.partitions.iter().map(Partition::conjugate).collect())
        .expect("conjugates of valid members are valid")
}

/// Multiset union of all fine parts as one partition of `n`.
pub fn forgetful(s: &SegreSymbol) -> Partition {
    let mut parts: Vec<u32> = s.partitions.iter().flat_map(|p| p.parts.clone()).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition { parts }
}
