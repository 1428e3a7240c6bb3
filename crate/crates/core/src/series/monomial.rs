use std::cmp::Ordering;

/// Exponent vector of a monomial. Ordered by total degree, then by
/// descending lexicographic exponents, so `x^2 < x*y < y^2 < x^3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(d: usize) -> Monomial {
        Monomial(vec![0; d])
    }

    pub fn unit(d: usize, i: usize) -> Monomial {
        let mut e = vec![0; d];
        e[i] = 1;
        Monomial(e)
    }

    pub fn vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn with_added(&self, i: usize, delta: i64) -> Option<Monomial> {
        let v = self.0[i] as i64 + delta;
        if v < 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] = v as u32;
        Some(Monomial(e))
    }

    /// `α!` as a product of factorials of the exponents.
    pub fn factorial(&self) -> u128 {
        self.0.iter().map(|&e| (1..=e as u128).product::<u128>()).product()
    }

    /// Indices with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0).collect()
    }

    /// Multiset expansion: index `i` repeated `α_i` times, ascending.
    pub fn expand(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            out.extend(std::iter::repeat(i).take(e as usize));
        }
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials in `d` variables of total degree exactly `m`, ascending.
pub fn monomials_of_degree(d: usize, m: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    fill(&mut out, &mut cur, 0, m);
    out.sort();
    out
}

fn fill(out: &mut Vec<Monomial>, cur: &mut Vec<u32>, i: usize, left: u32) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(Monomial(cur.clone()));
        return;
    }
    for e in 0..=left {
        cur[i] = e;
        fill(out, cur, i + 1, left - e);
    }
    cur[i] = 0;
}

/// All monomials of total degree at most `k`, ascending.
pub fn monomials_up_to(d: usize, k: u32) -> Vec<Monomial> {
    (0..=k).flat_map(|m| monomials_of_degree(d, m)).collect()
}
