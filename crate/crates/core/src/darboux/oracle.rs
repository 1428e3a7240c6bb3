use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Ring, Scalar};
use crate::series::{monomials_of_degree, Monomial, SeriesMatrix, TruncatedSeries};

use super::{initial_jet, DEJet, DEProblem, Equations};

/// Affine function `c + Σ a_v·u_v` of finitely many unknowns.
///
/// Products are defined only when one factor is constant; the oracle never
/// multiplies two unknowns because unknowns sit in the top degree of the
/// truncated series.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine<T> {
    pub constant: T,
    pub linear: BTreeMap<usize, T>,
}

impl<T: Scalar> Affine<T> {
    pub fn constant(c: T) -> Affine<T> {
        Affine { constant: c, linear: BTreeMap::new() }
    }

    pub fn unknown(v: usize) -> Affine<T> {
        Affine { constant: T::zero(), linear: BTreeMap::from([(v, T::one())]) }
    }

    fn is_constant(&self) -> bool {
        self.linear.is_empty()
    }

    fn scaled(&self, k: &T) -> Affine<T> {
        let mut linear = BTreeMap::new();
        for (v, a) in &self.linear {
            let p = a.product(k);
            if !p.is_zero() {
                linear.insert(*v, p);
            }
        }
        Affine { constant: self.constant.product(k), linear }
    }
}

impl<T: Scalar> Add for Affine<T> {
    type Output = Affine<T>;
    fn add(mut self, o: Affine<T>) -> Affine<T> {
        self.constant = self.constant + o.constant;
        for (v, a) in o.linear {
            let sum = match self.linear.remove(&v) {
                Some(b) => b + a,
                None => a,
            };
            if !sum.is_zero() {
                self.linear.insert(v, sum);
            }
        }
        self
    }
}

impl<T: Scalar> Neg for Affine<T> {
    type Output = Affine<T>;
    fn neg(self) -> Affine<T> {
        Affine { constant: -self.constant, linear: self.linear.into_iter().map(|(v, a)| (v, -a)).collect() }
    }
}

impl<T: Scalar> Sub for Affine<T> {
    type Output = Affine<T>;
    fn sub(self, o: Affine<T>) -> Affine<T> {
        self + (-o)
    }
}

impl<T: Scalar> Mul for Affine<T> {
    type Output = Affine<T>;
    fn mul(self, o: Affine<T>) -> Affine<T> {
        if o.is_constant() {
            self.scaled(&o.constant)
        } else if self.is_constant() {
            o.scaled(&self.constant)
        } else {
            panic!("product of two non-constant affine functions")
        }
    }
}

impl<T: Scalar> Ring for Affine<T> {}

impl<T: Scalar> Zero for Affine<T> {
    fn zero() -> Affine<T> {
        Affine::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.linear.is_empty()
    }
}

impl<T: Scalar> One for Affine<T> {
    fn one() -> Affine<T> {
        Affine::constant(T::one())
    }
}

/// Independent solver: for each degree `m`, collects the coefficient
/// equations of both families that involve degree-`m` jet coefficients
/// and solves them as one linear system. These are the first family and
/// the second family at non-coalescent pairs in degree `m − 1`, plus the
/// second family at coalescent pairs in degree `m`.
///
/// A rank-deficient system signals a bug (or a hypothesis violation) and is
/// reported with its degree. An inconsistent system, which happens for
/// infeasible initial values, is solved in the least-squares sense.
pub fn de_oracle_solve<T: Scalar>(p: &DEProblem<T>, f0: &[Vec<T>], order: u32) -> Result<DEJet<T>> {
    let (n, d) = (p.n(), p.d());
    let mut fm = initial_jet(p, f0, order)?;
    let full = Equations::new(&p.f_series(order + 1), &p.b);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (0..n).map(move |h| (k, h))).filter(|(k, h)| k != h).collect();
    for m in 1..=order {
        let eqs = full.with_order(m).map(|c| Affine::constant(c.clone()));
        let alphas = monomials_of_degree(d, m);
        let mut index: Vec<(usize, usize, Monomial)> = Vec::new();
        let mut work: SeriesMatrix<Affine<T>> =
            fm.map_entries(|s| s.with_order(m).map(|c| Affine::constant(c.clone())));
        for &(k, h) in &pairs {
            for alpha in &alphas {
                work.get_mut(k, h).insert(alpha.clone(), Affine::unknown(index.len()));
                index.push((k, h, alpha.clone()));
            }
        }
        let lower = monomials_of_degree(d, m - 1);
        let mut rows: Vec<Vec<T>> = Vec::new();
        let mut rhs: Vec<T> = Vec::new();
        let mut push = |s: &TruncatedSeries<Affine<T>>, degree: &[Monomial]| {
            for beta in degree {
                let a = s.coeff(beta);
                if a.is_zero() {
                    continue;
                }
                let mut row = vec![T::zero(); index.len()];
                for (v, c) in &a.linear {
                    row[*v] = c.clone();
                }
                rows.push(row);
                rhs.push(-a.constant);
            }
        };
        for &(k, h) in &pairs {
            for i in 0..d {
                for j in (i + 1)..d {
                    push(&eqs.e1(&work, i, j, k, h), &lower);
                }
                if p.coalescent(k, h) {
                    push(&eqs.e2(&work, i, k, h), &alphas);
                } else {
                    push(&eqs.e2(&work, i, k, h), &lower);
                }
            }
        }
        let cols = index.len();
        let ech = linalg::reduce_scalar(rows.clone(), rhs.clone(), cols, p.tol);
        if ech.rank() < cols {
            return Err(Error::SingularSystem {
                degree: m,
                detail: format!("rank {} for {cols} unknowns", ech.rank()),
            });
        }
        let sol = if ech.consistent(|x| x.is_negligible(p.tol)) {
            ech.particular()
        } else {
            linalg::least_squares(&rows, &rhs, cols, p.tol)
                .ok_or(Error::SingularSystem { degree: m, detail: "normal equations are singular".into() })?
        };
        for ((k, h, alpha), v) in index.into_iter().zip(sol) {
            fm.get_mut(k, h).insert(alpha, v);
        }
    }
    Ok(DEJet { f: fm })
}
