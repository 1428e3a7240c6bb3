use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{QComplex, Scalar};
use crate::series::Polynomial;

use super::family::MatrixFamily;
use super::subspace::Subspace;

/// Univariate polynomial with exact coefficients, lowest degree first and
/// no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
struct UPoly(Vec<QComplex>);

impl UPoly {
    fn zero() -> UPoly {
        UPoly(Vec::new())
    }

    fn one() -> UPoly {
        UPoly(vec![QComplex::one()])
    }

    fn from_poly(p: &Polynomial<QComplex>) -> UPoly {
        let mut c = vec![QComplex::zero(); p.degree() as usize + 1];
        for (m, v) in p.terms() {
            c[m.0[0] as usize] = v.clone();
        }
        UPoly(c).trimmed()
    }

    fn trimmed(mut self) -> UPoly {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> QComplex {
        self.0.last().cloned().unwrap_or_else(QComplex::zero)
    }

    fn add(&self, o: &UPoly) -> UPoly {
        let len = self.0.len().max(o.0.len());
        let c = (0..len)
            .map(|i| {
                self.0.get(i).cloned().unwrap_or_else(QComplex::zero)
                    + o.0.get(i).cloned().unwrap_or_else(QComplex::zero)
            })
            .collect();
        UPoly(c).trimmed()
    }

    fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c.clone()).collect())
    }

    fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    fn scale(&self, k: &QComplex) -> UPoly {
        UPoly(self.0.iter().map(|c| c.clone() * k.clone()).collect()).trimmed()
    }

    fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![QComplex::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        UPoly(c).trimmed()
    }

    fn eval(&self, x: &QComplex) -> QComplex {
        self.0.iter().rev().fold(QComplex::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Quotient and remainder of Euclidean division.
    fn div_rem(&self, o: &UPoly) -> (UPoly, UPoly) {
        assert!(!o.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = vec![QComplex::zero(); self.0.len().saturating_sub(o.degree()).max(1)];
        let inv = QComplex::one() / o.lead();
        while !rem.is_zero() && rem.degree() >= o.degree() {
            let shift = rem.degree() - o.degree();
            let f = rem.lead() * inv.clone();
            quot[shift] = f.clone();
            let mut sub = vec![QComplex::zero(); shift];
            sub.extend(o.0.iter().map(|c| c.clone() * f.clone()));
            rem = rem.sub(&UPoly(sub).trimmed());
        }
        (UPoly(quot).trimmed(), rem)
    }

    fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(QComplex::one() / self.lead()))
    }

    fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

fn gcd_all<'a>(items: impl Iterator<Item = &'a UPoly>) -> UPoly {
    items.fold(UPoly::zero(), |g, p| if g.is_zero() { p.monic() } else { g.gcd(p) })
}

/// Divides a vector of polynomials by the gcd of its entries.
fn primitive(v: Vec<UPoly>) -> Vec<UPoly> {
    let g = gcd_all(v.iter());
    if g.is_zero() || g.degree() == 0 {
        return v;
    }
    v.iter().map(|p| p.div_rem(&g).0).collect()
}

/// Polynomial basis of the kernel of `T` over the rational-function field,
/// by fraction-free Gauss–Jordan elimination.
fn polynomial_kernel(rows: Vec<Vec<UPoly>>, n: usize) -> Vec<Vec<UPoly>> {
    let mut rows: Vec<Vec<UPoly>> = rows.into_iter().filter(|r| r.iter().any(|p| !p.is_zero())).collect();
    let m = rows.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| rows[i][c].degree()) else {
            continue;
        };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        for i in 0..m {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            let updated: Vec<UPoly> = (0..n).map(|k| rows[i][k].mul(&piv).sub(&rows[r][k].mul(&f))).collect();
            rows[i] = primitive(updated);
        }
        pivots.push((r, c));
        r += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let product = pivots.iter().fold(UPoly::one(), |acc, &(r, c)| acc.mul(&rows[r][c]));
    (0..n)
        .filter(|c| !pivot_cols.contains(c))
        .map(|f| {
            let mut v = vec![UPoly::zero(); n];
            v[f] = product.clone();
            for &(r, c) in &pivots {
                let cofactor = product.div_rem(&rows[r][c]).0;
                v[c] = rows[r][f].mul(&cofactor).neg();
            }
            primitive(v)
        })
        .collect()
}

/// Upper bound on saturation steps; each step strictly enlarges a module of
/// finite index, so this only guards against bugs.
const MAX_SATURATION_STEPS: usize = 10_000;

/// Values at `x0` of the holomorphic kernel sections of a one-variable
/// polynomial matrix family.
///
/// The kernel over the rational-function field is computed exactly, then
/// saturated at `x0`: while the values at `x0` are dependent, a vanishing
/// combination is divided by `(x − x0)` and replaces one generator.
pub fn kernel_sheaf_value_1d(t: &MatrixFamily, x0: &QComplex) -> Result<Subspace> {
    if t.vars() != 1 {
        return Err(Error::InvalidInput(format!("family must have one variable, has {}", t.vars())));
    }
    let n = t.size();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let p = t
                .entry(i, j)
                .exact
                .as_ref()
                .ok_or_else(|| Error::InexactInput("kernel sheaf values need rational coefficients".into()))?;
            row.push(UPoly::from_poly(p));
        }
        rows.push(row);
    }
    let mut gens = polynomial_kernel(rows, n);
    let linear = UPoly(vec![-x0.clone(), QComplex::one()]);
    for _ in 0..MAX_SATURATION_STEPS {
        let k = gens.len();
        let values: Vec<Vec<QComplex>> = (0..n).map(|i| (0..k).map(|j| gens[j][i].eval(x0)).collect()).collect();
        let ech = linalg::reduce_scalar(values.clone(), vec![QComplex::zero(); n], k, 0.0);
        let null = ech.nullspace();
        let Some(c) = null.first() else {
            let m = DMatrix::from_fn(n, k, |i, j| values[i][j].to_c64());
            return Ok(Subspace::span(&m));
        };
        let j = (0..k).rev().find(|&j| !c[j].is_zero()).expect("null vector is nonzero");
        let combo: Vec<UPoly> =
            (0..n).map(|i| (0..k).fold(UPoly::zero(), |acc, l| acc.add(&gens[l][i].scale(&c[l])))).collect();
        let divided: Vec<UPoly> = combo
            .iter()
            .map(|p| {
                let (q, r) = p.div_rem(&linear);
                debug_assert!(r.is_zero(), "combination must vanish at x0");
                q
            })
            .collect();
        gens[j] = primitive(divided);
    }
    Err(Error::InvalidInput("kernel saturation did not terminate".into()))
}
