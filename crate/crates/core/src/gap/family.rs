use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{QComplex, Scalar, C64};
use crate::series::{Monomial, Polynomial, RawPoly};

/// Polynomial kept in floating form, plus its exact form when every input
/// coefficient was rational.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyPoly {
    pub float: Polynomial<C64>,
    pub exact: Option<Polynomial<QComplex>>,
}

/// Exact rational image of a double (every finite double is a rational).
pub fn exact_from_c64(z: C64) -> QComplex {
    let f = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    QComplex::new(f(z.re), f(z.im))
}

impl FamilyPoly {
    pub fn exact(p: Polynomial<QComplex>) -> FamilyPoly {
        FamilyPoly { float: p.map(|c| c.to_c64()), exact: Some(p) }
    }

    pub fn float(p: Polynomial<C64>) -> FamilyPoly {
        FamilyPoly { float: p, exact: None }
    }

    pub fn from_raw(raw: &RawPoly) -> Result<FamilyPoly> {
        if raw.is_exact() {
            Ok(FamilyPoly::exact(raw.to_poly()?))
        } else {
            Ok(FamilyPoly::float(raw.to_poly()?))
        }
    }

    pub fn zero(d: usize) -> FamilyPoly {
        FamilyPoly::exact(Polynomial::zero(d))
    }

    pub fn constant(d: usize, c: QComplex) -> FamilyPoly {
        FamilyPoly::exact(Polynomial::constant(d, c))
    }

    pub fn vars(&self) -> usize {
        self.float.vars()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        self.float.eval(x)
    }

    fn combine(
        &self,
        o: &FamilyPoly,
        ef: impl Fn(&Polynomial<QComplex>, &Polynomial<QComplex>) -> Polynomial<QComplex>,
        ff: impl Fn(&Polynomial<C64>, &Polynomial<C64>) -> Polynomial<C64>,
    ) -> FamilyPoly {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => FamilyPoly::exact(ef(a, b)),
            _ => FamilyPoly::float(ff(&self.float, &o.float)),
        }
    }

    pub fn add(&self, o: &FamilyPoly) -> FamilyPoly {
        self.combine(o, |a, b| a.add(b), |a, b| a.add(b))
    }

    pub fn sub(&self, o: &FamilyPoly) -> FamilyPoly {
        self.combine(o, |a, b| a.sub(b), |a, b| a.sub(b))
    }

    pub fn mul(&self, o: &FamilyPoly) -> FamilyPoly {
        self.combine(o, |a, b| a.mul(b), |a, b| a.mul(b))
    }

    /// Substitutes `x_i -> subs[i]`.
    pub fn substitute(&self, subs: &[FamilyPoly]) -> FamilyPoly {
        let exact_subs: Option<Vec<Polynomial<QComplex>>> = subs.iter().map(|s| s.exact.clone()).collect();
        match (&self.exact, exact_subs) {
            (Some(p), Some(s)) => FamilyPoly::exact(p.substitute(&s)),
            _ => {
                let fs: Vec<Polynomial<C64>> = subs.iter().map(|s| s.float.clone()).collect();
                FamilyPoly::float(self.float.substitute(&fs))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.exact {
            Some(p) => p.to_json(),
            None => self.float.to_json(),
        }
    }
}

/// Parametric curve `t ↦ x(t)` with polynomial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub coords: Vec<FamilyPoly>,
}

impl Path {
    /// `t ↦ x0 + t·direction`.
    pub fn ray(x0: &[C64], direction: &[C64]) -> Path {
        let coords = x0
            .iter()
            .zip(direction)
            .map(|(&a, &v)| {
                let p = Polynomial::from_terms(
                    1,
                    [(Monomial(vec![0]), exact_from_c64(a)), (Monomial(vec![1]), exact_from_c64(v))],
                );
                FamilyPoly::exact(p)
            })
            .collect();
        Path { coords }
    }

    pub fn vars(&self) -> usize {
        self.coords.len()
    }

    pub fn eval(&self, t: C64) -> Vec<C64> {
        self.coords.iter().map(|p| p.eval(&[t])).collect()
    }

    /// `{"coords": [poly in one variable]}`.
    pub fn from_json(v: &Value) -> Result<Path> {
        let arr =
            v.get("coords").and_then(Value::as_array).ok_or_else(|| Error::InvalidInput("path needs coords".into()))?;
        let coords = arr.iter().map(|p| FamilyPoly::from_raw(&RawPoly::parse(p, 1)?)).collect::<Result<Vec<_>>>()?;
        Ok(Path { coords })
    }

    pub fn to_json(&self) -> Value {
        json!({"coords": self.coords.iter().map(FamilyPoly::to_json).collect::<Vec<_>>()})
    }
}

/// Eigenvalue branch `λ_i(x)` with its multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub value: FamilyPoly,
    pub multiplicity: usize,
}

/// Polynomial matrix family `A(x)` with optional eigenvalue branches.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFamily {
    d: usize,
    n: usize,
    entries: Vec<FamilyPoly>,
    branches: Vec<Branch>,
}

/// Number of random points used to validate the branches.
const BRANCH_CHECKS: usize = 20;

impl MatrixFamily {
    /// Builds a family; when branches are given they are validated against
    /// the characteristic polynomial at random points.
    pub fn new(d: usize, n: usize, entries: Vec<FamilyPoly>, branches: Vec<Branch>) -> Result<MatrixFamily> {
        let fam = MatrixFamily::unchecked(d, n, entries, branches)?;
        if !fam.branches.is_empty() {
            fam.validate_branches()?;
        }
        Ok(fam)
    }

    fn unchecked(d: usize, n: usize, entries: Vec<FamilyPoly>, branches: Vec<Branch>) -> Result<MatrixFamily> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        if entries.iter().chain(branches.iter().map(|b| &b.value)).any(|p| p.vars() != d) {
            return Err(Error::InvalidInput(format!("every polynomial must have {d} variables")));
        }
        if !branches.is_empty() {
            let total: usize = branches.iter().map(|b| b.multiplicity).sum();
            if total != n || branches.iter().any(|b| b.multiplicity == 0) {
                return Err(Error::InvalidInput(format!(
                    "branch multiplicities must be positive and sum to {n}, got {total}"
                )));
            }
        }
        Ok(MatrixFamily { d, n, entries, branches })
    }

    /// Family from exact polynomial entries (row-major) and branches.
    pub fn from_exact(
        d: usize,
        n: usize,
        entries: Vec<Polynomial<QComplex>>,
        branches: Vec<(Polynomial<QComplex>, usize)>,
    ) -> Result<MatrixFamily> {
        MatrixFamily::new(
            d,
            n,
            entries.into_iter().map(FamilyPoly::exact).collect(),
            branches.into_iter().map(|(p, m)| Branch { value: FamilyPoly::exact(p), multiplicity: m }).collect(),
        )
    }

    fn validate_branches(&self) -> Result<()> {
        let mut rng = StdRng::seed_from_u64(0x5e6e_2b1d);
        let rand_c = |rng: &mut StdRng| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        for _ in 0..BRANCH_CHECKS {
            let x: Vec<C64> = (0..self.d).map(|_| rand_c(&mut rng)).collect();
            let s = rand_c(&mut rng) * 2.0;
            let a = self.eval(&x);
            let charpoly = (DMatrix::<C64>::identity(self.n, self.n) * s - &a).determinant();
            let mut prod = C64::new(1.0, 0.0);
            for b in &self.branches {
                prod *= (s - b.value.eval(&x)).powi(b.multiplicity as i32);
            }
            let scale = 1.0f64.max(a.norm() + s.norm()).powi(self.n as i32);
            if (charpoly - prod).norm() > 1e-9 * scale {
                return Err(Error::InvalidInput(format!(
                    "branches do not match the characteristic polynomial at x = {x:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &FamilyPoly {
        &self.entries[i * self.n + j]
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(FamilyPoly::is_exact)
    }

    pub fn eval(&self, x: &[C64]) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j).eval(x))
    }

    pub fn branch_values(&self, x: &[C64]) -> Vec<C64> {
        self.branches.iter().map(|b| b.value.eval(x)).collect()
    }

    /// Pulls the family back along a path, giving a one-variable family.
    pub fn restrict(&self, path: &Path) -> Result<MatrixFamily> {
        if path.vars() != self.d {
            return Err(Error::Mismatch(format!(
                "path has {} coordinates, family has {} variables",
                path.vars(),
                self.d
            )));
        }
        let entries = self.entries.iter().map(|p| p.substitute(&path.coords)).collect();
        let branches = self
            .branches
            .iter()
            .map(|b| Branch { value: b.value.substitute(&path.coords), multiplicity: b.multiplicity })
            .collect();
        MatrixFamily::unchecked(1, self.n, entries, branches)
    }

    /// The family `(A − λ_i·Id)^power` without branch data.
    pub fn shifted_power(&self, branch: usize, power: u32) -> Result<MatrixFamily> {
        let b = self.branches.get(branch).ok_or_else(|| Error::InvalidInput(format!("no branch {branch}")))?;
        let n = self.n;
        let mut shifted = self.entries.clone();
        for i in 0..n {
            shifted[i * n + i] = shifted[i * n + i].sub(&b.value);
        }
        let mut acc: Vec<FamilyPoly> = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    FamilyPoly::constant(self.d, QComplex::from_i64(1))
                } else {
                    FamilyPoly::zero(self.d)
                }
            })
            .collect();
        for _ in 0..power {
            let mut next = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = FamilyPoly::zero(self.d);
                    for k in 0..n {
                        s = s.add(&acc[i * n + k].mul(&shifted[k * n + j]));
                    }
                    next.push(s);
                }
            }
            acc = next;
        }
        MatrixFamily::unchecked(self.d, n, acc, Vec::new())
    }

    /// `{d, n, entries: [[poly]], branches: [{poly, multiplicity}]}`.
    pub fn from_json(v: &Value) -> Result<MatrixFamily> {
        let get =
            |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput(format!("family needs {k}")));
        let d = get("d")? as usize;
        let n = get("n")? as usize;
        let rows = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("family needs entries".into()))?;
        if rows.len() != n {
            return Err(Error::InvalidInput(format!("entries must have {n} rows")));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let row = row
                .as_array()
                .filter(|r| r.len() == n)
                .ok_or_else(|| Error::InvalidInput(format!("each row must have {n} polynomials")))?;
            for p in row {
                entries.push(FamilyPoly::from_raw(&RawPoly::parse(p, d)?)?);
            }
        }
        let mut branches = Vec::new();
        if let Some(bs) = v.get("branches").and_then(Value::as_array) {
            for b in bs {
                let poly = b.get("poly").ok_or_else(|| Error::InvalidInput("branch needs poly".into()))?;
                let multiplicity = b
                    .get("multiplicity")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::InvalidInput("branch needs multiplicity".into()))?
                    as usize;
                branches.push(Branch { value: FamilyPoly::from_raw(&RawPoly::parse(poly, d)?)?, multiplicity });
            }
        }
        MatrixFamily::new(d, n, entries, branches)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> =
            (0..self.n).map(|i| Value::Array((0..self.n).map(|j| self.entry(i, j).to_json()).collect())).collect();
        let branches: Vec<Value> =
            self.branches.iter().map(|b| json!({"poly": b.value.to_json(), "multiplicity": b.multiplicity})).collect();
        json!({"d": self.d, "n": self.n, "entries": rows, "branches": branches})
    }
}
