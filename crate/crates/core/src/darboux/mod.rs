//! The generalized Darboux–Egoroff system: residuals, the initial-value
//! jet recursion, and an independent degree-by-degree linear-solve oracle.

mod json;
mod oracle;
mod system;

pub use json::{jet_to_json, problem_from_json, residual_to_json, RawProblem};
pub use oracle::{de_oracle_solve, Affine};
pub use system::Equations;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;
use crate::series::{monomials_of_degree, Monomial, Polynomial, SeriesMatrix, TruncatedSeries};

/// Default threshold for deciding coalescence and feasibility in floating
/// mode.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Floating-mode band above the tolerance in which a near coalescence is
/// reported as ill-conditioned.
const WARNING_BAND: f64 = 1e-6;

/// Data `(f_i, b_i, x_o)` of a generalized Darboux–Egoroff system.
#[derive(Debug, Clone, PartialEq)]
pub struct DEProblem<T> {
    pub x0: Vec<T>,
    pub f: Vec<Polynomial<T>>,
    pub b: Vec<T>,
    /// Floating-mode threshold; ignored in exact mode.
    pub tol: f64,
}

impl<T: Scalar> DEProblem<T> {
    /// Validates shapes and the genericity of the gradients at `x0`.
    pub fn new(x0: Vec<T>, f: Vec<Polynomial<T>>, b: Vec<T>) -> Result<DEProblem<T>> {
        DEProblem::with_tol(x0, f, b, DEFAULT_TOL)
    }

    pub fn with_tol(x0: Vec<T>, f: Vec<Polynomial<T>>, b: Vec<T>, tol: f64) -> Result<DEProblem<T>> {
        let d = x0.len();
        if f.is_empty() || d == 0 {
            return Err(Error::InvalidInput("need at least one function and one variable".into()));
        }
        if f.len() != b.len() {
            return Err(Error::InvalidInput(format!("{} functions but {} exponents", f.len(), b.len())));
        }
        if f.iter().any(|p| p.vars() != d) {
            return Err(Error::InvalidInput(format!("every f_i must have {d} variables")));
        }
        let p = DEProblem { x0, f, b, tol };
        for k in 0..p.n() {
            for h in (k + 1)..p.n() {
                p.pivot(k, h)?;
            }
        }
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.x0.len()
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    /// Taylor jets of the `f_i` at `x0`.
    pub fn f_series(&self, order: u32) -> Vec<TruncatedSeries<T>> {
        self.f.iter().map(|p| p.taylor(&self.x0, order)).collect()
    }

    fn value_gap(&self, k: usize, h: usize) -> T {
        self.f[h].eval(&self.x0) - self.f[k].eval(&self.x0)
    }

    fn gradient_gap(&self, k: usize, h: usize, i: usize) -> T {
        self.f[h].diff(i).eval(&self.x0) - self.f[k].diff(i).eval(&self.x0)
    }

    /// Whether `f_h(x0) = f_k(x0)`.
    pub fn coalescent(&self, k: usize, h: usize) -> bool {
        self.value_gap(k, h).is_negligible(self.tol)
    }

    /// Pivot direction for a pair: the smallest index maximizing
    /// `|∂_j f_h(x0) − ∂_j f_k(x0)|`.
    pub fn pivot(&self, k: usize, h: usize) -> Result<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.d() {
            let v = self.gradient_gap(k, h, j);
            if v.is_negligible(self.tol) {
                continue;
            }
            let m = v.magnitude();
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((j, m));
            }
        }
        best.map(|(j, _)| j)
            .ok_or_else(|| Error::GenericityViolated(format!("gradients of f_{} and f_{} agree at x0", k + 1, h + 1)))
    }

    /// Coalescent pairs `k < h` whose exponent difference is a nonzero
    /// integer.
    pub fn pnr_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.n() {
            for h in (k + 1)..self.n() {
                let diff = self.b[h].clone() - self.b[k].clone();
                if self.coalescent(k, h) && diff.as_integer(self.tol).is_some_and(|v| v != 0) {
                    out.push((k, h));
                }
            }
        }
        out
    }

    /// Floating-mode pairs whose values nearly coincide without being
    /// treated as coalescent.
    pub fn near_coalescent(&self) -> Vec<(usize, usize)> {
        if T::EXACT {
            return Vec::new();
        }
        let mut out = Vec::new();
        for k in 0..self.n() {
            for h in (k + 1)..self.n() {
                let m = self.value_gap(k, h).magnitude();
                if m > self.tol && m < WARNING_BAND {
                    out.push((k, h));
                }
            }
        }
        out
    }

    /// Completes the off-diagonal entries of non-coalescent pairs to an
    /// initial value satisfying the base-point relation
    /// `(b_h − b_k − 1) F_kh = Σ_l (f_l − f_k)(x0) F_kl F_lh` at every
    /// coalescent pair.
    pub fn feasible_initial_value(&self, free: &[Vec<T>]) -> Vec<Vec<T>> {
        let n = self.n();
        let mut f0 = vec![vec![T::zero(); n]; n];
        for k in 0..n {
            for h in 0..n {
                if k != h && !self.coalescent(k, h) {
                    f0[k][h] = free[k][h].clone();
                }
            }
        }
        for k in 0..n {
            for h in 0..n {
                if k == h || !self.coalescent(k, h) {
                    continue;
                }
                let mut acc = T::zero();
                for l in (0..n).filter(|&l| l != k && l != h) {
                    acc = acc + self.value_gap(k, l) * f0[k][l].clone() * f0[l][h].clone();
                }
                let kappa = self.b[h].clone() - self.b[k].clone() - T::one();
                f0[k][h] = if kappa.is_negligible(self.tol) { T::zero() } else { acc / kappa };
            }
        }
        f0
    }
}

/// Off-diagonal solution jet centered at `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DEJet<T> {
    pub f: SeriesMatrix<T>,
}

impl<T: Scalar> DEJet<T> {
    pub fn order(&self) -> u32 {
        self.f.order()
    }

    /// Largest coefficient difference with another jet.
    pub fn max_difference(&self, other: &DEJet<T>) -> f64 {
        self.f.sub(&other.f).magnitudes_by_degree(self.order()).into_iter().fold(0.0, f64::max)
    }
}

/// Residual magnitudes of both equation families per degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub order: u32,
    /// Largest `|coefficient|` of the first family, per degree.
    pub de1: Vec<f64>,
    /// Largest `|coefficient|` of the second family, per degree.
    pub de2: Vec<f64>,
    /// Degree-0 value of the second family at coalescent pairs.
    pub base_constraint: f64,
    /// Every reported coefficient vanishes (exactly in exact mode, within
    /// the tolerance in floating mode).
    pub vanishes: bool,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.de1.iter().chain(&self.de2).copied().fold(0.0, f64::max)
    }
}

fn check_jet<T: Scalar>(p: &DEProblem<T>, jet: &DEJet<T>) -> Result<()> {
    if jet.f.size() != p.n() || jet.f.center().len() != p.d() {
        return Err(Error::Mismatch("jet shape differs from the problem".into()));
    }
    Ok(())
}

/// Substitutes a jet into both equation families and reports the
/// coefficient magnitudes up to total degree `order`.
pub fn de_residual<T: Scalar>(p: &DEProblem<T>, jet: &DEJet<T>, order: u32) -> Result<ResidualReport> {
    check_jet(p, jet)?;
    if jet.order() < order + 1 {
        return Err(Error::DegreeShortfall(format!(
            "jet of degree {} cannot certify residuals to degree {order}",
            jet.order()
        )));
    }
    let (n, d) = (p.n(), p.d());
    let eqs = Equations::new(&p.f_series(order + 2), &p.b).with_order(order + 1);
    let fm = jet.f.map_entries(|s| s.with_order(order + 1));
    let mut de1 = vec![0.0; order as usize + 1];
    let mut de2 = vec![0.0; order as usize + 1];
    let mut vanishes = true;
    let mut base = 0.0f64;
    let mut record = |slot: &mut Vec<f64>, s: &TruncatedSeries<T>| {
        for (m, c) in s.terms() {
            let deg = m.degree();
            if deg <= order {
                if !c.is_negligible(p.tol) {
                    vanishes = false;
                }
                slot[deg as usize] = slot[deg as usize].max(c.magnitude());
            }
        }
    };
    for k in 0..n {
        for h in (0..n).filter(|&h| h != k) {
            for i in 0..d {
                for j in (i + 1)..d {
                    record(&mut de1, &eqs.e1(&fm, i, j, k, h));
                }
                let e2 = eqs.e2(&fm, i, k, h);
                if p.coalescent(k, h) {
                    base = base.max(e2.constant_term().magnitude());
                }
                record(&mut de2, &e2);
            }
        }
    }
    Ok(ResidualReport { order, de1, de2, base_constraint: base, vanishes })
}

/// Result of the initial-value recursion.
#[derive(Debug, Clone)]
pub struct DESolution<T> {
    pub jet: DEJet<T>,
    /// The jet satisfies both families to degree `K − 1`.
    pub feasible: bool,
    pub residual: ResidualReport,
    pub warnings: Vec<String>,
}

fn initial_jet<T: Scalar>(p: &DEProblem<T>, f0: &[Vec<T>], order: u32) -> Result<SeriesMatrix<T>> {
    let n = p.n();
    if f0.len() != n || f0.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!("initial value must be {n}×{n}")));
    }
    let mut fm = SeriesMatrix::zero(n, p.x0.clone(), order);
    for (k, row) in f0.iter().enumerate() {
        for (h, v) in row.iter().enumerate() {
            if k != h {
                fm.set(k, h, TruncatedSeries::constant(v.clone(), p.x0.clone(), order));
            }
        }
    }
    Ok(fm)
}

fn factorial<T: Scalar>(m: &Monomial) -> T {
    m.0.iter().fold(T::one(), |acc, &e| (1..=e as i64).fold(acc, |a, v| a * T::from_i64(v)))
}

/// Computes the unique jet of order `K` with initial value `F0`, following
/// the constructive uniqueness argument: non-coalescent pairs from the
/// second family, degenerate directions from the first family against the
/// pivot direction, and the remaining coalescent derivatives from one
/// small linear system per multi-index.
pub fn de_solve_jet<T: Scalar>(p: &DEProblem<T>, f0: &[Vec<T>], order: u32) -> Result<DESolution<T>> {
    let (n, d) = (p.n(), p.d());
    let mut fm = initial_jet(p, f0, order)?;
    let mut warnings = Vec::new();
    for (k, h) in p.pnr_violations() {
        warnings.push(format!("pair ({}, {}) coalesces with an integer exponent difference", k + 1, h + 1));
    }
    for (k, h) in p.near_coalescent() {
        warnings.push(format!("pair ({}, {}) is nearly coalescent; routing is ill-conditioned", k + 1, h + 1));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (0..n).map(move |h| (k, h))).filter(|(k, h)| k != h).collect();
    let pivots: Vec<usize> = pairs.iter().map(|&(k, h)| p.pivot(k, h)).collect::<Result<_>>()?;
    let full = Equations::new(&p.f_series(order + 1), &p.b);
    for m in 1..=order {
        let eqs = full.with_order(m);
        let work = fm.map_entries(|s| s.with_order(m));
        let alphas = monomials_of_degree(d, m);
        let mut updates: Vec<(usize, usize, Monomial, T)> = Vec::new();
        // Non-coalescent pairs: the second family at degree m − 1.
        for &(k, h) in pairs.iter().filter(|&&(k, h)| !p.coalescent(k, h)) {
            let g0 = eqs.g[h][k].constant_term();
            let series: Vec<TruncatedSeries<T>> = (0..d).map(|i| eqs.e2(&work, i, k, h)).collect();
            for alpha in &alphas {
                let i = alpha.support()[0];
                let beta = alpha.with_added(i, -1).expect("i is in the support");
                let known = series[i].coeff(&beta);
                let scale = g0.clone() * T::from_i64(alpha.0[i] as i64);
                updates.push((k, h, alpha.clone(), -(known / scale)));
            }
        }
        // Coalescent pairs, degenerate directions: the first family.
        let mut step3: Vec<(usize, usize, usize, Vec<Monomial>)> = Vec::new();
        for (idx, &(k, h)) in pairs.iter().enumerate() {
            if !p.coalescent(k, h) {
                continue;
            }
            let j0 = pivots[idx];
            let degenerate: Vec<bool> = (0..d).map(|i| eqs.dd[h][k][i].constant_term().is_negligible(p.tol)).collect();
            let d0 = eqs.dd[h][k][j0].constant_term();
            let mut series: Vec<Option<TruncatedSeries<T>>> = vec![None; d];
            let mut rest = Vec::new();
            for alpha in &alphas {
                let Some(i) = alpha.support().into_iter().find(|&i| degenerate[i]) else {
                    rest.push(alpha.clone());
                    continue;
                };
                let s = series[i].get_or_insert_with(|| eqs.e1(&work, i, j0, k, h));
                let beta = alpha.with_added(i, -1).expect("i is in the support");
                let scale = d0.clone() * T::from_i64(alpha.0[i] as i64);
                updates.push((k, h, alpha.clone(), -(s.coeff(&beta) / scale)));
            }
            step3.push((k, h, j0, rest));
        }
        for (k, h, alpha, v) in updates.drain(..) {
            fm.get_mut(k, h).insert(alpha, v);
        }
        // Coalescent pairs, all directions non-degenerate: one linear system
        // per multi-index.
        let work = fm.map_entries(|s| s.with_order(m));
        for (k, h, j0, rest) in step3 {
            if rest.is_empty() {
                continue;
            }
            let d0 = eqs.dd[h][k][j0].constant_term();
            let kappa = eqs.kappa[k][h].clone();
            let mut e1s: Vec<Option<TruncatedSeries<T>>> = vec![None; d];
            let mut e2s: Vec<Option<TruncatedSeries<T>>> = vec![None; d];
            for alpha in &rest {
                let idx = alpha.expand();
                let size = idx.len() + 1;
                let mut w = vec![vec![T::zero(); size]; size];
                let mut rhs = vec![T::zero(); size];
                for (l, &il) in idx.iter().enumerate() {
                    let dl = eqs.dd[h][k][il].constant_term();
                    let beta = alpha.with_added(il, -1).expect("il is in the support");
                    let s = e1s[il].get_or_insert_with(|| eqs.e1(&work, il, j0, k, h));
                    w[l][0] = d0.clone();
                    w[l][l + 1] = -dl;
                    rhs[l] = -(factorial::<T>(&beta) * s.coeff(&beta));
                }
                let last = idx.len() - 1;
                let im = idx[last];
                let gamma = alpha.with_added(im, -1).and_then(|g| g.with_added(j0, 1)).expect("im is in the support");
                w[size - 1][0] = d0.clone();
                for (l, &il) in idx.iter().enumerate().take(last) {
                    w[size - 1][l + 1] = eqs.dd[h][k][il].constant_term();
                }
                w[size - 1][last + 1] = -(kappa.clone() * eqs.dd[h][k][im].constant_term());
                let s = e2s[im].get_or_insert_with(|| eqs.e2(&work, im, k, h));
                rhs[size - 1] = -(factorial::<T>(&gamma) * s.coeff(&gamma));
                let sol = linalg::solve_square(w, rhs, p.tol).ok_or_else(|| {
                    Error::Resonant(format!(
                        "pair ({}, {}) at degree {m}: b_h − b_k = {:?} makes the system singular",
                        k + 1,
                        h + 1,
                        (p.b[h].clone() - p.b[k].clone()).to_c64()
                    ))
                })?;
                updates.push((k, h, alpha.clone(), sol[0].clone() / factorial::<T>(alpha)));
            }
        }
        for (k, h, alpha, v) in updates {
            fm.get_mut(k, h).insert(alpha, v);
        }
    }
    let jet = DEJet { f: fm };
    let residual = if order == 0 { de_residual_base(p, &jet)? } else { de_residual(p, &jet, order - 1)? };
    let feasible = residual.vanishes && residual.base_constraint <= if T::EXACT { 0.0 } else { p.tol };
    Ok(DESolution { jet, feasible, residual, warnings })
}

/// Residual report for a constant jet: only the base-point relation can be
/// checked.
fn de_residual_base<T: Scalar>(p: &DEProblem<T>, jet: &DEJet<T>) -> Result<ResidualReport> {
    let lifted = DEJet { f: jet.f.map_entries(|s| s.with_order(1)) };
    let mut r = de_residual(p, &lifted, 0)?;
    r.vanishes = r.base_constraint <= if T::EXACT { 0.0 } else { p.tol };
    r.de1.clear();
    r.de2.clear();
    Ok(r)
}
