//! Connection frames built from `(Δ0, 𝔅'_o, L)`, their integrability
//! residuals, dv-type witness extraction, and formal gauge simplification.

mod holcon;
mod json;
mod simplify;

pub use holcon::{holcon_check, HolconReport};
pub use json::{
    gauge_residual_to_json, holcon_to_json, integrability_to_json, witness_to_json, Frame, RawConnection, RawFrame,
    RawGaugeSeries,
};
pub use simplify::{formal_simplify, gauge_residual, GaugeResidual, GaugeSeries, SimplifyMode};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{Monomial, Polynomial, SeriesMatrix, TruncatedSeries};

/// Default threshold for coalescence and vanishing tests in floating mode.
pub const DEFAULT_TOL: f64 = 1e-10;

/// The frame `Ω̂ = −(Δ0 + 𝔅/z)dz − z dΔ0 + ω` with `𝔅 = 𝔅'_o + [L, Δ0]`
/// and `ω = [dΔ0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedConnection<T> {
    delta0: Vec<TruncatedSeries<T>>,
    bdiag: Vec<T>,
    l: SeriesMatrix<T>,
    b: SeriesMatrix<T>,
    omega: Vec<SeriesMatrix<T>>,
    tol: f64,
}

/// Builds the frame from the diagonal entries of `Δ0`, the constant
/// diagonal `𝔅'_o` and the off-diagonal matrix `L`.
pub fn build_connection<T: Scalar>(
    delta0: Vec<TruncatedSeries<T>>,
    bdiag: Vec<T>,
    l: SeriesMatrix<T>,
) -> Result<FramedConnection<T>> {
    let n = delta0.len();
    if n == 0 {
        return Err(Error::InvalidInput("Δ0 must have at least one entry".into()));
    }
    if bdiag.len() != n || l.size() != n {
        return Err(Error::Mismatch(format!(
            "Δ0 has {n} entries, Bdiag {}, L is {}x{}",
            bdiag.len(),
            l.size(),
            l.size()
        )));
    }
    let proto = l.proto();
    for f in &delta0 {
        proto.check_frame(f)?;
    }
    for i in 0..n {
        if !l.get(i, i).is_empty() {
            return Err(Error::InvalidInput(format!("L has a nonzero diagonal entry at ({i},{i})")));
        }
    }
    let d = proto.vars();
    let mut b = SeriesMatrix::zero(n, proto.center().to_vec(), proto.order());
    let mut omega = vec![b.clone(); d];
    for i in 0..n {
        b.set(i, i, proto.constant_like(bdiag[i].clone()));
        for j in 0..n {
            if i == j {
                continue;
            }
            let lij = l.get(i, j);
            b.set(i, j, lij.mul(&delta0[j].sub(&delta0[i])));
            for (a, w) in omega.iter_mut().enumerate() {
                w.set(i, j, lij.mul(&delta0[i].diff(a).sub(&delta0[j].diff(a))));
            }
        }
    }
    Ok(FramedConnection { delta0, bdiag, l, b, omega, tol: DEFAULT_TOL })
}

impl<T: Scalar> FramedConnection<T> {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn n(&self) -> usize {
        self.delta0.len()
    }

    pub fn d(&self) -> usize {
        self.l.proto().vars()
    }

    pub fn order(&self) -> u32 {
        self.l.order()
    }

    pub fn center(&self) -> &[T] {
        self.l.center()
    }

    /// Diagonal entries `f_i` of `Δ0`.
    pub fn delta0(&self) -> &[TruncatedSeries<T>] {
        &self.delta0
    }

    pub fn delta0_matrix(&self) -> SeriesMatrix<T> {
        SeriesMatrix::diagonal(self.delta0.clone())
    }

    pub fn bdiag(&self) -> &[T] {
        &self.bdiag
    }

    pub fn l(&self) -> &SeriesMatrix<T> {
        &self.l
    }

    /// `𝔅 = 𝔅'_o + [L, Δ0]`.
    pub fn b(&self) -> &SeriesMatrix<T> {
        &self.b
    }

    /// Components `ω_a = [∂_aΔ0, L]`, one per coordinate.
    pub fn omega(&self) -> &[SeriesMatrix<T>] {
        &self.omega
    }

    /// The dz-part data `(Δ0(x_o), 𝔅(x_o))` at the center.
    pub fn dz_at_center(&self) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        (self.delta0_matrix().constant_values(), self.b.constant_values())
    }

    /// True when `f_i` and `f_j` agree at the center.
    pub fn coalescent(&self, i: usize, j: usize) -> bool {
        (self.delta0[i].constant_term() - self.delta0[j].constant_term()).is_negligible(self.tol)
    }

    /// Pairs `i < j` coalescing at the center.
    pub fn coalescent_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(i, j)| self.coalescent(i, j)).collect()
    }
}

/// Coefficient magnitudes, by degree, of the four integrability residuals
/// of a frame `(Δ0, 𝔅, ϖ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport {
    pub order: u32,
    /// `[dΔ0, 𝔅] + [Δ0, ϖ]`.
    pub commutation: Vec<f64>,
    /// `d𝔅 − [𝔅, ϖ]`.
    pub flatness: Vec<f64>,
    /// `dΔ0∧ϖ + ϖ∧dΔ0`.
    pub wedge: Vec<f64>,
    /// `dϖ + ϖ∧ϖ`.
    pub curvature: Vec<f64>,
    pub vanishes: bool,
}

impl IntegrabilityReport {
    pub fn max(&self) -> f64 {
        self.commutation
            .iter()
            .chain(&self.flatness)
            .chain(&self.wedge)
            .chain(&self.curvature)
            .fold(0.0, |a, &b| f64::max(a, b))
    }
}

/// Folds coefficient magnitudes of `m` into `acc` for degrees up to `order`
/// and the reliable degree of `m`.
fn absorb<T: Scalar>(acc: &mut [f64], m: &SeriesMatrix<T>, order: u32) {
    let rel = m.reliable_degree();
    if rel < 0 {
        return;
    }
    let top = (rel as u32).min(order);
    for (k, v) in m.magnitudes_by_degree(top).into_iter().enumerate() {
        if v > acc[k] {
            acc[k] = v;
        }
    }
}

fn vanishing(values: &[f64], tol: f64, exact: bool) -> bool {
    values.iter().all(|&v| if exact { v == 0.0 } else { v <= tol })
}

/// Evaluates the integrability equations of the frame through degree
/// `order` (capped by the reliable degree of each residual).
pub fn integrability_residual<T: Scalar>(
    delta0: &SeriesMatrix<T>,
    b: &SeriesMatrix<T>,
    varpi: &[SeriesMatrix<T>],
    order: u32,
    tol: f64,
) -> Result<IntegrabilityReport> {
    let d = delta0.proto().vars();
    if b.size() != delta0.size() || varpi.len() != d || varpi.iter().any(|w| w.size() != delta0.size()) {
        return Err(Error::Mismatch("Δ0, 𝔅 and ϖ shapes disagree".into()));
    }
    let proto = delta0.proto();
    proto.check_frame(&b.proto())?;
    for w in varpi {
        proto.check_frame(&w.proto())?;
    }
    let len = order as usize + 1;
    let (mut commutation, mut flatness, mut wedge, mut curvature) =
        (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let dd: Vec<SeriesMatrix<T>> = (0..d).map(|a| delta0.diff(a)).collect();
    for a in 0..d {
        let r1 = dd[a].commutator(b).add(&delta0.commutator(&varpi[a]));
        absorb(&mut commutation, &r1, order);
        let r2 = b.diff(a).sub(&b.commutator(&varpi[a]));
        absorb(&mut flatness, &r2, order);
        for c in (a + 1)..d {
            let r3 =
                dd[a].mul(&varpi[c]).sub(&dd[c].mul(&varpi[a])).add(&varpi[a].mul(&dd[c])).sub(&varpi[c].mul(&dd[a]));
            absorb(&mut wedge, &r3, order);
            let r4 =
                varpi[c].diff(a).sub(&varpi[a].diff(c)).add(&varpi[a].mul(&varpi[c])).sub(&varpi[c].mul(&varpi[a]));
            absorb(&mut curvature, &r4, order);
        }
    }
    let vanishes = [&commutation, &flatness, &wedge, &curvature].iter().all(|v| vanishing(v, tol, T::EXACT));
    Ok(IntegrabilityReport { order, commutation, flatness, wedge, curvature, vanishes })
}

/// An off-diagonal position where no `L` can reproduce the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstruction {
    pub i: usize,
    pub j: usize,
    pub reason: String,
}

/// Result of [`dv_witness`]: `L` when every position is solvable, and the
/// obstructions otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DvWitness<T> {
    pub l: Option<SeriesMatrix<T>>,
    pub obstructions: Vec<Obstruction>,
}

/// True when `a − b` vanishes through the smaller reliable degree.
fn series_agree<T: Scalar>(a: &TruncatedSeries<T>, b: &TruncatedSeries<T>, tol: f64) -> bool {
    let rel = a.reliable_degree().min(b.reliable_degree());
    if rel < 0 {
        return true;
    }
    let diff = a.sub(b).magnitudes_by_degree(rel as u32);
    let scale =
        a.magnitudes_by_degree(rel as u32).into_iter().chain(b.magnitudes_by_degree(rel as u32)).fold(1.0, f64::max);
    vanishing(&diff, tol * scale, T::EXACT)
}

fn series_vanishes<T: Scalar>(a: &TruncatedSeries<T>, tol: f64) -> bool {
    series_agree(a, &a.zero_like(), tol)
}

/// Searches for `L` with `𝔅'' = [L, Δ0]` and `ϖ'' = [dΔ0, L]`.
///
/// Where `f_j − f_i` is invertible `L_ij = 𝔅_ij/(f_j − f_i)`; otherwise a
/// coordinate `a` with `∂_a(f_i − f_j)` invertible gives `L_ij` from `ϖ_a`;
/// where `f_i ≡ f_j` both `𝔅_ij` and `ϖ_ij` must vanish.
pub fn dv_witness<T: Scalar>(
    delta0: &[TruncatedSeries<T>],
    b: &SeriesMatrix<T>,
    varpi: &[SeriesMatrix<T>],
    tol: f64,
) -> Result<DvWitness<T>> {
    let n = delta0.len();
    let proto = b.proto();
    let d = proto.vars();
    if b.size() != n || varpi.len() != d || varpi.iter().any(|w| w.size() != n) {
        return Err(Error::Mismatch("Δ0, 𝔅 and ϖ shapes disagree".into()));
    }
    let mut l = SeriesMatrix::zero(n, proto.center().to_vec(), proto.order());
    let mut obstructions = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let gap = delta0[j].sub(&delta0[i]);
            let grads: Vec<TruncatedSeries<T>> = (0..d).map(|a| delta0[i].diff(a).sub(&delta0[j].diff(a))).collect();
            let candidate = if !gap.constant_term().is_negligible(tol) {
                Some(b.get(i, j).mul(&gap.invert(tol)?))
            } else if let Some(a) = (0..d).find(|&a| !grads[a].constant_term().is_negligible(tol)) {
                Some(varpi[a].get(i, j).mul(&grads[a].invert(tol)?))
            } else if series_vanishes(&gap, tol) {
                None
            } else {
                obstructions.push(Obstruction {
                    i,
                    j,
                    reason: "f_j − f_i and its gradient vanish at the center".into(),
                });
                continue;
            };
            match candidate {
                Some(lij) => {
                    let mut ok = series_agree(b.get(i, j), &lij.mul(&gap), tol);
                    for a in 0..d {
                        ok &= series_agree(varpi[a].get(i, j), &lij.mul(&grads[a]), tol);
                    }
                    if ok {
                        l.set(i, j, lij);
                    } else {
                        obstructions.push(Obstruction {
                            i,
                            j,
                            reason: "𝔅_ij and ϖ_ij are not both of the form L_ij·(f_j − f_i), L_ij·d(f_i − f_j)".into(),
                        });
                    }
                }
                None => {
                    let ok =
                        series_vanishes(b.get(i, j), tol) && varpi.iter().all(|w| series_vanishes(w.get(i, j), tol));
                    if !ok {
                        obstructions
                            .push(Obstruction { i, j, reason: "f_i ≡ f_j but 𝔅_ij or ϖ_ij is nonzero".into() });
                    }
                }
            }
        }
    }
    let l = obstructions.is_empty().then_some(l);
    Ok(DvWitness { l, obstructions })
}

/// Pulls a jet `Γ(u)` centred at `u_o = f(x_o)` back along `u = f(x)`,
/// giving the jet of `Γ(f(x))` at `x_o` to `order`.
pub fn pull_back_jet<T: Scalar>(
    gamma: &SeriesMatrix<T>,
    f: &[Polynomial<T>],
    x0: &[T],
    order: u32,
    tol: f64,
) -> Result<SeriesMatrix<T>> {
    let u0 = gamma.center();
    if f.len() != u0.len() {
        return Err(Error::Mismatch(format!("{} maps for a jet in {} variables", f.len(), u0.len())));
    }
    let mut shifts = Vec::with_capacity(f.len());
    for (p, c) in f.iter().zip(u0) {
        if p.vars() != x0.len() {
            return Err(Error::Mismatch("map arity differs from the base point".into()));
        }
        let s = p.taylor(x0, order);
        if !(s.constant_term() - c.clone()).is_negligible(tol) {
            return Err(Error::InvalidInput("jet center is not the image of the base point".into()));
        }
        let mut s = s;
        s.insert(Monomial::one(x0.len()), T::zero());
        shifts.push(s);
    }
    let proto = TruncatedSeries::zero(x0.to_vec(), order);
    let mut powers: Vec<Vec<TruncatedSeries<T>>> = Vec::with_capacity(shifts.len());
    let top = gamma.order().min(order) as usize;
    for s in &shifts {
        let mut row = vec![proto.constant_like(T::one())];
        for e in 1..=top {
            row.push(row[e - 1].mul(s));
        }
        powers.push(row);
    }
    let rel = gamma.reliable_degree().min(order as i64);
    let n = gamma.size();
    let mut out = SeriesMatrix::zero(n, x0.to_vec(), order);
    for i in 0..n {
        for j in 0..n {
            let mut acc = proto.clone();
            for (m, c) in gamma.get(i, j).terms() {
                if m.degree() as usize > top {
                    continue;
                }
                let mut t = proto.constant_like(c.clone());
                for (v, &e) in m.exps().iter().enumerate() {
                    if e > 0 {
                        t = t.mul(&powers[v][e as usize]);
                    }
                }
                acc = acc.add(&t);
            }
            out.set(i, j, acc.with_reliable(rel));
        }
    }
    Ok(out)
}
