use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{int_as, SeriesMatrix, TruncatedSeries};

use super::FramedConnection;

/// Recursion used by [`formal_simplify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplifyMode {
    /// Divide by `f_j − f_i` everywhere; needs pairwise distinct `f_i` at
    /// the center.
    Regular,
    /// Divide by `∂_h f_j − ∂_h f_i` for pairs coalescing at the center.
    Coalescent,
}

/// Gauge transform `Φ = Id + Σ_{k=1..K} F_k z^{−k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSeries<T> {
    pub f: Vec<SeriesMatrix<T>>,
}

impl<T: Scalar> GaugeSeries<T> {
    /// `Φ = Id` truncated at `k` with frame taken from `proto`.
    pub fn identity(k: u32, proto: &TruncatedSeries<T>, n: usize) -> GaugeSeries<T> {
        let zero = SeriesMatrix::zero(n, proto.center().to_vec(), proto.order());
        GaugeSeries { f: vec![zero; k as usize] }
    }

    pub fn k(&self) -> u32 {
        self.f.len() as u32
    }

    /// `F_k`, with `F_0 = Id` and zero beyond the truncation.
    pub fn term(&self, k: usize, proto: &SeriesMatrix<T>) -> SeriesMatrix<T> {
        if k == 0 {
            SeriesMatrix::identity(proto.size(), proto.center().to_vec(), proto.order())
        } else if k <= self.f.len() {
            self.f[k - 1].clone()
        } else {
            SeriesMatrix::zero(proto.size(), proto.center().to_vec(), proto.order())
        }
    }
}

/// `M·diag(b)`.
fn times_diag<T: Scalar>(m: &SeriesMatrix<T>, b: &[T]) -> SeriesMatrix<T> {
    let mut out = m.clone();
    for i in 0..m.size() {
        for (j, bj) in b.iter().enumerate() {
            out.set(i, j, m.get(i, j).scale(bj));
        }
    }
    out
}

/// `𝔅F − F𝔅'_o + kF`, the part of the dz-equation not involving `F_{k+1}`.
fn dz_source<T: Scalar>(conn: &FramedConnection<T>, f: &SeriesMatrix<T>, k: usize) -> SeriesMatrix<T> {
    conn.b().mul(f).sub(&times_diag(f, conn.bdiag())).add(&f.scale(&int_as(k as i64)))
}

/// Computes `F_1..F_K` by the order-by-order recursion.
///
/// Off-diagonal entries of non-coalescent pairs come from the dz-equation
/// divided by `f_j − f_i`. In coalescent mode a pair coalescing at the
/// center takes `(F_1)_ij = L_ij` and then
/// `(F_{k+1})_ij = ([F_1, ∂_hΔ0]F_k − ∂_hF_k)_ij / (∂_h f_j − ∂_h f_i)` with
/// the pivot `h` maximizing the gradient gap at the center. Diagonal entries
/// are `−(1/(k+1)) Σ_{l≠i} 𝔅_il (F_{k+1})_li`.
pub fn formal_simplify<T: Scalar>(
    conn: &FramedConnection<T>,
    k_max: u32,
    mode: SimplifyMode,
) -> Result<GaugeSeries<T>> {
    let n = conn.n();
    let d = conn.d();
    let tol = conn.tol();
    let f = conn.delta0();
    let mut inv_gap: Vec<Vec<Option<TruncatedSeries<T>>>> = vec![vec![None; n]; n];
    let mut pivots: Vec<Vec<Option<(usize, TruncatedSeries<T>)>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if !conn.coalescent(i, j) {
                inv_gap[i][j] = Some(f[j].sub(&f[i]).invert(tol)?);
                continue;
            }
            if mode == SimplifyMode::Regular {
                return Err(Error::NotInvertible(format!(
                    "f_{} − f_{} vanishes at the center; use coalescent mode",
                    j + 1,
                    i + 1
                )));
            }
            let grads: Vec<TruncatedSeries<T>> = (0..d).map(|h| f[j].diff(h).sub(&f[i].diff(h))).collect();
            let mut best: Option<(usize, f64)> = None;
            for (h, g) in grads.iter().enumerate() {
                let m = g.constant_term().magnitude();
                if best.is_none_or(|(_, b)| m > b) {
                    best = Some((h, m));
                }
            }
            let h = best.map(|(h, _)| h).unwrap_or(0);
            if d == 0 || grads[h].constant_term().is_negligible(tol) {
                return Err(Error::GenericityViolated(format!(
                    "d(f_{} − f_{}) vanishes at the coalescent center",
                    j + 1,
                    i + 1
                )));
            }
            for k in 0..k_max as i64 {
                let r = conn.bdiag()[i].clone() - conn.bdiag()[j].clone() + int_as::<T>(k + 1);
                if r.is_negligible(tol) {
                    return Err(Error::Resonant(format!(
                        "b_{} − b_{} + {} = 0 at a coalescent pair",
                        i + 1,
                        j + 1,
                        k + 1
                    )));
                }
            }
            pivots[i][j] = Some((h, grads[h].invert(tol)?));
        }
    }
    let mut used_h: Vec<usize> = pivots.iter().flatten().flatten().map(|(h, _)| *h).collect();
    used_h.sort_unstable();
    used_h.dedup();

    let b = conn.b();
    let mut cur = SeriesMatrix::identity(n, conn.center().to_vec(), conn.order());
    let mut out = Vec::with_capacity(k_max as usize);
    for k in 0..k_max as usize {
        let src = dz_source(conn, &cur, k);
        // −(ω_h F_k + ∂_hF_k) equals [F_1, ∂_hΔ0]F_k − ∂_hF_k.
        let continuation: Vec<Option<SeriesMatrix<T>>> = (0..d)
            .map(|h| (k > 0 && used_h.contains(&h)).then(|| conn.omega()[h].mul(&cur).add(&cur.diff(h)).neg()))
            .collect();
        let mut next = SeriesMatrix::zero(n, conn.center().to_vec(), conn.order());
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = if let Some(inv) = &inv_gap[i][j] {
                    src.get(i, j).mul(inv)
                } else {
                    let (h, inv) = pivots[i][j].as_ref().expect("pivot for coalescent pair");
                    if k == 0 {
                        conn.l().get(i, j).clone()
                    } else {
                        let c = continuation[*h].as_ref().expect("continuation for pivot");
                        c.get(i, j).mul(inv)
                    }
                };
                next.set(i, j, v);
            }
        }
        let scale = T::one() / int_as::<T>(k as i64 + 1);
        for i in 0..n {
            let mut acc = conn.l().proto().zero_like();
            for l in 0..n {
                if l != i {
                    acc = acc.add(&b.get(i, l).mul(next.get(l, i)));
                }
            }
            next.set(i, i, acc.scale(&-scale.clone()));
        }
        out.push(next.clone());
        cur = next;
    }
    Ok(GaugeSeries { f: out })
}

/// Coefficients of `R = dΦ + Ω̂Φ − Φ·(−d(zΔ0) − 𝔅'_o dz/z)` by power of
/// `1/z`, each as magnitudes per jet degree up to its reliable degree.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeResidual {
    pub k: u32,
    /// dz-part at `z^{−k}` for `k = 0..=K`.
    pub dz: Vec<Vec<f64>>,
    /// dx-part at `z^{−k}` for `k = 0..K`, per coordinate.
    pub dx: Vec<Vec<Vec<f64>>>,
    /// Largest coefficient of the dz-part at `z^{−(K+1)}`, which involves
    /// the absent `F_{K+1}`.
    pub tail_dz: f64,
    /// Largest coefficient of the dx-part at `z^{−K}`.
    pub tail_dx: f64,
    pub max_determined: f64,
    pub vanishes: bool,
}

/// `[diag(d), F]` computed entrywise as `(d_i − d_j)F_ij`.
fn diag_commutator<T: Scalar>(d: &[TruncatedSeries<T>], f: &SeriesMatrix<T>) -> SeriesMatrix<T> {
    let mut out = f.clone();
    for i in 0..f.size() {
        for j in 0..f.size() {
            let v = if i == j {
                f.get(i, i).zero_like().with_reliable(f.get(i, i).reliable_degree())
            } else {
                d[i].sub(&d[j]).mul(f.get(i, j))
            };
            out.set(i, j, v);
        }
    }
    out
}

fn reliable_magnitudes<T: Scalar>(m: &SeriesMatrix<T>) -> Vec<f64> {
    let rel = m.reliable_degree();
    if rel < 0 {
        Vec::new()
    } else {
        m.magnitudes_by_degree(rel as u32)
    }
}

fn peak(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| f64::max(a, b))
}

/// Evaluates the gauge equation for `Φ` at every order of `1/z` fixed by
/// `F_0..F_K`.
pub fn gauge_residual<T: Scalar>(conn: &FramedConnection<T>, phi: &GaugeSeries<T>) -> Result<GaugeResidual> {
    let n = conn.n();
    if phi.f.iter().any(|m| m.size() != n) {
        return Err(Error::Mismatch("gauge series size differs from the connection".into()));
    }
    let proto = conn.l().proto();
    for m in &phi.f {
        proto.check_frame(&m.proto())?;
    }
    let k_max = phi.k() as usize;
    let delta0 = conn.delta0();
    let grads: Vec<Vec<TruncatedSeries<T>>> =
        (0..conn.d()).map(|a| delta0.iter().map(|f| f.diff(a)).collect()).collect();
    let shape = conn.l();
    let zero = SeriesMatrix::zero(n, conn.center().to_vec(), conn.order());
    let dz_at = |k: usize| -> SeriesMatrix<T> {
        let fk = if k <= k_max { phi.term(k, shape) } else { zero.clone() };
        let mut r = diag_commutator(delta0, &fk);
        if k > 0 {
            r = r.add(&dz_source(conn, &phi.term(k - 1, shape), k - 1));
        }
        r.neg()
    };
    let dx_at = |k: usize, a: usize| -> SeriesMatrix<T> {
        let fk = phi.term(k, shape);
        let next = if k < k_max { phi.term(k + 1, shape) } else { zero.clone() };
        fk.diff(a).sub(&diag_commutator(&grads[a], &next)).add(&conn.omega()[a].mul(&fk))
    };
    let dz: Vec<Vec<f64>> = (0..=k_max).map(|k| reliable_magnitudes(&dz_at(k))).collect();
    let dx: Vec<Vec<Vec<f64>>> =
        (0..k_max).map(|k| (0..conn.d()).map(|a| reliable_magnitudes(&dx_at(k, a))).collect()).collect();
    let tail_dz = peak(&reliable_magnitudes(&dz_at(k_max + 1)));
    let tail_dx = (0..conn.d()).map(|a| peak(&reliable_magnitudes(&dx_at(k_max, a)))).fold(0.0, f64::max);
    let max_determined = dz.iter().map(|v| peak(v)).chain(dx.iter().flatten().map(|v| peak(v))).fold(0.0, f64::max);
    let scale = phi
        .f
        .iter()
        .chain(std::iter::once(conn.b()))
        .flat_map(|m| m.magnitudes_by_degree(m.order()))
        .fold(1.0, f64::max);
    let vanishes = if T::EXACT { max_determined == 0.0 } else { max_determined <= conn.tol() * scale };
    Ok(GaugeResidual { k: phi.k(), dz, dx, tail_dz, tail_dx, max_determined, vanishes })
}
