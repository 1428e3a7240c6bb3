use crate::error::{Error, Result};
use crate::gap::Path;
use crate::scalar::{Scalar, C64};
use crate::series::TruncatedSeries;

use super::FramedConnection;

/// Relative spread allowed among the last ratios for a bounded verdict.
const BOUNDED_SPREAD: f64 = 0.1;
/// Number of trailing samples compared for the verdict.
const TRAILING: usize = 4;

/// Values of `(b_j − b_i − 1)L_ij − Σ_{ℓ≠i}(f_ℓ − f_i)L_iℓ L_ℓj` and of its
/// ratio to `f_i − f_j` along a path ending at a coalescence point.
#[derive(Debug, Clone, PartialEq)]
pub struct HolconReport {
    pub i: usize,
    pub j: usize,
    pub samples: Vec<f64>,
    pub lhs: Vec<C64>,
    pub gap: Vec<C64>,
    pub ratios: Vec<C64>,
    /// Largest pairwise distance among the trailing ratios, relative to
    /// `max(1, |ratio|)`.
    pub spread: f64,
    pub bounded: bool,
}

/// Samples the estimate for the pair `(i, j)` at `path(t)`; the jets of `L`
/// and `Δ0` are evaluated at `path(t) − center`.
pub fn holcon_check<T: Scalar>(
    conn: &FramedConnection<T>,
    i: usize,
    j: usize,
    path: &Path,
    samples: &[f64],
) -> Result<HolconReport> {
    let n = conn.n();
    if i >= n || j >= n || i == j {
        return Err(Error::InvalidInput(format!("pair ({i},{j}) is not an off-diagonal position")));
    }
    if path.vars() != conn.d() {
        return Err(Error::Mismatch(format!("path has {} coordinates, expected {}", path.vars(), conn.d())));
    }
    if samples.len() < TRAILING {
        return Err(Error::InvalidInput(format!("need at least {TRAILING} samples")));
    }
    let center: Vec<C64> = conn.center().iter().map(Scalar::to_c64).collect();
    let f: Vec<TruncatedSeries<C64>> = conn.delta0().iter().map(TruncatedSeries::to_c64).collect();
    let l: Vec<Vec<TruncatedSeries<C64>>> =
        (0..n).map(|a| (0..n).map(|b| conn.l().get(a, b).to_c64()).collect()).collect();
    let local = |t: f64| -> Vec<C64> { path.eval(C64::new(t, 0.0)).iter().zip(&center).map(|(x, c)| x - c).collect() };
    let y_end = local(0.0);
    let end_gap = f[i].eval_local(&y_end) - f[j].eval_local(&y_end);
    let scale = f[i].eval_local(&y_end).norm().max(1.0);
    if end_gap.norm() > 1e-9 * scale {
        return Err(Error::InvalidInput(format!(
            "f_{} ≠ f_{} at the path endpoint (gap {:.3e})",
            i + 1,
            j + 1,
            end_gap.norm()
        )));
    }
    let kappa = (conn.bdiag()[j].clone() - conn.bdiag()[i].clone() - T::one()).to_c64();
    let mut lhs = Vec::with_capacity(samples.len());
    let mut gap = Vec::with_capacity(samples.len());
    let mut ratios = Vec::with_capacity(samples.len());
    for &t in samples {
        let y = local(t);
        let fv: Vec<C64> = f.iter().map(|s| s.eval_local(&y)).collect();
        let g = fv[i] - fv[j];
        if g.norm() <= 1e-14 * scale {
            return Err(Error::CoalescentSample(format!("f_{} = f_{} at t = {t}", i + 1, j + 1)));
        }
        let mut v = kappa * l[i][j].eval_local(&y);
        for ell in 0..n {
            if ell != i {
                v -= (fv[ell] - fv[i]) * l[i][ell].eval_local(&y) * l[ell][j].eval_local(&y);
            }
        }
        lhs.push(v);
        gap.push(g);
        ratios.push(v / g);
    }
    let tail = &ratios[ratios.len() - TRAILING..];
    let size = tail.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut spread: f64 = 0.0;
    for a in tail {
        for b in tail {
            spread = spread.max((a - b).norm());
        }
    }
    let spread = spread / size;
    Ok(HolconReport { i, j, samples: samples.to_vec(), lhs, gap, ratios, spread, bounded: spread < BOUNDED_SPREAD })
}
