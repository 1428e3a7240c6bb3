use crate::scalar::Ring;
use crate::series::{SeriesMatrix, TruncatedSeries};

/// Coefficient series of the generalized Darboux–Egoroff equations for a
/// fixed choice of functions `f_i` and exponents `b_i`.
///
/// With `G_hk = f_h − f_k` and `D_hk,i = ∂_i f_h − ∂_i f_k`, the residuals are
///
/// `E1(i,j;k,h) = D_hk,j ∂_iF_kh − D_hk,i ∂_jF_kh − Σ_l (D_lk,i D_hl,j − D_lk,j D_hl,i) F_kl F_lh`
///
/// `E2(i;k,h) = G_hk ∂_iF_kh − (b_h − b_k − 1) D_hk,i F_kh − Σ_l (D_lk,i G_hl − G_lk D_hl,i) F_kl F_lh`.
#[derive(Debug, Clone)]
pub struct Equations<T> {
    pub n: usize,
    pub d: usize,
    /// `g[h][k] = f_h − f_k`.
    pub g: Vec<Vec<TruncatedSeries<T>>>,
    /// `dd[h][k][i] = ∂_i f_h − ∂_i f_k`.
    pub dd: Vec<Vec<Vec<TruncatedSeries<T>>>>,
    /// `kappa[k][h] = b_h − b_k − 1`.
    pub kappa: Vec<Vec<T>>,
}

impl<T: Ring> Equations<T> {
    /// Builds the coefficient series from the Taylor jets of the `f_i`,
    /// which must carry one more degree than the working order.
    pub fn new(f: &[TruncatedSeries<T>], b: &[T]) -> Equations<T> {
        let n = f.len();
        let d = f[0].vars();
        let grads: Vec<Vec<TruncatedSeries<T>>> = f.iter().map(|fi| (0..d).map(|i| fi.diff(i)).collect()).collect();
        let g = (0..n).map(|h| (0..n).map(|k| f[h].sub(&f[k])).collect()).collect();
        let dd =
            (0..n).map(|h| (0..n).map(|k| (0..d).map(|i| grads[h][i].sub(&grads[k][i])).collect()).collect()).collect();
        let kappa = (0..n).map(|k| (0..n).map(|h| b[h].clone() - b[k].clone() - T::one()).collect()).collect();
        Equations { n, d, g, dd, kappa }
    }

    /// Same equations with every coefficient series truncated to `order`.
    pub fn with_order(&self, order: u32) -> Equations<T> {
        let cut = |s: &TruncatedSeries<T>| s.with_order(order);
        Equations {
            n: self.n,
            d: self.d,
            g: self.g.iter().map(|r| r.iter().map(cut).collect()).collect(),
            dd: self.dd.iter().map(|r| r.iter().map(|v| v.iter().map(cut).collect()).collect()).collect(),
            kappa: self.kappa.clone(),
        }
    }

    /// Maps the coefficients into another ring.
    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U + Copy) -> Equations<U> {
        let m = |s: &TruncatedSeries<T>| s.map(f);
        Equations {
            n: self.n,
            d: self.d,
            g: self.g.iter().map(|r| r.iter().map(m).collect()).collect(),
            dd: self.dd.iter().map(|r| r.iter().map(|v| v.iter().map(m).collect()).collect()).collect(),
            kappa: self.kappa.iter().map(|r| r.iter().map(f).collect()).collect(),
        }
    }

    pub fn e1(&self, fm: &SeriesMatrix<T>, i: usize, j: usize, k: usize, h: usize) -> TruncatedSeries<T> {
        let fkh = fm.get(k, h);
        let mut out = self.dd[h][k][j].mul(&fkh.diff(i)).sub(&self.dd[h][k][i].mul(&fkh.diff(j)));
        for l in (0..self.n).filter(|&l| l != k && l != h) {
            let coef = self.dd[l][k][i].mul(&self.dd[h][l][j]).sub(&self.dd[l][k][j].mul(&self.dd[h][l][i]));
            out = out.sub(&coef.mul(&fm.get(k, l).mul(fm.get(l, h))));
        }
        out
    }

    pub fn e2(&self, fm: &SeriesMatrix<T>, i: usize, k: usize, h: usize) -> TruncatedSeries<T> {
        let fkh = fm.get(k, h);
        let mut out = self.g[h][k].mul(&fkh.diff(i)).sub(&self.dd[h][k][i].mul(fkh).scale(&self.kappa[k][h]));
        for l in (0..self.n).filter(|&l| l != k && l != h) {
            let coef = self.dd[l][k][i].mul(&self.g[h][l]).sub(&self.g[l][k].mul(&self.dd[h][l][i]));
            out = out.sub(&coef.mul(&fm.get(k, l).mul(fm.get(l, h))));
        }
        out
    }
}
