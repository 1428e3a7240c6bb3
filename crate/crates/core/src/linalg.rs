//! Dense linear algebra: floating complex helpers on `nalgebra` matrices and
//! exact elimination over any field.

use std::cmp::Ordering;

use nalgebra::DMatrix;

use crate::scalar::{Field, Scalar, C64};

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<C64>) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}

pub fn singular_values(a: &DMatrix<C64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    a.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Numerical rank: singular values above `tol·σ_max` (or above `tol` when
/// the matrix is tiny).
pub fn rank(a: &DMatrix<C64>, tol: f64) -> usize {
    let sv = singular_values(a);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let cut = if smax > 0.0 { tol * smax } else { tol };
    sv.iter().filter(|&&s| s > cut).count()
}

/// Right singular vectors sorted by ascending singular value, as columns of
/// a unitary `n×n` matrix, together with the sorted singular values.
pub fn right_singular_basis(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.ncols();
    let rows = a.nrows().max(n);
    let mut padded = DMatrix::<C64>::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| sv[i].partial_cmp(&sv[j]).unwrap_or(Ordering::Equal).then(i.cmp(&j)));
    let mut v = DMatrix::<C64>::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        for r in 0..n {
            v[(r, col)] = vt[(i, r)].conj();
        }
    }
    (idx.iter().map(|&i| sv[i]).collect(), v)
}

/// Orthonormal basis of the column space, keeping directions with singular
/// value above `tol·σ_max`.
pub fn column_space(a: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let n = a.nrows();
    if a.ncols() == 0 || n == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested left singular vectors");
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| smax > 0.0 && sv[i] > tol * smax).collect();
    let mut out = DMatrix::<C64>::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &u.column(i));
    }
    out
}

/// Eigenvalues through the complex Schur form.
pub fn eigenvalues(a: &DMatrix<C64>) -> Vec<C64> {
    let schur = a.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Total order on complex numbers: real part, then imaginary part.
pub fn complex_order(a: C64, b: C64) -> Ordering {
    a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// Single-linkage clusters within `tol`; returns (mean, size) per cluster,
/// sorted by the complex order of the means.
pub fn cluster(values: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<C64>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(values[i]);
    }
    let mut out: Vec<(C64, usize)> = groups
        .into_values()
        .map(|g| {
            let sum: C64 = g.iter().sum();
            (sum / g.len() as f64, g.len())
        })
        .collect();
    out.sort_by(|a, b| complex_order(a.0, b.0));
    out
}

/// Converts a dense matrix of scalars into floating complex form.
pub fn to_dmatrix<T: Scalar>(rows: &[Vec<T>]) -> DMatrix<C64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j].to_c64())
}

/// Outcome of Gaussian elimination on an augmented system.
#[derive(Debug, Clone)]
pub struct Echelon<T> {
    /// Reduced row echelon form of the coefficient block.
    pub rows: Vec<Vec<T>>,
    /// Transformed right-hand sides.
    pub rhs: Vec<T>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

/// Gauss–Jordan elimination over a field. `score` ranks pivot candidates
/// (largest wins) and `negligible` decides zero entries.
pub fn reduce<T: Field>(
    mut rows: Vec<Vec<T>>,
    mut rhs: Vec<T>,
    cols: usize,
    score: impl Fn(&T) -> f64,
    negligible: impl Fn(&T) -> bool,
) -> Echelon<T> {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in rows.iter().enumerate().skip(r) {
            if negligible(&row[c]) {
                continue;
            }
            let s = score(&row[c]);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        let Some((p, _)) = best else { continue };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = T::one() / rows[r][c].clone();
        for k in c..cols {
            rows[r][k] = rows[r][k].clone() * inv.clone();
        }
        rhs[r] = rhs[r].clone() * inv;
        for i in 0..m {
            if i == r || negligible(&rows[i][c]) {
                continue;
            }
            let f = rows[i][c].clone();
            for k in c..cols {
                let v = rows[r][k].clone() * f.clone();
                rows[i][k] = rows[i][k].clone() - v;
            }
            let v = rhs[r].clone() * f;
            rhs[i] = rhs[i].clone() - v;
            rows[i][c] = T::zero();
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rows, rhs, pivots, cols }
}

impl<T: Field> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Whether every zero row has a zero right-hand side.
    pub fn consistent(&self, negligible: impl Fn(&T) -> bool) -> bool {
        self.rhs[self.pivots.len()..].iter().all(negligible)
    }

    /// The solution with free variables set to zero.
    pub fn particular(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.cols];
        for (r, &c) in self.pivots.iter().enumerate() {
            x[c] = self.rhs[r].clone();
        }
        x
    }

    /// Basis of the null space of the coefficient block.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (r, &c) in self.pivots.iter().enumerate() {
                    v[c] = -self.rows[r][f].clone();
                }
                v
            })
            .collect()
    }
}

/// Elimination tuned for a coefficient scalar: partial pivoting by
/// magnitude in floating mode, first nonzero pivot in exact mode.
pub fn reduce_scalar<T: Scalar>(rows: Vec<Vec<T>>, rhs: Vec<T>, cols: usize, tol: f64) -> Echelon<T> {
    if T::EXACT {
        // Any nonzero pivot is exact; the first one avoids magnitude work.
        reduce(rows, rhs, cols, |_| 0.0, |x| x.is_zero())
    } else {
        reduce(rows, rhs, cols, |x| x.magnitude(), |x| x.is_negligible(tol))
    }
}

/// Unique solution of a square system, or `None` when singular.
pub fn solve_square<T: Scalar>(a: Vec<Vec<T>>, b: Vec<T>, tol: f64) -> Option<Vec<T>> {
    let n = b.len();
    let e = reduce_scalar(a, b, n, tol);
    (e.rank() == n).then(|| e.particular())
}

/// Least-squares solution of a full-column-rank system via the normal
/// equations `AᴴA x = Aᴴb`; `None` when the columns are dependent.
pub fn least_squares<T: Scalar>(a: &[Vec<T>], b: &[T], cols: usize, tol: f64) -> Option<Vec<T>> {
    let mut ata = vec![vec![T::zero(); cols]; cols];
    let mut atb = vec![T::zero(); cols];
    for (row, rhs) in a.iter().zip(b) {
        for i in 0..cols {
            if row[i].is_zero() {
                continue;
            }
            let ci = row[i].conj();
            for j in 0..cols {
                if !row[j].is_zero() {
                    ata[i][j] = ata[i][j].clone() + ci.clone() * row[j].clone();
                }
            }
            atb[i] = atb[i].clone() + ci * rhs.clone();
        }
    }
    solve_square(ata, atb, tol)
}
