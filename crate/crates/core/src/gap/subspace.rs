use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{RawComplex, C64};

/// Relative cutoff used when orthonormalizing spanning sets.
const SPAN_TOL: f64 = 1e-12;

/// Linear subspace of `ℂⁿ` held as a matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<C64>,
}

impl Subspace {
    pub fn zero(n: usize) -> Subspace {
        Subspace { basis: DMatrix::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Subspace {
        Subspace { basis: DMatrix::identity(n, n) }
    }

    /// Column span of `vectors`, orthonormalized.
    pub fn span(vectors: &DMatrix<C64>) -> Subspace {
        Subspace { basis: linalg::column_space(vectors, SPAN_TOL) }
    }

    /// Span of a list of vectors of length `n`.
    pub fn span_of(n: usize, vectors: &[Vec<C64>]) -> Subspace {
        let m = DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]);
        Subspace::span(&m)
    }

    /// Wraps a basis after checking orthonormality to `1e−10`.
    pub fn from_orthonormal(basis: DMatrix<C64>) -> Result<Subspace> {
        let k = basis.ncols();
        let gram = basis.adjoint() * &basis;
        let err = (gram - DMatrix::<C64>::identity(k, k)).norm();
        if err > 1e-10 {
            return Err(Error::InvalidInput(format!("basis is not orthonormal (defect {err:.3e})")));
        }
        Ok(Subspace { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<C64> {
        &self.basis
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.basis * self.basis.adjoint()
    }

    /// Whether `other ⊆ self` up to `tol` in operator norm.
    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        let n = self.ambient_dim();
        let comp = DMatrix::<C64>::identity(n, n) - self.projector();
        linalg::spectral_norm(&(comp * other.basis())) <= tol
    }

    /// `{"ambient_dim", "dim", "basis": [column as [[re, im], …]]}`.
    pub fn to_json(&self) -> Value {
        let cols: Vec<Value> = (0..self.dim())
            .map(|j| {
                Value::Array(
                    (0..self.ambient_dim())
                        .map(|i| {
                            let z = self.basis[(i, j)];
                            json!([z.re, z.im])
                        })
                        .collect(),
                )
            })
            .collect();
        json!({"ambient_dim": self.ambient_dim(), "dim": self.dim(), "basis": cols})
    }

    /// Parses the form written by [`Subspace::to_json`]; the columns may be
    /// any spanning set.
    pub fn from_json(v: &Value) -> Result<Subspace> {
        let n = v
            .get("ambient_dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidInput("subspace needs ambient_dim".into()))? as usize;
        let cols = v
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("subspace needs basis".into()))?;
        let mut vecs = Vec::with_capacity(cols.len());
        for c in cols {
            let entries = c.as_array().ok_or_else(|| Error::InvalidInput("basis column must be a list".into()))?;
            if entries.len() != n {
                return Err(Error::InvalidInput("basis column length differs from ambient_dim".into()));
            }
            vecs.push(entries.iter().map(|e| RawComplex::parse(e).map(|z| z.to_c64())).collect::<Result<Vec<_>>>()?);
        }
        Ok(Subspace::span_of(n, &vecs))
    }
}

/// Gap distance `‖Π₁ − Π₂‖` between two subspaces.
pub fn gap_distance(a: &Subspace, b: &Subspace) -> Result<f64> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::Mismatch(format!("ambient dimensions {} and {}", a.ambient_dim(), b.ambient_dim())));
    }
    Ok(linalg::spectral_norm(&(a.projector() - b.projector())).min(1.0))
}

/// Numerical kernel: right singular vectors with singular value below
/// `tol·σ_max` (below `tol` when the matrix vanishes).
pub fn kernel_subspace(m: &DMatrix<C64>, tol: f64) -> Subspace {
    let n = m.ncols();
    if n == 0 {
        return Subspace::zero(0);
    }
    let (sv, v) = linalg::right_singular_basis(m);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = if smax > 0.0 { tol * smax } else { tol };
    let k = sv.iter().filter(|&&s| s < cut).count();
    Subspace { basis: v.columns(0, k).into_owned() }
}

/// Span of the `k` right singular vectors with the smallest singular values.
pub fn smallest_singular_subspace(m: &DMatrix<C64>, k: usize) -> Subspace {
    let (_, v) = linalg::right_singular_basis(m);
    Subspace { basis: v.columns(0, k.min(v.ncols())).into_owned() }
}

/// Kernel of `(A − λI)ⁿ`.
pub fn generalized_eigenspace(a: &DMatrix<C64>, lambda: C64, tol: f64) -> Result<Subspace> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidInput("generalized_eigenspace needs a square matrix".into()));
    }
    let shifted = a - DMatrix::<C64>::identity(n, n) * lambda;
    let mut power = DMatrix::<C64>::identity(n, n);
    for _ in 0..n {
        power = &power * &shifted;
    }
    Ok(kernel_subspace(&power, tol))
}

/// Dimension of `{Θ : Θ·A₁ = A₂·Θ}` from the numerical kernel of
/// `A₁ᵀ ⊗ I − I ⊗ A₂` acting on column-stacked `Θ`.
pub fn intertwiner_dimension(a1: &DMatrix<C64>, a2: &DMatrix<C64>, tol: f64) -> Result<usize> {
    let n = a1.nrows();
    if a1.ncols() != n || a2.nrows() != n || a2.ncols() != n {
        return Err(Error::Mismatch("intertwiner_dimension needs two n×n matrices".into()));
    }
    let id = DMatrix::<C64>::identity(n, n);
    let sylv = a1.transpose().kronecker(&id) - id.kronecker(a2);
    Ok(kernel_subspace(&sylv, tol).dim())
}
