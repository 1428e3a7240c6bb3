//! Executable models for three small systems: the Pfaffian system of a
//! regular pole part, the 2×2 non-versality system and its integral curves,
//! and the classification of 2×2 deformations with a resonant residue.

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{qc, scalar_to_json, QComplex, RawComplex, Scalar, C64};
use crate::series::{series_matrix_to_json, Monomial, Polynomial, RawPoly, SeriesMatrix};

/// `ω = [A0 + K + [K, B0], dK]` and the reconstructed `A = A0 + K + [K, B0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PfaffianReport<T> {
    pub a: SeriesMatrix<T>,
    /// Coefficient magnitudes of `ω_a` by degree, one list per coordinate.
    pub omega: Vec<Vec<f64>>,
    pub max: f64,
    pub vanishes: bool,
}

/// Evaluates the Pfaffian system on a jet `K` with `K(center) = 0`, through
/// degree `order` (capped by the reliable degree of `dK`).
pub fn malgrange_pfaffian_residual<T: Scalar>(
    a0: &[Vec<T>],
    b0: &[Vec<T>],
    k: &SeriesMatrix<T>,
    order: u32,
    tol: f64,
) -> Result<PfaffianReport<T>> {
    let n = k.size();
    if a0.len() != n || b0.len() != n || a0.iter().chain(b0).any(|r| r.len() != n) {
        return Err(Error::Mismatch(format!("A0 and B0 must be {n}x{n}")));
    }
    if k.constant_values().iter().flatten().any(|c| !c.is_negligible(tol)) {
        return Err(Error::InvalidInput("K must vanish at the center".into()));
    }
    let proto = k.proto();
    let a0m = SeriesMatrix::constant(a0, &proto);
    let b0m = SeriesMatrix::constant(b0, &proto);
    let a = a0m.add(k).add(&k.commutator(&b0m));
    let mut omega = Vec::with_capacity(proto.vars());
    for v in 0..proto.vars() {
        let w = a.commutator(&k.diff(v));
        let top = (w.reliable_degree().max(-1).min(order as i64) + 1) as usize;
        let mags = if top == 0 { Vec::new() } else { w.magnitudes_by_degree(top as u32 - 1) };
        omega.push(mags);
    }
    let max = omega.iter().flatten().fold(0.0, |a: f64, &b| a.max(b));
    let vanishes = if T::EXACT { max == 0.0 } else { max <= tol };
    Ok(PfaffianReport { a, omega, max, vanishes })
}

/// Residuals of the three 1-forms
/// `ω1 = (1−c)β dα − α dβ`, `ω2 = (1+c)γ dα − α dγ`,
/// `ω3 = (1+c)γ dβ − (1−c)β dγ` evaluated on a curve and its velocity.
pub fn pfaffian_forms(c: C64, point: [C64; 3], velocity: [C64; 3]) -> [C64; 3] {
    let [al, be, ga] = point;
    let [dal, dbe, dga] = velocity;
    let one = C64::new(1.0, 0.0);
    [(one - c) * be * dal - al * dbe, (one + c) * ga * dal - al * dga, (one + c) * ga * dbe - (one - c) * be * dga]
}

/// Samples of `(α0 e^{r_α t}, β0 e^{r_β t}, γ0 e^{r_γ t})` with the residuals
/// of the three forms at each grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveReport {
    pub t: Vec<f64>,
    pub points: Vec<[C64; 3]>,
    pub residuals: Vec<[C64; 3]>,
    pub max_residual: f64,
    pub passes: bool,
}

/// Threshold for the residual of a sampled integral curve.
pub const CURVE_TOL: f64 = 1e-10;

/// The integral curve `α0 e^t, β0 e^{(1−c)t}, γ0 e^{(1+c)t}` through
/// `(α0, β0, γ0)`.
pub fn nonversal_curve(initial: [C64; 3], c: C64, grid: &[f64]) -> CurveReport {
    let one = C64::new(1.0, 0.0);
    exponential_curve(initial, [one, one - c, one + c], c, grid)
}

/// An exponential curve with arbitrary rates, checked against the system
/// with parameter `c`.
pub fn exponential_curve(initial: [C64; 3], rates: [C64; 3], c: C64, grid: &[f64]) -> CurveReport {
    let mut points = Vec::with_capacity(grid.len());
    let mut residuals = Vec::with_capacity(grid.len());
    let mut max_residual: f64 = 0.0;
    for &t in grid {
        let p: [C64; 3] = std::array::from_fn(|i| initial[i] * (rates[i] * t).exp());
        let v: [C64; 3] = std::array::from_fn(|i| rates[i] * p[i]);
        let r = pfaffian_forms(c, p, v);
        max_residual = r.iter().fold(max_residual, |m, z| m.max(z.norm()));
        points.push(p);
        residuals.push(r);
    }
    CurveReport { t: grid.to_vec(), points, residuals, max_residual, passes: max_residual <= CURVE_TOL }
}

/// A monomial family `α = α0 t^a`, `β = β0 t^b`, `γ = γ0 t^g`; a `None`
/// exponent means the component is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialFamily {
    pub exps: [Option<u32>; 3],
    /// The three forms pulled back to the family vanish as polynomials in
    /// `(t, α0, β0, γ0)`.
    pub verified: bool,
}

impl MonomialFamily {
    pub fn to_json(&self) -> Value {
        json!({
            "alpha_exp": self.exps[0],
            "beta_exp": self.exps[1],
            "gamma_exp": self.exps[2],
            "zero_flags": self.exps.iter().map(Option::is_none).collect::<Vec<_>>(),
            "verified": self.verified,
        })
    }

    /// Pulls the three forms back to the family, as polynomials in
    /// `(t, α0, β0, γ0)` with exact coefficients.
    pub fn pulled_back_forms(&self, c: &QComplex) -> [Polynomial<QComplex>; 3] {
        let comps: Vec<Polynomial<QComplex>> = (0..3)
            .map(|i| match self.exps[i] {
                None => Polynomial::zero(4),
                Some(e) => {
                    let mut m = Monomial::one(4);
                    m.0[0] = e;
                    m.0[i + 1] = 1;
                    Polynomial::from_terms(4, [(m, qc(1, 1))])
                }
            })
            .collect();
        let d: Vec<Polynomial<QComplex>> = comps.iter().map(|p| p.diff(0)).collect();
        let one = Polynomial::constant(4, qc(1, 1));
        let cp = Polynomial::constant(4, c.clone());
        let minus = one.sub(&cp);
        let plus = one.add(&cp);
        [
            minus.mul(&comps[1]).mul(&d[0]).sub(&comps[0].mul(&d[1])),
            plus.mul(&comps[2]).mul(&d[0]).sub(&comps[0].mul(&d[2])),
            plus.mul(&comps[2]).mul(&d[1]).sub(&minus.mul(&comps[1]).mul(&d[2])),
        ]
    }
}

/// The monomial integral families through the origin for `c = p/q`.
pub fn rational_c_families(p: i64, q: i64) -> Result<Vec<MonomialFamily>> {
    if q <= 0 {
        return Err(Error::InvalidInput("q must be positive".into()));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidInput(format!("gcd({p}, {q}) must be 1")));
    }
    if p == q || p == -q {
        return Err(Error::InvalidInput("c = ±1 is not covered by these families".into()));
    }
    let e = |v: i64| Some(v as u32);
    let mut shapes = Vec::new();
    if p < -q {
        shapes.push([e(q), e(q - p), None]);
    } else if p > q {
        shapes.push([e(q), None, e(p + q)]);
    } else {
        shapes.push([e(q), e(q - p), e(p + q)]);
        if (p + q) % 2 == 0 {
            shapes.push([None, e((q - p) / 2), e((p + q) / 2)]);
        }
    }
    let c = qc(p, q);
    Ok(shapes
        .into_iter()
        .map(|exps| {
            let mut fam = MonomialFamily { exps, verified: false };
            fam.verified = fam.pulled_back_forms(&c).iter().all(Polynomial::is_zero);
            fam
        })
        .collect())
}

/// The three coordinate lines through the origin and the rank of their
/// tangent directions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinesReport {
    pub residuals_vanish: bool,
    pub tangent_rank: usize,
}

pub fn demonstration_lines(c: C64) -> LinesReport {
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let mut ok = true;
    let mut tangents = Vec::with_capacity(3);
    for axis in 0..3 {
        let dir: [C64; 3] = std::array::from_fn(|i| C64::new(if i == axis { 1.0 } else { 0.0 }, 0.0));
        for &t in &grid {
            let p = dir.map(|v| v * t);
            ok &= pfaffian_forms(c, p, dir).iter().all(|z| z.norm() <= CURVE_TOL);
        }
        tangents.push(dir.to_vec());
    }
    let m = linalg::to_dmatrix(&tangents);
    LinesReport { residuals_vanish: ok, tangent_rank: linalg::rank(&m, 1e-12) }
}

/// Classification of a 2×2 deformation `K = [[g, h], [ℓ, m]]`.
#[derive(Debug, Clone, PartialEq)]
pub enum DeformationType<T> {
    /// `h ≡ 0`, `g ≢ m`, `ℓ = κ(m − g)²`.
    TypeI(T),
    /// `h ≡ ℓ ≡ 0`, `g ≡ m`.
    TypeII,
    /// `h ≢ 0`, `ℓ ≡ 0`, `g ≡ m`.
    TypeIII,
    /// `h ≡ 0`, `g ≡ m`, `ℓ ≢ 0`: the equations hold but none of the
    /// three listed shapes applies.
    Unlisted,
    NotIntegrable,
}

/// Entries of `K` as polynomials in global coordinates with base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Deformation2x2<T> {
    pub x0: Vec<T>,
    pub g: Polynomial<T>,
    pub h: Polynomial<T>,
    pub l: Polynomial<T>,
    pub m: Polynomial<T>,
}

/// Result of [`classify_2x2`] with the integrability residuals and, for
/// Type I, the off-diagonal residual of `M⁻¹AM`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification2x2<T> {
    pub kind: DeformationType<T>,
    /// Largest coefficient of `ℓ dh`, `(g − m) dh` and
    /// `(m − g) dℓ − 2ℓ d(m − g)`.
    pub equation_residual: f64,
    pub diagonalization_residual: Option<f64>,
}

/// Threshold for the floating-mode fit of `κ`.
pub const KAPPA_TOL: f64 = 1e-9;

fn poly_negligible<T: Scalar>(p: &Polynomial<T>, tol: f64) -> bool {
    if T::EXACT {
        p.is_zero()
    } else {
        p.max_coeff() <= tol
    }
}

/// Fits `ℓ = κ·s` coefficientwise: exact division with zero remainder in
/// exact mode, least squares with a residual threshold otherwise.
fn fit_multiple<T: Scalar>(l: &Polynomial<T>, s: &Polynomial<T>, tol: f64) -> Option<T> {
    if T::EXACT {
        let (lead, c) = s.leading()?;
        let kappa = l.coeff(lead) / c.clone();
        return l.sub(&s.scale(&kappa)).is_zero().then_some(kappa);
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for (m, c) in s.terms() {
        num = num + c.conj() * l.coeff(m);
        den = den + c.conj() * c.clone();
    }
    if den.is_negligible(0.0) {
        return None;
    }
    let kappa = num / den;
    let scale = l.max_coeff().max(s.max_coeff()).max(1.0);
    (l.sub(&s.scale(&kappa)).max_coeff() <= tol * scale).then_some(kappa)
}

/// Classifies `K` by checking the integrability equations as polynomial
/// identities and then reading off the type.
pub fn classify_2x2<T: Scalar>(dep: &Deformation2x2<T>, tol: f64) -> Result<Classification2x2<T>> {
    let d = dep.x0.len();
    let entries = [&dep.g, &dep.h, &dep.l, &dep.m];
    if entries.iter().any(|p| p.vars() != d) {
        return Err(Error::Mismatch(format!("entries must have {d} variables")));
    }
    if entries.iter().any(|p| !p.eval(&dep.x0).is_negligible(tol)) {
        return Err(Error::InvalidInput("entries must vanish at the base point".into()));
    }
    let gm = dep.g.sub(&dep.m);
    let mg = gm.neg();
    let two = T::from_i64(2);
    let mut residual: f64 = 0.0;
    for a in 0..d {
        let dh = dep.h.diff(a);
        let forms = [dep.l.mul(&dh), gm.mul(&dh), mg.mul(&dep.l.diff(a)).sub(&dep.l.mul(&mg.diff(a)).scale(&two))];
        for f in forms {
            residual = residual.max(f.max_coeff());
        }
    }
    let scale = entries.iter().map(|p| p.max_coeff()).fold(1.0, f64::max);
    let integrable = if T::EXACT { residual == 0.0 } else { residual <= tol * scale * scale };
    let h_zero = dep.h.is_zero();
    let g_is_m = poly_negligible(&gm, tol * scale);
    let l_zero = poly_negligible(&dep.l, tol * scale);
    let mut diag = None;
    let kind = if !integrable {
        DeformationType::NotIntegrable
    } else if !h_zero {
        if l_zero && g_is_m {
            DeformationType::TypeIII
        } else {
            DeformationType::NotIntegrable
        }
    } else if !g_is_m {
        match fit_multiple(&dep.l, &mg.mul(&mg), KAPPA_TOL) {
            Some(kappa) => {
                diag = Some(type_one_witness(dep, &kappa));
                DeformationType::TypeI(kappa)
            }
            None => DeformationType::NotIntegrable,
        }
    } else if l_zero {
        DeformationType::TypeII
    } else {
        DeformationType::Unlisted
    };
    Ok(Classification2x2 { kind, equation_residual: residual, diagonalization_residual: diag })
}

/// Largest off-diagonal coefficient of `M⁻¹AM` with
/// `A = [[g, 0], [2ℓ, m]]` and `M = [[1, 0], [2κ(g − m), 1]]`.
pub fn type_one_witness<T: Scalar>(dep: &Deformation2x2<T>, kappa: &T) -> f64 {
    let d = dep.x0.len();
    let two = T::from_i64(2);
    let one = Polynomial::constant(d, T::one());
    let zero = Polynomial::zero(d);
    let s = dep.g.sub(&dep.m).scale(&(two.clone() * kappa.clone()));
    let a = [[dep.g.clone(), zero.clone()], [dep.l.scale(&two), dep.m.clone()]];
    let m = [[one.clone(), zero.clone()], [s.clone(), one.clone()]];
    let minv = [[one.clone(), zero.clone()], [s.neg(), one]];
    let mul = |x: &[[Polynomial<T>; 2]; 2], y: &[[Polynomial<T>; 2]; 2]| -> [[Polynomial<T>; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| x[i][0].mul(&y[0][j]).add(&x[i][1].mul(&y[1][j]))))
    };
    let r = mul(&mul(&minv, &a), &m);
    r[0][1].max_coeff().max(r[1][0].max_coeff())
}

/// JSON `{d, x0, g, h, l, m}` read before the coefficient mode is fixed.
pub struct RawDeformation {
    x0: Vec<RawComplex>,
    entries: [RawPoly; 4],
}

impl RawDeformation {
    pub fn parse(v: &Value) -> Result<RawDeformation> {
        let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput("deformation needs d".into()))?
            as usize;
        let x0 = match v.get("x0") {
            Some(Value::Array(a)) => a.iter().map(RawComplex::parse).collect::<Result<Vec<_>>>()?,
            _ => vec![RawComplex::parse(&json!(0))?; d],
        };
        if x0.len() != d {
            return Err(Error::InvalidInput("x0 must have length d".into()));
        }
        let get = |k: &str| match v.get(k) {
            Some(p) => RawPoly::parse(p, d),
            None => Ok(RawPoly { d, terms: Vec::new() }),
        };
        Ok(RawDeformation { x0, entries: [get("g")?, get("h")?, get("l")?, get("m")?] })
    }

    pub fn is_exact(&self) -> bool {
        self.x0.iter().all(RawComplex::is_exact) && self.entries.iter().all(RawPoly::is_exact)
    }

    pub fn to_deformation<T: Scalar>(&self) -> Result<Deformation2x2<T>> {
        let [g, h, l, m] = &self.entries;
        Ok(Deformation2x2 {
            x0: self.x0.iter().map(|c| c.to_scalar()).collect::<Result<Vec<_>>>()?,
            g: g.to_poly()?,
            h: h.to_poly()?,
            l: l.to_poly()?,
            m: m.to_poly()?,
        })
    }
}

pub fn classification_to_json<T: Scalar>(c: &Classification2x2<T>) -> Value {
    let (kind, kappa) = match &c.kind {
        DeformationType::TypeI(k) => ("TypeI", Some(scalar_to_json(k))),
        DeformationType::TypeII => ("TypeII", None),
        DeformationType::TypeIII => ("TypeIII", None),
        DeformationType::Unlisted => ("Unlisted", None),
        DeformationType::NotIntegrable => ("NotIntegrable", None),
    };
    json!({
        "type": kind,
        "kappa": kappa,
        "equation_residual": c.equation_residual,
        "diagonalization_residual": c.diagonalization_residual,
    })
}

pub fn pfaffian_to_json<T: Scalar>(r: &PfaffianReport<T>) -> Value {
    json!({"A": series_matrix_to_json(&r.a), "omega": r.omega, "max": r.max, "vanishes": r.vanishes})
}

pub fn curve_to_json(r: &CurveReport) -> Value {
    let c = |z: &C64| json!([z.re, z.im]);
    json!({
        "t": r.t,
        "points": r.points.iter().map(|p| p.iter().map(c).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "residuals": r.residuals.iter().map(|p| p.iter().map(c).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "max_residual": r.max_residual,
        "passes": r.passes,
    })
}
