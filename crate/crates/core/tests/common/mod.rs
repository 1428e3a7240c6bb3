#![allow(dead_code)]

use strata_core::gap::{MatrixFamily, Path};
use strata_core::scalar::{qc, QComplex};
use strata_core::series::{monomials_up_to, Monomial, Polynomial, SeriesMatrix, TruncatedSeries};

/// Exact polynomial from `(numerator, denominator, exponents)` terms.
pub fn poly(d: usize, terms: &[(i64, i64, &[u32])]) -> Polynomial<QComplex> {
    Polynomial::from_terms(d, terms.iter().map(|(n, den, e)| (Monomial(e.to_vec()), qc(*n, *den))))
}

/// Integer-coefficient shorthand.
pub fn ipoly(d: usize, terms: &[(i64, &[u32])]) -> Polynomial<QComplex> {
    Polynomial::from_terms(d, terms.iter().map(|(n, e)| (Monomial(e.to_vec()), qc(*n, 1))))
}

pub fn zero(d: usize) -> Polynomial<QComplex> {
    Polynomial::zero(d)
}

/// `[[z,1,0],[0,z²,z],[0,0,z²]]` with branches z (1) and z² (2).
pub fn counterexample_one() -> MatrixFamily {
    let z = ipoly(1, &[(1, &[1])]);
    let z2 = ipoly(1, &[(1, &[2])]);
    let one = ipoly(1, &[(1, &[0])]);
    let o = zero(1);
    MatrixFamily::from_exact(
        1,
        3,
        vec![z.clone(), one, o.clone(), o.clone(), z2.clone(), z.clone(), o.clone(), o, z2.clone()],
        vec![(z, 1), (z2, 2)],
    )
    .unwrap()
}

/// `[[z,1,0,0],[0,−z,0,0],[0,0,1+z,z],[0,0,0,1+z]]`.
pub fn counterexample_two() -> MatrixFamily {
    let z = ipoly(1, &[(1, &[1])]);
    let mz = ipoly(1, &[(-1, &[1])]);
    let one = ipoly(1, &[(1, &[0])]);
    let opz = ipoly(1, &[(1, &[0]), (1, &[1])]);
    let o = zero(1);
    #[rustfmt::skip]
    let entries = vec![
        z.clone(), one, o.clone(), o.clone(),
        o.clone(), mz.clone(), o.clone(), o.clone(),
        o.clone(), o.clone(), opz.clone(), z.clone(),
        o.clone(), o.clone(), o, opz.clone(),
    ];
    MatrixFamily::from_exact(1, 4, entries, vec![(z, 1), (mz, 1), (opz, 2)]).unwrap()
}

/// `[[x1,0,x2],[0,x1,x2],[0,0,0]]` with branches x1 (2) and 0 (1).
pub fn three_by_three() -> MatrixFamily {
    let x1 = ipoly(2, &[(1, &[1, 0])]);
    let x2 = ipoly(2, &[(1, &[0, 1])]);
    let o = zero(2);
    #[rustfmt::skip]
    let entries = vec![
        x1.clone(), o.clone(), x2.clone(),
        o.clone(), x1.clone(), x2,
        o.clone(), o.clone(), o.clone(),
    ];
    MatrixFamily::from_exact(2, 3, entries, vec![(x1, 2), (o, 1)]).unwrap()
}

/// `P·diag(x, 1+x)·P⁻¹` with `P = [[1,x],[0,1]]`, i.e. `[[x, x],[0, 1+x]]`.
pub fn single_bundle() -> MatrixFamily {
    let x = ipoly(1, &[(1, &[1])]);
    let opx = ipoly(1, &[(1, &[0]), (1, &[1])]);
    MatrixFamily::from_exact(1, 2, vec![x.clone(), x.clone(), zero(1), opx.clone()], vec![(x, 1), (opx, 1)]).unwrap()
}

/// `[[x, 1],[0, x]]`: one Jordan block everywhere.
pub fn single_block() -> MatrixFamily {
    let x = ipoly(1, &[(1, &[1])]);
    let one = ipoly(1, &[(1, &[0])]);
    MatrixFamily::from_exact(1, 2, vec![x.clone(), one, zero(1), x.clone()], vec![(x, 2)]).unwrap()
}

/// Line `t ↦ (t, c·t)` through the origin of `ℂ²`.
pub fn line(c: QComplex) -> Path {
    use strata_core::gap::FamilyPoly;
    let t = FamilyPoly::exact(Polynomial::from_terms(1, [(Monomial(vec![1]), qc(1, 1))]));
    let ct = FamilyPoly::exact(Polynomial::from_terms(1, [(Monomial(vec![1]), c)]));
    Path { coords: vec![t, ct] }
}

/// Random Darboux–Egoroff data with `n ≤ 3`, `d ≤ 3`, rational
/// coefficients and a feasible initial value. About half of the
/// instances have a coalescent pair at the base point.
pub fn random_de_instance(
    rng: &mut rand::rngs::StdRng,
) -> (strata_core::darboux::DEProblem<QComplex>, Vec<Vec<QComplex>>) {
    use rand::Rng;
    use strata_core::darboux::DEProblem;
    let small = |rng: &mut rand::rngs::StdRng| qc(rng.random_range(-3..=3), rng.random_range(1..=3));
    loop {
        let n = rng.random_range(2..=3);
        let d = rng.random_range(1..=3);
        let x0: Vec<QComplex> = (0..d).map(|_| small(rng)).collect();
        let coalesce = rng.random_bool(0.5);
        let mut f = Vec::with_capacity(n);
        for i in 0..n {
            let mut p = Polynomial::zero(d);
            for j in 0..d {
                p.add_term(Monomial::unit(d, j), small(rng));
            }
            if rng.random_bool(0.5) {
                let j = rng.random_range(0..d);
                p.add_term(Monomial::unit(d, j).mul(&Monomial::unit(d, j)), small(rng));
            }
            // Shift so that f_i(x0) is either shared with f_0 or distinct.
            let target = if coalesce && i == 1 { qc(0, 1) } else { qc(i as i64, 1) };
            let shift = target - p.eval(&x0);
            p.add_term(Monomial::one(d), shift);
            f.push(p);
        }
        // Exponents with denominators 5 and 7 never differ by a nonzero integer.
        let b: Vec<QComplex> = (0..n).map(|i| qc(rng.random_range(-4..=4), if i % 2 == 0 { 5 } else { 7 })).collect();
        let Ok(p) = DEProblem::new(x0, f, b) else { continue };
        let free: Vec<Vec<QComplex>> = (0..n).map(|_| (0..n).map(|_| small(rng)).collect()).collect();
        let f0 = p.feasible_initial_value(&free);
        return (p, f0);
    }
}

/// Coordinate functions `x_1, …, x_d`.
pub fn coords(d: usize) -> Vec<Polynomial<QComplex>> {
    (0..d).map(|i| Polynomial::variable(d, i)).collect()
}

/// Off-diagonal values used as the free part of initial data.
pub fn sample_free(n: usize) -> Vec<Vec<QComplex>> {
    let table = [[0, 1, 2, -3], [-2, 0, 3, 1], [5, 1, 0, -1], [1, -4, 2, 0]];
    (0..n).map(|i| (0..n).map(|j| qc(table[i][j], (i + 2 * j + 1) as i64)).collect()).collect()
}

/// Feasible Darboux–Egoroff jet in the coordinates `u = (u_1, …, u_n)`
/// (that is, `f_i = u_i`) at `center`, of the given order.
pub fn de_jet(center: &[QComplex], b: &[QComplex], order: u32) -> SeriesMatrix<QComplex> {
    use strata_core::darboux::{de_solve_jet, DEProblem};
    let n = center.len();
    let p = DEProblem::new(center.to_vec(), coords(n), b.to_vec()).unwrap();
    let f0 = p.feasible_initial_value(&sample_free(n));
    let s = de_solve_jet(&p, &f0, order).unwrap();
    assert!(s.feasible, "initial value is not feasible: {:?}", s.residual);
    s.jet.f
}

/// Connection with `Δ0 = diag(u)` and `L` the Darboux–Egoroff jet at
/// `center`.
pub fn de_connection(
    center: &[QComplex],
    b: &[QComplex],
    order: u32,
) -> strata_core::gauge::FramedConnection<QComplex> {
    let l = de_jet(center, b, order);
    let delta0 = coords(center.len()).iter().map(|p| p.taylor(center, order)).collect();
    strata_core::gauge::build_connection(delta0, b.to_vec(), l).unwrap()
}

/// Taylor coefficient of `y1^a y2^c` in `(1 + y2 − y1)^e`.
pub fn binomial_coeff(e: &QComplex, a: u32, c: u32) -> QComplex {
    let m = a + c;
    let mut gen = qc(1, 1);
    for i in 0..m {
        gen = gen * (e.clone() - qc(i as i64, 1)) / qc(i as i64 + 1, 1);
    }
    let mut choose = qc(1, 1);
    for i in 0..a {
        choose = choose * qc((m - i) as i64, 1) / qc(i as i64 + 1, 1);
    }
    let sign = if a % 2 == 0 { qc(1, 1) } else { qc(-1, 1) };
    gen * choose * sign
}

/// Jet of `F_kh = F0_kh·(x2 − x1)^{b_h − b_k − 1}` at a point where
/// `x2 − x1 = 1`.
pub fn closed_form_jet(x0: &[QComplex], b: &[QComplex], f0: &[Vec<QComplex>], order: u32) -> SeriesMatrix<QComplex> {
    let mut m = SeriesMatrix::zero(2, x0.to_vec(), order);
    for (k, h) in [(0usize, 1usize), (1, 0)] {
        let e = b[h].clone() - b[k].clone() - qc(1, 1);
        let terms = monomials_up_to(2, order)
            .into_iter()
            .map(|mono| {
                let c = binomial_coeff(&e, mono.0[0], mono.0[1]) * f0[k][h].clone();
                (mono, c)
            })
            .collect::<Vec<_>>();
        m.set(k, h, TruncatedSeries::from_terms(x0.to_vec(), order, terms));
    }
    m
}
