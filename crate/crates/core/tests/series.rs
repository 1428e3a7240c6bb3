mod common;

use common::*;
use proptest::prelude::*;
use strata_core::scalar::{qc, QComplex, C64};
use strata_core::series::*;

type Q = TruncatedSeries<QComplex>;

fn origin(d: usize) -> Vec<QComplex> {
    vec![qc(0, 1); d]
}

fn series(d: usize, order: u32, terms: &[(i64, i64, &[u32])]) -> Q {
    Q::from_terms(origin(d), order, terms.iter().map(|(n, den, e)| (Monomial(e.to_vec()), qc(*n, *den))))
}

fn is_zero(s: &Q, k: u32) -> bool {
    s.magnitudes_by_degree(k).iter().all(|&m| m == 0.0)
}

fn random_series(d: usize, order: u32) -> impl Strategy<Value = Q> {
    prop::collection::vec((-4i64..5, 1i64..4), monomials_up_to(d, order).len()).prop_map(move |cs| {
        Q::from_terms(
            origin(d),
            order,
            monomials_up_to(d, order).into_iter().zip(cs).map(|(m, (n, den))| (m, qc(n, den))),
        )
    })
}

#[test]
fn multiplication_examples() {
    let a = series(1, 2, &[(1, 1, &[0]), (1, 1, &[1])]);
    let b = series(1, 2, &[(1, 1, &[0]), (-1, 1, &[1])]);
    assert_eq!(series_mul(&a, &b).unwrap(), series(1, 2, &[(1, 1, &[0]), (-1, 1, &[2])]));
    let x = series(1, 1, &[(1, 1, &[1])]);
    assert!(is_zero(&series_mul(&x, &x).unwrap(), 1));
    let s = series(2, 2, &[(1, 1, &[0, 0]), (1, 1, &[1, 0]), (1, 1, &[0, 1])]);
    let want = series(
        2,
        2,
        &[(1, 1, &[0, 0]), (2, 1, &[1, 0]), (2, 1, &[0, 1]), (1, 1, &[2, 0]), (2, 1, &[1, 1]), (1, 1, &[0, 2])],
    );
    assert_eq!(series_mul(&s, &s).unwrap(), want);
}

#[test]
fn multiplication_rejects_different_frames() {
    let a = series(1, 2, &[(1, 1, &[0])]);
    let b = series(1, 3, &[(1, 1, &[0])]);
    assert!(series_mul(&a, &b).is_err());
    let c = Q::constant(qc(1, 1), vec![qc(1, 1)], 2);
    assert!(series_mul(&a, &c).is_err());
}

#[test]
fn derivative_examples() {
    let s = series(2, 4, &[(1, 1, &[2, 1])]);
    let ds = series_diff(&s, 0).unwrap();
    assert!(is_zero(&ds.sub(&series(2, 4, &[(2, 1, &[1, 1])])), 3));
    assert_eq!(ds.reliable_degree(), 3);
    let s = series(2, 4, &[(1, 1, &[2, 0])]);
    assert!(is_zero(&series_diff(&s, 1).unwrap(), 3));
    let s = series(1, 3, &[(3, 1, &[0]), (2, 1, &[1]), (1, 1, &[2])]);
    let ds = series_diff(&s, 0).unwrap();
    assert_eq!(ds.coeff(&Monomial(vec![0])), qc(2, 1));
    assert_eq!(ds.coeff(&Monomial(vec![1])), qc(2, 1));
    assert_eq!(ds.reliable_degree(), 2);
    assert!(series_diff(&s, 1).is_err());
}

#[test]
fn inversion_examples() {
    let s = series(1, 3, &[(1, 1, &[0]), (-1, 1, &[1])]);
    let inv = series_invert(&s, 0.0).unwrap();
    assert_eq!(inv, series(1, 3, &[(1, 1, &[0]), (1, 1, &[1]), (1, 1, &[2]), (1, 1, &[3])]));
    let two = series(2, 2, &[(2, 1, &[0, 0])]);
    assert_eq!(series_invert(&two, 0.0).unwrap(), series(2, 2, &[(1, 2, &[0, 0])]));
    assert!(series_invert(&series(1, 3, &[(1, 1, &[1])]), 0.0).is_err());
    let f = TruncatedSeries::<C64>::constant(C64::new(1e-14, 0.0), vec![C64::new(0.0, 0.0)], 2);
    assert!(series_invert(&f, 1e-10).is_err());
}

#[test]
fn taylor_expansion_and_recentering_agree() {
    // p = x²y − 3x + 1 expanded at (1, 2).
    let p = poly(2, &[(1, 1, &[2, 1]), (-3, 1, &[1, 0]), (1, 1, &[0, 0])]);
    let at = p.taylor(&[qc(1, 1), qc(2, 1)], 3);
    assert_eq!(at.constant_term(), p.eval(&[qc(1, 1), qc(2, 1)]));
    assert_eq!(at.coeff(&Monomial(vec![1, 0])), qc(1, 1));
    assert_eq!(at.coeff(&Monomial(vec![0, 1])), qc(1, 1));
    assert_eq!(at.coeff(&Monomial(vec![2, 1])), qc(1, 1));
    let moved = p.taylor(&[qc(0, 1), qc(0, 1)], 3).recentered(&[qc(1, 1), qc(2, 1)]);
    assert_eq!(moved, at);
}

#[test]
fn series_json_round_trip() {
    let s = series(2, 3, &[(1, 2, &[0, 0]), (-3, 1, &[1, 2])]);
    let m = SeriesMatrix::diagonal(vec![s.clone(), s.scale(&qc(2, 1))]);
    let v = series_matrix_to_json(&m);
    let back = RawSeriesMatrix::parse(&v).unwrap();
    assert!(back.is_exact());
    assert_eq!(back.to_matrix::<QComplex>().unwrap(), m);
    let raw = RawSeries::parse(&series_to_json(&s)).unwrap();
    assert_eq!(raw.to_series::<QComplex>().unwrap(), s);
}

#[test]
fn matrix_products_and_commutators() {
    let x = series(1, 3, &[(1, 1, &[1])]);
    let one = series(1, 3, &[(1, 1, &[0])]);
    let zero = one.zero_like();
    let a = SeriesMatrix::from_entries(2, vec![one.clone(), x.clone(), zero.clone(), one.clone()]).unwrap();
    let b = SeriesMatrix::from_entries(2, vec![one.clone(), zero.clone(), x.clone(), one.clone()]).unwrap();
    let ab = a.mul(&b);
    assert_eq!(ab.get(0, 0), &one.add(&x.mul(&x)));
    let comm = a.commutator(&b);
    assert_eq!(comm.get(0, 0), &x.mul(&x));
    assert_eq!(comm.get(1, 1), &x.mul(&x).neg());
    assert_eq!(comm.diag_part().add(&comm.offdiag_part()), comm);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn ring_axioms_hold_to_the_truncation(a in random_series(2, 4), b in random_series(2, 4), c in random_series(2, 4)) {
        let assoc = a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c)));
        prop_assert!(is_zero(&assoc, 4));
        let dist = a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c)));
        prop_assert!(is_zero(&dist, 4));
        prop_assert!(is_zero(&a.mul(&b).sub(&b.mul(&a)), 4));
    }

    #[test]
    fn inverse_is_a_two_sided_inverse(a in random_series(3, 3)) {
        prop_assume!(a.constant_term() != qc(0, 1));
        let inv = series_invert(&a, 0.0).unwrap();
        let one = a.constant_like(qc(1, 1));
        prop_assert!(is_zero(&series_mul(&a, &inv).unwrap().sub(&one), 3));
    }

    #[test]
    fn leibniz_rule_holds_one_degree_lower(a in random_series(2, 4), b in random_series(2, 4), i in 0usize..2) {
        let lhs = series_diff(&a.mul(&b), i).unwrap();
        let rhs = series_diff(&a, i).unwrap().mul(&b).add(&a.mul(&series_diff(&b, i).unwrap()));
        prop_assert!(is_zero(&lhs.sub(&rhs), 3));
    }

    #[test]
    fn float_and_exact_products_agree(a in random_series(2, 3), b in random_series(2, 3)) {
        let exact = a.mul(&b).to_c64();
        let float = a.to_c64().mul(&b.to_c64());
        let diff = exact.sub(&float).magnitudes_by_degree(3).into_iter().fold(0.0, f64::max);
        prop_assert!(diff < 1e-12);
    }
}

#[test]
fn polynomial_substitution() {
    // (x + y)² with x = t, y = 2t gives 9t².
    let p = ipoly(2, &[(1, &[2, 0]), (2, &[1, 1]), (1, &[0, 2])]);
    let t = ipoly(1, &[(1, &[1])]);
    let two_t = ipoly(1, &[(2, &[1])]);
    assert_eq!(p.substitute(&[t, two_t]), ipoly(1, &[(9, &[2])]));
}
