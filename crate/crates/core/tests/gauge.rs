mod common;

use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use strata_core::gap::{dyadic_samples, Path};
use strata_core::gauge::*;
use strata_core::scalar::{qc, QComplex, Scalar, C64};
use strata_core::series::{Polynomial, SeriesMatrix, TruncatedSeries};
use strata_core::Error;

fn b3() -> Vec<QComplex> {
    vec![qc(0, 1), qc(1, 2), qc(1, 4)]
}

fn coalescent_center() -> Vec<QComplex> {
    vec![qc(0, 1), qc(0, 1), qc(1, 1)]
}

/// `f = (x1, x2, 1 − x1 + 2x2 + x1x2)` on `ℂ²`; `f1 = f2` at the origin.
fn spectrum_map() -> Vec<Polynomial<QComplex>> {
    vec![
        ipoly(2, &[(1, &[1, 0])]),
        ipoly(2, &[(1, &[0, 1])]),
        ipoly(2, &[(1, &[0, 0]), (-1, &[1, 0]), (2, &[0, 1]), (1, &[1, 1])]),
    ]
}

/// Connection on `ℂ²` whose `L` is a Darboux–Egoroff jet pulled back along
/// [`spectrum_map`].
fn pulled_back_connection(order: u32) -> FramedConnection<QComplex> {
    let gamma = de_jet(&coalescent_center(), &b3(), order);
    let f = spectrum_map();
    let x0 = vec![qc(0, 1), qc(0, 1)];
    let l = pull_back_jet(&gamma, &f, &x0, order, 0.0).unwrap();
    let delta0 = f.iter().map(|p| p.taylor(&x0, order)).collect();
    build_connection(delta0, b3(), l).unwrap()
}

fn frame_integrable(conn: &FramedConnection<QComplex>) -> bool {
    integrability_residual(&conn.delta0_matrix(), conn.b(), conn.omega(), conn.order(), 0.0).unwrap().vanishes
}

#[test]
fn derived_frame_matches_its_definition() {
    let conn = de_connection(&[qc(0, 1), qc(1, 2), qc(1, 1)], &b3(), 3);
    let (f, l) = (conn.delta0(), conn.l());
    assert_eq!(conn.b().get(0, 1), &l.get(0, 1).mul(&f[1].sub(&f[0])));
    assert_eq!(conn.b().get(2, 2).constant_term(), qc(1, 4));
    assert_eq!(conn.omega()[0].get(0, 2), &l.get(0, 2).mul(&f[0].diff(0).sub(&f[2].diff(0))));
    assert!(conn.coalescent_pairs().is_empty());
}

#[test]
fn build_rejects_bad_shapes() {
    let proto = TruncatedSeries::<QComplex>::zero(vec![qc(0, 1)], 2);
    let mut l = SeriesMatrix::zero(2, vec![qc(0, 1)], 2);
    assert!(build_connection(vec![proto.clone()], vec![qc(0, 1)], l.clone()).is_err());
    l.set(0, 0, proto.constant_like(qc(1, 1)));
    assert!(build_connection(vec![proto.clone(), proto], vec![qc(0, 1); 2], l).is_err());
}

#[test]
fn coalescent_center_simplifies_exactly() {
    let conn = de_connection(&coalescent_center(), &b3(), 6);
    assert_eq!(conn.coalescent_pairs(), vec![(0, 1)]);
    assert!(frame_integrable(&conn));
    assert!(matches!(formal_simplify(&conn, 6, SimplifyMode::Regular), Err(Error::NotInvertible(_))));
    let phi = formal_simplify(&conn, 6, SimplifyMode::Coalescent).unwrap();
    assert_eq!(phi.k(), 6);
    assert_eq!(&phi.f[0].offdiag_part(), conn.l());
    let r = gauge_residual(&conn, &phi).unwrap();
    assert!(r.vanishes);
    assert_eq!(r.max_determined, 0.0);
    assert_eq!(r.dz.len(), 7);
    assert_eq!(r.dx.len(), 6);
}

#[test]
fn both_recursions_agree_at_a_regular_center() {
    let conn = de_connection(&[qc(0, 1), qc(1, 2), qc(1, 1)], &b3(), 4);
    let regular = formal_simplify(&conn, 4, SimplifyMode::Regular).unwrap();
    let coalescent = formal_simplify(&conn, 4, SimplifyMode::Coalescent).unwrap();
    assert_eq!(regular, coalescent);
    assert_eq!(&regular.f[0].offdiag_part(), conn.l());
    assert!(gauge_residual(&conn, &regular).unwrap().vanishes);
}

#[test]
fn zero_l_gives_the_identity_gauge() {
    let center = vec![qc(0, 1), qc(1, 2), qc(1, 1)];
    let delta0: Vec<_> = coords(3).iter().map(|p| p.taylor(&center, 3)).collect();
    let conn = build_connection(delta0, b3(), SeriesMatrix::zero(3, center.clone(), 3)).unwrap();
    let phi = formal_simplify(&conn, 3, SimplifyMode::Regular).unwrap();
    assert_eq!(phi, GaugeSeries::identity(3, &conn.delta0()[0], 3));
    assert!(gauge_residual(&conn, &phi).unwrap().vanishes);
}

#[test]
fn integer_exponent_gap_at_a_coalescent_pair_is_resonant() {
    let conn = de_connection(&coalescent_center(), &b3(), 3);
    let injected =
        build_connection(conn.delta0().to_vec(), vec![qc(0, 1), qc(2, 1), qc(1, 4)], conn.l().clone()).unwrap();
    assert!(matches!(formal_simplify(&injected, 3, SimplifyMode::Coalescent), Err(Error::Resonant(_))));
    // The same gap at a non-coalescent pair is harmless.
    let harmless =
        build_connection(conn.delta0().to_vec(), vec![qc(0, 1), qc(1, 2), qc(2, 1)], conn.l().clone()).unwrap();
    assert!(formal_simplify(&harmless, 3, SimplifyMode::Coalescent).is_ok());
}

#[test]
fn vanishing_gradient_gap_violates_genericity() {
    let x0 = vec![qc(0, 1), qc(0, 1)];
    let f1 = ipoly(2, &[(1, &[1, 0])]);
    let f2 = ipoly(2, &[(1, &[1, 0]), (1, &[0, 2])]);
    let delta0 = vec![f1.taylor(&x0, 3), f2.taylor(&x0, 3)];
    let conn = build_connection(delta0, vec![qc(0, 1), qc(1, 3)], SeriesMatrix::zero(2, x0, 3)).unwrap();
    assert!(matches!(formal_simplify(&conn, 2, SimplifyMode::Coalescent), Err(Error::GenericityViolated(_))));
}

#[test]
fn witness_recovers_l_from_the_frame() {
    let conn = de_connection(&[qc(0, 1), qc(1, 2), qc(1, 1)], &b3(), 4);
    let w = dv_witness(conn.delta0(), conn.b(), conn.omega(), 0.0).unwrap();
    assert!(w.obstructions.is_empty());
    assert_eq!(&w.l.unwrap(), conn.l());
    let conn = de_connection(&coalescent_center(), &b3(), 4);
    let w = dv_witness(conn.delta0(), conn.b(), conn.omega(), 0.0).unwrap();
    let l = w.l.unwrap();
    // Through the coalescent pair L is read from ϖ, one degree short.
    let rebuilt = build_connection(conn.delta0().to_vec(), b3(), l.offdiag_part()).unwrap();
    for (a, b) in rebuilt.b().entries().iter().zip(conn.b().entries()) {
        let rel = a.reliable_degree().min(b.reliable_degree()) as u32;
        assert!(a.sub(b).magnitudes_by_degree(rel).iter().all(|&m| m == 0.0));
    }
}

#[test]
fn perturbed_frame_is_not_integrable_and_has_no_witness() {
    let conn = de_connection(&coalescent_center(), &b3(), 4);
    let mut b = conn.b().clone();
    let x1 = TruncatedSeries::variable(0, coalescent_center(), 4);
    b.set(0, 1, b.get(0, 1).add(&x1));
    let r = integrability_residual(&conn.delta0_matrix(), &b, conn.omega(), 4, 0.0).unwrap();
    assert!(!r.vanishes);
    assert!(r.flatness.iter().any(|&v| v > 0.0));
    let w = dv_witness(conn.delta0(), &b, conn.omega(), 0.0).unwrap();
    assert!(w.l.is_none());
    assert_eq!((w.obstructions[0].i, w.obstructions[0].j), (0, 1));
}

#[test]
fn pulled_back_jet_is_integrable_and_simplifies() {
    let conn = pulled_back_connection(5);
    assert_eq!(conn.d(), 2);
    assert!(frame_integrable(&conn));
    let phi = formal_simplify(&conn, 5, SimplifyMode::Coalescent).unwrap();
    assert_eq!(&phi.f[0].offdiag_part(), conn.l());
    assert!(gauge_residual(&conn, &phi).unwrap().vanishes);
}

#[test]
fn pull_back_along_the_identity_is_the_identity() {
    let center = coalescent_center();
    let gamma = de_jet(&center, &b3(), 3);
    let back = pull_back_jet(&gamma, &coords(3), &center, 3, 0.0).unwrap();
    assert_eq!(back, gamma);
    assert!(pull_back_jet(&gamma, &coords(2), &center[..2], 3, 0.0).is_err());
    let shifted = vec![qc(1, 1), qc(0, 1), qc(1, 1)];
    assert!(pull_back_jet(&gamma, &coords(3), &shifted, 3, 0.0).is_err());
}

#[test]
fn holcon_ratio_is_bounded_for_a_pulled_back_jet() {
    let conn = pulled_back_connection(6);
    let path = Path::ray(&[C64::new(0.0, 0.0); 2], &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let r = holcon_check(&conn, 0, 1, &path, &dyadic_samples(1, 12)).unwrap();
    assert!(r.bounded, "spread {}", r.spread);
    assert_eq!(r.ratios.len(), 12);
}

#[test]
fn holcon_ratio_diverges_for_constant_l() {
    let x0 = vec![qc(0, 1), qc(0, 1)];
    let delta0: Vec<_> = coords(2).iter().map(|p| p.taylor(&x0, 3)).collect();
    let one = TruncatedSeries::constant(qc(1, 1), x0.clone(), 3);
    let mut l = SeriesMatrix::zero(2, x0, 3);
    l.set(0, 1, one.clone());
    l.set(1, 0, one);
    let conn = build_connection(delta0, vec![qc(0, 1); 2], l).unwrap();
    assert!(!frame_integrable(&conn));
    let path = Path::ray(&[C64::new(0.0, 0.0); 2], &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let r = holcon_check(&conn, 0, 1, &path, &dyadic_samples(1, 12)).unwrap();
    assert!(!r.bounded);
    assert!(r.ratios[11].norm() > 1000.0);
    // Along the diagonal every sample is coalescent.
    let diag = Path::ray(&[C64::new(0.0, 0.0); 2], &[C64::new(1.0, 0.0); 2]);
    assert!(matches!(holcon_check(&conn, 0, 1, &diag, &dyadic_samples(1, 6)), Err(Error::CoalescentSample(_))));
    // A path ending off the coalescence locus is rejected.
    let off = Path::ray(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    assert!(matches!(holcon_check(&conn, 0, 1, &off, &dyadic_samples(1, 6)), Err(Error::InvalidInput(_))));
}

#[test]
fn gauge_residual_vanishes_on_random_rational_instances() {
    let mut rng = StdRng::seed_from_u64(77);
    for case in 0..4 {
        let n = 2 + case % 2;
        let order = 3 + (case % 2) as u32;
        // Linear spectrum map u0 + A·x on ℂ² with distinct rows of A.
        let u0: Vec<QComplex> = (0..n).map(|i| if i < 2 { qc(0, 1) } else { qc(1, 1) }).collect();
        let rows: Vec<[i64; 2]> = loop {
            let rows: Vec<[i64; 2]> = (0..n).map(|_| [rng.random_range(-3..=3), rng.random_range(-3..=3)]).collect();
            if (0..n).all(|i| (0..i).all(|j| rows[i] != rows[j])) {
                break rows;
            }
        };
        let f: Vec<Polynomial<QComplex>> = (0..n)
            .map(|i| {
                Polynomial::constant(2, u0[i].clone()).add(&ipoly(2, &[(rows[i][0], &[1, 0]), (rows[i][1], &[0, 1])]))
            })
            .collect();
        let b: Vec<QComplex> = (0..n).map(|i| qc(rng.random_range(-4..=4), [5, 7, 9][i])).collect();
        let gamma = if n == 2 {
            // Two coalescing functions force L = 0; use a regular base.
            de_jet(&[qc(0, 1), qc(1, 1)], &b, order)
        } else {
            de_jet(&u0, &b, order)
        };
        let x0 = if n == 2 {
            // Solve A·x = (0, 1) for a base point mapping to the jet center.
            let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
            if det == 0 {
                continue;
            }
            vec![qc(-rows[0][1], det), qc(rows[0][0], det)]
        } else {
            vec![qc(0, 1), qc(0, 1)]
        };
        let l = pull_back_jet(&gamma, &f, &x0, order, 0.0).unwrap();
        let delta0 = f.iter().map(|p| p.taylor(&x0, order)).collect();
        let conn = build_connection(delta0, b, l).unwrap();
        let phi = formal_simplify(&conn, order, SimplifyMode::Coalescent).unwrap();
        assert_eq!(&phi.f[0].offdiag_part(), conn.l(), "case {case}");
        assert!(gauge_residual(&conn, &phi).unwrap().vanishes, "case {case}");
    }
}

#[test]
fn gauge_series_json_round_trip() {
    let conn = de_connection(&[qc(0, 1), qc(1, 2), qc(1, 1)], &b3(), 3);
    let phi = formal_simplify(&conn, 3, SimplifyMode::Regular).unwrap();
    let raw = RawGaugeSeries::parse(&phi.to_json()).unwrap();
    assert!(raw.is_exact());
    assert_eq!(raw.to_series::<QComplex>().unwrap(), phi);
    let v = conn.to_json();
    for key in ["n", "d", "Bdiag", "Delta0", "L", "B", "omega", "coalescent_pairs"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn connection_json_in_global_coordinates() {
    let v = serde_json::json!({
        "d": 1, "n": 2, "center": [0], "K": 3,
        "Delta0": [[{"exps": [1], "re": 1, "im": 0}], [{"exps": [1], "re": -1, "im": 0}]],
        "Bdiag": [0, "1/3"],
        "L": [[[], [{"exps": [0], "re": 1, "im": 0}]], [[], []]],
    });
    let raw = RawConnection::parse(&v).unwrap();
    assert!(raw.is_exact());
    let conn = raw.to_connection::<QComplex>(DEFAULT_TOL).unwrap();
    assert_eq!(conn.coalescent_pairs(), vec![(0, 1)]);
    // 𝔅_12 = L_12·(f_2 − f_1) = −2x.
    assert_eq!(conn.b().get(0, 1).coeff(&strata_core::series::Monomial(vec![1])), qc(-2, 1));
    // Constant L is not integrable, and the residual notices.
    assert!(!frame_integrable(&conn));
    let phi = formal_simplify(&conn, 3, SimplifyMode::Coalescent).unwrap();
    assert!(!gauge_residual(&conn, &phi).unwrap().vanishes);
}

#[test]
fn coalescent_jets_agree_with_a_nearby_regular_center() {
    let order = 5;
    let conn = de_connection(&coalescent_center(), &b3(), order);
    let phi = formal_simplify(&conn, 3, SimplifyMode::Coalescent).unwrap();
    let mut previous: Option<Vec<f64>> = None;
    for den in [10i64, 20, 40] {
        // Move the center by (1/den, 0, 0), off the coalescence locus.
        let shift = vec![qc(1, den), qc(0, 1), qc(0, 1)];
        let delta0 = conn.delta0().iter().map(|s| s.recentered(&shift)).collect();
        let l = conn.l().map_entries(|e| e.recentered(&shift));
        let moved = build_connection(delta0, b3(), l).unwrap();
        let phi_r = formal_simplify(&moved, 3, SimplifyMode::Regular).unwrap();
        let diffs: Vec<f64> = (0..3)
            .map(|k| {
                phi.f[k]
                    .entries()
                    .iter()
                    .zip(phi_r.f[k].entries())
                    .map(|(a, b)| (a.recentered(&shift).constant_term() - b.constant_term()).to_c64().norm())
                    .fold(0.0, f64::max)
            })
            .collect();
        // The gap is truncation error, so halving the shift shrinks it fast.
        if let Some(prev) = &previous {
            for k in 0..3 {
                assert!(diffs[k] < prev[k] / 8.0, "F{}: {} then {}", k + 1, prev[k], diffs[k]);
            }
        }
        previous = Some(diffs);
    }
    assert!(previous.unwrap()[0] < 1e-9);
}
