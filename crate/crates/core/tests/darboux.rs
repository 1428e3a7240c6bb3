mod common;

use common::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::json;
use strata_core::darboux::*;
use strata_core::scalar::{qc, QComplex, Scalar, C64};
use strata_core::series::{SeriesMatrix, TruncatedSeries};
use strata_core::Error;

fn regular_two_by_two() -> (DEProblem<QComplex>, Vec<Vec<QComplex>>) {
    let p = DEProblem::new(vec![qc(0, 1), qc(1, 1)], coords(2), vec![qc(0, 1), qc(1, 2)]).unwrap();
    (p, vec![vec![qc(0, 1), qc(2, 1)], vec![qc(-3, 4), qc(0, 1)]])
}

#[test]
fn zero_jet_has_zero_residual() {
    let (p, _) = regular_two_by_two();
    let jet = DEJet { f: SeriesMatrix::zero(2, p.x0.clone(), 4) };
    let r = de_residual(&p, &jet, 3).unwrap();
    assert!(r.vanishes);
    assert_eq!(r.max(), 0.0);
}

#[test]
fn constant_jet_violates_the_second_family() {
    let p = DEProblem::new(vec![qc(0, 1), qc(1, 1)], coords(2), vec![qc(0, 1), qc(0, 1)]).unwrap();
    let ones = vec![vec![qc(0, 1), qc(1, 1)], vec![qc(1, 1), qc(0, 1)]];
    let proto = TruncatedSeries::zero(p.x0.clone(), 1);
    let mut f = SeriesMatrix::constant(&ones, &proto);
    f.set(0, 0, proto.clone());
    f.set(1, 1, proto);
    let r = de_residual(&p, &DEJet { f }, 0).unwrap();
    assert_eq!(r.de2[0], 1.0);
    assert!(!r.vanishes);
}

#[test]
fn residual_needs_one_extra_degree() {
    let (p, _) = regular_two_by_two();
    let jet = DEJet { f: SeriesMatrix::zero(2, p.x0.clone(), 3) };
    assert!(matches!(de_residual(&p, &jet, 3), Err(Error::DegreeShortfall(_))));
}

#[test]
fn two_by_two_jet_matches_the_closed_form() {
    let (p, f0) = regular_two_by_two();
    let s = de_solve_jet(&p, &f0, 6).unwrap();
    assert!(s.feasible);
    assert!(s.warnings.is_empty());
    assert_eq!(s.jet.f, closed_form_jet(&p.x0, &p.b, &f0, 6));
    let o = de_oracle_solve(&p, &f0, 6).unwrap();
    assert_eq!(o.f, s.jet.f);
    let r = de_residual(&p, &s.jet, 5).unwrap();
    assert!(r.vanishes);
}

#[test]
fn floating_mode_reproduces_the_closed_form() {
    let (p, f0) = regular_two_by_two();
    let pf = DEProblem::new(
        p.x0.iter().map(|c| c.to_c64()).collect(),
        p.f.iter().map(|q| q.map(|c| c.to_c64())).collect(),
        p.b.iter().map(|c| c.to_c64()).collect(),
    )
    .unwrap();
    let f0f: Vec<Vec<C64>> = f0.iter().map(|r| r.iter().map(|c| c.to_c64()).collect()).collect();
    let s = de_solve_jet(&pf, &f0f, 5).unwrap();
    assert!(s.feasible);
    assert!(s.residual.max() < 1e-9);
    let want = closed_form_jet(&p.x0, &p.b, &f0, 5).map_entries(|e| e.to_c64());
    let diff = s.jet.f.sub(&want).magnitudes_by_degree(5).into_iter().fold(0.0, f64::max);
    assert!(diff < 1e-10);
}

#[test]
fn coalescent_base_with_equal_exponents_is_infeasible() {
    let p = DEProblem::new(vec![qc(0, 1), qc(0, 1)], coords(2), vec![qc(0, 1), qc(0, 1)]).unwrap();
    let f0 = vec![vec![qc(0, 1), qc(1, 1)], vec![qc(1, 1), qc(0, 1)]];
    let s = de_solve_jet(&p, &f0, 3).unwrap();
    assert!(!s.feasible);
    assert!(s.residual.base_constraint > 0.0);
}

#[test]
fn three_coordinates_with_a_coalescent_pair() {
    let p = DEProblem::new(vec![qc(0, 1), qc(0, 1), qc(1, 1)], coords(3), vec![qc(0, 1); 3]).unwrap();
    let free = vec![
        vec![qc(0, 1), qc(1, 2), qc(2, 3)],
        vec![qc(-1, 1), qc(0, 1), qc(3, 1)],
        vec![qc(5, 4), qc(1, 7), qc(0, 1)],
    ];
    let f0 = p.feasible_initial_value(&free);
    let s = de_solve_jet(&p, &f0, 4).unwrap();
    assert!(s.feasible);
    assert_eq!(de_oracle_solve(&p, &f0, 4).unwrap().f, s.jet.f);
}

#[test]
fn zero_initial_value_gives_the_zero_jet() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..8 {
        let (p, _) = random_de_instance(&mut rng);
        let zero = vec![vec![qc(0, 1); p.n()]; p.n()];
        let s = de_solve_jet(&p, &zero, 3).unwrap();
        assert!(s.feasible);
        assert_eq!(s.jet.f, SeriesMatrix::zero(p.n(), p.x0.clone(), 3));
    }
}

#[test]
fn recursion_and_oracle_agree_on_random_instances() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut coalescent = 0;
    for case in 0..24 {
        let (p, f0) = random_de_instance(&mut rng);
        let k = 2 + (case % 3) as u32;
        let s = de_solve_jet(&p, &f0, k).unwrap();
        assert!(s.feasible, "case {case}: {:?}", s.residual);
        assert!(s.residual.vanishes);
        assert_eq!(de_oracle_solve(&p, &f0, k).unwrap().f, s.jet.f, "case {case}");
        if (0..p.n()).any(|i| (0..p.n()).any(|j| i != j && p.coalescent(i, j))) {
            coalescent += 1;
        }
    }
    assert!(coalescent >= 5);
}

#[test]
fn integer_exponent_gap_at_a_coalescent_pair_is_resonant() {
    let p = DEProblem::new(vec![qc(0, 1), qc(0, 1)], coords(2), vec![qc(0, 1), qc(2, 1)]).unwrap();
    assert_eq!(p.pnr_violations(), vec![(0, 1)]);
    let f0 = vec![vec![qc(0, 1); 2]; 2];
    assert!(matches!(de_solve_jet(&p, &f0, 3), Err(Error::Resonant(_))));
}

#[test]
fn equal_gradients_violate_genericity() {
    let x1 = ipoly(2, &[(1, &[1, 0])]);
    let r = DEProblem::new(vec![qc(0, 1), qc(0, 1)], vec![x1.clone(), x1], vec![qc(0, 1), qc(1, 3)]);
    assert!(matches!(r, Err(Error::GenericityViolated(_))));
}

#[test]
fn problem_json_round_trip() {
    let v = json!({
        "d": 2, "n": 2, "x0": [0, 1],
        "f": [[{"exps": [1, 0], "re": 1, "im": 0}], [{"exps": [0, 1], "re": 1, "im": 0}]],
        "b": [0, "1/2"],
        "F0": [[0, 2], [[-0.75, 0], 0]],
    });
    let raw = RawProblem::parse(&v).unwrap();
    assert!(!raw.is_exact());
    let (p, f0) = problem_from_json::<C64>(&raw, DEFAULT_TOL).unwrap();
    assert_eq!(p.n(), 2);
    assert_eq!(f0[1][0], C64::new(-0.75, 0.0));
    let exact = json!({
        "d": 2, "n": 2, "x0": [0, 1],
        "f": [[{"exps": [1, 0], "re": 1, "im": 0}], [{"exps": [0, 1], "re": 1, "im": 0}]],
        "b": [0, "1/2"],
        "F0": [[0, 2], ["-3/4", 0]],
    });
    let raw = RawProblem::parse(&exact).unwrap();
    assert!(raw.is_exact());
    let (p, f0) = problem_from_json::<QComplex>(&raw, DEFAULT_TOL).unwrap();
    let (want_p, want_f0) = regular_two_by_two();
    assert_eq!((&p.x0, &p.b, &f0), (&want_p.x0, &want_p.b, &want_f0));
    let s = de_solve_jet(&want_p, &regular_two_by_two().1, 3).unwrap();
    let back = strata_core::series::RawSeriesMatrix::parse(&jet_to_json(&s.jet)).unwrap();
    assert_eq!(back.to_matrix::<QComplex>().unwrap(), s.jet.f);
    let r = residual_to_json(&s.residual);
    assert_eq!(r["vanishes"], json!(true));
    assert!(RawProblem::parse(&json!({"d": 1})).is_err());
}

#[test]
fn closed_form_oracle_is_self_consistent() {
    // (1 + t)^{-1/2}: coefficients 1, −1/2, 3/8 along y2.
    let e = qc(-1, 2);
    assert_eq!(binomial_coeff(&e, 0, 1), qc(-1, 2));
    assert_eq!(binomial_coeff(&e, 0, 2), qc(3, 8));
    assert_eq!(binomial_coeff(&e, 1, 0), qc(1, 2));
    assert_eq!(binomial_coeff(&e, 1, 1), qc(-3, 4));
}
