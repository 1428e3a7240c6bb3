mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use strata_core::gap::*;
use strata_core::scalar::{qc, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn mat(rows: &[&[f64]]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j]))
}

fn span(n: usize, vectors: &[&[f64]]) -> Subspace {
    Subspace::span_of(n, &vectors.iter().map(|v| v.iter().map(|&x| c(x)).collect()).collect::<Vec<_>>())
}

fn random_subspace() -> impl Strategy<Value = Subspace> {
    (0usize..=5, prop::collection::vec(-1.0f64..1.0, 50)).prop_map(|(k, xs)| {
        let vecs: Vec<Vec<C64>> =
            (0..k).map(|j| (0..5).map(|i| C64::new(xs[10 * j + 2 * i], xs[10 * j + 2 * i + 1])).collect()).collect();
        Subspace::span_of(5, &vecs)
    })
}

#[test]
fn gap_distance_examples() {
    let l = span(3, &[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0]]);
    assert!(gap_distance(&l, &l).unwrap() < 1e-12);
    let e1 = span(2, &[&[1.0, 0.0]]);
    let e2 = span(2, &[&[0.0, 1.0]]);
    assert!((gap_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-12);
    let diag = span(2, &[&[1.0, 1.0]]);
    assert!((gap_distance(&e1, &diag).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert!(gap_distance(&e1, &Subspace::zero(3)).is_err());
}

#[test]
fn kernel_examples() {
    let k = kernel_subspace(&mat(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-10);
    assert!(gap_distance(&k, &span(2, &[&[1.0, 0.0]])).unwrap() < 1e-12);
    let k = kernel_subspace(&DMatrix::zeros(2, 2), 1e-10);
    assert_eq!(k.dim(), 2);
    let k = kernel_subspace(&mat(&[&[1.0, 1.0], &[1.0, 1.0]]), 1e-10);
    assert!(gap_distance(&k, &span(2, &[&[1.0, -1.0]])).unwrap() < 1e-12);
}

#[test]
fn generalized_eigenspace_examples() {
    let j = mat(&[&[3.0, 1.0], &[0.0, 3.0]]);
    assert_eq!(generalized_eigenspace(&j, c(3.0), 1e-10).unwrap().dim(), 2);
    let d = mat(&[&[1.0, 0.0], &[0.0, 2.0]]);
    let e = generalized_eigenspace(&d, c(1.0), 1e-10).unwrap();
    assert!(gap_distance(&e, &span(2, &[&[1.0, 0.0]])).unwrap() < 1e-12);
}

#[test]
fn eigenspace_of_the_first_counterexample_tends_to_a_fixed_plane() {
    let family = counterexample_one();
    let plane = span(3, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, -1.0]]);
    let z = 0.1;
    let e = generalized_eigenspace(&family.eval(&[c(z)]), c(z * z), 1e-8).unwrap();
    assert_eq!(e.dim(), 2);
    let mut prev = gap_distance(&e, &plane).unwrap();
    for z in [0.01, 0.001, 0.0001] {
        let e = generalized_eigenspace(&family.eval(&[c(z)]), c(z * z), 1e-10).unwrap();
        let g = gap_distance(&e, &plane).unwrap();
        assert!(g < prev);
        prev = g;
    }
    assert!(prev < 1e-3);
}

#[test]
fn intertwiner_dimension_examples() {
    let id = DMatrix::<C64>::identity(2, 2);
    assert_eq!(intertwiner_dimension(&id, &id, 1e-10).unwrap(), 4);
    let j = mat(&[&[0.0, 1.0], &[0.0, 0.0]]);
    assert_eq!(intertwiner_dimension(&j, &j, 1e-10).unwrap(), 2);
    let a = mat(&[&[1.0, 0.0], &[0.0, 2.0]]);
    let b = mat(&[&[3.0, 0.0], &[0.0, 4.0]]);
    assert_eq!(intertwiner_dimension(&a, &b, 1e-10).unwrap(), 0);
}

#[test]
fn kernel_sheaf_values_at_jump_points() {
    let x = ipoly(1, &[(1, &[1])]);
    let x2 = ipoly(1, &[(1, &[2])]);
    let one = ipoly(1, &[(1, &[0])]);
    // [[x, x], [0, 0]]: generic kernel (1, −1), full kernel at 0.
    let t = MatrixFamily::from_exact(1, 2, vec![x.clone(), x.clone(), zero(1), zero(1)], vec![]).unwrap();
    let k = kernel_sheaf_value_1d(&t, &qc(0, 1)).unwrap();
    assert!(gap_distance(&k, &span(2, &[&[1.0, -1.0]])).unwrap() < 1e-12);
    assert_eq!(kernel_subspace(&t.eval(&[c(0.0)]), 1e-10).dim(), 2);
    // [[x², x], [0, 0]]: section (1, −x) has value e1 at 0.
    let t = MatrixFamily::from_exact(1, 2, vec![x2, x.clone(), zero(1), zero(1)], vec![]).unwrap();
    let k = kernel_sheaf_value_1d(&t, &qc(0, 1)).unwrap();
    assert!(gap_distance(&k, &span(2, &[&[1.0, 0.0]])).unwrap() < 1e-12);
    let k1 = kernel_sheaf_value_1d(&t, &qc(1, 1)).unwrap();
    assert!(gap_distance(&k1, &span(2, &[&[1.0, -1.0]])).unwrap() < 1e-12);
    // [[x, 1], [0, x]] is generically invertible.
    let t = MatrixFamily::from_exact(1, 2, vec![x.clone(), one, zero(1), x], vec![]).unwrap();
    assert_eq!(kernel_sheaf_value_1d(&t, &qc(0, 1)).unwrap().dim(), 0);
    assert_eq!(kernel_subspace(&t.eval(&[c(0.0)]), 1e-10).dim(), 1);
}

#[test]
fn kernel_sheaf_value_rejects_several_variables() {
    assert!(kernel_sheaf_value_1d(&three_by_three(), &qc(0, 1)).is_err());
}

#[test]
fn path_limit_matches_the_kernel_sheaf_value() {
    let family = counterexample_one();
    let path = Path::ray(&[c(0.0)], &[c(1.0)]);
    for branch in 0..2 {
        let limit = limit_along_path(&family, branch, &path, &dyadic_samples(1, 14), 1e-3).unwrap().unwrap();
        let shifted = family.shifted_power(branch, 3).unwrap();
        let sheaf = kernel_sheaf_value_1d(&shifted, &qc(0, 1)).unwrap();
        assert!(gap_distance(&limit, &sheaf).unwrap() < 1e-3, "branch {branch}");
    }
}

#[test]
fn reports_on_the_counterexamples() {
    let cfg = ProbeConfig::default();
    let r = jordanizability_report(&counterexample_one(), &[c(0.0)], &cfg).unwrap();
    assert!(!r.verdict && !r.cond3 && r.cond1 && r.cond2_all());
    let r = jordanizability_report(&counterexample_two(), &[c(0.0)], &cfg).unwrap();
    assert!(!r.verdict && !r.cond1);
    let r = jordanizability_report(&three_by_three(), &[c(0.0), c(0.0)], &cfg).unwrap();
    assert!(!r.verdict && !r.cond2_all());
    let r = jordanizability_report(&three_by_three(), &[c(0.0), c(1.0)], &cfg).unwrap();
    assert!(!r.verdict && !r.cond3);
    for (family, x0) in [
        (counterexample_one(), vec![c(0.5)]),
        (counterexample_two(), vec![c(0.5)]),
        (three_by_three(), vec![c(1.0), c(1.0)]),
    ] {
        assert!(jordanizability_report(&family, &x0, &cfg).unwrap().verdict);
    }
}

#[test]
fn families_in_one_bundle_are_jordanizable_everywhere() {
    let cfg = ProbeConfig::default();
    for x in [-1.0, -0.25, 0.0, 0.3, 2.0] {
        assert!(jordanizability_report(&single_bundle(), &[c(x)], &cfg).unwrap().verdict, "x = {x}");
        assert!(jordanizability_report(&single_block(), &[c(x)], &cfg).unwrap().verdict, "x = {x}");
    }
}

#[test]
fn report_json_has_the_documented_keys() {
    let r = jordanizability_report(&counterexample_one(), &[c(0.0)], &ProbeConfig::default()).unwrap();
    let v = r.to_json();
    for key in ["cond1", "cond2", "cond3", "verdict", "limits", "diagnostics"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn subspace_json_round_trip() {
    let s = span(3, &[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0]]);
    let back = Subspace::from_json(&s.to_json()).unwrap();
    assert!(gap_distance(&s, &back).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gap_distance_is_a_metric(a in random_subspace(), b in random_subspace(), c in random_subspace()) {
        let ab = gap_distance(&a, &b).unwrap();
        let ba = gap_distance(&b, &a).unwrap();
        let bc = gap_distance(&b, &c).unwrap();
        let ac = gap_distance(&a, &c).unwrap();
        prop_assert!(gap_distance(&a, &a).unwrap() < 1e-10);
        prop_assert!((ab - ba).abs() < 1e-10);
        prop_assert!(ac <= ab + bc + 1e-10);
        prop_assert!(ab <= 1.0);
        if ab < 1.0 - 1e-10 {
            prop_assert_eq!(a.dim(), b.dim());
        }
    }

    #[test]
    fn kernel_sheaf_value_lies_in_the_pointwise_kernel(
        coeffs in prop::collection::vec(-2i64..3, 12),
        x0 in -2i64..3,
    ) {
        // Rank-one family u(x)·vᵀ(x) with linear entries.
        let lin = |a: i64, b: i64| ipoly(1, &[(a, &[0]), (b, &[1])]);
        let u = [lin(coeffs[0], coeffs[1]), lin(coeffs[2], coeffs[3]), lin(coeffs[4], coeffs[5])];
        let v = [lin(coeffs[6], coeffs[7]), lin(coeffs[8], coeffs[9]), lin(coeffs[10], coeffs[11])];
        let entries = (0..9).map(|k| u[k / 3].mul(&v[k % 3])).collect();
        let t = MatrixFamily::from_exact(1, 3, entries, vec![]).unwrap();
        let at = qc(x0, 1);
        let sheaf = kernel_sheaf_value_1d(&t, &at).unwrap();
        let pointwise = kernel_subspace(&t.eval(&[c(x0 as f64)]), 1e-10);
        prop_assert!(pointwise.contains(&sheaf, 1e-9));
        // Near a generic point the kernel dimension is locally constant.
        let generic = qc(7, 3);
        let sheaf = kernel_sheaf_value_1d(&t, &generic).unwrap();
        let pointwise = kernel_subspace(&t.eval(&[c(7.0 / 3.0)]), 1e-10);
        prop_assert!(gap_distance(&sheaf, &pointwise).unwrap() < 1e-8);
    }

    #[test]
    fn centralizer_is_at_least_n(entries in prop::collection::vec(-3i32..4, 9)) {
        let a = DMatrix::from_fn(3, 3, |i, j| c(entries[3 * i + j] as f64));
        prop_assert!(intertwiner_dimension(&a, &a, 1e-9).unwrap() >= 3);
    }
}

#[test]
fn centralizer_is_minimal_for_regular_matrices() {
    use strata_core::bundles::{classify_matrix, describe};
    for a in [
        mat(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]),
        mat(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]),
        mat(&[&[1.0, 2.0, 3.0], &[0.0, 4.0, 5.0], &[0.0, 0.0, 6.0]]),
    ] {
        assert!(describe(&classify_matrix(&a, 1e-8).unwrap().symbol).is_regular);
        assert_eq!(intertwiner_dimension(&a, &a, 1e-9).unwrap(), 3);
    }
}
