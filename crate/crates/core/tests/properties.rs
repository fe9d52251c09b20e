mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lpmink::closed_forms::{BodyMesh, FacetOrigin, VanishingLine};
use lpmink::convex::{axis_box, lp_area_measure, support, surface_area_measure};
use lpmink::diagnostics::{diagnose, OriginLocation};
use lpmink::geom::scale;
use lpmink::selftest::random_polytope;
use lpmink::solver::{oracle_small, solve, LpProblem, SolveOptions};

fn box_problem(half: &[f64], p: f64) -> LpProblem {
    let lo: Vec<f64> = half.iter().map(|x| -x).collect();
    let m = lp_area_measure(&axis_box(&lo, half).unwrap(), p).unwrap();
    LpProblem::new(
        half.len(),
        p,
        m.atoms().iter().map(|a| a.u.clone()).collect(),
        m.atoms().iter().map(|a| a.w).collect(),
    )
    .unwrap()
}

fn nonzero_p() -> impl Strategy<Value = f64> {
    (-2.0..0.8f64).prop_filter("p near 0 leaves boxes non-unique", |p| p.abs() > 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn surface_measure_has_zero_first_moment(seed in any::<u64>(), n in 2usize..=3) {
        let poly = random_polytope(&mut ChaCha8Rng::seed_from_u64(seed), n).unwrap();
        let m = surface_area_measure(&poly);
        for c in m.first_moment() {
            prop_assert!(c.abs() <= 1e-10 * m.total());
        }
    }

    #[test]
    fn support_is_positively_homogeneous(seed in any::<u64>(), k in -8i32..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = random_polytope(&mut rng, 3).unwrap();
        let u = common::random_unit(&mut rng, 3);
        let lambda = 2f64.powi(k);
        let a = support(&poly, &scale(&u, lambda)).unwrap();
        let b = lambda * support(&poly, &u).unwrap();
        prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs());
    }

    #[test]
    fn vanishing_line_depends_on_radius_only(
        x1 in -1.0..1.0f64,
        r in 0.01..1.0f64,
        phi in 0.0..std::f64::consts::TAU,
        theta in 0.0..std::f64::consts::TAU,
        p in 0.01..0.99f64,
    ) {
        let ex = VanishingLine::new(3, p, 0.05).unwrap();
        let a = ex.value_at(&[x1, r * phi.cos(), r * phi.sin()]).unwrap();
        let b = ex.value_at(&[x1, r * (phi + theta).cos(), r * (phi + theta).sin()]).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn vanishing_line_hessian_matches_finite_differences(
        x1 in -1.0..1.0f64,
        r in 0.1..1.0f64,
        phi in 0.0..std::f64::consts::TAU,
        p in 0.01..0.99f64,
    ) {
        let ex = VanishingLine::new(3, p, 0.05).unwrap();
        let x = [x1, r * phi.cos(), r * phi.sin()];
        let fd = common::fd_hessian(|y| ex.value_at(y).unwrap(), &x, 1e-5);
        let err = common::rel_matrix_error(&ex.hessian_at(&x).unwrap(), &fd);
        prop_assert!(err < 1e-5, "relative error {err:e}");
    }

    #[test]
    fn facet_origin_hessian_matches_finite_differences(
        z in 0.05..1.0f64,
        phi in 0.0..std::f64::consts::TAU,
        p in -0.95..0.95f64,
    ) {
        let ex = FacetOrigin::new(3, p).unwrap();
        let y = [z * phi.cos(), z * phi.sin()];
        let fd = common::fd_hessian(|w| ex.value_at(w).unwrap(), &y, 1e-5);
        let err = common::rel_matrix_error(&ex.hessian_at(&y).unwrap(), &fd);
        prop_assert!(err < 1e-5, "relative error {err:e}");
    }

    #[test]
    fn facet_origin_residual_approaches_its_limit(p in 0.2..0.95f64) {
        let ex = FacetOrigin::new(3, p).unwrap();
        let c = ex.limit_constant();
        prop_assert!(c > 0.0);
        let near = ex.eval(1e-6).unwrap().residual;
        prop_assert!((near - c).abs() <= 1e-2 * c, "residual {near} vs limit {c}");
    }

    #[test]
    fn box_solutions_match_the_oracle(
        half in prop::collection::vec(0.3..3.0f64, 2..=3),
        p in nonzero_p(),
    ) {
        let pr = box_problem(&half, p);
        let res = solve(&pr, &SolveOptions::default()).unwrap();
        prop_assert!(res.converged);
        let exact = oracle_small(&pr);
        let exact = exact.h().unwrap();
        for (a, b) in res.h.iter().zip(exact) {
            prop_assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn scaled_targets_scale_the_solution(
        half in prop::collection::vec(0.3..3.0f64, 2..=3),
        p in nonzero_p(),
        lambda in 0.1..10.0f64,
    ) {
        let pr = box_problem(&half, p);
        let opts = SolveOptions::default();
        let a = solve(&pr, &opts).unwrap();
        let b = solve(&pr.scaled_targets(lambda).unwrap(), &opts).unwrap();
        prop_assert!(a.converged && b.converged);
        let s = lambda.powf(1.0 / (half.len() as f64 - p));
        for (x, y) in a.h.iter().zip(&b.h) {
            prop_assert!((y - s * x).abs() <= 1e-6 * s * x);
        }
    }
}

#[test]
fn facet_origin_reference_values() {
    let ex = FacetOrigin::new(3, 0.5).unwrap();
    assert_eq!(ex.value(0.0), 0.0);
    let expected = 1.0 + (2.0 / 3.0) / (5.0f64 / 3.0).powf(2.5);
    assert!((ex.value(1.0) - expected).abs() <= 1e-14);
    let r: Vec<f64> = [1e-3, 1e-4, 1e-5].iter().map(|&z| ex.eval(z).unwrap().residual).collect();
    for w in r.windows(2) {
        assert!((w[0] - w[1]).abs() <= 1e-2 * w[1], "{r:?}");
    }
}

#[test]
fn origin_faces_of_the_facet_origin_body() {
    let mesh = BodyMesh::default();
    let body = FacetOrigin::new(3, 0.5).unwrap().body(mesh).unwrap();
    let rep = diagnose(&body, 0.5, None).unwrap();
    assert!(matches!(rep.origin_location, OriginLocation::Boundary { .. }));
    assert_eq!(rep.origin_cone_dim, 1);
    assert!(rep.zero_set_null);
    assert!(!rep.origin_faces_null);
    // Only the bottom facet has its normal cone inside the vertical ray;
    // its edges and vertices see neighbouring normals too.
    assert_eq!(rep.x0.len(), 1);
    assert_eq!(rep.x0[0].dim, 2);
    let area = FacetOrigin::bottom_facet_area(mesh);
    assert!((rep.x0_mass - area).abs() <= 1e-9);
    assert!((rep.origin_face_mass - area).abs() <= 1e-9);
}
