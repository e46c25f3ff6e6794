use meridian_lab::classify::{classify_surface, Tolerances};
use meridian_lab::curves::{gram_defect, integrate_spherical, make_profile, Curvature, SphericalCurveSpec, SurfaceKind};
use meridian_lab::grid::{GridSpec, SampleGrid};
use meridian_lab::minkowski::{inner4, inner_biv, wedge, Isometry, SpacetimeVector};
use meridian_lab::oracle::compare_laplacians;
use meridian_lab::polynomial::Polynomial;
use meridian_lab::surface::MeridianSurface;
use proptest::prelude::*;

fn vector() -> impl Strategy<Value = SpacetimeVector> {
    prop::array::uniform4(-3.0..3.0f64).prop_map(SpacetimeVector)
}

fn kind() -> impl Strategy<Value = SurfaceKind> {
    prop_oneof![Just(SurfaceKind::Elliptic), Just(SurfaceKind::Hyperbolic)]
}

fn isometry() -> impl Strategy<Value = Isometry> {
    (0.0..6.0f64, -0.8..0.8f64, -1.0..1.0f64, vector()).prop_map(|(angle, rapidity, tilt, offset)| {
        Isometry::rotation(1, 2, angle)
            .compose(&Isometry::boost(3, rapidity))
            .compose(&Isometry::rotation(2, 3, tilt))
            .compose(&Isometry::translation(offset))
    })
}

fn surface(kind: SurfaceKind, phi: Vec<f64>, f0: f64, kappa: f64) -> MeridianSurface {
    let p = make_profile(kind, Polynomial::new(phi), f0, 0.0, (0.0, 1.0)).unwrap();
    let c = integrate_spherical(SphericalCurveSpec::new(kind, Curvature::Constant(kappa), (0.0, 2.0))).unwrap();
    MeridianSurface::new(p, c).unwrap()
}

fn small_grid(s: &MeridianSurface) -> SampleGrid {
    SampleGrid::resolve(&GridSpec { nu: 6, nv: 6, margin: 0.05 }, s.u_domain(), s.v_domain()).unwrap()
}

proptest! {
    #[test]
    fn wedge_is_bilinear_and_antisymmetric(a in vector(), b in vector(), c in vector(), s in -2.0..2.0f64) {
        let lhs = wedge(&(a + s * c), &b);
        let rhs = wedge(&a, &b) + s * wedge(&c, &b);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        prop_assert!(wedge(&a, &b).max_abs_diff(&(-wedge(&b, &a))) <= 1e-12);
        prop_assert!(wedge(&a, &a).max_abs() == 0.0);
    }

    #[test]
    fn bivector_inner_product_is_gram_determinant(a in vector(), b in vector(), c in vector(), d in vector()) {
        let lhs = inner_biv(&wedge(&a, &b), &wedge(&c, &d));
        let rhs = inner4(&a, &c) * inner4(&b, &d) - inner4(&a, &d) * inner4(&b, &c);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn isometries_preserve_both_inner_products(iso in isometry(), a in vector(), b in vector()) {
        let (ia, ib) = (iso.apply_vector(&a), iso.apply_vector(&b));
        prop_assert!((inner4(&ia, &ib) - inner4(&a, &b)).abs() <= 1e-9 * (1.0 + inner4(&a, &b).abs()));
        let w = wedge(&a, &b);
        let iw = iso.apply_bivector(&w);
        prop_assert!(iw.max_abs_diff(&wedge(&ia, &ib)) <= 1e-9 * (1.0 + w.max_abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn frenet_gram_defect_is_small(kind in kind(), k0 in -3.0..3.0f64, k1 in -1.0..1.0f64) {
        let c = integrate_spherical(SphericalCurveSpec::new(kind, Curvature::Polynomial(Polynomial::new(vec![k0, k1])), (0.0, 1.0))).unwrap();
        prop_assert!(gram_defect(&c) <= 1e-8);
    }

    #[test]
    fn oracle_agrees_and_is_second_order(
        kind in kind(),
        phi in prop::collection::vec(-0.5..0.5f64, 1..4),
        f0 in 1.5..3.0f64,
        kappa in -3.0..3.0f64,
    ) {
        let s = surface(kind, phi, f0, kappa);
        let grid = small_grid(&s);
        let d1 = compare_laplacians(&s, &grid, 1e-3).unwrap().max_defect;
        prop_assert!(d1 <= 1e-4, "defect {d1}");
        let d4 = compare_laplacians(&s, &grid, 4e-3).unwrap().max_defect;
        let d2 = compare_laplacians(&s, &grid, 2e-3).unwrap().max_defect;
        // below ~1e-8 the defect is interpolation noise, not truncation
        if d2 > 1e-8 {
            let order = (d4 / d2).log2();
            prop_assert!((1.8..=2.2).contains(&order), "order {order} ({d4} / {d2})");
        }
    }

    #[test]
    fn verdict_is_isometry_invariant(kind in kind(), iso in isometry(), choice in 0usize..3) {
        let s = match (kind, choice) {
            (SurfaceKind::Hyperbolic, 0) => surface(kind, vec![std::f64::consts::FRAC_PI_2], 1.0, 2.0),
            (_, 0) | (_, 1) => surface(kind, vec![0.3], 1.0, 1.5),
            _ => surface(kind, vec![0.2, 0.3], 2.0, -1.0),
        };
        let moved = s.clone().with_isometry(iso);
        let tol = Tolerances::default();
        let a = classify_surface(&s, &small_grid(&s), &tol).unwrap();
        let b = classify_surface(&moved, &small_grid(&moved), &tol).unwrap();
        prop_assert_eq!(a.category, b.category);
        prop_assert_eq!(&a.matched_theorem_case, &b.matched_theorem_case);
        if let (Some(x), Some(y)) = (a.lambda_min, b.lambda_min) {
            prop_assert!((x - y).abs() <= 1e-8 * (1.0 + x.abs()));
        }
    }
}
