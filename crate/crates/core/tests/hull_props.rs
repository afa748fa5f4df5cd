use exppoly::hullgeo::{build_hull, hull_of_points};
use num_complex::Complex64;
use proptest::prelude::*;

fn cloud() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| Complex64::new(a, b)), 1..=20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn perimeter_equals_quadrature(pts in cloud()) {
        let h = build_hull(&pts, false);
        prop_assert!((h.circumference - h.circumference_by_quadrature(64)).abs() < 1e-9);
    }

    #[test]
    fn interior_points_do_not_change_support(pts in cloud(), t in 0.0f64..6.3) {
        let h = build_hull(&pts, false);
        let hv = hull_of_points(h.vertices.clone());
        prop_assert!((h.supporting_function(t) - hv.supporting_function(t)).abs() < 1e-12);
    }

    #[test]
    fn every_point_inside(pts in cloud()) {
        let h = build_hull(&pts, false);
        let v = &h.vertices;
        if v.len() >= 3 {
            for p in &h.points {
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    let cr = (b.re - a.re) * (p.im - a.im) - (b.im - a.im) * (p.re - a.re);
                    prop_assert!(cr >= -1e-12 * (b - a).norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn translation_invariance(pts in cloud(), dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
        let c = Complex64::new(dx, dy);
        let moved: Vec<_> = pts.iter().map(|p| p + c).collect();
        let a = build_hull(&pts, false).circumference;
        let b = build_hull(&moved, false).circumference;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn origin_monotonicity(pts in cloud()) {
        let h = build_hull(&pts, false);
        let h0 = build_hull(&pts, true);
        prop_assert!(h.circumference <= h0.circumference + 1e-12);
        if h.contains_origin() {
            prop_assert!((h.circumference - h0.circumference).abs() < 1e-9);
        } else {
            prop_assert!(h0.circumference > h.circumference);
        }
    }

    #[test]
    fn orthogonal_angles_sorted(pts in cloud()) {
        let h = build_hull(&pts, false);
        for w in h.orthogonal_angles.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        prop_assert!(h.orthogonal_angles.iter().all(|&t| (0.0..std::f64::consts::TAU).contains(&t)));
        if h.is_segment {
            prop_assert_eq!(h.orthogonal_angles.len(), 2);
            prop_assert!((h.orthogonal_angles[1] - h.orthogonal_angles[0] - std::f64::consts::PI).abs() < 1e-12);
        }
    }
}
