use proptest::prelude::*;

use h2r::bvp::{green_hat, multiplier_v, Side};
use h2r::catenoid::{height, integrate_profile, max_radius, neck_radius, profile_options, t_of_r};
use h2r::hyperbolic::{disk_to_halfplane, distance, halfplane_to_disk, horizontal_dilation, Point2H};
use h2r::jet::Jet2;
use h2r::parabolic::{convert_height, Gauge};
use h2r::tall::{d1, lambda_inverse, lambda_quadrature};
use h2r::verify::Tolerances;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_change_round_trips(r in 0.0f64..0.95, a in 0.0f64..std::f64::consts::TAU) {
        let z = Point2H::disk(r * a.cos(), r * a.sin()).unwrap();
        let back = halfplane_to_disk(disk_to_halfplane(z).unwrap()).unwrap();
        prop_assert!((back.u() - z.u()).abs() < 1e-12 && (back.v() - z.v()).abs() < 1e-12);
    }

    #[test]
    fn model_change_and_dilation_are_isometries(
        u1 in -3.0f64..3.0, v1 in 0.1f64..3.0, u2 in -3.0f64..3.0, v2 in 0.1f64..3.0, s in 0.2f64..5.0,
    ) {
        let a = Point2H::half_plane(u1, v1).unwrap();
        let b = Point2H::half_plane(u2, v2).unwrap();
        let d = distance(a, b).unwrap();
        let dd = distance(halfplane_to_disk(a).unwrap(), halfplane_to_disk(b).unwrap()).unwrap();
        let ds = distance(horizontal_dilation(a, s).unwrap(), horizontal_dilation(b, s).unwrap()).unwrap();
        prop_assert!((d - dd).abs() < 1e-9 * (1.0 + d));
        prop_assert!((d - ds).abs() < 1e-9 * (1.0 + d));
    }

    #[test]
    fn profile_stays_between_neck_and_max(k in 0.05f64..8.0) {
        let p = integrate_profile(k, 4.0, profile_options()).unwrap();
        prop_assert!(p.first_integral_drift() < 1e-9);
        let (lo, hi) = (neck_radius(k), max_radius(k));
        prop_assert!(p.samples.iter().all(|s| s.r >= lo - 1e-9 && s.r <= hi + 1e-9));
    }

    #[test]
    fn height_decreases_in_k(k in 1e-3f64..50.0, f in 1.01f64..3.0) {
        prop_assert!(height(k * f).unwrap() < height(k).unwrap());
    }

    #[test]
    fn time_to_reach_radius_increases(k in 0.05f64..5.0, a in 0.05f64..0.9, b in 0.05f64..0.9) {
        let (lo, a, b) = (neck_radius(k), a.min(b), a.max(b));
        prop_assume!(b - a > 1e-6);
        let (ra, rb) = (lo + (1.0 - lo) * a, lo + (1.0 - lo) * b);
        prop_assert!(t_of_r(k, ra).unwrap() < t_of_r(k, rb).unwrap());
    }

    #[test]
    fn tall_profile_inverse(d in 0.02f64..0.98, s in 0.01f64..0.99) {
        let x = d1(d).unwrap() + (1.0 - d1(d).unwrap()) * s;
        let t = lambda_quadrature(d, x).unwrap();
        prop_assert!((lambda_inverse(d, t).unwrap() - x).abs() < 1e-9);
    }

    #[test]
    fn gauge_conversion_round_trips(t in 0.0f64..std::f64::consts::PI) {
        let back = convert_height(convert_height(t, Gauge::Psi, Gauge::Fhat), Gauge::Fhat, Gauge::Psi);
        prop_assert!((back - t).abs() < 1e-15);
    }

    #[test]
    fn multipliers_and_green_function(xi in 0.01f64..20.0, t in 0.0f64..std::f64::consts::PI, tp in 0.0f64..std::f64::consts::PI) {
        let vp = multiplier_v(xi, t, Side::Plus).unwrap();
        let vm = multiplier_v(xi, std::f64::consts::PI - t, Side::Minus).unwrap();
        prop_assert!((vp - vm).abs() <= 1e-12 * (1.0 + vp.abs()));
        let g = green_hat(xi, t, tp).unwrap();
        prop_assert!((g - green_hat(xi, tp, t).unwrap()).abs() <= 1e-12 * (1.0 + g.abs()));
    }

    #[test]
    fn jet_product_rule(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (u, v) = (Jet2::var_u(a), Jet2::var_v(b));
        let p = u * v * u;
        prop_assert!((p.val - a * a * b).abs() < 1e-12);
        prop_assert!((p.du - 2.0 * a * b).abs() < 1e-12);
        prop_assert!((p.duu - 2.0 * b).abs() < 1e-12);
        prop_assert!((p.duv - 2.0 * a).abs() < 1e-12);
        prop_assert!(p.dvv.abs() < 1e-12);
    }

    #[test]
    fn tolerance_scaling_is_uniform(f in 0.01f64..100.0) {
        let base = Tolerances::default();
        let t = base.with_override(&f.to_string()).unwrap();
        prop_assert!((t.jacobi / base.jacobi - f).abs() < 1e-12 * f);
        prop_assert!((t.manufactured / base.manufactured - f).abs() < 1e-12 * f);
    }
}
