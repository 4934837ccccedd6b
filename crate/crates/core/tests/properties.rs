use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use fdlab_core::bingmap::{eval, eval_cut, eval_square, invert, SingularLocus};
use fdlab_core::coords::{cart_to_cyl, cyl_to_cart, slice_arc, slice_param, torus_level};
use fdlab_core::exterior::{pullback_at, pushforward_at, wedge_power, KCovector};
use fdlab_core::thresholds::{critical_p, fig1_table};
use fdlab_core::{CartPoint, CylPoint, Mat3};

fn cyl() -> impl Strategy<Value = CylPoint> {
    (0.0..3.0f64, -PI..PI, -2.0..2.0f64).prop_map(|(r, t, z)| CylPoint::new(r, t, z))
}

fn well_conditioned() -> impl Strategy<Value = Mat3> {
    prop::array::uniform3(prop::array::uniform3(-0.5..0.5f64)).prop_map(|rows| {
        let mut m = Mat3(rows);
        for i in 0..3 {
            m.0[i][i] += 2.0;
        }
        m
    })
}

fn close(a: CartPoint, b: CartPoint, tol: f64) -> bool {
    a.dist(b) <= tol * (1.0 + a.norm())
}

/// Outer-region inverse by elimination: for `r > 1`, `θ ∈ (0, π)` the
/// coordinates `u = r - 1` and `z` are linear in `h` once `θ` is fixed, leaving
/// one scalar equation in `θ`. Every root is returned.
fn outer_preimages(y: CartPoint) -> Vec<CylPoint> {
    let parts = |t: f64| {
        let a = t / PI;
        let beta = (PI - t) * t / (PI * PI);
        let z = y.y / a;
        let u = (y.z / beta - z.abs()) / 2.0;
        (a, u, z)
    };
    let g = |t: f64| {
        let (a, u, z) = parts(t);
        a * (2.0 * u + z.abs()) - (u + z.abs()) - y.x
    };
    let n = 4000;
    let (lo, hi) = (1e-3, PI - 1e-3);
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        if g(a).signum() == g(b).signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(a).signum() == g(m).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        let t = 0.5 * (a + b);
        let (_, u, z) = parts(t);
        if u > 0.0 {
            roots.push(CylPoint::new(1.0 + u, t, z));
        }
    }
    roots
}

proptest! {
    #[test]
    fn angle_reflection_flips_third_component(p in cyl()) {
        let a = eval(p);
        let b = eval(CylPoint::new(p.r, -p.theta, p.z));
        prop_assert!(close(b, CartPoint::new(a.x, a.y, -a.z), 1e-14));
    }

    #[test]
    fn height_reflection_flips_second_component(p in cyl()) {
        let a = eval(p);
        let b = eval(CylPoint::new(p.r, p.theta, -p.z));
        prop_assert!(close(b, CartPoint::new(a.x, -a.y, a.z), 1e-14));
    }

    #[test]
    fn axis_image_ignores_angle(z in -2.0..2.0f64, t in -PI..PI) {
        let on_axis = eval(CylPoint { r: 0.0, theta: t, z });
        let expected = if z == 0.0 { -1.0 } else { -(z.abs() + 1.0) };
        prop_assert!(close(on_axis, CartPoint::new(expected, 0.0, 0.0), 1e-14));
    }

    #[test]
    fn zero_angle_goes_to_tip(r in 0.0..3.0f64, z in -2.0..2.0f64) {
        let p = CylPoint::new(r, 0.0, z);
        let tip = CartPoint::new(-torus_level(p).value(), 0.0, 0.0);
        prop_assert!(close(eval(p), tip, 1e-14));
    }

    #[test]
    fn formulas_agree_on_interface(r in 0.0..1.0f64, t in -PI..PI, up in any::<bool>()) {
        let p = CylPoint::new(r, t, if up { r } else { -r });
        prop_assert!(close(eval_square(p), eval_cut(p), 1e-14));
    }

    #[test]
    fn cartesian_round_trip(p in cyl()) {
        let back = cart_to_cyl(cyl_to_cart(p));
        prop_assert!(close(cyl_to_cart(back), cyl_to_cart(p), 1e-14));
        prop_assert!((back.r - p.r).abs() < 1e-14);
    }

    #[test]
    fn slices_stay_on_their_level(c in 0.01..3.0f64, t in -PI..PI, s in 0.0..1.0f64) {
        let p = slice_param(c, t, s);
        prop_assert!((torus_level(p).value() - c).abs() < 1e-12);
        if c > 1.0 {
            prop_assert!((torus_level(slice_arc(c, t, s)).value() - c).abs() < 1e-12);
        }
    }

    #[test]
    fn wedge_power_is_functorial(a in well_conditioned(), b in well_conditioned(), k in 0usize..=3) {
        let lhs = wedge_power(&(a * b), k).unwrap();
        let rhs = wedge_power(&a, k).unwrap().mul(&wedge_power(&b, k).unwrap());
        prop_assert!((lhs.m - rhs.m).max_abs() < 1e-12 * (1.0 + lhs.m.max_abs()));
    }

    #[test]
    fn second_wedge_determinant_is_squared(a in well_conditioned()) {
        let d = a.det();
        let w = wedge_power(&a, 2).unwrap().det();
        prop_assert!((w - d * d).abs() < 1e-12 * d * d);
    }

    #[test]
    fn pushforward_undoes_pullback(a in well_conditioned(), k in 0usize..=3, c in prop::array::uniform3(-1.0..1.0f64)) {
        let w = KCovector::new(k, &c[..fdlab_core::exterior::basis_len(k)]).unwrap();
        let back = pushforward_at(&a, &pullback_at(&a, &w)).unwrap();
        for (x, y) in back.coeffs().iter().zip(w.coeffs()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn threshold_table_is_dual(n in 3u32..40) {
        for k in 1..n {
            prop_assert_eq!(critical_p(n, k).unwrap(), critical_p(n, n - k).unwrap());
        }
    }

    #[test]
    fn thresholds_fall_towards_the_middle(n in 3u32..40) {
        for k in 1..n / 2 {
            prop_assert!(critical_p(n, k).unwrap() >= critical_p(n, k + 1).unwrap());
        }
    }

    #[test]
    fn thresholds_grow_with_dimension(n in 3u32..40) {
        for k in 1..(n / 2).max(2) {
            prop_assert!(critical_p(n + 1, k).unwrap() >= critical_p(n, k).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inversion_matches_elimination(r in 1.1..2.5f64, t in 0.2..(PI - 0.2), z in -1.0..1.0f64) {
        let p = CylPoint::new(r, t, z);
        prop_assume!(SingularLocus::nonsmooth_distance(p) > 0.05);
        let y = eval(p);
        let roots = outer_preimages(y);
        prop_assert_eq!(roots.len(), 1, "{:?}", roots);
        let q = invert(y, 1e-12).unwrap();
        prop_assert!(cyl_to_cart(q).dist(cyl_to_cart(roots[0])) < 1e-7);
        prop_assert!(cyl_to_cart(q).dist(cyl_to_cart(p)) < 1e-7);
    }
}

#[test]
fn table_rows_have_full_width() {
    let t = fig1_table(12).unwrap();
    for row in &t.rows {
        assert_eq!(row.values.len() as u32, row.n - 1);
    }
}
