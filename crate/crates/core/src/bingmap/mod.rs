//! The monotone map `h: R^3 -> R^3` with circle, figure-eight and arc fibers.
//!
//! In cylindrical coordinates on the domain, with `a = |θ|/π`,
//! `β = (π - |θ|)θ/π²` and `c = |r - 1| + |z|`, the map is
//!
//! ```text
//! SQUARE:  h = (a·s - c,  a·z,  β·s)           s = r - 1 + |r - 1| + |z|
//! CUT:     h = ((a·r - 1)·w,  a·r·w·sgn z,  β·r·w)   w = |z| - r + 1
//! ```
//!
//! where CUT is the cone `r <= 1, r < |z|` and SQUARE is everything else.
//! Each square torus `T_c` is sent to a surface whose tip `-c e_x` absorbs the
//! whole `θ = 0` cross-section and, for `c <= 1`, the inner ring of the torus.
//!
//! The differential is reported in the orthonormal cylindrical frame,
//! `M = [∂_r h | r⁻¹ ∂_θ h | ∂_z h]`, so that `det M` and the singular values
//! of `M` are those of the Cartesian differential.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::coords::{cart_to_cyl, classify_region, cyl_to_cart, jacobian_case, torus_level, CartPoint, CylPoint, JacobianCase, Region};
use crate::linalg::Mat3;
use crate::map::SmoothMap;
use crate::{Error, Result};

mod fiber;
mod invert;
mod locus;

pub use fiber::{fiber, Curve, Fiber, FiberKind};
pub use invert::{invert, invert_near, invert_with, InvertOptions, LEVEL_PER_IMAGE_NORM};
pub use locus::{SingularLocus, StratumDistances};

/// Default distance from the non-smooth strata required by derivative-based
/// operations.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// `sgn` with `sgn(0) = 0`.
#[inline]
pub fn sgn(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
fn angular(theta: f64) -> (f64, f64, f64) {
    let a = theta.abs() / PI;
    let beta = (PI - theta.abs()) * theta / (PI * PI);
    let dbeta = (PI - 2.0 * theta.abs()) / (PI * PI);
    (a, beta, dbeta)
}

/// The SQUARE formula, applied regardless of region.
pub fn eval_square(p: CylPoint) -> CartPoint {
    let (a, beta, _) = angular(p.theta);
    let u = p.r - 1.0;
    let c = u.abs() + p.z.abs();
    let s = u + c;
    CartPoint::new(a * s - c, a * p.z, beta * s)
}

/// The CUT formula, applied regardless of region.
pub fn eval_cut(p: CylPoint) -> CartPoint {
    let (a, beta, _) = angular(p.theta);
    let w = p.z.abs() - p.r + 1.0;
    CartPoint::new((a * p.r - 1.0) * w, a * p.r * w * sgn(p.z), beta * p.r * w)
}

/// `h(p)`.
pub fn eval(p: CylPoint) -> CartPoint {
    match classify_region(p) {
        Region::Square => eval_square(p),
        Region::Cut => eval_cut(p),
    }
}

/// Partial derivatives `[∂_r h | ∂_θ h | ∂_z h]` (columns) with the `sgn(0) = 0`
/// convention on the kinks. Not rescaled.
pub fn coordinate_derivatives(p: CylPoint) -> Mat3 {
    let (a, beta, dbeta) = angular(p.theta);
    let st = sgn(p.theta);
    let sz = sgn(p.z);
    let az = p.z.abs();
    let r = p.r;
    match classify_region(p) {
        Region::Square => {
            let u = r - 1.0;
            let su = sgn(u);
            let s = u + u.abs() + az;
            Mat3([[a + (a - 1.0) * su, st / PI * s, (a - 1.0) * sz], [0.0, st / PI * p.z, a], [beta * (su + 1.0), dbeta * s, beta * sz]])
        }
        Region::Cut => {
            let w = az - r + 1.0;
            let g = az - 2.0 * r + 1.0;
            Mat3([
                [a * g + 1.0, st / PI * r * w, (a * r - 1.0) * sz],
                [a * g * sz, st / PI * r * w * sz, a * r],
                [beta * g, dbeta * r * w, beta * r * sz],
            ])
        }
    }
}

/// Frame differential without the smoothness check. Defined almost
/// everywhere; on the kinks it is whatever the `sgn(0) = 0` convention gives.
pub fn frame_differential_ae(p: CylPoint) -> Mat3 {
    let mut m = coordinate_derivatives(p);
    let inv_r = if p.r > 0.0 { 1.0 / p.r } else { 0.0 };
    for i in 0..3 {
        m.0[i][1] *= inv_r;
    }
    m
}

/// `M = [∂_r h | r⁻¹ ∂_θ h | ∂_z h]`, refused within `margin` of a kink.
pub fn frame_differential(p: CylPoint, margin: f64) -> Result<Mat3> {
    SingularLocus::check_smooth(p, margin)?;
    Ok(frame_differential_ae(p))
}

/// Columns `e_r, e_θ, e_z` of the cylindrical frame at `p`.
pub fn frame_rotation(p: CylPoint) -> Mat3 {
    let (s, c) = p.theta.sin_cos();
    Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// Cartesian differential `Dh = M Rᵀ`, almost everywhere.
pub fn cartesian_differential_ae(p: CylPoint) -> Mat3 {
    frame_differential_ae(p) * frame_rotation(p).transpose()
}

/// Closed-form Jacobian determinant by case, with the Inner < Cone < Outer
/// tie-break on the case boundaries.
pub fn jacobian(p: CylPoint) -> f64 {
    let t = p.theta.abs();
    let az = p.z.abs();
    let pi3 = PI * PI * PI;
    match jacobian_case(p) {
        JacobianCase::Inner => {
            if az == 0.0 {
                0.0
            } else {
                az / p.r * t * t / pi3
            }
        }
        JacobianCase::Cone => {
            let w = 1.0 + az - p.r;
            w * w * t * t / pi3
        }
        JacobianCase::Outer => {
            let poly_r = 4.0 * t * t - 4.0 * PI * t + 2.0 * PI * PI;
            let poly_z = 2.0 * t * t - 3.0 * PI * t + 2.0 * PI * PI;
            t / (PI * PI * PI * PI * p.r) * (poly_r * (p.r - 1.0) + poly_z * az)
        }
    }
}

/// Outer distortion `‖M‖³ / J`.
pub fn distortion(p: CylPoint, margin: f64) -> Result<f64> {
    let j = jacobian(p);
    if j <= 0.0 {
        return Err(Error::DegenerateJacobian);
    }
    let m = frame_differential(p, margin)?;
    let n = m.spectral_norm();
    Ok(n * n * n / j)
}

/// Distortion without the smoothness check; `None` where the Jacobian
/// vanishes.
pub fn distortion_ae(p: CylPoint) -> Option<f64> {
    let j = jacobian(p);
    if j <= 0.0 || !j.is_finite() {
        return None;
    }
    let n = frame_differential_ae(p).spectral_norm();
    Some(n * n * n / j)
}

/// Value, differential, Jacobian and distortion at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapJet {
    pub value: CartPoint,
    pub frame: Mat3,
    pub jac: f64,
    pub dist: f64,
}

pub fn jet(p: CylPoint, margin: f64) -> Result<MapJet> {
    let frame = frame_differential(p, margin)?;
    let jac = jacobian(p);
    if jac <= 0.0 {
        return Err(Error::DegenerateJacobian);
    }
    let n = frame.spectral_norm();
    Ok(MapJet { value: eval(p), frame, jac, dist: n * n * n / jac })
}

/// Central differences of `h` along the Cartesian axes, rotated into the
/// cylindrical frame. Independent of [`coordinate_derivatives`].
pub fn fd_differential(p: CylPoint, step: f64, margin: f64) -> Result<Mat3> {
    if !(step > 0.0) {
        return Err(Error::OutOfRange("finite-difference step must be positive"));
    }
    SingularLocus::check_smooth(p, margin.max(step))?;
    let x0 = cyl_to_cart(p).to_array();
    let mut cols = [[0.0; 3]; 3];
    for (j, col) in cols.iter_mut().enumerate() {
        let mut xp = x0;
        let mut xm = x0;
        xp[j] += step;
        xm[j] -= step;
        let hp = eval(cart_to_cyl(CartPoint::from_array(xp)));
        let hm = eval(cart_to_cyl(CartPoint::from_array(xm)));
        *col = [(hp.x - hm.x) / (2.0 * step), (hp.y - hm.y) / (2.0 * step), (hp.z - hm.z) / (2.0 * step)];
    }
    let dh = Mat3::from_cols(cols[0], cols[1], cols[2]);
    Ok(dh * frame_rotation(p))
}

/// `h` as a [`SmoothMap`] on Cartesian space.
#[derive(Debug, Clone, Copy, Default)]
pub struct BingMap;

impl SmoothMap for BingMap {
    fn apply(&self, x: CartPoint) -> CartPoint {
        eval(cart_to_cyl(x))
    }

    fn differential(&self, x: CartPoint) -> Mat3 {
        cartesian_differential_ae(cart_to_cyl(x))
    }

    fn jacobian(&self, x: CartPoint) -> f64 {
        jacobian(cart_to_cyl(x))
    }

    /// `‖Dh‖ <= 2 + 2c` up to torus level `c`; the level is
    /// `√2`-Lipschitz.
    fn lipschitz_near(&self, x: CartPoint, radius: f64) -> Option<f64> {
        let c = torus_level(cart_to_cyl(x)).value() + core::f64::consts::SQRT_2 * radius;
        Some(2.0 + 2.0 * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::FRAC_PI_2;

    fn assert_point(a: CartPoint, b: [f64; 3], tol: f64) {
        assert!(a.dist(CartPoint::from_array(b)) < tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn eval_examples() {
        for th in [-2.0, 0.0, 1.0, PI] {
            assert_point(eval(CylPoint::new(1.0, th, 0.0)), [0.0, 0.0, 0.0], 1e-15);
        }
        // θ = 0 slice goes to the tip -c e_x.
        for &(r, z) in &[(0.5, 0.2), (1.3, -0.4), (1.0, 1.0), (0.25, 0.5)] {
            let c = (r - 1.0f64).abs() + z.abs();
            assert_point(eval(CylPoint::new(r, 0.0, z)), [-c, 0.0, 0.0], 1e-15);
        }
        assert_point(eval(CylPoint::new(1.2, FRAC_PI_2, 0.1)), [-0.05, 0.05, 0.125], 1e-15);
        assert_point(eval(CylPoint::new(0.5, PI, 2.0)), [-1.25, 1.25, 0.0], 1e-15);
    }

    #[test]
    fn axis_value_is_angle_free() {
        for z in [-3.0, -0.5, 0.0, 0.7, 2.0] {
            let expect = [-(z.abs() + 1.0), 0.0, 0.0];
            // Hit both formulas directly: the canonical point and raw angles.
            for th in [0.0, 0.4, -2.5, PI] {
                let raw = CylPoint { r: 0.0, theta: th, z };
                assert_point(eval(raw), expect, 0.0 + 1e-15);
            }
        }
    }

    #[test]
    fn frame_example_inner() {
        let p = CylPoint::new(0.9, PI, 0.4);
        let m = frame_differential(p, DEFAULT_MARGIN).unwrap_err();
        // θ = π is a kink of |θ|; the matrix is still available a.e.-style.
        assert!(matches!(m, Error::SingularPoint { .. }));
        let m = frame_differential_ae(p);
        let a = 0.4 / (0.9 * PI);
        let expect = Mat3::from_cols([1.0, 0.0, 0.0], [a, a, -a], [0.0, 1.0, 0.0]);
        assert!((m - expect).max_abs() < 1e-15, "{m:?}");
        assert_abs_diff_eq!(m.det(), a, epsilon = 1e-15);
        assert_abs_diff_eq!(jacobian(p), a, epsilon = 1e-15);
    }

    #[test]
    fn jacobian_examples() {
        assert_abs_diff_eq!(jacobian(CylPoint::new(0.8, FRAC_PI_2, 0.4)), 1.0 / (8.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(jacobian(CylPoint::new(0.5, FRAC_PI_2, 2.0)), 25.0 / (16.0 * PI), epsilon = 1e-14);
        assert_abs_diff_eq!(jacobian(CylPoint::new(2.0, FRAC_PI_2, 0.0)), 1.0 / (4.0 * PI), epsilon = 1e-15);
    }

    #[test]
    fn jacobian_vanishes_on_degeneracy_set() {
        assert_eq!(jacobian(CylPoint::new(0.7, 0.0, 0.3)), 0.0);
        assert_eq!(jacobian(CylPoint::new(1.7, 0.0, -0.3)), 0.0);
        assert_eq!(jacobian(CylPoint::new(0.3, 0.0, 2.0)), 0.0);
        assert_eq!(jacobian(CylPoint::new(0.5, 1.0, 0.0)), 0.0);
        assert_eq!(jacobian(CylPoint::new(0.0, 1.0, 0.0)), 0.0);
        assert_eq!(jacobian(CylPoint::new(1.0, 2.0, 0.0)), 0.0);
    }

    #[test]
    fn fd_matches_analytic_example() {
        let p = CylPoint::new(1.2, FRAC_PI_2, 0.1);
        let m = frame_differential(p, DEFAULT_MARGIN).unwrap();
        let fd = fd_differential(p, 1e-5, DEFAULT_MARGIN).unwrap();
        assert!((m - fd).max_abs() < 1e-6 * m.max_abs(), "{m:?}\n{fd:?}");
    }

    #[test]
    fn fd_is_second_order() {
        let p = CylPoint::new(1.3, 0.8, 0.35);
        let m = frame_differential(p, DEFAULT_MARGIN).unwrap();
        // Use the quadratic-heavy CUT region too.
        let q = CylPoint::new(0.4, -2.0, 0.9);
        let mq = frame_differential(q, DEFAULT_MARGIN).unwrap();
        for (pt, exact) in [(p, m), (q, mq)] {
            let e1 = (fd_differential(pt, 2e-2, 0.0).unwrap() - exact).max_abs();
            let e2 = (fd_differential(pt, 1e-2, 0.0).unwrap() - exact).max_abs();
            // Cubic terms in θ make the error O(step²); allow pure rounding when tiny.
            assert!(e2 < 1e-12 || (e1 / e2 > 3.0 && e1 / e2 < 5.0), "{e1} {e2}");
        }
    }

    #[test]
    fn distortion_is_at_least_one() {
        let p = CylPoint::new(0.9, 2.0, 0.4);
        let k = distortion(p, DEFAULT_MARGIN).unwrap();
        assert!(k >= 1.0);
        assert_eq!(distortion(CylPoint::new(0.9, 0.0, 0.4), 0.0), Err(Error::DegenerateJacobian));
    }

    #[test]
    fn distortion_example_matches_singular_values() {
        // Columns (1,0,0), a(1,1,-1), (0,1,0): MᵀM = [[1, a, 0], [a, 3a², a], [0, a, 1]].
        // Its eigenvalues solve (1-λ)((1-λ)(3a²-λ) - 2a²) = 0.
        let a = 0.4 / (0.9 * PI);
        let tr = 1.0 + 3.0 * a * a;
        let det = 3.0 * a * a - 2.0 * a * a;
        let top = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
        let sigma = top.max(1.0).sqrt();
        let expect = sigma.powi(3) / a;
        let m = frame_differential_ae(CylPoint::new(0.9, PI, 0.4));
        let got = m.spectral_norm().powi(3) / jacobian(CylPoint::new(0.9, PI, 0.4));
        assert_abs_diff_eq!(got, expect, epsilon = 1e-10 * expect);
    }

    #[test]
    fn distortion_blows_up_like_inverse_theta_squared() {
        let mut prev = None;
        for th in [1e-2, 1e-3, 1e-4] {
            let k = distortion(CylPoint::new(0.8, th, 0.4), 0.0).unwrap();
            let scaled = k * th * th;
            if let Some(prev) = prev {
                let rel: f64 = (scaled - prev) / prev;
                assert!(rel.abs() < 1e-2, "{scaled} {prev}");
            }
            prev = Some(scaled);
        }
        assert!(prev.unwrap() > 0.0);
    }

    #[test]
    fn smooth_map_trait_agrees() {
        let p = CylPoint::new(1.4, -0.9, 0.3);
        let x = cyl_to_cart(p);
        let dh = BingMap.differential(x);
        assert_abs_diff_eq!(dh.det(), jacobian(p), epsilon = 1e-12);
        assert!(BingMap.apply(x).dist(eval(p)) < 1e-14);
    }
}
