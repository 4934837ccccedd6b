//! Cylindrical and Cartesian charts, the region tags that select the
//! piecewise formulas of the map, and the square-torus family
//! `T_c = {|r - 1| + |z| = c}` that organises its fibers.

use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;

/// Domain point in the cylindrical chart.
///
/// `r >= 0`, `theta ∈ (-π, π]`, and `theta == 0` whenever `r == 0`.
/// Use [`CylPoint::new`] to get those invariants from arbitrary input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylPoint {
    pub r: f64,
    pub theta: f64,
    pub z: f64,
}

/// Cartesian point; image points are always Cartesian.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let tau = 2.0 * PI;
    let mut t = theta - tau * (theta / tau).floor();
    // t ∈ [0, 2π) up to rounding
    if t >= tau {
        t -= tau;
    }
    if t > PI {
        t -= tau;
    }
    if t <= -PI {
        t += tau;
    }
    t
}

impl CylPoint {
    /// Canonical point: negative `r` is reflected through the axis, the
    /// angle is wrapped, and the axis gets `theta = 0`.
    pub fn new(r: f64, theta: f64, z: f64) -> Self {
        let (r, theta) = if r < 0.0 { (-r, theta + PI) } else { (r, theta) };
        let theta = if r == 0.0 { 0.0 } else { wrap_angle(theta) };
        CylPoint { r, theta, z }
    }

    pub fn to_cart(self) -> CartPoint {
        cyl_to_cart(self)
    }
}

impl CartPoint {
    pub const ORIGIN: CartPoint = CartPoint { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        CartPoint { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        CartPoint { x: a[0], y: a[1], z: a[2] }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dist(self, other: CartPoint) -> f64 {
        CartPoint::new(self.x - other.x, self.y - other.y, self.z - other.z).norm()
    }

    pub fn to_cyl(self) -> CylPoint {
        cart_to_cyl(self)
    }
}

pub fn cyl_to_cart(p: CylPoint) -> CartPoint {
    CartPoint { x: p.r * p.theta.cos(), y: p.r * p.theta.sin(), z: p.z }
}

pub fn cart_to_cyl(p: CartPoint) -> CylPoint {
    let r = (p.x * p.x + p.y * p.y).sqrt();
    CylPoint::new(r, p.y.atan2(p.x), p.z)
}

/// Which closed-form expression of the map applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Square-torus formula; everywhere except the cut cone.
    Square,
    /// `r <= 1` and `r < |z|`: the slices clipped by the axis.
    Cut,
}

/// The three cases of the closed-form Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JacobianCase {
    /// `|z| <= r <= 1`
    Inner,
    /// `r <= min(1, |z|)`
    Cone,
    /// `r >= 1`
    Outer,
}

impl JacobianCase {
    pub fn name(self) -> &'static str {
        match self {
            JacobianCase::Inner => "INNER",
            JacobianCase::Cone => "CONE",
            JacobianCase::Outer => "OUTER",
        }
    }
}

/// Level `c = |r - 1| + |z|` of the square-torus family.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TorusLevel(pub f64);

impl TorusLevel {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn torus_level(p: CylPoint) -> TorusLevel {
    TorusLevel((p.r - 1.0).abs() + p.z.abs())
}

/// The interface `r = |z| <= 1` belongs to `Square`; both formulas agree there.
pub fn classify_region(p: CylPoint) -> Region {
    if p.r <= 1.0 && p.r < p.z.abs() {
        Region::Cut
    } else {
        Region::Square
    }
}

/// First match in the order Inner, Cone, Outer.
pub fn jacobian_case(p: CylPoint) -> JacobianCase {
    let az = p.z.abs();
    if az <= p.r && p.r <= 1.0 {
        JacobianCase::Inner
    } else if p.r <= 1.0 && p.r <= az {
        JacobianCase::Cone
    } else {
        JacobianCase::Outer
    }
}

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

/// Walk a polyline of `(r - 1, z)` corners by arc-length fraction `s ∈ [0, 1]`.
fn polyline(corners: &[[f64; 2]], lengths: &[f64], s: f64) -> [f64; 2] {
    if s >= 1.0 {
        return corners[corners.len() - 1];
    }
    let total: f64 = lengths.iter().sum();
    let mut target = s.clamp(0.0, 1.0) * total;
    for (i, &len) in lengths.iter().enumerate() {
        if target <= len || i + 1 == lengths.len() {
            let t = if len > 0.0 { (target / len).min(1.0) } else { 0.0 };
            return lerp(corners[i], corners[i + 1], t);
        }
        target -= len;
    }
    corners[corners.len() - 1]
}

/// Point of the cross-section `T_{c,θ}` at parameter `s ∈ [0, 1)`.
///
/// Counterclockwise in the `(r - 1, z)` chart, starting at the outer corner
/// `(1 + c, θ, 0)`. For `c > 1` the section is clipped at the axis: `s` in
/// `[0, 1/2]` runs from the outer corner to the upper clip point `(0, ·, c - 1)`
/// and `s` in `(1/2, 1)` runs from the lower clip point back to the outer
/// corner.
pub fn slice_param(c: f64, theta: f64, s: f64) -> CylPoint {
    let s = s - s.floor();
    if c > 1.0 {
        let t = if s <= 0.5 { 0.5 + s } else { s - 0.5 };
        return slice_arc(c, theta, t);
    }
    let corners = [[c, 0.0], [0.0, c], [-c, 0.0], [0.0, -c], [c, 0.0]];
    let edge = c * SQRT_2;
    let [u, z] = polyline(&corners, &[edge; 4], s);
    CylPoint::new(1.0 + u, theta, z)
}

/// The clipped section `T_{c,θ} ∩ {r >= 0}` for `c > 1` as an arc, `s ∈ [0, 1]`,
/// from `(0, ·, -(c - 1))` through the outer corner (at `s = 1/2`) to
/// `(0, ·, c - 1)`.
pub fn slice_arc(c: f64, theta: f64, s: f64) -> CylPoint {
    let h = c - 1.0;
    let corners = [[-1.0, -h], [0.0, -c], [c, 0.0], [0.0, c], [-1.0, h]];
    let lengths = [SQRT_2, c * SQRT_2, c * SQRT_2, SQRT_2];
    let [u, z] = polyline(&corners, &lengths, s);
    // Snap the clip points onto the axis exactly.
    let r = if s <= 0.0 || s >= 1.0 { 0.0 } else { (1.0 + u).max(0.0) };
    CylPoint::new(r, theta, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::FRAC_PI_2;

    fn close(a: CartPoint, b: CartPoint) -> bool {
        a.dist(b) < 1e-12
    }

    #[test]
    fn cyl_to_cart_examples() {
        assert!(close(cyl_to_cart(CylPoint::new(1.0, 0.0, 0.0)), CartPoint::new(1.0, 0.0, 0.0)));
        assert!(close(cyl_to_cart(CylPoint::new(1.0, FRAC_PI_2, 2.0)), CartPoint::new(0.0, 1.0, 2.0)));
        for th in [-3.0, 0.3, 2.9] {
            assert_eq!(cyl_to_cart(CylPoint::new(0.0, th, 5.0)), CartPoint::new(0.0, 0.0, 5.0));
        }
    }

    #[test]
    fn cart_to_cyl_examples() {
        let p = cart_to_cyl(CartPoint::new(-1.0, 0.0, 0.0));
        assert_eq!((p.r, p.theta, p.z), (1.0, PI, 0.0));
        // -0.0 in y would give atan2 = -π; the branch must still be +π.
        let p = cart_to_cyl(CartPoint::new(-1.0, -0.0, 0.0));
        assert_eq!(p.theta, PI);
        let p = cart_to_cyl(CartPoint::new(0.0, -1.0, 0.0));
        assert_abs_diff_eq!(p.theta, -FRAC_PI_2, epsilon = 1e-15);
        let p = cart_to_cyl(CartPoint::new(0.0, 0.0, 3.0));
        assert_eq!((p.r, p.theta, p.z), (0.0, 0.0, 3.0));
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(PI), PI);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-0.5), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(7.0), 7.0 - 2.0 * PI, epsilon = 1e-15);
    }

    #[test]
    fn torus_level_examples() {
        assert_eq!(torus_level(CylPoint::new(1.0, 0.7, 0.0)).value(), 0.0);
        assert_eq!(torus_level(CylPoint::new(0.5, 0.7, 0.5)).value(), 1.0);
        assert_eq!(torus_level(CylPoint::new(2.0, -1.0, 0.25)).value(), 1.25);
    }

    #[test]
    fn region_examples() {
        assert_eq!(classify_region(CylPoint::new(0.5, 1.0, 2.0)), Region::Cut);
        assert_eq!(classify_region(CylPoint::new(1.5, 1.0, 0.1)), Region::Square);
        assert_eq!(classify_region(CylPoint::new(0.5, 1.0, 0.5)), Region::Square);
        assert_eq!(classify_region(CylPoint::new(0.5, 1.0, -0.5)), Region::Square);
    }

    #[test]
    fn cut_implies_cone() {
        for &(r, z) in &[(0.5, 2.0), (0.0, 0.3), (1.0, -1.5), (0.2, -0.21)] {
            let p = CylPoint::new(r, 0.4, z);
            assert_eq!(classify_region(p), Region::Cut);
            assert_eq!(jacobian_case(p), JacobianCase::Cone);
        }
    }

    #[test]
    fn jacobian_case_tie_break() {
        // r = |z| <= 1 is both Inner and Cone; Inner wins.
        assert_eq!(jacobian_case(CylPoint::new(0.5, 1.0, 0.5)), JacobianCase::Inner);
        // r = 1, |z| > 1 is both Cone and Outer; Cone wins.
        assert_eq!(jacobian_case(CylPoint::new(1.0, 1.0, 2.0)), JacobianCase::Cone);
        // r = 1, |z| < 1 is both Inner and Outer; Inner wins.
        assert_eq!(jacobian_case(CylPoint::new(1.0, 1.0, 0.2)), JacobianCase::Inner);
        assert_eq!(jacobian_case(CylPoint::new(1.2, 1.0, 3.0)), JacobianCase::Outer);
    }

    #[test]
    fn slice_param_examples() {
        let p = slice_param(0.5, PI, 0.0);
        assert_eq!((p.r, p.theta, p.z), (1.5, PI, 0.0));
        // The clip point of level 2 sits on the axis at height 1; on the axis
        // the angle is canonicalised to 0.
        let p = slice_param(2.0, PI, 0.5);
        assert_abs_diff_eq!(p.r, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 1.0, epsilon = 1e-12);
        assert_eq!(p.theta, 0.0);
        for s in [0.0, 0.1, 0.5, 0.99] {
            let p = slice_param(0.0, 0.3, s);
            assert_eq!((p.r, p.z), (1.0, 0.0));
        }
    }

    #[test]
    fn slice_param_runs_counterclockwise() {
        // Quarter way round the square is the top corner (r - 1, z) = (0, c).
        let p = slice_param(0.8, 0.0, 0.25);
        assert_abs_diff_eq!(p.r, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.z, 0.8, epsilon = 1e-12);
        let p = slice_param(0.8, 0.0, 0.5);
        assert_abs_diff_eq!(p.r, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn slice_arc_endpoints() {
        let lo = slice_arc(2.5, 0.0, 0.0);
        let hi = slice_arc(2.5, 0.0, 1.0);
        assert_eq!((lo.r, lo.z), (0.0, -1.5));
        assert_eq!((hi.r, hi.z), (0.0, 1.5));
        let mid = slice_arc(2.5, 0.0, 0.5);
        assert_abs_diff_eq!(mid.r, 3.5, epsilon = 1e-12);
    }
}
