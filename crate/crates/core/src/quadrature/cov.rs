use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bingmap::{invert_near, invert_with, BingMap, InvertOptions};
use crate::coords::{cyl_to_cart, CartPoint};
use crate::map::SmoothMap;
use crate::sampling::{mc_cart, CartBox};
use crate::{Error, Result};

/// Boundary points inverted to bound the preimage of a ball.
pub const SPHERE_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovReport {
    /// `∫_{f⁻¹B} J_f`.
    pub integral: f64,
    pub stderr: f64,
    /// `|B|`.
    pub ball_volume: f64,
    pub ratio: f64,
    pub bbox: CartBox,
    pub pass: bool,
}

/// Distance from `y` to the half-line `{-t e_x : t >= 0}`.
pub fn half_line_distance(y: CartPoint) -> f64 {
    if y.x <= 0.0 {
        (y.y * y.y + y.z * y.z).sqrt()
    } else {
        y.norm()
    }
}

/// Monte Carlo `∫_{bbox} 1[|f(x) - y| < ρ] J_f(x) dx` against `(4/3)π ρ³`;
/// `bbox` must contain `f⁻¹ B(y, ρ)`.
pub fn change_of_variables_in_box<M: SmoothMap + ?Sized>(
    map: &M,
    y: CartPoint,
    radius: f64,
    bbox: CartBox,
    n: usize,
    seed: u64,
) -> Result<CovReport> {
    if !(radius > 0.0) {
        return Err(Error::OutOfRange("radius must be positive"));
    }
    let [(integral, stderr)] = mc_cart(&bbox, n, seed, |x| if map.apply(x).dist(y) < radius { [map.jacobian(x).max(0.0)] } else { [0.0] })?;
    let ball_volume = 4.0 / 3.0 * PI * radius * radius * radius;
    Ok(CovReport {
        integral,
        stderr,
        ball_volume,
        ratio: integral / ball_volume,
        bbox,
        pass: (integral - ball_volume).abs() <= 3.0 * stderr + 0.01 * ball_volume,
    })
}

/// Change of variables for `h` on a ball off the non-injective image.
/// The preimage box comes from inverting points of the bounding sphere.
pub fn change_of_variables_check(y: CartPoint, radius: f64, n: usize, seed: u64) -> Result<CovReport> {
    if !(radius > 0.0) {
        return Err(Error::OutOfRange("radius must be positive"));
    }
    if half_line_distance(y) < 2.0 * radius {
        return Err(Error::OnNonInjectiveSet);
    }
    let opts = InvertOptions::default();
    let center = invert_with(y, &opts)?;
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut pts: Vec<CartPoint> = Vec::with_capacity(SPHERE_POINTS + 1);
    pts.push(cyl_to_cart(center));
    for i in 0..SPHERE_POINTS {
        let zc = 1.0 - 2.0 * (i as f64 + 0.5) / SPHERE_POINTS as f64;
        let rho = (1.0 - zc * zc).sqrt();
        let phi = golden * i as f64;
        let target = CartPoint::new(y.x + radius * rho * phi.cos(), y.y + radius * rho * phi.sin(), y.z + radius * zc);
        pts.push(cyl_to_cart(invert_near(target, center, &opts)?));
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &pts {
        let a = p.to_array();
        for k in 0..3 {
            lo[k] = lo[k].min(a[k]);
            hi[k] = hi[k].max(a[k]);
        }
    }
    let pad: [f64; 3] = core::array::from_fn(|k| 0.1 * (hi[k] - lo[k]) + 1e-3);
    let bbox = CartBox::new(core::array::from_fn(|k| lo[k] - pad[k]), core::array::from_fn(|k| hi[k] + pad[k]))?;
    change_of_variables_in_box(&BingMap, y, radius, bbox, n, seed)
}
