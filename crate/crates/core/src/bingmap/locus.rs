use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::coords::CylPoint;
use crate::{Error, Result};

/// Exact Euclidean distances from a point to each stratum where `h` is not
/// smooth, plus the set where its Jacobian vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StratumDistances {
    /// Half-plane `θ = 0`.
    pub theta_zero: f64,
    /// Half-plane `θ = π`.
    pub theta_pi: f64,
    /// Plane `z = 0`.
    pub plane_z: f64,
    /// Cylinder `r = 1`.
    pub cylinder: f64,
    /// Cone `r = |z|, r <= 1`.
    pub cone: f64,
    /// The `z`-axis, where the cylindrical frame itself degenerates.
    pub axis: f64,
}

impl StratumDistances {
    pub fn min(&self) -> (f64, &'static str) {
        let all = [
            (self.theta_zero, "half-plane theta=0"),
            (self.theta_pi, "half-plane theta=pi"),
            (self.plane_z, "plane z=0"),
            (self.cylinder, "cylinder r=1"),
            (self.cone, "cone r=|z|<=1"),
            (self.axis, "axis r=0"),
        ];
        all.into_iter().fold((f64::INFINITY, ""), |acc, x| if x.0 < acc.0 { x } else { acc })
    }
}

/// The non-smooth and degenerate sets of `h`.
///
/// Non-injectivity happens exactly on the disk `{z = 0, r <= 1}` and the
/// half-plane `{θ = 0}`; the Jacobian vanishes on the same union.
#[derive(Debug, Clone, Copy, Default)]
pub struct SingularLocus;

impl SingularLocus {
    pub fn distances(p: CylPoint) -> StratumDistances {
        StratumDistances {
            theta_zero: half_plane_distance(p, 0.0),
            theta_pi: half_plane_distance(p, core::f64::consts::PI),
            plane_z: p.z.abs(),
            cylinder: (p.r - 1.0).abs(),
            cone: cone_distance(p),
            axis: p.r,
        }
    }

    /// Distance to the Jacobian degeneracy set `{θ = 0} ∪ {z = 0, r <= 1}`.
    pub fn degeneracy_distance(p: CylPoint) -> f64 {
        half_plane_distance(p, 0.0).min(disk_distance(p))
    }

    /// Smallest distance to any non-smooth stratum.
    pub fn nonsmooth_distance(p: CylPoint) -> f64 {
        Self::distances(p).min().0
    }

    pub fn check_smooth(p: CylPoint, margin: f64) -> Result<()> {
        let (d, stratum) = Self::distances(p).min();
        if d <= margin {
            Err(Error::SingularPoint { stratum, margin })
        } else {
            Ok(())
        }
    }
}

/// Distance to the half-plane `{θ = phi, r >= 0}`.
fn half_plane_distance(p: CylPoint, phi: f64) -> f64 {
    let delta = crate::coords::wrap_angle(p.theta - phi).abs();
    if delta <= FRAC_PI_2 {
        p.r * delta.sin()
    } else {
        p.r
    }
}

/// Distance to the unit disk `{z = 0, r <= 1}`.
pub(crate) fn disk_distance(p: CylPoint) -> f64 {
    if p.r <= 1.0 {
        p.z.abs()
    } else {
        ((p.r - 1.0).powi(2) + p.z * p.z).sqrt()
    }
}

/// The cone is a surface of revolution, so the distance is the planar
/// distance in the meridian half-plane to the segment from `(0, 0)` to `(1, 1)`
/// (folded by `|z|`).
fn cone_distance(p: CylPoint) -> f64 {
    let (r, z) = (p.r, p.z.abs());
    let t = (0.5 * (r + z)).clamp(0.0, 1.0);
    ((r - t).powi(2) + (z - t).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distances_match_brute_force_sampling() {
        // Compare against dense sampling of each stratum in Cartesian space.
        let p = CylPoint::new(0.7, 0.4, -0.25);
        let x = crate::coords::cyl_to_cart(p).to_array();
        let d = SingularLocus::distances(p);

        let mut best_cone: f64 = f64::INFINITY;
        let mut best_half: f64 = f64::INFINITY;
        let n = 400;
        for i in 0..=n {
            let rr = i as f64 / n as f64;
            for j in 0..n {
                let th = -core::f64::consts::PI + 2.0 * core::f64::consts::PI * j as f64 / n as f64;
                for zs in [-1.0, 1.0] {
                    let q = [rr * th.cos(), rr * th.sin(), zs * rr];
                    let dd = ((q[0] - x[0]).powi(2) + (q[1] - x[1]).powi(2) + (q[2] - x[2]).powi(2)).sqrt();
                    best_cone = best_cone.min(dd);
                }
            }
            for k in 0..=n {
                let zz = -2.0 + 4.0 * k as f64 / n as f64;
                let rr2 = 2.0 * rr;
                let q = [rr2, 0.0, zz];
                let dd = ((q[0] - x[0]).powi(2) + (q[1] - x[1]).powi(2) + (q[2] - x[2]).powi(2)).sqrt();
                best_half = best_half.min(dd);
            }
        }
        assert_abs_diff_eq!(d.cone, best_cone, epsilon = 1e-2);
        assert_abs_diff_eq!(d.theta_zero, best_half, epsilon = 1e-2);
        assert_abs_diff_eq!(d.plane_z, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(d.cylinder, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn half_plane_behind_the_axis() {
        let p = CylPoint::new(2.0, 3.0, 0.0);
        assert_abs_diff_eq!(SingularLocus::distances(p).theta_zero, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(SingularLocus::distances(p).theta_pi, 2.0 * (core::f64::consts::PI - 3.0).sin(), epsilon = 1e-15);
    }

    #[test]
    fn check_smooth_reports_stratum() {
        let err = SingularLocus::check_smooth(CylPoint::new(1.0005, 1.0, 0.5), 1e-3).unwrap_err();
        assert_eq!(err, Error::SingularPoint { stratum: "cylinder r=1", margin: 1e-3 });
        assert!(SingularLocus::check_smooth(CylPoint::new(1.2, 1.0, 0.5), 1e-3).is_ok());
    }
}
