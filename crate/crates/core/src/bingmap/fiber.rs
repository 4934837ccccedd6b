use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::invert::{invert_with, InvertOptions};
use crate::coords::{cyl_to_cart, slice_arc, slice_param, wrap_angle, CartPoint, CylPoint};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiberKind {
    Point,
    Circle,
    FigureEight,
    Arc,
}

impl FiberKind {
    pub fn name(self) -> &'static str {
        match self {
            FiberKind::Point => "POINT",
            FiberKind::Circle => "CIRCLE",
            FiberKind::FigureEight => "FIGURE_EIGHT",
            FiberKind::Arc => "ARC",
        }
    }
}

/// A closed-form curve `[0, 1] -> CylPoint`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    /// Degenerate curve.
    Point(CylPoint),
    /// Horizontal circle `{r = radius, z = height}`.
    Ring { radius: f64, height: f64 },
    /// Closed cross-section `T_{c,θ}` for `c <= 1`.
    Slice { level: f64, theta: f64 },
    /// Clipped cross-section `T_{c,θ} ∩ {r >= 0}` for `c > 1`.
    SliceArc { level: f64, theta: f64 },
}

impl Curve {
    pub fn at(&self, s: f64) -> CylPoint {
        match *self {
            Curve::Point(p) => p,
            Curve::Ring { radius, height } => CylPoint::new(radius, wrap_angle(2.0 * PI * s), height),
            Curve::Slice { level, theta } => slice_param(level, theta, s),
            Curve::SliceArc { level, theta } => slice_arc(level, theta, s.clamp(0.0, 1.0)),
        }
    }

    /// `n` samples; closed curves skip the repeated endpoint.
    pub fn sample(&self, n: usize) -> Vec<CylPoint> {
        let closed = matches!(self, Curve::Ring { .. } | Curve::Slice { .. });
        let denom = if closed { n as f64 } else { (n.max(2) - 1) as f64 };
        (0..n).map(|i| self.at(i as f64 / denom)).collect()
    }

    pub fn endpoints(&self) -> Option<(CylPoint, CylPoint)> {
        match self {
            Curve::SliceArc { .. } => Some((self.at(0.0), self.at(1.0))),
            _ => None,
        }
    }
}

/// The preimage `h⁻¹{target}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub kind: FiberKind,
    pub components: Vec<Curve>,
    /// Common point of the two loops of a figure-eight.
    pub wedge: Option<CartPoint>,
    pub target: CartPoint,
}

impl Fiber {
    /// Cartesian samples of every component, `n` per component.
    pub fn cloud(&self, n: usize) -> Vec<CartPoint> {
        self.components.iter().flat_map(|c| c.sample(n).into_iter().map(cyl_to_cart)).collect()
    }

    /// Largest `|h(x) - target|` over `n` samples per component.
    pub fn max_residual(&self, n: usize) -> f64 {
        self.components.iter().flat_map(|c| c.sample(n)).map(|p| super::eval(p).dist(self.target)).fold(0.0, f64::max)
    }
}

/// Fiber catalogue. Targets on the half-line `{-t e_x : t >= 0}` get their
/// closed-form loop or arc; everything else is a single point found by
/// [`super::invert`].
pub fn fiber(y: CartPoint) -> Result<Fiber> {
    if y.y == 0.0 && y.z == 0.0 && y.x <= 0.0 {
        let t = -y.x;
        let unit_ring = Curve::Ring { radius: 1.0, height: 0.0 };
        let (kind, components, wedge) = if t == 0.0 {
            (FiberKind::Circle, vec![unit_ring], None)
        } else if t < 1.0 {
            (
                FiberKind::FigureEight,
                vec![Curve::Ring { radius: 1.0 - t, height: 0.0 }, Curve::Slice { level: t, theta: 0.0 }],
                Some(CartPoint::new(1.0 - t, 0.0, 0.0)),
            )
        } else if t == 1.0 {
            (FiberKind::Circle, vec![Curve::Slice { level: 1.0, theta: 0.0 }], None)
        } else {
            (FiberKind::Arc, vec![Curve::SliceArc { level: t, theta: 0.0 }], None)
        };
        return Ok(Fiber { kind, components, wedge, target: y });
    }
    let p = invert_with(y, &InvertOptions::default())?;
    Ok(Fiber { kind: FiberKind::Point, components: vec![Curve::Point(p)], wedge: None, target: y })
}
