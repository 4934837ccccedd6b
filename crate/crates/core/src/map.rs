use crate::coords::CartPoint;
use crate::linalg::Mat3;

/// A map `R^3 -> R^3` with a differential defined almost everywhere.
pub trait SmoothMap: Sync {
    fn apply(&self, x: CartPoint) -> CartPoint;

    /// Cartesian differential at `x`.
    fn differential(&self, x: CartPoint) -> Mat3;

    fn jacobian(&self, x: CartPoint) -> f64 {
        self.differential(x).det()
    }

    /// Bound on `‖Df‖` over the ball `B(x, radius)`, if one is known.
    fn lipschitz_near(&self, x: CartPoint, radius: f64) -> Option<f64> {
        let _ = (x, radius);
        None
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl SmoothMap for Identity {
    fn apply(&self, x: CartPoint) -> CartPoint {
        x
    }

    fn differential(&self, _x: CartPoint) -> Mat3 {
        Mat3::IDENTITY
    }
}

/// `(x, y, z) -> (x², y, z)`: folds space along `x = 0`, so balls around
/// points with `x > 0` have two preimage components.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquareFirstCoordinate;

impl SmoothMap for SquareFirstCoordinate {
    fn apply(&self, x: CartPoint) -> CartPoint {
        CartPoint::new(x.x * x.x, x.y, x.z)
    }

    fn differential(&self, x: CartPoint) -> Mat3 {
        Mat3::diag([2.0 * x.x, 1.0, 1.0])
    }
}
