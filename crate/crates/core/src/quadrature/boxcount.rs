use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::coords::CartPoint;
use crate::{Error, Result};

pub const MIN_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub dimension: f64,
    /// `(δ, N(δ))` per scale.
    pub counts: Vec<(f64, usize)>,
}

/// `count` scales log-spaced on `[lo, hi]`.
pub fn log_scales(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count.max(2) - 1) as f64).exp()).collect()
}

fn occupied(points: &[CartPoint], delta: f64) -> usize {
    let mut cells: Vec<[i64; 3]> =
        points.iter().map(|p| [(p.x / delta).floor() as i64, (p.y / delta).floor() as i64, (p.z / delta).floor() as i64]).collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

/// Least-squares slope of `log N(δ)` against `log(1/δ)`.
pub fn box_counting(points: &[CartPoint], scales: &[f64]) -> Result<DimensionEstimate> {
    if points.len() < MIN_POINTS {
        return Err(Error::InsufficientSamples { needed: MIN_POINTS, got: points.len() });
    }
    let lo = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scales.iter().cloned().fold(0.0, f64::max);
    if scales.len() < 4 || !(lo > 0.0) || hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientScales);
    }
    let counts: Vec<(f64, usize)> = scales.iter().map(|&d| (d, occupied(points, d))).collect();
    let x: Vec<f64> = counts.iter().map(|c| (1.0 / c.0).ln()).collect();
    let y: Vec<f64> = counts.iter().map(|c| (c.1 as f64).ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(DimensionEstimate { dimension: sxy / sxx, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_has_dimension_zero() {
        let pts = alloc::vec![CartPoint::new(0.3, 0.2, 0.1); 2000];
        let d = box_counting(&pts, &log_scales(1e-3, 1e-1, 5)).unwrap();
        assert_eq!(d.dimension, 0.0);
    }

    #[test]
    fn segment_has_dimension_one() {
        let pts: Vec<_> = (0..100_000).map(|i| CartPoint::new(i as f64 / 1e5, 0.5, 0.5)).collect();
        let d = box_counting(&pts, &log_scales(1e-3, 1e-1, 5)).unwrap();
        assert!((d.dimension - 1.0).abs() < 0.05, "{d:?}");
    }

    #[test]
    fn rejects_narrow_scales() {
        let pts = alloc::vec![CartPoint::ORIGIN; 2000];
        assert_eq!(box_counting(&pts, &log_scales(1e-2, 1e-1, 5)), Err(Error::InsufficientScales));
        assert_eq!(box_counting(&pts, &[1e-3, 1e-2, 1e-1]), Err(Error::InsufficientScales));
    }
}
