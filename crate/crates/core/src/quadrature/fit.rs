use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Only per-halving changes between samples with `ε` strictly below this
/// decide flatness.
pub const TAIL_EPS: f64 = 1e-4;

/// Largest per-halving relative change still called flat.
pub const FLAT_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrendModel {
    Constant,
    Log,
    Power,
}

impl TrendModel {
    pub fn name(self) -> &'static str {
        match self {
            TrendModel::Constant => "CONSTANT",
            TrendModel::Log => "LOG",
            TrendModel::Power => "POWER",
        }
    }
}

/// `I(ε) ≈ a + b·g(1/ε)` with `g = 0`, `log` or `t^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendFit {
    pub model: TrendModel,
    pub a: f64,
    pub b: f64,
    /// Fitted exponent of the POWER model, 0 otherwise.
    pub alpha: f64,
    pub r2: f64,
    /// Largest per-halving relative change in the tail.
    pub tail_change: f64,
}

/// Least squares `y = a + b x`, returning `(a, b, r²)`.
fn linear(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx <= 0.0 {
        return (my, 0.0, 0.0);
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    (a, b, r2)
}

fn adjusted(r2: f64, n: usize, predictors: usize) -> f64 {
    let n = n as f64;
    1.0 - (1.0 - r2) * (n - 1.0) / (n - predictors as f64 - 1.0)
}

fn per_halving(e0: f64, v0: f64, e1: f64, v1: f64) -> f64 {
    if v0 == 0.0 {
        return if v1 == 0.0 { 0.0 } else { f64::INFINITY };
    }
    ((v1 / v0).abs().powf(core::f64::consts::LN_2 / (e0 / e1).ln()) - 1.0).abs()
}

/// Classifies how `I(ε)` behaves as `ε -> 0`.
///
/// CONSTANT when every per-halving relative change between consecutive
/// samples with `ε < TAIL_EPS` stays under 2% (the two smallest `ε` are used
/// when fewer than two lie in that range). Otherwise LOG or POWER, whichever
/// has the larger adjusted r², LOG on ties.
pub fn divergence_fit(samples: &[(f64, f64)]) -> Result<TrendFit> {
    if samples.len() < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: samples.len() });
    }
    let mut s: Vec<(f64, f64)> = samples.to_vec();
    if s.iter().any(|&(e, v)| !(e > 0.0) || !v.is_finite()) {
        return Err(Error::OutOfRange("need eps > 0 and finite values"));
    }
    s.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    if s.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::OutOfRange("eps values must be distinct"));
    }
    let n = s.len();
    let tail_start = s.iter().position(|&(e, _)| e < TAIL_EPS).unwrap_or(n).min(n - 2);
    let tail_change = s[tail_start..].windows(2).map(|w| per_halving(w[0].0, w[0].1, w[1].0, w[1].1)).fold(0.0, f64::max);
    let y: Vec<f64> = s.iter().map(|p| p.1).collect();
    if tail_change < FLAT_TOL {
        let a = y.iter().sum::<f64>() / n as f64;
        return Ok(TrendFit { model: TrendModel::Constant, a, b: 0.0, alpha: 0.0, r2: 0.0, tail_change });
    }

    let xl: Vec<f64> = s.iter().map(|p| (1.0 / p.0).ln()).collect();
    let (la, lb, lr2) = linear(&xl, &y);

    let power_at = |alpha: f64| {
        let x: Vec<f64> = s.iter().map(|p| p.0.powf(-alpha)).collect();
        linear(&x, &y)
    };
    // Coarse scan in log α, then golden-section refinement.
    let mut best = (f64::NEG_INFINITY, 0.0);
    let grid = 60;
    for i in 0..=grid {
        let alpha = 10f64.powf(-4.0 + 4.3 * i as f64 / grid as f64);
        let r2 = power_at(alpha).2;
        if r2 > best.0 {
            best = (r2, alpha);
        }
    }
    let (mut lo, mut hi) = ((best.1 / 1.2).ln(), (best.1 * 1.2).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if power_at(m1.exp()).2 >= power_at(m2.exp()).2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let alpha = (0.5 * (lo + hi)).exp();
    let (pa, pb, pr2) = power_at(alpha);

    if n > 3 && adjusted(pr2, n, 2) > adjusted(lr2, n, 1) + 1e-12 {
        Ok(TrendFit { model: TrendModel::Power, a: pa, b: pb, alpha, r2: pr2, tail_change })
    } else {
        Ok(TrendFit { model: TrendModel::Log, a: la, b: lb, alpha: 0.0, r2: lr2, tail_change })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::EPS_SCHEDULE;

    #[test]
    fn flat_data_is_constant() {
        let noise = [0.003, -0.002, 0.001, -0.004, 0.002];
        let s: Vec<_> = EPS_SCHEDULE.iter().zip(noise).map(|(&e, n)| (e, 7.0 + n)).collect();
        let f = divergence_fit(&s).unwrap();
        assert_eq!(f.model, TrendModel::Constant);
        assert!((f.a - 7.0).abs() < 0.01);
    }

    #[test]
    fn log_data_is_log() {
        let s: Vec<_> = EPS_SCHEDULE.iter().map(|&e| (e, 2.0 + 3.0 * (1.0 / e).ln())).collect();
        let f = divergence_fit(&s).unwrap();
        assert_eq!(f.model, TrendModel::Log);
        assert!((f.b - 3.0).abs() < 1e-9 && f.r2 > 0.999);
    }

    #[test]
    fn power_data_is_power() {
        let s: Vec<_> = EPS_SCHEDULE.iter().map(|&e| (e, 1.0 + 0.5 * e.powf(-0.3))).collect();
        let f = divergence_fit(&s).unwrap();
        assert_eq!(f.model, TrendModel::Power);
        assert!((f.alpha - 0.3).abs() < 1e-3, "{f:?}");
    }

    #[test]
    fn needs_four_samples() {
        assert_eq!(divergence_fit(&[(1e-2, 1.0), (1e-3, 1.0), (1e-4, 1.0)]), Err(Error::InsufficientSamples { needed: 4, got: 3 }));
    }
}
