//! Boxes, inverse-CDF samplers and the stratified Monte Carlo driver.
//!
//! Every stratum draws from its own `ChaCha8Rng` seeded by
//! [`stratum_seed`], and results come back in stratum order, so estimates
//! do not depend on the thread count.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coords::{CartPoint, CylPoint};
use crate::{Error, Result};

/// Axis-aligned box in `(r, θ, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylBox {
    pub r: (f64, f64),
    pub theta: (f64, f64),
    pub z: (f64, f64),
}

impl Default for CylBox {
    fn default() -> Self {
        CylBox { r: (0.0, 2.0), theta: (-PI, PI), z: (-1.0, 1.0) }
    }
}

impl CylBox {
    pub fn new(r: (f64, f64), theta: (f64, f64), z: (f64, f64)) -> Result<Self> {
        let b = CylBox { r, theta, z };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.r.0 >= 0.0
            && self.r.0 < self.r.1
            && self.theta.0 >= -PI
            && self.theta.1 <= PI
            && self.theta.0 < self.theta.1
            && self.z.0 < self.z.1
            && [self.r.1, self.z.0, self.z.1].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::EmptyDomain)
        }
    }

    /// Euclidean volume `∫ r dr dθ dz`.
    pub fn volume(&self) -> f64 {
        0.5 * (self.r.1 * self.r.1 - self.r.0 * self.r.0) * (self.theta.1 - self.theta.0) * (self.z.1 - self.z.0)
    }
}

/// Axis-aligned Cartesian box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl CartBox {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        if (0..3).all(|i| lo[i] < hi[i] && lo[i].is_finite() && hi[i].is_finite()) {
            Ok(CartBox { lo, hi })
        } else {
            Err(Error::EmptyDomain)
        }
    }

    pub fn cube(center: CartPoint, half: f64) -> Result<Self> {
        let c = center.to_array();
        Self::new([c[0] - half, c[1] - half, c[2] - half], [c[0] + half, c[1] + half, c[2] + half])
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.hi[i] - self.lo[i]).product()
    }

    pub fn at(&self, u: [f64; 3]) -> CartPoint {
        CartPoint::new(
            self.lo[0] + u[0] * (self.hi[0] - self.lo[0]),
            self.lo[1] + u[1] * (self.hi[1] - self.lo[1]),
            self.lo[2] + u[2] * (self.hi[2] - self.lo[2]),
        )
    }

    pub fn contains(&self, p: CartPoint) -> bool {
        let a = p.to_array();
        (0..3).all(|i| a[i] >= self.lo[i] && a[i] <= self.hi[i])
    }
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn stratum_seed(seed: u64, stratum: usize) -> u64 {
    splitmix64(splitmix64(seed) ^ (stratum as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// `(0..n).map(f)`, in parallel under `std`, results in index order.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "std")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "std"))]
    {
        (0..n).map(f).collect()
    }
}

/// Runs `f(stratum, rng)` for every stratum and returns results in stratum
/// order.
pub fn run_strata<T, F>(strata: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send,
{
    par_map(strata, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(stratum_seed(seed, s));
        f(s, &mut rng)
    })
}

/// Running sums of one weighted observable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }
}

/// Mean and standard error of an equal-probability stratified estimator.
pub fn stratified(strata: &[Moments]) -> (f64, f64) {
    if strata.is_empty() {
        return (0.0, 0.0);
    }
    let s = strata.len() as f64;
    let mean = strata.iter().map(Moments::mean).sum::<f64>() / s;
    let var = strata.iter().filter(|m| m.n > 0).map(|m| m.variance() / m.n as f64).sum::<f64>() / (s * s);
    (mean, var.sqrt())
}

/// Plain Monte Carlo mean and standard error.
pub fn plain(m: &Moments) -> (f64, f64) {
    if m.n == 0 {
        return (0.0, 0.0);
    }
    (m.mean(), (m.variance() / m.n as f64).sqrt())
}

/// Jittered stratification of a [`CartBox`] into `m³` equal cells; `n`
/// samples are spread over the cells as evenly as possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartStrata {
    pub domain: CartBox,
    pub per_axis: usize,
    pub samples: usize,
}

impl CartStrata {
    pub fn new(domain: CartBox, samples: usize) -> Self {
        let mut m = 1;
        while m < 8 && (m + 1) * (m + 1) * (m + 1) * 8 <= samples {
            m += 1;
        }
        CartStrata { domain, per_axis: m, samples }
    }

    pub fn count(&self) -> usize {
        self.per_axis * self.per_axis * self.per_axis
    }

    pub fn size(&self, s: usize) -> usize {
        let c = self.count();
        self.samples / c + usize::from(s < self.samples % c)
    }

    /// Measure carried by one sample of stratum `s`.
    pub fn weight(&self, s: usize) -> f64 {
        self.domain.volume() / (self.count() as f64 * self.size(s).max(1) as f64)
    }

    pub fn point<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> CartPoint {
        let m = self.per_axis;
        let idx = [s % m, (s / m) % m, s / (m * m)];
        let u = core::array::from_fn(|i| (idx[i] as f64 + rng.random::<f64>()) / m as f64);
        self.domain.at(u)
    }
}

/// Stratified estimates of `∫_domain f_i dV` for each component of `f`,
/// as `(value, stderr)`.
pub fn mc_cart<const N: usize, F>(domain: &CartBox, samples: usize, seed: u64, f: F) -> Result<[(f64, f64); N]>
where
    F: Fn(CartPoint) -> [f64; N] + Sync + Send,
{
    if samples == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let strata = CartStrata::new(*domain, samples);
    let per = run_strata(strata.count(), seed, |s, rng| {
        let mut m = [Moments::default(); N];
        for _ in 0..strata.size(s) {
            let v = f(strata.point(s, rng));
            for i in 0..N {
                m[i].push(v[i]);
            }
        }
        m
    });
    let vol = domain.volume();
    Ok(core::array::from_fn(|i| {
        let col: Vec<Moments> = per.iter().map(|m| m[i]).collect();
        let (mean, se) = stratified(&col);
        (mean * vol, se * vol)
    }))
}

/// Maps `u ∈ [0, 1)` onto a union of signed `|x|` ranges whose density is
/// `g'` normalised. Returns `(|x|, sign, total mass)`.
fn union_inverse(u: f64, pieces: &[(f64, f64, f64)], g: impl Fn(f64) -> f64, g_inv: impl Fn(f64) -> f64) -> (f64, f64, f64) {
    let total: f64 = pieces.iter().map(|&(a, b, _)| g(b) - g(a)).sum();
    let mut t = u * total;
    for (i, &(a, b, sign)) in pieces.iter().enumerate() {
        let m = g(b) - g(a);
        if t < m || i + 1 == pieces.len() {
            return (g_inv(g(a) + t.min(m)).clamp(a, b), sign, total);
        }
        t -= m;
    }
    unreachable!("pieces are never empty")
}

/// Splits `[lo, hi]` into the pieces of `{|x| >= floor}`, as ranges of
/// `|x|` tagged with a sign.
fn abs_pieces(lo: f64, hi: f64, floor: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    if hi > floor.max(lo) {
        out.push((floor.max(lo).max(0.0), hi, 1.0));
    }
    if lo < (-floor).min(hi) {
        out.push(((-hi).max(floor).max(0.0), -lo, -1.0));
    }
    out.retain(|p| p.1 > p.0);
    out
}

/// Sampler on a [`CylBox`] with densities `∝ r` in `r`, `∝ 1/|θ|` above a
/// floor in `θ`, and `∝ |z|^{-1/2}` in `z`. These match the singular
/// behaviour of the distortion near the degeneracy set.
#[derive(Debug, Clone)]
pub struct CylSampler {
    pub domain: CylBox,
    pub theta_floor: f64,
    theta_pieces: Vec<(f64, f64, f64)>,
    z_pieces: Vec<(f64, f64, f64)>,
}

/// A sampled point with its importance weight `r / pdf`, so that
/// `E[w f] = ∫ f dV`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub point: CylPoint,
    pub weight: f64,
}

impl CylSampler {
    /// `theta_floor > 0` is the smallest `|θ|` ever drawn.
    pub fn new(domain: CylBox, theta_floor: f64) -> Result<Self> {
        domain.validate()?;
        if !(theta_floor > 0.0) {
            return Err(Error::OutOfRange("theta floor must be positive"));
        }
        let theta_pieces = abs_pieces(domain.theta.0, domain.theta.1, theta_floor);
        let z_pieces = abs_pieces(domain.z.0, domain.z.1, 0.0);
        if theta_pieces.is_empty() || z_pieces.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(CylSampler { domain, theta_floor, theta_pieces, z_pieces })
    }

    /// Deterministic map from the unit cube.
    pub fn at(&self, u: [f64; 3]) -> WeightedPoint {
        let (r0, r1) = self.domain.r;
        let r2 = r0 * r0 + u[0] * (r1 * r1 - r0 * r0);
        let r = r2.sqrt();
        let pdf_r_over_r = 2.0 / (r1 * r1 - r0 * r0);

        let (at, ts, lt) = union_inverse(u[1], &self.theta_pieces, f64::ln, f64::exp);
        let pdf_t = 1.0 / (at * lt);

        let (az, zs, lz) = union_inverse(u[2], &self.z_pieces, f64::sqrt, |v| v * v);
        let pdf_z = 1.0 / (2.0 * az.sqrt().max(1e-300) * lz);

        WeightedPoint { point: CylPoint { r, theta: ts * at, z: zs * az }, weight: 1.0 / (pdf_r_over_r * pdf_t * pdf_z) }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> WeightedPoint {
        self.at([rng.random(), rng.random(), rng.random()])
    }
}
