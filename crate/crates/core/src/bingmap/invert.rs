use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cartesian_differential_ae, eval};
use crate::coords::{cart_to_cyl, cyl_to_cart, CartPoint, CylPoint};
use crate::linalg::{norm, Vec3};
use crate::{Error, Result};

/// On every torus `T_c`, `|h| >= 0.444 c`; so a preimage of `y` has level at
/// most `|y| / 0.444`. Rounded up for the search box.
pub const LEVEL_PER_IMAGE_NORM: f64 = 2.5;

/// Grid seeds tried after the random restarts fail.
const FALLBACK_SEEDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertOptions {
    /// Required residual `|h(x) - y|`.
    pub tol: f64,
    /// Seed grid over `(r, θ, z)`.
    pub grid: [usize; 3],
    /// Number of seeds taken from the grid.
    pub seeds: usize,
    /// Random restarts from perturbed grid seeds before giving up.
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions { tol: 1e-12, grid: [16, 32, 16], seeds: 4, restarts: 8, max_iter: 80, seed: 0 }
    }
}

/// Unique preimage of `y` off the half-line `{-t e_x : t >= 0}`.
pub fn invert(y: CartPoint, tol: f64) -> Result<CylPoint> {
    invert_with(y, &InvertOptions { tol, ..InvertOptions::default() })
}

pub fn invert_with(y: CartPoint, opts: &InvertOptions) -> Result<CylPoint> {
    if y.y == 0.0 && y.z == 0.0 && y.x <= 0.0 {
        return Err(Error::OnNonInjectiveSet);
    }
    let target = y.to_array();
    let c_max = LEVEL_PER_IMAGE_NORM * y.norm() + 0.05;
    let r_lo = (1.0 - c_max).max(0.0);
    let r_hi = 1.0 + c_max;
    let [nr, nt, nz] = opts.grid;
    let cell = [(r_hi - r_lo) / nr as f64, 2.0 * PI / nt as f64, 2.0 * c_max / nz as f64];

    // Keep the best grid centres, sorted by residual.
    let mut best: [(f64, [f64; 3]); FALLBACK_SEEDS] = [(f64::INFINITY, [0.0; 3]); FALLBACK_SEEDS];
    let keep = opts.seeds.clamp(1, best.len());
    let kept = FALLBACK_SEEDS;
    for i in 0..nr {
        let r = r_lo + (i as f64 + 0.5) * cell[0];
        for j in 0..nt {
            let th = -PI + (j as f64 + 0.5) * cell[1];
            for k in 0..nz {
                let z = -c_max + (k as f64 + 0.5) * cell[2];
                let p = CylPoint::new(r, th, z);
                let res = eval(p).dist(y);
                if res < best[kept - 1].0 {
                    best[kept - 1] = (res, [r, th, z]);
                    best.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
                }
            }
        }
    }

    let mut overall = (f64::INFINITY, [0.0; 3]);
    let attempt = |x0: [f64; 3], overall: &mut (f64, Vec3)| -> Option<CylPoint> {
        let (x, res) = newton(x0, target, opts.max_iter);
        if res < overall.0 {
            *overall = (res, x);
        }
        (res < opts.tol).then(|| cart_to_cyl(CartPoint::from_array(x)))
    };

    for &(res, [r, th, z]) in best[..keep].iter() {
        if !res.is_finite() {
            continue;
        }
        let x0 = cyl_to_cart(CylPoint::new(r, th, z)).to_array();
        if let Some(p) = attempt(x0, &mut overall) {
            return Ok(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for n in 0..opts.restarts {
        let (_, [r, th, z]) = best[n % keep];
        let p = CylPoint::new(
            r + cell[0] * rng.random_range(-1.0..1.0),
            th + cell[1] * rng.random_range(-1.0..1.0),
            z + cell[2] * rng.random_range(-1.0..1.0),
        );
        if let Some(p) = attempt(cyl_to_cart(p).to_array(), &mut overall) {
            return Ok(p);
        }
    }
    for &(res, [r, th, z]) in best[keep..].iter() {
        if !res.is_finite() {
            continue;
        }
        if let Some(p) = attempt(cyl_to_cart(CylPoint::new(r, th, z)).to_array(), &mut overall) {
            return Ok(p);
        }
    }
    Err(Error::InversionFailed { residual: overall.0 })
}

/// Newton from `start` first; falls back to [`invert_with`].
pub fn invert_near(y: CartPoint, start: CylPoint, opts: &InvertOptions) -> Result<CylPoint> {
    if y.y == 0.0 && y.z == 0.0 && y.x <= 0.0 {
        return Err(Error::OnNonInjectiveSet);
    }
    let (x, res) = newton(cyl_to_cart(start).to_array(), y.to_array(), opts.max_iter);
    if res < opts.tol {
        return Ok(cart_to_cyl(CartPoint::from_array(x)));
    }
    invert_with(y, opts)
}

fn residual(x: Vec3, target: Vec3) -> (Vec3, f64) {
    let h = eval(cart_to_cyl(CartPoint::from_array(x))).to_array();
    let f = [h[0] - target[0], h[1] - target[1], h[2] - target[2]];
    (f, norm(f))
}

/// Damped Newton in Cartesian domain coordinates using the one-sided
/// differential of whichever piece the iterate sits in. Runs to stagnation,
/// not just to the caller's tolerance, so round trips are tight.
fn newton(mut x: Vec3, target: Vec3, max_iter: usize) -> (Vec3, f64) {
    let (mut f, mut fnorm) = residual(x, target);
    let scale = 1.0 + norm(target);
    for _ in 0..max_iter {
        if fnorm <= 1e-16 * scale {
            break;
        }
        let dh = cartesian_differential_ae(cart_to_cyl(CartPoint::from_array(x)));
        let Some(inv) = dh.inverse() else { break };
        let d = inv.mul_vec(f);
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-8 {
            let xn = [x[0] - lambda * d[0], x[1] - lambda * d[1], x[2] - lambda * d[2]];
            let (fn_, nn) = residual(xn, target);
            if nn < fnorm * (1.0 - 1e-4 * lambda) || (nn < fnorm && lambda < 1e-3) {
                x = xn;
                f = fn_;
                fnorm = nn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, fnorm)
}
