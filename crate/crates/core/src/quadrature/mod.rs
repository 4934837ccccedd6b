//! Singular Monte Carlo quadrature for the distortion, trend fitting,
//! preimage connectivity, box counting and change of variables.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bingmap::distortion_ae;
use crate::coords::{cart_to_cyl, jacobian_case, CylPoint, JacobianCase};
use crate::map::SmoothMap;
use crate::sampling::{run_strata, stratified, CartBox, CartStrata, CylBox, CylSampler, Moments};
use crate::{Error, Result};

mod boxcount;
mod cov;
mod fit;
mod voxel;

pub use boxcount::{box_counting, log_scales, DimensionEstimate};
pub use cov::{change_of_variables_check, change_of_variables_in_box, half_line_distance, CovReport};
pub use fit::{divergence_fit, TrendFit, TrendModel, TAIL_EPS};
pub use voxel::{preimage_components, ComponentReport, GridSpec, VoxelGrid};

/// Strata per axis over `(u_θ, u_z)` in [`integrate_kp_schedule`].
pub const KP_STRATA: usize = 32;

/// The ε schedule `10⁻², …, 10⁻⁶`.
pub const EPS_SCHEDULE: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Bands removed around the Jacobian degeneracy set: `|θ| < eps_theta`,
/// and `|z| < eps_z` where `r <= 1 + margin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionTube {
    pub eps_theta: f64,
    pub eps_z: f64,
    pub margin: f64,
}

impl ExclusionTube {
    pub const DEFAULT_MARGIN: f64 = 0.05;

    pub fn uniform(eps: f64) -> Self {
        ExclusionTube { eps_theta: eps, eps_z: eps, margin: Self::DEFAULT_MARGIN }
    }

    pub fn excludes(&self, p: CylPoint) -> bool {
        p.theta.abs() < self.eps_theta || (p.z.abs() < self.eps_z && p.r <= 1.0 + self.margin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Cyl(CylBox),
    Cart(CartBox),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub p: f64,
    /// Second exponent, for the energy.
    pub q: Option<f64>,
    pub tube: ExclusionTube,
    pub domain: Domain,
    /// `(value, stderr)` restricted to the Inner, Cone and Outer cases.
    pub by_case: [(f64, f64); 3],
}

fn case_index(c: JacobianCase) -> usize {
    match c {
        JacobianCase::Inner => 0,
        JacobianCase::Cone => 1,
        JacobianCase::Outer => 2,
    }
}

/// `∫_{domain ∖ tube} K_h^p dV`.
pub fn integrate_kp(p: f64, domain: &CylBox, tube: ExclusionTube, n: usize, seed: u64) -> Result<IntegralEstimate> {
    let mut out = integrate_kp_schedule(&[p], domain, &[tube], n, seed)?;
    Ok(out.remove(0).remove(0))
}

/// Estimates for every `(p, tube)` pair from one shared sample set.
/// The sampling density does not depend on `p` or on the tubes; its `θ`
/// floor is the narrowest tube. Output is indexed `[p][tube]`.
pub fn integrate_kp_schedule(
    ps: &[f64],
    domain: &CylBox,
    tubes: &[ExclusionTube],
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<IntegralEstimate>>> {
    if ps.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::OutOfRange("need 0 < p <= 1"));
    }
    if tubes.is_empty() || tubes.iter().any(|t| !(t.eps_theta > 0.0) || !(t.eps_z >= 0.0)) {
        return Err(Error::OutOfRange("tubes need eps_theta > 0 and eps_z >= 0"));
    }
    let floor = tubes.iter().map(|t| t.eps_theta).fold(f64::INFINITY, f64::min);
    let sampler = CylSampler::new(*domain, floor)?;
    let strata = KP_STRATA * KP_STRATA;
    if n < strata {
        return Err(Error::InsufficientSamples { needed: strata, got: n });
    }
    let (np, nt) = (ps.len(), tubes.len());
    // Per stratum: moments[(pi * nt + ti) * 4 + slot], slot 3 = total.
    let per = run_strata(strata, seed, |s, rng| {
        use rand::Rng;
        let (it, iz) = (s % KP_STRATA, s / KP_STRATA);
        let count = n / strata + usize::from(s < n % strata);
        let mut m = vec![Moments::default(); np * nt * 4];
        let mut kp = vec![0.0; np];
        for _ in 0..count {
            let u = [
                rng.random::<f64>(),
                (it as f64 + rng.random::<f64>()) / KP_STRATA as f64,
                (iz as f64 + rng.random::<f64>()) / KP_STRATA as f64,
            ];
            let wp = sampler.at(u);
            let k = distortion_ae(wp.point).unwrap_or(0.0);
            for (pi, &p) in ps.iter().enumerate() {
                kp[pi] = if k > 0.0 { k.powf(p) * wp.weight } else { 0.0 };
            }
            let case = case_index(jacobian_case(wp.point));
            for (ti, t) in tubes.iter().enumerate() {
                let keep = !t.excludes(wp.point);
                for pi in 0..np {
                    let v = if keep { kp[pi] } else { 0.0 };
                    let base = (pi * nt + ti) * 4;
                    for slot in 0..3 {
                        m[base + slot].push(if slot == case { v } else { 0.0 });
                    }
                    m[base + 3].push(v);
                }
            }
        }
        m
    });
    let pick = |idx: usize| stratified(&per.iter().map(|m| m[idx]).collect::<Vec<_>>());
    Ok(ps
        .iter()
        .enumerate()
        .map(|(pi, &p)| {
            tubes
                .iter()
                .enumerate()
                .map(|(ti, &tube)| {
                    let base = (pi * nt + ti) * 4;
                    let (value, stderr) = pick(base + 3);
                    IntegralEstimate {
                        value,
                        stderr,
                        samples: n,
                        seed,
                        p,
                        q: None,
                        tube,
                        domain: Domain::Cyl(*domain),
                        by_case: [pick(base), pick(base + 1), pick(base + 2)],
                    }
                })
                .collect()
        })
        .collect())
}

/// `∫ |Df|^p + J_f^{-q}` over the domain minus the tube, with `|Df|` the
/// spectral norm. Points with `J_f <= 0` are skipped.
pub fn energy_epq<M: SmoothMap + ?Sized>(
    map: &M,
    p: f64,
    q: f64,
    domain: &Domain,
    tube: ExclusionTube,
    n: usize,
    seed: u64,
) -> Result<IntegralEstimate> {
    if !(p >= 3.0) || !(q > 0.0) {
        return Err(Error::OutOfRange("need p >= 3 and q > 0"));
    }
    if n == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let integrand = |x: crate::CartPoint| -> f64 {
        let m = map.differential(x);
        let j = map.jacobian(x);
        if !(j > 0.0) {
            return 0.0;
        }
        m.spectral_norm().powf(p) + j.powf(-q)
    };
    let (per, scale): (Vec<(Moments, [Moments; 3])>, f64) = match domain {
        Domain::Cart(b) => {
            let strata = CartStrata::new(*b, n);
            let per = run_strata(strata.count(), seed, |s, rng| {
                let mut m = Moments::default();
                let mut c = [Moments::default(); 3];
                for _ in 0..strata.size(s) {
                    let x = strata.point(s, rng);
                    let cp = cart_to_cyl(x);
                    let v = if tube.excludes(cp) { 0.0 } else { integrand(x) };
                    m.push(v);
                    let case = case_index(jacobian_case(cp));
                    for (i, ci) in c.iter_mut().enumerate() {
                        ci.push(if i == case { v } else { 0.0 });
                    }
                }
                (m, c)
            });
            (per, b.volume())
        }
        Domain::Cyl(b) => {
            let floor = if tube.eps_theta > 0.0 { tube.eps_theta } else { 1e-9 };
            let sampler = CylSampler::new(*b, floor)?;
            let strata = 64;
            let per = run_strata(strata, seed, |s, rng| {
                use rand::Rng;
                let mut m = Moments::default();
                let mut c = [Moments::default(); 3];
                for _ in 0..n / strata + usize::from(s < n % strata) {
                    let u = [rng.random::<f64>(), (s as f64 + rng.random::<f64>()) / strata as f64, rng.random::<f64>()];
                    let wp = sampler.at(u);
                    let v = if tube.excludes(wp.point) { 0.0 } else { integrand(wp.point.to_cart()) * wp.weight };
                    m.push(v);
                    let case = case_index(jacobian_case(wp.point));
                    for (i, ci) in c.iter_mut().enumerate() {
                        ci.push(if i == case { v } else { 0.0 });
                    }
                }
                (m, c)
            });
            (per, 1.0)
        }
    };
    let total = stratified(&per.iter().map(|x| x.0).collect::<Vec<_>>());
    let case = |i: usize| {
        let (v, se) = stratified(&per.iter().map(|x| x.1[i]).collect::<Vec<_>>());
        (v * scale, se * scale)
    };
    Ok(IntegralEstimate {
        value: total.0 * scale,
        stderr: total.1 * scale,
        samples: n,
        seed,
        p,
        q: Some(q),
        tube,
        domain: *domain,
        by_case: [case(0), case(1), case(2)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bingmap::BingMap;
    use crate::Identity;
    use core::f64::consts::PI;

    #[test]
    fn bounded_region_is_tube_stable() {
        let b = CylBox::new((1.2, 1.8), (1.0, 2.5), (0.6, 1.0)).unwrap();
        let a = integrate_kp(0.4, &b, ExclusionTube::uniform(1e-2), 20_000, 1).unwrap();
        let c = integrate_kp(0.4, &b, ExclusionTube::uniform(1e-5), 20_000, 1).unwrap();
        assert!((a.value - c.value).abs() < 4.0 * (a.stderr + c.stderr), "{a:?} {c:?}");
        // Only the Outer case lives in this box.
        assert_eq!(a.by_case[0].0, 0.0);
        assert!((a.by_case[2].0 - a.value).abs() < 1e-12 * a.value);
    }

    #[test]
    fn integral_is_monotone_in_p_samplewise() {
        let ests = integrate_kp_schedule(&[0.2, 0.3, 0.4], &CylBox::default(), &[ExclusionTube::uniform(1e-3)], 50_000, 9).unwrap();
        assert!(ests[0][0].value <= ests[1][0].value && ests[1][0].value <= ests[2][0].value);
    }

    #[test]
    fn kp_reproducible() {
        let b = CylBox::default();
        let t = ExclusionTube::uniform(1e-3);
        assert_eq!(integrate_kp(0.3, &b, t, 10_000, 4).unwrap(), integrate_kp(0.3, &b, t, 10_000, 4).unwrap());
    }

    #[test]
    fn identity_energy_on_unit_cube() {
        let d = Domain::Cart(CartBox::new([0.0; 3], [1.0; 3]).unwrap());
        let tube = ExclusionTube { eps_theta: 0.0, eps_z: 0.0, margin: 0.0 };
        let e = energy_epq(&Identity, 3.0, 1.0, &d, tube, 5000, 0).unwrap();
        assert!((e.value - 2.0).abs() < 1e-12 && e.stderr < 1e-12);
    }

    #[test]
    fn bing_energy_grows_with_q_near_theta_zero() {
        let d = Domain::Cyl(CylBox::new((0.3, 0.9), (-PI, PI), (0.2, 0.8)).unwrap());
        let e = |eps: f64| energy_epq(&BingMap, 3.0, 1.0, &d, ExclusionTube::uniform(eps), 40_000, 2).unwrap().value;
        assert!(e(1e-4) > 5.0 * e(1e-2));
    }
}
