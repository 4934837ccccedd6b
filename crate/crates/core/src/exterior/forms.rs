//! Form fields and Monte Carlo checks of the pullback norm estimate and of
//! the weak commutation `d f* = f* d`.

#[allow(unused_imports)]
use num_traits::Float;

use super::{pullback_at, wedge, KCovector};
use crate::coords::CartPoint;
use crate::map::SmoothMap;
use crate::sampling::{mc_cart, CartBox, CartStrata};
use crate::{Error, Result};

/// A `k`-form on (a subset of) `R^3`.
pub trait FormField: Sync {
    fn degree(&self) -> usize;

    fn at(&self, x: CartPoint) -> KCovector;

    /// Exterior derivative, when available in closed form.
    fn d(&self, x: CartPoint) -> Option<KCovector> {
        let _ = x;
        None
    }

    /// Closed box outside which the field vanishes.
    fn support(&self) -> Option<CartBox> {
        None
    }
}

/// `(1 + l·(x - c)) Π_i (1 - u_i²)² Σ_I a_I dx_I` with `u_i = (x_i - c_i)/s_i`,
/// supported on the box `|x_i - c_i| <= s_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpForm {
    pub center: CartPoint,
    pub half: [f64; 3],
    pub slope: [f64; 3],
    pub coeffs: KCovector,
}

impl BumpForm {
    pub fn new(center: CartPoint, half: [f64; 3], slope: [f64; 3], coeffs: KCovector) -> Result<Self> {
        if half.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::OutOfRange("bump half-widths must be positive"));
        }
        Ok(BumpForm { center, half, slope, coeffs })
    }

    pub fn cube(center: CartPoint, half: f64, coeffs: KCovector) -> Result<Self> {
        Self::new(center, [half; 3], [0.0; 3], coeffs)
    }

    /// Scalar profile and its gradient.
    fn profile(&self, x: CartPoint) -> (f64, [f64; 3]) {
        let xs = x.to_array();
        let c = self.center.to_array();
        let mut u = [0.0; 3];
        for i in 0..3 {
            u[i] = (xs[i] - c[i]) / self.half[i];
            if u[i].abs() >= 1.0 {
                return (0.0, [0.0; 3]);
            }
        }
        let b: [f64; 3] = core::array::from_fn(|i| (1.0 - u[i] * u[i]).powi(2));
        let db: [f64; 3] = core::array::from_fn(|i| -4.0 * u[i] * (1.0 - u[i] * u[i]) / self.half[i]);
        let lin = 1.0 + (0..3).map(|i| self.slope[i] * (xs[i] - c[i])).sum::<f64>();
        let prod = b[0] * b[1] * b[2];
        let grad = core::array::from_fn(|i| {
            let others: f64 = (0..3).filter(|&j| j != i).map(|j| b[j]).product();
            self.slope[i] * prod + lin * db[i] * others
        });
        (lin * prod, grad)
    }
}

impl FormField for BumpForm {
    fn degree(&self) -> usize {
        self.coeffs.degree()
    }

    fn at(&self, x: CartPoint) -> KCovector {
        self.coeffs.scale(self.profile(x).0)
    }

    fn d(&self, x: CartPoint) -> Option<KCovector> {
        let k = self.degree();
        if k == 3 {
            return None;
        }
        let (_, g) = self.profile(x);
        let dphi = KCovector::new(1, &g).ok()?;
        wedge(&dphi, &self.coeffs).ok()
    }

    fn support(&self) -> Option<CartBox> {
        let c = self.center.to_array();
        CartBox::new(core::array::from_fn(|i| c[i] - self.half[i]), core::array::from_fn(|i| c[i] + self.half[i])).ok()
    }
}

/// Exponent of a Lebesgue norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormExponent {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub p: NormExponent,
}

/// `(∫ I)^{1/p}` and its delta-method standard error.
fn root(integral: (f64, f64), p: f64) -> (f64, f64) {
    let (i, se) = integral;
    if i <= 0.0 {
        return (0.0, if se > 0.0 { se.powf(1.0 / p) } else { 0.0 });
    }
    let v = i.powf(1.0 / p);
    (v, v * se / (p * i))
}

/// Monte Carlo `L^p` norm of `|field|` over `domain`. For `p = ∞` the
/// sample maximum is returned with zero stderr.
pub fn mc_norm<F: FormField + ?Sized>(field: &F, p: NormExponent, domain: &CartBox, n: usize, seed: u64) -> Result<NormEstimate> {
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    let (value, stderr) = match p {
        NormExponent::Finite(q) => {
            if !(q >= 1.0) {
                return Err(Error::OutOfRange("norm exponent must be >= 1"));
            }
            let [i] = mc_cart(domain, n, seed, |x| [field.at(x).norm().powf(q)])?;
            root(i, q)
        }
        NormExponent::Infinite => {
            let strata = CartStrata::new(*domain, n);
            let maxima = crate::sampling::run_strata(strata.count(), seed, |s, rng| {
                (0..strata.size(s)).map(|_| field.at(strata.point(s, rng)).norm()).fold(0.0, f64::max)
            });
            (maxima.into_iter().fold(0.0, f64::max), 0.0)
        }
    };
    Ok(NormEstimate { value, stderr, samples: n, seed, p })
}

/// Outcome of a pullback norm check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackReport {
    /// Target exponent `r = n / (k + n/(pq))`.
    pub r: f64,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    /// `‖ω‖_p` over the image of the domain (computed as `∫|ω∘f|^p J_f`).
    pub omega_norm: f64,
    pub k_norm: f64,
    pub df_norm: f64,
    pub samples: usize,
    pub pass: bool,
}

/// `‖f*ω‖_r <= ‖ω‖_p ‖K_f‖_q^{1/p} ‖Df‖_n^{(pk-n)/p}` on `domain`, with
/// `n = 3` and `K_f = ‖Df‖³/J_f`.
///
/// All four integrals share one sample set, so the discrete measure is the
/// same for each and Hölder's inequality holds for the estimates exactly.
pub fn verify_pullback_estimate<M: SmoothMap + ?Sized, F: FormField + ?Sized>(
    map: &M,
    omega: &F,
    p: f64,
    q: f64,
    domain: &CartBox,
    n: usize,
    seed: u64,
) -> Result<PullbackReport> {
    const N: f64 = 3.0;
    let k = omega.degree();
    if k == 0 {
        return Err(Error::OutOfRange("form degree must be at least 1"));
    }
    let kf = k as f64;
    if !(p >= N / kf) || !(q >= 1.0 / (N - 1.0)) || !p.is_finite() || !q.is_finite() {
        return Err(Error::OutOfRange("need p >= n/k and q >= 1/(n-1), both finite"));
    }
    let r = N / (kf + N / (p * q));
    let [lhs_i, om_i, k_i, df_i] = mc_cart(domain, n, seed, |x| {
        let m = map.differential(x);
        let j = m.det();
        let w = omega.at(map.apply(x));
        let pulled = pullback_at(&m, &w).norm();
        let norm = m.spectral_norm();
        if !(j > 0.0) {
            // Outside the support of K_f only the pullback can be nonzero.
            return [pulled.powf(r), 0.0, 0.0, norm.powi(3)];
        }
        let kx = norm.powi(3) / j;
        [pulled.powf(r), w.norm().powf(p) * j, kx.powf(q), norm.powi(3)]
    })?;
    let (lhs, lhs_se) = root(lhs_i, r);
    let (om, om_se) = root(om_i, p);
    let (kn, kn_se) = root(k_i, q);
    let (dn, dn_se) = root(df_i, N);
    let e_k = 1.0 / p;
    let e_d = (p * kf - N) / p;
    let rhs = om * kn.powf(e_k) * dn.powf(e_d);
    let rel = |v: f64, se: f64, e: f64| if v > 0.0 { e * se / v } else { 0.0 };
    let rhs_se = rhs * (rel(om, om_se, 1.0).powi(2) + rel(kn, kn_se, e_k).powi(2) + rel(dn, dn_se, e_d).powi(2)).sqrt();
    let combined = (lhs_se * lhs_se + rhs_se * rhs_se).sqrt();
    Ok(PullbackReport {
        r,
        lhs,
        lhs_stderr: lhs_se,
        rhs,
        rhs_stderr: rhs_se,
        omega_norm: om,
        k_norm: kn,
        df_norm: dn,
        samples: n,
        pass: lhs <= rhs + 3.0 * combined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationReport {
    /// `∫ dω ∧ f*η`.
    pub left: f64,
    /// `(-1)^{k+1} ∫ ω ∧ f*dη`.
    pub right: f64,
    pub residual: f64,
    pub stderr: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Monte Carlo residual of `∫ dω ∧ f*η = (-1)^{k+1} ∫ ω ∧ f*dη` for a
/// compactly supported `k`-form `ω` on the domain and a `(2-k)`-form `η` on
/// the image. Integration runs over the support box of `ω`.
pub fn verify_commutation<M: SmoothMap + ?Sized, A: FormField + ?Sized, B: FormField + ?Sized>(
    map: &M,
    omega: &A,
    eta: &B,
    n: usize,
    seed: u64,
) -> Result<CommutationReport> {
    let k = omega.degree();
    if k > 2 || eta.degree() + k != 2 {
        return Err(Error::OutOfRange("need deg ω = k <= 2 and deg η = 2 - k"));
    }
    let domain = omega.support().ok_or(Error::OutOfRange("ω must be compactly supported"))?;
    let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
    let missing = Error::OutOfRange("both fields need a closed-form exterior derivative");
    let x0 = domain.at([0.5; 3]);
    omega.d(x0).ok_or(missing.clone())?;
    eta.d(map.apply(x0)).ok_or(missing)?;
    let [l, rt, res] = mc_cart(&domain, n, seed, |x| {
        let m = map.differential(x);
        let y = map.apply(x);
        let d_omega = omega.d(x).unwrap_or(KCovector::zero(k + 1));
        let f_eta = pullback_at(&m, &eta.at(y));
        let f_deta = pullback_at(&m, &eta.d(y).unwrap_or(KCovector::zero(3 - k)));
        let a = wedge(&d_omega, &f_eta).map(|w| w.top()).unwrap_or(0.0);
        let b = sign * wedge(&omega.at(x), &f_deta).map(|w| w.top()).unwrap_or(0.0);
        [a, b, a - b]
    })?;
    Ok(CommutationReport { left: l.0, right: rt.0, residual: res.0, stderr: res.1, samples: n, pass: res.0.abs() <= 3.0 * res.1 })
}
