//! Exterior algebra of `R^3` in the lexicographic basis
//! `1; dx, dy, dz; dx∧dy, dx∧dz, dy∧dz; dx∧dy∧dz`.

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Mat3;
use crate::{Error, Result};

mod forms;

pub use forms::{
    mc_norm, verify_commutation, verify_pullback_estimate, BumpForm, CommutationReport, FormField, NormEstimate, NormExponent,
    PullbackReport,
};

/// Determinants at or below this are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Basis index sets as bitmasks (bit 0 = x), per degree.
const BASIS: [&[u8]; 4] = [&[0b000], &[0b001, 0b010, 0b100], &[0b011, 0b101, 0b110], &[0b111]];

/// `C(3, k)`.
pub const fn basis_len(k: usize) -> usize {
    match k {
        0 | 3 => 1,
        _ => 3,
    }
}

/// A constant `k`-covector on `R^3`.
#[derive(Clone, Copy, PartialEq)]
pub struct KCovector {
    k: usize,
    c: [f64; 3],
}

impl fmt::Debug for KCovector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KCovector{{k: {}, coeffs: {:?}}}", self.k, self.coeffs())
    }
}

impl KCovector {
    pub fn new(k: usize, coeffs: &[f64]) -> Result<Self> {
        if k > 3 {
            return Err(Error::OutOfRange("degree must be in 0..=3"));
        }
        if coeffs.len() != basis_len(k) {
            return Err(Error::OutOfRange("coefficient count must be C(3, k)"));
        }
        let mut c = [0.0; 3];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(KCovector { k, c })
    }

    pub fn zero(k: usize) -> Self {
        assert!(k <= 3, "degree must be in 0..=3");
        KCovector { k, c: [0.0; 3] }
    }

    pub fn scalar(v: f64) -> Self {
        KCovector { k: 0, c: [v, 0.0, 0.0] }
    }

    pub fn volume(v: f64) -> Self {
        KCovector { k: 3, c: [v, 0.0, 0.0] }
    }

    /// `i`-th basis element of degree `k`.
    pub fn basis(k: usize, i: usize) -> Self {
        let mut v = Self::zero(k);
        v.c[i] = 1.0;
        v
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..basis_len(self.k)]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        KCovector { k: self.k, c: [self.c[0] * s, self.c[1] * s, self.c[2] * s] }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.k, o.k, "degree mismatch");
        KCovector { k: self.k, c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]] }
    }

    /// Single coefficient of a 0- or 3-form.
    pub fn top(&self) -> f64 {
        self.c[0]
    }
}

/// Wedge product.
pub fn wedge(a: &KCovector, b: &KCovector) -> Result<KCovector> {
    let k = a.k + b.k;
    if k > 3 {
        return Err(Error::OutOfRange("wedge degree exceeds 3"));
    }
    let mut out = KCovector::zero(k);
    for (i, &ma) in BASIS[a.k].iter().enumerate() {
        for (j, &mb) in BASIS[b.k].iter().enumerate() {
            if ma & mb != 0 {
                continue;
            }
            let sign = if inversions(ma, mb).is_multiple_of(2) { 1.0 } else { -1.0 };
            let idx = BASIS[k].iter().position(|&m| m == ma | mb).unwrap_or(0);
            out.c[idx] += sign * a.c[i] * b.c[j];
        }
    }
    Ok(out)
}

/// Pairs `(i in a, j in b)` with `i > j`.
fn inversions(a: u8, b: u8) -> u32 {
    (0..3).filter(|i| a & (1 << i) != 0).map(|i| (b & ((1u8 << i) - 1)).count_ones()).sum()
}

/// Euclidean Hodge star, `⋆: Λ^k -> Λ^{3-k}`.
pub fn hodge_star(v: &KCovector) -> KCovector {
    let c = v.c;
    match v.k {
        0 => KCovector::volume(c[0]),
        1 => KCovector { k: 2, c: [c[2], -c[1], c[0]] },
        2 => KCovector { k: 1, c: [c[2], -c[1], c[0]] },
        _ => KCovector::scalar(c[0]),
    }
}

/// The induced map `Λ^k A` on `k`-vectors, in the lexicographic basis.
/// Degrees 0 and 3 give a `1×1` matrix stored in entry `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeMatrix {
    pub k: usize,
    pub m: Mat3,
}

impl WedgeMatrix {
    pub fn dim(&self) -> usize {
        basis_len(self.k)
    }

    pub fn operator_norm(&self) -> f64 {
        if self.dim() == 1 {
            self.m.0[0][0].abs()
        } else {
            self.m.spectral_norm()
        }
    }

    pub fn det(&self) -> f64 {
        if self.dim() == 1 {
            self.m.0[0][0]
        } else {
            self.m.det()
        }
    }

    pub fn mul(&self, o: &WedgeMatrix) -> WedgeMatrix {
        assert_eq!(self.k, o.k, "degree mismatch");
        if self.dim() == 1 {
            let mut m = Mat3::ZERO;
            m.0[0][0] = self.m.0[0][0] * o.m.0[0][0];
            WedgeMatrix { k: self.k, m }
        } else {
            WedgeMatrix { k: self.k, m: self.m * o.m }
        }
    }

    /// `w ∘ Λ^k A` for a covector `w`: coefficients `(Λ^k A)ᵀ w`.
    fn precompose(&self, w: &KCovector) -> KCovector {
        if self.dim() == 1 {
            return KCovector { k: w.k, c: [w.c[0] * self.m.0[0][0], 0.0, 0.0] };
        }
        let c = self.m.transpose().mul_vec(w.c);
        KCovector { k: w.k, c }
    }
}

pub fn wedge_power(a: &Mat3, k: usize) -> Result<WedgeMatrix> {
    let m = match k {
        0 => {
            let mut m = Mat3::ZERO;
            m.0[0][0] = 1.0;
            m
        }
        1 => *a,
        2 => {
            // (Λ²A)_{IJ} = det of the rows I, columns J minor.
            let pairs = [(0, 1), (0, 2), (1, 2)];
            let mut m = Mat3::ZERO;
            for (row, &(i, l)) in pairs.iter().enumerate() {
                for (col, &(j, q)) in pairs.iter().enumerate() {
                    m.0[row][col] = a.0[i][j] * a.0[l][q] - a.0[i][q] * a.0[l][j];
                }
            }
            m
        }
        3 => {
            let mut m = Mat3::ZERO;
            m.0[0][0] = a.det();
            m
        }
        _ => return Err(Error::OutOfRange("degree must be in 0..=3")),
    };
    Ok(WedgeMatrix { k, m })
}

/// `(f*w)_x = w ∘ Λ^k Df(x)` with `M = Df(x)`.
pub fn pullback_at(m: &Mat3, w: &KCovector) -> KCovector {
    let wm = wedge_power(m, w.k).expect("KCovector degree is always in range");
    wm.precompose(w)
}

/// `w ∘ Λ^k M⁻¹`.
pub fn pushforward_at(m: &Mat3, w: &KCovector) -> Result<KCovector> {
    let det = m.det();
    if !(det > SINGULAR_TOL) {
        return Err(Error::SingularMatrix { det });
    }
    let inv = m.inverse().ok_or(Error::SingularMatrix { det })?;
    Ok(pullback_at(&inv, w))
}

/// Both sides of `|Λ^k A⁻¹| <= (det A)⁻¹ ‖A‖^{3-k}`.
pub fn wedge_inequality_sides(a: &Mat3, k: usize) -> Result<(f64, f64)> {
    let det = a.det();
    if !(det > SINGULAR_TOL) {
        return Err(Error::SingularMatrix { det });
    }
    let inv = a.inverse().ok_or(Error::SingularMatrix { det })?;
    let lhs = wedge_power(&inv, k)?.operator_norm();
    let rhs = a.spectral_norm().powi(3 - k as i32) / det;
    Ok((lhs, rhs))
}

/// The inequality with a relative slack of `1e-12`, widened to `16 κ ε` for
/// a matrix of condition number `κ` (the roundoff of its inverse).
pub fn check_wedge_inequality(a: &Mat3, k: usize) -> Result<bool> {
    let (lhs, rhs) = wedge_inequality_sides(a, k)?;
    // σ₃ = det / (σ₁σ₂) is accurate where the eigenvalue route is not.
    let sv = a.singular_values();
    let kappa = sv[0] * sv[0] * sv[1] / a.det();
    let slack = 1e-12f64.max(16.0 * kappa * f64::EPSILON);
    Ok(lhs <= rhs * (1.0 + slack) + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &KCovector, b: &KCovector, tol: f64) -> bool {
        a.k == b.k && a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn hodge_examples() {
        let dx = KCovector::basis(1, 0);
        let dy = KCovector::basis(1, 1);
        assert_eq!(hodge_star(&dx), KCovector::basis(2, 2));
        assert_eq!(hodge_star(&KCovector::scalar(1.0)), KCovector::volume(1.0));
        assert_eq!(hodge_star(&dy), KCovector::basis(2, 1).scale(-1.0));
        for k in 0..=3 {
            for i in 0..basis_len(k) {
                let v = KCovector::basis(k, i).scale(1.5);
                assert_eq!(hodge_star(&hodge_star(&v)), v);
            }
        }
    }

    #[test]
    fn hodge_matches_wedge_pairing() {
        // a ∧ ⋆b = <a, b> dx∧dy∧dz.
        for k in 0..=3 {
            for i in 0..basis_len(k) {
                for j in 0..basis_len(k) {
                    let a = KCovector::basis(k, i);
                    let b = KCovector::basis(k, j);
                    let w = wedge(&a, &hodge_star(&b)).unwrap();
                    assert_eq!(w.top(), if i == j { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn wedge_signs() {
        let dx = KCovector::basis(1, 0);
        let dy = KCovector::basis(1, 1);
        let dz = KCovector::basis(1, 2);
        assert_eq!(wedge(&dy, &dx).unwrap(), KCovector::basis(2, 0).scale(-1.0));
        assert_eq!(wedge(&dz, &KCovector::basis(2, 0)).unwrap(), KCovector::volume(1.0));
        assert_eq!(wedge(&dy, &KCovector::basis(2, 1)).unwrap(), KCovector::volume(-1.0));
        assert_eq!(wedge(&dx, &dx).unwrap(), KCovector::zero(2));
        assert!(wedge(&KCovector::basis(2, 0), &KCovector::basis(2, 1)).is_err());
    }

    #[test]
    fn wedge_power_examples() {
        let a = Mat3::from_rows([[1.0, 2.0, 3.0], [0.5, -1.0, 4.0], [2.0, 0.0, 1.0]]);
        assert_eq!(wedge_power(&a, 1).unwrap().m, a);
        assert_eq!(wedge_power(&a, 3).unwrap().det(), a.det());
        let d = wedge_power(&Mat3::diag([2.0, 3.0, 5.0]), 2).unwrap();
        assert_eq!(d.m, Mat3::diag([6.0, 10.0, 15.0]));
    }

    #[test]
    fn pullback_matches_basis_evaluation() {
        // (f*w)(e_j ∧ e_l) = w(Ae_j ∧ Ae_l), expanded through wedge of 1-forms.
        let a = Mat3::from_rows([[0.3, -1.2, 0.7], [1.1, 0.4, -0.5], [0.2, 0.9, 1.3]]);
        let w = KCovector::new(2, &[0.7, -0.2, 1.9]).unwrap();
        let pulled = pullback_at(&a, &w);
        let pairs = [(0, 1), (0, 2), (1, 2)];
        for (idx, &(j, l)) in pairs.iter().enumerate() {
            let u = a.col(j);
            let v = a.col(l);
            // w(u ∧ v) = Σ_I w_I (u_i v_m - u_m v_i)
            let val: f64 = pairs.iter().enumerate().map(|(i, &(p, q))| w.coeffs()[i] * (u[p] * v[q] - u[q] * v[p])).sum();
            assert!((pulled.coeffs()[idx] - val).abs() < 1e-14);
        }
        let top = pullback_at(&a, &KCovector::volume(2.0));
        assert!((top.top() - 2.0 * a.det()).abs() < 1e-14);
    }

    #[test]
    fn pushforward_inverts_pullback() {
        let a = Mat3::from_rows([[2.0, 0.1, 0.0], [0.3, 1.0, -0.2], [0.0, 0.5, 1.5]]);
        for k in 0..=3 {
            let w = KCovector::new(k, &[0.4, -1.0, 2.5][..basis_len(k)]).unwrap();
            let back = pushforward_at(&a, &pullback_at(&a, &w)).unwrap();
            assert!(close(&back, &w, 1e-13));
        }
        let vol = pushforward_at(&a, &KCovector::volume(1.0)).unwrap();
        assert!((vol.top() - 1.0 / a.det()).abs() < 1e-14);
        assert!(matches!(pushforward_at(&Mat3::diag([1.0, 0.0, 1.0]), &KCovector::basis(1, 0)), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn wedge_inequality_examples() {
        assert!(check_wedge_inequality(&Mat3::IDENTITY, 1).unwrap());
        assert_eq!(wedge_inequality_sides(&Mat3::IDENTITY, 1).unwrap(), (1.0, 1.0));
        let (l, r) = wedge_inequality_sides(&Mat3::diag([2.0, 1.0, 1.0]), 1).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 2.0).abs() < 1e-15);
        assert!(check_wedge_inequality(&Mat3::diag([-1.0, 1.0, 1.0]), 1).is_err());
    }
}
