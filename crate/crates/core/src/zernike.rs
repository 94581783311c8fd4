//! Zernike polynomials on the unit disk.
//!
//! Functions are indexed by a radial degree `m` and a signed azimuthal
//! frequency `l` (`|l| ≤ m`, `m − |l|` even), or equivalently by the single
//! index `j = (m(m+2) + l)/2`. Non-negative `l` carries the cosine factor and
//! negative `l` the sine factor:
//!
//! ```text
//! Z_j(ρ, φ) = N_m^|l| R_m^|l|(ρ) cos(|l| φ)   (l ≥ 0)
//! Z_j(ρ, φ) = N_m^|l| R_m^|l|(ρ) sin(|l| φ)   (l < 0)
//! ```
//!
//! Radial polynomials are evaluated through the shifted Jacobi identity
//! `R_m^l(ρ) = (−1)^((m−l)/2) ρ^l P_((m−l)/2)^(l,0)(1 − 2ρ²)` and a three-term
//! recurrence, which stays accurate well past the degree where factorial sums
//! overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

/// Radii above 1 by at most this much are clamped onto the unit circle.
pub const RADIUS_CLAMP_TOL: f64 = 1e-12;

/// Number of Zernike functions of degree at most `r`: `(r+1)(r+2)/2`.
pub const fn basis_dimension(r: usize) -> usize {
    (r + 1) * (r + 2) / 2
}

/// Address of a single Zernike function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZernikeIndex {
    m: u32,
    l: i32,
}

impl ZernikeIndex {
    pub fn new(m: u32, l: i32) -> Result<Self> {
        let al = l.unsigned_abs();
        if al > m || !(m - al).is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "invalid Zernike pair (m={m}, l={l}): need |l| <= m and m - |l| even"
            )));
        }
        Ok(Self { m, l })
    }

    /// Inverse of [`ZernikeIndex::linear`].
    pub fn from_linear(j: usize) -> Self {
        // Degree m covers j in [m(m+1)/2, m(m+3)/2].
        let mut m = (((8.0 * j as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as usize;
        while m * (m + 1) / 2 > j {
            m -= 1;
        }
        while (m + 1) * (m + 2) / 2 <= j {
            m += 1;
        }
        let l = 2 * j as i64 - (m * (m + 2)) as i64;
        Self {
            m: m as u32,
            l: l as i32,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn l(&self) -> i32 {
        self.l
    }

    pub fn linear(&self) -> usize {
        ((self.m as i64 * (self.m as i64 + 2) + self.l as i64) / 2) as usize
    }
}

/// `j -> (m, l)`.
pub fn index_to_pair(j: usize) -> ZernikeIndex {
    ZernikeIndex::from_linear(j)
}

/// `(m, l) -> j`.
pub fn pair_to_index(m: u32, l: i32) -> Result<usize> {
    Ok(ZernikeIndex::new(m, l)?.linear())
}

/// A point of the closed unit disk in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint<T> {
    rho: T,
    phi: T,
}

impl<T: Real> PolarPoint<T> {
    /// Builds a point, clamping radii within [`RADIUS_CLAMP_TOL`] of the unit
    /// circle and wrapping the angle into `[0, 2π)`.
    pub fn new(rho: T, phi: T) -> Result<Self> {
        if !rho.is_finite() || !phi.is_finite() {
            return Err(Error::Parameter("non-finite polar coordinate".into()));
        }
        if rho < T::zero() {
            return Err(Error::Parameter(format!("negative radius {rho}")));
        }
        let tol = T::lit(RADIUS_CLAMP_TOL).max(T::epsilon() * T::lit(4.0));
        let rho = if rho > T::one() {
            if rho - T::one() > tol {
                return Err(Error::OutsideDomain {
                    radius: rho.to_f64_lossy(),
                });
            }
            T::one()
        } else {
            rho
        };
        Ok(Self {
            rho,
            phi: wrap_angle(phi),
        })
    }

    /// Polar form of a Cartesian disk point `(u, v)`.
    pub fn from_cartesian(u: T, v: T) -> Result<Self> {
        Self::new(u.hypot(v), v.atan2(u))
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn to_cartesian(&self) -> (T, T) {
        (self.rho * self.phi.cos(), self.rho * self.phi.sin())
    }
}

/// Scaling convention for the Zernike functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `N_m^l = √(2(m+1))` (or `√(m+1)` for `l = 0`); orthonormal for the
    /// area-averaged measure `dx dy / π`, so `Z_0 ≡ 1`.
    #[default]
    AreaMean,
    /// Additionally divided by `√π`; orthonormal for plain `dx dy` on the disk.
    Lebesgue,
}

impl Normalization {
    /// Normalization factor for radial degree `m` and azimuthal order `|l|`.
    pub fn factor<T: Real>(self, m: u32, abs_l: u32) -> T {
        let base = if abs_l == 0 {
            T::from_count(m as usize + 1).sqrt()
        } else {
            (T::lit(2.0) * T::from_count(m as usize + 1)).sqrt()
        };
        match self {
            Normalization::AreaMean => base,
            Normalization::Lebesgue => base / T::PI().sqrt(),
        }
    }
}

/// Values of `P_k^(a,0)(x)` for `k = 0..=kmax`.
fn jacobi_family<T: Real>(a: u32, kmax: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(T::one());
    if kmax == 0 {
        return out;
    }
    let af = T::from_count(a as usize);
    let two = T::lit(2.0);
    out.push(af + T::one() + (af + two) * (x - T::one()) / two);
    for k in 2..=kmax {
        let n = T::from_count(k);
        let s = two * n + af;
        let lead = two * n * (n + af) * (s - two);
        let c1 = (s - T::one()) * (s * (s - two) * x + af * af);
        let c2 = two * (n + af - T::one()) * (n - T::one()) * s;
        let next = (c1 * out[k - 1] - c2 * out[k - 2]) / lead;
        out.push(next);
    }
    out
}

/// `R_{l+2k}^l(ρ)` for `k = 0..=kmax`, sharing one Jacobi recurrence.
pub fn radial_family<T: Real>(l: u32, kmax: usize, rho: T) -> Vec<T> {
    let x = T::one() - T::lit(2.0) * rho * rho;
    let rho_l = rho.powi(l as i32);
    let mut fam = jacobi_family(l, kmax, x);
    for (k, v) in fam.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        *v = sign * rho_l * *v;
    }
    fam
}

/// Radial polynomial `R_m^l(ρ)` for `l ≥ 0`.
pub fn radial_poly<T: Real>(m: u32, l: u32, rho: T) -> Result<T> {
    if l > m || !(m - l).is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "invalid radial pair (m={m}, l={l}): need l <= m and m - l even"
        )));
    }
    if !(rho >= T::zero() && rho <= T::one() + T::lit(RADIUS_CLAMP_TOL)) {
        return Err(Error::Parameter(format!("radius {rho} outside [0, 1]")));
    }
    let k = ((m - l) / 2) as usize;
    Ok(radial_family(l, k, rho)[k])
}

/// `Z_j` at a disk point, paper-style normalization.
pub fn zernike_eval<T: Real>(idx: ZernikeIndex, pt: PolarPoint<T>) -> T {
    zernike_eval_with(idx, pt, Normalization::AreaMean)
}

pub fn zernike_eval_with<T: Real>(idx: ZernikeIndex, pt: PolarPoint<T>, norm: Normalization) -> T {
    let al = idx.l.unsigned_abs();
    let k = ((idx.m - al) / 2) as usize;
    let r = radial_family(al, k, pt.rho)[k];
    let ang = T::from_count(al as usize) * pt.phi;
    let trig = if idx.l >= 0 { ang.cos() } else { ang.sin() };
    norm.factor::<T>(idx.m, al) * r * trig
}

/// `[Z_0(pt), …, Z_{R̃−1}(pt)]` for all functions of degree at most `r_tilde`.
pub fn basis_row<T: Real>(r_tilde: usize, pt: PolarPoint<T>, norm: Normalization) -> Vec<T> {
    let mut row = vec![T::zero(); basis_dimension(r_tilde)];
    basis_row_into(r_tilde, pt, norm, &mut row);
    row
}

/// In-place variant of [`basis_row`]; `out` must hold `basis_dimension(r_tilde)`
/// entries.
pub fn basis_row_into<T: Real>(r_tilde: usize, pt: PolarPoint<T>, norm: Normalization, out: &mut [T]) {
    debug_assert_eq!(out.len(), basis_dimension(r_tilde));
    for l in 0..=r_tilde {
        let kmax = (r_tilde - l) / 2;
        let fam = radial_family(l as u32, kmax, pt.rho);
        let ang = T::from_count(l) * pt.phi;
        let (s, c) = ang.sin_cos();
        for (k, r) in fam.into_iter().enumerate() {
            let m = l + 2 * k;
            let nf = norm.factor::<T>(m as u32, l as u32);
            let base = m * (m + 2);
            out[(base + l) / 2] = nf * r * c;
            if l > 0 {
                out[(base - l) / 2] = nf * r * s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    /// Direct factorial sum, exact integer coefficients (m ≤ 30 fits in u128).
    fn radial_direct(m: u32, l: u32, rho: f64) -> f64 {
        fn fact(n: u32) -> u128 {
            (1..=n as u128).product()
        }
        let mut s = 0.0;
        for i in 0..=((m - l) / 2) {
            let num = fact(m - i);
            let den = fact(i) * fact((m + l) / 2 - i) * fact((m - l) / 2 - i);
            let c = (num / den) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * c * rho.powi((m - 2 * i) as i32);
        }
        s
    }

    #[test]
    fn radial_examples() {
        assert_eq!(radial_poly(0, 0, 0.7).unwrap(), 1.0);
        assert_relative_eq!(radial_poly(3, 3, 0.5).unwrap(), 0.125, epsilon = 1e-15);
        assert_relative_eq!(radial_poly(2, 0, 0.5).unwrap(), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn radial_rejects_bad_parity() {
        assert!(radial_poly::<f64>(3, 0, 0.5).is_err());
        assert!(radial_poly::<f64>(2, 4, 0.5).is_err());
        assert!(radial_poly::<f64>(2, 0, 1.5).is_err());
    }

    #[test]
    fn radial_matches_factorial_sum() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for m in 0..=20u32 {
            for l in (m % 2..=m).step_by(2) {
                for _ in 0..50 {
                    let rho = next();
                    let a = radial_poly(m, l, rho).unwrap();
                    let b = radial_direct(m, l, rho);
                    assert!(
                        (a - b).abs() <= 1e-9 * b.abs().max(1.0),
                        "m={m} l={l} rho={rho}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn zernike_examples() {
        let any = PolarPoint::new(0.3, 1.1).unwrap();
        assert_eq!(zernike_eval(ZernikeIndex::new(0, 0).unwrap(), any), 1.0);
        let p = PolarPoint::new(1.0, 0.0).unwrap();
        assert_relative_eq!(zernike_eval(ZernikeIndex::new(1, 1).unwrap(), p), 2.0, epsilon = 1e-14);
        let p = PolarPoint::new(1.0, FRAC_PI_4).unwrap();
        assert_relative_eq!(
            zernike_eval(ZernikeIndex::new(2, -2).unwrap(), p),
            6f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn index_examples() {
        assert_eq!(pair_to_index(0, 0).unwrap(), 0);
        assert_eq!(pair_to_index(1, -1).unwrap(), 1);
        assert_eq!(pair_to_index(1, 1).unwrap(), 2);
        let idx = index_to_pair(4);
        assert_eq!((idx.m(), idx.l()), (2, 0));
        assert!(pair_to_index(2, 1).is_err());
    }

    #[test]
    fn index_bijection_and_enumeration() {
        for j in 0..2000 {
            let idx = index_to_pair(j);
            assert_eq!(pair_to_index(idx.m(), idx.l()).unwrap(), j);
        }
        // For each r, {0..R̃} enumerates all valid pairs of degree ≤ r once.
        for r in 0..12u32 {
            let mut seen = std::collections::HashSet::new();
            for m in 0..=r {
                for l in (-(m as i32)..=m as i32).step_by(2) {
                    assert!(seen.insert(pair_to_index(m, l).unwrap()));
                }
            }
            let dim = basis_dimension(r as usize);
            assert_eq!(seen.len(), dim);
            assert!(seen.iter().all(|&j| j < dim));
        }
    }

    #[test]
    fn basis_row_examples() {
        let any = PolarPoint::new(0.4, 2.0).unwrap();
        assert_eq!(basis_row(0, any, Normalization::AreaMean), vec![1.0]);
        let origin = PolarPoint::new(0.0, 1.3).unwrap();
        assert_eq!(basis_row(1, origin, Normalization::AreaMean), vec![1.0, 0.0, 0.0]);
        let p = PolarPoint::new(1.0, 0.0).unwrap();
        let row = basis_row(2, p, Normalization::AreaMean);
        for (j, v) in row.iter().enumerate() {
            assert_relative_eq!(*v, zernike_eval(index_to_pair(j), p), epsilon = 1e-14);
        }
    }

    #[test]
    fn lebesgue_scales_by_inverse_sqrt_pi() {
        let p = PolarPoint::new(0.6, 0.9).unwrap();
        let a = basis_row(6, p, Normalization::AreaMean);
        let b = basis_row(6, p, Normalization::Lebesgue);
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(*y, *x / PI.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn polar_point_clamps_and_rejects() {
        let p = PolarPoint::new(1.0 + 5e-13, -0.5).unwrap();
        assert_eq!(p.rho(), 1.0);
        assert!(p.phi() >= 0.0 && p.phi() < 2.0 * PI);
        assert!(PolarPoint::new(1.0 + 1e-9, 0.0).is_err());
    }

    #[test]
    fn radial_bounded_by_one_dense_grid() {
        for m in 0..=30u32 {
            for l in (m % 2..=m).step_by(2) {
                for i in 0..=400 {
                    let rho = i as f64 / 400.0;
                    let v = radial_poly(m, l, rho).unwrap();
                    assert!(v.abs() <= 1.0 + 1e-12, "m={m} l={l} rho={rho} v={v}");
                }
            }
        }
    }

    #[test]
    fn high_degree_stays_bounded() {
        // Factorial sums lose all accuracy here; the recurrence must not.
        for &rho in &[0.1f64, 0.5, 0.9, 0.99, 1.0] {
            let v = radial_poly(60, 0, rho).unwrap();
            assert!(v.abs() <= 1.0 + 1e-10);
        }
        assert_relative_eq!(radial_poly(60, 0, 1.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn f32_evaluation_agrees() {
        let p64 = PolarPoint::new(0.7f64, 1.2).unwrap();
        let p32 = PolarPoint::new(0.7f32, 1.2).unwrap();
        let a = basis_row(8, p64, Normalization::AreaMean);
        let b = basis_row(8, p32, Normalization::AreaMean);
        for (x, y) in a.iter().zip(&b) {
            assert!((*x - *y as f64).abs() < 1e-4);
        }
    }

    proptest! {
        #[test]
        fn zernike_bounded_by_normalization(j in 0usize..496, rho in 0.0f64..=1.0, phi in 0.0f64..std::f64::consts::TAU) {
            let idx = index_to_pair(j);
            let v = zernike_eval(idx, PolarPoint::new(rho, phi).unwrap());
            let bound: f64 = Normalization::AreaMean.factor(idx.m(), idx.l().unsigned_abs());
            prop_assert!(v.abs() <= bound * (1.0 + 1e-12));
        }
    }
}
