//! Planar domains, their disk diffeomorphisms, and the mapped Zernike bases.
//!
//! Every domain Ω is the image of the closed unit disk under a map φ:
//!
//! * ellipse: `φ(u, v) = (A u cos α − B v sin α, A u sin α + B v cos α)`
//! * annulus: radius `ρ ↦ A((1−h)ρ + h)`, angle preserved
//! * polygon (circumradius 1, `p` sides, a vertex at angle `π/p`):
//!   radius `ρ ↦ ρ R_α(φ)`, angle preserved
//!
//! Basis functions on Ω are Zernike functions composed with φ⁻¹, optionally
//! multiplied by a Jacobian-derived factor (see [`BasisVariant`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};
use crate::zernike::{basis_dimension, basis_row_into, index_to_pair, zernike_eval_with, Normalization, PolarPoint};

/// Tolerance on the disk preimage radius when testing membership.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Cartesian point in the target domain.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanePoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> PlanePoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn radius(&self) -> T {
        self.x.hypot(self.y)
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(&self) -> T {
        wrap_angle(self.y.atan2(self.x))
    }

    pub fn distance_sq(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// One of the supported domains.
///
/// Serializes as `{"tag": "disk"}`, `{"tag": "ellipse", "A": 1.5, "B": 1}`,
/// `{"tag": "annulus", "A": 1, "h": 0.25}` or `{"tag": "polygon", "p": 12}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Deserialize<'de> + Default"
))]
pub enum DomainSpec<T> {
    Disk,
    Ellipse {
        #[serde(rename = "A")]
        a: T,
        #[serde(rename = "B")]
        b: T,
        #[serde(default)]
        alpha_rot: T,
    },
    Annulus {
        #[serde(rename = "A")]
        outer: T,
        h: T,
    },
    Polygon {
        p: u32,
    },
}

/// `U_α(φ) = φ − ⌊(φ+α)/(2α)⌋·2α`, the offset from the nearest edge-midpoint
/// direction, in `[−α, α)`.
pub fn u_alpha<T: Real>(p: u32, phi: T) -> T {
    let alpha = T::PI() / T::from_count(p as usize);
    let two_alpha = alpha + alpha;
    let phi = wrap_angle(phi);
    phi - ((phi + alpha) / two_alpha).floor() * two_alpha
}

/// `R_α(φ) = cos α / cos U_α(φ)`: boundary radius of the regular `p`-gon in
/// direction `φ`.
pub fn r_alpha<T: Real>(p: u32, phi: T) -> T {
    let alpha = T::PI() / T::from_count(p as usize);
    alpha.cos() / u_alpha(p, phi).cos()
}

impl<T: Real> DomainSpec<T> {
    pub fn disk() -> Self {
        DomainSpec::Disk
    }

    pub fn ellipse(a: T, b: T) -> Result<Self> {
        Self::rotated_ellipse(a, b, T::zero())
    }

    pub fn rotated_ellipse(a: T, b: T, alpha_rot: T) -> Result<Self> {
        let d = DomainSpec::Ellipse { a, b, alpha_rot };
        d.validate()?;
        Ok(d)
    }

    pub fn annulus(outer: T, h: T) -> Result<Self> {
        let d = DomainSpec::Annulus { outer, h };
        d.validate()?;
        Ok(d)
    }

    pub fn polygon(p: u32) -> Result<Self> {
        let d = DomainSpec::Polygon { p };
        d.validate()?;
        Ok(d)
    }

    /// Ellipse with semi-axes 1.5 and 1.
    pub fn paper_ellipse() -> Self {
        DomainSpec::Ellipse {
            a: T::lit(1.5),
            b: T::one(),
            alpha_rot: T::zero(),
        }
    }

    /// Annulus with radii 1/4 and 1.
    pub fn paper_annulus() -> Self {
        DomainSpec::Annulus {
            outer: T::one(),
            h: T::lit(0.25),
        }
    }

    /// Regular dodecagon.
    pub fn paper_polygon() -> Self {
        DomainSpec::Polygon { p: 12 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainSpec::Disk => Ok(()),
            DomainSpec::Ellipse { a, b, alpha_rot } => {
                if !(a.is_finite() && b.is_finite() && alpha_rot.is_finite()) || !(b > T::zero() && a >= b) {
                    Err(Error::Parameter(format!("ellipse needs A >= B > 0 (A={a}, B={b})")))
                } else {
                    Ok(())
                }
            }
            DomainSpec::Annulus { outer, h } => {
                if !(outer.is_finite() && outer > T::zero()) || !(h > T::zero() && h < T::one()) {
                    Err(Error::Parameter(format!("annulus needs A > 0 and 0 < h < 1 (A={outer}, h={h})")))
                } else {
                    Ok(())
                }
            }
            DomainSpec::Polygon { p } => {
                if p < 3 {
                    Err(Error::Parameter(format!("polygon needs p >= 3 (p={p})")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DomainSpec::Disk => "disk",
            DomainSpec::Ellipse { .. } => "ellipse",
            DomainSpec::Annulus { .. } => "annulus",
            DomainSpec::Polygon { .. } => "polygon",
        }
    }

    /// Exact area of the domain.
    pub fn area(&self) -> T {
        match *self {
            DomainSpec::Disk => T::PI(),
            DomainSpec::Ellipse { a, b, .. } => T::PI() * a * b,
            DomainSpec::Annulus { outer, h } => {
                let inner = h * outer;
                T::PI() * (outer * outer - inner * inner)
            }
            DomainSpec::Polygon { p } => {
                let pf = T::from_count(p as usize);
                pf / T::lit(2.0) * (T::TAU() / pf).sin()
            }
        }
    }

    /// Radius of the smallest origin-centred disk containing the domain.
    pub fn outer_radius(&self) -> T {
        match *self {
            DomainSpec::Disk | DomainSpec::Polygon { .. } => T::one(),
            DomainSpec::Ellipse { a, .. } => a,
            DomainSpec::Annulus { outer, .. } => outer,
        }
    }

    /// Image of a disk point under the diffeomorphism.
    pub fn map_forward(&self, q: PolarPoint<T>) -> PlanePoint<T> {
        match *self {
            DomainSpec::Disk => {
                let (u, v) = q.to_cartesian();
                PlanePoint::new(u, v)
            }
            DomainSpec::Ellipse { a, b, alpha_rot } => {
                let (u, v) = q.to_cartesian();
                let (s, c) = alpha_rot.sin_cos();
                PlanePoint::new(a * u * c - b * v * s, a * u * s + b * v * c)
            }
            DomainSpec::Annulus { outer, h } => {
                let r = outer * ((T::one() - h) * q.rho() + h);
                let (s, c) = q.phi().sin_cos();
                PlanePoint::new(r * c, r * s)
            }
            DomainSpec::Polygon { p } => {
                let r = q.rho() * r_alpha(p, q.phi());
                let (s, c) = q.phi().sin_cos();
                PlanePoint::new(r * c, r * s)
            }
        }
    }

    /// Image of a Cartesian disk point `(u, v)`.
    pub fn map_forward_uv(&self, u: T, v: T) -> Result<PlanePoint<T>> {
        Ok(self.map_forward(PolarPoint::from_cartesian(u, v)?))
    }

    /// Disk preimage radius and angle, without any range check. The annulus
    /// radius is negative for points inside the central hole.
    pub fn preimage_raw(&self, pt: PlanePoint<T>) -> (T, T) {
        match *self {
            DomainSpec::Disk => (pt.radius(), pt.angle()),
            DomainSpec::Ellipse { a, b, alpha_rot } => {
                let (s, c) = alpha_rot.sin_cos();
                let u = (pt.x * c + pt.y * s) / a;
                let v = (-pt.x * s + pt.y * c) / b;
                (u.hypot(v), wrap_angle(v.atan2(u)))
            }
            DomainSpec::Annulus { outer, h } => {
                let r = pt.radius();
                ((r - h * outer) / (outer * (T::one() - h)), pt.angle())
            }
            DomainSpec::Polygon { p } => {
                let theta = pt.angle();
                (pt.radius() / r_alpha(p, theta), theta)
            }
        }
    }

    pub fn contains(&self, pt: PlanePoint<T>) -> bool {
        let (rho, _) = self.preimage_raw(pt);
        let tol = T::lit(MEMBERSHIP_TOL);
        rho >= -tol && rho <= T::one() + tol
    }

    /// Unique disk preimage of a domain point.
    pub fn map_inverse(&self, pt: PlanePoint<T>) -> Result<PolarPoint<T>> {
        let (rho, phi) = self.preimage_raw(pt);
        let tol = T::lit(MEMBERSHIP_TOL);
        if !(rho >= -tol && rho <= T::one() + tol) {
            return Err(Error::OutsideDomain {
                radius: rho.to_f64_lossy(),
            });
        }
        let rho = rho.max(T::zero()).min(T::one());
        PolarPoint::new(rho, phi)
    }

    /// `|J_{φ⁻¹}|` at a domain point.
    pub fn jacobian_inverse_map(&self, pt: PlanePoint<T>) -> T {
        match *self {
            DomainSpec::Disk => T::one(),
            DomainSpec::Ellipse { a, b, .. } => T::one() / (a * b),
            DomainSpec::Annulus { outer, h } => {
                let r = pt.radius();
                let one_h = T::one() - h;
                ((r - h * outer) / (r * outer * outer * one_h * one_h)).max(T::zero())
            }
            DomainSpec::Polygon { p } => {
                let ra = r_alpha(p, pt.angle());
                T::one() / (ra * ra)
            }
        }
    }

    /// `|J_φ|` at a disk point, so that `∫_Ω f = ∫_D (f∘φ)|J_φ|`.
    ///
    /// For the annulus the factor `r(ρ)(A − a)/ρ` is singular at `ρ = 0`.
    pub fn jacobian_forward(&self, q: PolarPoint<T>) -> T {
        match *self {
            DomainSpec::Disk => T::one(),
            DomainSpec::Ellipse { a, b, .. } => a * b,
            DomainSpec::Annulus { outer, h } => {
                let r = outer * ((T::one() - h) * q.rho() + h);
                r * outer * (T::one() - h) / q.rho()
            }
            DomainSpec::Polygon { p } => {
                let ra = r_alpha(p, q.phi());
                ra * ra
            }
        }
    }

    /// Basis variant used when none is requested.
    pub fn default_variant(&self) -> BasisVariant {
        BasisVariant::Plain
    }
}

/// Which of the two mapped families to use.
///
/// | domain  | `Plain`                      | `JacobianWeighted`          |
/// |---------|------------------------------|-----------------------------|
/// | disk    | `Z_j`                        | `Z_j`                       |
/// | ellipse | `E_j = Z_j∘φ⁻¹ / √(AB)`      | same as `Plain`             |
/// | annulus | `O_j = Z_j∘φ⁻¹`              | `Õ_j = √J · O_j`            |
/// | polygon | `K_j = Z_j∘φ⁻¹`              | `K̃_j = K_j / R_α(θ)`        |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisVariant {
    #[default]
    Plain,
    JacobianWeighted,
}

/// A mapped Zernike family on a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Deserialize<'de> + Default"
))]
pub struct MappedBasis<T> {
    pub domain: DomainSpec<T>,
    pub variant: BasisVariant,
    #[serde(default)]
    pub normalization: Normalization,
}

impl<T: Real> MappedBasis<T> {
    pub fn new(domain: DomainSpec<T>, variant: BasisVariant) -> Self {
        Self {
            domain,
            variant,
            normalization: Normalization::AreaMean,
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// Factor multiplying `Z_j∘φ⁻¹` at `pt`.
    pub fn scale_at(&self, pt: PlanePoint<T>) -> T {
        match (self.domain, self.variant) {
            (DomainSpec::Disk, _) => T::one(),
            (DomainSpec::Ellipse { a, b, .. }, _) => T::one() / (a * b).sqrt(),
            (DomainSpec::Annulus { .. }, BasisVariant::Plain) => T::one(),
            (DomainSpec::Annulus { .. }, BasisVariant::JacobianWeighted) => {
                self.domain.jacobian_inverse_map(pt).sqrt()
            }
            (DomainSpec::Polygon { .. }, BasisVariant::Plain) => T::one(),
            (DomainSpec::Polygon { p }, BasisVariant::JacobianWeighted) => T::one() / r_alpha(p, pt.angle()),
        }
    }

    /// Weight `w` for which `∫_Ω u_j u_k w dx dy` is the disk inner product
    /// of `Z_j` and `Z_k`.
    pub fn orthogonality_weight(&self, pt: PlanePoint<T>) -> T {
        match (self.domain, self.variant) {
            (DomainSpec::Annulus { .. }, BasisVariant::Plain) | (DomainSpec::Polygon { .. }, BasisVariant::Plain) => {
                self.domain.jacobian_inverse_map(pt)
            }
            _ => T::one(),
        }
    }

    /// `u_j(pt)`.
    pub fn eval(&self, j: usize, pt: PlanePoint<T>) -> Result<T> {
        let q = self.domain.map_inverse(pt)?;
        Ok(self.scale_at(pt) * zernike_eval_with(index_to_pair(j), q, self.normalization))
    }

    /// `[u_0(pt), …, u_{R̃−1}(pt)]`.
    pub fn row(&self, r_tilde: usize, pt: PlanePoint<T>) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); basis_dimension(r_tilde)];
        self.row_into(r_tilde, pt, &mut out)?;
        Ok(out)
    }

    pub fn row_into(&self, r_tilde: usize, pt: PlanePoint<T>, out: &mut [T]) -> Result<()> {
        let q = self.domain.map_inverse(pt)?;
        basis_row_into(r_tilde, q, self.normalization, out);
        let s = self.scale_at(pt);
        if s != T::one() {
            for v in out.iter_mut() {
                *v *= s;
            }
        }
        Ok(())
    }
}

/// `u_j(pt)` for the given domain and variant, paper normalization.
pub fn mapped_basis_eval<T: Real>(dom: DomainSpec<T>, variant: BasisVariant, j: usize, pt: PlanePoint<T>) -> Result<T> {
    MappedBasis::new(dom, variant).eval(j, pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_8, PI};

    fn all_domains() -> Vec<DomainSpec<f64>> {
        vec![
            DomainSpec::disk(),
            DomainSpec::paper_ellipse(),
            DomainSpec::rotated_ellipse(2.0, 0.5, 0.7).unwrap(),
            DomainSpec::paper_annulus(),
            DomainSpec::annulus(2.0, 0.6).unwrap(),
            DomainSpec::polygon(3).unwrap(),
            DomainSpec::polygon(8).unwrap(),
            DomainSpec::paper_polygon(),
        ]
    }

    #[test]
    fn forward_examples() {
        let e = DomainSpec::ellipse(1.5, 1.0).unwrap();
        let p = e.map_forward_uv(1.0, 0.0).unwrap();
        assert_relative_eq!(p.x, 1.5);
        assert_relative_eq!(p.y, 0.0);

        let an = DomainSpec::annulus(1.0, 0.25).unwrap();
        let p = an.map_forward(PolarPoint::new(0.0, 0.0).unwrap());
        assert_relative_eq!(p.x, 0.25);
        let p = an.map_forward(PolarPoint::new(0.5, 0.0).unwrap());
        assert_relative_eq!(p.x, 0.625);
        assert_relative_eq!(p.y, 0.0);

        let poly = DomainSpec::polygon(8).unwrap();
        let p = poly.map_forward(PolarPoint::new(1.0, FRAC_PI_8).unwrap());
        assert_relative_eq!(p.radius(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_examples() {
        let e = DomainSpec::ellipse(1.5, 1.0).unwrap();
        let q = e.map_inverse(PlanePoint::new(1.5, 0.0)).unwrap();
        assert_relative_eq!(q.rho(), 1.0);
        assert_eq!(q.phi(), 0.0);

        let an = DomainSpec::annulus(1.0, 0.25).unwrap();
        let q = an.map_inverse(PlanePoint::new(0.0, 1.0)).unwrap();
        assert_relative_eq!(q.rho(), 1.0);

        let poly = DomainSpec::polygon(12).unwrap();
        let apothem = (PI / 12.0).cos();
        let q = poly.map_inverse(PlanePoint::new(apothem, 0.0)).unwrap();
        assert_relative_eq!(q.rho(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_rejects_outside_with_radius() {
        let an = DomainSpec::annulus(1.0, 0.25).unwrap();
        match an.map_inverse(PlanePoint::new(0.1, 0.0)) {
            Err(Error::OutsideDomain { radius }) => assert_relative_eq!(radius, -0.2, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        let poly = DomainSpec::polygon(12).unwrap();
        assert!(poly.map_inverse(PlanePoint::new(1.0, 0.0)).is_err());
        assert!(poly.map_inverse(PlanePoint::new((PI / 12.0).cos() + 1e-12, 0.0)).is_ok());
    }

    #[test]
    fn r_alpha_examples() {
        assert_relative_eq!(r_alpha(8, 0.0), FRAC_PI_8.cos(), epsilon = 1e-15);
        assert_relative_eq!(r_alpha(8, FRAC_PI_8), 1.0, epsilon = 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = rng.random_range(3..20u32);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let a = PI / p as f64;
            let r1 = r_alpha(p, phi);
            let r2 = r_alpha(p, phi + 2.0 * a);
            assert!((r1 - r2).abs() < 1e-12);
            assert!(r1 >= a.cos() - 1e-15 && r1 <= 1.0 + 1e-12);
            let u = u_alpha(p, phi);
            assert!(u >= -a - 1e-15 && u < a + 1e-15);
        }
    }

    #[test]
    fn r_alpha_continuous_across_seams() {
        for p in [3u32, 5, 8, 12] {
            let a = PI / p as f64;
            for k in 0..p {
                let seam = a + 2.0 * a * k as f64;
                let jump = (r_alpha(p, seam - 1e-13) - r_alpha(p, seam + 1e-13)).abs();
                assert!(jump < 1e-12, "p={p} k={k} jump={jump}");
            }
        }
    }

    #[test]
    fn jacobian_examples() {
        let e = DomainSpec::ellipse(1.5, 1.0).unwrap();
        assert_relative_eq!(e.jacobian_inverse_map(PlanePoint::new(0.3, 0.2)), 1.0 / 1.5);
        let an = DomainSpec::annulus(1.0, 0.25).unwrap();
        assert_eq!(an.jacobian_inverse_map(PlanePoint::new(0.25, 0.0)), 0.0);
        let poly = DomainSpec::polygon(12).unwrap();
        let a = PI / 12.0;
        let vtx = PlanePoint::new(0.5 * a.cos(), 0.5 * a.sin());
        assert_relative_eq!(poly.jacobian_inverse_map(vtx), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobians_are_reciprocal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for dom in all_domains() {
            for _ in 0..200 {
                let q = PolarPoint::new(rng.random_range(0.01..1.0), rng.random_range(0.0..2.0 * PI)).unwrap();
                let x = dom.map_forward(q);
                let prod = dom.jacobian_forward(q) * dom.jacobian_inverse_map(x);
                assert_relative_eq!(prod, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mapped_basis_examples() {
        let e = DomainSpec::ellipse(1.5, 1.0).unwrap();
        let v = mapped_basis_eval(e, BasisVariant::Plain, 0, PlanePoint::new(0.4, -0.3)).unwrap();
        assert_relative_eq!(v, 1.0 / 1.5f64.sqrt(), epsilon = 1e-15);

        let an = DomainSpec::annulus(1.0, 0.25).unwrap();
        let theta = 1.1f64;
        let pt = PlanePoint::new(theta.cos(), theta.sin());
        for j in 0..15 {
            let v = mapped_basis_eval(an, BasisVariant::Plain, j, pt).unwrap();
            let z = crate::zernike::zernike_eval(index_to_pair(j), PolarPoint::new(1.0, theta).unwrap());
            assert_relative_eq!(v, z, epsilon = 1e-12);
        }

        let poly = DomainSpec::polygon(12).unwrap();
        let v = mapped_basis_eval(poly, BasisVariant::Plain, 0, PlanePoint::new(0.2, 0.7)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn round_trip_and_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for dom in all_domains() {
            for _ in 0..1000 {
                let rho: f64 = rng.random_range(0.0..=1.0);
                let phi: f64 = rng.random_range(0.0..2.0 * PI);
                let q = PolarPoint::new(rho, phi).unwrap();
                let back = dom.map_inverse(dom.map_forward(q)).unwrap();
                let (u0, v0) = q.to_cartesian();
                let (u1, v1) = back.to_cartesian();
                assert!((u0 - u1).abs() < 1e-12 && (v0 - v1).abs() < 1e-12, "{dom:?} {q:?} {back:?}");
            }
            for k in 0..360 {
                let q = PolarPoint::new(1.0, k as f64 * PI / 180.0).unwrap();
                let (rho, _) = dom.preimage_raw(dom.map_forward(q));
                assert!((rho - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let d: DomainSpec<f64> = serde_json::from_str(r#"{"tag":"polygon","p":12}"#).unwrap();
        assert_eq!(d, DomainSpec::Polygon { p: 12 });
        let d: DomainSpec<f64> = serde_json::from_str(r#"{"tag":"ellipse","A":1.5,"B":1}"#).unwrap();
        assert_eq!(d, DomainSpec::paper_ellipse());
        let d: DomainSpec<f64> = serde_json::from_str(r#"{"tag":"annulus","A":1,"h":0.25}"#).unwrap();
        assert_eq!(d, DomainSpec::paper_annulus());
        let s = serde_json::to_string(&DomainSpec::<f64>::Disk).unwrap();
        assert_eq!(s, r#"{"tag":"disk"}"#);
        assert!(serde_json::from_str::<DomainSpec<f64>>(r#"{"tag":"hexagon"}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(DomainSpec::ellipse(1.0, 1.5).is_err());
        assert!(DomainSpec::annulus(1.0, 1.0).is_err());
        assert!(DomainSpec::<f64>::polygon(2).is_err());
        assert_relative_eq!(DomainSpec::<f64>::paper_polygon().area(), 3.0, epsilon = 1e-15);
    }
}
