//! Product Gaussian cubature on the disk and its transplants to the ellipse,
//! annulus and polygon.
//!
//! The disk rule is a tensor product of Gauss–Legendre points in `ρ` on
//! `(0, 1)` (weight `ρ` absorbed into the weights) and equispaced angles. A
//! mapped rule keeps the disk nodes' images and multiplies each weight by
//! `|J_φ|` at the preimage.

use serde::{Deserialize, Serialize};

use crate::domains::{DomainSpec, PlanePoint};
use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Real};
use crate::solver::OperatorModel;
use crate::zernike::PolarPoint;

/// Function class a rule integrates exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactnessSpace {
    /// Bivariate polynomials of total degree `≤ q`.
    Polynomials,
    /// Degree-`≤ q` disk polynomials composed with `φ⁻¹`.
    MappedBasis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubatureRule<T> {
    pub domain: DomainSpec<T>,
    pub degree: usize,
    pub nodes: Vec<PlanePoint<T>>,
    pub weights: Vec<T>,
    pub exactness: ExactnessSpace,
    /// Disk nodes the rule was built from.
    pub preimages: Vec<PolarPoint<T>>,
}

impl<T: Real> CubatureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> T {
        pairwise_sum(&self.weights)
    }
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence, `n ≥ 1`, `|z| < 1`.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            let step = p / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_derivative(n, 0.0);
        w[n / 2] = 2.0 / (dp * dp);
    }
    (x, w)
}

/// Gauss–Legendre radii on `(0, 1)` with the polar factor `ρ` folded into
/// the weights. Exact for `∫₀¹ g(ρ) ρ dρ` with `deg g ≤ 2n − 2`.
fn radial_factor<T: Real>(q: usize) -> Vec<(T, T)> {
    let n = q.div_ceil(2) + 1;
    let (x, w) = gauss_legendre(n);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| {
            let rho = 0.5 * (xi + 1.0);
            (T::lit(rho), T::lit(0.5 * wi * rho))
        })
        .collect()
}

fn product_rule<T: Real>(q: usize, angles: &[(T, T)], exactness: ExactnessSpace) -> CubatureRule<T> {
    let radial = radial_factor::<T>(q);
    let mut preimages = Vec::with_capacity(radial.len() * angles.len());
    let mut weights = Vec::with_capacity(radial.len() * angles.len());
    for &(rho, wr) in &radial {
        for &(phi, wa) in angles {
            preimages.push(PolarPoint::new(rho, phi).expect("Gauss radius inside (0, 1)"));
            weights.push(wr * wa);
        }
    }
    CubatureRule {
        domain: DomainSpec::Disk,
        degree: q,
        nodes: preimages.iter().map(|p| DomainSpec::Disk.map_forward(*p)).collect(),
        weights,
        exactness,
        preimages,
    }
}

/// Product rule exact for polynomials of total degree `≤ q` on the unit disk.
pub fn disk_rule<T: Real>(q: usize) -> CubatureRule<T> {
    let n_theta = q + 1;
    let wa = T::TAU() / T::from_count(n_theta);
    let angles: Vec<(T, T)> = (0..n_theta)
        .map(|k| (T::TAU() * T::from_count(k) / T::from_count(n_theta), wa))
        .collect();
    product_rule(q, &angles, ExactnessSpace::Polynomials)
}

/// Disk rule whose angular factor is a composite Gauss–Legendre rule with
/// one panel per polygon sector, so that panel ends fall on the polygon's
/// vertex directions where `R_α` has a kink.
pub fn sectored_disk_rule<T: Real>(q: usize, p: u32) -> CubatureRule<T> {
    let alpha = std::f64::consts::PI / p as f64;
    let per_sector = (0.75 * q as f64 * alpha).ceil() as usize + 12;
    let (x, w) = gauss_legendre(per_sector);
    let mut angles = Vec::with_capacity(per_sector * p as usize);
    for s in 0..p {
        let lo = (2 * s as i64 - 1) as f64 * alpha;
        for (&xi, &wi) in x.iter().zip(&w) {
            let phi = (lo + alpha * (xi + 1.0)).rem_euclid(std::f64::consts::TAU);
            angles.push((T::lit(phi), T::lit(alpha * wi)));
        }
    }
    product_rule(q, &angles, ExactnessSpace::Polynomials)
}

/// Transplants a disk rule to `dom`: nodes `φ(ξ_i)`, weights `ω_i |J_φ(ξ_i)|`.
pub fn mapped_rule<T: Real>(dom: &DomainSpec<T>, disk: &CubatureRule<T>) -> Result<CubatureRule<T>> {
    if disk.domain != DomainSpec::Disk {
        return Err(Error::Config(format!("cannot transplant a {} rule", disk.domain.name())));
    }
    dom.validate()?;
    let nodes = disk.preimages.iter().map(|&q| dom.map_forward(q)).collect();
    let weights = disk
        .preimages
        .iter()
        .zip(&disk.weights)
        .map(|(&q, &w)| w * dom.jacobian_forward(q))
        .collect();
    let exactness = match dom {
        DomainSpec::Disk | DomainSpec::Ellipse { .. } => ExactnessSpace::Polynomials,
        DomainSpec::Annulus { .. } | DomainSpec::Polygon { .. } => ExactnessSpace::MappedBasis,
    };
    Ok(CubatureRule {
        domain: *dom,
        degree: disk.degree,
        nodes,
        weights,
        exactness,
        preimages: disk.preimages.clone(),
    })
}

/// Degree-`q` rule on `dom`, picking the angular layout suited to the domain.
pub fn domain_rule<T: Real>(dom: &DomainSpec<T>, q: usize) -> Result<CubatureRule<T>> {
    let disk = match *dom {
        DomainSpec::Polygon { p } => sectored_disk_rule(q, p),
        _ => disk_rule(q),
    };
    mapped_rule(dom, &disk)
}

/// `Σ f(ψ_i) w_i`.
pub fn integrate<T: Real, F: Fn(PlanePoint<T>) -> T>(rule: &CubatureRule<T>, f: F) -> T {
    let terms: Vec<T> = rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| f(x) * w).collect();
    pairwise_sum(&terms)
}

/// `Σ f(ψ_i) ω(ψ_i) w_i`.
pub fn integrate_weighted<T: Real, F, W>(rule: &CubatureRule<T>, f: F, weight: W) -> T
where
    F: Fn(PlanePoint<T>) -> T,
    W: Fn(PlanePoint<T>) -> T,
{
    integrate(rule, |x| f(x) * weight(x))
}

/// Like [`integrate`] for fallible integrands; a failure reports its node.
pub fn try_integrate<T: Real, F>(rule: &CubatureRule<T>, f: F) -> Result<T>
where
    F: Fn(PlanePoint<T>) -> Result<T>,
{
    let terms = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .enumerate()
        .map(|(i, (&x, &w))| {
            f(x).map(|v| v * w).map_err(|e| Error::Evaluation {
                index: i,
                reason: e.to_string(),
            })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(pairwise_sum(&terms))
}

/// `Σ Π̂[f](ψ_i) ω(ψ_i) w_i` for a fitted model; `weight = None` means `ω ≡ 1`.
pub fn integrate_operator<T: Real>(
    rule: &CubatureRule<T>,
    model: &OperatorModel<T>,
    weight: Option<&dyn Fn(PlanePoint<T>) -> T>,
) -> Result<T> {
    if rule.domain != model.basis.domain {
        return Err(Error::Config(format!(
            "rule built for {} but model fitted on {}",
            rule.domain.name(),
            model.basis.domain.name()
        )));
    }
    let values = model.evaluate(&rule.nodes)?;
    let terms: Vec<T> = values
        .iter()
        .zip(&rule.nodes)
        .zip(&rule.weights)
        .map(|((&v, &x), &w)| match weight {
            Some(om) => v * om(x) * w,
            None => v * w,
        })
        .collect();
    Ok(pairwise_sum(&terms))
}
