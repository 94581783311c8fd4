//! Node systems: Optimal Concentric Sampling on the disk and its images,
//! uniform scattered samples, and mock-optimal node selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::{DomainSpec, PlanePoint};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::zernike::{basis_dimension, PolarPoint};

/// Number of OCS rings for degree `m`: `⌊m/2⌋ + 1`.
pub const fn ring_count(m: usize) -> usize {
    m / 2 + 1
}

/// Nodes on ring `ν` (1-based): `2m − 4ν + 5`.
pub const fn ring_size(m: usize, nu: usize) -> usize {
    2 * m + 5 - 4 * nu
}

/// Quasi-optimal OCS radii `ρ_1 > … > ρ_K`.
pub fn ocs_radii<T: Real>(m: usize) -> Vec<T> {
    let denom = T::lit(2.0) * T::from_count(m + 1);
    (1..=ring_count(m))
        .map(|nu| {
            // Even m puts the last ring at the centre: ξ = cos(π/2) = 0.
            let xi = if 2 * nu - 1 == m + 1 {
                T::zero()
            } else {
                (T::from_count(2 * nu - 1) * T::PI() / denom).cos()
            };
            T::lit(1.1565) * xi - T::lit(0.76535) * xi * xi + T::lit(0.60517) * xi * xi * xi
        })
        .collect()
}

/// Optimal Concentric Sampling of degree `m` on the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct OcsNodeSet<T> {
    pub m: usize,
    pub radii: Vec<T>,
    pub counts: Vec<usize>,
    /// Ring by ring, outermost first; within a ring by increasing angle
    /// starting at 0.
    pub nodes: Vec<PolarPoint<T>>,
}

impl<T: Real> OcsNodeSet<T> {
    pub fn ring_count(&self) -> usize {
        self.radii.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn ocs_nodes_disk<T: Real>(m: usize) -> OcsNodeSet<T> {
    let radii = ocs_radii::<T>(m);
    let counts: Vec<usize> = (1..=ring_count(m)).map(|nu| ring_size(m, nu)).collect();
    let mut nodes = Vec::with_capacity(basis_dimension(m));
    for (&rho, &count) in radii.iter().zip(&counts) {
        for sigma in 0..count {
            let phi = T::TAU() * T::from_count(sigma) / T::from_count(count);
            nodes.push(PolarPoint::new(rho, phi).expect("OCS radii lie in (0, 1]"));
        }
    }
    OcsNodeSet { m, radii, counts, nodes }
}

/// OCS nodes mapped into `dom`, in OCS order.
pub fn optimal_nodes<T: Real>(dom: &DomainSpec<T>, m: usize) -> Vec<PlanePoint<T>> {
    ocs_nodes_disk::<T>(m)
        .nodes
        .into_iter()
        .map(|q| dom.map_forward(q))
        .collect()
}

/// A scattered sample of `N = (n+1)²` points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    pub domain: DomainSpec<T>,
    pub n: usize,
    pub seed: u64,
    pub points: Vec<PlanePoint<T>>,
    pub values: Option<Vec<T>>,
}

impl<T: Real> SampleSet<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Attaches `f` evaluated at every sample point.
    pub fn with_values<F: Fn(PlanePoint<T>) -> T>(mut self, f: F) -> Self {
        self.values = Some(self.points.iter().map(|&p| f(p)).collect());
        self
    }
}

/// `(n+1)²` i.i.d. area-uniform draws on the domain.
pub fn uniform_sample<T: Real>(dom: &DomainSpec<T>, n: usize, seed: u64) -> SampleSet<T> {
    SampleSet {
        domain: *dom,
        n,
        seed,
        points: uniform_points(dom, (n + 1) * (n + 1), seed),
        values: None,
    }
}

/// `count` i.i.d. area-uniform draws on the domain. Deterministic in `seed`.
pub fn uniform_points<T: Real>(dom: &DomainSpec<T>, count: usize, seed: u64) -> Vec<PlanePoint<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let phi = T::TAU() * T::lit(v);
        let pt = match *dom {
            // Linear maps keep the density uniform.
            DomainSpec::Disk | DomainSpec::Ellipse { .. } => {
                let q = PolarPoint::new(T::lit(u).sqrt(), phi).expect("radius in [0, 1)");
                dom.map_forward(q)
            }
            DomainSpec::Annulus { outer, h } => {
                let inner = h * outer;
                let r = (inner * inner + T::lit(u) * (outer * outer - inner * inner)).sqrt();
                PlanePoint::new(r * phi.cos(), r * phi.sin())
            }
            DomainSpec::Polygon { .. } => {
                let r = T::lit(u).sqrt();
                let cand = PlanePoint::new(r * phi.cos(), r * phi.sin());
                if !dom.contains(cand) {
                    continue;
                }
                cand
            }
        };
        out.push(pt);
    }
    out
}

/// Sample points selected to stand in for the optimal nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MockOptimalSet<T> {
    /// `indices[j]` is the sample index paired with optimal node `j`.
    pub indices: Vec<usize>,
    pub points: Vec<PlanePoint<T>>,
    /// Largest distance between an optimal node and its selected point.
    pub max_distance: T,
}

impl<T: Real> MockOptimalSet<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Greedy nearest-available assignment.
///
/// Optimal nodes are visited in the given order; each takes the closest
/// sample point not already taken, ties going to the lowest sample index.
pub fn mock_optimal_select<T: Real>(sample: &[PlanePoint<T>], optimal: &[PlanePoint<T>]) -> Result<MockOptimalSet<T>> {
    if sample.len() < optimal.len() {
        return Err(Error::InsufficientSample {
            available: sample.len(),
            required: optimal.len(),
        });
    }
    let mut taken = vec![false; sample.len()];
    let mut indices = Vec::with_capacity(optimal.len());
    let mut max_d2 = T::zero();
    for p in optimal {
        let mut best: Option<(usize, T)> = None;
        for (i, s) in sample.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let d2 = s.distance_sq(p);
            match best {
                Some((_, bd)) if d2 >= bd => {}
                _ => best = Some((i, d2)),
            }
        }
        let (i, d2) = best.expect("sample.len() >= optimal.len()");
        taken[i] = true;
        indices.push(i);
        max_d2 = max_d2.max(d2);
    }
    let points = indices.iter().map(|&i| sample[i]).collect();
    Ok(MockOptimalSet {
        indices,
        points,
        max_distance: max_d2.sqrt(),
    })
}
