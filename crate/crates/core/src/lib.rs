//! Interpolation-regression approximation on planar domains with mapped
//! Zernike bases.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`);
//! the aliases at the crate root fix it to `f64`.

pub mod bench;
pub mod cubature;
pub mod domains;
pub mod error;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod scalar;
pub mod solver;
pub mod zernike;

pub use domains::{BasisVariant, DomainSpec, MappedBasis, PlanePoint};
pub use cubature::{domain_rule, integrate, integrate_operator, CubatureRule};
pub use error::{Error, Result};
pub use sampling::{mock_optimal_select, optimal_nodes, uniform_sample, MockOptimalSet, SampleSet};
pub use scalar::Real;
pub use solver::{build_design, evaluate_operator, fit, norm_bound, DesignSystem, NormBoundReport, OperatorModel};
pub use zernike::{basis_dimension, Normalization, PolarPoint, ZernikeIndex};

pub type Domain = DomainSpec<f64>;
pub type Basis = MappedBasis<f64>;
pub type Point = PlanePoint<f64>;
pub type Model = OperatorModel<f64>;
pub type Sample = SampleSet<f64>;
pub type Rule = cubature::CubatureRule<f64>;
