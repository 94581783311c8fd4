//! Equality-constrained least squares for the interpolation-regression
//! operator.
//!
//! Given the design matrix `𝓜` (all samples, mock-optimal rows first) and
//! the constraint block `𝓒` (its first `M` rows), the coefficients solve
//!
//! ```text
//! min ‖𝓜a − b‖₂   subject to   𝓒a = d
//! ```
//!
//! by null-space elimination: `𝓒 = Q_C [R₁₁ R₁₂]`, `𝓜 = [𝓜₁ 𝓜₂]`,
//! `𝓥₁ = 𝓜₂ − 𝓜₁R₁₁⁻¹R₁₂`, `b₁ = b − 𝓜₁R₁₁⁻¹Q_Cᵀd`, `â₂ = argmin ‖𝓥₁a₂ − b₁‖`
//! and `â₁ = R₁₁⁻¹(Q_Cᵀd − R₁₂â₂)`.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{MappedBasis, PlanePoint};
use crate::error::{Error, Result};
use crate::linalg::{dot, solve_upper_in_place, solve_upper_matrix, solve_upper_transpose_in_place, HouseholderQr, Matrix};
use crate::sampling::{MockOptimalSet, SampleSet};
use crate::scalar::Real;
use crate::zernike::{basis_dimension, PolarPoint};

/// Cached factorizations shared by every right-hand side on one node set.
#[derive(Debug, Clone)]
pub struct Factorization<T> {
    qc: HouseholderQr<T>,
    /// `[R₁₁ R₁₂]`, `M × R̃`.
    rc: Matrix<T>,
    /// `R₁₁⁻¹R₁₂`, `M × (R̃ − M)`.
    r11_inv_r12: Matrix<T>,
    /// `𝓥₁`, `N × (R̃ − M)`.
    v1: Matrix<T>,
    v1_qr: Option<HouseholderQr<T>>,
    cond_r11: T,
    cond_v1: T,
}

impl<T: Real> Factorization<T> {
    fn new(design: &Matrix<T>, constraints: usize) -> Result<Self> {
        let (n_rows, dim) = (design.rows(), design.cols());
        let mm = constraints;
        let qc = HouseholderQr::new(design.block(0, mm, 0, dim));
        let rc = qc.r();
        let r11_rank = {
            let d = qc.r_diagonal();
            let big = d.iter().fold(T::zero(), |s, v| s.max(v.abs()));
            let tol = T::from_count(mm.max(dim)) * T::epsilon() * big;
            d.iter().filter(|v| v.abs() > tol).count()
        };
        if big_zero(&rc) || r11_rank < mm {
            return Err(Error::DegenerateConstraints {
                rank: r11_rank,
                expected: mm,
            });
        }
        let cond_r11 = qc.diagonal_condition();

        let r12 = rc.block(0, mm, mm, dim);
        let r11_inv_r12 = solve_upper_matrix(&rc, &r12);

        // 𝓥₁ = 𝓜₂ − 𝓜₁ (R₁₁⁻¹R₁₂), assembled row by row.
        let p = dim - mm;
        let mut v1 = Matrix::zeros(n_rows, p);
        v1.as_mut_slice()
            .par_chunks_mut(p.max(1))
            .take(if p == 0 { 0 } else { n_rows })
            .enumerate()
            .for_each(|(i, out)| {
                let row = design.row(i);
                out.copy_from_slice(&row[mm..]);
                for (k, &a) in row[..mm].iter().enumerate() {
                    if a == T::zero() {
                        continue;
                    }
                    for (o, &x) in out.iter_mut().zip(r11_inv_r12.row(k)) {
                        *o -= a * x;
                    }
                }
            });

        let (v1_qr, cond_v1) = if p == 0 {
            (None, T::one())
        } else {
            let qr = HouseholderQr::new(v1.clone());
            let rank = qr.rank();
            if rank < p {
                return Err(Error::DegenerateDesign {
                    rank: mm + rank,
                    expected: dim,
                });
            }
            let c = qr.diagonal_condition();
            (Some(qr), c)
        };

        Ok(Self {
            qc,
            rc,
            r11_inv_r12,
            v1,
            v1_qr,
            cond_r11,
            cond_v1,
        })
    }

    /// Rough condition estimate of `R₁₁` from its diagonal.
    pub fn cond_r11(&self) -> T {
        self.cond_r11
    }

    /// Rough condition estimate of `𝓥₁ᵀ𝓥₁` (square of that of `𝓥₁`).
    pub fn cond_v1tv1(&self) -> T {
        self.cond_v1 * self.cond_v1
    }
}

fn big_zero<T: Real>(m: &Matrix<T>) -> bool {
    m.rows() > 0 && m.max_abs() == T::zero()
}

/// Design and constraint matrices with their right-hand sides.
#[derive(Debug, Clone)]
pub struct DesignSystem<T> {
    pub basis: MappedBasis<T>,
    pub m: usize,
    pub r_tilde: usize,
    /// `𝓜`, `N × R̃`, mock-optimal rows first.
    pub design: Matrix<T>,
    /// Sample index of each design row.
    pub row_order: Vec<usize>,
    pub b: Vec<T>,
    pub d: Vec<T>,
    pub mock: MockOptimalSet<T>,
    factor: Factorization<T>,
}

/// Assembles `𝓜`, `𝓒`, `b`, `d` and checks the rank conditions.
pub fn build_design<T: Real>(
    basis: MappedBasis<T>,
    r_tilde: usize,
    sample: &SampleSet<T>,
    mock: &MockOptimalSet<T>,
) -> Result<DesignSystem<T>> {
    let values = sample
        .values
        .as_ref()
        .ok_or_else(|| Error::Config("sample has no function values attached".into()))?;
    build_design_from_points(basis, r_tilde, &sample.points, values, mock)
}

pub fn build_design_from_points<T: Real>(
    basis: MappedBasis<T>,
    r_tilde: usize,
    points: &[PlanePoint<T>],
    values: &[T],
    mock: &MockOptimalSet<T>,
) -> Result<DesignSystem<T>> {
    let n = points.len();
    if values.len() != n {
        return Err(Error::Dimension(format!("{} values for {} sample points", values.len(), n)));
    }
    let mm = mock.len();
    let m = degree_for_dimension(mm)
        .ok_or_else(|| Error::Dimension(format!("{mm} mock-optimal nodes is not a full degree count")))?;
    let dim = basis_dimension(r_tilde);
    if m > r_tilde {
        return Err(Error::Parameter(format!("need m <= r_tilde (m={m}, r_tilde={r_tilde})")));
    }
    if dim > n {
        return Err(Error::DegenerateDesign { rank: n, expected: dim });
    }
    let mut in_mock = vec![false; n];
    for &i in &mock.indices {
        if i >= n || in_mock[i] {
            return Err(Error::Config(format!("mock-optimal index {i} invalid or repeated")));
        }
        in_mock[i] = true;
    }
    let mut row_order = mock.indices.clone();
    row_order.extend((0..n).filter(|&i| !in_mock[i]));

    let mut design = Matrix::zeros(n, dim);
    design
        .as_mut_slice()
        .par_chunks_mut(dim)
        .zip(row_order.par_iter())
        .try_for_each(|(out, &i)| {
            basis.row_into(r_tilde, points[i], out).map_err(|e| match e {
                Error::OutsideDomain { radius } => Error::OutsideDomainAt { index: i, radius },
                other => other,
            })
        })?;

    let b: Vec<T> = row_order.iter().map(|&i| values[i]).collect();
    let d = b[..mm].to_vec();
    let factor = Factorization::new(&design, mm)?;
    Ok(DesignSystem {
        basis,
        m,
        r_tilde,
        design,
        row_order,
        b,
        d,
        mock: mock.clone(),
        factor,
    })
}

fn degree_for_dimension(dim: usize) -> Option<usize> {
    (0..).take_while(|&m| basis_dimension(m) <= dim).find(|&m| basis_dimension(m) == dim)
}

impl<T: Real> DesignSystem<T> {
    pub fn sample_count(&self) -> usize {
        self.design.rows()
    }

    pub fn constraint_count(&self) -> usize {
        self.d.len()
    }

    pub fn dimension(&self) -> usize {
        self.design.cols()
    }

    /// `𝓒`, the first `M` rows of `𝓜`.
    pub fn constraint_matrix(&self) -> Matrix<T> {
        self.design.block(0, self.constraint_count(), 0, self.dimension())
    }

    pub fn factorization(&self) -> &Factorization<T> {
        &self.factor
    }

    /// Same node sets, new data. `values` is indexed like the original sample.
    pub fn with_values(&self, values: &[T]) -> Result<Self> {
        if values.len() != self.sample_count() {
            return Err(Error::Dimension(format!(
                "{} values for {} sample points",
                values.len(),
                self.sample_count()
            )));
        }
        let mut out = self.clone();
        out.b = self.row_order.iter().map(|&i| values[i]).collect();
        out.d = out.b[..self.constraint_count()].to_vec();
        Ok(out)
    }

    /// Constrained least-squares coefficients for the right-hand sides `b`, `d`.
    pub fn solve(&self, b: &[T], d: &[T]) -> Vec<T> {
        let f = &self.factor;
        let mm = self.constraint_count();
        let mut y = d.to_vec();
        f.qc.apply_qt(&mut y);
        // z = R₁₁⁻¹ Q_Cᵀ d
        let mut z = y;
        solve_upper_in_place(&f.rc, &mut z);

        let a2 = match &f.v1_qr {
            None => Vec::new(),
            Some(qr) => {
                let b1: Vec<T> = (0..self.sample_count())
                    .map(|i| b[i] - dot(&self.design.row(i)[..mm], &z))
                    .collect();
                qr.solve_least_squares(&b1)
            }
        };
        let mut coeffs = Vec::with_capacity(self.dimension());
        for k in 0..mm {
            coeffs.push(z[k] - dot(f.r11_inv_r12.row(k), &a2));
        }
        coeffs.extend(a2);
        coeffs
    }
}

/// Diagnostics recorded with a fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub cond_r11: f64,
    pub cond_v1tv1: f64,
    pub constraint_residual: f64,
    pub max_mock_distance: f64,
}

/// A fitted interpolation-regression operator `Π̂[f] = Σ âᵢ uᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Deserialize<'de> + Default"
))]
pub struct OperatorModel<T> {
    pub basis: MappedBasis<T>,
    pub m: usize,
    pub r_tilde: usize,
    pub coeffs: Vec<T>,
    pub mock_indices: Vec<usize>,
    pub diagnostics: FitDiagnostics,
}

/// Ill-conditioning threshold for the `𝓥₁ᵀ𝓥₁` warning.
pub const CONDITION_WARNING: f64 = 1e14;

pub fn fit<T: Real>(sys: &DesignSystem<T>) -> Result<OperatorModel<T>> {
    let coeffs = sys.solve(&sys.b, &sys.d);
    let c = sys.constraint_matrix();
    let residual = c
        .matvec(&coeffs)
        .iter()
        .zip(&sys.d)
        .fold(T::zero(), |s, (p, q)| s.max((*p - *q).abs()));
    let diagnostics = FitDiagnostics {
        cond_r11: sys.factor.cond_r11().to_f64_lossy(),
        cond_v1tv1: sys.factor.cond_v1tv1().to_f64_lossy(),
        constraint_residual: residual.to_f64_lossy(),
        max_mock_distance: sys.mock.max_distance.to_f64_lossy(),
    };
    Ok(OperatorModel {
        basis: sys.basis,
        m: sys.m,
        r_tilde: sys.r_tilde,
        coeffs,
        mock_indices: sys.mock.indices.clone(),
        diagnostics,
    })
}

impl<T: Real> OperatorModel<T> {
    /// True when `𝓥₁ᵀ𝓥₁` is close to singular (a NaN estimate counts).
    pub fn is_ill_conditioned(&self) -> bool {
        let c = self.diagnostics.cond_v1tv1;
        c.is_nan() || c >= CONDITION_WARNING
    }

    pub fn evaluate_point(&self, pt: PlanePoint<T>) -> Result<T> {
        let mut row = vec![T::zero(); self.coeffs.len()];
        self.basis.row_into(self.r_tilde, pt, &mut row)?;
        Ok(dot(&row, &self.coeffs))
    }

    pub fn evaluate(&self, pts: &[PlanePoint<T>]) -> Result<Vec<T>> {
        let mut row = vec![T::zero(); self.coeffs.len()];
        pts.iter()
            .enumerate()
            .map(|(i, &pt)| {
                self.basis.row_into(self.r_tilde, pt, &mut row).map_err(|e| match e {
                    Error::OutsideDomain { radius } => Error::OutsideDomainAt { index: i, radius },
                    other => other,
                })?;
                Ok(dot(&row, &self.coeffs))
            })
            .collect()
    }
}

/// Values of a model on a point batch, with the wall-clock evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedValues<T> {
    pub values: Vec<T>,
    pub elapsed: Duration,
}

pub fn evaluate_operator<T: Real>(model: &OperatorModel<T>, pts: &[PlanePoint<T>]) -> Result<TimedValues<T>> {
    let start = Instant::now();
    let values = model.evaluate(pts)?;
    Ok(TimedValues {
        values,
        elapsed: start.elapsed(),
    })
}

/// Constants of the operator sup-norm bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBoundReport {
    /// `K₁` with the `‖R₁₁‖₁` prefactor as printed.
    pub k1_printed: f64,
    /// `K₁` with `‖R₁₁⁻¹‖₁`, the factor the elimination actually applies.
    pub k1_inverse: f64,
    pub k2: f64,
    /// Empirical `maxᵢ ‖uᵢ‖_∞` over the estimation grid.
    pub sup_basis: f64,
    /// `sup_basis · (k1_inverse + k2)`.
    pub bound: f64,
    /// `sup_basis · (k1_printed + k2)`.
    pub bound_printed: f64,
    pub grid_points: usize,
}

/// Quasi-uniform grid: concentric rings in the disk (including the centre
/// and the unit circle) mapped into the domain. At least `target` points.
pub fn quasi_uniform_grid<T: Real>(basis: &MappedBasis<T>, target: usize) -> Vec<PlanePoint<T>> {
    let ring_size = |k: usize| ((std::f64::consts::TAU * k as f64).round() as usize).max(6);
    let mut rings = 1;
    while 1 + (1..=rings).map(ring_size).sum::<usize>() < target {
        rings += 1;
    }
    let mut pts = vec![basis.domain.map_forward(PolarPoint::new(T::zero(), T::zero()).unwrap())];
    for k in 1..=rings {
        let rho = T::from_count(k) / T::from_count(rings);
        let count = ring_size(k);
        for s in 0..count {
            let phi = T::TAU() * T::from_count(s) / T::from_count(count);
            pts.push(basis.domain.map_forward(PolarPoint::new(rho, phi).unwrap()));
        }
    }
    pts
}

/// Computes `K₁`, `K₂` and the resulting bound on `‖Π̂‖_∞`.
pub fn norm_bound<T: Real>(sys: &DesignSystem<T>, grid_points: usize) -> Result<NormBoundReport> {
    let f = &sys.factor;
    let n = sys.sample_count();
    let mm = sys.constraint_count();
    let dim = sys.dimension();
    let p = dim - mm;

    let r11 = f.rc.block(0, mm, 0, mm);
    let r12 = f.rc.block(0, mm, mm, dim);
    let r11_inv = solve_upper_matrix(&f.rc, &Matrix::identity(mm));
    let qct = f.qc.q().transpose();

    // 𝓜₁ R₁₁⁻¹ Q_Cᵀ
    let m1 = sys.design.block(0, n, 0, mm);
    let g = m1.matmul(&r11_inv).matmul(&qct);

    // (𝓥₁ᵀ𝓥₁)⁻¹𝓥₁ᵀ = R_V⁻¹ R_V⁻ᵀ 𝓥₁ᵀ with 𝓥₁ = Q_V R_V.
    let pinv_norm = match &f.v1_qr {
        None => T::zero(),
        Some(qr) => {
            let rv = qr.r();
            let mut w = f.v1.transpose();
            let mut col = vec![T::zero(); p];
            for j in 0..n {
                for i in 0..p {
                    col[i] = w[(i, j)];
                }
                solve_upper_transpose_in_place(&rv, &mut col);
                for i in 0..p {
                    w[(i, j)] = col[i];
                }
            }
            solve_upper_matrix(&rv, &w).norm_one()
        }
    };

    let nf = T::from_count(n);
    let mf = T::from_count(mm);
    let k2 = pinv_norm * (nf + mf * g.norm_one());
    let inner = mf * qct.norm_one() + r12.norm_one() * k2;
    let k1_printed = r11.norm_one() * inner;
    let k1_inverse = r11_inv.norm_one() * inner;

    let grid = quasi_uniform_grid(&sys.basis, grid_points);
    let mut row = vec![T::zero(); dim];
    let mut sup = T::zero();
    for &pt in &grid {
        sys.basis.row_into(sys.r_tilde, pt, &mut row)?;
        sup = row.iter().fold(sup, |s, v| s.max(v.abs()));
    }

    let to = |x: T| x.to_f64_lossy();
    Ok(NormBoundReport {
        k1_printed: to(k1_printed),
        k1_inverse: to(k1_inverse),
        k2: to(k2),
        sup_basis: to(sup),
        bound: to(sup * (k1_inverse + k2)),
        bound_printed: to(sup * (k1_printed + k2)),
        grid_points: grid.len(),
    })
}
