use nalgebra::{DMatrix, DVector};
use orthofit::sampling::{mock_optimal_select, optimal_nodes, uniform_points, uniform_sample};
use orthofit::solver::{build_design, build_design_from_points, evaluate_operator, fit, norm_bound, DesignSystem};
use orthofit::zernike::{basis_dimension, zernike_eval, PolarPoint, ZernikeIndex};
use orthofit::{BasisVariant, Domain, MappedBasis, Model, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DOMAINS: [fn() -> Domain; 4] = [Domain::disk, Domain::paper_ellipse, Domain::paper_annulus, Domain::paper_polygon];

fn system(dom: Domain, m: usize, r: usize, n: usize, seed: u64) -> DesignSystem<f64> {
    let sample = uniform_sample(&dom, n, seed).with_values(|p| (-p.x * p.y).exp() + p.x.sin());
    let mock = mock_optimal_select(&sample.points, &optimal_nodes(&dom, m)).unwrap();
    build_design(MappedBasis::new(dom, BasisVariant::Plain), r, &sample, &mock).unwrap()
}

/// Minimizer of `‖Ma − b‖` subject to `Ca = d` from the dense KKT system
/// `[[2MᵀM, Cᵀ], [C, 0]] [a; z] = [2Mᵀb; d]`.
fn kkt(sys: &DesignSystem<f64>) -> DVector<f64> {
    let m = DMatrix::from_row_slice(sys.design.rows(), sys.design.cols(), sys.design.as_slice());
    let c = m.rows(0, sys.constraint_count()).into_owned();
    let (r, k) = (m.ncols(), c.nrows());
    let mut a = DMatrix::zeros(r + k, r + k);
    a.view_mut((0, 0), (r, r)).copy_from(&(2.0 * m.transpose() * &m));
    a.view_mut((0, r), (r, k)).copy_from(&c.transpose());
    a.view_mut((r, 0), (k, r)).copy_from(&c);
    let mut rhs = DVector::zeros(r + k);
    rhs.rows_mut(0, r).copy_from(&(2.0 * m.transpose() * DVector::from_column_slice(&sys.b)));
    rhs.rows_mut(r, k).copy_from(&DVector::from_column_slice(&sys.d));
    a.lu().solve(&rhs).unwrap().rows(0, r).into_owned()
}

#[test]
fn kkt_oracle_small_instance() {
    let sys = system(Domain::disk(), 3, 5, 10, 11);
    let ours = DVector::from_column_slice(&fit(&sys).unwrap().coeffs);
    let oracle = kkt(&sys);
    assert!((ours - &oracle).norm() <= 1e-7 * oracle.norm());
}

#[test]
fn design_entries_match_zernike() {
    let dom = Domain::disk();
    let sys = system(dom, 2, 2, 20, 5);
    let sample = uniform_sample(&dom, 20, 5);
    for (row, &i) in sys.row_order.iter().enumerate() {
        let q = PolarPoint::from_cartesian(sample.points[i].x, sample.points[i].y).unwrap();
        for j in 0..basis_dimension(2) {
            let z = zernike_eval(ZernikeIndex::from_linear(j), q);
            assert!((sys.design[(row, j)] - z).abs() < 1e-14);
        }
    }
}

#[test]
fn rows_are_reordered_mock_first() {
    let sys = system(Domain::paper_polygon(), 4, 6, 12, 9);
    assert_eq!(&sys.row_order[..sys.constraint_count()], sys.mock.indices.as_slice());
    let mut sorted = sys.row_order.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..sys.sample_count()).collect::<Vec<_>>());
}

#[test]
fn norm_bound_dominates_monte_carlo() {
    let dom = Domain::paper_ellipse();
    let pts = uniform_points(&dom, 441, 17);
    let mock = mock_optimal_select(&pts, &optimal_nodes(&dom, 5)).unwrap();
    let sys = build_design_from_points(MappedBasis::new(dom, BasisVariant::Plain), 7, &pts, &vec![0.0; 441], &mock).unwrap();
    let report = norm_bound(&sys, 10_000).unwrap();
    assert!(report.k1_inverse >= 0.0 && report.k2 >= 0.0);
    let grid = uniform_points(&dom, 5000, 18);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..50 {
        let data: Vec<f64> = (0..441).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let model = fit(&sys.with_values(&data).unwrap()).unwrap();
        let sup = model.evaluate(&grid).unwrap().iter().fold(0.0f64, |s, v| s.max(v.abs()));
        assert!(sup <= report.bound, "{sup} > {}", report.bound);
    }
}

#[test]
fn norm_bound_square_case() {
    let dom = Domain::paper_annulus();
    let m = 2;
    let pts = uniform_points(&dom, basis_dimension(m), 4);
    let mock = mock_optimal_select(&pts, &optimal_nodes(&dom, m)).unwrap();
    let sys = build_design_from_points(MappedBasis::new(dom, BasisVariant::Plain), m, &pts, &[0.0; 6], &mock).unwrap();
    let report = norm_bound(&sys, 10_000).unwrap();
    assert!(report.k1_inverse.is_finite() && report.k1_printed.is_finite());
    assert_eq!(report.k2, 0.0);
}

#[test]
fn model_json_round_trip() {
    let sys = system(Domain::paper_annulus(), 3, 4, 10, 2);
    let model = fit(&sys).unwrap();
    let s = serde_json::to_string(&model).unwrap();
    let back: Model = serde_json::from_str(&s).unwrap();
    assert_eq!(back, model);
    assert!(s.contains("\"tag\":\"annulus\""));
}

#[test]
fn evaluation_is_timed_and_deterministic() {
    let sys = system(Domain::paper_polygon(), 4, 6, 12, 3);
    let a = fit(&sys).unwrap();
    let b = fit(&system(Domain::paper_polygon(), 4, 6, 12, 3)).unwrap();
    assert_eq!(a.coeffs, b.coeffs);
    let pts = uniform_points(&Domain::paper_polygon(), 100, 1);
    let t = evaluate_operator(&a, &pts).unwrap();
    assert_eq!(t.values.len(), 100);
}

#[test]
fn reproduction_on_test_grid() {
    for (k, dom) in DOMAINS.iter().map(|d| d()).enumerate() {
        for variant in [BasisVariant::Plain, BasisVariant::JacobianWeighted] {
            let basis = MappedBasis::new(dom, variant);
            let (m, r) = (6, 8);
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let coeffs: Vec<f64> = (0..basis_dimension(r)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let target = |p: Point| -> f64 { basis.row(r, p).unwrap().iter().zip(&coeffs).map(|(u, c)| u * c).sum() };
            let sample = uniform_sample(&dom, 14, 30 + k as u64).with_values(target);
            let mock = mock_optimal_select(&sample.points, &optimal_nodes(&dom, m)).unwrap();
            let model = fit(&build_design(basis, r, &sample, &mock).unwrap()).unwrap();
            let grid = uniform_points(&dom, 5000, 7);
            let vals = model.evaluate(&grid).unwrap();
            let truth: Vec<f64> = grid.iter().map(|&p| target(p)).collect();
            let fmax = truth.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            let err = vals.iter().zip(&truth).fold(0.0f64, |s, (a, b)| s.max((a - b).abs()));
            assert!(err <= 1e-8 * fmax, "{} {variant:?}: {err}", dom.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kkt_equivalence(which in 0usize..4, m in 1usize..=6, extra in 1usize..=3, n in 8usize..=13, seed in 0u64..1000) {
        let r = m + extra;
        prop_assume!(basis_dimension(r) <= 60);
        let sys = system(DOMAINS[which](), m, r, n, seed);
        let ours = DVector::from_column_slice(&fit(&sys).unwrap().coeffs);
        let oracle = kkt(&sys);
        prop_assert!((ours - &oracle).norm() <= 1e-7 * oracle.norm());
    }

    #[test]
    fn interpolation_property(which in 0usize..4, m in 1usize..=8, seed in 0u64..1000) {
        let sys = system(DOMAINS[which](), m, m + 2, 15, seed);
        let model = fit(&sys).unwrap();
        prop_assume!(model.diagnostics.cond_r11 <= 1e8);
        let dmax = sys.d.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let vals = model.evaluate(&sys.mock.points).unwrap();
        for (v, d) in vals.iter().zip(&sys.d) {
            prop_assert!((v - d).abs() <= 1e-9 * (1.0 + dmax));
        }
    }

    #[test]
    fn linearity(which in 0usize..4, alpha in -3.0f64..3.0, beta in -3.0f64..3.0, seed in 0u64..1000) {
        let sys = system(DOMAINS[which](), 3, 5, 10, seed);
        let n = sys.sample_count();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h: Vec<f64> = f.iter().zip(&g).map(|(a, b)| alpha * a + beta * b).collect();
        let cf = fit(&sys.with_values(&f).unwrap()).unwrap().coeffs;
        let cg = fit(&sys.with_values(&g).unwrap()).unwrap().coeffs;
        let ch = fit(&sys.with_values(&h).unwrap()).unwrap().coeffs;
        for i in 0..cf.len() {
            prop_assert!((ch[i] - (alpha * cf[i] + beta * cg[i])).abs() <= 1e-12 * (1.0 + ch[i].abs()));
        }
    }
}
