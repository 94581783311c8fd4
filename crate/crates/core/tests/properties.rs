use std::f64::consts::TAU;
use std::time::Duration;

use orthofit::bench::{error_metrics, run_experiment, ExperimentConfig, Sweep, TestFunctionId};
use orthofit::domains::r_alpha;
use orthofit::sampling::{mock_optimal_select, ocs_radii, optimal_nodes, ring_count, ring_size, uniform_points, uniform_sample};
use orthofit::zernike::{index_to_pair, pair_to_index, zernike_eval, Normalization, PolarPoint, ZernikeIndex};
use orthofit::{basis_dimension, BasisVariant, Domain, Point};
use proptest::prelude::*;

fn any_domain() -> impl Strategy<Value = Domain> {
    prop_oneof![
        Just(Domain::disk()),
        (0.2f64..3.0, 0.2f64..3.0, 0.0f64..TAU)
            .prop_map(|(a, b, t)| Domain::rotated_ellipse(a.max(b), a.min(b), t).unwrap()),
        (0.3f64..2.5, 0.05f64..0.9).prop_map(|(a, h)| Domain::annulus(a, h).unwrap()),
        (3u32..20).prop_map(|p| Domain::polygon(p).unwrap()),
    ]
}

proptest! {
    #[test]
    fn zernike_bounded_by_normalization(j in 0usize..500, rho in 0.0f64..=1.0, phi in 0.0f64..TAU) {
        let idx = ZernikeIndex::from_linear(j);
        let bound = Normalization::AreaMean.factor::<f64>(idx.m(), idx.l().unsigned_abs());
        let z = zernike_eval(idx, PolarPoint::new(rho, phi).unwrap());
        prop_assert!(z.abs() <= bound * (1.0 + 1e-10));
    }

    #[test]
    fn index_round_trip(j in 0usize..2000) {
        let p = index_to_pair(j);
        prop_assert_eq!(pair_to_index(p.m(), p.l()).unwrap(), j);
    }

    #[test]
    fn map_round_trip(dom in any_domain(), rho in 0.001f64..=1.0, phi in 0.0f64..TAU) {
        let q = PolarPoint::new(rho, phi).unwrap();
        let back = dom.map_inverse(dom.map_forward(q)).unwrap();
        prop_assert!((back.rho() - rho).abs() < 1e-12);
        let dphi = (back.phi() - q.phi()).abs();
        prop_assert!(dphi < 1e-10 || (dphi - std::f64::consts::TAU).abs() < 1e-10);
    }

    #[test]
    fn boundary_maps_to_boundary(dom in any_domain(), phi in 0.0f64..TAU) {
        let b = dom.map_forward(PolarPoint::new(1.0, phi).unwrap());
        let (rho, _) = dom.preimage_raw(b);
        prop_assert!((rho - 1.0).abs() < 1e-10);
    }

    #[test]
    fn jacobians_reciprocal(dom in any_domain(), rho in 0.01f64..=1.0, phi in 0.0f64..TAU) {
        let q = PolarPoint::new(rho, phi).unwrap();
        let j = dom.jacobian_forward(q) * dom.jacobian_inverse_map(dom.map_forward(q));
        prop_assert!((j - 1.0).abs() < 1e-10);
    }

    #[test]
    fn polygon_radius_continuous_at_vertices(p in 3u32..40, k in 0u32..40) {
        let alpha = std::f64::consts::PI / p as f64;
        let v = alpha * (2 * (k % p) + 1) as f64;
        let jump = (r_alpha(p, v - 1e-13) - r_alpha(p, v + 1e-13)).abs();
        prop_assert!(jump < 1e-12);
        prop_assert!((r_alpha(p, v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_points_inside_and_deterministic(dom in any_domain(), seed in any::<u64>()) {
        let a = uniform_points(&dom, 200, seed);
        prop_assert!(a.iter().all(|&p| dom.contains(p)));
        prop_assert_eq!(a, uniform_points(&dom, 200, seed));
    }

    #[test]
    fn mock_selection_is_valid_greedy(dom in any_domain(), m in 0usize..8, seed in any::<u64>()) {
        let sample = uniform_sample(&dom, 9, seed).points;
        let opt = optimal_nodes(&dom, m);
        let mock = mock_optimal_select(&sample, &opt).unwrap();
        prop_assert_eq!(mock.len(), basis_dimension(m));
        let mut taken = vec![false; sample.len()];
        for (node, &i) in opt.iter().zip(&mock.indices) {
            prop_assert!(!taken[i]);
            let d = sample[i].distance_sq(node);
            let nearest_free = sample
                .iter()
                .enumerate()
                .filter(|(k, _)| !taken[*k])
                .map(|(_, s)| s.distance_sq(node))
                .fold(f64::INFINITY, f64::min);
            prop_assert_eq!(d, nearest_free);
            taken[i] = true;
            prop_assert_eq!(mock.points.iter().filter(|p| **p == sample[i]).count() >= 1, true);
        }
    }

    #[test]
    fn metrics_consistent(v in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..50)) {
        let (t, a): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        let r = error_metrics(&t, &a, Duration::ZERO).unwrap();
        prop_assert!(r.mse >= 0.0 && r.max_ae >= 0.0);
        prop_assert!(r.mse <= r.max_ae * r.max_ae * (1.0 + 1e-12));
        prop_assert!(r.skipped_rel <= r.test_count);
        if !r.mre.is_nan() {
            prop_assert!(r.mre <= r.max_re * (1.0 + 1e-12));
        }
    }
}

#[test]
fn ring_identity_and_radii() {
    for m in 0..=100 {
        let total: usize = (1..=ring_count(m)).map(|nu| ring_size(m, nu)).sum();
        assert_eq!(total, basis_dimension(m));
    }
    for m in 0..=60 {
        let r = ocs_radii::<f64>(m);
        assert!(r.windows(2).all(|w| w[0] > w[1]));
        assert!(r.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}

#[test]
fn sweep_rows_respect_dimensions_and_are_deterministic() {
    let cfg = ExperimentConfig {
        domain: Domain::paper_annulus(),
        variant: BasisVariant::Plain,
        function: TestFunctionId::new(4).unwrap(),
        n: 12,
        sweep: Sweep::Degree { ms: vec![2, 4, 6] },
        test_points: 300,
        sample_seed: 5,
        test_seed: 6,
    };
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!(x.big_m < x.big_r && x.big_r < cfg.sample_size());
        let (rx, ry) = (x.report.as_ref().unwrap(), y.report.as_ref().unwrap());
        assert_eq!((rx.mse, rx.max_ae, rx.mre, rx.max_re), (ry.mse, ry.max_ae, ry.mre, ry.max_re));
    }
    let _ = Point::new(0.0, 0.0);
}
