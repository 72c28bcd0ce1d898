use fusion_frames::duality::{left_inverses_parametrization, BlockOp};
use fusion_frames::erasures::{mse_optimal_dual, pattern_count, sample_competitor_duals, MinimaxProblem};
use fusion_frames::fusion::FusionFrame;
use fusion_frames::linalg::{frobenius_norm, Mat};
use fusion_frames::sampling::{random_fusion_frame, random_matrix, random_weights, seeded};
use proptest::prelude::*;

fn selected(w: &FusionFrame, i: usize) -> Mat {
    BlockOp::selector(&w.dims(), &[i]).into_matrix()
}

/// `Σ_i ‖A M_i T^*‖²_F`.
fn mse(w: &FusionFrame, a: &Mat) -> f64 {
    let t_adj = w.analysis_matrix();
    (0..w.len())
        .map(|i| frobenius_norm(&(a * selected(w, i) * &t_adj)).powi(2))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn erasing_a_block_scales_by_its_weight(seed in any::<u64>(), d in 1usize..=8, m in 1usize..=5, complex in any::<bool>()) {
        let mut rng = seeded(seed);
        let w = random_fusion_frame(&mut rng, d, m, complex);
        let a = random_matrix(&mut rng, d, w.total_dim(), complex);
        let t_adj = w.analysis_matrix();
        for (i, wi) in w.weights().iter().enumerate() {
            let m_i = selected(&w, i);
            let lhs = frobenius_norm(&(&a * &m_i * &t_adj));
            let rhs = wi * frobenius_norm(&(&a * &m_i));
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
        }
    }

    #[test]
    fn mse_splits_around_the_optimum(seed in any::<u64>(), d in 1usize..=7, m in 1usize..=5, complex in any::<bool>()) {
        let mut rng = seeded(seed);
        let w = random_fusion_frame(&mut rng, d, m, complex);
        let v = random_weights(&mut rng, m);
        let report = mse_optimal_dual(&w, &v, 1).unwrap();
        prop_assert!(report.certified());
        let a_opt = report.optimal_dual.left_inverse();
        let optimum = mse(&w, &a_opt);
        for comp in sample_competitor_duals(&w, &v, 10, 1.0, &mut rng).unwrap() {
            let a = comp.left_inverse();
            let lhs = mse(&w, &a) - optimum;
            let diff = &a - &a_opt;
            let rhs: f64 = w
                .weights()
                .iter()
                .enumerate()
                .map(|(i, wi)| wi * wi * frobenius_norm(&(&diff * selected(&w, i))).powi(2))
                .sum();
            prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.max(optimum).max(1.0));
            prop_assert!(lhs >= -1e-10 * optimum.max(1.0));
            if lhs <= 1e-10 {
                prop_assert!(frobenius_norm(&diff) <= 1e-6);
            }
        }
    }

    #[test]
    fn worst_case_objective_is_convex(seed in any::<u64>(), d in 1usize..=7, m in 2usize..=5, complex in any::<bool>()) {
        let mut rng = seeded(seed);
        let w = random_fusion_frame(&mut rng, d, m, complex);
        let fam = left_inverses_parametrization(&w).unwrap();
        let groups = w
            .offsets()
            .into_iter()
            .zip(w.dims())
            .zip(w.weights())
            .map(|((o, n), &wi)| (o, n, wi))
            .collect();
        let problem = MinimaxProblem { a0: fam.a0.clone(), kernel: fam.kernel.clone(), groups };
        let k = fam.kernel_dim();
        for _ in 0..10 {
            let y1 = random_matrix(&mut rng, d, k, complex);
            let y2 = random_matrix(&mut rng, d, k, complex);
            let mid = (&y1 + &y2) * fusion_frames::linalg::re(0.5);
            let phi = |y: &Mat| problem.objective(&problem.member(y));
            prop_assert!(phi(&mid) <= 0.5 * (phi(&y1) + phi(&y2)) + 1e-12);
        }
    }
}

#[test]
fn pattern_counts_are_binomials() {
    assert_eq!(pattern_count(5, 0), 1);
    assert_eq!(pattern_count(5, 2), 10);
    assert_eq!(pattern_count(6, 3), 20);
    assert_eq!(pattern_count(3, 4), 0);
    assert_eq!(pattern_count(40, 20), 137_846_528_820);
}
