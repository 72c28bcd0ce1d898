use fusion_frames::frames::{is_dual_frame, Frame};
use fusion_frames::linalg::{frobenius_norm, rank, Vector, RANK_TOL};
use fusion_frames::sampling::{random_fusion_frame, random_matrix, random_riesz_basis, seeded};
use proptest::prelude::*;
use rand::Rng;

fn unit_vectors<R: Rng>(rng: &mut R, d: usize, count: usize, complex: bool) -> Vec<Vector> {
    (0..count)
        .map(|_| {
            let v = random_matrix(rng, d, 1, complex).column(0).into_owned();
            let n = v.norm();
            v.unscale(n)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frame_bounds_hold(seed in any::<u64>(), d in 1usize..=8, extra in 0usize..=6, complex in any::<bool>()) {
        let mut rng = seeded(seed);
        let frame = Frame::from_matrix(d, random_matrix(&mut rng, d, d + extra, complex));
        let (alpha, beta) = frame.frame_bounds().unwrap();
        let s = frame.frame_operator();
        for f in unit_vectors(&mut rng, d, 100, complex) {
            let q = f.dotc(&(&s * &f)).re;
            prop_assert!(q >= alpha * (1.0 - 1e-9) && q <= beta * (1.0 + 1e-9));
        }
    }

    #[test]
    fn canonical_dual_is_an_involution(seed in any::<u64>(), d in 1usize..=8, extra in 0usize..=6, complex in any::<bool>()) {
        let mut rng = seeded(seed);
        let frame = Frame::from_matrix(d, random_matrix(&mut rng, d, d + extra, complex));
        let dual = frame.canonical_dual().unwrap();
        prop_assert!(is_dual_frame(&frame, &dual, 1e-9).unwrap());
        let back = dual.canonical_dual().unwrap();
        for k in 0..frame.len() {
            prop_assert!((frame.vector(k) - back.vector(k)).norm() <= 1e-9 * frame.vector(k).norm().max(1.0));
        }
    }

    #[test]
    fn fusion_bounds_hold(seed in any::<u64>(), d in 1usize..=10, m in 1usize..=6, complex in any::<bool>()) {
        let mut rng = seeded(seed);
        let ff = random_fusion_frame(&mut rng, d, m, complex);
        let (alpha, beta) = ff.fusion_bounds().unwrap();
        for f in unit_vectors(&mut rng, d, 100, complex) {
            let energy: f64 = ff
                .subspaces()
                .iter()
                .zip(ff.weights())
                .map(|(s, w)| w * w * (s.projector() * &f).norm_squared())
                .sum();
            prop_assert!(energy >= alpha * (1.0 - 1e-9) && energy <= beta * (1.0 + 1e-9));
        }
    }

    #[test]
    fn fusion_operator_factors_through_synthesis(seed in any::<u64>(), d in 1usize..=10, m in 1usize..=6, complex in any::<bool>()) {
        let ff = random_fusion_frame(&mut seeded(seed), d, m, complex);
        let product = ff.synthesis_matrix() * ff.analysis_matrix();
        prop_assert!(frobenius_norm(&(ff.fusion_operator() - product)) <= 1e-12 * ff.fusion_operator().norm().max(1.0));
        let coords = ff.analysis(&Vector::from_element(d, 1.0.into()));
        prop_assert_eq!(coords.dims(), ff.dims());
    }

    #[test]
    fn riesz_iff_bijective_analysis(seed in any::<u64>(), d in 1usize..=8, m in 1usize..=5, complex in any::<bool>()) {
        let ff = random_fusion_frame(&mut seeded(seed), d, m, complex);
        let t = ff.synthesis_matrix();
        let bijective = t.ncols() == d && rank(&t, RANK_TOL) == d;
        prop_assert_eq!(ff.is_riesz(), bijective);
    }

    #[test]
    fn random_riesz_bases_are_riesz(seed in any::<u64>(), dims in prop::collection::vec(1usize..=3, 1..=4), complex in any::<bool>()) {
        let ff = random_riesz_basis(&mut seeded(seed), &dims, complex);
        prop_assert!(ff.is_riesz());
        prop_assert!(ff.classify().is_riesz);
        prop_assert!(!ff.classify().is_overcomplete);
    }
}
