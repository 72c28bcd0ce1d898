use fusion_frames::cli::fixtures;
use fusion_frames::io::InputSpec;
use fusion_frames::linalg::Field;
use fusion_frames::sampling::{random_fusion_frame, seeded};
use proptest::prelude::*;

#[test]
fn fixtures_survive_a_round_trip() {
    for (name, text) in fixtures::ALL {
        let spec = InputSpec::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = InputSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, again, "{name}");
        assert_eq!(spec.to_json(), again.to_json(), "{name}");
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let text = fixtures::EXAMPLE_6_3.replacen("\"field\"", "\"colour\": 1, \"field\"", 1);
    assert!(InputSpec::from_json(&text).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_fusion_frames_round_trip(seed in any::<u64>(), d in 1usize..=8, m in 1usize..=5, complex in any::<bool>()) {
        let ff = random_fusion_frame(&mut seeded(seed), d, m, complex);
        let field = if complex { Field::Complex } else { Field::Real };
        let spec = InputSpec::from_fusion_frame(&ff, field);
        let text = spec.to_json();
        let parsed = InputSpec::from_json(&text).unwrap();
        prop_assert_eq!(&parsed, &spec);
        prop_assert_eq!(parsed.to_json(), text);
        let back = parsed.fusion_frame().unwrap();
        prop_assert_eq!(back.weights(), ff.weights());
        for (a, b) in back.subspaces().iter().zip(ff.subspaces()) {
            prop_assert!(a.distance(b) <= 1e-12);
        }
    }
}
