mod common;

use mdiqkd_core::decoy::{simulate_gains, ChannelModel, IntensitySchedule};
use mdiqkd_core::discrimination::{min_error, DiscriminationProblem};
use mdiqkd_core::opsets::{build_catalog, CatalogKind};
use mdiqkd_core::pnp::{purify, ControlPolicy, Provenance, Pulse};
use mdiqkd_core::qmath::{
    apply, apply_on_qubit, born_probabilities, tensor, Complex64, MeasurementBasis, PureState, RandomStream, Unitary,
};
use proptest::prelude::*;

fn amp() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn state(qubits: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec(amp(), 1 << qubits)
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6)
        .prop_map(|v| PureState::new(v).unwrap())
}

/// `e^{i a} Rz(b) Ry(c) Rz(d)`
fn unitary() -> impl Strategy<Value = Unitary> {
    (0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3).prop_map(|(a, b, cc, d)| {
        let g = Complex64::from_polar(1.0, a);
        let (s, co) = ((cc / 2.0).sin(), (cc / 2.0).cos());
        let e = |x: f64| Complex64::from_polar(1.0, x);
        Unitary::qubit(
            g * e(-(b + d) / 2.0) * co,
            -g * e(-(b - d) / 2.0) * s,
            g * e((b - d) / 2.0) * s,
            g * e((b + d) / 2.0) * co,
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn states_are_normalized(s in state(3)) {
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitaries_preserve_norm(u in unitary(), s in state(2), which in 0usize..2) {
        prop_assert!(u.unitarity_deviation() < 1e-12);
        let out = apply_on_qubit(&u, &s, which).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn products_of_unitaries_stay_unitary(a in unitary(), b in unitary()) {
        prop_assert!(a.mul(&b).unwrap().unitarity_deviation() < 1e-12);
        prop_assert!(a.kron(&b).unwrap().unitarity_deviation() < 1e-12);
    }

    #[test]
    fn tensor_is_normalized(a in state(1), b in state(2)) {
        prop_assert!((tensor(&a, &b).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn born_probabilities_sum_to_one(s in state(2), which in 0usize..2, basis in 0usize..3) {
        let mb = [MeasurementBasis::z(), MeasurementBasis::x(), MeasurementBasis::y()][basis].clone();
        let (p0, p1) = born_probabilities(&s, which, &mb).unwrap();
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
        prop_assert!(p0 >= -1e-15 && p1 >= -1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn min_error_matches_helstrom(a in state(1), b in state(1), p in 0.05f64..0.95) {
        let fid = a.fidelity(&b).unwrap();
        let prob = DiscriminationProblem::from_pure_states(&[a, b], Some(vec![p, 1.0 - p])).unwrap();
        let s = min_error(&prob).unwrap();
        prop_assert!((s.success - common::helstrom(p, fid)).abs() < 1e-6);
    }

    #[test]
    fn min_error_between_guessing_and_one(states in prop::collection::vec(state(2), 2..5)) {
        let n = states.len();
        let prob = DiscriminationProblem::from_pure_states(&states, None).unwrap();
        let s = min_error(&prob).unwrap();
        prop_assert!(s.success >= 1.0 / n as f64 - 1e-9);
        prop_assert!(s.success <= 1.0 + 1e-9);
        prop_assert!(s.dual_bound >= s.success - 1e-12);
        let (neg, comp) = s.povm.deviation();
        prop_assert!(neg < 1e-9 && comp < 1e-9);
    }

    #[test]
    fn purified_photon_is_normalized(s in state(1), probe in state(1), basis in 0usize..3, seed in any::<u64>()) {
        let mb = [MeasurementBasis::z(), MeasurementBasis::x(), MeasurementBasis::y()][basis].clone();
        let mut pulse = Pulse::single(s, Provenance::FromAlice);
        pulse.push(mdiqkd_core::pnp::Photon::new(probe, Provenance::EveProbe));
        let mut rng = RandomStream::from_seed(seed);
        let r = purify(&pulse, &mb, &mut rng, 1.0, ControlPolicy::Random).unwrap();
        prop_assert!((r.output_photon.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert_eq!(r.removed_count, 1);
    }

    #[test]
    fn gain_merge_is_associative(seed in any::<u64>()) {
        let s = IntensitySchedule::default();
        let ch = ChannelModel { transmittance: 0.5, ..ChannelModel::default() };
        let mut rng = RandomStream::from_seed(seed);
        let a = simulate_gains(&s, &ch, None, 50, &mut rng).unwrap();
        let b = simulate_gains(&s, &ch, None, 50, &mut rng).unwrap();
        let c = simulate_gains(&s, &ch, None, 50, &mut rng).unwrap();
        let mut left = a.clone();
        left.merge(&b);
        left.merge(&c);
        let mut bc = b.clone();
        bc.merge(&c);
        let mut right = a.clone();
        right.merge(&bc);
        prop_assert_eq!(left, right);
    }
}

#[test]
fn every_catalog_entry_is_unitary() {
    for kind in CatalogKind::ALL {
        let theta = (kind == CatalogKind::General).then_some(0.3);
        for e in build_catalog(kind, theta).unwrap().entries() {
            assert!(e.unitary.unitarity_deviation() < 1e-12, "{} {}", kind, e.label);
            let out = apply(&e.unitary, &PureState::plus()).unwrap();
            assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
