mod common;

use mdiqkd_core::discrimination::{
    isometry_extend, min_error, operator_outputs, optimize_probe, state_rank, unambiguous_discrimination, CVector,
    DiscriminationProblem, ProbeSearch, ProbeSpec,
};
use mdiqkd_core::opsets::{build_catalog, CatalogKind};
use mdiqkd_core::qmath::{tensor, Complex64, PureState, RandomStream, Unitary};
use mdiqkd_core::Error;

fn bb84_ops() -> Vec<Unitary> {
    build_catalog(CatalogKind::Bb84Four, None)
        .unwrap()
        .entries()
        .iter()
        .map(|e| e.unitary.clone())
        .collect()
}

fn bb84_states() -> Vec<PureState> {
    vec![PureState::zero(), PureState::one(), PureState::plus(), PureState::minus()]
}

#[test]
fn bb84_states_agree_with_grid_oracle() {
    let p = DiscriminationProblem::from_pure_states(&bb84_states(), None).unwrap();
    let s = min_error(&p).unwrap();
    let states = [common::zero(), common::one(), common::plus(), common::minus()];
    let grid = common::projective_grid_success(&states, &[0.25; 4], 1e-4);
    assert!((s.success - 0.5).abs() < 1e-6);
    assert!((grid - 0.5).abs() < 1e-6);
    assert!(s.gap < 1e-6 && s.residual < 1e-6);
}

#[test]
fn zero_plus_against_grid_and_helstrom() {
    let p = DiscriminationProblem::from_pure_states(&[PureState::zero(), PureState::plus()], None).unwrap();
    let s = min_error(&p).unwrap();
    let grid = common::projective_grid_success(&[common::zero(), common::plus()], &[0.5, 0.5], 1e-4);
    assert!((s.success - 0.853553).abs() < 1e-6);
    assert!((s.success - common::helstrom(0.5, 0.5)).abs() < 1e-9);
    assert!((grid - s.success).abs() < 1e-6);
}

#[test]
fn random_qubit_ensembles_never_beat_solver() {
    let mut rng = RandomStream::from_seed(11);
    for _ in 0..20 {
        let states: Vec<PureState> = (0..3).map(|_| PureState::random(1, &mut rng).unwrap()).collect();
        let q: Vec<common::Qubit> = states.iter().map(|s| [s.amplitudes()[0], s.amplitudes()[1]]).collect();
        let s = min_error(&DiscriminationProblem::from_pure_states(&states, None).unwrap()).unwrap();
        let grid = common::projective_grid_success(&q, &[1.0 / 3.0; 3], 1e-4);
        assert!(grid <= s.dual_bound + 1e-9, "{grid} > {}", s.dual_bound);
    }
}

#[test]
fn operator_outputs_examples() {
    let ops = bb84_ops();
    let outs = operator_outputs(&ops, &ProbeSpec::single(PureState::zero()).unwrap()).unwrap();
    for (o, e) in outs.iter().zip(bb84_states()) {
        assert!(o.same_ray(&e, 1e-12));
    }
    // maximally entangled probe: outputs are (I ⊗ T)|Φ+>, Gram entries tr(S†T)/2
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = PureState::new(vec![
        Complex64::new(s, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
    ])
    .unwrap();
    let outs = operator_outputs(&ops, &ProbeSpec::new(2, 1, bell).unwrap()).unwrap();
    let mats = common::bb84_ops();
    for i in 0..4 {
        for j in 0..4 {
            let got = outs[i].inner(&outs[j]).unwrap();
            let (a, b) = (&mats[i].0, &mats[j].0);
            let mut tr = Complex64::new(0.0, 0.0);
            for r in 0..2 {
                for k in 0..2 {
                    tr += a[k][r].conj() * b[k][r];
                }
            }
            assert!((got - tr / 2.0).norm() < 1e-12);
        }
    }
}

#[test]
fn isometry_examples() {
    let v = isometry_extend(&PureState::zero(), &PureState::one()).unwrap();
    for s in bb84_states() {
        assert!(v.apply(&s).unwrap().same_ray(&s, 1e-14));
    }
    // probe |0>: s_Z = Z|0>, s_X = X|0>, and V maps the BB84 states onto the outputs
    let ops = bb84_ops();
    let outs = operator_outputs(&ops, &ProbeSpec::single(PureState::zero()).unwrap()).unwrap();
    let v = isometry_extend(&outs[0], &outs[1]).unwrap();
    for (s, o) in bb84_states().iter().zip(&outs) {
        assert!(v.apply(s).unwrap().same_ray(o, 1e-12));
    }
}

#[test]
fn isometry_preserves_discrimination_for_random_real_probes() {
    let mut rng = RandomStream::from_seed(12);
    let ops = bb84_ops();
    for _ in 0..10 {
        // real amplitudes keep s_Z and s_X orthogonal
        let raw: Vec<f64> = (0..4).map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5).collect();
        let probe = PureState::new(raw.iter().map(|x| Complex64::new(*x, 0.0)).collect()).unwrap();
        let outs = operator_outputs(&ops, &ProbeSpec::new(2, 1, probe).unwrap()).unwrap();
        let v = isometry_extend(&outs[0], &outs[1]).unwrap();
        let g = v.gram();
        assert!((g[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12 && g[1].norm() < 1e-12);
        let embedded: Vec<PureState> = bb84_states().iter().map(|s| v.apply(s).unwrap()).collect();
        let a = min_error(&DiscriminationProblem::from_pure_states(&embedded, None).unwrap()).unwrap();
        let b = min_error(&DiscriminationProblem::from_pure_states(&outs, None).unwrap()).unwrap();
        assert!((a.success - b.success).abs() < 1e-6);
    }
}

#[test]
fn isometry_rejects_overlap() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a = PureState::new(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]).unwrap();
    assert!(matches!(isometry_extend(&a, &PureState::plus()), Err(Error::NotOrthogonal(_))));
}

#[test]
fn single_operator_subset() {
    let r = optimize_probe(
        &[Unitary::pauli_z()],
        None,
        2,
        1,
        &ProbeSearch {
            starts: 4,
            ..ProbeSearch::default()
        },
    )
    .unwrap();
    assert!((r.success - 1.0).abs() < 1e-9);
}

#[test]
fn usd_examples() {
    let ops = bb84_ops();
    let mut rng = RandomStream::from_seed(13);
    for _ in 0..20 {
        let probe = PureState::random(1, &mut rng).unwrap();
        let outs = operator_outputs(&ops, &ProbeSpec::single(probe).unwrap()).unwrap();
        let p = DiscriminationProblem::from_pure_states(&outs, None).unwrap();
        assert!(matches!(unambiguous_discrimination(&p), Err(Error::UsdInfeasible { .. })));
    }
    let p = DiscriminationProblem::from_pure_states(&[PureState::plus(), PureState::minus()], None).unwrap();
    assert!((unambiguous_discrimination(&p).unwrap().rate - 1.0).abs() < 1e-12);
}

#[test]
fn two_photon_outputs_are_dependent_for_every_probe_pair() {
    let ops = bb84_ops();
    let mut rng = RandomStream::from_seed(14);
    for _ in 0..50 {
        let a = PureState::random(1, &mut rng).unwrap();
        let b = PureState::random(1, &mut rng).unwrap();
        let joint = tensor(&a, &b).unwrap();
        let outs = operator_outputs(&ops, &ProbeSpec::new(1, 2, joint).unwrap()).unwrap();
        assert!(state_rank(&outs, 1e-9) <= 3);
    }
    // entangled two-photon probes as well
    for _ in 0..50 {
        let joint = PureState::random(2, &mut rng).unwrap();
        let outs = operator_outputs(&ops, &ProbeSpec::new(1, 2, joint).unwrap()).unwrap();
        assert!(state_rank(&outs, 1e-9) <= 3);
    }
}

#[test]
fn three_photon_outputs_allow_usd_and_never_misidentify() {
    let ops = bb84_ops();
    let joint = tensor(&tensor(&PureState::zero(), &PureState::plus()).unwrap(), &PureState::zero()).unwrap();
    let outs = operator_outputs(&ops, &ProbeSpec::new(1, 3, joint).unwrap()).unwrap();
    let p = DiscriminationProblem::from_pure_states(&outs, None).unwrap();
    let usd = unambiguous_discrimination(&p).unwrap();
    assert!(usd.rate > 0.0);
    let mut rng = RandomStream::from_seed(15);
    let mut conclusive = 0;
    for i in 0..100_000 {
        let truth = i % 4;
        let v = CVector::from_column_slice(outs[truth].amplitudes());
        let k = usd.povm.sample(&v, &mut rng);
        if k < 4 {
            conclusive += 1;
            assert_eq!(k, truth);
        }
    }
    assert!(conclusive > 0);
}

#[test]
fn usd_soundness_by_sampling() {
    let mut rng = RandomStream::from_seed(16);
    let states: Vec<PureState> = (0..4).map(|_| PureState::random(2, &mut rng).unwrap()).collect();
    let p = DiscriminationProblem::from_pure_states(&states, None).unwrap();
    let usd = unambiguous_discrimination(&p).unwrap();
    let (neg, comp) = usd.povm.deviation();
    assert!(neg < 1e-9 && comp < 1e-9);
    let mut conclusive = 0u64;
    let mut i = 0usize;
    while conclusive < 100_000 {
        let truth = i % 4;
        i += 1;
        let k = usd.povm.sample(&p.states()[truth], &mut rng);
        if k < 4 {
            assert_eq!(k, truth);
            conclusive += 1;
        }
    }
}

#[test]
fn second_copy_helps_min_error() {
    let ops = bb84_ops();
    let search = ProbeSearch::default();
    let one = optimize_probe(&ops, None, 1, 1, &search).unwrap();
    let two = optimize_probe(&ops, None, 1, 2, &search).unwrap();
    assert!((one.success - 0.5).abs() < 1e-4);
    assert!(two.success >= one.success + 0.05, "{} vs {}", two.success, one.success);
    // the grid oracle confirms the single-copy value
    let states = [common::zero(), common::one(), common::plus(), common::minus()];
    assert!((common::projective_grid_success(&states, &[0.25; 4], 1e-4) - one.success).abs() < 1e-4);
}
