use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swapgain::entfrac::{
    apply_local, bell_diagonal_state, initial_singlet_fraction, make_rho_ab, make_rho_bc,
    singlet_fraction_magic, FamilyParams,
};
use swapgain::filter::optimal_filter_closed;
use swapgain::optics::{apply_beam_splitter, prepare_sources, BeamSplitterSpec, Mode};
use swapgain::qcore::random::{random_density, random_isometry, random_unitary};
use swapgain::qcore::{partial_trace_matrix, partial_transpose, tensor_product, ComplexMatrix};
use swapgain::swap::{
    bell_diagonal_nogo_check, deterministic_swap, phi_branch_closed, psi_branch_closed,
    psi_probability, swap_general, unconditional_outer_state,
};
use swapgain::teleport::{compose, strategy_one_fidelity, strategy_two_fidelity, QuantumChannel};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn family() -> impl Strategy<Value = FamilyParams> {
    (0.01f64..=1.0, 0.01f64..0.99).prop_map(|(p, a)| FamilyParams::new(p, a).unwrap())
}

fn simplex() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.001f64..1.0).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.map(|x| x / s)
    })
}

fn channel(seed: u64) -> QuantumChannel {
    let mut r = rng(seed);
    let k = 1 + (seed % 4) as usize;
    let v = random_isometry(&mut r, 2 * k, 2);
    let kraus: Vec<ComplexMatrix> = (0..k)
        .map(|j| {
            ComplexMatrix::new(2, 2, (0..4).map(|i| v[(2 * j + i / 2, i % 2)]).collect()).unwrap()
        })
        .collect();
    QuantumChannel::from_kraus(&kraus).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_then_partial_trace(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y) = (random_density(&mut r, 2), random_density(&mut r, 4));
        let joint = tensor_product(x.matrix(), y.matrix());
        prop_assert!((joint.trace() - x.matrix().trace() * y.matrix().trace()).norm() < 1e-12);
        prop_assert!(partial_trace_matrix(&joint, &[2, 2, 2], &[0]).unwrap().approx_eq(x.matrix(), 1e-12));
        prop_assert!(partial_trace_matrix(&joint, &[2, 2, 2], &[1, 2]).unwrap().approx_eq(y.matrix(), 1e-12));
    }

    #[test]
    fn tensor_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y, z) = (random_density(&mut r, 2), random_density(&mut r, 2), random_density(&mut r, 3));
        let left = tensor_product(&tensor_product(x.matrix(), y.matrix()), z.matrix());
        let right = tensor_product(x.matrix(), &tensor_product(y.matrix(), z.matrix()));
        prop_assert!(left.approx_eq(&right, 1e-14));
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), side in 0usize..2) {
        let rho = random_density(&mut rng(seed), 4);
        let once = partial_transpose(rho.matrix(), (2, 2), side).unwrap();
        let twice = partial_transpose(&once, (2, 2), side).unwrap();
        prop_assert!(twice.approx_eq(rho.matrix(), 1e-15));
    }

    #[test]
    fn singlet_fraction_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, 4);
        let f = singlet_fraction_magic(&rho).unwrap();
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&f));
        let (u, v) = (random_unitary(&mut r, 2), random_unitary(&mut r, 2));
        let g = singlet_fraction_magic(&apply_local(&rho, &u, &v)).unwrap();
        prop_assert!((f - g).abs() < 1e-10);
    }

    #[test]
    fn swap_outcomes_average_to_product_of_marginals(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y) = (random_density(&mut r, 4), random_density(&mut r, 4));
        let ens = swap_general(&x, &y).unwrap();
        prop_assert!((ens.probability_sum() - 1.0).abs() < 1e-12);
        let outer = unconditional_outer_state(&x, &y).unwrap();
        prop_assert!(ens.average_state().approx_eq(&outer, 1e-12));
    }

    #[test]
    fn family_is_symmetric_under_mirroring(q in family()) {
        let m = q.mirrored();
        prop_assert!((initial_singlet_fraction(&q) - initial_singlet_fraction(&m)).abs() < 1e-12);
        let (dq, dm) = (deterministic_swap(&q).unwrap(), deterministic_swap(&m).unwrap());
        prop_assert!((dq.average_singlet_fraction - dm.average_singlet_fraction).abs() < 1e-10);
        prop_assert!((optimal_filter_closed(&q).f_star - optimal_filter_closed(&m).f_star).abs() < 1e-12);
    }

    #[test]
    fn strategies_are_symmetric_and_ordered(a in 0.01f64..0.99) {
        let q = FamilyParams::new(0.75, a).unwrap();
        let m = q.mirrored();
        let (s1, s2) = (strategy_one_fidelity(&q).unwrap(), strategy_two_fidelity(&q).unwrap());
        prop_assert!((s1 - strategy_one_fidelity(&m).unwrap()).abs() < 1e-9);
        prop_assert!((s2 - strategy_two_fidelity(&m).unwrap()).abs() < 1e-9);
        prop_assert!(s2 >= s1 - 1e-9);
        prop_assert!(s2 > 2.0 / 3.0);
    }

    #[test]
    fn first_principles_swap_matches_closed_forms(q in family()) {
        let ens = swap_general(&make_rho_ab(&q), &make_rho_bc(&q)).unwrap();
        prop_assert!((ens.psi_probability() - psi_probability(&q)).abs() < 1e-12);
        let psi = psi_branch_closed(&q).unwrap();
        let phi = phi_branch_closed(&q).unwrap();
        for b in &ens.branches {
            let closed = if b.outcome.is_psi() { &psi } else { &phi };
            prop_assert!((b.singlet_fraction - closed.singlet_fraction).abs() < 1e-10);
        }
    }

    #[test]
    fn filtering_never_hurts(q in family()) {
        let f = optimal_filter_closed(&q).f_star;
        prop_assert!(f >= initial_singlet_fraction(&q).max(0.5) - 1e-12);
        prop_assert!(f <= 1.0 + 1e-12);
    }

    #[test]
    fn bell_diagonal_swaps_never_gain(x in simplex(), y in simplex()) {
        let r = bell_diagonal_nogo_check(x, y).unwrap();
        prop_assert!(r.gain() <= 1e-10);
        // the branches are Bell diagonal too, so their fraction is a weight
        prop_assert!(r.max_branch_singlet_fraction >= 0.25 - 1e-12);
        let rho = bell_diagonal_state(x).unwrap();
        prop_assert!((singlet_fraction_magic(&rho).unwrap() - x.iter().cloned().fold(0.0, f64::max)).abs() < 1e-12);
    }

    #[test]
    fn channel_composition_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (x, y, z) = (channel(s1), channel(s2), channel(s3));
        let left = compose(&compose(&z, &y).unwrap(), &x).unwrap();
        let right = compose(&z, &compose(&y, &x).unwrap()).unwrap();
        prop_assert!(left.choi().approx_eq(right.choi(), 1e-12));
    }

    #[test]
    fn beam_splitters_preserve_norm(q in family(), t in 0.0f64..=1.0) {
        let s = prepare_sources(&q);
        for (m1, m2) in [(Mode::B1, Mode::B2), (Mode::A, Mode::C), (Mode::B2, Mode::B4)] {
            let out = apply_beam_splitter(&s, &BeamSplitterSpec::new(m1, m2, t).unwrap()).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
            prop_assert!((out.mean_photon_number() - 2.0).abs() < 1e-12);
        }
    }
}
