//! Structural properties of the master-equation generator and the stepper:
//! trace conservation, Hermiticity, conserved charges of the ideal models,
//! and bit-level determinism of repeated runs.

use hqsim_core::algebra::{
    ComplexMatrix, DensityMatrix, SparseOperator, SubsystemLabel, SystemLayout,
};
use hqsim_core::dynamics::{
    lindblad_rhs, propagate_initial, propagate_rk4, EvolutionSpec, InitialState, Observer,
};
use hqsim_core::model::{h_entangle, h_transfer, HamiltonianSet, ModelParams};
use num_complex::Complex;
use proptest::prelude::*;

fn two_qubits() -> SystemLayout {
    SystemLayout::new(vec![(SubsystemLabel::Nv, 2), (SubsystemLabel::Sc, 2)]).unwrap()
}

/// Random mixed state from a random Gram matrix.
fn mixed_state(seed: &[f64]) -> DensityMatrix<f64> {
    let b = ComplexMatrix::from_fn(4, 4, |i, j| {
        let k = (4 * i + j) % seed.len();
        Complex::new(seed[k] + 0.1, seed[(k + 3) % seed.len()] * 0.7)
    });
    let mut g = b.mul(&b.adjoint());
    let tr: f64 = (0..4).map(|i| g[(i, i)].re).sum();
    g = g.scaled(Complex::new(1.0 / tr, 0.0));
    DensityMatrix::new(two_qubits(), g).unwrap()
}

fn random_model(h_seed: &[f64], rate: f64) -> HamiltonianSet<f64> {
    let mut h = ComplexMatrix::from_fn(4, 4, |i, j| {
        let k = (4 * i + j) % h_seed.len();
        Complex::new(h_seed[k], h_seed[(k + 5) % h_seed.len()])
    });
    h.symmetrize();
    let mut low = ComplexMatrix::<f64>::zeros(4, 4);
    low[(0, 1)] = Complex::new(1.0, 0.0);
    low[(2, 3)] = Complex::new(1.0, 0.0);
    HamiltonianSet::new(
        SparseOperator::from_dense(&h),
        vec![(SparseOperator::from_dense(&low), rate)],
        two_qubits(),
        None,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_is_trace_free_and_hermiticity_preserving(
        h_seed in proptest::collection::vec(-1.0f64..1.0, 8),
        s_seed in proptest::collection::vec(-1.0f64..1.0, 8),
        rate in 0.0f64..0.5,
    ) {
        let set = random_model(&h_seed, rate);
        let rho = mixed_state(&s_seed);
        let out = lindblad_rhs(&rho, &set).unwrap();
        let tr: Complex<f64> = (0..4).map(|i| out[(i, i)]).sum();
        prop_assert!(tr.norm() <= 1e-13, "trace leak {:e}", tr.norm());
        prop_assert!(out.hermitian_deviation() <= 1e-13);
    }

    #[test]
    fn short_propagation_keeps_the_state_valid(
        h_seed in proptest::collection::vec(-1.0f64..1.0, 8),
        s_seed in proptest::collection::vec(-1.0f64..1.0, 8),
        rate in 0.0f64..0.5,
    ) {
        let set = random_model(&h_seed, rate);
        let rho = mixed_state(&s_seed);
        let spec = EvolutionSpec::new(0.5, 5e-3, 20, 1e-8).unwrap();
        let run = propagate_rk4(&rho, &set, &spec, &[Observer::Trace, Observer::Purity]).unwrap();
        let fin = run.final_state.unwrap();
        prop_assert!((fin.trace() - 1.0).abs() <= 1e-10);
        prop_assert!(fin.purity() <= 1.0 + 1e-10);
        prop_assert!(run.health.positivity_certified);
        prop_assert!(run.health.herm_dev_max <= 1e-12);
    }
}

/// Charge expectation `tr(rho Q)` from the grading table.
fn charge_expectation(rho: &DensityMatrix<f64>, table: &[i64]) -> f64 {
    (0..rho.dim()).map(|i| rho.matrix()[(i, i)].re * table[i] as f64).sum()
}

#[test]
fn ideal_transfer_conserves_the_excitation_charge() {
    let m = ModelParams {
        kappa1: 0.0,
        kappa2: 0.0,
        gamma1: 0.0,
        gamma2: 0.0,
        n_a: 3,
        n_b: 3,
        ..ModelParams::default()
    };
    let layout = SystemLayout::canonical(m.n_a, m.n_b).unwrap();
    let set = h_transfer(&m, &layout).unwrap();
    let table = set.charges.clone().unwrap();
    let rho0 = DensityMatrix::nv_superposition(layout, 0.9).unwrap();
    let q0 = charge_expectation(&rho0, &table);
    let spec = EvolutionSpec::new(2.0, 5e-3, 50, 1e-8).unwrap();
    let run = propagate_rk4(&rho0, &set, &spec, &[]).unwrap();
    let q1 = charge_expectation(&run.final_state.unwrap(), &table);
    assert!((q1 - q0).abs() <= 1e-10, "charge drifted {q0} -> {q1}");
}

#[test]
fn ideal_pair_generation_conserves_the_difference_charge() {
    let m = ModelParams {
        gi_lin: 0.5,
        kappa1: 0.0,
        kappa2: 0.0,
        gamma1: 0.0,
        gamma2: 0.0,
        n_a: 4,
        n_b: 4,
        ..ModelParams::default()
    };
    let layout = SystemLayout::canonical(m.n_a, m.n_b).unwrap();
    let set = h_entangle(&m, &layout).unwrap();
    let table = set.charges.clone().unwrap();
    let rho0 = DensityMatrix::all_ground(layout);
    let q0 = charge_expectation(&rho0, &table);
    let spec = EvolutionSpec::new(2.0, 5e-3, 50, 1e-8).unwrap();
    let run = propagate_rk4(&rho0, &set, &spec, &[]).unwrap();
    let q1 = charge_expectation(&run.final_state.unwrap(), &table);
    assert!((q1 - q0).abs() <= 1e-10, "charge drifted {q0} -> {q1}");
}

#[test]
fn repeated_runs_are_bit_identical() {
    // dense path
    let m = ModelParams { gi_lin: 0.5, n_a: 3, n_b: 3, ..ModelParams::default() };
    let layout = SystemLayout::canonical(m.n_a, m.n_b).unwrap();
    let set = h_entangle(&m, &layout).unwrap();
    let spec = EvolutionSpec::new(1.0, 5e-3, 10, 1e-6).unwrap();
    let obs = [Observer::Concurrence, Observer::NOpt, Observer::Trace];
    let a = propagate_initial(&set, &InitialState::AllGround, &spec, &obs).unwrap();
    let b = propagate_initial(&set, &InitialState::AllGround, &spec, &obs).unwrap();
    for name in a.names() {
        assert_eq!(a.column(name), b.column(name), "column {name} differs between runs");
    }

    // graded path
    let m = ModelParams { gi_lin: 0.5, n_a: 5, n_b: 5, ..ModelParams::default() };
    let layout = SystemLayout::canonical(m.n_a, m.n_b).unwrap();
    let set = h_entangle(&m, &layout).unwrap();
    let a = propagate_initial(&set, &InitialState::AllGround, &spec, &obs).unwrap();
    let b = propagate_initial(&set, &InitialState::AllGround, &spec, &obs).unwrap();
    assert!(a.final_blocks.is_some(), "expected the graded backend at dim 100");
    for name in a.names() {
        assert_eq!(a.column(name), b.column(name), "column {name} differs between runs");
    }
}
