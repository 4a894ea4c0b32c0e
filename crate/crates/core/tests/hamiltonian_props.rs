//! Structural properties of the model builders: Hermiticity, the conserved
//! charge of each interaction, and the fixed charge shift of every collapse
//! channel (the fact the graded backend is built on).

use hqsim_core::algebra::{ComplexMatrix, SystemLayout};
use hqsim_core::model::{h_entangle, h_transfer, HamiltonianSet, ModelParams};
use num_complex::Complex;
use proptest::prelude::*;

fn charge_diag(table: &[i64]) -> ComplexMatrix<f64> {
    let n = table.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &q) in table.iter().enumerate() {
        m[(i, i)] = Complex::new(q as f64, 0.0);
    }
    m
}

fn commutator_norm(set: &HamiltonianSet<f64>) -> f64 {
    let h = set.hamiltonian.to_dense();
    let q = charge_diag(set.charges.as_ref().unwrap());
    h.mul(&q).sub(&q.mul(&h)).max_abs()
}

/// Every collapse channel must shift the charge by one fixed amount.
fn collapse_shifts_are_constant(set: &HamiltonianSet<f64>) -> bool {
    let table = set.charges.as_ref().unwrap();
    set.collapse_ops.iter().all(|(op, _)| {
        let mut shift: Option<i64> = None;
        op.entries().iter().all(|&(r, c, _)| {
            let s = table[r as usize] - table[c as usize];
            match shift {
                None => {
                    shift = Some(s);
                    true
                }
                Some(prev) => prev == s,
            }
        })
    })
}

fn params() -> impl Strategy<Value = ModelParams<f64>> {
    (
        0.1f64..2.0,
        0.1f64..2.0,
        0.1f64..2.0,
        0.0f64..0.3,
        0.0f64..0.3,
        2usize..6,
        2usize..6,
        0.0f64..std::f64::consts::PI,
    )
        .prop_map(|(g1, g2, gi, k1, k2, n_a, n_b, theta)| ModelParams {
            g1,
            g2,
            gi_lin: gi,
            kappa1: k1,
            kappa2: k2,
            n_a,
            n_b,
            theta,
            ..ModelParams::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn transfer_model_is_hermitian_and_charge_conserving(m in params()) {
        let layout = SystemLayout::canonical(m.n_a, m.n_b).unwrap();
        let set = h_transfer(&m, &layout).unwrap();
        let h = set.hamiltonian.to_dense();
        prop_assert!(h.hermitian_deviation() <= 1e-14 * h.max_abs().max(1.0));
        prop_assert!(commutator_norm(&set) <= 1e-12);
        prop_assert!(collapse_shifts_are_constant(&set));
    }

    #[test]
    fn pair_generation_model_is_hermitian_and_charge_conserving(m in params()) {
        let layout = SystemLayout::canonical(m.n_a, m.n_b).unwrap();
        let set = h_entangle(&m, &layout).unwrap();
        let h = set.hamiltonian.to_dense();
        prop_assert!(h.hermitian_deviation() <= 1e-14 * h.max_abs().max(1.0));
        prop_assert!(commutator_norm(&set) <= 1e-12);
        prop_assert!(collapse_shifts_are_constant(&set));
    }

    #[test]
    fn zero_couplings_give_a_zero_hamiltonian(
        n_a in 2usize..5,
        n_b in 2usize..5,
    ) {
        let m = ModelParams {
            g1: 0.0,
            g2: 0.0,
            gi_lin: 0.0,
            n_a,
            n_b,
            ..ModelParams::default()
        };
        let layout = SystemLayout::canonical(n_a, n_b).unwrap();
        let set = h_transfer(&m, &layout).unwrap();
        prop_assert_eq!(set.hamiltonian.to_dense().max_abs(), 0.0);
    }
}
