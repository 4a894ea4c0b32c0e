//! Property tests for the entanglement measure: invariance under local
//! unitaries and vanishing on separable states, the two facts that make the
//! number reported by the sweeps meaningful.

use hqsim_core::algebra::{kron, ComplexMatrix, DensityMatrix, SubsystemLabel, SystemLayout};
use hqsim_core::observables::concurrence;
use num_complex::Complex;
use proptest::prelude::*;

fn two_qubits() -> SystemLayout {
    SystemLayout::new(vec![(SubsystemLabel::Nv, 2), (SubsystemLabel::Sc, 2)]).unwrap()
}

/// General single-qubit unitary from three Euler-like angles.
fn qubit_unitary(theta: f64, phi: f64, lam: f64) -> ComplexMatrix<f64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            Complex::new(c, 0.0),
            Complex::from_polar(s, phi),
            -Complex::from_polar(s, lam),
            Complex::from_polar(c, phi + lam),
        ],
    )
    .unwrap()
}

fn normalized(raw: &[(f64, f64)]) -> Option<Vec<Complex<f64>>> {
    let amps: Vec<Complex<f64>> = raw.iter().map(|&(re, im)| Complex::new(re, im)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-3 {
        return None;
    }
    Some(amps.iter().map(|a| a / norm).collect())
}

fn amp_pair() -> impl Strategy<Value = (f64, f64)> {
    (-1.0f64..1.0, -1.0f64..1.0)
}

fn angles() -> impl Strategy<Value = (f64, f64, f64)> {
    let tau = std::f64::consts::TAU;
    (0.0..tau, 0.0..tau, 0.0..tau)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concurrence_is_invariant_under_local_unitaries(
        raw in proptest::array::uniform4(amp_pair()),
        a in angles(),
        b in angles(),
    ) {
        let Some(amps) = normalized(&raw) else { return Ok(()) };
        let layout = two_qubits();
        let rho = DensityMatrix::pure(layout.clone(), &amps).unwrap();
        let u = kron(&qubit_unitary(a.0, a.1, a.2), &qubit_unitary(b.0, b.1, b.2));
        let rotated = u.mul(rho.matrix()).mul(&u.adjoint());
        let rho_rot = DensityMatrix::new(layout, rotated).unwrap();
        let c0 = concurrence(&rho).unwrap();
        let c1 = concurrence(&rho_rot).unwrap();
        prop_assert!((c0 - c1).abs() <= 1e-9, "C changed under local unitary: {c0} vs {c1}");
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c0));
    }

    #[test]
    fn product_states_carry_no_concurrence(
        qa in proptest::array::uniform2(amp_pair()),
        qb in proptest::array::uniform2(amp_pair()),
    ) {
        let (Some(a), Some(b)) = (normalized(&qa), normalized(&qb)) else { return Ok(()) };
        let amps: Vec<Complex<f64>> =
            (0..4).map(|k| a[k / 2] * b[k % 2]).collect();
        let rho = DensityMatrix::pure(two_qubits(), &amps).unwrap();
        prop_assert!(concurrence(&rho).unwrap() <= 1e-9);
    }

    #[test]
    fn product_state_mixtures_stay_separable(
        qs in proptest::collection::vec(
            (proptest::array::uniform2(amp_pair()), proptest::array::uniform2(amp_pair())),
            2..4,
        ),
        ws in proptest::collection::vec(0.1f64..1.0, 4),
    ) {
        let layout = two_qubits();
        let mut m = ComplexMatrix::<f64>::zeros(4, 4);
        let mut total = 0.0;
        let mut used = 0;
        for (i, (qa, qb)) in qs.iter().enumerate() {
            let (Some(a), Some(b)) = (normalized(qa), normalized(qb)) else { continue };
            let amps: Vec<Complex<f64>> = (0..4).map(|k| a[k / 2] * b[k % 2]).collect();
            let w = ws[i % ws.len()];
            total += w;
            used += 1;
            for r in 0..4 {
                for c in 0..4 {
                    m[(r, c)] += amps[r] * amps[c].conj() * Complex::new(w, 0.0);
                }
            }
        }
        if used == 0 { return Ok(()) }
        let m = m.scaled(Complex::new(1.0 / total, 0.0));
        let rho = DensityMatrix::new(layout, m).unwrap();
        prop_assert!(concurrence(&rho).unwrap() <= 1e-9);
    }
}
