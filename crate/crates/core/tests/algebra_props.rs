//! Randomized checks of the linear-algebra layer: tensor products, partial
//! traces, the eigensolver, and sparse application against dense products.

use hqsim_core::algebra::expm::{expm, expm_apply};
use hqsim_core::algebra::eig::{herm_eig, psd_sqrt};
use hqsim_core::algebra::{
    kron, ComplexMatrix, DensityMatrix, SparseOperator, SubsystemLabel, SystemLayout,
};
use num_complex::Complex;
use proptest::prelude::*;

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
}

fn dense(n: usize, raw: &[(f64, f64)]) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let (re, im) = raw[i * n + j];
        Complex::new(re, im)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_satisfies_the_mixed_product_rule(
        a in entries(2), b in entries(3), c in entries(2), d in entries(3),
    ) {
        let (a, b, c, d) = (dense(2, &a), dense(3, &b), dense(2, &c), dense(3, &d));
        let lhs = kron(&a, &b).mul(&kron(&c, &d));
        let rhs = kron(&a.mul(&c), &b.mul(&d));
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn partial_trace_recovers_the_factors(
        sa in entries(2), sb in entries(3),
    ) {
        let layout = SystemLayout::new(vec![
            (SubsystemLabel::Sc, 2),
            (SubsystemLabel::Mw, 3),
        ]).unwrap();
        let normalize = |m: ComplexMatrix<f64>| {
            let g = m.mul(&m.adjoint());
            let tr: f64 = (0..g.rows()).map(|i| g[(i, i)].re).sum();
            g.scaled(Complex::new(1.0 / tr, 0.0))
        };
        let ra = normalize(dense(2, &sa));
        let rb = normalize(dense(3, &sb));
        let rho = DensityMatrix::new(layout, kron(&ra, &rb)).unwrap();
        let back_a = rho.partial_trace(&[SubsystemLabel::Sc]).unwrap();
        let back_b = rho.partial_trace(&[SubsystemLabel::Mw]).unwrap();
        prop_assert!(back_a.matrix().max_diff(&ra) <= 1e-12);
        prop_assert!(back_b.matrix().max_diff(&rb) <= 1e-12);
        prop_assert!((back_a.trace() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs_and_is_orthonormal(raw in entries(6)) {
        let mut h = dense(6, &raw);
        h.symmetrize();
        let (vals, vecs) = herm_eig(&h).unwrap();
        let scale = h.frobenius_norm().max(1.0);
        let gram = vecs.adjoint().mul(&vecs);
        prop_assert!(gram.max_diff(&ComplexMatrix::identity(6)) <= 1e-12);
        let hv = h.mul(&vecs);
        let vl = ComplexMatrix::from_fn(6, 6, |i, j| vecs[(i, j)] * Complex::new(vals[j], 0.0));
        prop_assert!(hv.max_diff(&vl) <= 1e-12 * scale);
        prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn psd_sqrt_squares_back_on_gram_matrices(raw in entries(4)) {
        let b = dense(4, &raw);
        let g = b.mul(&b.adjoint());
        let s = psd_sqrt(&g).unwrap();
        prop_assert!(s.mul(&s).max_diff(&g) <= 1e-10 * g.max_abs().max(1.0));
    }

    #[test]
    fn expm_inverts_on_negation(raw in entries(4)) {
        let a = dense(4, &raw);
        let e = expm(&a).unwrap();
        let em = expm(&a.scaled(Complex::new(-1.0, 0.0))).unwrap();
        prop_assert!(e.mul(&em).max_diff(&ComplexMatrix::identity(4)) <= 1e-11);
    }

    #[test]
    fn expm_apply_agrees_with_the_full_exponential(
        raw in entries(4),
        vraw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        let a = dense(4, &raw);
        let v: Vec<Complex<f64>> = vraw.iter().map(|&(re, im)| Complex::new(re, im)).collect();
        let full = expm(&a).unwrap();
        let direct: Vec<Complex<f64>> = (0..4)
            .map(|i| (0..4).map(|j| full[(i, j)] * v[j]).sum())
            .collect();
        let action = expm_apply(&a, &v).unwrap();
        let err: f64 = direct
            .iter()
            .zip(&action)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        prop_assert!(err <= 1e-11);
    }

    #[test]
    fn sparse_application_matches_dense_products(
        raw in entries(5),
        sraw in entries(5),
        keep in proptest::collection::vec(any::<bool>(), 25),
    ) {
        let x = dense(5, &raw);
        let mut d = dense(5, &sraw);
        for i in 0..5 {
            for j in 0..5 {
                if !keep[i * 5 + j] {
                    d[(i, j)] = Complex::new(0.0, 0.0);
                }
            }
        }
        let sp = SparseOperator::from_dense(&d);
        let mut left = ComplexMatrix::zeros(5, 5);
        let mut right = ComplexMatrix::zeros(5, 5);
        sp.apply_left(&x, &mut left);
        sp.apply_right(&x, &mut right);
        prop_assert!(left.max_diff(&d.mul(&x)) <= 1e-13);
        prop_assert!(right.max_diff(&x.mul(&d)) <= 1e-13);
        prop_assert!(sp.adjoint().to_dense().max_diff(&d.adjoint()) == 0.0);
    }
}
