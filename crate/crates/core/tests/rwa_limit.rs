//! The explicitly time-dependent model must approach its rotating-wave
//! limit as the microwave frequency grows: at delta = omega_b the
//! beam-splitter term is resonant and the counter-rotating pair term
//! averages out at a rate set by 1/omega_b.

use hqsim_core::algebra::{DensityMatrix, SystemLayout};
use hqsim_core::dynamics::{
    propagate_rk4, propagate_timedep, EvolutionSpec, Observer, TimeSeries,
};
use hqsim_core::model::{h_transfer, ModelParams};
use hqsim_core::observables::transfer_arrival_target;

const T_FINAL: f64 = 3.0;

fn fidelity_curve_static(m: &ModelParams<f64>) -> TimeSeries<f64> {
    let layout = SystemLayout::canonical(m.n_a, m.n_b).unwrap();
    let set = h_transfer(m, &layout).unwrap();
    let rho0 = DensityMatrix::nv_superposition(layout, m.theta).unwrap();
    let spec = EvolutionSpec::new(T_FINAL, 1e-3, 50, 1e-6).unwrap();
    let obs = [Observer::Fidelity(transfer_arrival_target(m.theta))];
    propagate_rk4(&rho0, &set, &spec, &obs).unwrap()
}

fn fidelity_curve_timedep(m: &ModelParams<f64>, dt: f64, stride: usize) -> TimeSeries<f64> {
    let layout = SystemLayout::canonical(m.n_a, m.n_b).unwrap();
    let rho0 = DensityMatrix::nv_superposition(layout.clone(), m.theta).unwrap();
    let spec = EvolutionSpec::new(T_FINAL, dt, stride, 1e-6).unwrap();
    let obs = [Observer::Fidelity(transfer_arrival_target(m.theta))];
    propagate_timedep(&rho0, m, &spec, &obs).unwrap()
}

fn sup_distance(a: &TimeSeries<f64>, b: &TimeSeries<f64>) -> f64 {
    let fa = a.column("fidelity").unwrap();
    let fb = b.column("fidelity").unwrap();
    assert_eq!(a.times.len(), b.times.len(), "sample grids must align");
    for (ta, tb) in a.times.iter().zip(&b.times) {
        assert!((ta - tb).abs() <= 1e-12);
    }
    fa.iter().zip(fb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn counter_rotating_error_shrinks_with_the_fast_frequency() {
    let static_run = fidelity_curve_static(&ModelParams::default());
    // dt scaled to keep ~300 steps per fast period, strides matched so the
    // sample grids coincide at 0.05
    let cases = [(10.0, 1e-3, 50usize), (25.0, 5e-4, 100), (50.0, 2e-4, 250)];
    let mut sups = Vec::new();
    for (omega_b, dt, stride) in cases {
        let m = ModelParams { omega_b, delta: omega_b, ..ModelParams::default() };
        let td = fidelity_curve_timedep(&m, dt, stride);
        sups.push(sup_distance(&static_run, &td));
    }
    assert!(
        sups[0] > sups[1] && sups[1] > sups[2],
        "sup-distances not monotone: {sups:?}"
    );
    assert!(sups[2] <= 0.05, "residual at the fastest drive: {:.4}", sups[2]);
}
