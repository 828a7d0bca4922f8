use std::f64::consts::PI;

use geophase::dfs::{self, LogicalQubit};
use geophase::engine::{gate_fidelity, lindblad_evolve, propagate_unitary, EngineConfig, ErrorModel, TwoLevel};
use geophase::linalg::{expm_hermitian, su2_rotation, Operator};
use geophase::schedule::{apply_error, build, GateParams, Schedule, Scheme};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn gate() -> impl Strategy<Value = GateParams> {
    (0.0..PI, -PI..PI, -PI..PI).prop_map(|(t, p, g)| GateParams::new(t, p, g).unwrap())
}

fn scheme() -> impl Strategy<Value = Scheme> {
    prop_oneof![
        Just(Scheme::SingleLoop),
        (2u32..5).prop_map(Scheme::Composite),
        Just(Scheme::DynCorrected)
    ]
}

fn unit_axis() -> impl Strategy<Value = [f64; 3]> {
    (0.0..PI, -PI..PI).prop_map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
}

fn hermitian(dim: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec(-1.0..1.0f64, 2 * dim * dim).prop_map(move |raw| {
        let a = Operator::from_entries(dim, raw.chunks(2).map(|p| C::new(p[0], p[1])).collect()).unwrap();
        (&a + &a.adjoint()).scale_real(0.5)
    })
}

fn exact_propagator(gate: GateParams, scheme: Scheme, error: ErrorModel) -> Operator {
    propagate_unitary(
        &TwoLevel,
        &build(gate, scheme).unwrap(),
        &error,
        None,
        &EngineConfig::default(),
    )
    .unwrap()
    .propagator()
    .unwrap()
    .clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn su2_rotations_compose(n in unit_axis(), a in -7.0..7.0f64, b in -7.0..7.0f64) {
        let ab = su2_rotation(n, a).unwrap().matmul(&su2_rotation(n, b).unwrap());
        prop_assert!(ab.max_diff(&su2_rotation(n, a + b).unwrap()) < 1e-12);
    }

    #[test]
    fn expm_is_unitary_semigroup(
        h in prop::sample::select(vec![2usize, 4, 6, 16]).prop_flat_map(hermitian),
        t in -3.0..3.0f64,
        s in -3.0..3.0f64,
    ) {
        let ut = expm_hermitian(&h, t).unwrap();
        let us = expm_hermitian(&h, s).unwrap();
        prop_assert!(ut.unitarity_deviation() < 1e-10);
        prop_assert!(ut.matmul(&us).max_diff(&expm_hermitian(&h, t + s).unwrap()) < 1e-10);
    }

    #[test]
    fn error_free_gates_are_exact(g in gate(), sc in scheme()) {
        let f = gate_fidelity(&exact_propagator(g, sc, ErrorModel::default()), &g.target()).unwrap();
        prop_assert!(f > 1.0 - 1e-10, "{f}");
    }

    #[test]
    fn fidelity_bounded(g in gate(), sc in scheme(), eps in -0.5..0.5f64, delta in -0.5..0.5f64) {
        let f = gate_fidelity(&exact_propagator(g, sc, ErrorModel::coherent(eps, delta)), &g.target()).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn apply_error_composes(g in gate(), sc in scheme(), e1 in -0.2..0.2f64, e2 in -0.2..0.2f64, d1 in -0.1..0.1f64, d2 in -0.1..0.1f64) {
        let s = build(g, sc).unwrap();
        let twice = apply_error(&apply_error(&s, &ErrorModel::coherent(e1, d1)).unwrap(), &ErrorModel::coherent(e2, d2)).unwrap();
        let once = apply_error(&s, &ErrorModel::coherent((1.0 + e1) * (1.0 + e2) - 1.0, d1 + d2)).unwrap();
        for (a, b) in twice.segments.iter().zip(&once.segments) {
            prop_assert!((a.rabi - b.rabi).abs() < 1e-12);
            prop_assert_eq!(a.duration, b.duration);
        }
        prop_assert!((twice.error.epsilon - once.error.epsilon).abs() < 1e-12);
        prop_assert!((twice.error.delta - once.error.delta).abs() < 1e-12);
    }

    #[test]
    fn schedule_json_roundtrip(g in gate(), sc in scheme(), eps in -0.5..0.5f64) {
        let s = apply_error(&build(g, sc).unwrap(), &ErrorModel::coherent(eps, 0.01)).unwrap();
        prop_assert_eq!(Schedule::from_json(&s.to_json().unwrap()).unwrap(), s);
    }

    #[test]
    fn encoded_gate_immune_to_collective_dephasing(g in gate(), sc in scheme(), eps in -0.1..0.1f64, delta in -0.5..0.5f64) {
        let s = build(g, sc).unwrap();
        let cfg = EngineConfig::default();
        let f = |d: f64| {
            let r = propagate_unitary(&LogicalQubit, &s, &ErrorModel::coherent(eps, d), None, &cfg).unwrap();
            gate_fidelity(r.propagator().unwrap(), &g.target()).unwrap()
        };
        prop_assert!((f(delta) - f(0.0)).abs() < 1e-12);
    }

    #[test]
    fn two_logical_gate_immune_to_collective_dephasing(sc in scheme(), eps in -0.1..0.1f64, delta in -0.5..0.5f64, gt in -PI..PI) {
        let a = dfs::run_two_logical_gate(gt, sc, &ErrorModel::coherent(eps, delta)).unwrap().fidelity(gt);
        let b = dfs::run_two_logical_gate(gt, sc, &ErrorModel::coherent(eps, 0.0)).unwrap().fidelity(gt);
        prop_assert!((a - b).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn lindblad_keeps_density_physical(g in gate(), sc in scheme(), g1 in 0.0..0.05f64, g2 in 0.0..0.05f64, a in 0.0..1.0f64, ph in -PI..PI) {
        let psi = [C::new(a.sqrt(), 0.0), C::from_polar((1.0 - a).sqrt(), ph)];
        let r = lindblad_evolve(&TwoLevel, &build(g, sc).unwrap(), &ErrorModel::decoherence(g1, g2), &Operator::outer(&psi, &psi), &EngineConfig::default()).unwrap();
        let rho = r.density().unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(rho.hermitian_deviation() < 1e-12);
        // 2×2 positivity: non-negative diagonal and determinant
        let det = (rho[(0, 0)] * rho[(1, 1)] - rho[(0, 1)] * rho[(1, 0)]).re;
        prop_assert!(rho[(0, 0)].re > -1e-12 && rho[(1, 1)].re > -1e-12 && det > -1e-12);
    }
}
