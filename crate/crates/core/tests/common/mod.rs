//! Independent reference computations shared by the integration tests.
//! Nothing here calls the library's propagators or matrix exponentials.
#![allow(dead_code)]

use std::f64::consts::PI;

use geophase::schedule::{PulseSegment, Schedule};
use num_complex::Complex64 as C;

pub type M2 = [[C; 2]; 2];

/// Segment Hamiltonian written out by hand, including the `−δ|1⟩⟨1|` shift.
pub fn segment_h(seg: &PulseSegment, delta: f64) -> M2 {
    let off = C::from_polar(0.5 * seg.rabi, -seg.phase);
    [
        [C::new(0.5 * seg.detuning, 0.0), off],
        [off.conj(), C::new(-0.5 * seg.detuning - delta, 0.0)],
    ]
}

fn apply(h: &M2, v: [C; 2]) -> [C; 2] {
    [h[0][0] * v[0] + h[0][1] * v[1], h[1][0] * v[0] + h[1][1] * v[1]]
}

fn deriv(h: &M2, v: [C; 2]) -> [C; 2] {
    let hv = apply(h, v);
    let mi = C::new(0.0, -1.0);
    [mi * hv[0], mi * hv[1]]
}

fn axpy(a: [C; 2], s: f64, b: [C; 2]) -> [C; 2] {
    [a[0] + b[0] * s, a[1] + b[1] * s]
}

/// One classic RK4 step of `dψ/dt = −iHψ`.
pub fn rk4_step(h: &M2, v: [C; 2], dt: f64) -> [C; 2] {
    let k1 = deriv(h, v);
    let k2 = deriv(h, axpy(v, 0.5 * dt, k1));
    let k3 = deriv(h, axpy(v, 0.5 * dt, k2));
    let k4 = deriv(h, axpy(v, dt, k3));
    [
        v[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * (dt / 6.0),
        v[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * (dt / 6.0),
    ]
}

/// Evolves `v` through one segment with about `steps_per_unit` steps per
/// unit time.
pub fn rk4_segment(seg: &PulseSegment, delta: f64, v: [C; 2], steps_per_unit: f64) -> [C; 2] {
    let n = (seg.duration * steps_per_unit).ceil().max(1.0) as usize;
    let dt = seg.duration / n as f64;
    let h = segment_h(seg, delta);
    (0..n).fold(v, |v, _| rk4_step(&h, v, dt))
}

/// Propagator of an executed schedule by RK4 on each basis vector.
pub fn rk4_propagator(executed: &Schedule, steps_per_unit: f64) -> M2 {
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let cols = [[one, zero], [zero, one]].map(|mut v| {
        for seg in &executed.segments {
            if seg.duration > 0.0 {
                v = rk4_segment(seg, executed.error.delta, v, steps_per_unit);
            }
        }
        v
    });
    [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]
}

/// Per-segment `−∫⟨ψ|H|ψ⟩dt` by composite Simpson on `2n` panels, with the
/// state carried by fine RK4 between nodes.
pub fn simpson_ledger(schedule: &Schedule, psi0: [C; 2], n: usize) -> Vec<f64> {
    let mut psi = psi0;
    let mut out = Vec::new();
    for seg in &schedule.segments {
        if seg.duration == 0.0 {
            out.push(0.0);
            continue;
        }
        let h = segment_h(seg, schedule.error.delta);
        let panels = 2 * n;
        let dt = seg.duration / panels as f64;
        let energy = |v: [C; 2]| {
            let hv = apply(&h, v);
            (v[0].conj() * hv[0] + v[1].conj() * hv[1]).re
        };
        let mut acc = energy(psi);
        for k in 1..=panels {
            for _ in 0..8 {
                psi = rk4_step(&h, psi, dt / 8.0);
            }
            let w = if k == panels {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * energy(psi);
        }
        out.push(-acc * dt / 3.0);
    }
    out
}

pub fn trace_fidelity(u: &M2, v: &M2) -> f64 {
    let mut t = C::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            t += v[i][j].conj() * u[i][j];
        }
    }
    t.norm() / 2.0
}

/// Target `e^{iγ n·σ} = cos γ I + i sin γ n·σ`, written out directly.
pub fn target(theta: f64, phi: f64, gamma: f64) -> M2 {
    let (nx, ny, nz) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
    let (s, c) = gamma.sin_cos();
    let i = C::new(0.0, 1.0);
    [
        [C::new(c, 0.0) + i * s * nz, i * s * C::new(nx, -ny)],
        [i * s * C::new(nx, ny), C::new(c, 0.0) - i * s * nz],
    ]
}

/// Single-loop fidelity of a `θ = 0` gate under a Rabi error `ε`. The two
/// π pulses become `(1+ε)π` rotations; composing them by hand gives
/// `|cos²(πε/2) + sin²(πε/2) cos γ|`.
pub fn single_loop_theta0_fidelity(epsilon: f64, gamma: f64) -> f64 {
    let a = 0.5 * PI * epsilon;
    (a.cos().powi(2) + a.sin().powi(2) * gamma.cos()).abs()
}

pub fn max_diff(a: &M2, b: &[C]) -> f64 {
    (0..4).map(|k| (a[k / 2][k % 2] - b[k]).norm()).fold(0.0, f64::max)
}
