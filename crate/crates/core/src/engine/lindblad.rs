//! Lindblad master equation
//!
//! ```text
//! ρ̇ = i[ρ, H] + ½ Σ_A Γ_A (2AρA† − A†Aρ − ρA†A)
//! ```
//!
//! integrated with classical fixed-step RK4. The generator is constant over
//! each segment, so one RK4 step is the linear map
//! `I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24` on `vec(ρ)`; it is assembled once
//! per interval and then applied step by step.

use num_complex::Complex64 as C64;

use super::{
    intervals, sample_times, DriveModel, EngineConfig, ErrorModel, EvolutionResult, FinalState, TrajectorySample,
};
use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian_with, Operator};
use crate::schedule::{apply_error, Schedule};

/// Row-major Liouvillian: `vec(AXB) = (A ⊗ Bᵀ) vec(X)`.
pub fn liouvillian(h: &Operator, collapse: &[Operator]) -> Operator {
    let d = h.dim();
    let id = Operator::identity(d);
    let minus_i = C64::new(0.0, -1.0);
    let mut l = (&h.kron(&id) - &id.kron(&h.transpose())).scale(minus_i);
    for c in collapse {
        let cdc = c.adjoint().matmul(c);
        let jump = c.kron(&c.conj());
        let anti = &cdc.kron(&id) + &id.kron(&cdc.transpose());
        l = &(&l + &jump) - &anti.scale_real(0.5);
    }
    l
}

/// One RK4 step of `ẋ = L x` with step `h`, as a matrix.
pub fn rk4_step_map(l: &Operator, h: f64) -> Operator {
    let id = Operator::identity(l.dim());
    let x = l.scale_real(h);
    let mut acc = id.clone();
    for k in (1..=4).rev() {
        acc = &id + &x.matmul(&acc).scale_real(1.0 / k as f64);
    }
    acc
}

fn steps_for(dt: f64, h: f64) -> usize {
    if dt <= 0.0 {
        0
    } else {
        ((dt / h).ceil() as usize).max(1)
    }
}

fn mat_pow(m: &Operator, mut n: usize) -> Operator {
    let mut result = Operator::identity(m.dim());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = base.matmul(&result);
        }
        n >>= 1;
        if n > 0 {
            base = base.matmul(&base);
        }
    }
    result
}

fn vec_trace(v: &[C64], d: usize) -> C64 {
    (0..d).map(|i| v[i * d + i]).sum()
}

fn check_density(rho: &Operator, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::Dimension(format!(
            "density is {}-dim, model is {dim}-dim",
            rho.dim()
        )));
    }
    let herm = rho.hermitian_deviation();
    if herm > 1e-10 {
        return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
    }
    if (0..dim).any(|i| rho[(i, i)].re < -1e-12) {
        return Err(Error::InvalidDensity("negative population".into()));
    }
    Ok(())
}

/// Integrates the master equation from `rho0`.
///
/// Each trajectory sample carries the populations and the overlap
/// `Tr(ρ(t) ρ_ideal(t))`, where `ρ_ideal` evolves under `schedule` without
/// coherent errors or decoherence; for a pure `rho0` this is the state
/// fidelity against the ideal state.
pub fn lindblad_evolve<M: DriveModel + ?Sized>(
    model: &M,
    schedule: &Schedule,
    error: &ErrorModel,
    rho0: &Operator,
    config: &EngineConfig,
) -> Result<EvolutionResult> {
    config.validate()?;
    error.validate()?;
    let d = model.dim();
    check_density(rho0, d)?;
    let executed = apply_error(schedule, error)?;
    let collapse = model.collapse_operators(error.gamma1, error.gamma2);
    let generators: Vec<Operator> = executed
        .segments
        .iter()
        .map(|seg| liouvillian(&model.hamiltonian(seg, executed.error.delta), &collapse))
        .collect();

    let times = sample_times(&executed, config.samples);
    let mut v = rho0.entries().to_vec();
    let mut ideal = rho0.clone();
    let sample = |t: f64, v: &[C64], ideal: &Operator| {
        let rho = Operator::from_entries(d, v.to_vec()).expect("dimension fixed");
        TrajectorySample {
            time: t,
            populations: (0..d).map(|i| v[i * d + i].re).collect(),
            state_fidelity: rho.matmul(ideal).trace().re,
        }
    };
    let mut trajectory = vec![sample(0.0, &v, &ideal)];

    for iv in intervals(&executed, &times) {
        let n = steps_for(iv.dt, config.step);
        if n > 0 {
            let m = rk4_step_map(&generators[iv.segment], iv.dt / n as f64);
            for _ in 0..n {
                v = m.apply(&v);
            }
            let h0 = model.hamiltonian(&schedule.segments[iv.segment], schedule.error.delta);
            let u0 = expm_hermitian_with(&h0, iv.dt, &config.tolerances)?;
            ideal = u0.matmul(&ideal).matmul(&u0.adjoint());
        }
        let drift = (vec_trace(&v, d) - C64::new(1.0, 0.0)).norm();
        if drift.is_nan() || drift > config.trace_abort {
            let time = times.get(iv.sample.unwrap_or(0)).copied().unwrap_or(f64::NAN);
            return Err(Error::TraceDrift {
                drift,
                time,
                segment: iv.segment,
            });
        }
        if let Some(k) = iv.sample {
            trajectory.push(sample(times[k], &v, &ideal));
        }
    }

    Ok(EvolutionResult {
        final_state: FinalState::Density(Operator::from_entries(d, v)?),
        trajectory,
        phase_ledger: Vec::new(),
    })
}

/// The whole schedule as a superoperator on `vec(ρ)`, built from the same
/// RK4 steps as [`lindblad_evolve`] (without sample breakpoints).
pub fn lindblad_channel<M: DriveModel + ?Sized>(
    model: &M,
    schedule: &Schedule,
    error: &ErrorModel,
    config: &EngineConfig,
) -> Result<Operator> {
    config.validate()?;
    error.validate()?;
    let executed = apply_error(schedule, error)?;
    let collapse = model.collapse_operators(error.gamma1, error.gamma2);
    let mut total = Operator::identity(model.dim() * model.dim());
    for seg in &executed.segments {
        let n = steps_for(seg.duration, config.step);
        if n == 0 {
            continue;
        }
        let l = liouvillian(&model.hamiltonian(seg, executed.error.delta), &collapse);
        let m = rk4_step_map(&l, seg.duration / n as f64);
        total = mat_pow(&m, n).matmul(&total);
    }
    Ok(total)
}
