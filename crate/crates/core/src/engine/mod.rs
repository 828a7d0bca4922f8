//! Time evolution of pulse schedules.
//!
//! A schedule is piecewise constant, so the closed-system propagator is an
//! ordered product of per-segment exponentials. The open-system path
//! integrates the Lindblad equation with fixed-step RK4 (see [`lindblad`]).

mod fidelity;
pub mod lindblad;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use fidelity::{channel_gate_fidelity, gate_fidelity, gate_fidelity_on, state_fidelity};
pub use lindblad::{lindblad_channel, lindblad_evolve};

use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian_with, inner, vec_norm, Operator, Tolerances};
use crate::schedule::{apply_error, PulseSegment, Schedule};

/// Coherent error ratios plus decoherence rates, all in units of `Ω_m`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    /// Rabi scaling error: `Ω → (1+ε)Ω`.
    pub epsilon: f64,
    /// Dephasing shift `δ`, entering as `−δΩ_m|1⟩⟨1|`.
    pub delta: f64,
    /// Decay rate `Γ1`.
    pub gamma1: f64,
    /// Dephasing rate `Γ2`.
    pub gamma2: f64,
}

impl ErrorModel {
    pub fn coherent(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            gamma1: 0.0,
            gamma2: 0.0,
        }
    }

    pub fn decoherence(gamma1: f64, gamma2: f64) -> Self {
        Self {
            epsilon: 0.0,
            delta: 0.0,
            gamma1,
            gamma2,
        }
    }

    pub fn with_rates(self, gamma1: f64, gamma2: f64) -> Self {
        Self { gamma1, gamma2, ..self }
    }

    pub fn is_closed(&self) -> bool {
        self.gamma1 == 0.0 && self.gamma2 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1.is_finite() && self.gamma2.is_finite()) || self.gamma1 < 0.0 || self.gamma2 < 0.0 {
            return Err(Error::InvalidErrorModel(format!(
                "decoherence rates must be finite and non-negative (gamma1 = {}, gamma2 = {})",
                self.gamma1, self.gamma2
            )));
        }
        Ok(())
    }
}

/// How a pulse segment becomes a Hamiltonian on some Hilbert space, and
/// which collapse operators the decay/dephasing rates attach to.
pub trait DriveModel: Sync {
    fn dim(&self) -> usize;

    /// Hamiltonian of one executed segment; `delta` is the accumulated
    /// dephasing shift of the schedule.
    fn hamiltonian(&self, segment: &PulseSegment, delta: f64) -> Operator;

    /// Collapse operators with the rates folded in, so the dissipator is
    /// `Σ_c (c ρ c† − ½{c†c, ρ})`.
    fn collapse_operators(&self, gamma1: f64, gamma2: f64) -> Vec<Operator>;
}

/// `½[[Δ, Ω e^{−iφ}], [Ω e^{iφ}, −Δ]]`, the single-qubit drive layout.
pub fn drive_block(rabi: f64, phase: f64, detuning: f64) -> Operator {
    let off = C64::from_polar(0.5 * rabi, phase);
    Operator::from_rows([
        [C64::new(0.5 * detuning, 0.0), off.conj()],
        [off, C64::new(-0.5 * detuning, 0.0)],
    ])
}

/// `σ1 = |0⟩⟨1|` and `σ2 = |1⟩⟨1| − |0⟩⟨0|` scaled by `√Γ1`, `√Γ2`.
pub fn qubit_collapse_operators(gamma1: f64, gamma2: f64) -> Vec<Operator> {
    let mut out = Vec::with_capacity(2);
    if gamma1 > 0.0 {
        out.push(Operator::unit(2, 0, 1).scale_real(gamma1.sqrt()));
    }
    if gamma2 > 0.0 {
        let s2 = Operator::diagonal(&[C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]);
        out.push(s2.scale_real(gamma2.sqrt()));
    }
    out
}

/// A bare two-level system with the dephasing error `−δΩ_m|1⟩⟨1|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoLevel;

impl DriveModel for TwoLevel {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, seg: &PulseSegment, delta: f64) -> Operator {
        let mut h = drive_block(seg.rabi, seg.phase, seg.detuning);
        h[(1, 1)] -= delta * crate::schedule::OMEGA_M;
        h
    }

    fn collapse_operators(&self, gamma1: f64, gamma2: f64) -> Vec<Operator> {
        qubit_collapse_operators(gamma1, gamma2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Largest RK4 step, in `1/Ω_m`.
    pub step: f64,
    /// Trajectory samples per schedule, endpoints included.
    pub samples: usize,
    /// Trace drift that aborts a Lindblad run.
    pub trace_abort: f64,
    pub tolerances: Tolerances,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            samples: 200,
            trace_abort: 1e-6,
            tolerances: Tolerances::default(),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidStep(self.step));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub time: f64,
    pub populations: Vec<f64>,
    pub state_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Propagator(Operator),
    Density(Operator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub final_state: FinalState,
    pub trajectory: Vec<TrajectorySample>,
    /// Dynamical phase `γ_d` accumulated in each segment, in radians.
    pub phase_ledger: Vec<f64>,
}

impl EvolutionResult {
    pub fn propagator(&self) -> Option<&Operator> {
        match &self.final_state {
            FinalState::Propagator(u) => Some(u),
            FinalState::Density(_) => None,
        }
    }

    pub fn density(&self) -> Option<&Operator> {
        match &self.final_state {
            FinalState::Density(r) => Some(r),
            FinalState::Propagator(_) => None,
        }
    }

    /// `time,pop_0,...,pop_{d-1},state_fidelity`, one row per sample.
    pub fn trajectory_csv(&self) -> String {
        let dim = self.trajectory.first().map_or(0, |s| s.populations.len());
        let mut out = String::from("time");
        for i in 0..dim {
            out.push_str(&format!(",pop_{i}"));
        }
        out.push_str(",state_fidelity\n");
        for s in &self.trajectory {
            out.push_str(&s.time.to_string());
            for p in &s.populations {
                out.push(',');
                out.push_str(&p.to_string());
            }
            out.push(',');
            out.push_str(&s.state_fidelity.to_string());
            out.push('\n');
        }
        out
    }
}

/// A stretch of constant drive between two consecutive breakpoints.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Interval {
    pub segment: usize,
    pub dt: f64,
    /// Index of the trajectory sample taken at the end of this interval.
    pub sample: Option<usize>,
}

/// Evenly spaced sample times from 0 to the schedule's total duration.
pub(crate) fn sample_times(schedule: &Schedule, samples: usize) -> Vec<f64> {
    let total = schedule.total_duration();
    if samples < 2 || total == 0.0 {
        return vec![0.0];
    }
    let mut times: Vec<f64> = (0..samples).map(|k| total * k as f64 / (samples - 1) as f64).collect();
    times[samples - 1] = total;
    times
}

/// Splits the schedule at segment boundaries and at sample times. Sample 0
/// (t = 0) is not attached to any interval.
pub(crate) fn intervals(schedule: &Schedule, times: &[f64]) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut next = 1;
    let mut start = 0.0;
    let n_seg = schedule.segments.len();
    for (k, seg) in schedule.segments.iter().enumerate() {
        let end = start + seg.duration;
        let mut cur = start;
        while next < times.len() && (times[next] <= end || (k + 1 == n_seg && next + 1 == times.len())) {
            let t = times[next].min(end).max(cur);
            out.push(Interval {
                segment: k,
                dt: t - cur,
                sample: Some(next),
            });
            cur = t;
            next += 1;
        }
        if end > cur {
            out.push(Interval {
                segment: k,
                dt: end - cur,
                sample: None,
            });
        }
        start = end;
    }
    out
}

fn populations(state: &[C64]) -> Vec<f64> {
    state.iter().map(|z| z.norm_sqr()).collect()
}

fn check_state(psi: &[C64], dim: usize, tol: &Tolerances) -> Result<()> {
    if psi.len() != dim {
        return Err(Error::Dimension(format!(
            "state has {} components, model has dimension {dim}",
            psi.len()
        )));
    }
    let norm = vec_norm(psi);
    if (norm - 1.0).abs() > tol.state_norm {
        return Err(Error::StateNotNormalized { norm });
    }
    Ok(())
}

/// Ordered product of the segment propagators of an already executed
/// schedule.
pub fn schedule_propagator<M: DriveModel + ?Sized>(model: &M, executed: &Schedule) -> Result<Operator> {
    let tol = Tolerances::default();
    let mut u = Operator::identity(model.dim());
    for seg in &executed.segments {
        if seg.duration == 0.0 {
            continue;
        }
        let h = model.hamiltonian(seg, executed.error.delta);
        u = expm_hermitian_with(&h, seg.duration, &tol)?.matmul(&u);
    }
    Ok(u)
}

/// Closed-system evolution of `schedule` under the coherent part of `error`.
///
/// With an `initial` state, the result also carries a sampled trajectory
/// (state fidelity against the error-free evolution of the same state) and
/// the dynamical-phase ledger.
pub fn propagate_unitary<M: DriveModel + ?Sized>(
    model: &M,
    schedule: &Schedule,
    error: &ErrorModel,
    initial: Option<&[C64]>,
    config: &EngineConfig,
) -> Result<EvolutionResult> {
    error.validate()?;
    let executed = apply_error(schedule, error)?;
    let final_u = schedule_propagator(model, &executed)?;
    let Some(psi0) = initial else {
        return Ok(EvolutionResult {
            final_state: FinalState::Propagator(final_u),
            trajectory: Vec::new(),
            phase_ledger: Vec::new(),
        });
    };
    check_state(psi0, model.dim(), &config.tolerances)?;

    let times = sample_times(&executed, config.samples);
    let ivs = intervals(&executed, &times);
    let mut psi = psi0.to_vec();
    let mut ideal = psi0.to_vec();
    let mut trajectory = Vec::with_capacity(times.len());
    trajectory.push(TrajectorySample {
        time: 0.0,
        populations: populations(&psi),
        state_fidelity: inner(&ideal, &psi).norm_sqr(),
    });
    for iv in ivs {
        let seg = &executed.segments[iv.segment];
        let h = model.hamiltonian(seg, executed.error.delta);
        psi = expm_hermitian_with(&h, iv.dt, &config.tolerances)?.apply(&psi);
        let h0 = model.hamiltonian(&schedule.segments[iv.segment], schedule.error.delta);
        ideal = expm_hermitian_with(&h0, iv.dt, &config.tolerances)?.apply(&ideal);
        if let Some(k) = iv.sample {
            trajectory.push(TrajectorySample {
                time: times[k],
                populations: populations(&psi),
                state_fidelity: inner(&ideal, &psi).norm_sqr(),
            });
        }
    }
    let phase_ledger = ledger_of_executed(model, &executed, psi0, &config.tolerances)?;
    Ok(EvolutionResult {
        final_state: FinalState::Propagator(final_u),
        trajectory,
        phase_ledger,
    })
}

fn ledger_of_executed<M: DriveModel + ?Sized>(
    model: &M,
    executed: &Schedule,
    psi0: &[C64],
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let mut psi = psi0.to_vec();
    let mut out = Vec::with_capacity(executed.segments.len());
    for seg in &executed.segments {
        let h = model.hamiltonian(seg, executed.error.delta);
        // ⟨H⟩ is conserved while H is constant
        out.push(-h.expectation(&psi, &psi).re * seg.duration);
        if seg.duration > 0.0 {
            psi = expm_hermitian_with(&h, seg.duration, tol)?.apply(&psi);
        }
    }
    Ok(out)
}

/// Dynamical phase `−∫⟨ψ|H|ψ⟩dt` accumulated in each segment of the
/// error-free two-level evolution starting from `initial`.
pub fn dynamical_phase_ledger(schedule: &Schedule, initial: &[C64]) -> Result<Vec<f64>> {
    dynamical_phase_ledger_with(&TwoLevel, schedule, initial)
}

pub fn dynamical_phase_ledger_with<M: DriveModel + ?Sized>(
    model: &M,
    schedule: &Schedule,
    initial: &[C64],
) -> Result<Vec<f64>> {
    let tol = Tolerances::default();
    check_state(initial, model.dim(), &tol)?;
    ledger_of_executed(model, schedule, initial, &tol)
}
