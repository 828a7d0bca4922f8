//! Decoherence-free-subspace encodings.
//!
//! One logical qubit lives in the single-excitation span of a physical pair,
//! `|0⟩_L = |10⟩`, `|1⟩_L = |01⟩`. Two logical qubits use four physical
//! qubits; the exchange coupling between physical qubits 2 and 3 acts inside
//! the six-dimensional span
//!
//! ```text
//! S′₂ = { |00⟩_L=|1010⟩, |a1⟩=|1100⟩, |01⟩_L=|1001⟩, |10⟩_L=|0110⟩, |11⟩_L=|0101⟩, |a2⟩=|0011⟩ }
//! ```
//!
//! where `|a1⟩`, `|a2⟩` are auxiliary states. Physical basis indices put
//! qubit 1 in the most significant bit.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::engine::{
    drive_block, gate_fidelity_on, lindblad_evolve, propagate_unitary, qubit_collapse_operators, DriveModel,
    EngineConfig, ErrorModel, EvolutionResult,
};
use crate::error::Result;
use crate::linalg::Operator;
use crate::schedule::{build, GateParams, PulseSegment, Scheme, OMEGA_M};

/// Positions of `|00⟩_L, |01⟩_L, |10⟩_L, |11⟩_L` inside the S′₂ ordering.
pub const LOGICAL_INDICES: [usize; 4] = [0, 2, 3, 4];
/// Positions of `|a1⟩_L`, `|a2⟩_L` inside the S′₂ ordering.
pub const AUX_INDICES: [usize; 2] = [1, 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalEncoding {
    /// One logical qubit on two physical qubits.
    SingleQubit,
    /// Two logical qubits on four physical qubits, S′₂ ordering.
    TwoQubit,
}

impl LogicalEncoding {
    pub fn physical_dim(self) -> usize {
        match self {
            LogicalEncoding::SingleQubit => 4,
            LogicalEncoding::TwoQubit => 16,
        }
    }

    pub fn physical_qubits(self) -> usize {
        self.physical_dim().trailing_zeros() as usize
    }

    /// Physical computational-basis labels of the encoded basis, in order.
    pub fn logical_basis(self) -> &'static [&'static str] {
        match self {
            LogicalEncoding::SingleQubit => &["10", "01"],
            LogicalEncoding::TwoQubit => &["1010", "1100", "1001", "0110", "0101", "0011"],
        }
    }

    pub fn basis_indices(self) -> Vec<usize> {
        self.logical_basis()
            .iter()
            .map(|label| usize::from_str_radix(label, 2).expect("binary label"))
            .collect()
    }

    /// Restriction of a physical operator to the encoded span.
    pub fn restrict(self, physical: &Operator) -> Operator {
        physical.restrict(&self.basis_indices())
    }
}

fn qubit_op(n_qubits: usize, which: usize, op: &Operator) -> Operator {
    let id = Operator::identity(2);
    (0..n_qubits).fold(Operator::identity(1), |acc, q| {
        acc.kron(if q == which { op } else { &id })
    })
}

fn raise() -> Operator {
    Operator::unit(2, 1, 0)
}

fn lower() -> Operator {
    Operator::unit(2, 0, 1)
}

fn excited() -> Operator {
    Operator::unit(2, 1, 1)
}

fn ground() -> Operator {
    Operator::unit(2, 0, 0)
}

/// `H_L = ½[[Δ, J e^{−iφ}], [J e^{iφ}, −Δ]]` on `(|0⟩_L, |1⟩_L)`.
pub fn build_logical_single(j: f64, varphi: f64, delta: f64) -> Operator {
    drive_block(j, varphi, delta)
}

/// Physical two-qubit exchange Hamiltonian
/// `Δ S′_z + (J/2)(e^{−iφ} S₁⁺S₂⁻ + H.c.)` with `S′_z = (n₁ − n₂)/2`.
pub fn build_physical_pair(j: f64, varphi: f64, delta: f64) -> Operator {
    let n1 = qubit_op(2, 0, &excited());
    let n2 = qubit_op(2, 1, &excited());
    let sz = (&n1 - &n2).scale_real(0.5 * delta);
    let hop = qubit_op(2, 0, &raise())
        .matmul(&qubit_op(2, 1, &lower()))
        .scale(C64::from_polar(0.5 * j, -varphi));
    &(&sz + &hop) + &hop.adjoint()
}

/// The S′₂ block form of the two-logical-qubit coupling:
/// `½[[−Δ̃, g e^{iφ̃}], [g e^{−iφ̃}, Δ̃]]` on `(|00⟩_L, |a1⟩)` and on
/// `(|11⟩_L, |a2⟩)`, zero on `|01⟩_L`, `|10⟩_L`.
pub fn build_two_logical_6dim(g: f64, varphi_t: f64, delta_t: f64) -> Operator {
    let mut h = Operator::zeros(6);
    let off = C64::from_polar(0.5 * g, varphi_t);
    for (a, b) in [(0, 1), (4, 5)] {
        h[(a, a)] = C64::new(-0.5 * delta_t, 0.0);
        h[(b, b)] = C64::new(0.5 * delta_t, 0.0);
        h[(a, b)] = off;
        h[(b, a)] = off.conj();
    }
    h
}

/// Physical four-qubit coupling at zero detuning:
/// `(g/2)[e^{−iφ̃}(|1⟩₁⟨1| ⊗ S₂⁺S₃⁻ ⊗ |0⟩₄⟨0| + |0⟩₁⟨0| ⊗ S₂⁻S₃⁺ ⊗ |1⟩₄⟨1|) + H.c.]`.
pub fn build_physical_four_qubit(g: f64, varphi_t: f64) -> Operator {
    let term = |q1: Operator, q2: Operator, q3: Operator, q4: Operator| q1.kron(&q2).kron(&q3).kron(&q4);
    let a = term(excited(), raise(), lower(), ground());
    let b = term(ground(), lower(), raise(), excited());
    let forward = (&a + &b).scale(C64::from_polar(0.5 * g, -varphi_t));
    &forward + &forward.adjoint()
}

/// Collective dephasing `−δΩ_m Σ_i |1⟩_i⟨1|` on the physical qubits of the
/// encoding. Every encoded state holds a fixed number of excitations, so the
/// restriction to the code space is proportional to the identity.
pub fn collective_dephasing_term(delta: f64, encoding: LogicalEncoding) -> Operator {
    let n = encoding.physical_qubits();
    let excited = excited();
    let total = (0..n).fold(Operator::zeros(encoding.physical_dim()), |acc, q| {
        &acc + &qubit_op(n, q, &excited)
    });
    total.scale_real(-delta * OMEGA_M)
}

/// A single logical qubit driven through the exchange coupling, with the
/// collective dephasing term of the encoding.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogicalQubit;

impl DriveModel for LogicalQubit {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, seg: &PulseSegment, delta: f64) -> Operator {
        let h = build_logical_single(seg.rabi, seg.phase, seg.detuning);
        if delta == 0.0 {
            return h;
        }
        &h + &LogicalEncoding::SingleQubit.restrict(&collective_dephasing_term(delta, LogicalEncoding::SingleQubit))
    }

    fn collapse_operators(&self, gamma1: f64, gamma2: f64) -> Vec<Operator> {
        qubit_collapse_operators(gamma1, gamma2)
    }
}

/// Where the decay and dephasing channels act in the two-logical-qubit space.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoQubitNoise {
    /// `σ1`, `σ2` of each logical qubit, embedded on the four logical states
    /// and zero on the auxiliary states.
    #[default]
    LogicalQubits,
    /// Per-block lowering `|00⟩_L⟨a1|`, `|11⟩_L⟨a2|` and block dephasing.
    PerBlock,
}

fn logical_embed(op: &Operator, qubit: usize) -> Operator {
    // LOGICAL_INDICES[2a + b] is |ab⟩_L
    let mut out = Operator::zeros(6);
    for a in 0..2 {
        for b in 0..2 {
            for other in 0..2 {
                let (row, col) = if qubit == 0 {
                    (2 * a + other, 2 * b + other)
                } else {
                    (2 * other + a, 2 * other + b)
                };
                out[(LOGICAL_INDICES[row], LOGICAL_INDICES[col])] += op[(a, b)];
            }
        }
    }
    out
}

/// Two logical qubits in S′₂. A pulse segment drives both blocks; the block
/// qubit is read in the order `(|a1⟩, |00⟩_L)` so single-qubit schedules
/// apply unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoLogicalQubits {
    pub noise: TwoQubitNoise,
}

impl DriveModel for TwoLogicalQubits {
    fn dim(&self) -> usize {
        6
    }

    fn hamiltonian(&self, seg: &PulseSegment, delta: f64) -> Operator {
        let h = build_two_logical_6dim(seg.rabi, seg.phase, seg.detuning);
        if delta == 0.0 {
            return h;
        }
        // every S′₂ state carries two excitations
        let shift = -2.0 * delta * OMEGA_M;
        &h + &Operator::identity(6).scale_real(shift)
    }

    fn collapse_operators(&self, gamma1: f64, gamma2: f64) -> Vec<Operator> {
        let mut out = Vec::new();
        match self.noise {
            TwoQubitNoise::LogicalQubits => {
                for qubit in 0..2 {
                    for op in qubit_collapse_operators(gamma1, gamma2) {
                        out.push(logical_embed(&op, qubit));
                    }
                }
            }
            TwoQubitNoise::PerBlock => {
                for (logical, aux) in [(0, 1), (4, 5)] {
                    if gamma1 > 0.0 {
                        out.push(Operator::unit(6, logical, aux).scale_real(gamma1.sqrt()));
                    }
                    if gamma2 > 0.0 {
                        let z = &Operator::unit(6, logical, logical) - &Operator::unit(6, aux, aux);
                        out.push(z.scale_real(gamma2.sqrt()));
                    }
                }
            }
        }
        out
    }
}

/// `U₂(γ̃) = diag(e^{−iγ̃}, 1, 1, e^{−iγ̃})` on the logical basis.
pub fn two_logical_target(gamma_t: f64) -> Operator {
    let p = C64::from_polar(1.0, -gamma_t);
    let one = C64::new(1.0, 0.0);
    Operator::diagonal(&[p, one, one, p])
}

/// `U₂(γ̃)` embedded in S′₂, identity on the auxiliary states.
pub fn two_logical_target_6dim(gamma_t: f64) -> Operator {
    let p = C64::from_polar(1.0, -gamma_t);
    let one = C64::new(1.0, 0.0);
    Operator::diagonal(&[p, one, one, one, p, one])
}

/// Block phase-gate parameters: `θ = 0`, `φ = 0`, geometric phase `γ̃`, so the
/// block gate `e^{iγ̃σz}` on `(|a1⟩, |00⟩_L)` gives `|00⟩_L → e^{−iγ̃}|00⟩_L`.
pub fn block_gate(gamma_t: f64) -> Result<GateParams> {
    GateParams::new(0.0, 0.0, gamma_t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitGate {
    /// Full S′₂ propagator.
    pub full: Operator,
    /// Sub-matrix on `|00⟩_L, |01⟩_L, |10⟩_L, |11⟩_L`.
    pub logical: Operator,
    /// Largest population left in the auxiliary states for a logical input.
    pub leakage: f64,
}

impl TwoQubitGate {
    pub fn fidelity(&self, gamma_t: f64) -> f64 {
        gate_fidelity_on(&self.full, &two_logical_target_6dim(gamma_t), &LOGICAL_INDICES).expect("6-dim")
    }
}

/// Runs the two-logical-qubit phase gate `U₂(γ̃)` with `scheme` under the
/// coherent errors of `error`.
pub fn run_two_logical_gate(gamma_t: f64, scheme: Scheme, error: &ErrorModel) -> Result<TwoQubitGate> {
    let schedule = build(block_gate(gamma_t)?, scheme)?;
    let model = TwoLogicalQubits::default();
    let coherent = ErrorModel {
        gamma1: 0.0,
        gamma2: 0.0,
        ..*error
    };
    let r = propagate_unitary(&model, &schedule, &coherent, None, &EngineConfig::default())?;
    let full = r.propagator().expect("unitary path").clone();
    let logical = full.restrict(&LOGICAL_INDICES);
    let leakage = LOGICAL_INDICES
        .iter()
        .map(|&j| AUX_INDICES.iter().map(|&a| full[(a, j)].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(TwoQubitGate { full, logical, leakage })
}

/// `(|00⟩_L + |01⟩_L + |10⟩_L + |11⟩_L)/2` in S′₂.
pub fn uniform_logical_state() -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 6];
    for i in LOGICAL_INDICES {
        v[i] = C64::new(0.5, 0.0);
    }
    v
}

/// Master-equation run of `U₂(γ̃)` from the uniform logical superposition.
pub fn two_logical_trajectory(
    gamma_t: f64,
    scheme: Scheme,
    error: &ErrorModel,
    noise: TwoQubitNoise,
    config: &EngineConfig,
) -> Result<EvolutionResult> {
    let schedule = build(block_gate(gamma_t)?, scheme)?;
    let psi = uniform_logical_state();
    lindblad_evolve(
        &TwoLogicalQubits { noise },
        &schedule,
        error,
        &Operator::outer(&psi, &psi),
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{gate_fidelity, TwoLevel};
    use crate::linalg::pauli;
    use crate::schedule::build_dyn_corrected;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn logical_single_examples() {
        assert!(build_logical_single(1.0, 0.0, 0.0).max_diff(&pauli::x().scale_real(0.5)) < 1e-15);
        assert!(build_logical_single(0.0, 1.234, 1.0).max_diff(&pauli::z().scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn physical_pair_restricts_to_logical_form() {
        let (j, phi, d) = (0.7, -1.1, 0.4);
        let h = build_physical_pair(j, phi, d);
        let r = LogicalEncoding::SingleQubit.restrict(&h);
        assert!(r.max_diff(&build_logical_single(j, phi, d)) < 1e-15);
    }

    #[test]
    fn dyn_corrected_h_through_logical_qubit() {
        let s = build_dyn_corrected(GateParams::h());
        let cfg = EngineConfig::default();
        let coded = propagate_unitary(&LogicalQubit, &s, &ErrorModel::default(), None, &cfg).unwrap();
        let bare = propagate_unitary(&TwoLevel, &s, &ErrorModel::default(), None, &cfg).unwrap();
        let coded = coded.propagator().unwrap();
        assert_eq!(coded, bare.propagator().unwrap());
        assert!(gate_fidelity(coded, &GateParams::h().target()).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn six_dim_read_off() {
        let h = build_two_logical_6dim(1.0, 0.0, 0.0);
        assert_eq!(h[(0, 1)], C64::new(0.5, 0.0));
        assert_eq!(h[(1, 0)], C64::new(0.5, 0.0));
        assert_eq!(h[(4, 5)], C64::new(0.5, 0.0));
        assert_eq!(h[(5, 4)], C64::new(0.5, 0.0));
        for i in 0..6 {
            assert_eq!(h[(2, i)], C64::new(0.0, 0.0));
            assert_eq!(h[(i, 3)], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn six_dim_block_mirrors_drive_layout() {
        let (g, phi, d) = (0.8, 0.9, -0.3);
        let h = build_two_logical_6dim(g, phi, d);
        // reading the block as (|a1⟩, |00⟩_L) gives the single-qubit layout
        assert!(h.restrict(&[1, 0]).max_diff(&drive_block(g, phi, d)) < 1e-15);
        assert!(h.restrict(&[5, 4]).max_diff(&drive_block(g, phi, d)) < 1e-15);
    }

    #[test]
    fn four_qubit_on_1010() {
        let (g, phi) = (1.0, FRAC_PI_3);
        let h = build_physical_four_qubit(g, phi);
        let mut v = vec![C64::new(0.0, 0.0); 16];
        v[0b1010] = C64::new(1.0, 0.0);
        let out = h.apply(&v);
        for (i, z) in out.iter().enumerate() {
            if i == 0b1100 {
                assert!((z - C64::from_polar(0.5 * g, -phi)).norm() < 1e-15);
            } else {
                assert_eq!(*z, C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn four_qubit_annihilates_outside() {
        let h = build_physical_four_qubit(1.3, 0.2);
        for idx in [0b0000, 0b1111, 0b1000, 0b0111] {
            for i in 0..16 {
                assert_eq!(h[(i, idx)], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn collective_term_on_single_qubit_code() {
        assert_eq!(
            collective_dephasing_term(0.0, LogicalEncoding::SingleQubit).max_abs(),
            0.0
        );
        let r = LogicalEncoding::SingleQubit.restrict(&collective_dephasing_term(0.1, LogicalEncoding::SingleQubit));
        assert!(r.max_diff(&Operator::identity(2).scale_real(-0.1)) < 1e-15);
        let r2 = LogicalEncoding::TwoQubit.restrict(&collective_dephasing_term(0.1, LogicalEncoding::TwoQubit));
        assert!(r2.max_diff(&Operator::identity(6).scale_real(-0.2)) < 1e-15);
    }

    #[test]
    fn two_logical_gate_exact() {
        let g = run_two_logical_gate(FRAC_PI_2, Scheme::DynCorrected, &ErrorModel::default()).unwrap();
        let target = two_logical_target(FRAC_PI_2);
        assert!(g.logical.max_diff(&target) < 1e-10, "{:?}", g.logical);
        assert!(g.leakage < 1e-20);

        let id = run_two_logical_gate(0.0, Scheme::DynCorrected, &ErrorModel::default()).unwrap();
        assert!(id.logical.max_diff(&Operator::identity(4)) < 1e-10);
    }

    #[test]
    fn two_logical_leakage_reported_under_error() {
        let g = run_two_logical_gate(FRAC_PI_2, Scheme::SingleLoop, &ErrorModel::coherent(0.1, 0.0)).unwrap();
        assert!(g.leakage > 1e-3);
        assert!(g.fidelity(FRAC_PI_2) < 1.0);
    }

    #[test]
    fn logical_embedding_places_operators() {
        let sx = pauli::x();
        let e0 = logical_embed(&sx, 0);
        // flips the first logical qubit: |00⟩ ↔ |10⟩, |01⟩ ↔ |11⟩
        assert_eq!(e0[(3, 0)], C64::new(1.0, 0.0));
        assert_eq!(e0[(4, 2)], C64::new(1.0, 0.0));
        let e1 = logical_embed(&sx, 1);
        assert_eq!(e1[(2, 0)], C64::new(1.0, 0.0));
        assert_eq!(e1[(4, 3)], C64::new(1.0, 0.0));
        for a in AUX_INDICES {
            for i in 0..6 {
                assert_eq!(e0[(a, i)], C64::new(0.0, 0.0));
                assert_eq!(e1[(i, a)], C64::new(0.0, 0.0));
            }
        }
        let _ = PI;
    }
}
