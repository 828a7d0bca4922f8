//! Piecewise-constant pulse schedules for the three geometric schemes.
//!
//! All quantities are in units of the peak Rabi frequency `Ω_m`, which is
//! fixed to 1: durations are in `1/Ω_m`, amplitudes and detunings in `Ω_m`.
//! Every segment drives the two-level Hamiltonian
//!
//! ```text
//! H = ½ [[ Δ, Ω e^{−iφ} ], [ Ω e^{iφ}, −Δ ]]
//! ```

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::engine::ErrorModel;
use crate::error::{Error, Result};
use crate::linalg::{su2_rotation, Operator};

/// Peak Rabi frequency; the unit of every amplitude and rate.
pub const OMEGA_M: f64 = 1.0;

/// Largest `|ε|` accepted by [`apply_error`].
pub const MAX_EPSILON: f64 = 0.5;

/// Number of loops used when a composite schedule is requested without one.
pub const DEFAULT_LOOPS: u32 = 2;

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x - TAU * ((x - PI) / TAU).ceil();
    // ceil can land one period off at the boundaries through rounding
    if r <= -PI {
        r + TAU
    } else if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Target gate `e^{iγ n·σ}` with `n = (sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl GateParams {
    /// Validates `θ ∈ [0, π]` and stores `φ`, `γ` reduced to `(−π, π]`.
    pub fn new(theta: f64, phi: f64, gamma: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidGate("parameters must be finite".into()));
        }
        const SLACK: f64 = 1e-12;
        if !(-SLACK..=PI + SLACK).contains(&theta) {
            return Err(Error::InvalidGate(format!("theta = {theta} outside [0, π]")));
        }
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi: wrap_angle(phi),
            gamma: wrap_angle(gamma),
        })
    }

    pub fn s() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
            gamma: -PI / 4.0,
        }
    }

    pub fn t() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
            gamma: -PI / 8.0,
        }
    }

    pub fn h() -> Self {
        Self {
            theta: PI / 4.0,
            phi: 0.0,
            gamma: -FRAC_PI_2,
        }
    }

    pub fn axis(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `e^{iγ n·σ}`.
    pub fn target(&self) -> Operator {
        su2_rotation(self.axis(), -2.0 * self.gamma).expect("axis is unit by construction")
    }

    /// `|ψ+⟩ = cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩`, the cyclic state of the loop.
    pub fn cyclic_state(&self) -> [num_complex::Complex64; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        [
            num_complex::Complex64::new(c, 0.0),
            num_complex::Complex64::from_polar(s, self.phi),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    pub duration: f64,
    pub rabi: f64,
    pub phase: f64,
    pub detuning: f64,
}

impl PulseSegment {
    fn resonant(area: f64, phase: f64) -> Self {
        Self {
            duration: area / OMEGA_M,
            rabi: OMEGA_M,
            phase: wrap_angle(phase),
            detuning: 0.0,
        }
    }

    /// `duration · √(Ω² + Δ²)`
    pub fn generalized_area(&self) -> f64 {
        self.duration * self.rabi.hypot(self.detuning)
    }

    /// `duration · Ω`
    pub fn plain_area(&self) -> f64 {
        self.duration * self.rabi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    SingleLoop,
    Composite(u32),
    DynCorrected,
}

impl Scheme {
    pub const NAMES: &'static str = "singleloop, composite, composite(N), dyncorrected";
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::SingleLoop => f.write_str("singleloop"),
            Scheme::Composite(n) => write!(f, "composite({n})"),
            Scheme::DynCorrected => f.write_str("dyncorrected"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "singleloop" | "single" => return Ok(Scheme::SingleLoop),
            "composite" => return Ok(Scheme::Composite(DEFAULT_LOOPS)),
            "dyncorrected" | "dc" => return Ok(Scheme::DynCorrected),
            _ => {}
        }
        if let Some(inner) = lower.strip_prefix("composite(").and_then(|r| r.strip_suffix(')')) {
            let n: u32 = inner
                .parse()
                .map_err(|_| Error::Parse(format!("bad loop count in scheme '{s}'")))?;
            return Ok(Scheme::Composite(n));
        }
        Err(Error::Parse(format!(
            "unknown scheme '{s}'; expected one of {}",
            Scheme::NAMES
        )))
    }
}

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Coherent errors already folded into a schedule's segments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CoherentError {
    pub epsilon: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub scheme: Scheme,
    pub gate: GateParams,
    pub segments: Vec<PulseSegment>,
    #[serde(default)]
    pub error: CoherentError,
}

impl Schedule {
    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// `∫ Ω dt` over the whole schedule.
    pub fn plain_area(&self) -> f64 {
        self.segments.iter().map(PulseSegment::plain_area).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Builds the schedule for `scheme`.
pub fn build(gate: GateParams, scheme: Scheme) -> Result<Schedule> {
    match scheme {
        Scheme::SingleLoop => Ok(build_single_loop(gate)),
        Scheme::Composite(n) => build_composite(gate, n),
        Scheme::DynCorrected => Ok(build_dyn_corrected(gate)),
    }
}

fn single_loop_segments(gate: &GateParams) -> [PulseSegment; 3] {
    let GateParams { theta, phi, gamma } = *gate;
    [
        PulseSegment::resonant(theta, phi - FRAC_PI_2),
        PulseSegment::resonant(PI, phi + gamma + FRAC_PI_2),
        PulseSegment::resonant(PI - theta, phi - FRAC_PI_2),
    ]
}

/// Orange-slice loop: along longitude `φ` to the north pole, along `φ+γ` to
/// the south pole, and back along `φ`.
pub fn build_single_loop(gate: GateParams) -> Schedule {
    Schedule {
        scheme: Scheme::SingleLoop,
        gate,
        segments: single_loop_segments(&gate).to_vec(),
        error: CoherentError::default(),
    }
}

/// `N` single loops, each carrying geometric phase `γ/N`.
pub fn build_composite(gate: GateParams, loops: u32) -> Result<Schedule> {
    if loops < 2 {
        return Err(Error::TooFewLoops(loops));
    }
    let unit = GateParams {
        gamma: gate.gamma / loops as f64,
        ..gate
    };
    let one = single_loop_segments(&unit);
    Ok(Schedule {
        scheme: Scheme::Composite(loops),
        gate,
        segments: (0..loops).flat_map(|_| one).collect(),
        error: CoherentError::default(),
    })
}

/// Detuned segment rotating by `area` about the axis with polar angle
/// `polar` and azimuth `phase`. Zero area yields a zero-duration segment.
fn tilted(area: f64, phase: f64, polar: f64) -> PulseSegment {
    if area <= 0.0 {
        return PulseSegment {
            duration: 0.0,
            rabi: OMEGA_M,
            phase: wrap_angle(phase),
            detuning: 0.0,
        };
    }
    let (s, c) = polar.sin_cos();
    PulseSegment {
        // area / √(Ω² + Δ²) with Δ = Ω cot(polar)
        duration: area * s / OMEGA_M,
        rabi: OMEGA_M,
        phase: wrap_angle(phase),
        detuning: OMEGA_M * c / s,
    }
}

/// Nine-segment dynamically corrected loop.
///
/// Segments 2, 5 and 8 are inserted rotations about the axes the state sits
/// on at that moment: `θ` about `(θ/2, φ)`, `π` about `(π/2, φ+γ)` (split as
/// π/2 + π + π/2), and `π−θ` about `((π+θ)/2, φ)`.
pub fn build_dyn_corrected(gate: GateParams) -> Schedule {
    let GateParams { theta, phi, gamma } = gate;
    let half_th = 0.5 * theta;
    let half_rest = 0.5 * (PI - theta);

    // segment 8's detuning is cot((θ+π)/2) = −tan(θ/2); build it from that
    // form so θ = 0 gives an exact zero
    let seg8 = if PI - theta <= 0.0 {
        tilted(0.0, phi, 0.0)
    } else {
        let (s, c) = half_th.sin_cos();
        PulseSegment {
            duration: (PI - theta) * c / OMEGA_M,
            rabi: OMEGA_M,
            phase: wrap_angle(phi),
            detuning: -OMEGA_M * s / c,
        }
    };

    let segments = vec![
        PulseSegment::resonant(half_th, phi - FRAC_PI_2),
        tilted(theta, phi, half_th),
        PulseSegment::resonant(half_th, phi - FRAC_PI_2),
        PulseSegment::resonant(FRAC_PI_2, phi + gamma + FRAC_PI_2),
        PulseSegment::resonant(PI, phi + gamma + PI),
        PulseSegment::resonant(FRAC_PI_2, phi + gamma + FRAC_PI_2),
        PulseSegment::resonant(half_rest, phi - FRAC_PI_2),
        seg8,
        PulseSegment::resonant(half_rest, phi - FRAC_PI_2),
    ];
    Schedule {
        scheme: Scheme::DynCorrected,
        gate,
        segments,
        error: CoherentError::default(),
    }
}

/// Folds the coherent part of `error` into the schedule.
///
/// Every Rabi amplitude is scaled by `1+ε`; detunings are left alone. The
/// dephasing shift `δ` is recorded on the schedule and enters the evolution
/// as an additive energy term.
pub fn apply_error(schedule: &Schedule, error: &ErrorModel) -> Result<Schedule> {
    let ErrorModel { epsilon, delta, .. } = *error;
    if !epsilon.is_finite() || epsilon.abs() > MAX_EPSILON {
        return Err(Error::InvalidErrorModel(format!(
            "|epsilon| = {} exceeds {MAX_EPSILON}",
            epsilon.abs()
        )));
    }
    if !delta.is_finite() {
        return Err(Error::InvalidErrorModel("delta must be finite".into()));
    }
    let scale = 1.0 + epsilon;
    let mut out = schedule.clone();
    for seg in &mut out.segments {
        seg.rabi *= scale;
    }
    out.error.epsilon = (1.0 + out.error.epsilon) * scale - 1.0;
    out.error.delta += delta;
    Ok(out)
}
