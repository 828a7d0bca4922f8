//! Sweep and verification harness behind the command-line front end.

mod fit;

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fit::{
    fit_grid, fit_series, reference_criteria, verify_appendix, AppendixReport, CoefficientCheck, Criterion, SeriesFit,
    FIT_DEGREE, FIT_POINTS_PER_SIGN, FIT_RESIDUAL_MAX, FIT_WINDOW, FIT_WINDOW_MIN,
};

use crate::dfs::{self, LogicalQubit, TwoLogicalQubits, TwoQubitNoise, LOGICAL_INDICES};
use crate::engine::{
    channel_gate_fidelity, gate_fidelity, lindblad_channel, lindblad_evolve, propagate_unitary, DriveModel,
    EngineConfig, ErrorModel, EvolutionResult, TwoLevel,
};
use crate::error::{Error, Result};
use crate::linalg::{vec_norm, Operator};
use crate::schedule::{build, GateParams, Scheme};

/// Gates with fixed parameters; `U2` is the two-logical-qubit phase gate
/// `U₂(π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedGate {
    S,
    T,
    H,
    U2,
}

impl NamedGate {
    pub const KNOWN: &'static str = "S, T, H, U2";

    /// Single-qubit parameters; `None` for `U2`.
    pub fn params(self) -> Option<GateParams> {
        match self {
            NamedGate::S => Some(GateParams::s()),
            NamedGate::T => Some(GateParams::t()),
            NamedGate::H => Some(GateParams::h()),
            NamedGate::U2 => None,
        }
    }
}

/// Geometric phase of the two-logical-qubit gate used by `U2`.
pub const U2_GAMMA: f64 = FRAC_PI_2;

impl FromStr for NamedGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S" => Ok(NamedGate::S),
            "T" => Ok(NamedGate::T),
            "H" => Ok(NamedGate::H),
            "U2" => Ok(NamedGate::U2),
            _ => Err(Error::UnknownGate {
                name: s.to_string(),
                known: Self::KNOWN.to_string(),
            }),
        }
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Named(NamedGate),
    Params(GateParams),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    #[default]
    None,
    Dfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisParam {
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "Gamma")]
    Gamma,
}

impl AxisParam {
    pub fn label(self) -> &'static str {
        match self {
            AxisParam::Epsilon => "epsilon",
            AxisParam::Delta => "delta",
            AxisParam::Gamma => "Gamma",
        }
    }

    fn apply(self, error: &mut ErrorModel, value: f64) {
        match self {
            AxisParam::Epsilon => error.epsilon = value,
            AxisParam::Delta => error.delta = value,
            AxisParam::Gamma => {
                error.gamma1 = value;
                error.gamma2 = value;
            }
        }
    }
}

impl FromStr for AxisParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon" => Ok(AxisParam::Epsilon),
            "delta" => Ok(AxisParam::Delta),
            "Gamma" | "gamma" => Ok(AxisParam::Gamma),
            _ => Err(Error::Parse(format!(
                "unknown sweep parameter '{s}'; expected epsilon, delta or Gamma"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Self { name, min, max, count }
    }

    /// Default range for each parameter: `ε ∈ [−0.1, 0.1]`,
    /// `Γ ∈ [0, 5]×10⁻⁴`, `δ ∈ [−0.1, 0.1]`.
    pub fn default_for(name: AxisParam, count: usize) -> Self {
        match name {
            AxisParam::Epsilon | AxisParam::Delta => Self::new(name, -0.1, 0.1, count),
            AxisParam::Gamma => Self::new(name, 0.0, 5e-4, count),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidSweep(format!(
                "axis {} needs at least 2 points",
                self.name.label()
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidSweep(format!(
                "axis {} range must be finite",
                self.name.label()
            )));
        }
        if self.name == AxisParam::Gamma && self.min < 0.0 {
            return Err(Error::InvalidSweep("Gamma axis must be non-negative".into()));
        }
        Ok(())
    }
}

/// Parses `a:b:n`.
pub fn parse_grid(s: &str, name: AxisParam) -> Result<Axis> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parse(format!("grid '{s}' is not of the form min:max:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min = parts[0].trim().parse().map_err(|_| bad())?;
    let max = parts[1].trim().parse().map_err(|_| bad())?;
    let count = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(Axis::new(name, min, max, count))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub gamma1: f64,
    pub gamma2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub scheme: Scheme,
    pub gate: GateSpec,
    pub axis1: Axis,
    #[serde(default)]
    pub axis2: Option<Axis>,
    #[serde(default)]
    pub rates: Rates,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub encoding: Encoding,
    /// Fixed `ε` for points that do not sweep it.
    #[serde(default)]
    pub epsilon: f64,
    /// Fixed `δ` for points that do not sweep it.
    #[serde(default)]
    pub delta: f64,
}

impl SweepSpec {
    pub fn new(gate: GateSpec, scheme: Scheme, axis1: Axis) -> Self {
        Self {
            scheme,
            gate,
            axis1,
            axis2: None,
            rates: Rates::default(),
            output: None,
            encoding: Encoding::None,
            epsilon: 0.0,
            delta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        if let Some(a2) = &self.axis2 {
            a2.validate()?;
            if a2.name == self.axis1.name {
                return Err(Error::InvalidSweep(format!("both axes sweep {}", a2.name.label())));
            }
        }
        if let Scheme::Composite(n) = self.scheme {
            if n < 2 {
                return Err(Error::TooFewLoops(n));
            }
        }
        Ok(())
    }

    fn base_error(&self) -> ErrorModel {
        ErrorModel {
            epsilon: self.epsilon,
            delta: self.delta,
            gamma1: self.rates.gamma1,
            gamma2: self.rates.gamma2,
        }
    }
}

/// Builds a state from `zero`, `one`, `plus`, or `re,im;re,im[;...]`
/// amplitude pairs (normalized on parse).
pub fn parse_state(s: &str) -> Result<Vec<C64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match s.trim() {
        "zero" => return Ok(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
        "one" => return Ok(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
        "plus" => return Ok(vec![C64::new(h, 0.0), C64::new(h, 0.0)]),
        _ => {}
    }
    let bad = || Error::Parse(format!("bad state '{s}': expected zero, one, plus or re,im;re,im"));
    let amps = s
        .split(';')
        .map(|pair| {
            let mut it = pair.split(',').map(|x| x.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(re)), Some(Ok(im)), None) if re.is_finite() && im.is_finite() => Ok(C64::new(re, im)),
                _ => Err(bad()),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let norm = vec_norm(&amps);
    if amps.len() < 2 || norm == 0.0 {
        return Err(bad());
    }
    Ok(amps.into_iter().map(|z| z / norm).collect())
}

fn single_qubit_model(encoding: Encoding) -> &'static dyn DriveModel {
    match encoding {
        Encoding::None => &TwoLevel,
        Encoding::Dfs => &LogicalQubit,
    }
}

/// Gate fidelity of one configuration. Closed systems use the trace
/// fidelity of the propagator; with decoherence the channel is built and
/// compared through its entanglement fidelity.
pub fn point_fidelity(
    gate: GateSpec,
    scheme: Scheme,
    encoding: Encoding,
    error: &ErrorModel,
    config: &EngineConfig,
) -> Result<f64> {
    let params = match gate {
        GateSpec::Named(NamedGate::U2) => return two_qubit_fidelity(scheme, error, config),
        GateSpec::Named(g) => g.params().expect("single-qubit gate"),
        GateSpec::Params(p) => p,
    };
    let schedule = build(params, scheme)?;
    let model = single_qubit_model(encoding);
    let target = params.target();
    if error.is_closed() {
        let r = propagate_unitary(model, &schedule, error, None, config)?;
        gate_fidelity(r.propagator().expect("unitary path"), &target)
    } else {
        let s = lindblad_channel(model, &schedule, error, config)?;
        channel_gate_fidelity(&s, &target, &[0, 1])
    }
}

fn two_qubit_fidelity(scheme: Scheme, error: &ErrorModel, config: &EngineConfig) -> Result<f64> {
    if error.is_closed() {
        return Ok(dfs::run_two_logical_gate(U2_GAMMA, scheme, error)?.fidelity(U2_GAMMA));
    }
    let schedule = build(dfs::block_gate(U2_GAMMA)?, scheme)?;
    let s = lindblad_channel(&TwoLogicalQubits::default(), &schedule, error, config)?;
    channel_gate_fidelity(&s, &dfs::two_logical_target_6dim(U2_GAMMA), &LOGICAL_INDICES)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Evaluates every grid point (in parallel) and returns rows in grid order,
/// `axis1` outermost.
pub fn run_sweep(spec: &SweepSpec, config: &EngineConfig) -> Result<SweepTable> {
    spec.validate()?;
    let xs = spec.axis1.values();
    let ys = spec.axis2.as_ref().map(Axis::values);
    let points: Vec<(f64, Option<f64>)> = match &ys {
        None => xs.iter().map(|&x| (x, None)).collect(),
        Some(ys) => xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, Some(y)))).collect(),
    };
    let base = spec.base_error();
    let fidelities: Vec<f64> = points
        .par_iter()
        .map(|&(x, y)| {
            let mut e = base;
            spec.axis1.name.apply(&mut e, x);
            if let (Some(a2), Some(y)) = (&spec.axis2, y) {
                a2.name.apply(&mut e, y);
            }
            point_fidelity(spec.gate, spec.scheme, spec.encoding, &e, config)
        })
        .collect::<Result<_>>()?;

    let mut columns = vec![spec.axis1.name.label().to_string()];
    if let Some(a2) = &spec.axis2 {
        columns.push(a2.name.label().to_string());
    }
    columns.push("fidelity".into());
    let rows = points
        .iter()
        .zip(fidelities)
        .map(|(&(x, y), f)| match y {
            Some(y) => vec![x, y, f],
            None => vec![x, f],
        })
        .collect();
    Ok(SweepTable { columns, rows })
}

/// Master-equation trajectory of a single-qubit gate from `initial`.
pub fn run_trajectory(
    gate: GateParams,
    scheme: Scheme,
    encoding: Encoding,
    initial: &[C64],
    error: &ErrorModel,
    config: &EngineConfig,
) -> Result<EvolutionResult> {
    let schedule = build(gate, scheme)?;
    let norm = vec_norm(initial);
    if (norm - 1.0).abs() > config.tolerances.state_norm {
        return Err(Error::StateNotNormalized { norm });
    }
    lindblad_evolve(
        single_qubit_model(encoding),
        &schedule,
        error,
        &Operator::outer(initial, initial),
        config,
    )
}

/// `epsilon,singleloop,composite(N),dyncorrected` rows for `U₂(π/2)`.
pub fn two_qubit_robustness(axis: &Axis, loops: u32) -> Result<SweepTable> {
    axis.validate()?;
    let schemes = [Scheme::SingleLoop, Scheme::Composite(loops), Scheme::DynCorrected];
    let rows = axis
        .values()
        .par_iter()
        .map(|&x| {
            let mut e = ErrorModel::default();
            axis.name.apply(&mut e, x);
            let mut row = vec![x];
            for scheme in schemes {
                row.push(dfs::run_two_logical_gate(U2_GAMMA, scheme, &e)?.fidelity(U2_GAMMA));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![axis.name.label().to_string()];
    columns.extend(schemes.iter().map(Scheme::to_string));
    Ok(SweepTable { columns, rows })
}

/// Default master-equation trajectory of `U₂(π/2)`.
pub fn two_qubit_trajectory(
    scheme: Scheme,
    error: &ErrorModel,
    noise: TwoQubitNoise,
    config: &EngineConfig,
) -> Result<EvolutionResult> {
    dfs::two_logical_trajectory(U2_GAMMA, scheme, error, noise, config)
}
