use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geophase::dfs::{self, TwoQubitNoise};
use geophase::engine::{EngineConfig, ErrorModel};
use geophase::harness::{
    self, parse_grid, parse_state, Axis, AxisParam, Encoding, GateSpec, NamedGate, SweepSpec, U2_GAMMA,
};
use geophase::schedule::{apply_error, build, GateParams, Scheme, DEFAULT_LOOPS};
use geophase::{Error, Result};

const EXIT_VALIDATION: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(name = "geophase", version, about = "Nonadiabatic geometric gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pulse schedule of a gate as JSON.
    Schedule {
        #[command(flatten)]
        gate: GateArgs,
        #[command(flatten)]
        errors: ErrorArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Master-equation trajectory as CSV.
    Trajectory {
        #[command(flatten)]
        gate: GateArgs,
        #[command(flatten)]
        errors: ErrorArgs,
        /// zero, one, plus, or amplitude pairs `re,im;re,im`.
        #[arg(long, default_value = "zero", allow_hyphen_values = true)]
        state: String,
        #[arg(long, value_parser = parse_encoding)]
        encoding: Option<Encoding>,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fidelity over one or two swept parameters.
    Sweep(SweepArgs),
    /// Fidelity over an (epsilon, Gamma) grid, 41×41 by default.
    Heatmap(SweepArgs),
    /// Fit fidelity against epsilon and check the low-order coefficients.
    VerifyAppendix {
        #[command(flatten)]
        gate: GateArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-logical-qubit phase gate experiments.
    TwoQubit {
        /// robustness, gate, or trajectory.
        #[arg(long, default_value = "robustness")]
        experiment: String,
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        loops: Option<u32>,
        #[command(flatten)]
        errors: ErrorArgs,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// logical-qubits or per-block.
        #[arg(long, default_value = "logical-qubits")]
        noise: String,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct GateArgs {
    /// S, T, H or U2.
    #[arg(long)]
    gate: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// singleloop, composite, or dyncorrected.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    loops: Option<u32>,
}

#[derive(Args, Clone, Default)]
struct ErrorArgs {
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct EngineArgs {
    /// RK4 step in units of 1/Omega_m.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    gate: GateArgs,
    #[command(flatten)]
    errors: ErrorArgs,
    /// Parameter of the first axis: epsilon, delta or Gamma.
    #[arg(long)]
    param: Option<String>,
    /// First axis range `min:max:count`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    param2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    grid2: Option<String>,
    #[arg(long, value_parser = parse_encoding)]
    encoding: Option<Encoding>,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_encoding(s: &str) -> std::result::Result<Encoding, String> {
    match s {
        "none" => Ok(Encoding::None),
        "dfs" => Ok(Encoding::Dfs),
        _ => Err(format!("unknown encoding '{s}'; expected none or dfs")),
    }
}

impl GateArgs {
    fn scheme(&self) -> Result<Option<Scheme>> {
        let scheme = match &self.scheme {
            Some(s) => Some(s.parse::<Scheme>()?),
            None => None,
        };
        Ok(match (scheme, self.loops) {
            (Some(Scheme::Composite(_)), Some(n)) => Some(Scheme::Composite(n)),
            (None, Some(n)) => Some(Scheme::Composite(n)),
            (s, _) => s,
        })
    }

    fn gate(&self) -> Result<Option<GateSpec>> {
        match (&self.gate, self.theta, self.phi, self.gamma) {
            (Some(_), Some(_), _, _) | (Some(_), _, Some(_), _) | (Some(_), _, _, Some(_)) => Err(Error::InvalidGate(
                "give either --gate or --theta/--phi/--gamma, not both".into(),
            )),
            (Some(name), ..) => Ok(Some(GateSpec::Named(name.parse()?))),
            (None, None, None, None) => Ok(None),
            (None, theta, phi, gamma) => Ok(Some(GateSpec::Params(GateParams::new(
                theta.unwrap_or(0.0),
                phi.unwrap_or(0.0),
                gamma.unwrap_or(0.0),
            )?))),
        }
    }

    fn single_qubit(&self) -> Result<(GateParams, Scheme)> {
        let params = match self.gate()?.unwrap_or(GateSpec::Named(NamedGate::S)) {
            GateSpec::Params(p) => p,
            GateSpec::Named(g) => g.params().ok_or_else(|| {
                Error::InvalidGate(format!("{g} acts on two logical qubits; use the two-qubit subcommand"))
            })?,
        };
        Ok((params, self.scheme()?.unwrap_or(Scheme::DynCorrected)))
    }
}

impl ErrorArgs {
    fn model(&self) -> ErrorModel {
        let mut e = ErrorModel::default();
        self.apply(&mut e);
        e
    }

    fn apply(&self, e: &mut ErrorModel) {
        if let Some(x) = self.epsilon {
            e.epsilon = x;
        }
        if let Some(x) = self.delta {
            e.delta = x;
        }
        if let Some(x) = self.gamma1 {
            e.gamma1 = x;
        }
        if let Some(x) = self.gamma2 {
            e.gamma2 = x;
        }
    }
}

impl EngineArgs {
    fn config(&self) -> Result<EngineConfig> {
        let mut c = EngineConfig::default();
        if let Some(h) = self.step {
            c.step = h;
        }
        if let Some(n) = self.samples {
            c.samples = n;
        }
        c.validate()?;
        Ok(c)
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sweep_spec(args: &SweepArgs, heatmap: bool) -> Result<SweepSpec> {
    let mut spec = match &args.config {
        Some(path) => serde_json::from_str::<SweepSpec>(&fs::read_to_string(path)?)?,
        None => {
            let mut spec = SweepSpec::new(
                GateSpec::Named(NamedGate::S),
                Scheme::DynCorrected,
                Axis::default_for(AxisParam::Epsilon, if heatmap { 41 } else { 21 }),
            );
            if heatmap {
                spec.axis2 = Some(Axis::default_for(AxisParam::Gamma, 41));
            }
            spec
        }
    };
    if let Some(g) = args.gate.gate()? {
        spec.gate = g;
    }
    if let Some(s) = args.gate.scheme()? {
        spec.scheme = s;
    }
    let name1 = match &args.param {
        Some(p) => p.parse()?,
        None => spec.axis1.name,
    };
    spec.axis1 = match &args.grid {
        Some(g) => parse_grid(g, name1)?,
        None if name1 != spec.axis1.name => Axis::default_for(name1, spec.axis1.count),
        None => spec.axis1,
    };
    if args.param2.is_some() || args.grid2.is_some() {
        let name2 = match &args.param2 {
            Some(p) => p.parse()?,
            None => spec.axis2.map_or(AxisParam::Gamma, |a| a.name),
        };
        spec.axis2 = Some(match &args.grid2 {
            Some(g) => parse_grid(g, name2)?,
            None => Axis::default_for(name2, if heatmap { 41 } else { 21 }),
        });
    }
    if heatmap && spec.axis2.is_none() {
        return Err(Error::InvalidSweep("heatmap needs a second axis".into()));
    }
    if let Some(x) = args.errors.epsilon {
        spec.epsilon = x;
    }
    if let Some(x) = args.errors.delta {
        spec.delta = x;
    }
    if let Some(x) = args.errors.gamma1 {
        spec.rates.gamma1 = x;
    }
    if let Some(x) = args.errors.gamma2 {
        spec.rates.gamma2 = x;
    }
    if let Some(e) = args.encoding {
        spec.encoding = e;
    }
    if let Some(o) = &args.out {
        spec.output = Some(o.clone());
    }
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Schedule { gate, errors, out } => {
            let (params, scheme) = gate.single_qubit()?;
            let mut schedule = build(params, scheme)?;
            let e = errors.model();
            if e.epsilon != 0.0 || e.delta != 0.0 {
                schedule = apply_error(&schedule, &e)?;
            }
            emit(&(schedule.to_json()? + "\n"), out.as_deref())?;
        }
        Command::Trajectory {
            gate,
            errors,
            state,
            encoding,
            engine,
            out,
        } => {
            let (params, scheme) = gate.single_qubit()?;
            let initial = parse_state(&state)?;
            if initial.len() != 2 {
                return Err(Error::Parse(format!("state '{state}' must have 2 amplitudes")));
            }
            let r = harness::run_trajectory(
                params,
                scheme,
                encoding.unwrap_or_default(),
                &initial,
                &errors.model(),
                &engine.config()?,
            )?;
            emit(&r.trajectory_csv(), out.as_deref())?;
            if let Some(last) = r.trajectory.last() {
                eprintln!("final state fidelity: {}", last.state_fidelity);
            }
        }
        Command::Sweep(args) => {
            let spec = sweep_spec(&args, false)?;
            let table = harness::run_sweep(&spec, &args.engine.config()?)?;
            emit(&table.to_csv(), spec.output.as_deref())?;
        }
        Command::Heatmap(args) => {
            let spec = sweep_spec(&args, true)?;
            let table = harness::run_sweep(&spec, &args.engine.config()?)?;
            emit(&table.to_csv(), spec.output.as_deref())?;
        }
        Command::VerifyAppendix { gate, out } => {
            let (gate_name, scheme) = match gate.gate()? {
                Some(GateSpec::Named(g @ (NamedGate::S | NamedGate::H))) => {
                    (g, gate.scheme()?.unwrap_or(Scheme::DynCorrected))
                }
                _ => return Err(Error::InvalidGate("verify-appendix takes --gate S or --gate H".into())),
            };
            let report = harness::verify_appendix(gate_name, scheme, &EngineConfig::default())?;
            for c in &report.checks {
                eprintln!(
                    "{} c{} = {:.6e} ± {:.1e}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.order,
                    c.measured,
                    c.std_error,
                    match c.criterion {
                        harness::Criterion::Relative { target, tol } =>
                            format!("target {target:.6e} within {}%", tol * 100.0),
                        harness::Criterion::Vanishing { bound } => format!("|c| < {bound:e}"),
                    }
                );
            }
            emit(&(serde_json::to_string_pretty(&report)? + "\n"), out.as_deref())?;
            return Ok(report.pass);
        }
        Command::TwoQubit {
            experiment,
            scheme,
            loops,
            errors,
            grid,
            noise,
            engine,
            out,
        } => {
            let gate = GateArgs {
                scheme,
                loops,
                ..GateArgs::default()
            };
            let scheme = gate.scheme()?.unwrap_or(Scheme::DynCorrected);
            match experiment.as_str() {
                "robustness" => {
                    let axis = match &grid {
                        Some(g) => parse_grid(g, AxisParam::Epsilon)?,
                        None => Axis::default_for(AxisParam::Epsilon, 21),
                    };
                    let table = harness::two_qubit_robustness(&axis, loops.unwrap_or(DEFAULT_LOOPS))?;
                    emit(&table.to_csv(), out.as_deref())?;
                }
                "gate" => {
                    let e = errors.model();
                    let g = dfs::run_two_logical_gate(U2_GAMMA, scheme, &e)?;
                    let value = serde_json::json!({
                        "scheme": scheme.to_string(),
                        "epsilon": e.epsilon,
                        "delta": e.delta,
                        "fidelity": g.fidelity(U2_GAMMA),
                        "leakage": g.leakage,
                    });
                    emit(&(serde_json::to_string_pretty(&value)? + "\n"), out.as_deref())?;
                }
                "trajectory" => {
                    let noise: TwoQubitNoise = serde_json::from_value(serde_json::Value::String(noise.clone()))
                        .map_err(|_| {
                            Error::Parse(format!(
                                "unknown noise model '{noise}'; expected logical-qubits or per-block"
                            ))
                        })?;
                    let r = harness::two_qubit_trajectory(scheme, &errors.model(), noise, &engine.config()?)?;
                    emit(&r.trajectory_csv(), out.as_deref())?;
                    if let Some(last) = r.trajectory.last() {
                        eprintln!("final state fidelity: {}", last.state_fidelity);
                    }
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unknown experiment '{other}'; expected robustness, gate or trajectory"
                    )))
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFICATION),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() || matches!(e, Error::Io(_)) {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::from(EXIT_VERIFICATION)
            }
        }
    }
}
