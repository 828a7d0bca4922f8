//! Low-order series fits of fidelity against the pulse-amplitude error.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::NamedGate;
use crate::engine::{gate_fidelity, propagate_unitary, EngineConfig, ErrorModel, TwoLevel};
use crate::error::{Error, Result};
use crate::schedule::{build, Scheme};

/// Largest `|ε|` in the fit window.
pub const FIT_WINDOW: f64 = 3e-2;
/// Smallest `|ε|` in the fit window.
pub const FIT_WINDOW_MIN: f64 = 1e-4;
pub const FIT_POINTS_PER_SIGN: usize = 21;
pub const FIT_DEGREE: usize = 6;
/// Largest tolerated pointwise fit residual.
pub const FIT_RESIDUAL_MAX: f64 = 1e-8;

/// Polynomial fit `F(ε) ≈ Σ c_k ε^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesFit {
    /// `c_0 … c_degree`.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub fit_range: (f64, f64),
    /// Max pointwise `|fit − data|`.
    pub residual: f64,
}

impl SeriesFit {
    pub fn coefficient(&self, k: usize) -> f64 {
        self.coefficients.get(k).copied().unwrap_or(0.0)
    }

    pub fn c2(&self) -> f64 {
        self.coefficient(2)
    }

    pub fn c3(&self) -> f64 {
        self.coefficient(3)
    }

    pub fn c4(&self) -> f64 {
        self.coefficient(4)
    }
}

/// Least-squares polynomial fit of `values` against `xs`. The abscissa is
/// rescaled to `[-1, 1]` before solving to keep the normal matrix well
/// conditioned.
pub fn fit_series(xs: &[f64], values: &[f64], degree: usize) -> Result<SeriesFit> {
    let n = xs.len();
    let p = degree + 1;
    if n != values.len() {
        return Err(Error::Dimension(format!("{n} abscissae but {} values", values.len())));
    }
    if n <= p {
        return Err(Error::InvalidSweep(format!("{n} points cannot fit {p} coefficients")));
    }
    let scale = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if !(scale > 0.0 && scale.is_finite()) || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSweep(
            "fit data must be finite and not all at zero".into(),
        ));
    }
    let a = DMatrix::from_fn(n, p, |i, k| (xs[i] / scale).powi(k as i32));
    let b = DVector::from_column_slice(values);
    let svd = a.clone().svd(true, true);
    let sol = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidSweep(format!("least squares failed: {e}")))?;
    let fitted = &a * &sol;
    let resid = &b - &fitted;
    let residual = resid.amax();
    let dof = (n - p) as f64;
    let sigma2 = resid.norm_squared() / dof;
    let cov = (a.transpose() * &a)
        .try_inverse()
        .ok_or_else(|| Error::InvalidSweep("singular normal matrix".into()))?;
    let coefficients = (0..p).map(|k| sol[k] / scale.powi(k as i32)).collect();
    let std_errors = (0..p)
        .map(|k| (sigma2 * cov[(k, k)]).max(0.0).sqrt() / scale.powi(k as i32))
        .collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SeriesFit {
        coefficients,
        std_errors,
        fit_range: (lo, hi),
        residual,
    })
}

/// How a fitted coefficient is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// `|c − target| ≤ tol·|target|`
    Relative { target: f64, tol: f64 },
    /// `|c| < bound`
    Vanishing { bound: f64 },
}

impl Criterion {
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Criterion::Relative { target, tol } => (value - target).abs() <= tol * target.abs(),
            Criterion::Vanishing { bound } => value.abs() < bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientCheck {
    pub order: usize,
    pub measured: f64,
    pub std_error: f64,
    pub criterion: Criterion,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub gate: NamedGate,
    pub scheme: String,
    pub fit: SeriesFit,
    pub checks: Vec<CoefficientCheck>,
    pub pass: bool,
}

/// Reference low-order coefficients for each supported gate/scheme pair.
pub fn reference_criteria(gate: NamedGate, scheme: Scheme) -> Result<Vec<(usize, Criterion)>> {
    let pi2 = PI * PI;
    let rel = |target, tol| Criterion::Relative { target, tol };
    let s_comp = (pi2 / 4.0) * (-2.0 - SQRT_2 + (2.0 * (2.0 + SQRT_2)).sqrt() + SQRT_2 * (PI / 8.0).sin());
    let crit = match (gate, scheme) {
        (NamedGate::S, Scheme::SingleLoop) => vec![(2, rel((SQRT_2 - 2.0) * pi2 / 8.0, 0.01))],
        (NamedGate::S, Scheme::Composite(2)) => vec![(2, rel(s_comp, 0.01))],
        (NamedGate::S, Scheme::DynCorrected) => vec![
            (2, Criterion::Vanishing { bound: 1e-6 }),
            (4, rel((SQRT_2 - 2.0) * pi2 * pi2 / 32.0, 0.02)),
        ],
        (NamedGate::H, Scheme::SingleLoop) => vec![(2, rel(-5.0 * pi2 / 32.0, 0.01))],
        (NamedGate::H, Scheme::Composite(2)) => vec![(2, rel((8.0 * SQRT_2 - 13.0) * pi2 / 32.0, 0.01))],
        (NamedGate::H, Scheme::DynCorrected) => vec![
            (2, rel(-2.0 * pi2 / 87.0, 0.10)),
            (3, rel(PI * pi2 / 41.0, 0.10)),
        ],
        _ => {
            return Err(Error::InvalidSweep(format!(
                "no reference coefficients for gate {gate} with scheme {scheme}; supported: S or H with singleloop, composite(2), dyncorrected"
            )))
        }
    };
    Ok(crit)
}

/// Symmetric fit grid: `FIT_POINTS_PER_SIGN` magnitudes per sign.
pub fn fit_grid() -> Vec<f64> {
    let n = FIT_POINTS_PER_SIGN;
    let mags: Vec<f64> = (0..n)
        .map(|k| FIT_WINDOW_MIN + (FIT_WINDOW - FIT_WINDOW_MIN) * k as f64 / (n - 1) as f64)
        .collect();
    mags.iter().rev().map(|m| -m).chain(mags.iter().copied()).collect()
}

/// Fits the closed-system gate fidelity against `ε` and compares the
/// low-order coefficients with their references.
pub fn verify_appendix(gate: NamedGate, scheme: Scheme, config: &EngineConfig) -> Result<AppendixReport> {
    let criteria = reference_criteria(gate, scheme)?;
    let params = gate.params().expect("single-qubit gate");
    let schedule = build(params, scheme)?;
    let target = params.target();
    let xs = fit_grid();
    let values = xs
        .iter()
        .map(|&eps| {
            let r = propagate_unitary(&TwoLevel, &schedule, &ErrorModel::coherent(eps, 0.0), None, config)?;
            gate_fidelity(r.propagator().expect("unitary path"), &target)
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_series(&xs, &values, FIT_DEGREE)?;
    if fit.residual > FIT_RESIDUAL_MAX {
        return Err(Error::FitResidual {
            residual: fit.residual,
            threshold: FIT_RESIDUAL_MAX,
        });
    }
    let checks: Vec<CoefficientCheck> = criteria
        .into_iter()
        .map(|(order, criterion)| {
            let measured = fit.coefficient(order);
            CoefficientCheck {
                order,
                measured,
                std_error: fit.std_errors[order],
                criterion,
                pass: criterion.holds(measured),
            }
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    Ok(AppendixReport {
        gate,
        scheme: scheme.to_string(),
        fit,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_polynomial() {
        let xs = fit_grid();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 1.0 - 0.7 * x * x + 0.3 * x * x * x - 1.9 * x.powi(4))
            .collect();
        let fit = fit_series(&xs, &ys, FIT_DEGREE).unwrap();
        assert!((fit.c2() + 0.7).abs() < 1e-8);
        assert!((fit.c3() - 0.3).abs() < 1e-6);
        assert!((fit.c4() + 1.9).abs() < 1e-4);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.fit_range, (-FIT_WINDOW, FIT_WINDOW));
    }

    #[test]
    fn grid_shape() {
        let g = fit_grid();
        assert_eq!(g.len(), 2 * FIT_POINTS_PER_SIGN);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(!g.contains(&0.0));
    }

    #[test]
    fn rejects_underdetermined() {
        assert!(fit_series(&[0.1, 0.2], &[1.0, 1.0], 3).is_err());
        assert!(fit_series(&[0.1, 0.2, 0.3], &[1.0, 1.0], 1).is_err());
    }

    #[test]
    fn unsupported_pair() {
        assert!(reference_criteria(NamedGate::T, Scheme::SingleLoop).is_err());
        assert!(reference_criteria(NamedGate::S, Scheme::Composite(3)).is_err());
    }

    #[test]
    fn criterion_semantics() {
        let c = Criterion::Relative {
            target: -2.0,
            tol: 0.01,
        };
        assert!(c.holds(-2.019) && !c.holds(-2.03));
        assert!(Criterion::Vanishing { bound: 1e-6 }.holds(-5e-7));
    }
}
