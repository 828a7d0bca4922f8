use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::Operator;

/// Trace fidelity `|Tr(V† U)| / d`; insensitive to global phase.
pub fn gate_fidelity(actual: &Operator, ideal: &Operator) -> Result<f64> {
    if actual.dim() != ideal.dim() {
        return Err(Error::Dimension(format!(
            "gate fidelity between {}-dim and {}-dim operators",
            actual.dim(),
            ideal.dim()
        )));
    }
    let d = actual.dim();
    let overlap: C64 = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| ideal[(i, j)].conj() * actual[(i, j)])
        .sum();
    Ok(overlap.norm() / d as f64)
}

/// Trace fidelity restricted to the computational subspace `indices`.
pub fn gate_fidelity_on(actual: &Operator, ideal: &Operator, indices: &[usize]) -> Result<f64> {
    gate_fidelity(&actual.restrict(indices), &ideal.restrict(indices))
}

/// `⟨ψ|ρ|ψ⟩`
pub fn state_fidelity(rho: &Operator, psi: &[C64]) -> Result<f64> {
    if rho.dim() != psi.len() {
        return Err(Error::Dimension(format!(
            "state fidelity between {}-dim density and {}-component state",
            rho.dim(),
            psi.len()
        )));
    }
    Ok(rho.expectation(psi, psi).re)
}

/// Gate fidelity of a channel, given as a row-major superoperator acting on
/// `vec(ρ)`, against the ideal unitary on the subspace `indices`.
///
/// Returns the square root of the entanglement fidelity, which equals the
/// trace fidelity `|Tr(V†U)|/k` whenever the channel is unitary.
pub fn channel_gate_fidelity(superop: &Operator, ideal: &Operator, indices: &[usize]) -> Result<f64> {
    let d = ideal.dim();
    if superop.dim() != d * d {
        return Err(Error::Dimension(format!(
            "superoperator of dim {} does not act on {d}-dim states",
            superop.dim()
        )));
    }
    let k = indices.len() as f64;
    let mut acc = C64::new(0.0, 0.0);
    for &i in indices {
        for &j in indices {
            // column i*d + j of the superoperator is vec(E(|i⟩⟨j|))
            let col = i * d + j;
            for a in 0..d {
                let ua = ideal[(a, i)].conj();
                if ua == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..d {
                    acc += ua * superop[(a * d + b, col)] * ideal[(b, j)];
                }
            }
        }
    }
    Ok((acc.re / (k * k)).max(0.0).sqrt())
}
