//! Dense complex operators for the small Hilbert spaces used here (d ≤ 16,
//! plus d² superoperators for the master equation).
//!
//! Everything is stored row-major in a flat `Vec<Complex64>`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances used by validation checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of an axis from unit length.
    pub axis_norm: f64,
    /// Allowed max-entry asymmetry `|H - H†|` for a Hermitian input.
    pub hermitian: f64,
    /// Allowed `‖P†P − I‖_max` for a propagator.
    pub unitary: f64,
    /// Allowed deviation of a state vector from unit norm.
    pub state_norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            axis_norm: 1e-12,
            hermitian: 1e-10,
            unitary: 1e-10,
            state_norm: 1e-10,
        }
    }
}

/// A square complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out[(i, i)] = C64::new(1.0, 0.0);
        }
        out
    }

    /// Builds an operator from row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            dim: N,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut out = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            out[(i, i)] = z;
        }
        out
    }

    /// `|ket⟩⟨bra|`
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        assert_eq!(ket.len(), bra.len(), "outer product of mismatched vectors");
        let dim = ket.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for k in ket {
            for b in bra {
                entries.push(k * b.conj());
            }
        }
        Self { dim, entries }
    }

    /// Single matrix unit `|row⟩⟨col|`.
    pub fn unit(dim: usize, row: usize, col: usize) -> Self {
        let mut out = Self::zeros(dim);
        out[(row, col)] = C64::new(1.0, 0.0);
        out
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (max column sum), used to pick the squaring count.
    pub fn norm_one(&self) -> f64 {
        let d = self.dim;
        (0..d)
            .map(|j| (0..d).map(|i| self.entries[i * d + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max-entry deviation between two operators of equal dimension.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |H − H†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                let dev = (self.entries[i * d + j] - self.entries[j * d + i].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// `‖P†P − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.adjoint().matmul(self);
        prod.max_diff(&Self::identity(self.dim))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            let row = &self.entries[i * d..(i + 1) * d];
            let dst = &mut out[i * d..(i + 1) * d];
            for (k, &a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rrow = &rhs.entries[k * d..(k + 1) * d];
                for (o, &b) in dst.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Self { dim: d, entries: out }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in matrix-vector product");
        let d = self.dim;
        (0..d)
            .map(|i| self.entries[i * d..(i + 1) * d].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `A ⊗ B`
    pub fn kron(&self, rhs: &Self) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        let d = da * db;
        let mut out = Self::zeros(d);
        for i in 0..da {
            for j in 0..da {
                let a = self.entries[i * da + j];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out.entries[(i * db + k) * d + j * db + l] = a * rhs.entries[k * db + l];
                    }
                }
            }
        }
        out
    }

    /// Sub-matrix on the given ordered index set.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut out = Self::zeros(k);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out.entries[a * k + b] = self[(i, j)];
            }
        }
        out
    }

    /// `⟨u|A|v⟩`
    pub fn expectation(&self, u: &[C64], v: &[C64]) -> C64 {
        inner(u, &self.apply(v))
    }

    /// Rejects a non-Hermitian operator, reporting the largest asymmetry.
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian { max_asymmetry: dev });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `⟨u|v⟩`
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub mod pauli {
    use super::{Operator, C64};

    const O: C64 = C64::new(0.0, 0.0);
    const I: C64 = C64::new(1.0, 0.0);
    const J: C64 = C64::new(0.0, 1.0);

    pub fn x() -> Operator {
        Operator::from_rows([[O, I], [I, O]])
    }

    pub fn y() -> Operator {
        Operator::from_rows([[O, -J], [J, O]])
    }

    pub fn z() -> Operator {
        Operator::from_rows([[I, O], [O, -I]])
    }

    /// `n·σ` for a real 3-vector.
    pub fn dot(n: [f64; 3]) -> Operator {
        Operator::from_rows([
            [C64::new(n[2], 0.0), C64::new(n[0], -n[1])],
            [C64::new(n[0], n[1]), C64::new(-n[2], 0.0)],
        ])
    }
}

/// `exp(−i (angle/2) n·σ) = cos(angle/2) I − i sin(angle/2) n·σ`.
pub fn su2_rotation(axis: [f64; 3], angle: f64) -> Result<Operator> {
    su2_rotation_with(axis, angle, &Tolerances::default())
}

pub fn su2_rotation_with(axis: [f64; 3], angle: f64, tol: &Tolerances) -> Result<Operator> {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > tol.axis_norm {
        return Err(Error::AxisNotNormalized { norm });
    }
    Ok(su2_unchecked(axis, angle))
}

fn su2_unchecked(n: [f64; 3], angle: f64) -> Operator {
    let (s, c) = (0.5 * angle).sin_cos();
    Operator::from_rows([
        [C64::new(c, -s * n[2]), C64::new(-s * n[1], -s * n[0])],
        [C64::new(s * n[1], -s * n[0]), C64::new(c, s * n[2])],
    ])
}

/// Closed form of `exp(−i H t)` for any 2×2 Hermitian `H`.
///
/// `H = a₀ I + (b/2) m·σ` with `|m| = 1`, so the result is
/// `e^{−i a₀ t} · su2(m, b t)`.
fn expm_2x2_hermitian(h: &Operator, t: f64) -> Operator {
    let a0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let hz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let hx = 0.5 * (h[(0, 1)].re + h[(1, 0)].re);
    let hy = 0.5 * (h[(1, 0)].im - h[(0, 1)].im);
    let r = (hx * hx + hy * hy + hz * hz).sqrt();
    let rot = if r == 0.0 {
        Operator::identity(2)
    } else {
        su2_unchecked([hx / r, hy / r, hz / r], 2.0 * r * t)
    };
    if a0 == 0.0 {
        rot
    } else {
        rot.scale(C64::from_polar(1.0, -a0 * t))
    }
}

/// `exp(−i H t)` for a Hermitian `H`.
///
/// 2×2 inputs use the closed SU(2) form; larger ones use scaling and squaring
/// on a truncated Taylor series.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    expm_hermitian_with(h, t, &Tolerances::default())
}

pub fn expm_hermitian_with(h: &Operator, t: f64, tol: &Tolerances) -> Result<Operator> {
    h.check_hermitian(tol.hermitian)?;
    if h.dim() == 2 {
        return Ok(expm_2x2_hermitian(h, t));
    }
    Ok(expm_general(&h.scale(C64::new(0.0, -t))))
}

const TAYLOR_ORDER: usize = 16;
const SQUARING_THRESHOLD: f64 = 0.5;

/// `exp(A)` for a general square matrix by scaling and squaring.
pub fn expm_general(a: &Operator) -> Operator {
    let d = a.dim();
    let norm = a.norm_one();
    let mut squarings = 0u32;
    if norm > SQUARING_THRESHOLD {
        squarings = (norm / SQUARING_THRESHOLD).log2().ceil() as u32;
    }
    let scaled = a.scale_real(0.5_f64.powi(squarings as i32));

    // Horner: I + X(I + X/2(I + X/3(...)))
    let ident = Operator::identity(d);
    let mut acc = ident.clone();
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = &ident + &scaled.matmul(&acc).scale_real(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    acc
}
