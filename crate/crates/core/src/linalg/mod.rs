//! Dense complex linear algebra for small Hermitian systems.
//!
//! Everything here works in units with ħ = 1. Matrices are stored row-major and
//! are expected to stay small (a few dozen rows at most), so the routines favour
//! clarity and exactness over blocking or SIMD.

mod eigen;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64 as C64;
use thiserror::Error;

pub use eigen::{expm_unitary, hermitian_eigendecomposition, Eigendecomposition};

/// Max-abs entrywise asymmetry tolerated by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Max-abs entrywise deviation of `U†U` from the identity.
pub const UNITARY_TOL: f64 = 1e-10;
/// Allowed deviation of a state's squared norm from one.
pub const NORM_TOL: f64 = 1e-12;
/// Below this norm a vector cannot be normalised.
pub const MIN_NORM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("empty matrix or vector")]
    Empty,
    #[error("matrix is not Hermitian: max |A - A†| = {max_asymmetry:e} (tolerance {tol:e})")]
    NotHermitian { max_asymmetry: f64, tol: f64 },
    #[error("matrix is not unitary: max |U†U - I| = {residual:e}")]
    NotUnitary { residual: f64 },
    #[error("state is not normalised: |ψ|² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },
    #[error("vector norm {norm:e} is too small to normalise")]
    ZeroNorm { norm: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { left, right })
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                data.push(f(j, k));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(LinalgError::NotSquare { row, len: r.len(), expected: dim });
            }
            data.extend(r);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[C64], b: &[C64]) -> Result<Self> {
        check_dims(a.len(), b.len())?;
        Ok(Self::from_fn(a.len(), |j, k| a[j] * b[k].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |j, k| self[(k, j)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for j in 0..n {
            for m in 0..n {
                let a = self.data[j * n + m];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[m * n..(m + 1) * n];
                let dst = &mut out.data[j * n..(j + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        let n = self.dim;
        (0..n)
            .map(|j| self.data[j * n..(j + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// max_jk |A_jk − conj(A_kj)|
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..self.dim {
            for k in j..self.dim {
                worst = worst.max((self[(j, k)] - self[(k, j)].conj()).norm());
            }
        }
        worst
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |j, k| (self[(j, k)] + self[(k, j)].conj()) * 0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (j, k): (usize, usize)) -> &C64 {
        &self.data[j * self.dim + k]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.dim + k]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for j in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|k| {
                    let z = self[(j, k)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// A Hermitian operator: Hamiltonians, controls, stabiliser generators.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    /// Checks Hermiticity to [`HERMITIAN_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITIAN_TOL)
    }

    /// Checks Hermiticity to `tol`, then stores the exact Hermitian part.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let max_asymmetry = matrix.max_asymmetry();
        if !(max_asymmetry <= tol) {
            return Err(LinalgError::NotHermitian { max_asymmetry, tol });
        }
        Ok(Self(matrix.hermitian_part()))
    }

    /// Projects onto the Hermitian part without checking. Used for products that
    /// are Hermitian in exact arithmetic.
    pub fn from_hermitian_part(matrix: &ComplexMatrix) -> Self {
        Self(matrix.hermitian_part())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(ComplexMatrix::from_fn(n, |j, k| {
            if j == k {
                C64::new(diag[j], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(C64::new(s, 0.0)))
    }

    /// h − (tr h / dim)·1
    pub fn traceless_part(&self) -> Self {
        let shift = self.trace() / self.dim() as f64;
        let mut m = self.0.clone();
        for k in 0..self.dim() {
            m[(k, k)] -= shift;
        }
        Self(m)
    }

    /// U h U†
    pub fn conjugate_by(&self, u: &UnitaryOperator) -> Self {
        let m = u.matrix().matmul(&self.0).matmul(&u.matrix().adjoint());
        Self::from_hermitian_part(&m)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.0.mul_vec(v)
    }

    /// Largest |eigenvalue|.
    pub fn spectral_norm(&self) -> f64 {
        hermitian_eigendecomposition(self)
            .eigenvalues()
            .iter()
            .fold(0.0_f64, |acc, l| acc.max(l.abs()))
    }

    pub fn eigen(&self) -> Eigendecomposition {
        hermitian_eigendecomposition(self)
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian")?;
        self.0.fmt(f)
    }
}

impl<'a> Add<&'a HermitianOperator> for &'a HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a HermitianOperator> for &'a HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(&self.0 - &rhs.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator(ComplexMatrix);

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let residual = unitarity_residual(&matrix);
        if !(residual <= UNITARY_TOL) {
            return Err(LinalgError::NotUnitary { residual });
        }
        Ok(Self(matrix))
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self(self.0.matmul(&rhs.0))
    }

    pub fn apply(&self, psi: &PureState) -> PureState {
        PureState::renormalized(self.0.mul_vec(&psi.0))
    }

    /// max |U†U − 1|
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.0)
    }
}

fn unitarity_residual(m: &ComplexMatrix) -> f64 {
    m.adjoint().matmul(m).max_abs_diff(&ComplexMatrix::identity(m.dim))
}

/// Normalised amplitude vector representing a ray.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<C64>);

impl PureState {
    /// Accepts amplitudes whose squared norm is one within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(LinalgError::Empty);
        }
        let norm_sq = norm_sq(&amplitudes);
        if !((norm_sq - 1.0).abs() <= NORM_TOL) {
            return Err(LinalgError::NotNormalized { norm_sq });
        }
        Ok(Self(amplitudes))
    }

    /// Rescales to unit norm; leaves already-normalised input bit-identical.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(LinalgError::Empty);
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let norm = norm_sq(&amplitudes).sqrt();
        if !(norm > MIN_NORM) {
            return Err(LinalgError::ZeroNorm { norm });
        }
        if (norm * norm - 1.0).abs() <= NORM_TOL {
            return Ok(Self(amplitudes));
        }
        Ok(Self(amplitudes.into_iter().map(|z| z / norm).collect()))
    }

    pub(crate) fn renormalized(amplitudes: Vec<C64>) -> Self {
        let norm = norm_sq(&amplitudes).sqrt();
        Self(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.0
    }

    /// e^{iφ}ψ
    pub fn with_phase(&self, phi: f64) -> Self {
        self.times_unit(C64::from_polar(1.0, phi))
    }

    /// Multiplies by a unit-modulus factor.
    pub fn times_unit(&self, factor: C64) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn norm(&self) -> f64 {
        norm_sq(&self.0).sqrt()
    }

    /// Euclidean distance between amplitude vectors (phase sensitive).
    pub fn distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// ⟨a|b⟩, conjugate-linear in `a`.
pub fn inner(a: &PureState, b: &PureState) -> Result<C64> {
    check_dims(a.dim(), b.dim())?;
    Ok(dot(&a.0, &b.0))
}

/// Hilbert–Schmidt pairing tr(ab); real for Hermitian arguments.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let n = a.dim();
    let (x, y) = (a.0.as_slice(), b.0.as_slice());
    let mut acc = 0.0;
    for j in 0..n {
        for k in 0..n {
            acc += (x[j * n + k] * y[k * n + j]).re;
        }
    }
    Ok(acc)
}

/// ⟨ψ|h|ψ⟩
pub fn expectation(h: &HermitianOperator, psi: &PureState) -> Result<f64> {
    check_dims(h.dim(), psi.dim())?;
    Ok(dot(&psi.0, &h.apply(&psi.0)).re)
}

/// (h − ⟨h⟩)ψ
fn centred_action(h: &HermitianOperator, psi: &PureState) -> Result<Vec<C64>> {
    let mean = expectation(h, psi)?;
    Ok(h.apply(&psi.0).into_iter().zip(&psi.0).map(|(hv, v)| hv - v * mean).collect())
}

/// ⟨h²⟩ − ⟨h⟩², evaluated as ‖(h − ⟨h⟩)ψ‖² so it cannot go negative.
pub fn variance(h: &HermitianOperator, psi: &PureState) -> Result<f64> {
    Ok(norm_sq(&centred_action(h, psi)?))
}

/// Symmetrised covariance Re⟨ab⟩ − ⟨a⟩⟨b⟩.
pub fn covariance(a: &HermitianOperator, b: &HermitianOperator, psi: &PureState) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let da = centred_action(a, psi)?;
    let db = centred_action(b, psi)?;
    Ok(dot(&da, &db).re)
}

/// |⟨a|b⟩|, clamped into [0, 1].
pub fn projective_fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(inner(a, b)?.norm().min(1.0))
}

/// Pauli matrices and other fixed two-level operators.
pub mod pauli {
    use super::{ComplexMatrix, HermitianOperator, C64};

    fn from(entries: [[C64; 2]; 2]) -> HermitianOperator {
        HermitianOperator(ComplexMatrix::from_fn(2, |j, k| entries[j][k]))
    }

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    pub fn sigma_x() -> HermitianOperator {
        from([[O, ONE], [ONE, O]])
    }

    pub fn sigma_y() -> HermitianOperator {
        from([[O, -I], [I, O]])
    }

    pub fn sigma_z() -> HermitianOperator {
        from([[ONE, O], [O, -ONE]])
    }
}
