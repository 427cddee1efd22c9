//! JSON problem files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "h0": { "real": [[0.5, 0.0], [0.0, -0.5]], "imag": [[0.0, 0.0], [0.0, 0.0]] },
//!   "psi_i": { "real": [0.7071067811865476, 0.7071067811865476], "imag": [0.0, 0.0] },
//!   "psi_f": { "real": [0.7071067811865476, -0.7071067811865476], "imag": [0.0, 0.0] },
//!   "epsilon": 1.0,
//!   "tolerances": { "root_tol": 1e-12, "t_max": 12.566370614359172, "hermitian": 1e-9 }
//! }
//! ```
//!
//! `epsilon` scales the wind; `tolerances` and `epsilon` are optional.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, HermitianOperator, LinalgError, PureState, C64};
use crate::solver::{NavigationProblem, SolveError};

/// Default tolerance on the anti-Hermitian part of `h0`.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-9;
/// States whose squared norm is within this of 1 are kept bit-for-bit.
pub const RENORMALIZE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}, column {column}, field `{field}`: {message}")]
    Parse { line: usize, column: usize, field: String, message: String },
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

pub type Result<T> = std::result::Result<T, ProblemError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixJson {
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexVectorJson {
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermitian: Option<f64>,
}

impl Tolerances {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub h0: ComplexMatrixJson,
    pub psi_i: ComplexVectorJson,
    pub psi_f: ComplexVectorJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Tolerances::is_empty")]
    pub tolerances: Tolerances,
}

impl ComplexMatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        Self {
            real: (0..n).map(|j| (0..n).map(|k| m[(j, k)].re).collect()).collect(),
            imag: (0..n).map(|j| (0..n).map(|k| m[(j, k)].im).collect()).collect(),
        }
    }

    fn to_matrix(&self, dim: usize, name: &str) -> Result<ComplexMatrix> {
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == dim && rows.iter().all(|r| r.len() == dim);
        if !shape_ok(&self.real) || !shape_ok(&self.imag) {
            return Err(ProblemError::Invalid(format!("{name} must be {dim}×{dim} in both real and imag parts")));
        }
        let m = ComplexMatrix::from_fn(dim, |j, k| C64::new(self.real[j][k], self.imag[j][k]));
        if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ProblemError::Invalid(format!("{name} has non-finite entries")));
        }
        Ok(m)
    }
}

impl ComplexVectorJson {
    pub fn from_slice(v: &[C64]) -> Self {
        Self { real: v.iter().map(|z| z.re).collect(), imag: v.iter().map(|z| z.im).collect() }
    }

    fn to_vec(&self, dim: usize, name: &str) -> Result<Vec<C64>> {
        if self.real.len() != dim || self.imag.len() != dim {
            return Err(ProblemError::Invalid(format!("{name} must have {dim} real and imag entries")));
        }
        let v: Vec<C64> = self.real.iter().zip(&self.imag).map(|(&re, &im)| C64::new(re, im)).collect();
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ProblemError::Invalid(format!("{name} has non-finite entries")));
        }
        Ok(v)
    }
}

/// Checked problem data plus any warnings raised while normalizing it.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    /// The file with `h0` symmetrized and both states normalized.
    pub normalized: ProblemFile,
    /// Wind before the `epsilon` scaling.
    pub base_h0: HermitianOperator,
    pub psi_i: PureState,
    pub psi_f: PureState,
    pub warnings: Vec<String>,
}

impl LoadedProblem {
    pub fn epsilon(&self) -> f64 {
        self.normalized.epsilon.unwrap_or(1.0)
    }

    /// Navigation problem under the wind `ε·h0`, with file tolerances and an
    /// optional horizon override.
    pub fn navigation_problem(&self, t_max: Option<f64>) -> Result<NavigationProblem> {
        self.navigation_problem_with_wind_scale(self.epsilon(), t_max)
    }

    /// Same endpoints under the wind `epsilon·h0`, ignoring the file's epsilon.
    pub fn navigation_problem_with_wind_scale(&self, epsilon: f64, t_max: Option<f64>) -> Result<NavigationProblem> {
        let mut p = NavigationProblem::new(self.base_h0.scale(epsilon), self.psi_i.clone(), self.psi_f.clone())?;
        let tol = &self.normalized.tolerances;
        if let Some(r) = tol.root_tol {
            p = p.with_root_tol(r)?;
        }
        if let Some(t) = t_max.or(tol.t_max) {
            p = p.with_t_max(t)?;
        }
        Ok(p)
    }
}

impl ProblemFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|err| {
            let field = match err.path().to_string() {
                path if path == "?" || path == "." => "<document>".to_string(),
                path => path,
            };
            let inner = err.into_inner();
            ProblemError::Parse { line: inner.line(), column: inner.column(), field, message: inner.to_string() }
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ProblemError::Io { path: path.display().to_string(), source })?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Builds a problem file from operators, without any normalization.
    pub fn from_parts(h0: &HermitianOperator, psi_i: &PureState, psi_f: &PureState, epsilon: Option<f64>) -> Self {
        Self {
            dimension: h0.dim(),
            h0: ComplexMatrixJson::from_matrix(h0.matrix()),
            psi_i: ComplexVectorJson::from_slice(psi_i.amplitudes()),
            psi_f: ComplexVectorJson::from_slice(psi_f.amplitudes()),
            epsilon,
            tolerances: Tolerances::default(),
        }
    }

    /// Validates the data and normalizes it.
    ///
    /// `h0` must be Hermitian within `hermitian_tol` (falling back to the
    /// file's tolerance, then [`DEFAULT_HERMITIAN_TOL`]) and is replaced by its
    /// Hermitian part. States are rescaled only when their squared norm is off
    /// by more than [`RENORMALIZE_TOL`], so normalizing twice changes nothing.
    pub fn load(&self, hermitian_tol: Option<f64>) -> Result<LoadedProblem> {
        let dim = self.dimension;
        if dim < 2 {
            return Err(ProblemError::Invalid(format!("dimension must be at least 2, got {dim}")));
        }
        if let Some(eps) = self.epsilon {
            if !eps.is_finite() {
                return Err(ProblemError::Invalid("epsilon must be finite".into()));
            }
        }
        let tol = hermitian_tol.or(self.tolerances.hermitian).unwrap_or(DEFAULT_HERMITIAN_TOL);
        let raw = self.h0.to_matrix(dim, "h0")?;
        let symmetric = HermitianOperator::with_tolerance(raw, tol)?;

        let mut warnings = Vec::new();
        let mut state = |json: &ComplexVectorJson, name: &str| -> Result<PureState> {
            let v = json.to_vec(dim, name)?;
            let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if (norm_sq - 1.0).abs() <= RENORMALIZE_TOL {
                return Ok(PureState::new(v)?);
            }
            let psi = PureState::normalized(v)?;
            warnings.push(format!("{name} renormalized (squared norm was {norm_sq})"));
            Ok(psi)
        };
        let psi_i = state(&self.psi_i, "psi_i")?;
        let psi_f = state(&self.psi_f, "psi_f")?;

        let normalized = Self {
            dimension: dim,
            h0: ComplexMatrixJson::from_matrix(symmetric.matrix()),
            psi_i: ComplexVectorJson::from_slice(psi_i.amplitudes()),
            psi_f: ComplexVectorJson::from_slice(psi_f.amplitudes()),
            epsilon: self.epsilon,
            tolerances: self.tolerances.clone(),
        };
        Ok(LoadedProblem { normalized, base_h0: symmetric, psi_i, psi_f, warnings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAILWIND: &str = r#"{
        "dimension": 2,
        "h0": { "real": [[0.5, 0.0], [0.0, -0.5]], "imag": [[0.0, 0.0], [0.0, 0.0]] },
        "psi_i": { "real": [1.0, 1.0], "imag": [0.0, 0.0] },
        "psi_f": { "real": [0.7071067811865476, -0.7071067811865476], "imag": [0.0, 0.0] },
        "epsilon": 1.0
    }"#;

    #[test]
    fn loads_and_normalizes() {
        let file = ProblemFile::from_json_str(TAILWIND).unwrap();
        let loaded = file.load(None).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!(loaded.warnings[0].contains("psi_i"));
        assert!((loaded.psi_i.norm() - 1.0).abs() < 1e-15);
        let p = loaded.navigation_problem(None).unwrap();
        assert_eq!(p.h0().matrix()[(0, 0)].re, 0.5);
    }

    #[test]
    fn normalization_round_trips_bit_for_bit() {
        let file = ProblemFile::from_json_str(TAILWIND).unwrap();
        let once = file.load(None).unwrap().normalized;
        let text = once.to_json_pretty();
        let reparsed = ProblemFile::from_json_str(&text).unwrap();
        assert_eq!(reparsed, once);
        let twice = reparsed.load(None).unwrap();
        assert_eq!(twice.normalized, once);
        assert!(twice.warnings.is_empty());
    }

    #[test]
    fn parse_errors_name_the_field() {
        let broken = TAILWIND.replace("\"epsilon\": 1.0", "\"epsilon\": \"one\"");
        match ProblemFile::from_json_str(&broken) {
            Err(ProblemError::Parse { field, line, .. }) => {
                assert_eq!(field, "epsilon");
                assert_eq!(line, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ProblemFile::from_json_str("{ \"dimension\": 2,"), Err(ProblemError::Parse { .. })));
    }

    #[test]
    fn rejects_bad_data() {
        let mut file = ProblemFile::from_json_str(TAILWIND).unwrap();
        file.h0.imag[0][1] = 0.1;
        assert!(matches!(file.load(None), Err(ProblemError::Linalg(LinalgError::NotHermitian { .. }))));
        assert!(file.load(Some(0.5)).is_ok());

        let mut file = ProblemFile::from_json_str(TAILWIND).unwrap();
        file.psi_f.real = vec![0.0, 0.0];
        file.psi_f.imag = vec![0.0, 0.0];
        assert!(matches!(file.load(None), Err(ProblemError::Linalg(LinalgError::ZeroNorm { .. }))));

        let mut file = ProblemFile::from_json_str(TAILWIND).unwrap();
        file.dimension = 3;
        assert!(matches!(file.load(None), Err(ProblemError::Invalid(_))));
    }
}
