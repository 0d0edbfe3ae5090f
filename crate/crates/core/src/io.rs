//! JSON state files.
//!
//! ```json
//! {"d_a": 2, "d_b": 2, "kind": "density", "re": [[...], ...], "im": [[...], ...]}
//! ```
//!
//! `re`/`im` hold the row-major real and imaginary parts. A `"pure"` file
//! carries a single row of `d_a·d_b` amplitudes.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::linalg::{BipartiteDims, DensityMatrix, HermitianMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Density,
    Pure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub d_a: usize,
    pub d_b: usize,
    pub kind: StateKind,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Shape { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    State {
        path: PathBuf,
        #[source]
        source: Error,
    },
}

/// Parsed and validated file contents.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Density(DensityMatrix),
    Pure(PureState),
}

impl LoadedState {
    /// The state as a density matrix (`|ψ⟩⟨ψ|` for pure input).
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            LoadedState::Density(rho) => rho.clone(),
            LoadedState::Pure(psi) => psi.to_density(),
        }
    }
}

enum ShapeOrState {
    Shape(String),
    State(Error),
}

impl From<Error> for ShapeOrState {
    fn from(e: Error) -> Self {
        ShapeOrState::State(e)
    }
}

fn rectangular(name: &str, rows: &[Vec<f64>]) -> Result<(usize, usize), ShapeOrState> {
    let cols = rows.first().map_or(0, Vec::len);
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(ShapeOrState::Shape(format!(
            "`{name}` is not rectangular: row {i} has {} entries, row 0 has {cols}",
            row.len()
        )));
    }
    Ok((rows.len(), cols))
}

fn build(file: &StateFile) -> Result<LoadedState, ShapeOrState> {
    let dims = BipartiteDims::new(file.d_a, file.d_b)?;
    let shape = rectangular("re", &file.re)?;
    if rectangular("im", &file.im)? != shape {
        return Err(ShapeOrState::Shape(
            "`re` and `im` have different shapes".into(),
        ));
    }
    let n = dims.total();
    let entry = |i: usize, j: usize| Complex64::new(file.re[i][j], file.im[i][j]);
    match file.kind {
        StateKind::Density => {
            if shape != (n, n) {
                return Err(ShapeOrState::Shape(format!(
                    "density matrix must be {n}x{n} for d_a={} d_b={}, got {}x{}",
                    file.d_a, file.d_b, shape.0, shape.1
                )));
            }
            let mat = HermitianMatrix::new(DMatrix::from_fn(n, n, entry))?;
            Ok(LoadedState::Density(DensityMatrix::new(mat, dims)?))
        }
        StateKind::Pure => {
            if shape != (1, n) {
                return Err(ShapeOrState::Shape(format!(
                    "pure state must be a single row of {n} amplitudes, got {}x{}",
                    shape.0, shape.1
                )));
            }
            let amps = (0..n).map(|j| entry(0, j)).collect();
            Ok(LoadedState::Pure(PureState::new(amps, dims)?))
        }
    }
}

/// Parses file contents; `path` is used only for error messages.
pub fn parse_state(text: &str, path: &Path) -> Result<LoadedState, FileError> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| FileError::Syntax {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    build(&file).map_err(|e| match e {
        ShapeOrState::Shape(message) => FileError::Shape {
            path: path.to_owned(),
            message,
        },
        ShapeOrState::State(source) => FileError::State {
            path: path.to_owned(),
            source,
        },
    })
}

pub fn load_state(path: &Path) -> Result<LoadedState, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_state(&text, path)
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix().as_matrix();
        let n = m.nrows();
        StateFile {
            d_a: rho.dims().d_a,
            d_b: rho.dims().d_b,
            kind: StateKind::Density,
            re: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        StateFile {
            d_a: psi.dims().d_a,
            d_b: psi.dims().d_b,
            kind: StateKind::Pure,
            re: vec![a.iter().map(|z| z.re).collect()],
            im: vec![a.iter().map(|z| z.im).collect()],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}
