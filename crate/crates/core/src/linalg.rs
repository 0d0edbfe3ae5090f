//! Dense complex linear algebra shared by every other module: Hermitian
//! matrices and their spectra, bipartite states, partial transposition,
//! Schmidt coefficients and the overlap with the maximally entangled state.
//!
//! Matrices are stored as `nalgebra::DMatrix<Complex64>`. Bipartite indices
//! follow the usual Kronecker layout: basis vector `(i, j)` with
//! `i < d_a`, `j < d_b` sits at flat index `i * d_b + j`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default value for every state-validation tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Relative accuracy the eigensolver is asked to reach.
pub const EIG_TOL: f64 = 1e-10;

/// Validation tolerances applied when states are constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub norm: f64,
    pub imag: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: DEFAULT_TOL,
            trace: DEFAULT_TOL,
            psd: DEFAULT_TOL,
            norm: DEFAULT_TOL,
            imag: DEFAULT_TOL,
        }
    }
}

fn check_finite<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> Result<()> {
    for (idx, z) in values.into_iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(idx));
        }
    }
    Ok(())
}

/// Square complex matrix that is Hermitian up to a relative tolerance.
///
/// On construction the stored entries are symmetrized to `(A + A^dagger)/2`,
/// so downstream code can rely on exact Hermiticity.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(mat, DEFAULT_TOL)
    }

    pub fn with_tolerance(mat: DMatrix<Complex64>, herm_tol: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        check_finite(mat.iter())?;
        let scale = mat.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
        let deviation = max_antihermitian_deviation(&mat);
        if deviation > herm_tol * scale.max(1.0) {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(HermitianMatrix {
            mat: symmetrize(mat),
        })
    }

    /// Wraps a matrix that is Hermitian by construction (e.g. `X X^dagger`).
    pub(crate) fn from_trusted(mat: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        HermitianMatrix {
            mat: symmetrize(mat),
        }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut mat = DMatrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            mat[(i, i)] = Complex64::new(v, 0.0);
        }
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.mat.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        HermitianMatrix {
            mat: &self.mat * Complex64::new(factor, 0.0),
        }
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(HermitianMatrix {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn neg(&self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

fn max_antihermitian_deviation(mat: &DMatrix<Complex64>) -> f64 {
    let n = mat.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    dev
}

fn symmetrize(mat: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = mat.adjoint();
    (mat + adj) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of a Hermitian matrix, sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the given values into descending order.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Largest eigenvalue modulus, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Eigenvalues strictly below `-threshold`, ascending (most negative first).
    pub fn negative_part(&self, threshold: f64) -> Vec<f64> {
        self.values
            .iter()
            .rev()
            .copied()
            .filter(|&v| v < -threshold)
            .collect()
    }
}

/// Eigenvectors stored as columns, aligned with `Spectrum::values`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub spectrum: Spectrum,
    pub vectors: DMatrix<Complex64>,
}

fn solve(m: &HermitianMatrix) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
    let dim = m.dim();
    SymmetricEigen::try_new(m.mat.clone(), f64::EPSILON, 200 * dim.max(10))
        .ok_or(Error::ConvergenceFailure { dim })
}

/// All eigenvalues of `m`, descending.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Spectrum> {
    let eig = solve(m)?;
    Ok(Spectrum::from_values(
        eig.eigenvalues.iter().copied().collect(),
    ))
}

/// Eigenvalues (descending) with matching unit eigenvectors.
pub fn hermitian_eigen(m: &HermitianMatrix) -> Result<Eigen> {
    let eig = solve(m)?;
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.dim(), m.dim(), |i, c| eig.eigenvectors[(i, order[c])]);
    Ok(Eigen {
        spectrum: Spectrum { values },
        vectors,
    })
}

/// Local dimensions of a bipartite system A ⊗ B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    pub d_a: usize,
    pub d_b: usize,
}

impl BipartiteDims {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 {
            return Err(Error::InvalidDimension(d_a));
        }
        if d_b == 0 {
            return Err(Error::InvalidDimension(d_b));
        }
        Ok(BipartiteDims { d_a, d_b })
    }

    pub fn total(&self) -> usize {
        self.d_a * self.d_b
    }

    fn check(&self, found: usize) -> Result<()> {
        if self.total() != found {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                found,
            });
        }
        Ok(())
    }
}

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Unit-trace positive semidefinite Hermitian matrix on A ⊗ B.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: HermitianMatrix,
    dims: BipartiteDims,
}

impl DensityMatrix {
    pub fn new(mat: HermitianMatrix, dims: BipartiteDims) -> Result<Self> {
        Self::with_tolerances(mat, dims, &Tolerances::default())
    }

    pub fn with_tolerances(
        mat: HermitianMatrix,
        dims: BipartiteDims,
        tol: &Tolerances,
    ) -> Result<Self> {
        dims.check(mat.dim())?;
        let trace = mat.trace();
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let spectrum = hermitian_eigenvalues(&mat)?;
        let min = spectrum.values().last().copied().unwrap_or(0.0);
        if min < -tol.psd {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min} is negative"
            )));
        }
        Ok(DensityMatrix { mat, dims })
    }

    /// Builds `sum_k |v_k><v_k|` from unnormalized vectors. Positive
    /// semidefinite by construction, so only the trace is checked.
    pub fn from_vectors(vectors: &[DVector<Complex64>], dims: BipartiteDims) -> Result<Self> {
        let n = dims.total();
        let mut mat = DMatrix::zeros(n, n);
        for v in vectors {
            dims.check(v.len())?;
            mat += v * v.adjoint();
        }
        let mat = HermitianMatrix::from_trusted(mat);
        let trace = mat.trace();
        if (trace - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        Ok(DensityMatrix { mat, dims })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn partial_transpose(&self, subsystem: Subsystem) -> HermitianMatrix {
        // dims were validated at construction
        partial_transpose_op(&self.mat, self.dims, subsystem).expect("validated dims")
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.mat.as_matrix().iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Transpose of the chosen tensor factor.
///
/// For `Subsystem::B` the entry at `((i,j),(k,l))` is `ρ[(i,l),(k,j)]`, for
/// `Subsystem::A` it is `ρ[(k,j),(i,l)]`.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> HermitianMatrix {
    rho.partial_transpose(subsystem)
}

/// Partial transpose of any Hermitian operator on A ⊗ B.
pub fn partial_transpose_op(
    m: &HermitianMatrix,
    dims: BipartiteDims,
    subsystem: Subsystem,
) -> Result<HermitianMatrix> {
    dims.check(m.dim())?;
    let (da, db) = (dims.d_a, dims.d_b);
    let src = m.as_matrix();
    let mut out = DMatrix::zeros(m.dim(), m.dim());
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    let (r, c) = match subsystem {
                        Subsystem::B => (i * db + l, k * db + j),
                        Subsystem::A => (k * db + j, i * db + l),
                    };
                    out[(i * db + j, k * db + l)] = src[(r, c)];
                }
            }
        }
    }
    // the partial transpose of a Hermitian operator is Hermitian; the entry
    // permutation keeps the stored data exactly symmetric
    Ok(HermitianMatrix { mat: out })
}

/// Normalized state vector on A ⊗ B.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
    dims: BipartiteDims,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, dims: BipartiteDims) -> Result<Self> {
        Self::with_tolerance(amplitudes, dims, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        amplitudes: Vec<Complex64>,
        dims: BipartiteDims,
        norm_tol: f64,
    ) -> Result<Self> {
        dims.check(amplitudes.len())?;
        check_finite(amplitudes.iter())?;
        let amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > norm_tol {
            return Err(Error::InvalidState(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(PureState { amplitudes, dims })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>, dims: BipartiteDims) -> Result<Self> {
        dims.check(amplitudes.len())?;
        check_finite(amplitudes.iter())?;
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(PureState {
            amplitudes: v.unscale(norm),
            dims,
        })
    }

    /// Product state `|a> ⊗ |b>`, normalized.
    pub fn product(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        let dims = BipartiteDims::new(a.len(), b.len())?;
        let amps = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x * y))
            .collect();
        Self::normalized(amps, dims)
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    /// |ψ⟩⟨ψ| as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: HermitianMatrix::from_trusted(&self.amplitudes * self.amplitudes.adjoint()),
            dims: self.dims,
        }
    }

    /// Amplitudes reshaped as the `d_a × d_b` coefficient matrix.
    pub fn coefficient_matrix(&self) -> DMatrix<Complex64> {
        let db = self.dims.d_b;
        DMatrix::from_fn(self.dims.d_a, db, |i, j| self.amplitudes[i * db + j])
    }

    /// Reduced density matrix of the requested factor.
    pub fn reduced(&self, keep: Subsystem) -> HermitianMatrix {
        let x = self.coefficient_matrix();
        let sigma = match keep {
            Subsystem::A => &x * x.adjoint(),
            Subsystem::B => x.transpose() * x.conjugate(),
        };
        HermitianMatrix::from_trusted(sigma)
    }
}

/// Schmidt coefficients `c_i`, descending, `min(d_a, d_b)` of them.
///
/// Computed as square roots of the eigenvalues of the smaller reduced state;
/// tiny negative eigenvalues from round-off are clamped to zero.
pub fn schmidt_coefficients(psi: &PureState) -> Result<Vec<f64>> {
    let dims = psi.dims();
    let keep = if dims.d_a <= dims.d_b {
        Subsystem::A
    } else {
        Subsystem::B
    };
    let spectrum = hermitian_eigenvalues(&psi.reduced(keep))?;
    Ok(spectrum
        .values()
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .collect())
}

/// ⟨Ψ+|ρ|Ψ+⟩ with `|Ψ+⟩ = Σ_i |ii⟩/√d`.
pub fn fidelity_max_entangled(rho: &DensityMatrix) -> Result<f64> {
    fidelity_max_entangled_with_tol(rho, DEFAULT_TOL)
}

pub fn fidelity_max_entangled_with_tol(rho: &DensityMatrix, imag_tol: f64) -> Result<f64> {
    let dims = rho.dims();
    if dims.d_a != dims.d_b {
        return Err(Error::DimensionMismatch {
            expected: dims.d_a,
            found: dims.d_b,
        });
    }
    let d = dims.d_a;
    let m = rho.matrix().as_matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += m[(i * d + i, k * d + k)];
        }
    }
    let f = acc / d as f64;
    if f.im.abs() > imag_tol {
        return Err(Error::InvalidState(format!(
            "overlap has imaginary part {}",
            f.im
        )));
    }
    Ok(f.re.clamp(0.0, 1.0))
}

/// Modified Gram-Schmidt on the columns of `m`, with each column phase chosen
/// so the diagonal of the implied R factor is real and positive.
pub(crate) fn orthonormalize_columns(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut q = m.clone();
    for c in 0..q.ncols() {
        for prev in 0..c {
            let proj = q.column(prev).dotc(&q.column(c));
            let prev_col = q.column(prev).clone_owned();
            q.column_mut(c)
                .axpy(-proj, &prev_col, Complex64::new(1.0, 0.0));
        }
        let norm = q.column(c).norm();
        q.column_mut(c).unscale_mut(norm);
    }
    q
}
