//! Two-atom Tavis-Cummings dynamics.
//!
//! Two two-level atoms, both excited, interact resonantly with one field
//! mode prepared in a coherent state:
//!
//! `H = g Σ_{k=1,2} (a σ_k⁺ + a† σ_k⁻)`.
//!
//! `H` conserves the excitation number `a†a + σ₁⁺σ₁⁻ + σ₂⁺σ₂⁻`, so it splits
//! into blocks spanned by `{|ee,K−2⟩, |eg,K−1⟩, |ge,K−1⟩, |gg,K⟩}` (fewer
//! states at the edges of the Fock truncation). Each block is diagonalized
//! once and exponentiated exactly.
//!
//! Basis layout: `index = (a1·2 + a2)·(n_max+1) + n` with `g = 0`, `e = 1`.
//! Read as a bipartite state, atom 1 is factor A and (atom 2, field) is B.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, BipartiteDims, DensityMatrix, HermitianMatrix,
    PureState,
};
use crate::monotones::tangle_lower_bound;

const GROUND: usize = 0;
const EXCITED: usize = 1;

/// Eigenvalues of ρ_af above this count towards its rank.
pub const RANK_TOL: f64 = 1e-10;

/// Largest population tolerated in the two highest Fock levels.
pub const LEAKAGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TcmConfig {
    pub g: f64,
    pub nbar: f64,
    pub n_max: usize,
    /// Evolution times, in units of the inverse coupling scale of `g`.
    pub t_grid: Vec<f64>,
}

impl TcmConfig {
    /// `steps` equally spaced times from 0 to `t_max` inclusive.
    pub fn uniform(g: f64, nbar: f64, n_max: usize, t_max: f64, steps: usize) -> Self {
        let t_grid = match steps {
            0 => Vec::new(),
            1 => vec![0.0],
            _ => (0..steps)
                .map(|k| t_max * k as f64 / (steps - 1) as f64)
                .collect(),
        };
        TcmConfig {
            g,
            nbar,
            n_max,
            t_grid,
        }
    }

    /// ⟨n⟩ = 100 with 1000 points on gt ∈ [0, 50], long enough to show a collapse and a revival.
    pub fn collapse_revival() -> Self {
        Self::uniform(1.0, 100.0, 200, 50.0, 1000)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::InvalidConfig(format!("coupling g = {}", self.g)));
        }
        if !(self.nbar >= 0.0) || !self.nbar.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "mean photon number {}",
                self.nbar
            )));
        }
        let needed = self.nbar + 6.0 * self.nbar.sqrt();
        if (self.n_max as f64) < needed {
            return Err(Error::TruncationInadequate(format!(
                "n_max = {} < nbar + 6 sqrt(nbar) = {needed:.2}",
                self.n_max
            )));
        }
        if self.t_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidConfig("times must be finite and >= 0".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    fn fock_dim(&self) -> usize {
        self.n_max + 1
    }
}

/// Fock amplitudes of the coherent state `|α⟩`, truncated at `n_max` and
/// renormalized. Built by `c_{n+1} = c_n α/√(n+1)` from `c_0 = e^{−α²/2}`.
pub fn coherent_state(alpha: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidConfig(format!("coherent amplitude {alpha}")));
    }
    if alpha * alpha > 1400.0 {
        return Err(Error::InvalidConfig(format!(
            "coherent amplitude {alpha} too large for direct recurrence"
        )));
    }
    let mut amps = Vec::with_capacity(n_max + 1);
    let mut c = (-alpha * alpha / 2.0).exp();
    amps.push(c);
    for n in 0..n_max {
        c *= alpha / ((n + 1) as f64).sqrt();
        amps.push(c);
    }
    let weight: f64 = amps.iter().map(|c| c * c).sum();
    if weight < 1.0 - 1e-6 {
        return Err(Error::TruncationInadequate(format!(
            "coherent state with alpha = {alpha} keeps only {weight} of its norm below n = {n_max}"
        )));
    }
    let norm = weight.sqrt();
    Ok(amps.into_iter().map(|c| c / norm).collect())
}

fn basis_index(fock: usize, a1: usize, a2: usize, n: usize) -> usize {
    (a1 * 2 + a2) * fock + n
}

struct Block {
    indices: Vec<usize>,
    energies: Vec<f64>,
    vectors: DMatrix<Complex64>,
    /// Initial state expressed in the block eigenbasis.
    initial: DVector<Complex64>,
}

/// Block-diagonalized propagator for a fixed configuration.
pub struct TcmEvolver {
    fock: usize,
    blocks: Vec<Block>,
    initial: DVector<Complex64>,
}

impl TcmEvolver {
    /// Both atoms excited, field coherent with `|α|² = nbar`.
    pub fn new(cfg: &TcmConfig) -> Result<Self> {
        cfg.validate()?;
        let fock = cfg.fock_dim();
        let field = coherent_state(cfg.nbar.sqrt(), cfg.n_max)?;
        let mut initial = DVector::zeros(4 * fock);
        for (n, c) in field.iter().enumerate() {
            initial[basis_index(fock, EXCITED, EXCITED, n)] = Complex64::new(*c, 0.0);
        }
        Self::build(cfg, initial)
    }

    /// Same Hamiltonian, arbitrary initial state on the `2 ⊗ 2(n_max+1)` space.
    pub fn with_initial_state(cfg: &TcmConfig, initial: &PureState) -> Result<Self> {
        cfg.validate()?;
        let dims = BipartiteDims::new(2, 2 * cfg.fock_dim())?;
        if initial.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: initial.dims().total(),
            });
        }
        Self::build(cfg, initial.amplitudes().clone())
    }

    fn build(cfg: &TcmConfig, initial: DVector<Complex64>) -> Result<Self> {
        let fock = cfg.fock_dim();

        let mut blocks = Vec::new();
        for k in 0..=cfg.n_max + 2 {
            // (a1, a2, n) with n + a1 + a2 = k and n <= n_max
            let members: Vec<(usize, usize, usize)> = [
                (EXCITED, EXCITED),
                (EXCITED, GROUND),
                (GROUND, EXCITED),
                (GROUND, GROUND),
            ]
            .into_iter()
            .filter_map(|(a1, a2)| {
                let n = k.checked_sub(a1 + a2)?;
                (n <= cfg.n_max).then_some((a1, a2, n))
            })
            .collect();
            let size = members.len();
            let mut h = DMatrix::zeros(size, size);
            for (row, &(a1, a2, n)) in members.iter().enumerate() {
                for (col, &(b1, b2, m)) in members.iter().enumerate() {
                    // a σ_k⁺ lowers the photon number by one and raises atom k
                    let one_flip = (a1 + a2) == (b1 + b2) + 1
                        && ((a1 == EXCITED && b1 == GROUND && a2 == b2)
                            || (a2 == EXCITED && b2 == GROUND && a1 == b1));
                    if one_flip && m == n + 1 {
                        let amp = cfg.g * (m as f64).sqrt();
                        h[(row, col)] = Complex64::new(amp, 0.0);
                        h[(col, row)] = Complex64::new(amp, 0.0);
                    }
                }
            }
            let eig = hermitian_eigen(&HermitianMatrix::new(h)?)?;
            let indices: Vec<usize> = members
                .iter()
                .map(|&(a1, a2, n)| basis_index(fock, a1, a2, n))
                .collect();
            let local = DVector::from_iterator(size, indices.iter().map(|&i| initial[i]));
            blocks.push(Block {
                initial: eig.vectors.adjoint() * local,
                energies: eig.spectrum.values().to_vec(),
                vectors: eig.vectors,
                indices,
            });
        }
        Ok(TcmEvolver {
            fock,
            blocks,
            initial,
        })
    }

    pub fn dims(&self) -> BipartiteDims {
        BipartiteDims {
            d_a: 2,
            d_b: 2 * self.fock,
        }
    }

    pub fn fock_dim(&self) -> usize {
        self.fock
    }

    pub fn initial_state(&self) -> PureState {
        PureState::new(self.initial.iter().copied().collect(), self.dims())
            .expect("coherent amplitudes are normalized")
    }

    /// `exp(−iHt)|ψ(0)⟩`.
    pub fn state_at(&self, t: f64) -> Result<PureState> {
        if t == 0.0 {
            return Ok(self.initial_state());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 4 * self.fock];
        for block in &self.blocks {
            let phased = DVector::from_iterator(
                block.energies.len(),
                block
                    .energies
                    .iter()
                    .zip(block.initial.iter())
                    .map(|(e, c)| c * Complex64::from_polar(1.0, -e * t)),
            );
            let local = &block.vectors * phased;
            for (i, v) in block.indices.iter().zip(local.iter()) {
                out[*i] = *v;
            }
        }
        let state = PureState::new(out, self.dims())?;
        let leak = self.top_level_population(&state);
        if leak > LEAKAGE_TOL {
            return Err(Error::TruncationInadequate(format!(
                "population {leak:.3e} in the two highest Fock levels at t = {t}"
            )));
        }
        Ok(state)
    }

    fn top_level_population(&self, state: &PureState) -> f64 {
        let amps = state.amplitudes();
        let mut pop = 0.0;
        for atoms in 0..4 {
            for n in self.fock.saturating_sub(2)..self.fock {
                pop += amps[atoms * self.fock + n].norm_sqr();
            }
        }
        pop
    }

    /// ⟨a†a + σ₁⁺σ₁⁻ + σ₂⁺σ₂⁻⟩.
    pub fn excitation_number(&self, state: &PureState) -> f64 {
        let amps = state.amplitudes();
        let mut total = 0.0;
        for a1 in 0..2 {
            for a2 in 0..2 {
                for n in 0..self.fock {
                    total +=
                        (n + a1 + a2) as f64 * amps[basis_index(self.fock, a1, a2, n)].norm_sqr();
                }
            }
        }
        total
    }
}

/// Total states at every time of `cfg.t_grid`.
pub fn evolve(cfg: &TcmConfig) -> Result<Vec<PureState>> {
    let evolver = TcmEvolver::new(cfg)?;
    cfg.t_grid.iter().map(|&t| evolver.state_at(t)).collect()
}

/// Conditional (unnormalized) states of atom 2 and the field for each
/// basis state of atom 1.
fn atom_field_vectors(total: &PureState) -> Result<[DVector<Complex64>; 2]> {
    let dims = total.dims();
    if dims.d_a != 2 || !dims.d_b.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: dims.d_a,
        });
    }
    let amps = total.amplitudes();
    let half = dims.d_b;
    Ok([
        amps.rows(0, half).clone_owned(),
        amps.rows(half, half).clone_owned(),
    ])
}

/// Traces out atom 1, leaving atom 2 ⊗ field with dims `(2, n_max + 1)`.
pub fn reduce_atom_field(total: &PureState) -> Result<DensityMatrix> {
    let vectors = atom_field_vectors(total)?;
    let dims = BipartiteDims::new(2, total.dims().d_b / 2)?;
    DensityMatrix::from_vectors(&vectors, dims)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TcmRow {
    pub gt: f64,
    pub n2pt: f64,
    pub rank: usize,
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcmTrace {
    pub rows: Vec<TcmRow>,
}

/// Rank, purity and tangle bound of ρ_af, computed without forming it.
///
/// ρ_af = Σ_k |φ_k⟩⟨φ_k| has rank ≤ 2, and its nonzero spectrum is that of
/// the 2×2 Gram matrix of the φ_k. Its partial transpose over the field is
/// supported on atom ⊗ span{field components of φ_k} (dimension ≤ 4), so the
/// bound is evaluated on that compressed 2 × q state, which has the same
/// nonzero partial-transpose spectrum.
pub fn atom_field_summary(total: &PureState) -> Result<(f64, usize, f64)> {
    let phis = atom_field_vectors(total)?;
    let gram = DMatrix::from_fn(2, 2, |k, l| phis[k].dotc(&phis[l]));
    let gram_spec = hermitian_eigenvalues(&HermitianMatrix::new(gram.clone())?)?;
    let rank = gram_spec.values().iter().filter(|&&v| v > RANK_TOL).count();
    let purity = gram.iter().map(|z| z.norm_sqr()).sum();

    let fock = total.dims().d_b / 2;
    let components: Vec<DVector<Complex64>> = phis
        .iter()
        .flat_map(|phi| {
            [
                phi.rows(0, fock).clone_owned(),
                phi.rows(fock, fock).clone_owned(),
            ]
        })
        .collect();
    let scale = components.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()));
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for v in &components {
        let mut w = v.clone();
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let norm = w.norm();
        if norm > 1e-12 * scale.max(1e-300) {
            basis.push(w.unscale(norm));
        }
    }
    let q = basis.len();
    let compressed: Vec<DVector<Complex64>> = phis
        .iter()
        .map(|phi| {
            DVector::from_fn(2 * q, |idx, _| {
                let (atom, j) = (idx / q, idx % q);
                basis[j].dotc(&phi.rows(atom * fock, fock).clone_owned())
            })
        })
        .collect();
    let rho = DensityMatrix::from_vectors(&compressed, BipartiteDims::new(2, q.max(1))?)?;
    let n2pt = tangle_lower_bound(&rho)?;
    Ok((n2pt, rank, purity))
}

/// N₂^pt(ρ_af), rank and purity over the time grid.
pub fn run_trace(cfg: &TcmConfig) -> Result<TcmTrace> {
    let evolver = TcmEvolver::new(cfg)?;
    let rows = cfg
        .t_grid
        .iter()
        .map(|&t| {
            let state = evolver.state_at(t)?;
            let (n2pt, rank, purity) = atom_field_summary(&state)?;
            Ok(TcmRow {
                gt: cfg.g * t,
                n2pt,
                rank,
                purity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TcmTrace { rows })
}
