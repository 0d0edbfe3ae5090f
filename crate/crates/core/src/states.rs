//! Isotropic states `ρ_F = (1−λ) I⊗I/d² + λ |Ψ+⟩⟨Ψ+|` and the closed forms
//! of their partial-transpose spectrum and concurrence/tangle bounds.
//!
//! The closed forms never build the `d² × d²` matrix, so they are usable for
//! any `d`; `isotropic_state` is only needed for numerical cross-checks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{BipartiteDims, DensityMatrix, HermitianMatrix, PureState};

/// Dimension and fidelity of an isotropic state. The mixing weight λ is
/// derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicParams {
    d: usize,
    fidelity: f64,
    mixing: f64,
}

impl IsotropicParams {
    pub fn new(d: usize, fidelity: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::InvalidFidelity(fidelity));
        }
        let d2 = (d * d) as f64;
        Ok(IsotropicParams {
            d,
            fidelity,
            mixing: (d2 * fidelity - 1.0) / (d2 - 1.0),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }

    /// λ = (d²F − 1)/(d² − 1).
    pub fn lambda(&self) -> f64 {
        self.mixing
    }

    /// True on the separable side `F ≤ 1/d` (closed boundary).
    pub fn is_ppt(&self) -> bool {
        self.fidelity <= 1.0 / self.d as f64
    }
}

/// `|Ψ+⟩ = Σ_i |ii⟩/√d`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        amps[i * d + i] = amp;
    }
    PureState::new(amps, BipartiteDims::new(d, d)?)
}

pub fn isotropic_state(p: &IsotropicParams) -> Result<DensityMatrix> {
    let d = p.d;
    let n = d * d;
    let lambda = p.lambda();
    let mut mat =
        DMatrix::from_diagonal_element(n, n, Complex64::new((1.0 - lambda) / n as f64, 0.0));
    let w = Complex64::new(lambda / d as f64, 0.0);
    for i in 0..d {
        for k in 0..d {
            mat[(i * d + i, k * d + k)] += w;
        }
    }
    DensityMatrix::new(HermitianMatrix::new(mat)?, BipartiteDims::new(d, d)?)
}

/// Spectrum of `ρ_F^pt` as `(eigenvalue, multiplicity)`:
/// `(1−λ)/d² + λ/d` on the symmetric subspace, `(1−λ)/d² − λ/d` on the
/// antisymmetric one.
pub fn isotropic_pt_spectrum(p: &IsotropicParams) -> [(f64, usize); 2] {
    let d = p.d as f64;
    let lambda = p.lambda();
    let base = (1.0 - lambda) / (d * d);
    [
        (base + lambda / d, p.d * (p.d + 1) / 2),
        (base - lambda / d, p.d * (p.d - 1) / 2),
    ]
}

/// Closed-form `M_2^pt(ρ_F)`:
/// `(2/d)((λ−1)/d + λ)·√(d(d−1)/2)` above the threshold, 0 for `F ≤ 1/d`.
pub fn isotropic_m2pt(p: &IsotropicParams) -> f64 {
    if p.is_ppt() {
        return 0.0;
    }
    let d = p.d as f64;
    let lambda = p.lambda();
    let value = (2.0 / d) * ((lambda - 1.0) / d + lambda) * (d * (d - 1.0) / 2.0).sqrt();
    value.max(0.0)
}

/// Closed-form `N_2^pt(ρ_F) = M_2^pt(ρ_F)²`.
pub fn isotropic_n2pt(p: &IsotropicParams) -> f64 {
    isotropic_m2pt(p).powi(2)
}
