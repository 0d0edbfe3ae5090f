//! The `M_p` / `N_p` family on Hermitian matrices and the entanglement
//! measures built from it.
//!
//! `M_p(A)` is the p-norm of the negative part of the spectrum of `A`,
//! `N_p(A) = M_p(A)^p`. Applied to a partial transpose, `p = 1` gives the
//! negativity and `2·M_2(ρ^pt)` is a convex function that coincides with the
//! pure-state concurrence, hence a lower bound on the I-concurrence; its
//! square bounds the I-tangle from below.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, schmidt_coefficients, DensityMatrix, HermitianMatrix, PureState,
    Spectrum, Subsystem,
};

/// Relative threshold under which negative eigenvalues are treated as zero.
pub const NEG_REL_TOL: f64 = 1e-10;

/// Exponent `p ≥ 1` of the monotone family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneOrder(f64);

impl MonotoneOrder {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidOrder(p));
        }
        Ok(MonotoneOrder(p))
    }

    pub const ONE: MonotoneOrder = MonotoneOrder(1.0);
    pub const TWO: MonotoneOrder = MonotoneOrder(2.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub p: f64,
    pub m_value: f64,
    pub n_value: f64,
    pub negative_eigenvalues: Vec<f64>,
    pub neg_count: usize,
}

/// Negative-eigenvalue cut-off for a spectrum: `1e-10 · max(1, ‖A‖₂)`.
pub fn neg_threshold(spectrum: &Spectrum) -> f64 {
    NEG_REL_TOL * spectrum.spectral_norm().max(1.0)
}

/// Eigenvalues of `spectrum` that count as negative.
pub fn negative_eigenvalues(spectrum: &Spectrum) -> Vec<f64> {
    spectrum.negative_part(neg_threshold(spectrum))
}

/// `M_p` evaluated on an already computed spectrum.
pub fn m_p_of_spectrum(spectrum: &Spectrum, order: MonotoneOrder) -> f64 {
    let p = order.value();
    let sum: f64 = negative_eigenvalues(spectrum)
        .iter()
        .map(|v| v.abs().powf(p))
        .sum();
    if sum == 0.0 {
        0.0
    } else {
        sum.powf(1.0 / p)
    }
}

pub fn m_p(a: &HermitianMatrix, order: MonotoneOrder) -> Result<f64> {
    Ok(m_p_of_spectrum(&hermitian_eigenvalues(a)?, order))
}

pub fn n_p(a: &HermitianMatrix, order: MonotoneOrder) -> Result<f64> {
    Ok(m_p(a, order)?.powf(order.value()))
}

pub fn monotone_report(a: &HermitianMatrix, order: MonotoneOrder) -> Result<MonotoneReport> {
    let spectrum = hermitian_eigenvalues(a)?;
    let negative = negative_eigenvalues(&spectrum);
    let m_value = m_p_of_spectrum(&spectrum, order);
    Ok(MonotoneReport {
        p: order.value(),
        m_value,
        n_value: m_value.powf(order.value()),
        neg_count: negative.len(),
        negative_eigenvalues: negative,
    })
}

/// Absolute sum of the negative eigenvalues of `ρ^{T_B}`.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    m_p(&rho.partial_transpose(Subsystem::B), MonotoneOrder::ONE)
}

/// `2 · M_2(ρ^{T_B})`.
pub fn concurrence_lower_bound(rho: &DensityMatrix) -> Result<f64> {
    Ok(2.0 * m_p(&rho.partial_transpose(Subsystem::B), MonotoneOrder::TWO)?)
}

/// `[2 · M_2(ρ^{T_B})]²`.
pub fn tangle_lower_bound(rho: &DensityMatrix) -> Result<f64> {
    Ok(concurrence_lower_bound(rho)?.powi(2))
}

/// Concurrence from Schmidt coefficients: `2 (Σ_{i<j} c_i² c_j²)^{1/2}`.
///
/// The pair sum is evaluated as `((Σ c_i²)² − Σ c_i⁴) / 2`.
pub fn concurrence_from_schmidt(coeffs: &[f64]) -> f64 {
    let s2: f64 = coeffs.iter().map(|c| c * c).sum();
    let s4: f64 = coeffs.iter().map(|c| c.powi(4)).sum();
    (2.0 * (s2 * s2 - s4)).max(0.0).sqrt()
}

pub fn pure_concurrence(psi: &PureState) -> Result<f64> {
    Ok(concurrence_from_schmidt(&schmidt_coefficients(psi)?))
}

pub fn pure_tangle(psi: &PureState) -> Result<f64> {
    Ok(pure_concurrence(psi)?.powi(2))
}
