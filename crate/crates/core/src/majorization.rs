//! Majorization predicates and the componentwise maps `x ↦ x⁺`, `x ↦ x^p`.
//!
//! `majorizes(y, x)` reads "x ≺ y": every prefix sum of `x↓` is bounded by
//! the matching prefix sum of `y↓` and the totals agree. Dropping the total
//! condition gives weak submajorization `x ≺_w y`.

use crate::error::{Error, Result};

/// Absolute tolerance on prefix sums.
pub const MAJ_TOL: f64 = 1e-9;

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn check_lengths(y: &[f64], x: &[f64]) -> Result<()> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    Ok(())
}

fn prefix_dominated(y: &[f64], x: &[f64], tol: f64) -> bool {
    let (ys, xs) = (sorted_desc(y), sorted_desc(x));
    let mut sy = 0.0;
    let mut sx = 0.0;
    ys.iter().zip(&xs).all(|(a, b)| {
        sy += a;
        sx += b;
        sx <= sy + tol
    })
}

/// `x ≺ y`.
pub fn majorizes(y: &[f64], x: &[f64]) -> Result<bool> {
    majorizes_with_tol(y, x, MAJ_TOL)
}

pub fn majorizes_with_tol(y: &[f64], x: &[f64], tol: f64) -> Result<bool> {
    check_lengths(y, x)?;
    let total_gap = (y.iter().sum::<f64>() - x.iter().sum::<f64>()).abs();
    Ok(total_gap <= tol && prefix_dominated(y, x, tol))
}

/// `x ≺_w y`.
pub fn weakly_submajorizes(y: &[f64], x: &[f64]) -> Result<bool> {
    weakly_submajorizes_with_tol(y, x, MAJ_TOL)
}

pub fn weakly_submajorizes_with_tol(y: &[f64], x: &[f64], tol: f64) -> Result<bool> {
    check_lengths(y, x)?;
    Ok(prefix_dominated(y, x, tol))
}

/// Componentwise `max(x_i, 0)`, order preserved.
pub fn positive_part(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// Componentwise `x_i^p` on a non-negative vector, `p ≥ 1`.
pub fn pth_power(x: &[f64], p: f64) -> Result<Vec<f64>> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidOrder(p));
    }
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeEntry { index, value });
    }
    Ok(x.iter().map(|&v| v.powf(p)).collect())
}

/// Entries ≥ -tol and unit row and column sums within tol.
pub fn is_doubly_stochastic(a: &[Vec<f64>]) -> Result<bool> {
    let n = a.len();
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            cols: row.len(),
        });
    }
    let non_negative = a.iter().flatten().all(|&v| v >= -MAJ_TOL);
    let rows_ok = a
        .iter()
        .all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= MAJ_TOL);
    let cols_ok = (0..n).all(|j| (a.iter().map(|r| r[j]).sum::<f64>() - 1.0).abs() <= MAJ_TOL);
    Ok(non_negative && rows_ok && cols_ok)
}

/// Matrix-vector product for plain nested-vector matrices.
pub fn apply(a: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    a.iter()
        .map(|row| {
            check_lengths(row, y)?;
            Ok(row.iter().zip(y).map(|(r, v)| r * v).sum())
        })
        .collect()
}
