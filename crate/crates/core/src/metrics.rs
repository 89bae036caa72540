//! Error metrics used by the convergence experiments.

use crate::error::{Error, Result};
use crate::grid::SymTensorField2;
use crate::mask::Mask;

/// Frobenius norm of a symmetric rank-2 tensor; the off-diagonal entry
/// appears twice in the full matrix.
#[inline]
pub fn frobenius(e11: f64, e12: f64, e22: f64) -> f64 {
    (e11 * e11 + 2.0 * e12 * e12 + e22 * e22).sqrt()
}

/// Relative reconstruction error over the masked domain:
/// `sum χ ||recon - truth||_F / sum χ ||truth||_F`. The pixel area cancels
/// between numerator and denominator.
pub fn relative_error(recon: &SymTensorField2, truth: &SymTensorField2, mask: &Mask) -> Result<f64> {
    if recon.grid != truth.grid || recon.grid != mask.grid {
        return Err(Error::InvalidField("grid mismatch in relative_error".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..recon.grid.len() {
        if !mask.is_inside(k) {
            continue;
        }
        num += frobenius(
            recon.e11[k] - truth.e11[k],
            recon.e12[k] - truth.e12[k],
            recon.e22[k] - truth.e22[k],
        );
        den += frobenius(truth.e11[k], truth.e12[k], truth.e22[k]);
    }
    if den == 0.0 {
        return Err(Error::ZeroTruthNorm);
    }
    Ok(num / den)
}

/// Integrated Frobenius mass of a field over the masked domain.
pub fn frobenius_mass(field: &SymTensorField2, mask: &Mask) -> f64 {
    (0..field.grid.len())
        .filter(|&k| mask.is_inside(k))
        .map(|k| frobenius(field.e11[k], field.e12[k], field.e22[k]))
        .sum()
}
