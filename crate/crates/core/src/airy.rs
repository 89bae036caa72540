//! Simulated ground truth: a divergence-free stress field generated from an
//! Airy potential on a masked domain, plus the matching strain.
//!
//! The potential is
//! `phi(x1, x2) = x1 sin(3 x1 x2^2) exp(x1 x2^2) + x2 cos(x1^3)`
//! and the stress is built from its second derivatives,
//! `sigma = chi [[phi_22, -phi_12], [-phi_12, phi_11]]`,
//! which is divergence-free inside the domain for any potential.

use crate::boundary::BoundaryPolyline;
use crate::elastic::{hooke_stress_to_strain, ElasticConstants};
use crate::error::Result;
use crate::grid::{Grid2, SymTensorField2};
use crate::mask::{mask_field, Mask};

/// Closed-form stress `(s11, s12, s22)` of the Airy potential at a point.
/// `s11 = phi_22`, `s12 = -phi_12`, `s22 = phi_11`, all hand-differentiated
/// (cross-checked against an automatic-differentiation oracle in the tests).
pub fn airy_stress_at(x: f64, y: f64) -> (f64, f64, f64) {
    let w = x * y * y;
    let ew = w.exp();
    let (s, c) = (3.0 * w).sin_cos();
    let (sx3, cx3) = (x * x * x).sin_cos();

    // phi_22
    let s11 = 2.0 * x * x * ew * (s + 3.0 * c + w * (12.0 * c - 16.0 * s));
    // phi_11
    let s22 = y * (-9.0 * x.powi(4) * cx3 - 6.0 * x * sx3
        + ew * (x * y * y * y * (6.0 * c - 8.0 * s) + 2.0 * y * s + 6.0 * y * c));
    // -phi_12
    let s12 = -x * (ew * (x * y * y * y * (12.0 * c - 16.0 * s) + 4.0 * y * s + 12.0 * y * c)
        - 3.0 * x * sx3);
    (s11, s12, s22)
}

/// Airy stress and strain phantom masked to the boundary.
///
/// The stress is evaluated analytically at pixel centres and multiplied by
/// the characteristic function of the boundary; the strain follows from
/// Hooke's law and inherits the mask pointwise.
pub fn airy_phantom(
    grid: Grid2,
    boundary: &BoundaryPolyline,
    constants: &ElasticConstants,
) -> Result<(SymTensorField2, SymTensorField2)> {
    let mask = Mask::from_boundary(grid, boundary)?;
    let stress = SymTensorField2::from_fn(grid, airy_stress_at);
    let stress = mask_field(&stress, &mask)?;
    let strain = hooke_stress_to_strain(&stress, constants);
    Ok((stress, strain))
}
