//! Isotropic linear elasticity: Hooke's law in plane stress / plane strain
//! and the equilibrium body force driving the potential-part solve.

use crate::error::{Error, Result};
use crate::grid::{SymTensorField2, VectorField2};
use crate::spectral::{fourier_derivative_padded, Axis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    PlaneStress,
    PlaneStrain,
}

impl Regime {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "plane_stress" => Ok(Regime::PlaneStress),
            "plane_strain" => Ok(Regime::PlaneStrain),
            other => Err(Error::InvalidConstants(format!(
                "unknown regime `{other}` (expected plane_stress or plane_strain)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::PlaneStress => "plane_stress",
            Regime::PlaneStrain => "plane_strain",
        }
    }
}

/// Young's modulus, Poisson's ratio and the 2D embedding regime.
///
/// The plane-strain variant is provided for completeness; the simulated
/// experiments all use plane stress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticConstants {
    pub e: f64,
    pub nu: f64,
    pub regime: Regime,
}

impl ElasticConstants {
    pub fn new(e: f64, nu: f64, regime: Regime) -> Result<Self> {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::InvalidConstants(format!(
                "Young's modulus must be positive, got {e}"
            )));
        }
        if !(nu > -1.0 && nu < 0.5) {
            return Err(Error::InvalidConstants(format!(
                "Poisson's ratio must lie in (-1, 0.5), got {nu}"
            )));
        }
        Ok(ElasticConstants { e, nu, regime })
    }

    /// Stiffness in Voigt form: `(s11, s22, s12) = D (e11, e22, 2 e12)`.
    /// Returns `(d11, d12, d33)` with `D = [[d11, d12, 0], [d12, d11, 0],
    /// [0, 0, d33]]`.
    pub fn stiffness(&self) -> (f64, f64, f64) {
        let (e, nu) = (self.e, self.nu);
        match self.regime {
            Regime::PlaneStress => {
                let c = e / (1.0 - nu * nu);
                (c, c * nu, 0.5 * e / (1.0 + nu))
            }
            Regime::PlaneStrain => {
                let c = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
                (c * (1.0 - nu), c * nu, 0.5 * e / (1.0 + nu))
            }
        }
    }

    /// Pointwise stress -> strain.
    pub fn strain_of_stress(&self, s11: f64, s12: f64, s22: f64) -> (f64, f64, f64) {
        let (e, nu) = (self.e, self.nu);
        match self.regime {
            Regime::PlaneStress => (
                (s11 - nu * s22) / e,
                (1.0 + nu) * s12 / e,
                (-nu * s11 + s22) / e,
            ),
            Regime::PlaneStrain => (
                (1.0 + nu) / e * ((1.0 - nu) * s11 - nu * s22),
                (1.0 + nu) * s12 / e,
                (1.0 + nu) / e * (-nu * s11 + (1.0 - nu) * s22),
            ),
        }
    }

    /// Pointwise strain -> stress; exact algebraic inverse of
    /// [`Self::strain_of_stress`].
    pub fn stress_of_strain(&self, e11: f64, e12: f64, e22: f64) -> (f64, f64, f64) {
        let (d11, d12, d33) = self.stiffness();
        (
            d11 * e11 + d12 * e22,
            2.0 * d33 * e12,
            d12 * e11 + d11 * e22,
        )
    }
}

/// Hooke's law applied pixelwise: stress field -> strain field.
pub fn hooke_stress_to_strain(
    stress: &SymTensorField2,
    constants: &ElasticConstants,
) -> SymTensorField2 {
    let mut out = SymTensorField2::zeros(stress.grid);
    for k in 0..stress.grid.len() {
        let (a, b, c) = constants.strain_of_stress(stress.e11[k], stress.e12[k], stress.e22[k]);
        out.e11[k] = a;
        out.e12[k] = b;
        out.e22[k] = c;
    }
    out
}

/// Hooke's law applied pixelwise: strain field -> stress field.
pub fn hooke_strain_to_stress(
    strain: &SymTensorField2,
    constants: &ElasticConstants,
) -> SymTensorField2 {
    let mut out = SymTensorField2::zeros(strain.grid);
    for k in 0..strain.grid.len() {
        let (a, b, c) = constants.stress_of_strain(strain.e11[k], strain.e12[k], strain.e22[k]);
        out.e11[k] = a;
        out.e12[k] = b;
        out.e22[k] = c;
    }
    out
}

/// Equilibrium body force `b = -Div(C : s_eps)`.
///
/// In plane stress this is
/// `b1 = -E/(1-nu^2) (d1 e11 + nu d1 e22 + (1-nu) d2 e12)`,
/// `b2 = -E/(1-nu^2) (nu d2 e11 + d2 e22 + (1-nu) d1 e12)`,
/// computed here by differentiating the stress components spectrally. The
/// derivatives act on the full (unmasked) field with zero padding, so the
/// boundary jump of the masked field never enters; the result is meant to be
/// sampled at interior quadrature points only.
pub fn body_force_rhs(s_eps: &SymTensorField2, constants: &ElasticConstants) -> VectorField2 {
    let mut stress = hooke_strain_to_stress(s_eps, constants);
    let grid = stress.grid;
    // Constant offsets carry no force but would turn into a jump at the zero
    // padding boundary. Removing the mean of the outermost pixel ring makes
    // the zero extension as continuous as a constant shift can, and constant
    // fields differentiate to exactly zero.
    let ring: Vec<usize> = (0..grid.len())
        .filter(|k| {
            let (ix, iy) = (k % grid.nx, k / grid.nx);
            ix == 0 || iy == 0 || ix == grid.nx - 1 || iy == grid.ny - 1
        })
        .collect();
    for comp in stress.components_mut() {
        let edge_mean = ring.iter().map(|&k| comp[k]).sum::<f64>() / ring.len() as f64;
        comp.iter_mut().for_each(|v| *v -= edge_mean);
    }
    let d1_s11 = fourier_derivative_padded(&grid, &stress.e11, Axis::X1);
    let d2_s12 = fourier_derivative_padded(&grid, &stress.e12, Axis::X2);
    let d1_s12 = fourier_derivative_padded(&grid, &stress.e12, Axis::X1);
    let d2_s22 = fourier_derivative_padded(&grid, &stress.e22, Axis::X2);

    let mut b = VectorField2::zeros(grid);
    for k in 0..grid.len() {
        b.u1[k] = -(d1_s11[k] + d2_s12[k]);
        b.u2[k] = -(d1_s12[k] + d2_s22[k]);
    }
    b
}
