//! Reconstruction of 2D elastic strain tensor fields from their longitudinal
//! ray transform (LRT).
//!
//! The LRT of a symmetric rank-2 field only determines its solenoidal part;
//! the potential part `d u` is invisible. For elastic strain fields the
//! missing part can still be recovered because strain satisfies mechanical
//! equilibrium. The pipeline implemented here:
//!
//! 1. invert the sinogram with tensor filtered back-projection to get the
//!    solenoidal part `s_eps` ([`lrt::invert_solenoidal_2d`]),
//! 2. form the equilibrium body force `b = -Div(C : s_eps)` with spectral
//!    derivatives ([`elastic::body_force_rhs`]),
//! 3. re-project the masked `s_eps` and subtract from the data to obtain the
//!    residual sinogram, which encodes boundary displacements,
//! 4. recover the boundary displacement from the residual by a minimum-norm
//!    least-squares solve ([`recover`]),
//! 5. solve the elastic boundary-value problem `Div(C : du) = b` with the
//!    recovered Dirichlet data ([`fem::solve_potential`]),
//! 6. reconstruct `eps = s_eps + du`.
//!
//! [`pipeline::reconstruct`] runs the whole chain; the individual stages are
//! usable on their own.

pub mod airy;
pub mod boundary;
pub mod elastic;
pub mod error;
pub mod fem;
pub mod grid;
pub mod helmholtz;
pub mod lrt;
pub mod mask;
pub mod mesh;
pub mod metrics;
pub mod pipeline;
pub mod recover;
pub mod sinogram;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
pub use grid::{Grid2, SymTensorField2, VectorField2};
