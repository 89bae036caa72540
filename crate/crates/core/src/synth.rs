//! Synthetic analytic fields used by the diagnostic experiments and tests:
//! a compactly supported potential field with its exact symmetric gradient,
//! a smooth displacement for boundary-recovery checks, and an exactly
//! solenoidal phantom obtained by spectral projection.

use crate::boundary::BoundaryPolyline;
use crate::grid::{Grid2, SymTensorField2, VectorField2};
use crate::helmholtz::solenoidal_part;

/// Support radius of the compactly supported bump displacement.
pub const BUMP_RADIUS: f64 = 0.8;
const BUMP_POW: i32 = 5;

/// `C^4` bump profile `(1 - (r/R)^2)^5` and its derivative with respect to
/// `r^2`, both zero outside the support.
fn bump_profile(r2: f64) -> (f64, f64) {
    let s = 1.0 - r2 / (BUMP_RADIUS * BUMP_RADIUS);
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    let b = s.powi(BUMP_POW);
    let db_dr2 = -(BUMP_POW as f64) * s.powi(BUMP_POW - 1) / (BUMP_RADIUS * BUMP_RADIUS);
    (b, db_dr2)
}

/// Displacement `u` vanishing (with all derivatives used here) outside the
/// disk of radius [`BUMP_RADIUS`].
pub fn potential_bump_u_at(x: f64, y: f64) -> (f64, f64) {
    let (b, _) = bump_profile(x * x + y * y);
    (
        b * (1.3 * x + 0.7 * y + 0.4).sin(),
        b * (0.9 * x - 1.1 * y).cos(),
    )
}

/// Exact symmetric gradient `d u` of [`potential_bump_u_at`].
pub fn potential_bump_du_at(x: f64, y: f64) -> (f64, f64, f64) {
    let r2 = x * x + y * y;
    let (b, db_dr2) = bump_profile(r2);
    if b == 0.0 && db_dr2 == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let (bx, by) = (db_dr2 * 2.0 * x, db_dr2 * 2.0 * y);

    let t1 = (1.3 * x + 0.7 * y + 0.4).sin();
    let t1x = 1.3 * (1.3 * x + 0.7 * y + 0.4).cos();
    let t1y = 0.7 * (1.3 * x + 0.7 * y + 0.4).cos();
    let t2 = (0.9 * x - 1.1 * y).cos();
    let t2x = -0.9 * (0.9 * x - 1.1 * y).sin();
    let t2y = 1.1 * (0.9 * x - 1.1 * y).sin();

    let u1x = bx * t1 + b * t1x;
    let u1y = by * t1 + b * t1y;
    let u2x = bx * t2 + b * t2x;
    let u2y = by * t2 + b * t2y;

    (u1x, 0.5 * (u1y + u2x), u2y)
}

pub fn potential_bump_u(grid: Grid2) -> VectorField2 {
    VectorField2::from_fn(grid, potential_bump_u_at)
}

pub fn potential_bump_du(grid: Grid2) -> SymTensorField2 {
    SymTensorField2::from_fn(grid, potential_bump_du_at)
}


/// Node phase used by the standard experiment boundaries. Perfectly aligned
/// configurations (node azimuths commensurate with the scan directions) have
/// extra exact-zero singular values in the recovery system; a generic phase
/// restores the generic rank.
pub const BOUNDARY_PHASE: f64 = 0.1234;

/// Unit disk with `n` boundary nodes.
pub fn disk_boundary(n: usize) -> BoundaryPolyline {
    BoundaryPolyline::circle_with_phase(0.0, 0.0, 1.0, n, BOUNDARY_PHASE).unwrap()
}

/// Unit disk with a concentric hole of radius 0.4, `n` nodes per component.
pub fn disk_with_hole_boundary(n: usize) -> BoundaryPolyline {
    let outer = BoundaryPolyline::circle_with_phase(0.0, 0.0, 1.0, n, BOUNDARY_PHASE).unwrap();
    let inner = BoundaryPolyline::circle_with_phase(0.0, 0.0, 0.4, n, BOUNDARY_PHASE).unwrap();
    let mut components: Vec<Vec<(f64, f64)>> = outer.components().to_vec();
    components.extend(inner.components().iter().cloned());
    BoundaryPolyline::new(components).unwrap()
}

/// Three disjoint disks of radius 0.4 on a circle of radius 0.6, `n` nodes
/// each.
pub fn three_disks_boundary(n: usize) -> BoundaryPolyline {
    let mut components = Vec::new();
    for k in 0..3 {
        let centre = std::f64::consts::TAU * (0.25 + k as f64 / 3.0);
        let disk = BoundaryPolyline::circle_with_phase(
            0.6 * centre.cos(),
            0.6 * centre.sin(),
            0.4,
            n,
            BOUNDARY_PHASE,
        )
        .unwrap();
        components.extend(disk.components().iter().cloned());
    }
    BoundaryPolyline::new(components).unwrap()
}

/// Smooth, not compactly supported displacement with order-one gradients;
/// used to manufacture boundary data.
pub fn smooth_u_at(x: f64, y: f64) -> (f64, f64) {
    (
        0.20 * (1.1 * x + 0.6 * y).sin() + 0.05 * (2.3 * y).cos(),
        0.15 * (0.8 * x - 1.4 * y + 0.3).cos() + 0.07 * x * y,
    )
}

/// Exact symmetric gradient of [`smooth_u_at`].
pub fn smooth_du_at(x: f64, y: f64) -> (f64, f64, f64) {
    let u1x = 0.20 * 1.1 * (1.1 * x + 0.6 * y).cos();
    let u1y = 0.20 * 0.6 * (1.1 * x + 0.6 * y).cos() - 0.05 * 2.3 * (2.3 * y).sin();
    let u2x = -0.15 * 0.8 * (0.8 * x - 1.4 * y + 0.3).sin() + 0.07 * y;
    let u2y = 0.15 * 1.4 * (0.8 * x - 1.4 * y + 0.3).sin() + 0.07 * x;
    (u1x, 0.5 * (u1y + u2x), u2y)
}

/// Body force `b = -Div(C : d u)` of [`smooth_u_at`] under plane stress,
/// in closed form; pairs with [`smooth_u_at`] as Dirichlet data to
/// manufacture an exact solution of the potential-part boundary value
/// problem.
pub fn manufactured_body_force(
    x: f64,
    y: f64,
    constants: &crate::elastic::ElasticConstants,
) -> (f64, f64) {
    let (e, nu) = (constants.e, constants.nu);
    let p = (1.1 * x + 0.6 * y).sin();
    let q = (2.3 * y).cos();
    let r = (0.8 * x - 1.4 * y + 0.3).cos();
    let denom = nu * nu - 1.0;
    let b1 = e / 4000.0
        * (144.0 * nu * p + 529.0 * nu * q + 336.0 * nu * r + 140.0 * nu - 1112.0 * p
            - 529.0 * q
            + 336.0 * r
            + 140.0)
        / denom;
    let b2 = 3.0 * e / 500.0 * (-11.0 * nu * p + 8.0 * nu * r - 11.0 * p - 57.0 * r) / denom;
    (b1, b2)
}

/// Smooth tensor field with a Gaussian envelope, the raw material for
/// linearity checks.
pub fn smooth_tensor_bump(grid: Grid2) -> SymTensorField2 {
    SymTensorField2::from_fn(grid, |x, y| {
        let env = (-(x * x + y * y) / (2.0 * 0.28 * 0.28)).exp();
        (
            env * (2.4 * x - 1.1 * y + 0.5).sin(),
            env * (1.6 * x * y + 0.2).cos() * 0.8,
            env * (0.7 * x + 1.9 * y).cos(),
        )
    })
}

/// Second derivatives `(p_xx, p_xy, p_yy)` of the scalar potential
/// `psi = exp(-r^2 / 2 sigma^2) sin(a x + b y + c)`.
fn potential_hessian(x: f64, y: f64) -> (f64, f64, f64) {
    let (sigma, a, b, c) = (0.3, 2.1, 1.3, 0.4);
    let s2 = sigma * sigma;
    let e = (-(x * x + y * y) / (2.0 * s2)).exp();
    let (sn, cs) = (a * x + b * y + c).sin_cos();
    let (ex, ey) = (-x / s2 * e, -y / s2 * e);
    let exx = (x * x / (s2 * s2) - 1.0 / s2) * e;
    let exy = x * y / (s2 * s2) * e;
    let eyy = (y * y / (s2 * s2) - 1.0 / s2) * e;
    (
        exx * sn + 2.0 * ex * a * cs - e * a * a * sn,
        exy * sn + ex * b * cs + ey * a * cs - e * a * b * sn,
        eyy * sn + 2.0 * ey * b * cs - e * b * b * sn,
    )
}

/// Divergence-free tensor bump `(p_yy, -p_xy, p_xx)` built from the second
/// derivatives of a compactly decaying scalar potential; exactly solenoidal
/// for any potential and negligible beyond `r ~ 1`.
pub fn solenoidal_bump_base(grid: Grid2) -> SymTensorField2 {
    SymTensorField2::from_fn(grid, |x, y| {
        let (pxx, pxy, pyy) = potential_hessian(x, y);
        (pyy, -pxy, pxx)
    })
}

/// Solenoidal phantom: the Fourier-domain divergence-free projection of
/// [`solenoidal_bump_base`]. The base field is already divergence-free and
/// compactly decaying, so the projection is a near-identity and the result
/// stays solenoidal both periodically and as a zero-extended field on the
/// plane.
pub fn solenoidal_phantom(grid: Grid2) -> SymTensorField2 {
    solenoidal_part(&solenoidal_bump_base(grid))
}
