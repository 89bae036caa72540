//! Fourier-domain Helmholtz decomposition of symmetric rank-2 tensor fields.
//!
//! In 2D the symmetric tensors at spatial frequency `k` split into a
//! one-dimensional solenoidal line spanned by `eta_perp (x) eta_perp`
//! (`eta = k/|k|`) and the two-dimensional potential space
//! `{sym(k (x) v)}`; the split is orthogonal in the Frobenius inner product.
//! Projecting every frequency onto the solenoidal line therefore yields the
//! divergence-free part of the field, here in the periodic sense over the
//! grid extent.
//!
//! This route never touches the ray-transform machinery, which makes it an
//! independent reference for the filtered back-projection inversion, and a
//! generator of exactly-solenoidal phantoms.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::SymTensorField2;

/// Solenoidal (divergence-free) part of the field under the periodic
/// decomposition on its grid. The projector is pointwise in frequency, so it
/// is exactly idempotent.
pub fn solenoidal_part(field: &SymTensorField2) -> SymTensorField2 {
    let grid = field.grid;
    let (w, h) = (grid.nx, grid.ny);

    let mut comps: Vec<Vec<Complex64>> = field
        .components()
        .iter()
        .map(|vals| vals.iter().map(|&v| Complex64::new(v, 0.0)).collect())
        .collect();

    for c in comps.iter_mut() {
        fft2(c, w, h, false);
    }

    let kx: Vec<f64> = (0..w)
        .map(|j| {
            let jj = if j <= w / 2 { j as isize } else { j as isize - w as isize };
            2.0 * std::f64::consts::PI * jj as f64 / (w as f64 * grid.hx())
        })
        .collect();
    let ky: Vec<f64> = (0..h)
        .map(|j| {
            let jj = if j <= h / 2 { j as isize } else { j as isize - h as isize };
            2.0 * std::f64::consts::PI * jj as f64 / (h as f64 * grid.hy())
        })
        .collect();

    for iy in 0..h {
        for ix in 0..w {
            let (k1, k2) = (kx[ix], ky[iy]);
            let k = iy * w + ix;
            // The Nyquist lines alias +k and -k; the projector's off-diagonal
            // weight is odd under single-axis negation, so applying it there
            // would break the Hermitian symmetry of the spectrum. Those bins
            // are zeroed instead.
            if (w % 2 == 0 && ix == w / 2) || (h % 2 == 0 && iy == h / 2) {
                comps[0][k] = Complex64::new(0.0, 0.0);
                comps[1][k] = Complex64::new(0.0, 0.0);
                comps[2][k] = Complex64::new(0.0, 0.0);
                continue;
            }
            let norm2 = k1 * k1 + k2 * k2;
            if norm2 == 0.0 {
                // constants are divergence-free; keep the DC mode
                continue;
            }
            // eta_perp (x) eta_perp for eta = k/|k|
            let (p11, p12, p22) = (k2 * k2 / norm2, -k1 * k2 / norm2, k1 * k1 / norm2);
            let f11 = comps[0][k];
            let f12 = comps[1][k];
            let f22 = comps[2][k];
            // Frobenius contraction <f, P> with the off-diagonal counted twice
            let proj = f11 * p11 + f12 * (2.0 * p12) + f22 * p22;
            comps[0][k] = proj * p11;
            comps[1][k] = proj * p12;
            comps[2][k] = proj * p22;
        }
    }

    for c in comps.iter_mut() {
        fft2(c, w, h, true);
    }

    let mut out = SymTensorField2::zeros(grid);
    let scale = 1.0 / (w * h) as f64;
    for k in 0..grid.len() {
        out.e11[k] = comps[0][k].re * scale;
        out.e12[k] = comps[1][k].re * scale;
        out.e22[k] = comps[2][k].re * scale;
    }
    out
}

/// Potential part `f - sf`; equals `d u` for a periodic `u`.
pub fn potential_part(field: &SymTensorField2) -> SymTensorField2 {
    let sol = solenoidal_part(field);
    let mut out = field.clone();
    for (comp, sol_comp) in out.components_mut().into_iter().zip(sol.components()) {
        for (v, s) in comp.iter_mut().zip(sol_comp) {
            *v -= s;
        }
    }
    out
}

/// In-place 2D FFT over a `w x h` row-major complex buffer (unnormalised).
fn fft2(data: &mut [Complex64], w: usize, h: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(w)
    } else {
        planner.plan_fft_forward(w)
    };
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = if inverse {
        planner.plan_fft_inverse(h)
    } else {
        planner.plan_fft_forward(h)
    };
    let mut col = vec![Complex64::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = data[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            data[y * w + x] = col[y];
        }
    }
}
