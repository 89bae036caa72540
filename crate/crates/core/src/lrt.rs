//! The longitudinal ray transform: forward projector, ramp filter, and the
//! tensor filtered back-projection that recovers the solenoidal part.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{Grid2, SymTensorField2};
use crate::sinogram::{ScanGeometry, Sinogram};

/// Forward LRT: for each ray, the line integral of
/// `cos^2 t e11 + 2 cos t sin t e12 + sin^2 t e22` along the ray, by uniform
/// sampling at half the pixel pitch with bilinear interpolation.
pub fn lrt_forward(field: &SymTensorField2, geom: &ScanGeometry) -> Result<Sinogram> {
    let grid = &field.grid;

    // the scan must cover everything the field can contribute
    let support = support_radius(field);
    if !geom.covers_radius(support) {
        return Err(Error::GeometryCoverage(format!(
            "field support radius {support:.6} (offsets [{:.6}, {:.6}])",
            geom.s_min,
            geom.s_max()
        )));
    }

    let step = 0.5 * grid.hx().min(grid.hy());
    let chord_radius = grid.circumradius();

    let rows: Vec<Vec<f64>> = (0..geom.n_angles)
        .into_par_iter()
        .map(|i| {
            let theta = geom.angle(i);
            let (sin_t, cos_t) = theta.sin_cos();
            let (w11, w12, w22) = (cos_t * cos_t, 2.0 * cos_t * sin_t, sin_t * sin_t);
            let mut row = vec![0.0; geom.n_rays];
            for (j, out) in row.iter_mut().enumerate() {
                let s = geom.offset(j);
                if s.abs() >= chord_radius {
                    continue;
                }
                let half_chord = (chord_radius * chord_radius - s * s).sqrt();
                let n_steps = (2.0 * half_chord / step).ceil() as usize;
                let dt = 2.0 * half_chord / n_steps as f64;
                let mut acc = 0.0;
                for k in 0..n_steps {
                    let t = -half_chord + (k as f64 + 0.5) * dt;
                    let x = -s * sin_t + t * cos_t;
                    let y = s * cos_t + t * sin_t;
                    let (e11, e12, e22) = field.sample(x, y);
                    acc += w11 * e11 + w12 * e12 + w22 * e22;
                }
                *out = acc * dt;
            }
            row
        })
        .collect();

    let mut sino = Sinogram::zeros(*geom);
    for (i, row) in rows.into_iter().enumerate() {
        sino.values[i * geom.n_rays..(i + 1) * geom.n_rays].copy_from_slice(&row);
    }
    Ok(sino)
}

fn support_radius(field: &SymTensorField2) -> f64 {
    let grid = &field.grid;
    let half_diag = 0.5 * grid.hx().hypot(grid.hy());
    let mut radius: f64 = 0.0;
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let k = grid.idx(ix, iy);
            if field.e11[k] != 0.0 || field.e12[k] != 0.0 || field.e22[k] != 0.0 {
                radius = radius.max(grid.x(ix).hypot(grid.y(iy)) + half_diag);
            }
        }
    }
    radius
}

/// Ramp filter: multiplication by the cyclic frequency magnitude `|nu|` in
/// the Fourier domain, with zero padding to at least twice the row length.
/// A sinusoid of angular frequency `k0` comes back scaled by `|k0| / 2 pi`.
///
/// The row mean is removed before padding (the continuum filter kills it
/// anyway, and a nonzero offset would turn into a box edge); the output is
/// re-centred so its mean is exactly zero.
pub fn ramp_filter(row: &[f64], ray_spacing: f64) -> Vec<f64> {
    let n = row.len();
    let padded = (2 * n).next_power_of_two();
    let mean = row.iter().sum::<f64>() / n as f64;

    let mut buf = vec![Complex64::new(0.0, 0.0); padded];
    for (b, &v) in buf.iter_mut().zip(row) {
        *b = Complex64::new(v - mean, 0.0);
    }

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(padded).process(&mut buf);
    for (j, b) in buf.iter_mut().enumerate() {
        let bin = j.min(padded - j) as f64;
        let nu = bin / (padded as f64 * ray_spacing);
        *b *= nu;
    }
    planner.plan_fft_inverse(padded).process(&mut buf);

    let scale = 1.0 / padded as f64;
    let mut out: Vec<f64> = buf[..n].iter().map(|c| c.re * scale).collect();
    let out_mean = out.iter().sum::<f64>() / n as f64;
    for v in out.iter_mut() {
        *v -= out_mean;
    }
    out
}

/// Tensor filtered back-projection: each filtered projection is smeared along
/// its rays with weights `(cos^2 t, cos t sin t, sin^2 t)` into the three
/// components, with linear interpolation between ray offsets. The angular sum
/// carries the factor `pi / n_angles`, which makes the discrete sum
/// approximate the continuum inversion for any even direction coverage.
pub fn invert_solenoidal_2d(sino: &Sinogram, grid: &Grid2) -> Result<SymTensorField2> {
    let geom = &sino.geometry;
    if !geom.covers_radius(grid.circumradius()) {
        return Err(Error::GeometryCoverage(format!(
            "grid circumradius {:.6} (offsets [{:.6}, {:.6}])",
            grid.circumradius(),
            geom.s_min,
            geom.s_max()
        )));
    }
    if geom.angle_span < std::f64::consts::PI - 1e-9 {
        log::warn!(
            "angular span {:.4} rad is below pi; reconstruction will show limited-angle artefacts",
            geom.angle_span
        );
    }

    // fixed-size angle blocks with an ordered merge keep the reduction
    // deterministic for any thread count
    const BLOCK: usize = 8;
    let starts: Vec<usize> = (0..geom.n_angles).step_by(BLOCK).collect();
    let partials: Vec<SymTensorField2> = starts
        .par_iter()
        .map(|&start| {
            let mut part = SymTensorField2::zeros(*grid);
            for i in start..(start + BLOCK).min(geom.n_angles) {
                let filtered = ramp_filter(sino.row(i), geom.ray_spacing);
                let theta = geom.angle(i);
                let (sin_t, cos_t) = theta.sin_cos();
                let (w11, w12, w22) = (cos_t * cos_t, cos_t * sin_t, sin_t * sin_t);
                for iy in 0..grid.ny {
                    let y = grid.y(iy);
                    for ix in 0..grid.nx {
                        let x = grid.x(ix);
                        let s = -x * sin_t + y * cos_t;
                        let pos = (s - geom.s_min) / geom.ray_spacing;
                        if pos < 0.0 || pos > (geom.n_rays - 1) as f64 {
                            continue;
                        }
                        let j0 = (pos.floor() as usize).min(geom.n_rays - 2);
                        let frac = pos - j0 as f64;
                        let v = (1.0 - frac) * filtered[j0] + frac * filtered[j0 + 1];
                        let k = grid.idx(ix, iy);
                        part.e11[k] += w11 * v;
                        part.e12[k] += w12 * v;
                        part.e22[k] += w22 * v;
                    }
                }
            }
            part
        })
        .collect();

    let mut out = SymTensorField2::zeros(*grid);
    for part in partials {
        out = out.add(&part)?;
    }
    out.scale(std::f64::consts::PI / geom.n_angles as f64);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryPolyline;
    use crate::mask::{mask_field, Mask};
    use crate::metrics::{frobenius_mass, relative_error};
    use crate::synth;

    fn disk_identity_field() -> SymTensorField2 {
        let grid = Grid2::centered_square(222, 1.11).unwrap();
        let boundary = BoundaryPolyline::circle(0.0, 0.0, 1.0, 2000).unwrap();
        let mask = Mask::from_boundary(grid, &boundary).unwrap();
        let ones = SymTensorField2::from_fn(grid, |_, _| (1.0, 0.0, 1.0));
        mask_field(&ones, &mask).unwrap()
    }

    // identity tensor contracts with any unit direction to 1, so the LRT is
    // the chord length of the disk
    #[test]
    fn identity_tensor_gives_chord_lengths() {
        let field = disk_identity_field();
        let geom = ScanGeometry::parallel(4, 0.01, field.grid.circumradius()).unwrap();
        let sino = lrt_forward(&field, &geom).unwrap();
        let centre = (geom.n_rays - 1) / 2;
        for i in 0..geom.n_angles {
            let v = sino.at(i, centre);
            assert!((v - 2.0).abs() < 1e-3, "angle {i}: chord {v}");
            let v06 = sino.at(i, centre + 60);
            let want = 2.0 * (1.0f64 - 0.36).sqrt();
            assert!((v06 - want).abs() < 2e-3, "angle {i}: chord {v06} vs {want}");
        }
    }

    #[test]
    fn zero_field_gives_zero_sinogram() {
        let grid = Grid2::centered_square(64, 1.0).unwrap();
        let field = SymTensorField2::zeros(grid);
        let geom = ScanGeometry::parallel(10, 0.05, grid.circumradius()).unwrap();
        let sino = lrt_forward(&field, &geom).unwrap();
        assert!(sino.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forward_is_linear() {
        let grid = Grid2::centered_square(96, 1.11).unwrap();
        let f = synth::smooth_tensor_bump(grid);
        let g = synth::potential_bump_du(grid);
        let geom = ScanGeometry::parallel(12, 0.02, grid.circumradius()).unwrap();
        let (alpha, beta) = (1.3, -0.7);
        let mut combo = f.clone();
        combo.scale(alpha);
        let mut gb = g.clone();
        gb.scale(beta);
        let combo = combo.add(&gb).unwrap();

        let sf = lrt_forward(&f, &geom).unwrap();
        let sg = lrt_forward(&g, &geom).unwrap();
        let sc = lrt_forward(&combo, &geom).unwrap();
        let mut max = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..sc.values.len() {
            max = max.max((sc.values[k] - alpha * sf.values[k] - beta * sg.values[k]).abs());
            scale = scale.max(sc.values[k].abs());
        }
        assert!(max <= 1e-10 * scale, "linearity violation {max} vs {scale}");
    }

    // rows at theta and theta + pi sample the same lines with mirrored
    // offsets: the integrand is even in the direction
    #[test]
    fn opposite_angles_are_mirrored() {
        let grid = Grid2::centered_square(96, 1.11).unwrap();
        let f = synth::smooth_tensor_bump(grid);
        let geom = ScanGeometry::parallel(8, 0.03, grid.circumradius()).unwrap();
        let sino = lrt_forward(&f, &geom).unwrap();
        let half = geom.n_angles / 2;
        let mut max = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..half {
            for j in 0..geom.n_rays {
                let a = sino.at(i, j);
                let b = sino.at(i + half, geom.n_rays - 1 - j);
                max = max.max((a - b).abs());
                scale = scale.max(a.abs());
            }
        }
        assert!(max <= 1e-10 * scale, "mirror asymmetry {max} vs {scale}");
    }

    #[test]
    fn forward_rejects_uncovered_support() {
        let grid = Grid2::centered_square(64, 1.0).unwrap();
        let field = SymTensorField2::from_fn(grid, |_, _| (1.0, 0.0, 1.0));
        let geom = ScanGeometry::new(4, 0.0, std::f64::consts::PI, 11, -0.5, 0.1).unwrap();
        assert!(matches!(
            lrt_forward(&field, &geom),
            Err(Error::GeometryCoverage(_))
        ));
    }

    #[test]
    fn ramp_filter_zero_and_constant_rows() {
        let zero = ramp_filter(&vec![0.0; 128], 0.01);
        assert!(zero.iter().all(|&v| v == 0.0));
        let constant = ramp_filter(&vec![3.5; 128], 0.01);
        let max = constant.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max < 1e-10, "constant row not annihilated: {max}");
    }

    #[test]
    fn ramp_filter_output_has_zero_mean() {
        let row: Vec<f64> = (0..200).map(|k| (k as f64 * 0.11).sin() + 0.4).collect();
        let out = ramp_filter(&row, 0.02);
        let mean = out.iter().sum::<f64>() / out.len() as f64;
        assert!(mean.abs() < 1e-14, "output mean {mean}");
    }

    // independent oracle: the same pipeline evaluated with a naive O(n^2) DFT
    fn ramp_filter_dft_oracle(row: &[f64], ray_spacing: f64) -> Vec<f64> {
        let n = row.len();
        let padded = (2 * n).next_power_of_two();
        let mean = row.iter().sum::<f64>() / n as f64;
        let mut input = vec![0.0; padded];
        for (slot, &v) in input.iter_mut().zip(row) {
            *slot = v - mean;
        }
        let mut spectrum = vec![Complex64::new(0.0, 0.0); padded];
        for (k, s) in spectrum.iter_mut().enumerate() {
            for (j, &v) in input.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * (k * j) as f64 / padded as f64;
                *s += Complex64::new(phase.cos(), phase.sin()) * v;
            }
            let nu = k.min(padded - k) as f64 / (padded as f64 * ray_spacing);
            *s *= nu;
        }
        let mut out = vec![0.0; n];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, s) in spectrum.iter().enumerate() {
                let phase = 2.0 * std::f64::consts::PI * (k * j) as f64 / padded as f64;
                acc += Complex64::new(phase.cos(), phase.sin()) * s;
            }
            *o = acc.re / padded as f64;
        }
        let out_mean = out.iter().sum::<f64>() / n as f64;
        out.iter_mut().for_each(|v| *v -= out_mean);
        out
    }

    #[test]
    fn ramp_filter_matches_dft_oracle_and_frequency_scaling() {
        let n = 128;
        let ds = 0.02;
        // periodic-compatible sinusoid: k0 = 2 pi m / (n ds)
        let m = 9.0;
        let k0 = 2.0 * std::f64::consts::PI * m / (n as f64 * ds);
        let row: Vec<f64> = (0..n).map(|j| (k0 * (j as f64) * ds).sin()).collect();

        let fast = ramp_filter(&row, ds);
        let oracle = ramp_filter_dft_oracle(&row, ds);
        let mut max = 0.0f64;
        for (a, b) in fast.iter().zip(&oracle) {
            max = max.max((a - b).abs());
        }
        assert!(max < 1e-10, "fft vs dft oracle: {max}");

        // away from the window edges the response approaches |k0|/(2 pi)
        let gain = k0 / (2.0 * std::f64::consts::PI);
        let mut max_rel = 0.0f64;
        for j in n / 4..3 * n / 4 {
            let want = gain * row[j];
            max_rel = max_rel.max((fast[j] - want).abs() / gain);
        }
        assert!(max_rel < 0.05, "interior gain error {max_rel}");
    }

    #[test]
    fn zero_sinogram_inverts_to_zero_field() {
        let grid = Grid2::centered_square(64, 1.0).unwrap();
        let geom = ScanGeometry::parallel(16, 0.05, grid.circumradius()).unwrap();
        let sino = Sinogram::zeros(geom);
        let field = invert_solenoidal_2d(&sino, &grid).unwrap();
        assert!(field.e11.iter().all(|&v| v == 0.0));
        assert!(field.e12.iter().all(|&v| v == 0.0));
        assert!(field.e22.iter().all(|&v| v == 0.0));
    }

    // forward-then-invert reproduces a solenoidal phantom
    #[test]
    fn inversion_recovers_solenoidal_phantom() {
        let grid = Grid2::centered_square(222, 1.11).unwrap();
        let phantom = synth::solenoidal_phantom(grid);
        let geom = ScanGeometry::parallel(250, 0.01, grid.circumradius()).unwrap();
        let sino = lrt_forward(&phantom, &geom).unwrap();
        let recon = invert_solenoidal_2d(&sino, &grid).unwrap();
        let disk = Mask::from_boundary(
            grid,
            &BoundaryPolyline::circle(0.0, 0.0, 1.0, 720).unwrap(),
        )
        .unwrap();
        let err = relative_error(&recon, &phantom, &disk).unwrap();
        assert!(err < 0.05, "solenoidal reconstruction error {err}");
    }

    // potential fields are in the null space: the reconstruction of du has
    // almost no mass
    #[test]
    fn inversion_annihilates_potential_fields() {
        let grid = Grid2::centered_square(222, 1.11).unwrap();
        let du = synth::potential_bump_du(grid);
        let geom = ScanGeometry::parallel(250, 0.01, grid.circumradius()).unwrap();
        let sino = lrt_forward(&du, &geom).unwrap();
        let recon = invert_solenoidal_2d(&sino, &grid).unwrap();
        let disk = Mask::from_boundary(
            grid,
            &BoundaryPolyline::circle(0.0, 0.0, 1.0, 720).unwrap(),
        )
        .unwrap();
        let ratio = frobenius_mass(&recon, &disk) / frobenius_mass(&du, &disk);
        assert!(ratio < 0.05, "potential leakage {ratio}");
    }
}
