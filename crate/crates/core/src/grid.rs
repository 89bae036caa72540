//! Regular pixel grids and the tensor/vector fields sampled on them.
//!
//! Fields store one value per pixel centre in row-major order with x fastest:
//! `idx = iy * nx + ix`. Outside the grid every field is taken to be zero,
//! which matches the compact-support assumption of the scan geometry.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Uniform rectangular pixel grid. Values live at pixel centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Grid2 {
    pub fn new(nx: usize, ny: usize, xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2x2 pixels, got {nx}x{ny}"
            )));
        }
        if !(xmax > xmin) || !(ymax > ymin) {
            return Err(Error::InvalidGrid(format!(
                "degenerate bounds [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        Ok(Grid2 {
            nx,
            ny,
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// Square grid of `n` x `n` pixels over `[-half, half]^2`.
    pub fn centered_square(n: usize, half: f64) -> Result<Self> {
        Grid2::new(n, n, -half, half, -half, half)
    }

    pub fn hx(&self) -> f64 {
        (self.xmax - self.xmin) / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.ymax - self.ymin) / self.ny as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// x coordinate of pixel centre `ix`.
    pub fn x(&self, ix: usize) -> f64 {
        self.xmin + (ix as f64 + 0.5) * self.hx()
    }

    /// y coordinate of pixel centre `iy`.
    pub fn y(&self, iy: usize) -> f64 {
        self.ymin + (iy as f64 + 0.5) * self.hy()
    }

    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Radius of the circle about the coordinate origin that encloses the
    /// whole grid rectangle. Scan geometries must cover this circle.
    pub fn circumradius(&self) -> f64 {
        let corners = [
            (self.xmin, self.ymin),
            (self.xmin, self.ymax),
            (self.xmax, self.ymin),
            (self.xmax, self.ymax),
        ];
        corners
            .iter()
            .map(|&(x, y)| x.hypot(y))
            .fold(0.0, f64::max)
    }

    /// Bilinear interpolation of cell-centred `values` at `(x, y)`, treating
    /// everything outside the grid as zero.
    pub fn sample_bilinear(&self, values: &[f64], x: f64, y: f64) -> f64 {
        let u = (x - self.xmin) / self.hx() - 0.5;
        let v = (y - self.ymin) / self.hy() - 0.5;
        let i0 = u.floor();
        let j0 = v.floor();
        let fu = u - i0;
        let fv = v - j0;
        let i0 = i0 as isize;
        let j0 = j0 as isize;

        let mut acc = 0.0;
        for (di, wi) in [(0isize, 1.0 - fu), (1, fu)] {
            for (dj, wj) in [(0isize, 1.0 - fv), (1, fv)] {
                let i = i0 + di;
                let j = j0 + dj;
                if i >= 0 && (i as usize) < self.nx && j >= 0 && (j as usize) < self.ny {
                    acc += wi * wj * values[j as usize * self.nx + i as usize];
                }
            }
        }
        acc
    }
}

/// Symmetric rank-2 tensor field on a [`Grid2`]; only the three independent
/// components are stored (`e21 == e12`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField2 {
    pub grid: Grid2,
    pub e11: Vec<f64>,
    pub e12: Vec<f64>,
    pub e22: Vec<f64>,
}

impl SymTensorField2 {
    pub fn zeros(grid: Grid2) -> Self {
        let n = grid.len();
        SymTensorField2 {
            grid,
            e11: vec![0.0; n],
            e12: vec![0.0; n],
            e22: vec![0.0; n],
        }
    }

    /// Build a field by evaluating `f(x, y) -> (e11, e12, e22)` at every
    /// pixel centre.
    pub fn from_fn(grid: Grid2, mut f: impl FnMut(f64, f64) -> (f64, f64, f64)) -> Self {
        let mut field = SymTensorField2::zeros(grid);
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            for ix in 0..grid.nx {
                let (a, b, c) = f(grid.x(ix), y);
                let k = grid.idx(ix, iy);
                field.e11[k] = a;
                field.e12[k] = b;
                field.e22[k] = c;
            }
        }
        field
    }

    pub fn components(&self) -> [&[f64]; 3] {
        [&self.e11, &self.e12, &self.e22]
    }

    pub fn components_mut(&mut self) -> [&mut Vec<f64>; 3] {
        [&mut self.e11, &mut self.e12, &mut self.e22]
    }

    /// Pixelwise `self + other`.
    pub fn add(&self, other: &SymTensorField2) -> Result<SymTensorField2> {
        if self.grid != other.grid {
            return Err(Error::InvalidField("grid mismatch in field sum".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.e11.iter_mut().zip(&other.e11) {
            *a += b;
        }
        for (a, b) in out.e12.iter_mut().zip(&other.e12) {
            *a += b;
        }
        for (a, b) in out.e22.iter_mut().zip(&other.e22) {
            *a += b;
        }
        Ok(out)
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self
            .e11
            .iter_mut()
            .chain(self.e12.iter_mut())
            .chain(self.e22.iter_mut())
        {
            *v *= factor;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.e11
            .iter()
            .chain(&self.e12)
            .chain(&self.e22)
            .all(|v| v.is_finite())
    }

    /// Bilinear sample of all three components at `(x, y)`.
    pub fn sample(&self, x: f64, y: f64) -> (f64, f64, f64) {
        (
            self.grid.sample_bilinear(&self.e11, x, y),
            self.grid.sample_bilinear(&self.e12, x, y),
            self.grid.sample_bilinear(&self.e22, x, y),
        )
    }

    /// Write in the STF2 text format.
    pub fn write(&self, path: &Path) -> Result<()> {
        let g = &self.grid;
        let mut out = String::new();
        writeln!(
            out,
            "STF2 {} {} {:.17e} {:.17e} {:.17e} {:.17e}",
            g.nx, g.ny, g.xmin, g.xmax, g.ymin, g.ymax
        )
        .unwrap();
        for k in 0..g.len() {
            writeln!(
                out,
                "{:.16e} {:.16e} {:.16e}",
                self.e11[k], self.e12[k], self.e22[k]
            )
            .unwrap();
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<SymTensorField2> {
        let text = fs::read_to_string(path)?;
        let perr = |msg: String| Error::Parse {
            path: path.display().to_string(),
            msg,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| perr("empty file".into()))?;
        let grid = parse_field_header(header, "STF2").map_err(|m| perr(m))?;
        let mut field = SymTensorField2::zeros(grid);
        for k in 0..grid.len() {
            let line = lines
                .next()
                .ok_or_else(|| perr(format!("expected {} data rows", grid.len())))?;
            let vals = parse_floats(line, 3).map_err(|m| perr(m))?;
            field.e11[k] = vals[0];
            field.e12[k] = vals[1];
            field.e22[k] = vals[2];
        }
        if !field.all_finite() {
            return Err(perr("non-finite value in field".into()));
        }
        Ok(field)
    }
}

/// Displacement-style vector field on a [`Grid2`].
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    pub grid: Grid2,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl VectorField2 {
    pub fn zeros(grid: Grid2) -> Self {
        let n = grid.len();
        VectorField2 {
            grid,
            u1: vec![0.0; n],
            u2: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Grid2, mut f: impl FnMut(f64, f64) -> (f64, f64)) -> Self {
        let mut field = VectorField2::zeros(grid);
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            for ix in 0..grid.nx {
                let (a, b) = f(grid.x(ix), y);
                let k = grid.idx(ix, iy);
                field.u1[k] = a;
                field.u2[k] = b;
            }
        }
        field
    }

    pub fn all_finite(&self) -> bool {
        self.u1.iter().chain(&self.u2).all(|v| v.is_finite())
    }

    pub fn sample(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.grid.sample_bilinear(&self.u1, x, y),
            self.grid.sample_bilinear(&self.u2, x, y),
        )
    }

    /// Write in the VF2 text format.
    pub fn write(&self, path: &Path) -> Result<()> {
        let g = &self.grid;
        let mut out = String::new();
        writeln!(
            out,
            "VF2 {} {} {:.17e} {:.17e} {:.17e} {:.17e}",
            g.nx, g.ny, g.xmin, g.xmax, g.ymin, g.ymax
        )
        .unwrap();
        for k in 0..g.len() {
            writeln!(out, "{:.16e} {:.16e}", self.u1[k], self.u2[k]).unwrap();
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<VectorField2> {
        let text = fs::read_to_string(path)?;
        let perr = |msg: String| Error::Parse {
            path: path.display().to_string(),
            msg,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| perr("empty file".into()))?;
        let grid = parse_field_header(header, "VF2").map_err(|m| perr(m))?;
        let mut field = VectorField2::zeros(grid);
        for k in 0..grid.len() {
            let line = lines
                .next()
                .ok_or_else(|| perr(format!("expected {} data rows", grid.len())))?;
            let vals = parse_floats(line, 2).map_err(|m| perr(m))?;
            field.u1[k] = vals[0];
            field.u2[k] = vals[1];
        }
        if !field.all_finite() {
            return Err(perr("non-finite value in field".into()));
        }
        Ok(field)
    }
}

fn parse_field_header(line: &str, magic: &str) -> std::result::Result<Grid2, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 7 || tokens[0] != magic {
        return Err(format!("expected `{magic} nx ny xmin xmax ymin ymax` header"));
    }
    let nx: usize = tokens[1].parse().map_err(|_| "bad nx".to_string())?;
    let ny: usize = tokens[2].parse().map_err(|_| "bad ny".to_string())?;
    let b: Vec<f64> = tokens[3..7]
        .iter()
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad bound `{t}`")))
        .collect::<std::result::Result<_, _>>()?;
    Grid2::new(nx, ny, b[0], b[1], b[2], b[3]).map_err(|e| e.to_string())
}

pub(crate) fn parse_floats(line: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let vals: Vec<f64> = line
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad float `{t}`")))
        .collect::<std::result::Result<_, _>>()?;
    if vals.len() != n {
        return Err(format!("expected {n} values per row, got {}", vals.len()));
    }
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_rejects_degenerate() {
        assert!(Grid2::new(1, 5, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(Grid2::new(5, 5, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Grid2::new(5, 5, 0.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn pixel_centres_and_spacing() {
        let g = Grid2::new(4, 2, 0.0, 2.0, -1.0, 0.0).unwrap();
        assert!((g.hx() - 0.5).abs() < 1e-15);
        assert!((g.hy() - 0.5).abs() < 1e-15);
        assert!((g.x(0) - 0.25).abs() < 1e-15);
        assert!((g.x(3) - 1.75).abs() < 1e-15);
        assert!((g.y(1) - (-0.25)).abs() < 1e-15);
    }

    #[test]
    fn bilinear_reproduces_linear_functions_interiorly() {
        let g = Grid2::centered_square(32, 1.0).unwrap();
        let vals: Vec<f64> = (0..g.len())
            .map(|k| {
                let (ix, iy) = (k % g.nx, k / g.nx);
                2.0 * g.x(ix) - 0.7 * g.y(iy) + 0.3
            })
            .collect();
        for &(x, y) in &[(0.11, -0.42), (0.0, 0.0), (-0.55, 0.67)] {
            let want = 2.0 * x - 0.7 * y + 0.3;
            assert!((g.sample_bilinear(&vals, x, y) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn bilinear_is_zero_far_outside() {
        let g = Grid2::centered_square(8, 1.0).unwrap();
        let vals = vec![1.0; g.len()];
        assert_eq!(g.sample_bilinear(&vals, 5.0, 0.0), 0.0);
        assert_eq!(g.sample_bilinear(&vals, 0.0, -3.0), 0.0);
    }

    proptest! {
        // STF2/VF2 round-trip: full double precision survives the text form.
        #[test]
        fn stf2_roundtrip(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = Grid2::new(5, 4, -1.3, 0.9, 0.1, 2.7).unwrap();
            let f = SymTensorField2::from_fn(g, |_, _| {
                (
                    rng.random_range(-1e3..1e3),
                    rng.random_range(-1.0..1.0) * 1e-7,
                    rng.random_range(-1.0..1.0),
                )
            });
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("f.stf2");
            f.write(&path).unwrap();
            let f2 = SymTensorField2::read(&path).unwrap();
            prop_assert_eq!(f, f2);
        }

        #[test]
        fn vf2_roundtrip(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = Grid2::new(3, 6, 0.0, 1.0, -1.0, 1.0).unwrap();
            let f = VectorField2::from_fn(g, |_, _| {
                (rng.random_range(-1e-4..1e-4), rng.random_range(-10.0..10.0))
            });
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("f.vf2");
            f.write(&path).unwrap();
            let f2 = VectorField2::read(&path).unwrap();
            prop_assert_eq!(f, f2);
        }
    }
}
