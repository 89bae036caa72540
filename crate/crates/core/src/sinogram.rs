//! Parallel-beam scan geometry and sinogram storage.
//!
//! A ray is indexed by `(angle i, offset j)`: direction
//! `xi = (cos t, sin t)` with `t = angle_start + i * angle_span / n_angles`
//! (endpoint excluded), and signed perpendicular offset
//! `s = s_min + j * ray_spacing` measured along `n = (-sin t, cos t)` from
//! the coordinate origin. The ray is `{ s n + t' xi }`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGeometry {
    pub n_angles: usize,
    pub angle_start: f64,
    pub angle_span: f64,
    pub n_rays: usize,
    pub s_min: f64,
    pub ray_spacing: f64,
}

impl ScanGeometry {
    pub fn new(
        n_angles: usize,
        angle_start: f64,
        angle_span: f64,
        n_rays: usize,
        s_min: f64,
        ray_spacing: f64,
    ) -> Result<Self> {
        if n_angles < 1 {
            return Err(Error::InvalidGeometry("need at least one angle".into()));
        }
        if !(ray_spacing > 0.0) || !ray_spacing.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "ray spacing must be positive, got {ray_spacing}"
            )));
        }
        if n_rays < 2 {
            return Err(Error::InvalidGeometry("need at least two rays".into()));
        }
        if !(angle_span > 0.0) || !angle_span.is_finite() || !angle_start.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "bad angular range start={angle_start} span={angle_span}"
            )));
        }
        Ok(ScanGeometry {
            n_angles,
            angle_start,
            angle_span,
            n_rays,
            s_min,
            ray_spacing,
        })
    }

    /// Full-turn parallel-beam geometry whose symmetric offsets cover
    /// `[-radius, radius]`, always including the central ray `s = 0`.
    pub fn parallel(n_angles: usize, ray_spacing: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "coverage radius must be positive, got {radius}"
            )));
        }
        let half = (radius / ray_spacing).ceil() as usize;
        let n_rays = 2 * half + 1;
        ScanGeometry::new(
            n_angles,
            0.0,
            2.0 * std::f64::consts::PI,
            n_rays,
            -(half as f64) * ray_spacing,
            ray_spacing,
        )
    }

    pub fn angle(&self, i: usize) -> f64 {
        self.angle_start + self.angle_span * i as f64 / self.n_angles as f64
    }

    pub fn offset(&self, j: usize) -> f64 {
        self.s_min + j as f64 * self.ray_spacing
    }

    pub fn s_max(&self) -> f64 {
        self.offset(self.n_rays - 1)
    }

    /// Do the ray offsets cover `[-radius, radius]`?
    pub fn covers_radius(&self, radius: f64) -> bool {
        let slack = 1e-12 * self.ray_spacing.max(1.0);
        self.s_min <= -radius + slack && self.s_max() >= radius - slack
    }

    pub fn len(&self) -> usize {
        self.n_angles * self.n_rays
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Line-integral samples of the longitudinal ray transform, one value per
/// `(angle, offset)` pair, angle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub geometry: ScanGeometry,
    pub values: Vec<f64>,
}

impl Sinogram {
    pub fn zeros(geometry: ScanGeometry) -> Self {
        Sinogram {
            values: vec![0.0; geometry.len()],
            geometry,
        }
    }

    pub fn idx(&self, angle: usize, ray: usize) -> usize {
        angle * self.geometry.n_rays + ray
    }

    pub fn at(&self, angle: usize, ray: usize) -> f64 {
        self.values[self.idx(angle, ray)]
    }

    pub fn row(&self, angle: usize) -> &[f64] {
        let n = self.geometry.n_rays;
        &self.values[angle * n..(angle + 1) * n]
    }

    /// Pointwise difference, e.g. measured minus re-projected.
    pub fn subtract(&self, other: &Sinogram) -> Result<Sinogram> {
        if self.geometry != other.geometry {
            return Err(Error::InvalidGeometry(
                "sinogram geometry mismatch in subtraction".into(),
            ));
        }
        let mut out = self.clone();
        for (v, o) in out.values.iter_mut().zip(&other.values) {
            *v -= o;
        }
        Ok(out)
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Write in the SINO text format.
    pub fn write(&self, path: &Path) -> Result<()> {
        let g = &self.geometry;
        let mut out = String::new();
        writeln!(
            out,
            "SINO {} {} {:.17e} {:.17e} {:.17e} {:.17e}",
            g.n_angles, g.n_rays, g.angle_start, g.angle_span, g.s_min, g.ray_spacing
        )
        .unwrap();
        for i in 0..g.n_angles {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Sinogram> {
        let text = fs::read_to_string(path)?;
        let perr = |msg: String| Error::Parse {
            path: path.display().to_string(),
            msg,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| perr("empty file".into()))?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        if tokens.len() != 7 || tokens[0] != "SINO" {
            return Err(perr(
                "expected `SINO n_angles n_rays angle_start angle_span s_min ray_spacing`".into(),
            ));
        }
        let n_angles: usize = tokens[1].parse().map_err(|_| perr("bad n_angles".into()))?;
        let n_rays: usize = tokens[2].parse().map_err(|_| perr("bad n_rays".into()))?;
        let nums: Vec<f64> = tokens[3..7]
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| format!("bad float `{t}`")))
            .collect::<std::result::Result<_, _>>()
            .map_err(|m| perr(m))?;
        let geometry = ScanGeometry::new(n_angles, nums[0], nums[1], n_rays, nums[2], nums[3])?;
        let mut sino = Sinogram::zeros(geometry);
        for i in 0..n_angles {
            let line = lines
                .next()
                .ok_or_else(|| perr(format!("expected {n_angles} rows")))?;
            let vals = crate::grid::parse_floats(line, n_rays).map_err(|m| perr(m))?;
            sino.values[i * n_rays..(i + 1) * n_rays].copy_from_slice(&vals);
        }
        if !sino.values.iter().all(|v| v.is_finite()) {
            return Err(perr("non-finite sinogram value".into()));
        }
        Ok(sino)
    }
}

/// Add i.i.d. zero-mean Gaussian noise with standard deviation
/// `level * mean(|values|)`; deterministic for a given seed.
pub fn add_noise(sino: &Sinogram, level: f64, seed: u64) -> Sinogram {
    assert!(level >= 0.0, "noise level must be non-negative");
    if level == 0.0 {
        return sino.clone();
    }
    let mean_abs = sino.values.iter().map(|v| v.abs()).sum::<f64>() / sino.values.len() as f64;
    let sigma = level * mean_abs;
    let mut out = sino.clone();
    if sigma == 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    for v in out.values.iter_mut() {
        *v += normal.sample(&mut rng);
    }
    out
}
