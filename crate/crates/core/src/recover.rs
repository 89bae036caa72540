//! Boundary displacement recovery from the residual sinogram.
//!
//! Each ray that crosses the boundary contributes one linear equation: the
//! residual equals the difference of the longitudinal displacement component
//! between exit and entry points, with the displacement at a crossing
//! linearly interpolated between the two neighbouring boundary nodes. The
//! rigid motions of every boundary component are invisible to these
//! equations, so the assembled matrix is rank deficient by exactly three per
//! component and the system is solved in the minimum-norm least-squares
//! sense through its SVD.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::householder;
use faer::linalg::solvers::{Qr, Svd};
use faer::{Conj, Mat, Par};

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::boundary::{BoundaryPolyline, Point};
use crate::error::{Error, Result};
use crate::sinogram::{ScanGeometry, Sinogram};

/// One transversal crossing of a ray with the boundary.
#[derive(Debug, Clone, Copy)]
pub struct RayHit {
    /// Boundary component containing the crossed segment.
    pub component: usize,
    /// Segment index: the segment runs from node `segment` to the next node.
    pub segment: usize,
    /// Interpolation weight of node `segment`; the next node gets `1 - alpha`.
    pub alpha: f64,
    pub point: Point,
    /// Ray parameter of the crossing; hits are sorted by this.
    pub t: f64,
    /// Crossing parity: true if the ray enters material here.
    pub entering: bool,
}

/// All transversal crossings of the line `(theta, offset)` with the boundary,
/// sorted along the ray and parity labelled.
///
/// Node-exact crossings are handled by a half-open side rule and collapse the
/// interpolation onto the node. A ray collinear with a boundary segment is
/// perturbed by `shift_eps` and retried once; if it is still degenerate the
/// ray is dropped (`None`) and logged.
pub fn intersect_ray(
    boundary: &BoundaryPolyline,
    theta: f64,
    offset: f64,
    shift_eps: f64,
) -> Option<Vec<RayHit>> {
    match intersect_line(boundary, theta, offset) {
        ScanOutcome::Clean(hits) => Some(hits),
        ScanOutcome::Degenerate => {
            match intersect_line(boundary, theta, offset + shift_eps) {
                ScanOutcome::Clean(hits) => Some(hits),
                ScanOutcome::Degenerate => {
                    log::warn!(
                        "ray (theta={theta:.6}, s={offset:.6}) still degenerate after shift; dropped"
                    );
                    None
                }
            }
        }
    }
}

enum ScanOutcome {
    Clean(Vec<RayHit>),
    Degenerate,
}

fn intersect_line(boundary: &BoundaryPolyline, theta: f64, offset: f64) -> ScanOutcome {
    let (sin_t, cos_t) = theta.sin_cos();
    // signed distance of p from the line, measured along n = (-sin, cos)
    let side = |p: Point| -p.0 * sin_t + p.1 * cos_t - offset;

    let mut hits = Vec::new();
    for (c, loop_) in boundary.components().iter().enumerate() {
        let n = loop_.len();
        let sides: Vec<f64> = loop_.iter().map(|&p| side(p)).collect();
        let mut loop_hits = 0usize;
        for i in 0..n {
            let (sa, sb) = (sides[i], sides[(i + 1) % n]);
            if sa == 0.0 && sb == 0.0 {
                // segment collinear with the ray
                return ScanOutcome::Degenerate;
            }
            if (sa > 0.0) != (sb > 0.0) {
                let u = sa / (sa - sb);
                let (ax, ay) = loop_[i];
                let (bx, by) = loop_[(i + 1) % n];
                let point = (ax + u * (bx - ax), ay + u * (by - ay));
                hits.push(RayHit {
                    component: c,
                    segment: i,
                    alpha: 1.0 - u,
                    point,
                    t: point.0 * cos_t + point.1 * sin_t,
                    entering: false,
                });
                loop_hits += 1;
            }
        }
        if loop_hits % 2 != 0 {
            // cannot happen for a closed loop under the strict side rule,
            // but guards against non-finite geometry
            return ScanOutcome::Degenerate;
        }
    }
    hits.sort_by(|a, b| a.t.total_cmp(&b.t));
    for (k, hit) in hits.iter_mut().enumerate() {
        hit.entering = k % 2 == 0;
    }
    ScanOutcome::Clean(hits)
}

/// Dense ray/node system `A U = R`; `U` stacks `(u1, u2)` per boundary node
/// in global node order.
pub struct BoundarySystem {
    pub a: Mat<f64>,
    pub rhs: Vec<f64>,
    /// `(angle index, ray index)` per row.
    pub rows: Vec<(usize, usize)>,
    pub nodes: Vec<Point>,
    pub component_sizes: Vec<usize>,
}

impl BoundarySystem {
    pub fn n_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// `A u` for a per-node displacement vector.
    pub fn apply(&self, u: &[Point]) -> Vec<f64> {
        assert_eq!(u.len(), self.n_nodes());
        let mut out = vec![0.0; self.n_rows()];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &(u1, u2)) in u.iter().enumerate() {
                acc += self.a[(r, 2 * k)] * u1 + self.a[(r, 2 * k + 1)] * u2;
            }
            *slot = acc;
        }
        out
    }
}

/// Assemble one equation per boundary-crossing ray of the residual sinogram.
///
/// Rays that miss the boundary are excluded; rays whose total chord length
/// inside the material is below `2 * ray_spacing` are excluded as well
/// (grazing rays carry mostly noise). Multiple entry/exit pairs accumulate
/// into the same row.
pub fn assemble_system(
    geom: &ScanGeometry,
    boundary: &BoundaryPolyline,
    residual: &Sinogram,
) -> Result<BoundarySystem> {
    if residual.geometry != *geom {
        return Err(Error::InvalidGeometry(
            "residual sinogram geometry differs from the scan geometry".into(),
        ));
    }
    let shift_eps = 1e-9 * geom.ray_spacing;
    let n_nodes = boundary.n_nodes();
    let offsets: Vec<usize> = (0..boundary.n_components())
        .map(|c| boundary.component_offset(c))
        .collect();
    let loop_sizes: Vec<usize> = boundary.components().iter().map(|l| l.len()).collect();

    struct RowData {
        coeffs: Vec<(usize, f64)>,
        rhs: f64,
        meta: (usize, usize),
    }

    let mut rows: Vec<RowData> = Vec::new();
    for i in 0..geom.n_angles {
        let theta = geom.angle(i);
        let (sin_t, cos_t) = theta.sin_cos();
        for j in 0..geom.n_rays {
            let Some(hits) = intersect_ray(boundary, theta, geom.offset(j), shift_eps) else {
                continue;
            };
            if hits.is_empty() {
                continue;
            }
            let chord: f64 = hits
                .chunks_exact(2)
                .map(|pair| pair[1].t - pair[0].t)
                .sum();
            if chord < 2.0 * geom.ray_spacing {
                continue;
            }
            let mut coeffs = Vec::with_capacity(hits.len() * 4);
            for hit in &hits {
                let sign = if hit.entering { -1.0 } else { 1.0 };
                let node_a = offsets[hit.component] + hit.segment;
                let node_b =
                    offsets[hit.component] + (hit.segment + 1) % loop_sizes[hit.component];
                coeffs.push((2 * node_a, sign * hit.alpha * cos_t));
                coeffs.push((2 * node_a + 1, sign * hit.alpha * sin_t));
                coeffs.push((2 * node_b, sign * (1.0 - hit.alpha) * cos_t));
                coeffs.push((2 * node_b + 1, sign * (1.0 - hit.alpha) * sin_t));
            }
            rows.push(RowData {
                coeffs,
                rhs: residual.at(i, j),
                meta: (i, j),
            });
        }
    }

    if rows.is_empty() {
        return Err(Error::NoIntersectingRays);
    }

    let mut a = Mat::zeros(rows.len(), 2 * n_nodes);
    let mut rhs = Vec::with_capacity(rows.len());
    let mut metas = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in &row.coeffs {
            a[(r, c)] += v;
        }
        rhs.push(row.rhs);
        metas.push(row.meta);
    }

    Ok(BoundarySystem {
        a,
        rhs,
        rows: metas,
        nodes: boundary.nodes().collect(),
        component_sizes: loop_sizes,
    })
}

/// QR + SVD factorisation of the assembled system. The tall matrix is first
/// reduced by Householder QR; the dense SVD of the square factor has the same
/// singular values and right singular vectors as `A` itself.
pub struct BoundaryFactor {
    qr: Qr<f64>,
    svd: Svd<f64>,
    n_cols: usize,
}

impl BoundaryFactor {
    pub fn new(system: &BoundarySystem) -> Result<Self> {
        let qr = system.a.qr();
        let r = qr.thin_R().to_owned();
        let svd = r
            .svd()
            .map_err(|_| Error::FemSolve("SVD of the boundary system did not converge".into()))?;
        Ok(BoundaryFactor {
            qr,
            svd,
            n_cols: system.a.ncols(),
        })
    }

    /// Singular values of `A` in non-increasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        (0..self.n_cols).map(|k| self.svd.S()[k]).collect()
    }

    pub fn near_zero_count(&self, cutoff: f64) -> usize {
        let s = self.singular_values();
        let smax = s[0];
        s.iter().filter(|&&v| v < cutoff * smax).count()
    }

    /// Right singular vectors with near-zero singular values, reshaped to
    /// per-node displacement fields.
    pub fn null_basis(&self, cutoff: f64) -> Vec<Vec<Point>> {
        let s = self.singular_values();
        let smax = s[0];
        let v = self.svd.V();
        let mut basis = Vec::new();
        for (k, &sv) in s.iter().enumerate() {
            if sv < cutoff * smax {
                let vec: Vec<Point> = (0..self.n_cols / 2)
                    .map(|node| (v[(2 * node, k)], v[(2 * node + 1, k)]))
                    .collect();
                basis.push(vec);
            }
        }
        basis
    }

    /// Ratio of the largest to the smallest singular value above the cutoff.
    pub fn condition_number(&self, cutoff: f64) -> f64 {
        let s = self.singular_values();
        let smax = s[0];
        let smin = s
            .iter()
            .rev()
            .find(|&&v| v >= cutoff * smax)
            .copied()
            .unwrap_or(smax);
        smax / smin
    }

    /// Minimum-norm least-squares solution of `A U = rhs`.
    pub fn solve_min_norm(&self, rhs: &[f64], cutoff: f64) -> Result<Vec<Point>> {
        let s = self.singular_values();
        let smax = s[0];
        if !(smax > 0.0) || s.iter().all(|&v| v < cutoff * smax) {
            return Err(Error::AllSingularBelowCutoff);
        }
        let m = rhs.len();
        // y = Q^T rhs, first n entries
        let mut y = Mat::from_fn(m, 1, |i, _| rhs[i]);
        let blocksize = self.qr.Q_coeff().nrows();
        let mut buf = MemBuffer::new(
            householder::apply_block_householder_sequence_transpose_on_the_left_in_place_scratch::<
                f64,
            >(m, blocksize, 1),
        );
        householder::apply_block_householder_sequence_transpose_on_the_left_in_place_with_conj(
            self.qr.Q_basis(),
            self.qr.Q_coeff(),
            Conj::No,
            y.as_mut(),
            Par::Seq,
            MemStack::new(&mut buf),
        );

        let n = self.n_cols;
        let (u, v) = (self.svd.U(), self.svd.V());
        let mut x = vec![0.0; n];
        for k in 0..n {
            if s[k] < cutoff * smax {
                continue;
            }
            let mut uty = 0.0;
            for i in 0..n {
                uty += u[(i, k)] * y[(i, 0)];
            }
            let factor = uty / s[k];
            for (j, slot) in x.iter_mut().enumerate() {
                *slot += v[(j, k)] * factor;
            }
        }
        Ok((0..n / 2).map(|k| (x[2 * k], x[2 * k + 1])).collect())
    }
}

/// Minimum-norm solve of the assembled system's own right-hand side.
/// Singular values below `cutoff * sigma_max` are treated as zero.
pub fn min_norm_solve(system: &BoundarySystem, cutoff: f64) -> Result<Vec<Point>> {
    BoundaryFactor::new(system)?.solve_min_norm(&system.rhs, cutoff)
}

/// Spectrum diagnostics of the assembled system.
#[derive(Debug, Clone)]
pub struct SvdReport {
    /// All singular values, non-increasing.
    pub singular_values: Vec<f64>,
    /// Count below `cutoff * sigma_max`.
    pub near_zero_count: usize,
    /// Null-space basis as per-node displacement fields.
    pub null_vectors: Vec<Vec<Point>>,
    /// Largest over smallest non-zero singular value.
    pub condition_number: f64,
    /// Node positions matching the null-vector entries.
    pub nodes: Vec<Point>,
    pub cutoff: f64,
}

pub const DEFAULT_SVD_CUTOFF: f64 = 1e-10;

/// Full SVD diagnostics with the default near-zero cutoff.
pub fn svd_report(system: &BoundarySystem) -> Result<SvdReport> {
    svd_report_with_cutoff(system, DEFAULT_SVD_CUTOFF)
}

pub fn svd_report_with_cutoff(system: &BoundarySystem, cutoff: f64) -> Result<SvdReport> {
    let factor = BoundaryFactor::new(system)?;
    Ok(SvdReport {
        singular_values: factor.singular_values(),
        near_zero_count: factor.near_zero_count(cutoff),
        null_vectors: factor.null_basis(cutoff),
        condition_number: factor.condition_number(cutoff),
        nodes: system.nodes.clone(),
        cutoff,
    })
}

impl SvdReport {
    /// Write `index,sigma` rows.
    pub fn write_spectrum_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("index,sigma\n");
        for (k, s) in self.singular_values.iter().enumerate() {
            writeln!(out, "{k},{s:.16e}").unwrap();
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Write one `x,y,u1,u2` CSV per null vector into `dir`, named
    /// `nullvec_00.csv`, `nullvec_01.csv`, ...
    pub fn write_null_vectors_csv(&self, dir: &Path) -> Result<()> {
        for (k, vec) in self.null_vectors.iter().enumerate() {
            let mut out = String::from("x,y,u1,u2\n");
            for (&(x, y), &(u1, u2)) in self.nodes.iter().zip(vec) {
                writeln!(out, "{x:.16e},{y:.16e},{u1:.16e},{u2:.16e}").unwrap();
            }
            fs::write(dir.join(format!("nullvec_{k:02}.csv")), out)?;
        }
        Ok(())
    }
}

/// Orthogonal projection of a per-node displacement onto the span of the
/// per-component rigid motions (three basis vectors per component).
pub fn rigid_projection(boundary: &BoundaryPolyline, u: &[Point]) -> Vec<Point> {
    let mut out = vec![(0.0, 0.0); u.len()];
    for (c, loop_) in boundary.components().iter().enumerate() {
        let off = boundary.component_offset(c);
        let n = loop_.len();
        // basis: (1,0), (0,1), (-y,x) on this component's nodes
        let mut gram = [[0.0f64; 3]; 3];
        let mut proj = [0.0f64; 3];
        let basis = |k: usize, p: Point| -> Point {
            match k {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                _ => (-p.1, p.0),
            }
        };
        for i in 0..n {
            let p = loop_[i];
            for a in 0..3 {
                let ba = basis(a, p);
                proj[a] += ba.0 * u[off + i].0 + ba.1 * u[off + i].1;
                for b in 0..3 {
                    let bb = basis(b, p);
                    gram[a][b] += ba.0 * bb.0 + ba.1 * bb.1;
                }
            }
        }
        let coeff = solve3(gram, proj);
        for i in 0..n {
            let p = loop_[i];
            let mut v = (0.0, 0.0);
            for (a, &ca) in coeff.iter().enumerate() {
                let ba = basis(a, p);
                v.0 += ca * ba.0;
                v.1 += ca * ba.1;
            }
            out[off + i] = v;
        }
    }
    out
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    // Cramer's rule; the rigid Gram matrix is well conditioned
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    let mut out = [0.0; 3];
    for k in 0..3 {
        let mut m = a;
        for r in 0..3 {
            m[r][k] = b[r];
        }
        out[k] = det(m) / d;
    }
    out
}
