//! Conforming linear-triangle meshes of a polyline-bounded domain.
//!
//! The mesher resamples the boundary at the target spacing, fills the
//! interior with a hexagonal point lattice (kept clear of the boundary and
//! lightly jittered to avoid cocircular degeneracies), runs Bowyer-Watson
//! Delaunay over the combined point set, and keeps the triangles whose
//! centroid is inside the domain. Boundary conformity is verified, not
//! assumed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::boundary::{BoundaryPolyline, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    /// Vertex indices, counter-clockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Arc-length position along the boundary polyline for boundary
    /// vertices, `None` for interior ones.
    pub boundary_arclen: Vec<Option<f64>>,
}

impl TriMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (ax, ay) = self.vertices[a];
        let (bx, by) = self.vertices[b];
        let (cx, cy) = self.vertices[c];
        0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t];
        let (ax, ay) = self.vertices[a];
        let (bx, by) = self.vertices[b];
        let (cx, cy) = self.vertices[c];
        ((ax + bx + cx) / 3.0, (ay + by + cy) / 3.0)
    }

    pub fn median_edge_length(&self) -> f64 {
        let mut lengths = Vec::with_capacity(3 * self.n_triangles());
        for tri in &self.triangles {
            for k in 0..3 {
                let (ax, ay) = self.vertices[tri[k]];
                let (bx, by) = self.vertices[tri[(k + 1) % 3]];
                lengths.push((bx - ax).hypot(by - ay));
            }
        }
        lengths.sort_by(f64::total_cmp);
        lengths[lengths.len() / 2]
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_vertices()).filter(|&v| self.boundary_arclen[v].is_some())
    }

    /// Write in the MESH text format (`flag` marks boundary vertices).
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        writeln!(out, "MESH {} {}", self.n_vertices(), self.n_triangles()).unwrap();
        for (v, &(x, y)) in self.vertices.iter().enumerate() {
            let flag = if self.boundary_arclen[v].is_some() { 1 } else { 0 };
            writeln!(out, "{x:.16e} {y:.16e} {flag}").unwrap();
        }
        for tri in &self.triangles {
            writeln!(out, "{} {} {}", tri[0], tri[1], tri[2]).unwrap();
        }
        fs::write(path, out)?;
        Ok(())
    }
}

/// Mesh a single-component domain with target element size `target_h`.
pub fn mesh_domain(boundary: &BoundaryPolyline, target_h: f64) -> Result<TriMesh> {
    if boundary.n_components() != 1 {
        return Err(Error::MeshGeneration(format!(
            "pipeline meshing handles a single boundary component, got {}",
            boundary.n_components()
        )));
    }
    if !(target_h > 0.0) || !target_h.is_finite() {
        return Err(Error::MeshGeneration(format!(
            "target element size must be positive, got {target_h}"
        )));
    }

    let (ring, arcs) = boundary.resample(0, target_h);
    let mut points = ring.clone();
    let mut arclens: Vec<Option<f64>> = arcs.iter().map(|&s| Some(s)).collect();

    // hexagonal interior lattice, clear of the boundary ring
    let ((x0, y0), (x1, y1)) = boundary.bbox();
    let row_step = target_h * 3.0f64.sqrt() / 2.0;
    let clearance = 0.62 * target_h;
    let mut row = 0usize;
    let mut y = y0 + 0.5 * row_step;
    while y < y1 {
        let x_off = if row % 2 == 0 { 0.5 } else { 0.0 };
        let mut k = 0usize;
        loop {
            let x = x0 + (k as f64 + x_off) * target_h;
            if x >= x1 {
                break;
            }
            // deterministic jitter breaks lattice cocircularity
            let (jx, jy) = jitter(row, k, 0.05 * target_h);
            let (px, py) = (x + jx, y + jy);
            if boundary.contains(px, py) && distance_to_ring(&ring, px, py) > clearance {
                points.push((px, py));
                arclens.push(None);
            }
            k += 1;
        }
        y += row_step;
        row += 1;
    }

    let triangles = bowyer_watson(&points)?;

    // keep triangles whose centroid lies inside the domain, oriented CCW
    let mut kept = Vec::new();
    for tri in triangles {
        let (ax, ay) = points[tri[0]];
        let (bx, by) = points[tri[1]];
        let (cx, cy) = points[tri[2]];
        let cxm = (ax + bx + cx) / 3.0;
        let cym = (ay + by + cy) / 3.0;
        if !boundary.contains(cxm, cym) {
            continue;
        }
        let area2 = (bx - ax) * (cy - ay) - (cx - ax) * (by - ay);
        if area2.abs() < 1e-14 * target_h * target_h {
            return Err(Error::MeshGeneration("degenerate triangle produced".into()));
        }
        if area2 > 0.0 {
            kept.push(tri);
        } else {
            kept.push([tri[0], tri[2], tri[1]]);
        }
    }

    let mesh = TriMesh {
        vertices: points,
        triangles: kept,
        boundary_arclen: arclens,
    };
    check_boundary_conformity(&mesh, ring.len())?;
    Ok(mesh)
}

fn jitter(row: usize, col: usize, amplitude: f64) -> (f64, f64) {
    // splitmix-style hash, deterministic across runs
    let mut h = (row as u64) << 32 | col as u64;
    h = h.wrapping_mul(0x9e3779b97f4a7c15);
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58476d1ce4e5b9);
    h ^= h >> 27;
    let a = (h & 0xffff) as f64 / 65535.0 - 0.5;
    let b = ((h >> 16) & 0xffff) as f64 / 65535.0 - 0.5;
    (2.0 * amplitude * a, 2.0 * amplitude * b)
}

fn distance_to_ring(ring: &[Point], x: f64, y: f64) -> f64 {
    let n = ring.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (ax, ay) = ring[i];
        let (bx, by) = ring[(i + 1) % n];
        let (dx, dy) = (bx - ax, by - ay);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (((x - ax) * dx + (y - ay) * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (px, py) = (ax + t * dx, ay + t * dy);
        best = best.min((x - px).hypot(y - py));
    }
    best
}

/// Incremental Bowyer-Watson Delaunay triangulation.
fn bowyer_watson(points: &[Point]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 3 {
        return Err(Error::MeshGeneration(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    // bounding super-triangle
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in points {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let n = points.len();
    let mut verts: Vec<Point> = points.to_vec();
    verts.push((cx - 20.0 * span, cy - 10.0 * span));
    verts.push((cx + 20.0 * span, cy - 10.0 * span));
    verts.push((cx, cy + 20.0 * span));

    struct Tri {
        v: [usize; 3],
        cc: Point,
        r2: f64,
    }
    let make_tri = |v: [usize; 3], verts: &[Point]| -> Tri {
        let (ax, ay) = verts[v[0]];
        let (bx, by) = verts[v[1]];
        let (cx, cy) = verts[v[2]];
        let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        if d.abs() < 1e-300 {
            return Tri {
                v,
                cc: (0.0, 0.0),
                r2: f64::MAX,
            };
        }
        let a2 = ax * ax + ay * ay;
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        let r2 = (ux - ax) * (ux - ax) + (uy - ay) * (uy - ay);
        Tri {
            v,
            cc: (ux, uy),
            r2,
        }
    };

    let mut tris: Vec<Tri> = vec![make_tri([n, n + 1, n + 2], &verts)];
    for p in 0..n {
        let (px, py) = verts[p];
        let mut bad = Vec::new();
        for (t, tri) in tris.iter().enumerate() {
            let dx = px - tri.cc.0;
            let dy = py - tri.cc.1;
            if dx * dx + dy * dy < tri.r2 * (1.0 - 1e-12) {
                bad.push(t);
            }
        }
        // boundary polygon of the cavity: edges appearing exactly once
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * bad.len());
        for &t in &bad {
            let v = tris[t].v;
            for k in 0..3 {
                let e = (v[k], v[(k + 1) % 3]);
                if let Some(pos) = edges.iter().position(|&(a, b)| (b, a) == e || (a, b) == e) {
                    edges.swap_remove(pos);
                } else {
                    edges.push(e);
                }
            }
        }
        bad.sort_unstable_by(|a, b| b.cmp(a));
        for t in bad {
            tris.swap_remove(t);
        }
        for (a, b) in edges {
            tris.push(make_tri([a, b, p], &verts));
        }
    }

    Ok(tris
        .into_iter()
        .filter(|t| t.v.iter().all(|&v| v < n))
        .map(|t| t.v)
        .collect())
}

/// Every consecutive pair of boundary ring vertices must be a mesh edge.
fn check_boundary_conformity(mesh: &TriMesh, ring_len: usize) -> Result<()> {
    use std::collections::HashSet;
    let mut edges = HashSet::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    for i in 0..ring_len {
        let j = (i + 1) % ring_len;
        if !edges.contains(&(i.min(j), i.max(j))) {
            return Err(Error::MeshGeneration(format!(
                "boundary edge {i}-{j} is not conforming"
            )));
        }
    }
    Ok(())
}
