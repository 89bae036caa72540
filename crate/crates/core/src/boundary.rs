//! Closed polyline boundaries: the discretised version of `∂Ω`.
//!
//! A boundary consists of one or more closed node loops. The loop ordering
//! convention is counter-clockwise for outer boundaries and clockwise for
//! holes; loops read from files are re-oriented to match. Point-in-domain
//! queries use the even-odd rule, so the material region of an annulus is the
//! area between its two loops.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolyline {
    components: Vec<Vec<Point>>,
}

impl BoundaryPolyline {
    /// Build from node loops, validating and normalising orientation.
    pub fn new(components: Vec<Vec<Point>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidBoundary("no components".into()));
        }
        for (c, loop_) in components.iter().enumerate() {
            if loop_.len() < 3 {
                return Err(Error::InvalidBoundary(format!(
                    "component {c} has {} nodes, need at least 3",
                    loop_.len()
                )));
            }
            if loop_.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
                return Err(Error::InvalidBoundary(format!(
                    "component {c} has non-finite node"
                )));
            }
            if signed_area(loop_).abs() < 1e-300 {
                return Err(Error::InvalidBoundary(format!(
                    "component {c} is degenerate (zero area)"
                )));
            }
        }
        let mut boundary = BoundaryPolyline { components };
        boundary.check_simple()?;
        boundary.check_disjoint()?;
        boundary.normalize_orientation();
        Ok(boundary)
    }

    /// Regular `n`-gon approximation of a circle, counter-clockwise.
    pub fn circle(cx: f64, cy: f64, r: f64, n: usize) -> Result<Self> {
        Self::circle_with_phase(cx, cy, r, n, 0.0)
    }

    /// Circle approximation with the first node at azimuth `phase`. A generic
    /// phase avoids exact node/ray alignment when the node count is
    /// commensurate with the number of scan directions.
    pub fn circle_with_phase(cx: f64, cy: f64, r: f64, n: usize, phase: f64) -> Result<Self> {
        let nodes = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64 + phase;
                (cx + r * t.cos(), cy + r * t.sin())
            })
            .collect();
        BoundaryPolyline::new(vec![nodes])
    }

    /// Disk of radius `r_outer` with a concentric circular hole.
    pub fn annulus(cx: f64, cy: f64, r_outer: f64, r_inner: f64, n: usize) -> Result<Self> {
        if !(r_outer > r_inner && r_inner > 0.0) {
            return Err(Error::InvalidBoundary(format!(
                "annulus radii must satisfy 0 < inner < outer, got {r_inner}, {r_outer}"
            )));
        }
        let outer = Self::circle(cx, cy, r_outer, n)?;
        let inner = Self::circle(cx, cy, r_inner, n)?;
        let mut components = outer.components;
        components.extend(inner.components);
        BoundaryPolyline::new(components)
    }

    pub fn components(&self) -> &[Vec<Point>] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Total node count over all components.
    pub fn n_nodes(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }

    /// Flattened node list; the global node numbering used by the recovery
    /// system is component-major in this order.
    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        self.components.iter().flatten().copied()
    }

    /// Offset of a component's first node in the global numbering.
    pub fn component_offset(&self, comp: usize) -> usize {
        self.components[..comp].iter().map(|c| c.len()).sum()
    }

    /// Even-odd containment test; points on the boundary count as inside.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let mut inside = false;
        for loop_ in &self.components {
            let n = loop_.len();
            for i in 0..n {
                let (x1, y1) = loop_[i];
                let (x2, y2) = loop_[(i + 1) % n];
                if on_segment(x, y, x1, y1, x2, y2) {
                    return true;
                }
                if (y1 > y) != (y2 > y) {
                    let xc = x1 + (y - y1) / (y2 - y1) * (x2 - x1);
                    if x < xc {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    /// Axis-aligned bounding box over all nodes.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (x, y) in self.nodes() {
            lo.0 = lo.0.min(x);
            lo.1 = lo.1.min(y);
            hi.0 = hi.0.max(x);
            hi.1 = hi.1.max(y);
        }
        (lo, hi)
    }

    /// Cumulative arc length of a component's nodes; entry `i` is the length
    /// from node 0 to node `i`, plus the closing total as a final entry.
    pub fn arclengths(&self, comp: usize) -> Vec<f64> {
        let loop_ = &self.components[comp];
        let n = loop_.len();
        let mut acc = Vec::with_capacity(n + 1);
        let mut s = 0.0;
        acc.push(0.0);
        for i in 0..n {
            let (x1, y1) = loop_[i];
            let (x2, y2) = loop_[(i + 1) % n];
            s += (x2 - x1).hypot(y2 - y1);
            acc.push(s);
        }
        acc
    }

    /// Resample a component at roughly uniform spacing; the returned points
    /// lie exactly on the polyline segments. Also returns each point's arc
    /// length position.
    pub fn resample(&self, comp: usize, spacing: f64) -> (Vec<Point>, Vec<f64>) {
        let loop_ = &self.components[comp];
        let arcs = self.arclengths(comp);
        let total = *arcs.last().unwrap();
        let count = ((total / spacing).round() as usize).max(3);
        let step = total / count as f64;
        let mut pts = Vec::with_capacity(count);
        let mut svals = Vec::with_capacity(count);
        let mut seg = 0usize;
        for k in 0..count {
            let s = k as f64 * step;
            while arcs[seg + 1] < s && seg + 1 < loop_.len() {
                seg += 1;
            }
            let (x1, y1) = loop_[seg];
            let (x2, y2) = loop_[(seg + 1) % loop_.len()];
            let len = arcs[seg + 1] - arcs[seg];
            let t = if len > 0.0 { (s - arcs[seg]) / len } else { 0.0 };
            pts.push((x1 + t * (x2 - x1), y1 + t * (y2 - y1)));
            svals.push(s);
        }
        (pts, svals)
    }

    /// Write in the BDY text format.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        writeln!(out, "BDY {}", self.components.len()).unwrap();
        for loop_ in &self.components {
            writeln!(out, "LOOP {}", loop_.len()).unwrap();
            for (x, y) in loop_ {
                writeln!(out, "{x:.16e} {y:.16e}").unwrap();
            }
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let perr = |msg: String| Error::Parse {
            path: path.display().to_string(),
            msg,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| perr("empty file".into()))?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        if tokens.len() != 2 || tokens[0] != "BDY" {
            return Err(perr("expected `BDY n_components` header".into()));
        }
        let n_comp: usize = tokens[1]
            .parse()
            .map_err(|_| perr("bad component count".into()))?;
        let mut components = Vec::with_capacity(n_comp);
        for _ in 0..n_comp {
            let loop_header = lines.next().ok_or_else(|| perr("missing LOOP".into()))?;
            let tokens: Vec<&str> = loop_header.split_whitespace().collect();
            if tokens.len() != 2 || tokens[0] != "LOOP" {
                return Err(perr("expected `LOOP n_nodes`".into()));
            }
            let n_nodes: usize = tokens[1].parse().map_err(|_| perr("bad node count".into()))?;
            let mut nodes = Vec::with_capacity(n_nodes);
            for _ in 0..n_nodes {
                let line = lines.next().ok_or_else(|| perr("missing node line".into()))?;
                let vals = crate::grid::parse_floats(line, 2).map_err(|m| perr(m))?;
                nodes.push((vals[0], vals[1]));
            }
            components.push(nodes);
        }
        BoundaryPolyline::new(components)
    }

    fn check_simple(&self) -> Result<()> {
        for (c, loop_) in self.components.iter().enumerate() {
            let n = loop_.len();
            for i in 0..n {
                for j in (i + 1)..n {
                    // skip segments sharing a node
                    if j == i || (j + 1) % n == i || (i + 1) % n == j {
                        continue;
                    }
                    if segments_cross(loop_[i], loop_[(i + 1) % n], loop_[j], loop_[(j + 1) % n]) {
                        return Err(Error::InvalidBoundary(format!(
                            "component {c} is self-intersecting (segments {i} and {j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_disjoint(&self) -> Result<()> {
        let m = self.components.len();
        for a in 0..m {
            for b in (a + 1)..m {
                let la = &self.components[a];
                let lb = &self.components[b];
                for i in 0..la.len() {
                    for j in 0..lb.len() {
                        if segments_cross(
                            la[i],
                            la[(i + 1) % la.len()],
                            lb[j],
                            lb[(j + 1) % lb.len()],
                        ) {
                            return Err(Error::InvalidBoundary(format!(
                                "components {a} and {b} intersect"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Outer loops CCW, holes CW. A loop is a hole iff it sits inside an odd
    /// number of the other loops.
    fn normalize_orientation(&mut self) {
        let probes: Vec<Point> = self.components.iter().map(|l| l[0]).collect();
        for (c, probe) in probes.iter().enumerate() {
            let mut depth = 0usize;
            for (other, loop_) in self.components.iter().enumerate() {
                if other != c && point_in_loop(probe.0, probe.1, loop_) {
                    depth += 1;
                }
            }
            let want_ccw = depth % 2 == 0;
            let is_ccw = signed_area(&self.components[c]) > 0.0;
            if want_ccw != is_ccw {
                self.components[c].reverse();
            }
        }
    }
}

/// Infinitesimal rigid body motion `(c1 - x2 b, c2 + x1 b)` evaluated at every
/// boundary node, in global node order.
pub fn rigid_motion_nodes(boundary: &BoundaryPolyline, c1: f64, c2: f64, beta: f64) -> Vec<Point> {
    boundary
        .nodes()
        .map(|(x, y)| (c1 - y * beta, c2 + x * beta))
        .collect()
}

/// Same motion restricted to one component, zero on all other nodes.
pub fn rigid_motion_component(
    boundary: &BoundaryPolyline,
    comp: usize,
    c1: f64,
    c2: f64,
    beta: f64,
) -> Vec<Point> {
    let mut out = vec![(0.0, 0.0); boundary.n_nodes()];
    let off = boundary.component_offset(comp);
    for (k, (x, y)) in boundary.components()[comp].iter().enumerate() {
        out[off + k] = (c1 - y * beta, c2 + x * beta);
    }
    out
}

fn signed_area(loop_: &[Point]) -> f64 {
    let n = loop_.len();
    let mut a = 0.0;
    for i in 0..n {
        let (x1, y1) = loop_[i];
        let (x2, y2) = loop_[(i + 1) % n];
        a += x1 * y2 - x2 * y1;
    }
    0.5 * a
}

fn point_in_loop(x: f64, y: f64, loop_: &[Point]) -> bool {
    let n = loop_.len();
    let mut inside = false;
    for i in 0..n {
        let (x1, y1) = loop_[i];
        let (x2, y2) = loop_[(i + 1) % n];
        if (y1 > y) != (y2 > y) {
            let xc = x1 + (y - y1) / (y2 - y1) * (x2 - x1);
            if x < xc {
                inside = !inside;
            }
        }
    }
    inside
}

fn on_segment(px: f64, py: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> bool {
    let dx = x2 - x1;
    let dy = y2 - y1;
    let cross = (px - x1) * dy - (py - y1) * dx;
    let scale = dx.abs().max(dy.abs()).max(1e-300);
    if cross.abs() > 1e-13 * scale {
        return false;
    }
    let dot = (px - x1) * dx + (py - y1) * dy;
    dot >= 0.0 && dot <= dx * dx + dy * dy
}

/// Strict proper-crossing test; shared endpoints and collinear touches do not
/// count.
fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient = |p: Point, q: Point, r: Point| (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}
