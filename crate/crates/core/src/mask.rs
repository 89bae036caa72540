//! Characteristic function of the domain sampled at pixel centres.

use crate::boundary::BoundaryPolyline;
use crate::error::{Error, Result};
use crate::grid::{Grid2, SymTensorField2};

/// `χ(pixel centre)` for every pixel of a grid; values are exactly 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    pub grid: Grid2,
    inside: Vec<bool>,
}

impl Mask {
    /// Classify every pixel centre against the boundary polyline with the
    /// even-odd rule; centres on the boundary count as inside.
    pub fn from_boundary(grid: Grid2, boundary: &BoundaryPolyline) -> Result<Self> {
        let ((bx0, by0), (bx1, by1)) = boundary.bbox();
        if bx0 < grid.xmin || bx1 > grid.xmax || by0 < grid.ymin || by1 > grid.ymax {
            return Err(Error::InvalidGrid(format!(
                "grid [{}, {}] x [{}, {}] does not contain the boundary bbox [{bx0}, {bx1}] x [{by0}, {by1}]",
                grid.xmin, grid.xmax, grid.ymin, grid.ymax
            )));
        }
        let mut inside = vec![false; grid.len()];
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            for ix in 0..grid.nx {
                inside[grid.idx(ix, iy)] = boundary.contains(grid.x(ix), y);
            }
        }
        Ok(Mask { grid, inside })
    }

    pub fn all(grid: Grid2) -> Self {
        Mask {
            grid,
            inside: vec![true; grid.len()],
        }
    }

    pub fn none(grid: Grid2) -> Self {
        Mask {
            grid,
            inside: vec![false; grid.len()],
        }
    }

    pub fn is_inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn interior_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn values(&self) -> &[bool] {
        &self.inside
    }
}

/// Componentwise product of a tensor field with the characteristic function.
pub fn mask_field(field: &SymTensorField2, mask: &Mask) -> Result<SymTensorField2> {
    if field.grid != mask.grid {
        return Err(Error::InvalidField("mask/field grid mismatch".into()));
    }
    let mut out = field.clone();
    for comp in out.components_mut() {
        for (v, &keep) in comp.iter_mut().zip(&mask.inside) {
            if !keep {
                *v = 0.0;
            }
        }
    }
    Ok(out)
}
