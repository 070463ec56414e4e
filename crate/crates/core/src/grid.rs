//! Uniform periodic grids in one or two dimensions.
//!
//! Coordinates run from `-extent/2` in steps of `dx = extent / points`, so the
//! last point sits one spacing short of `+extent/2` (the periodic image of the
//! first point).

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

pub const MIN_POINTS: usize = 8;

/// User-facing grid description. The number of axes is the length of `extent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub extent: Vec<f64>,
    pub points: Vec<usize>,
}

impl GridSpec {
    pub fn new_1d(extent: f64, points: usize) -> Self {
        Self { extent: vec![extent], points: vec![points] }
    }

    pub fn new_2d(extent: [f64; 2], points: [usize; 2]) -> Self {
        Self { extent: extent.to_vec(), points: points.to_vec() }
    }
}

/// A validated, immutable grid. Unused axes of a 1D grid have one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dims: usize,
    extent: [f64; 2],
    points: [usize; 2],
    spacing: [f64; 2],
}

impl Grid {
    /// Validates `spec` and derives the spacing. Spectral capability is
    /// checked separately by [`build_grid`] or at operator call sites.
    pub fn new(spec: &GridSpec) -> Result<Self> {
        let dims = spec.extent.len();
        if dims != spec.points.len() {
            return config(format!("grid has {} extents but {} point counts", dims, spec.points.len()));
        }
        if !(1..=2).contains(&dims) {
            return config(format!("grid must have 1 or 2 dims, got {dims}"));
        }
        let mut extent = [1.0; 2];
        let mut points = [1usize; 2];
        let mut spacing = [1.0; 2];
        for axis in 0..dims {
            let (l, n) = (spec.extent[axis], spec.points[axis]);
            if !(l.is_finite() && l > 0.0) {
                return config(format!("grid extent on axis {axis} must be positive, got {l}"));
            }
            if n < MIN_POINTS {
                return config(format!("grid needs at least {MIN_POINTS} points per axis, axis {axis} has {n}"));
            }
            extent[axis] = l;
            points[axis] = n;
            spacing[axis] = l / n as f64;
        }
        Ok(Self { dims, extent, points, spacing })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.points[0] * self.points[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self, axis: usize) -> usize {
        self.points[axis]
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.extent[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    /// Volume element `dx` (1D) or `dx·dy` (2D).
    pub fn cell_volume(&self) -> f64 {
        (0..self.dims).map(|a| self.spacing[a]).product()
    }

    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        -0.5 * self.extent[axis] + j as f64 * self.spacing[axis]
    }

    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|j| self.coordinate(axis, j)).collect()
    }

    /// Row-major flat index; axis 1 is contiguous.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.points[1] + j
    }

    /// Inverse of [`Grid::index`].
    pub fn unravel(&self, flat: usize) -> [usize; 2] {
        [flat / self.points[1], flat % self.points[1]]
    }

    /// Physical position of a flat index (second entry is 0 in 1D).
    pub fn position(&self, flat: usize) -> [f64; 2] {
        let [i, j] = self.unravel(flat);
        let y = if self.dims == 2 { self.coordinate(1, j) } else { 0.0 };
        [self.coordinate(0, i), y]
    }

    /// Flat index of the point nearest the coordinate origin.
    pub fn origin_index(&self) -> usize {
        let i = self.points[0] / 2;
        let j = if self.dims == 2 { self.points[1] / 2 } else { 0 };
        self.index(i, j)
    }

    pub fn is_spectral_capable(&self) -> bool {
        (0..self.dims).all(|a| self.points[a].is_power_of_two())
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec { extent: self.extent[..self.dims].to_vec(), points: self.points[..self.dims].to_vec() }
    }

    /// Wraps a coordinate into `[-extent/2, extent/2)`.
    pub fn wrap(&self, axis: usize, x: f64) -> f64 {
        let l = self.extent[axis];
        let shifted = (x + 0.5 * l).rem_euclid(l);
        // rem_euclid can round up to exactly l
        let shifted = if shifted >= l { 0.0 } else { shifted };
        shifted - 0.5 * l
    }
}

/// Builds a grid and, when `spectral` is set, insists on power-of-two axes.
pub fn build_grid(spec: &GridSpec, spectral: bool) -> Result<Grid> {
    let grid = Grid::new(spec)?;
    if spectral && !grid.is_spectral_capable() {
        return config(format!("spectral operators need power-of-two points per axis, got {:?}", spec.points));
    }
    Ok(grid)
}
