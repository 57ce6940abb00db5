//! Uniform periodic grids.

use alloc::format;

use crate::{Error, Result};

/// Smallest cell count for which the widest point-value stencil does not
/// wrap onto itself.
pub const MIN_CELLS: usize = 4;

/// Uniform 1D grid on `[x_min, x_max]`, periodic.
///
/// Cell `i` spans `[x_min + i dx, x_min + (i+1) dx]`; interface `i` is the
/// right edge of cell `i`, i.e. `x_{i+1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    dx: f64,
}

impl GridSpec1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "empty or non-finite interval [{x_min}, {x_max}]"
            )));
        }
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "{n_cells} cells, need at least {MIN_CELLS}"
            )));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            dx,
        })
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Center of cell `i`: `x_i = x_min + (i + 1/2) dx`.
    #[inline]
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    /// Interface `x_{i+1/2}`, the right edge of cell `i`.
    #[inline]
    pub fn interface(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 1.0) * self.dx
    }

    /// Periodic index wrap: `-1` maps to `n_cells - 1`.
    #[inline]
    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.n_cells as isize) as usize
    }
}

/// Uniform 2D Cartesian grid on `[x_min, x_max] x [y_min, y_max]`,
/// periodic in both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec2D {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    n1: usize,
    n2: usize,
    dx: f64,
    dy: f64,
}

impl GridSpec2D {
    pub fn new(
        x_range: (f64, f64),
        y_range: (f64, f64),
        n1: usize,
        n2: usize,
    ) -> Result<Self> {
        let gx = GridSpec1D::new(x_range.0, x_range.1, n1)?;
        let gy = GridSpec1D::new(y_range.0, y_range.1, n2)?;
        Ok(Self {
            x_min: x_range.0,
            x_max: x_range.1,
            y_min: y_range.0,
            y_max: y_range.1,
            n1,
            n2,
            dx: gx.dx(),
            dy: gy.dx(),
        })
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.n1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.n2
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n1 * self.n2
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn dy(&self) -> f64 {
        self.dy
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    #[inline]
    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    #[inline]
    pub fn x_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn y_center(&self, j: usize) -> f64 {
        self.y_min + (j as f64 + 0.5) * self.dy
    }

    /// Interface `x_{i+1/2}`.
    #[inline]
    pub fn x_interface(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 1.0) * self.dx
    }

    /// Interface `y_{j+1/2}`.
    #[inline]
    pub fn y_interface(&self, j: usize) -> f64 {
        self.y_min + (j as f64 + 1.0) * self.dy
    }

    #[inline]
    pub fn wrap1(&self, i: isize) -> usize {
        i.rem_euclid(self.n1 as isize) as usize
    }

    #[inline]
    pub fn wrap2(&self, j: isize) -> usize {
        j.rem_euclid(self.n2 as isize) as usize
    }

    /// Row-major linear index of cell `(i, j)`.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    /// Linear index with periodic wrap of both components.
    #[inline]
    pub fn idx_wrapped(&self, i: isize, j: isize) -> usize {
        self.wrap1(i) * self.n2 + self.wrap2(j)
    }
}
