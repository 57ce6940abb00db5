//! Degrees of freedom of the active flux discretizations, stored as flat
//! indexable vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{GridSpec1D, GridSpec2D};
use crate::{Error, Result};

/// 1D AF state: cell averages of `p` and `u` plus point values at the
/// interfaces `x_{i+1/2}` (index `i` holds the right edge of cell `i`).
///
/// The same layout doubles as a right-hand side (time derivative of each
/// DOF).
#[derive(Debug, Clone, PartialEq)]
pub struct State1D {
    pub avg_p: Vec<f64>,
    pub avg_u: Vec<f64>,
    pub pt_p: Vec<f64>,
    pub pt_u: Vec<f64>,
}

/// Number of flattened entries per 1D cell.
pub const DOFS_PER_CELL_1D: usize = 4;

impl State1D {
    pub fn zeros(n: usize) -> Self {
        Self {
            avg_p: vec![0.0; n],
            avg_u: vec![0.0; n],
            pt_p: vec![0.0; n],
            pt_u: vec![0.0; n],
        }
    }

    /// Constant state: `avg_p = pt_p = p`, `avg_u = pt_u = u`.
    pub fn constant(n: usize, p: f64, u: f64) -> Self {
        Self {
            avg_p: vec![p; n],
            avg_u: vec![u; n],
            pt_p: vec![p; n],
            pt_u: vec![u; n],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.avg_p.len()
    }

    pub fn is_finite(&self) -> bool {
        self.avg_p
            .iter()
            .chain(&self.avg_u)
            .chain(&self.pt_p)
            .chain(&self.pt_u)
            .all(|v| v.is_finite())
    }

    pub fn check_grid(&self, grid: &GridSpec1D) -> Result<()> {
        let n = self.n_cells();
        if self.avg_u.len() != n || self.pt_p.len() != n || self.pt_u.len() != n {
            return Err(Error::ShapeMismatch(alloc::format!(
                "ragged 1D state ({}, {}, {}, {})",
                n,
                self.avg_u.len(),
                self.pt_p.len(),
                self.pt_u.len()
            )));
        }
        if n != grid.n_cells() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "state has {} cells, grid has {}",
                n,
                grid.n_cells()
            )));
        }
        Ok(())
    }

    /// Flatten to the interleaved global layout
    /// `[avg_p_i, avg_u_i, pt_p_i, pt_u_i]` per cell, which keeps the
    /// assembled operator narrowly banded.
    pub fn to_flat(&self) -> Vec<f64> {
        let n = self.n_cells();
        let mut w = Vec::with_capacity(DOFS_PER_CELL_1D * n);
        for i in 0..n {
            w.push(self.avg_p[i]);
            w.push(self.avg_u[i]);
            w.push(self.pt_p[i]);
            w.push(self.pt_u[i]);
        }
        w
    }

    pub fn from_flat(w: &[f64]) -> Result<Self> {
        if w.len() % DOFS_PER_CELL_1D != 0 {
            return Err(Error::ShapeMismatch(alloc::format!(
                "flat length {} not a multiple of {DOFS_PER_CELL_1D}",
                w.len()
            )));
        }
        let n = w.len() / DOFS_PER_CELL_1D;
        let mut s = Self::zeros(n);
        for i in 0..n {
            s.avg_p[i] = w[4 * i];
            s.avg_u[i] = w[4 * i + 1];
            s.pt_p[i] = w[4 * i + 2];
            s.pt_u[i] = w[4 * i + 3];
        }
        Ok(s)
    }
}

/// Flat indices of the 1D families within a cell block.
pub mod flat1d {
    pub const AVG_P: usize = 0;
    pub const AVG_U: usize = 1;
    pub const PT_P: usize = 2;
    pub const PT_U: usize = 3;
}

/// One variable's 2D DOFs: cell averages, face-centered point values and
/// corner (nodal) values, each on an `n1 x n2` periodic lattice in
/// row-major order (`idx = i * n2 + j`).
///
/// `facex[i,j]` sits at `(x_{i+1/2}, y_j)`, `facey[i,j]` at
/// `(x_i, y_{j+1/2})`, `corner[i,j]` at `(x_{i+1/2}, y_{j+1/2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub avg: Vec<f64>,
    pub facex: Vec<f64>,
    pub facey: Vec<f64>,
    pub corner: Vec<f64>,
}

impl Field2D {
    pub fn zeros(n: usize) -> Self {
        Self {
            avg: vec![0.0; n],
            facex: vec![0.0; n],
            facey: vec![0.0; n],
            corner: vec![0.0; n],
        }
    }

    pub fn constant(n: usize, v: f64) -> Self {
        Self {
            avg: vec![v; n],
            facex: vec![v; n],
            facey: vec![v; n],
            corner: vec![v; n],
        }
    }

    fn is_finite(&self) -> bool {
        self.avg
            .iter()
            .chain(&self.facex)
            .chain(&self.facey)
            .chain(&self.corner)
            .all(|v| v.is_finite())
    }
}

/// 2D AF state for the variables `p, u, v`: twelve `n1 x n2` arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct State2D {
    pub n1: usize,
    pub n2: usize,
    pub p: Field2D,
    pub u: Field2D,
    pub v: Field2D,
}

/// Number of flattened entries per 2D cell.
pub const DOFS_PER_CELL_2D: usize = 12;

impl State2D {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        let n = n1 * n2;
        Self {
            n1,
            n2,
            p: Field2D::zeros(n),
            u: Field2D::zeros(n),
            v: Field2D::zeros(n),
        }
    }

    pub fn constant(n1: usize, n2: usize, p: f64, u: f64, v: f64) -> Self {
        let n = n1 * n2;
        Self {
            n1,
            n2,
            p: Field2D::constant(n, p),
            u: Field2D::constant(n, u),
            v: Field2D::constant(n, v),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.u.is_finite() && self.v.is_finite()
    }

    pub fn check_grid(&self, grid: &GridSpec2D) -> Result<()> {
        if self.n1 != grid.n1() || self.n2 != grid.n2() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "state is {}x{}, grid is {}x{}",
                self.n1,
                self.n2,
                grid.n1(),
                grid.n2()
            )));
        }
        Ok(())
    }

    /// Flatten to the per-cell layout
    /// `[avg_p, avg_u, avg_v, fx_p, fx_u, fx_v, fy_p, fy_u, fy_v, co_p, co_u, co_v]`
    /// with cells in row-major order.
    pub fn to_flat(&self) -> Vec<f64> {
        let n = self.n1 * self.n2;
        let mut w = Vec::with_capacity(DOFS_PER_CELL_2D * n);
        for c in 0..n {
            w.push(self.p.avg[c]);
            w.push(self.u.avg[c]);
            w.push(self.v.avg[c]);
            w.push(self.p.facex[c]);
            w.push(self.u.facex[c]);
            w.push(self.v.facex[c]);
            w.push(self.p.facey[c]);
            w.push(self.u.facey[c]);
            w.push(self.v.facey[c]);
            w.push(self.p.corner[c]);
            w.push(self.u.corner[c]);
            w.push(self.v.corner[c]);
        }
        w
    }

    pub fn from_flat(n1: usize, n2: usize, w: &[f64]) -> Result<Self> {
        let n = n1 * n2;
        if w.len() != DOFS_PER_CELL_2D * n {
            return Err(Error::ShapeMismatch(alloc::format!(
                "flat length {} for {n1}x{n2} grid",
                w.len()
            )));
        }
        let mut s = Self::zeros(n1, n2);
        for c in 0..n {
            let b = DOFS_PER_CELL_2D * c;
            s.p.avg[c] = w[b];
            s.u.avg[c] = w[b + 1];
            s.v.avg[c] = w[b + 2];
            s.p.facex[c] = w[b + 3];
            s.u.facex[c] = w[b + 4];
            s.v.facex[c] = w[b + 5];
            s.p.facey[c] = w[b + 6];
            s.u.facey[c] = w[b + 7];
            s.v.facey[c] = w[b + 8];
            s.p.corner[c] = w[b + 9];
            s.u.corner[c] = w[b + 10];
            s.v.corner[c] = w[b + 11];
        }
        Ok(s)
    }
}

/// Flat offsets of the 2D families within a cell block.
pub mod flat2d {
    pub const AVG_P: usize = 0;
    pub const AVG_U: usize = 1;
    pub const AVG_V: usize = 2;
    pub const FX_P: usize = 3;
    pub const FX_U: usize = 4;
    pub const FX_V: usize = 5;
    pub const FY_P: usize = 6;
    pub const FY_U: usize = 7;
    pub const FY_V: usize = 8;
    pub const CO_P: usize = 9;
    pub const CO_U: usize = 10;
    pub const CO_V: usize = 11;
}

/// Leading-order state of the 1D limit (heat) schemes: pressure only,
/// `u^(0)` is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitState1D {
    pub avg_p: Vec<f64>,
    pub pt_p: Vec<f64>,
}

impl LimitState1D {
    pub fn zeros(n: usize) -> Self {
        Self {
            avg_p: vec![0.0; n],
            pt_p: vec![0.0; n],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.avg_p.len()
    }

    pub fn is_finite(&self) -> bool {
        self.avg_p
            .iter()
            .chain(&self.pt_p)
            .all(|v| v.is_finite())
    }

    /// Interleaved layout `[avg_p_i, pt_p_i]` per cell.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(2 * self.n_cells());
        for i in 0..self.n_cells() {
            w.push(self.avg_p[i]);
            w.push(self.pt_p[i]);
        }
        w
    }

    pub fn from_flat(w: &[f64]) -> Result<Self> {
        if w.len() % 2 != 0 {
            return Err(Error::ShapeMismatch(alloc::format!(
                "flat length {} not even",
                w.len()
            )));
        }
        let n = w.len() / 2;
        let mut s = Self::zeros(n);
        for i in 0..n {
            s.avg_p[i] = w[2 * i];
            s.pt_p[i] = w[2 * i + 1];
        }
        Ok(s)
    }
}

/// Leading-order state of the 2D limit scheme: the pressure field only.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitState2D {
    pub n1: usize,
    pub n2: usize,
    pub p: Field2D,
}

impl LimitState2D {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            p: Field2D::zeros(n1 * n2),
        }
    }
}
