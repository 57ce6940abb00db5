//! Model parameters: scaling parameter, absorption coefficient, scheme variant.

use alloc::format;
use alloc::vec::Vec;

use crate::grid::{GridSpec1D, GridSpec2D};
use crate::{Error, Result};

/// Point-value update choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Jacobian splitting: upwinding along the characteristics.
    Js,
    /// Alternating flux: left bias on one variable, right bias on the other.
    /// Stable in 1D only.
    Alt,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Js => "js",
            Variant::Alt => "alt",
        }
    }
}

/// `sigma` sampled at every 1D DOF location: cell centers for the average
/// equations, interfaces for the point-value equations. This placement keeps
/// constant states exactly steady for variable `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSamples1D {
    pub center: Vec<f64>,
    pub interface: Vec<f64>,
}

/// `sigma` sampled at every 2D DOF location.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSamples2D {
    pub center: Vec<f64>,
    pub facex: Vec<f64>,
    pub facey: Vec<f64>,
    pub corner: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams1D {
    pub epsilon: f64,
    pub variant: Variant,
    pub sigma: SigmaSamples1D,
}

impl ModelParams1D {
    pub fn constant_sigma(
        epsilon: f64,
        variant: Variant,
        sigma: f64,
        grid: &GridSpec1D,
    ) -> Result<Self> {
        Self::with_sigma(epsilon, variant, grid, |_| sigma)
    }

    pub fn with_sigma(
        epsilon: f64,
        variant: Variant,
        grid: &GridSpec1D,
        sigma: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        let n = grid.n_cells();
        let center: Vec<f64> = (0..n).map(|i| sigma(grid.cell_center(i))).collect();
        let interface: Vec<f64> = (0..n).map(|i| sigma(grid.interface(i))).collect();
        check_sigma(center.iter().chain(interface.iter()))?;
        Ok(Self {
            epsilon,
            variant,
            sigma: SigmaSamples1D { center, interface },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams2D {
    pub epsilon: f64,
    pub variant: Variant,
    pub sigma: SigmaSamples2D,
}

impl ModelParams2D {
    pub fn constant_sigma(
        epsilon: f64,
        variant: Variant,
        sigma: f64,
        grid: &GridSpec2D,
    ) -> Result<Self> {
        Self::with_sigma(epsilon, variant, grid, |_, _| sigma)
    }

    pub fn with_sigma(
        epsilon: f64,
        variant: Variant,
        grid: &GridSpec2D,
        sigma: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        if variant != Variant::Js {
            // No stable 2D alternating-flux prescription exists.
            return Err(Error::VariantMismatch { expected: "js" });
        }
        let (n1, n2) = (grid.n1(), grid.n2());
        let mut center = Vec::with_capacity(n1 * n2);
        let mut facex = Vec::with_capacity(n1 * n2);
        let mut facey = Vec::with_capacity(n1 * n2);
        let mut corner = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                center.push(sigma(grid.x_center(i), grid.y_center(j)));
                facex.push(sigma(grid.x_interface(i), grid.y_center(j)));
                facey.push(sigma(grid.x_center(i), grid.y_interface(j)));
                corner.push(sigma(grid.x_interface(i), grid.y_interface(j)));
            }
        }
        check_sigma(
            center
                .iter()
                .chain(facex.iter())
                .chain(facey.iter())
                .chain(corner.iter()),
        )?;
        Ok(Self {
            epsilon,
            variant: Variant::Js,
            sigma: SigmaSamples2D {
                center,
                facex,
                facey,
                corner,
            },
        })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParams(format!("epsilon = {epsilon}")));
    }
    Ok(())
}

fn check_sigma<'a>(values: impl Iterator<Item = &'a f64>) -> Result<()> {
    for &s in values {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParams(format!(
                "sigma must be positive and finite, got {s}"
            )));
        }
    }
    Ok(())
}
