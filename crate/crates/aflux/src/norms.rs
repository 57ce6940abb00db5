//! Discrete error norms per DOF family.
//!
//! Conventions: `L1 = h * sum |e|`, `L2 = sqrt(h * sum e^2)`,
//! `Linf = max |e|`, with `h = dx` in 1D and `h = dx*dy` in 2D (equal
//! weights on every DOF of a family, point families included).

use alloc::vec::Vec;
use num_traits::Float;

use crate::grid::{GridSpec1D, GridSpec2D};
use crate::state::{LimitState1D, State1D, State2D};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl Norms {
    /// Weighted norms of `a - b`.
    pub fn of_difference(a: &[f64], b: &[f64], weight: f64) -> Self {
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        let mut linf: f64 = 0.0;
        for (x, y) in a.iter().zip(b.iter()) {
            let e = (x - y).abs();
            l1 += e;
            l2 += e * e;
            linf = linf.max(e);
        }
        Norms {
            l1: weight * l1,
            l2: (weight * l2).sqrt(),
            linf,
        }
    }
}

/// Error norms of `numerical - reference`, one entry per DOF family.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub families: Vec<(&'static str, Norms)>,
}

impl ErrorReport {
    pub fn get(&self, family: &str) -> Option<&Norms> {
        self.families
            .iter()
            .find(|(name, _)| *name == family)
            .map(|(_, n)| n)
    }

    pub fn max_linf(&self) -> f64 {
        self.families
            .iter()
            .fold(0.0, |acc, (_, n)| acc.max(n.linf))
    }
}

pub fn error_norms_1d(
    numerical: &State1D,
    reference: &State1D,
    grid: &GridSpec1D,
) -> Result<ErrorReport> {
    numerical.check_grid(grid)?;
    reference.check_grid(grid)?;
    let w = grid.dx();
    Ok(ErrorReport {
        families: alloc::vec![
            ("avg_p", Norms::of_difference(&numerical.avg_p, &reference.avg_p, w)),
            ("avg_u", Norms::of_difference(&numerical.avg_u, &reference.avg_u, w)),
            ("pt_p", Norms::of_difference(&numerical.pt_p, &reference.pt_p, w)),
            ("pt_u", Norms::of_difference(&numerical.pt_u, &reference.pt_u, w)),
        ],
    })
}

pub fn error_norms_2d(
    numerical: &State2D,
    reference: &State2D,
    grid: &GridSpec2D,
) -> Result<ErrorReport> {
    numerical.check_grid(grid)?;
    reference.check_grid(grid)?;
    let w = grid.dx() * grid.dy();
    let n = |a: &[f64], b: &[f64]| Norms::of_difference(a, b, w);
    Ok(ErrorReport {
        families: alloc::vec![
            ("avg_p", n(&numerical.p.avg, &reference.p.avg)),
            ("avg_u", n(&numerical.u.avg, &reference.u.avg)),
            ("avg_v", n(&numerical.v.avg, &reference.v.avg)),
            ("facex_p", n(&numerical.p.facex, &reference.p.facex)),
            ("facex_u", n(&numerical.u.facex, &reference.u.facex)),
            ("facex_v", n(&numerical.v.facex, &reference.v.facex)),
            ("facey_p", n(&numerical.p.facey, &reference.p.facey)),
            ("facey_u", n(&numerical.u.facey, &reference.u.facey)),
            ("facey_v", n(&numerical.v.facey, &reference.v.facey)),
            ("corner_p", n(&numerical.p.corner, &reference.p.corner)),
            ("corner_u", n(&numerical.u.corner, &reference.u.corner)),
            ("corner_v", n(&numerical.v.corner, &reference.v.corner)),
        ],
    })
}

pub fn error_norms_limit_1d(
    numerical: &LimitState1D,
    reference: &LimitState1D,
    grid: &GridSpec1D,
) -> Result<ErrorReport> {
    if numerical.n_cells() != grid.n_cells() || reference.n_cells() != grid.n_cells() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "limit states ({}, {}) vs grid {}",
            numerical.n_cells(),
            reference.n_cells(),
            grid.n_cells()
        )));
    }
    let w = grid.dx();
    Ok(ErrorReport {
        families: alloc::vec![
            ("avg_p", Norms::of_difference(&numerical.avg_p, &reference.avg_p, w)),
            ("pt_p", Norms::of_difference(&numerical.pt_p, &reference.pt_p, w)),
        ],
    })
}

/// L1 distance between an AF state's pressure and a limit-state pressure on
/// the same grid (used by the asymptotic-preserving checks).
pub fn p_distance_l1(af: &State1D, limit: &LimitState1D, grid: &GridSpec1D) -> f64 {
    let w = grid.dx();
    let avg = Norms::of_difference(&af.avg_p, &limit.avg_p, w).l1;
    let pt = Norms::of_difference(&af.pt_p, &limit.pt_p, w).l1;
    avg + pt
}
