//! Projection of initial data onto the AF degrees of freedom.
//!
//! Cell averages are computed with 5-point Gauss-Legendre quadrature per
//! cell (exact for polynomials up to degree 9, so quadrature error is
//! negligible against scheme error for smooth data); point values are
//! direct evaluations.

use crate::grid::{GridSpec1D, GridSpec2D};
use crate::state::{Field2D, State1D, State2D};
use crate::{Error, Result};

/// 5-point Gauss-Legendre nodes on [-1, 1].
pub const GL5_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];

/// 5-point Gauss-Legendre weights (sum to 2).
pub const GL5_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

/// Quadrature average of `f` over `[a, b]`: `(1/(b-a)) \int_a^b f`.
pub fn cell_average(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        acc += w * f(mid + half * x);
    }
    0.5 * acc
}

/// Quadrature average of `f` over one rectangle (tensor 5x5 rule).
pub fn cell_average_2d(f: &impl Fn(f64, f64) -> f64, ax: f64, bx: f64, ay: f64, by: f64) -> f64 {
    let mx = 0.5 * (ax + bx);
    let hx = 0.5 * (bx - ax);
    let my = 0.5 * (ay + by);
    let hy = 0.5 * (by - ay);
    let mut acc = 0.0;
    for (x, wx) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        let mut row = 0.0;
        for (y, wy) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
            row += wy * f(mx + hx * x, my + hy * y);
        }
        acc += wx * row;
    }
    0.25 * acc
}

/// Project `(f_p, f_u)` onto the 1D DOFs.
pub fn project_initial_1d(
    f_p: &impl Fn(f64) -> f64,
    f_u: &impl Fn(f64) -> f64,
    grid: &GridSpec1D,
) -> Result<State1D> {
    let n = grid.n_cells();
    let mut s = State1D::zeros(n);
    for i in 0..n {
        let a = grid.x_min() + i as f64 * grid.dx();
        let b = a + grid.dx();
        s.avg_p[i] = cell_average(f_p, a, b);
        s.avg_u[i] = cell_average(f_u, a, b);
        s.pt_p[i] = f_p(grid.interface(i));
        s.pt_u[i] = f_u(grid.interface(i));
    }
    if !s.is_finite() {
        return Err(Error::NonFinite("projected initial data"));
    }
    Ok(s)
}

/// Project `(f_p, f_u, f_v)` onto the 2D DOFs.
pub fn project_initial_2d(
    f_p: &impl Fn(f64, f64) -> f64,
    f_u: &impl Fn(f64, f64) -> f64,
    f_v: &impl Fn(f64, f64) -> f64,
    grid: &GridSpec2D,
) -> Result<State2D> {
    let (n1, n2) = (grid.n1(), grid.n2());
    let mut s = State2D::zeros(n1, n2);
    project_field_2d(&mut s.p, f_p, grid);
    project_field_2d(&mut s.u, f_u, grid);
    project_field_2d(&mut s.v, f_v, grid);
    let _ = (n1, n2);
    if !s.is_finite() {
        return Err(Error::NonFinite("projected initial data"));
    }
    Ok(s)
}

fn project_field_2d(field: &mut Field2D, f: &impl Fn(f64, f64) -> f64, grid: &GridSpec2D) {
    for i in 0..grid.n1() {
        let ax = grid.x_min() + i as f64 * grid.dx();
        let bx = ax + grid.dx();
        for j in 0..grid.n2() {
            let ay = grid.y_min() + j as f64 * grid.dy();
            let by = ay + grid.dy();
            let c = grid.idx(i, j);
            field.avg[c] = cell_average_2d(f, ax, bx, ay, by);
            field.facex[c] = f(grid.x_interface(i), grid.y_center(j));
            field.facey[c] = f(grid.x_center(i), grid.y_interface(j));
            field.corner[c] = f(grid.x_interface(i), grid.y_interface(j));
        }
    }
}

/// Dirac initial datum in 1D: the designated cell average is `1/dx`, every
/// other DOF is zero.
pub fn dirac_1d(grid: &GridSpec1D, cell: usize) -> State1D {
    let mut s = State1D::zeros(grid.n_cells());
    s.avg_p[cell % grid.n_cells()] = 1.0 / grid.dx();
    s
}

/// Dirac initial datum in 2D: one cell average set to `1/(dx dy)`.
pub fn dirac_2d(grid: &GridSpec2D, i: usize, j: usize) -> State2D {
    let mut s = State2D::zeros(grid.n1(), grid.n2());
    s.p.avg[grid.idx(i % grid.n1(), j % grid.n2())] = 1.0 / (grid.dx() * grid.dy());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use num_traits::Float;

    #[test]
    fn constants_project_exactly() {
        let grid = GridSpec1D::new(0.0, 2.0 * PI, 8).unwrap();
        let s = project_initial_1d(&|_| 1.0, &|_| 0.0, &grid).unwrap();
        assert!(s.avg_p.iter().all(|&v| v == 1.0));
        assert!(s.pt_p.iter().all(|&v| v == 1.0));
        assert!(s.avg_u.iter().all(|&v| v == 0.0));
        assert!(s.pt_u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_averages_match_antiderivative() {
        // Oracle: (1/dx) \int_a^b sin = (cos a - cos b)/dx, in closed form.
        let grid = GridSpec1D::new(0.0, 2.0 * PI, 8).unwrap();
        let s = project_initial_1d(&|x| x.sin(), &|_| 0.0, &grid).unwrap();
        for i in 0..8 {
            let a = grid.x_min() + i as f64 * grid.dx();
            let b = a + grid.dx();
            let exact = (a.cos() - b.cos()) / grid.dx();
            assert!(
                (s.avg_p[i] - exact).abs() <= 1e-12,
                "cell {i}: {} vs {exact}",
                s.avg_p[i]
            );
        }
    }

    #[test]
    fn polynomials_up_to_degree_9_are_exact() {
        let grid = GridSpec1D::new(-0.3, 1.7, 5).unwrap();
        for deg in 0..=9u32 {
            let f = move |x: f64| x.powi(deg as i32);
            let s = project_initial_1d(&f, &|_| 0.0, &grid).unwrap();
            for i in 0..5 {
                let a = grid.x_min() + i as f64 * grid.dx();
                let b = a + grid.dx();
                let d = deg as f64 + 1.0;
                let exact = (b.powf(d) - a.powf(d)) / (d * grid.dx());
                let scale = exact.abs().max(1.0);
                assert!(
                    (s.avg_p[i] - exact).abs() <= 1e-12 * scale,
                    "degree {deg}, cell {i}"
                );
            }
        }
    }

    #[test]
    fn square_wave_projection_on_paper_mesh() {
        // 40 cells on [-1,1]: the jumps at +-0.5 fall exactly on interfaces.
        let grid = GridSpec1D::new(-1.0, 1.0, 40).unwrap();
        let f_p = |x: f64| if x.abs() < 0.5 { 2.0 } else { 1.0 };
        let s = project_initial_1d(&f_p, &|_| 0.0, &grid).unwrap();
        for i in 0..40 {
            let c = grid.cell_center(i);
            let expected = if c.abs() < 0.5 { 2.0 } else { 1.0 };
            assert_eq!(s.avg_p[i], expected, "cell {i} at {c}");
        }
        // Interface values at the jump take the mean of the side limits.
        let s_tie = project_initial_1d(
            &|x| {
                if x.abs() < 0.5 {
                    2.0
                } else if x.abs() == 0.5 {
                    1.5
                } else {
                    1.0
                }
            },
            &|_| 0.0,
            &grid,
        )
        .unwrap();
        // x = -0.5 is interface index 9, x = +0.5 is interface index 29.
        assert_eq!(s_tie.pt_p[9], 1.5);
        assert_eq!(s_tie.pt_p[29], 1.5);
    }

    #[test]
    fn non_finite_data_is_an_error() {
        let grid = GridSpec1D::new(0.0, 1.0, 4).unwrap();
        let r = project_initial_1d(&|x| 1.0 / (x - 0.25), &|_| 0.0, &grid);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn dirac_mass_is_one() {
        let grid = GridSpec2D::new((-1.0, 1.0), (-1.0, 1.0), 101, 101).unwrap();
        let s = dirac_2d(&grid, 50, 50);
        let mass: f64 = s.p.avg.iter().sum::<f64>() * grid.dx() * grid.dy();
        assert!((mass - 1.0).abs() < 1e-12);
        // 101x101 is odd: the center cell contains the origin.
        let c = grid.idx(50, 50);
        assert!(s.p.avg[c] > 0.0);
        assert!((grid.x_center(50)).abs() < 1e-12);
    }

    #[test]
    fn biquadratic_2d_average_is_exact() {
        let grid = GridSpec2D::new((-1.0, 1.0), (-1.0, 1.0), 4, 4).unwrap();
        let s = project_initial_2d(&|x, y| x * x * y * y, &|_, _| 0.0, &|_, _| 0.0, &grid)
            .unwrap();
        // Over [-1,-0.5]x[-1,-0.5]: (1/(0.5))^2 * int x^2 int y^2
        let ix = (1.0f64 / 3.0) * (1.0 - 0.125) / 0.5;
        let exact = ix * ix;
        assert!((s.p.avg[grid.idx(0, 0)] - exact).abs() < 1e-13);
    }
}
