//! 1D semi-discrete right-hand sides of the active flux schemes and
//! assembly of the global sparse operator.
//!
//! Cell averages evolve by flux differences of the interface point values;
//! point values evolve through one-sided derivatives of the parabolic
//! reconstruction. With `D+` the derivative of the parabola in the cell to
//! the left of interface `i+1/2` and `D-` the one to the right:
//!
//! ```text
//!   d/dt avg_p_i  = -(pt_u_i - pt_u_{i-1}) / (eps dx)
//!   d/dt avg_u_i  = -(pt_p_i - pt_p_{i-1}) / (eps dx) - (sigma_i/eps^2) avg_u_i
//!   JS:   d/dt pt_p = -(1/2eps)[(D+ - D-)p + (D+ + D-)u]
//!         d/dt pt_u = -(1/2eps)[(D+ + D-)p + (D+ - D-)u] - (sigma/eps^2) pt_u
//!   ALT:  d/dt pt_p = -(1/eps) D+ u
//!         d/dt pt_u = -(1/eps) D- p - (sigma/eps^2) pt_u
//! ```

use alloc::vec::Vec;

use crate::grid::GridSpec1D;
use crate::model::{ModelParams1D, Variant};
use crate::sparse::CsrMatrix;
use crate::state::{flat1d, State1D, DOFS_PER_CELL_1D};
use crate::{Error, Result};

/// Side of the upwind reconstruction derivative at an interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpwindSide {
    /// Differentiate the parabola of the cell left of the interface.
    Plus,
    /// Differentiate the parabola of the cell right of the interface.
    Minus,
}

/// One-sided derivative at interface `i+1/2` of the field with point
/// values `pt` and cell averages `avg` (periodic).
///
/// `Plus`: `(2 pt_{i-1/2} - 6 avg_i + 4 pt_{i+1/2}) / dx`;
/// `Minus`: `(-4 pt_{i+1/2} + 6 avg_{i+1} - 2 pt_{i+3/2}) / dx`.
#[inline]
pub fn upwind_derivative(
    pt: &[f64],
    avg: &[f64],
    i: usize,
    side: UpwindSide,
    dx: f64,
) -> f64 {
    let n = pt.len();
    match side {
        UpwindSide::Plus => {
            let pm = pt[(i + n - 1) % n];
            (2.0 * pm - 6.0 * avg[i] + 4.0 * pt[i]) / dx
        }
        UpwindSide::Minus => {
            let ip1 = (i + 1) % n;
            (-4.0 * pt[i] + 6.0 * avg[ip1] - 2.0 * pt[ip1]) / dx
        }
    }
}

fn check_inputs(state: &State1D, params: &ModelParams1D, grid: &GridSpec1D) -> Result<()> {
    state.check_grid(grid)?;
    if params.sigma.center.len() != grid.n_cells() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "sigma samples ({}) vs grid ({})",
            params.sigma.center.len(),
            grid.n_cells()
        )));
    }
    if !state.is_finite() {
        return Err(Error::NonFinite("1D state"));
    }
    Ok(())
}

/// Average updates shared by both variants.
fn rhs_averages(state: &State1D, params: &ModelParams1D, grid: &GridSpec1D, out: &mut State1D) {
    let n = grid.n_cells();
    let eps = params.epsilon;
    let dx = grid.dx();
    let inv = 1.0 / (eps * dx);
    let eps2 = eps * eps;
    for i in 0..n {
        let im = (i + n - 1) % n;
        out.avg_p[i] = -(state.pt_u[i] - state.pt_u[im]) * inv;
        out.avg_u[i] = -(state.pt_p[i] - state.pt_p[im]) * inv
            - params.sigma.center[i] / eps2 * state.avg_u[i];
    }
}

/// Jacobian-splitting right-hand side.
pub fn rhs_js_1d(
    state: &State1D,
    params: &ModelParams1D,
    grid: &GridSpec1D,
) -> Result<State1D> {
    if params.variant != Variant::Js {
        return Err(Error::VariantMismatch { expected: "js" });
    }
    check_inputs(state, params, grid)?;
    let n = grid.n_cells();
    let dx = grid.dx();
    let eps = params.epsilon;
    let eps2 = eps * eps;
    let mut out = State1D::zeros(n);
    rhs_averages(state, params, grid, &mut out);
    for i in 0..n {
        let dp_p = upwind_derivative(&state.pt_p, &state.avg_p, i, UpwindSide::Plus, dx);
        let dm_p = upwind_derivative(&state.pt_p, &state.avg_p, i, UpwindSide::Minus, dx);
        let dp_u = upwind_derivative(&state.pt_u, &state.avg_u, i, UpwindSide::Plus, dx);
        let dm_u = upwind_derivative(&state.pt_u, &state.avg_u, i, UpwindSide::Minus, dx);
        out.pt_p[i] = -0.5 / eps * ((dp_p - dm_p) + (dp_u + dm_u));
        out.pt_u[i] = -0.5 / eps * ((dp_p + dm_p) + (dp_u - dm_u))
            - params.sigma.interface[i] / eps2 * state.pt_u[i];
    }
    Ok(out)
}

/// Alternating-flux right-hand side.
pub fn rhs_alt_1d(
    state: &State1D,
    params: &ModelParams1D,
    grid: &GridSpec1D,
) -> Result<State1D> {
    if params.variant != Variant::Alt {
        return Err(Error::VariantMismatch { expected: "alt" });
    }
    check_inputs(state, params, grid)?;
    let n = grid.n_cells();
    let dx = grid.dx();
    let eps = params.epsilon;
    let eps2 = eps * eps;
    let mut out = State1D::zeros(n);
    rhs_averages(state, params, grid, &mut out);
    for i in 0..n {
        let dp_u = upwind_derivative(&state.pt_u, &state.avg_u, i, UpwindSide::Plus, dx);
        let dm_p = upwind_derivative(&state.pt_p, &state.avg_p, i, UpwindSide::Minus, dx);
        out.pt_p[i] = -dp_u / eps;
        out.pt_u[i] = -dm_p / eps - params.sigma.interface[i] / eps2 * state.pt_u[i];
    }
    Ok(out)
}

/// Dispatch on the configured variant.
pub fn rhs_1d(state: &State1D, params: &ModelParams1D, grid: &GridSpec1D) -> Result<State1D> {
    match params.variant {
        Variant::Js => rhs_js_1d(state, params, grid),
        Variant::Alt => rhs_alt_1d(state, params, grid),
    }
}

/// Assemble the global operator `L` over the interleaved flat layout, so
/// that `L w` reproduces the matrix-free right-hand side.
pub fn assemble_operator_1d(params: &ModelParams1D, grid: &GridSpec1D) -> Result<CsrMatrix> {
    let n = grid.n_cells();
    if params.sigma.center.len() != n {
        return Err(Error::ShapeMismatch(alloc::format!(
            "sigma samples ({}) vs grid ({})",
            params.sigma.center.len(),
            n
        )));
    }
    let dx = grid.dx();
    let eps = params.epsilon;
    let eps2 = eps * eps;
    let inv = 1.0 / (eps * dx);
    let dim = DOFS_PER_CELL_1D * n;
    let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(16 * n);
    let at = |cell: isize, family: usize| -> usize {
        DOFS_PER_CELL_1D * (cell.rem_euclid(n as isize) as usize) + family
    };
    for i in 0..n {
        let ii = i as isize;
        let row_ap = at(ii, flat1d::AVG_P);
        let row_au = at(ii, flat1d::AVG_U);
        let row_pp = at(ii, flat1d::PT_P);
        let row_pu = at(ii, flat1d::PT_U);

        // d/dt avg_p_i = -(pt_u_i - pt_u_{i-1}) / (eps dx)
        t.push((row_ap, at(ii, flat1d::PT_U), -inv));
        t.push((row_ap, at(ii - 1, flat1d::PT_U), inv));

        // d/dt avg_u_i = -(pt_p_i - pt_p_{i-1}) / (eps dx) - sigma_c/eps^2 avg_u_i
        t.push((row_au, at(ii, flat1d::PT_P), -inv));
        t.push((row_au, at(ii - 1, flat1d::PT_P), inv));
        t.push((row_au, at(ii, flat1d::AVG_U), -params.sigma.center[i] / eps2));

        let sig_if = params.sigma.interface[i] / eps2;
        match params.variant {
            Variant::Js => {
                // pt_p row: -(1/(2 eps dx)) [(D+ - D-)p + (D+ + D-)u] * dx
                let f = -0.5 * inv;
                // (D+ - D-) p coefficients (times dx)
                t.push((row_pp, at(ii - 1, flat1d::PT_P), f * 2.0));
                t.push((row_pp, at(ii, flat1d::AVG_P), f * -6.0));
                t.push((row_pp, at(ii, flat1d::PT_P), f * 8.0));
                t.push((row_pp, at(ii + 1, flat1d::AVG_P), f * -6.0));
                t.push((row_pp, at(ii + 1, flat1d::PT_P), f * 2.0));
                // (D+ + D-) u coefficients
                t.push((row_pp, at(ii - 1, flat1d::PT_U), f * 2.0));
                t.push((row_pp, at(ii, flat1d::AVG_U), f * -6.0));
                t.push((row_pp, at(ii + 1, flat1d::AVG_U), f * 6.0));
                t.push((row_pp, at(ii + 1, flat1d::PT_U), f * -2.0));

                // pt_u row: -(1/(2 eps dx)) [(D+ + D-)p + (D+ - D-)u] - sigma/eps^2
                t.push((row_pu, at(ii - 1, flat1d::PT_P), f * 2.0));
                t.push((row_pu, at(ii, flat1d::AVG_P), f * -6.0));
                t.push((row_pu, at(ii + 1, flat1d::AVG_P), f * 6.0));
                t.push((row_pu, at(ii + 1, flat1d::PT_P), f * -2.0));
                t.push((row_pu, at(ii - 1, flat1d::PT_U), f * 2.0));
                t.push((row_pu, at(ii, flat1d::AVG_U), f * -6.0));
                t.push((row_pu, at(ii, flat1d::PT_U), f * 8.0));
                t.push((row_pu, at(ii + 1, flat1d::AVG_U), f * -6.0));
                t.push((row_pu, at(ii + 1, flat1d::PT_U), f * 2.0));
                t.push((row_pu, at(ii, flat1d::PT_U), -sig_if));
            }
            Variant::Alt => {
                // pt_p row: -(1/(eps dx)) (2 pt_u_{i-1} - 6 avg_u_i + 4 pt_u_i)
                t.push((row_pp, at(ii - 1, flat1d::PT_U), -inv * 2.0));
                t.push((row_pp, at(ii, flat1d::AVG_U), inv * 6.0));
                t.push((row_pp, at(ii, flat1d::PT_U), -inv * 4.0));
                // pt_u row: -(1/(eps dx)) (-4 pt_p_i + 6 avg_p_{i+1} - 2 pt_p_{i+1})
                t.push((row_pu, at(ii, flat1d::PT_P), inv * 4.0));
                t.push((row_pu, at(ii + 1, flat1d::AVG_P), -inv * 6.0));
                t.push((row_pu, at(ii + 1, flat1d::PT_P), inv * 2.0));
                t.push((row_pu, at(ii, flat1d::PT_U), -sig_if));
            }
        }
    }
    CsrMatrix::from_triplets(dim, dim, &t)
}

/// Row indices of the `avg_p` family in the flat layout (used by
/// conservation checks).
pub fn avg_p_rows(n_cells: usize) -> impl Iterator<Item = usize> {
    (0..n_cells).map(|i| DOFS_PER_CELL_1D * i + flat1d::AVG_P)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams1D;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn random_state(n: usize, seed: &mut u64) -> State1D {
        let mut s = State1D::zeros(n);
        for i in 0..n {
            s.avg_p[i] = lcg(seed);
            s.avg_u[i] = lcg(seed);
            s.pt_p[i] = lcg(seed);
            s.pt_u[i] = lcg(seed);
        }
        s
    }

    #[test]
    fn upwind_exact_on_constants() {
        let pt = [3.0; 8];
        let avg = [3.0; 8];
        for i in 0..8 {
            assert_eq!(upwind_derivative(&pt, &avg, i, UpwindSide::Plus, 0.25), 0.0);
            assert_eq!(upwind_derivative(&pt, &avg, i, UpwindSide::Minus, 0.25), 0.0);
        }
    }

    #[test]
    fn upwind_linear_on_unit_cell() {
        // u(x) = x on cell [0, 1]: avg = 1/2, endpoints 0 and 1, dx = 1.
        // D+ = 2*0 - 6*0.5 + 4*1 = 1.
        let pt = [0.0, 1.0, 0.0, 0.0];
        let avg = [0.0, 0.5, 0.0, 0.0];
        let d = upwind_derivative(&pt, &avg, 1, UpwindSide::Plus, 1.0);
        assert_eq!(d, 1.0);
    }

    #[test]
    fn upwind_exact_on_parabola_interior() {
        // u(x) = x^2 sampled consistently; away from the periodic wrap both
        // sides must return the exact derivative 2x at the interface.
        let grid = GridSpec1D::new(0.0, 1.0, 10).unwrap();
        let dx = grid.dx();
        let mut pt = [0.0; 10];
        let mut avg = [0.0; 10];
        for i in 0..10 {
            let x = grid.interface(i);
            pt[i] = x * x;
            let a = grid.x_min() + i as f64 * dx;
            let b = a + dx;
            avg[i] = (b * b * b - a * a * a) / (3.0 * dx);
        }
        for i in 3..6 {
            let x = grid.interface(i);
            let dp = upwind_derivative(&pt, &avg, i, UpwindSide::Plus, dx);
            let dm = upwind_derivative(&pt, &avg, i, UpwindSide::Minus, dx);
            assert!((dp - 2.0 * x).abs() <= 1e-13, "D+ at {x}: {dp}");
            assert!((dm - 2.0 * x).abs() <= 1e-13, "D- at {x}: {dm}");
        }
    }

    #[test]
    fn constant_state_is_steady_both_variants() {
        let grid = GridSpec1D::new(-1.0, 1.0, 12).unwrap();
        let s = State1D::constant(12, 4.0, 0.0);
        for variant in [Variant::Js, Variant::Alt] {
            // Variable sigma: steadiness must not depend on placement.
            let params = ModelParams1D::with_sigma(0.5, variant, &grid, |x| {
                1.0 + (10.0 * x) * (10.0 * x)
            })
            .unwrap();
            let r = rhs_1d(&s, &params, &grid).unwrap();
            for i in 0..12 {
                assert_eq!(r.avg_p[i], 0.0);
                assert_eq!(r.avg_u[i], 0.0);
                assert_eq!(r.pt_p[i], 0.0);
                assert_eq!(r.pt_u[i], 0.0);
            }
        }
    }

    #[test]
    fn conservation_of_average_p() {
        let grid = GridSpec1D::new(0.0, 2.0, 16).unwrap();
        let mut seed = 5u64;
        let s = random_state(16, &mut seed);
        for variant in [Variant::Js, Variant::Alt] {
            let params = ModelParams1D::constant_sigma(0.3, variant, 2.0, &grid).unwrap();
            let r = rhs_1d(&s, &params, &grid).unwrap();
            let total: f64 = r.avg_p.iter().sum();
            let scale: f64 =
                s.pt_u.iter().map(|v| v.abs()).sum::<f64>() / (params.epsilon * grid.dx());
            assert!(total.abs() <= 1e-13 * scale.max(1.0), "{variant:?}: {total}");
        }
    }

    #[test]
    fn alt_point_footprint_of_single_pt_u() {
        let grid = GridSpec1D::new(0.0, 1.0, 12).unwrap();
        let params = ModelParams1D::constant_sigma(1.0, Variant::Alt, 1.0, &grid).unwrap();
        let mut s = State1D::zeros(12);
        let k = 5;
        s.pt_u[k] = 1.0;
        let r = rhs_alt_1d(&s, &params, &grid).unwrap();
        for i in 0..12 {
            // pt_u[k] feeds D+ at interfaces k and k+1, and the flux
            // differences of cells k and k+1.
            let in_pt_footprint = i == k || i == k + 1;
            let in_avg_footprint = i == k || i == k + 1;
            assert_eq!(r.pt_p[i] != 0.0, in_pt_footprint, "pt_p[{i}]");
            assert_eq!(r.avg_p[i] != 0.0, in_avg_footprint, "avg_p[{i}]");
            // Only the damping term acts on u itself.
            assert_eq!(r.pt_u[i] != 0.0, i == k, "pt_u[{i}]");
            assert_eq!(r.avg_u[i], 0.0);
        }
    }

    #[test]
    fn linearity_exact_on_dyadic_data() {
        // Entries are small integers scaled by powers of two, and the
        // combination coefficients are powers of two: every operation is
        // exact in binary floating point, so linearity holds bitwise.
        let grid = GridSpec1D::new(0.0, 4.0, 8).unwrap();
        let mut a = State1D::zeros(8);
        let mut b = State1D::zeros(8);
        for i in 0..8 {
            a.avg_p[i] = (i as f64) - 3.0;
            a.avg_u[i] = 2.0 * (i as f64);
            a.pt_p[i] = 0.5 * (i as f64) - 1.0;
            a.pt_u[i] = (i % 3) as f64;
            b.avg_p[i] = 1.0 - (i as f64);
            b.avg_u[i] = 0.25 * (i as f64);
            b.pt_p[i] = (i % 2) as f64;
            b.pt_u[i] = -2.0 + 0.5 * (i as f64);
        }
        let (alpha, beta) = (2.0, -0.5);
        for variant in [Variant::Js, Variant::Alt] {
            let params = ModelParams1D::constant_sigma(0.5, variant, 1.0, &grid).unwrap();
            let mut combo = State1D::zeros(8);
            for i in 0..8 {
                combo.avg_p[i] = alpha * a.avg_p[i] + beta * b.avg_p[i];
                combo.avg_u[i] = alpha * a.avg_u[i] + beta * b.avg_u[i];
                combo.pt_p[i] = alpha * a.pt_p[i] + beta * b.pt_p[i];
                combo.pt_u[i] = alpha * a.pt_u[i] + beta * b.pt_u[i];
            }
            let ra = rhs_1d(&a, &params, &grid).unwrap();
            let rb = rhs_1d(&b, &params, &grid).unwrap();
            let rc = rhs_1d(&combo, &params, &grid).unwrap();
            for i in 0..8 {
                let want = alpha * ra.pt_p[i] + beta * rb.pt_p[i];
                assert_eq!(rc.pt_p[i].to_bits(), want.to_bits(), "pt_p[{i}]");
                let want = alpha * ra.pt_u[i] + beta * rb.pt_u[i];
                assert_eq!(rc.pt_u[i].to_bits(), want.to_bits(), "pt_u[{i}]");
            }
        }
    }

    #[test]
    fn operator_matches_matrix_free() {
        let grid = GridSpec1D::new(0.0, 2.0 * core::f64::consts::PI, 4).unwrap();
        let mut seed = 17u64;
        for variant in [Variant::Js, Variant::Alt] {
            for eps in [1.0, 1e-6] {
                let params =
                    ModelParams1D::constant_sigma(eps, variant, 1.0, &grid).unwrap();
                let l = assemble_operator_1d(&params, &grid).unwrap();
                for _ in 0..10 {
                    let s = random_state(4, &mut seed);
                    let lw = l.matvec(&s.to_flat());
                    let r = rhs_1d(&s, &params, &grid).unwrap().to_flat();
                    // Entrywise comparison against the row magnitude.
                    for (k, (x, y)) in lw.iter().zip(r.iter()).enumerate() {
                        let (cols, vals) = l.row(k);
                        let flat = s.to_flat();
                        let scale: f64 = cols
                            .iter()
                            .zip(vals.iter())
                            .map(|(c, v)| (v * flat[*c]).abs())
                            .sum();
                        assert!(
                            (x - y).abs() <= 1e-14 * scale.max(1e-300),
                            "{variant:?} eps={eps} row {k}: {x} vs {y}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn avg_p_rows_have_two_entries() {
        let grid = GridSpec1D::new(0.0, 1.0, 8).unwrap();
        let params = ModelParams1D::constant_sigma(0.5, Variant::Js, 1.0, &grid).unwrap();
        let l = assemble_operator_1d(&params, &grid).unwrap();
        let inv = 1.0 / (0.5 * grid.dx());
        for r in avg_p_rows(8) {
            let (cols, vals) = l.row(r);
            assert_eq!(cols.len(), 2, "row {r}");
            let mut sorted: alloc::vec::Vec<f64> = vals.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((sorted[0] + inv).abs() <= 1e-15 * inv);
            assert!((sorted[1] - inv).abs() <= 1e-15 * inv);
        }
    }

    #[test]
    fn avg_p_block_column_sums_vanish() {
        let grid = GridSpec1D::new(0.0, 1.0, 8).unwrap();
        for variant in [Variant::Js, Variant::Alt] {
            let params = ModelParams1D::constant_sigma(0.7, variant, 3.0, &grid).unwrap();
            let l = assemble_operator_1d(&params, &grid).unwrap();
            let sums = l.column_sums_over_rows(avg_p_rows(8));
            let scale = 1.0 / (0.7 * grid.dx());
            for (c, s) in sums.iter().enumerate() {
                assert!(s.abs() <= 1e-13 * scale, "column {c}: {s}");
            }
        }
    }

    #[test]
    fn operator_bandwidth_is_stencil_bounded() {
        let grid = GridSpec1D::new(0.0, 1.0, 64).unwrap();
        let params = ModelParams1D::constant_sigma(0.5, Variant::Js, 1.0, &grid).unwrap();
        let l = assemble_operator_1d(&params, &grid).unwrap();
        // Periodic wrap rows touch the far end; interior bandwidth is what
        // the band solver sees after the wrap columns. Check stencil reach
        // in cell units instead: every column is within one cell of the row
        // except across the periodic seam.
        for (r, c, _) in l.triplets() {
            let cell_r = (r / DOFS_PER_CELL_1D) as isize;
            let cell_c = (c / DOFS_PER_CELL_1D) as isize;
            let d = (cell_r - cell_c).rem_euclid(64);
            assert!(d <= 1 || d >= 63, "row {r} col {c}");
        }
    }

    #[test]
    fn variant_mismatch_rejected() {
        let grid = GridSpec1D::new(0.0, 1.0, 8).unwrap();
        let params = ModelParams1D::constant_sigma(0.5, Variant::Js, 1.0, &grid).unwrap();
        let s = State1D::zeros(8);
        assert!(matches!(
            rhs_alt_1d(&s, &params, &grid),
            Err(Error::VariantMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_state_rejected() {
        let grid = GridSpec1D::new(0.0, 1.0, 8).unwrap();
        let params = ModelParams1D::constant_sigma(0.5, Variant::Js, 1.0, &grid).unwrap();
        let mut s = State1D::zeros(8);
        s.avg_p[3] = f64::INFINITY;
        assert!(matches!(
            rhs_js_1d(&s, &params, &grid),
            Err(Error::NonFinite(_))
        ));
    }
}
