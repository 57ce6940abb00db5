//! Least-squares fits in log-log coordinates, used to extract empirical
//! convergence orders from error sweeps.

use num_traits::Float;

/// Fit `ln y = slope * ln x + intercept` by least squares.
/// Returns `(slope, intercept)`. Requires at least two points with
/// positive `x` and `y`; non-positive pairs are skipped.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mut n = 0.0;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        if x > 0.0 && y > 0.0 {
            let lx = x.ln();
            let ly = y.ln();
            n += 1.0;
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
    }
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Observed order between two meshes with ratio-2 refinement:
/// `log2(e_coarse / e_fine)`.
pub fn pairwise_rate(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}
