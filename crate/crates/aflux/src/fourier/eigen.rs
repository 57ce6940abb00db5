//! Dense complex linear algebra for the 4x4 evolution matrices: LU solves,
//! a stable 2x2 eigensolver, and a quartic root finder (Durand-Kerner with
//! Newton polish) feeding inverse iteration for eigenvectors.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex;
use num_traits::Float;

use crate::{Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

/// Eigen-decomposition of a 4x4 complex matrix. `vectors[k]` is the unit
/// eigenvector belonging to `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen4 {
    pub values: [C64; 4],
    pub vectors: [[C64; 4]; 4],
}

#[inline]
pub fn max_entry_norm(a: &[[C64; 4]; 4]) -> f64 {
    let mut m = 0.0f64;
    for row in a {
        for v in row {
            m = m.max(v.norm());
        }
    }
    m
}

/// Solve `A x = b` for 4x4 complex `A` by LU with partial pivoting.
/// Near-zero pivots are replaced by a tiny multiple of the matrix norm so
/// the solve can be used for inverse iteration on singular shifts.
pub fn lu4_solve_regularized(a: &[[C64; 4]; 4], b: &[C64; 4]) -> [C64; 4] {
    let mut m = *a;
    let mut x = *b;
    let tiny = 1e-300 + 1e-20 * max_entry_norm(a) * f64::EPSILON;
    for k in 0..4 {
        let mut p = k;
        for r in (k + 1)..4 {
            if m[r][k].norm() > m[p][k].norm() {
                p = r;
            }
        }
        if p != k {
            m.swap(k, p);
            x.swap(k, p);
        }
        if m[k][k].norm() < tiny {
            m[k][k] = Complex::new(tiny, 0.0);
        }
        for r in (k + 1)..4 {
            let f = m[r][k] / m[k][k];
            if f != ZERO {
                for c in (k + 1)..4 {
                    let upd = f * m[k][c];
                    m[r][c] -= upd;
                }
                let upd = f * x[k];
                x[r] -= upd;
            }
        }
    }
    for k in (0..4).rev() {
        let mut acc = x[k];
        for c in (k + 1)..4 {
            acc -= m[k][c] * x[c];
        }
        x[k] = acc / m[k][k];
    }
    x
}

/// Strict variant: a genuinely singular system is an error.
pub fn lu4_solve(a: &[[C64; 4]; 4], b: &[C64; 4]) -> Result<[C64; 4]> {
    let norm = max_entry_norm(a);
    let mut m = *a;
    let mut x = *b;
    for k in 0..4 {
        let mut p = k;
        for r in (k + 1)..4 {
            if m[r][k].norm() > m[p][k].norm() {
                p = r;
            }
        }
        if p != k {
            m.swap(k, p);
            x.swap(k, p);
        }
        if m[k][k].norm() <= 1e-14 * norm {
            return Err(Error::EigenFailure(format!(
                "singular 4x4 system (pivot {k})"
            )));
        }
        for r in (k + 1)..4 {
            let f = m[r][k] / m[k][k];
            if f != ZERO {
                for c in (k + 1)..4 {
                    let upd = f * m[k][c];
                    m[r][c] -= upd;
                }
                let upd = f * x[k];
                x[r] -= upd;
            }
        }
    }
    for k in (0..4).rev() {
        let mut acc = x[k];
        for c in (k + 1)..4 {
            acc -= m[k][c] * x[c];
        }
        x[k] = acc / m[k][k];
    }
    Ok(x)
}

pub fn inv2(a: &[[C64; 2]; 2]) -> Result<[[C64; 2]; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a[0][0].norm() + a[0][1].norm() + a[1][0].norm() + a[1][1].norm();
    if det.norm() <= 1e-30 * scale * scale {
        return Err(Error::EigenFailure(format!("singular 2x2 (det {det})")));
    }
    Ok([
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ])
}

pub fn mul2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Eigenvalues of a complex 2x2 matrix via the quadratic formula with the
/// cancellation-free root pairing (the small root comes from `det / big`).
pub fn eig2(a: &[[C64; 2]; 2]) -> (C64, C64) {
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    // Pick the sign that avoids cancellation in tr +- disc.
    let big = if (tr + disc).norm() >= (tr - disc).norm() {
        (tr + disc) * 0.5
    } else {
        (tr - disc) * 0.5
    };
    if big == ZERO {
        return (ZERO, ZERO);
    }
    (big, det / big)
}

fn horner(coeffs: &[C64; 5], z: C64) -> C64 {
    let mut acc = coeffs[0];
    for c in &coeffs[1..] {
        acc = acc * z + c;
    }
    acc
}

fn horner_deriv(coeffs: &[C64; 5], z: C64) -> C64 {
    // p'(z) with p monic quartic.
    let d = [
        coeffs[0] * 4.0,
        coeffs[1] * 3.0,
        coeffs[2] * 2.0,
        coeffs[3],
    ];
    let mut acc = d[0];
    for c in &d[1..] {
        acc = acc * z + c;
    }
    acc
}

/// Characteristic polynomial of a 4x4 complex matrix by Faddeev-LeVerrier,
/// returned as monic descending coefficients
/// `[1, a1, a2, a3, a4]` of `z^4 + a1 z^3 + a2 z^2 + a3 z + a4`.
pub fn char_poly(a: &[[C64; 4]; 4]) -> [C64; 5] {
    let mul = |x: &[[C64; 4]; 4], y: &[[C64; 4]; 4]| -> [[C64; 4]; 4] {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += x[i][k] * y[k][j];
                }
                out[i][j] = acc;
            }
        }
        out
    };
    let trace = |x: &[[C64; 4]; 4]| x[0][0] + x[1][1] + x[2][2] + x[3][3];
    // M_{k+1} = A (M_k + a_k I), a_k = -tr(M_k)/k.
    let mut m = *a;
    let mut coeffs = [ONE; 5];
    for k in 1..=4usize {
        let ak = -trace(&m) / (k as f64);
        coeffs[k] = ak;
        if k < 4 {
            let mut t = m;
            for (i, row) in t.iter_mut().enumerate() {
                row[i] += ak;
            }
            m = mul(a, &t);
        }
    }
    coeffs
}

/// Durand-Kerner iteration on a monic quartic from the given seeds,
/// followed by Newton polishing of each root.
fn durand_kerner(coeffs: &[C64; 5], seeds: &[C64; 4]) -> Option<[C64; 4]> {
    let mut z = *seeds;
    // Nudge coincident seeds apart.
    for i in 0..4 {
        for j in 0..i {
            if (z[i] - z[j]).norm() <= 1e-12 * (z[i].norm() + z[j].norm() + 1.0) {
                z[i] += Complex::new(1e-6 * (1.0 + z[i].norm()), 2e-6 * (1.0 + z[i].norm()));
            }
        }
    }
    // The coefficients carry rounding amplified by the eigenvalue spread,
    // so the iteration may stall well above 1e-14 relative steps; accept a
    // stagnated iteration (the Newton/Rayleigh polish recovers the rest).
    let mut converged = false;
    let mut history = [f64::INFINITY; 25];
    for it in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..4 {
            let mut denom = ONE;
            for j in 0..4 {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom == ZERO {
                return None;
            }
            let step = horner(coeffs, z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step <= 1e-13 {
            converged = true;
            break;
        }
        let stalled = max_step <= 1e-6 && max_step > 0.5 * history[it % 25];
        history[it % 25] = max_step;
        if stalled {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    // Newton polish for the last digits.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = horner_deriv(coeffs, *zi);
            if d == ZERO {
                break;
            }
            let step = horner(coeffs, *zi) / d;
            *zi -= step;
            if step.norm() <= 1e-16 * (1.0 + zi.norm()) {
                break;
            }
        }
    }
    Some(z)
}

fn circle_seeds(coeffs: &[C64; 5]) -> [C64; 4] {
    let mut radius = 0.0f64;
    for (k, c) in coeffs[1..].iter().enumerate() {
        let r = c.norm().powf(1.0 / (k as f64 + 1.0));
        radius = radius.max(r);
    }
    let radius = 1.0 + 1.5 * radius;
    let base = Complex::new(0.4, 0.9);
    let mut seeds = [ZERO; 4];
    let mut acc = base;
    for s in seeds.iter_mut() {
        *s = acc * radius;
        acc *= base;
    }
    seeds
}

/// Inverse iteration: eigenvector of `a` for the (accurate) eigenvalue
/// `lambda`, normalized to unit 2-norm with a deterministic phase (largest
/// component real positive).
pub fn inverse_iteration(a: &[[C64; 4]; 4], lambda: C64) -> [C64; 4] {
    let mut shifted = *a;
    for i in 0..4 {
        shifted[i][i] -= lambda;
    }
    // Deterministic, direction-free start.
    let mut v = [
        Complex::new(0.9128709291752769, 0.0),
        Complex::new(0.1825741858350554, 0.2738612787525831),
        Complex::new(-0.2282177322938192, 0.0912870929175277),
        Complex::new(0.0456435464587638, -0.1369306393762915),
    ];
    for _ in 0..3 {
        let w = lu4_solve_regularized(&shifted, &v);
        let norm = (w.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(w.iter()) {
            *vi = wi / norm;
        }
    }
    // Fix the phase: largest-magnitude component becomes real positive.
    let mut kmax = 0;
    for k in 1..4 {
        if v[k].norm() > v[kmax].norm() {
            kmax = k;
        }
    }
    let phase = v[kmax] / v[kmax].norm();
    for vi in v.iter_mut() {
        *vi /= phase;
    }
    v
}

/// Residual `|A v - lambda v|_2` of an eigenpair.
pub fn eigen_residual(a: &[[C64; 4]; 4], lambda: C64, v: &[C64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut av = ZERO;
        for j in 0..4 {
            av += a[i][j] * v[j];
        }
        acc += (av - lambda * v[i]).norm_sqr();
    }
    acc.sqrt()
}

/// Full eigen-decomposition with optional structural seeds for the root
/// finder. Residuals are verified against the matrix scale.
pub fn eigen4(a: &[[C64; 4]; 4], seeds: Option<[C64; 4]>) -> Result<Eigen4> {
    let coeffs = char_poly(a);
    let roots = seeds
        .and_then(|s| durand_kerner(&coeffs, &s))
        .or_else(|| durand_kerner(&coeffs, &circle_seeds(&coeffs)))
        .ok_or_else(|| Error::EigenFailure(format!("root finder stalled")))?;
    let mut values = roots;
    // Deterministic order: by real part, then imaginary.
    values.sort_by(|x, y| {
        (x.re, x.im)
            .partial_cmp(&(y.re, y.im))
            .expect("finite eigenvalues")
    });
    let mut vectors = [[ZERO; 4]; 4];
    for (k, lam) in values.iter().enumerate() {
        vectors[k] = inverse_iteration(a, *lam);
    }
    let scale = max_entry_norm(a).max(1e-300);
    for k in 0..4 {
        let res = eigen_residual(a, values[k], &vectors[k]);
        if !(res <= 1e-8 * scale) {
            return Err(Error::EigenFailure(format!(
                "eigenpair {k} residual {res:e} vs scale {scale:e}"
            )));
        }
    }
    Ok(Eigen4 { values, vectors })
}

/// Nearest-neighbor matching: permutation of `candidates` minimizing the
/// summed relative distance to `reference`. Used both to splice refined
/// eigenvalues into a decomposition and for sweep continuation.
pub fn match_nearest(reference: &[C64; 4], candidates: &[C64; 4]) -> [usize; 4] {
    const PERMS: [[usize; 4]; 24] = [
        [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
        [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
        [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
    ];
    let mut best = PERMS[0];
    let mut best_cost = f64::INFINITY;
    for p in PERMS.iter() {
        let mut cost = 0.0;
        for (i, &pi) in p.iter().enumerate() {
            let d = (reference[i] - candidates[pi]).norm();
            let s = reference[i].norm().max(candidates[pi].norm()).max(1e-300);
            cost += d / s;
        }
        if cost < best_cost {
            best_cost = cost;
            best = *p;
        }
    }
    best
}

/// Collect distinct pairwise relative gaps; the smallest one drives the
/// degeneracy guard.
pub fn min_relative_gap(values: &[C64; 4]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..4 {
        for j in 0..i {
            let d = (values[i] - values[j]).norm();
            let s = values[i].norm().max(values[j].norm()).max(1e-300);
            min = min.min(d / s);
        }
    }
    min
}
