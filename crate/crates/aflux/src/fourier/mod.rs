//! Fourier (von Neumann) analysis of the PDE and of the semi-discrete
//! schemes: evolution matrices acting on the Fourier coefficients of the
//! per-cell degrees of freedom, their eigen-decomposition, classification
//! into physical and spurious modes, projection of a PDE mode onto the
//! DOFs, and the error-splitting sweeps.
//!
//! Numerical care: the interesting regime has eigenvalues spread over
//! twelve orders of magnitude (`-omega^2/sigma` next to `-sigma/eps^2`), so
//! a dense eigensolver alone cannot deliver the physical eigenvalue to the
//! absolute accuracy the order studies need. The alternating-flux matrix
//! decouples exactly into a quadratic in `lambda` (it can be diagonalized
//! explicitly); for Jacobian splitting, the small eigenvalues are refined
//! by Newton iteration on the 2x2 Schur complement that eliminates the
//! stiff `u` block. Both routes are cross-checked against the dense solver
//! in the tests.

pub mod eigen;
pub mod report;

use alloc::vec::Vec;
use num_complex::Complex;
use num_traits::Float;

use crate::model::Variant;
use crate::{Error, Result};

pub use eigen::{C64, Eigen4};
use eigen::{ONE, ZERO};

// ---------------------------------------------------------------------------
// PDE symbol
// ---------------------------------------------------------------------------

/// Evolution matrix of the Fourier-transformed PDE,
/// `d/dt [p_hat, u_hat] = E [p_hat, u_hat]`, together with its closed-form
/// eigen-data. `s = sqrt(sigma^2 - 4 eps^2 omega^2)` on the principal
/// branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSymbol {
    pub omega: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub matrix: [[C64; 2]; 2],
    pub s: C64,
    /// `(-sigma + s) / (2 eps^2)`: tends to `-omega^2/sigma` as `eps -> 0`.
    pub lambda1: C64,
    /// `(-sigma - s) / (2 eps^2)`: the initial-layer eigenvalue.
    pub lambda2: C64,
}

pub fn pde_symbol(omega: f64, epsilon: f64, sigma: f64) -> PdeSymbol {
    let iw = Complex::new(0.0, omega);
    let e2 = epsilon * epsilon;
    let matrix = [
        [ZERO, -iw / epsilon],
        [-iw / epsilon, Complex::new(-sigma / e2, 0.0)],
    ];
    let disc = sigma * sigma - 4.0 * e2 * omega * omega;
    let s = Complex::new(disc, 0.0).sqrt();
    let sp = s + sigma;
    // lambda1 = (-sigma + s)/(2 eps^2) without the catastrophic
    // cancellation at small eps: multiply through by (sigma + s).
    let lambda1 = if sp.norm() > 0.0 {
        -2.0 * omega * omega / sp
    } else {
        // sigma = omega = 0
        ZERO
    };
    let lambda2 = -sp / (2.0 * e2);
    PdeSymbol {
        omega,
        epsilon,
        sigma,
        matrix,
        s,
        lambda1,
        lambda2,
    }
}

impl PdeSymbol {
    /// `s - sigma`, evaluated cancellation-free.
    fn s_minus_sigma(&self) -> C64 {
        let sp = self.s + self.sigma;
        if sp.norm() == 0.0 {
            return ZERO;
        }
        -4.0 * self.epsilon * self.epsilon * self.omega * self.omega / sp
    }

    /// Decompose the datum `[p0, u0]` along the eigenvectors:
    /// `[p0, u0] = V1 + V2`. Errors out near the degenerate transition
    /// `sigma^2 = 4 eps^2 omega^2` where `s -> 0`.
    pub fn decompose(&self, p0: C64, u0: C64) -> Result<([C64; 2], [C64; 2])> {
        let scale = self.sigma.abs().max(2.0 * self.epsilon * self.omega.abs());
        if self.s.norm() <= 1e-12 * scale.max(1e-300) {
            return Err(Error::DegenerateModes {
                gap: self.s.norm() / scale.max(1e-300),
            });
        }
        let sm = self.s_minus_sigma();
        let sp = self.s + self.sigma;
        let iew = Complex::new(0.0, 2.0 * self.epsilon * self.omega);
        let half = 0.5 / self.s;
        let v1 = [(p0 * sp - iew * u0) * half, (u0 * sm - iew * p0) * half];
        let v2 = [(p0 * sm + iew * u0) * half, (u0 * sp + iew * p0) * half];
        Ok((v1, v2))
    }
}

// ---------------------------------------------------------------------------
// Scheme symbols
// ---------------------------------------------------------------------------

/// Evolution matrix `G(omega, dx, eps, sigma)` of a scheme variant acting
/// on `[p_avg_hat, u_avg_hat, p_pt_hat, u_pt_hat]`, with numerical
/// eigenpairs (refined where the stiff scales allow it).
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSymbol {
    pub variant: Variant,
    pub omega: f64,
    pub dx: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub t_x: C64,
    pub matrix: [[C64; 4]; 4],
    pub eigen: Eigen4,
}

fn js_matrix(t: C64, eps: f64, sigma: f64, dx: f64) -> [[C64; 4]; 4] {
    let ti = ONE / t;
    let r = 1.0 / (eps * dx);
    let sd = Complex::new(sigma * dx / eps, 0.0);
    let row = |a: C64, b: C64, c: C64, d: C64| [a * r, b * r, c * r, d * r];
    [
        row(ZERO, ZERO, ZERO, ti - 1.0),
        row(ZERO, -sd, ti - 1.0, ZERO),
        row(
            3.0 * (ONE + t),
            3.0 * (ONE - t),
            -(ti + 4.0 + t),
            t - ti,
        ),
        row(
            3.0 * (ONE - t),
            3.0 * (ONE + t),
            t - ti,
            -sd - (ti + 4.0 + t),
        ),
    ]
}

fn alt_matrix(t: C64, eps: f64, sigma: f64, dx: f64) -> [[C64; 4]; 4] {
    let ti = ONE / t;
    let r = 1.0 / (eps * dx);
    let sd = Complex::new(sigma * dx / eps, 0.0);
    let row = |a: C64, b: C64, c: C64, d: C64| [a * r, b * r, c * r, d * r];
    [
        row(ZERO, ZERO, ZERO, ti - 1.0),
        row(ZERO, -sd, ti - 1.0, ZERO),
        row(ZERO, Complex::new(6.0, 0.0), ZERO, -(4.0 * ONE + 2.0 * ti)),
        row(-6.0 * t, ZERO, 4.0 + 2.0 * t, -sd),
    ]
}

/// The four off-diagonal blocks of `G` over the `(p, u)` split
/// `p = (avg_p, pt_p)`, `u = (avg_u, pt_u)`, with the stiff relaxation
/// `-sigma/eps^2 I` peeled off the `uu` block.
struct Blocks {
    app: [[C64; 2]; 2],
    apu: [[C64; 2]; 2],
    aup: [[C64; 2]; 2],
    auu: [[C64; 2]; 2],
}

fn split_blocks(g: &[[C64; 4]; 4], eps: f64, sigma: f64) -> Blocks {
    const P: [usize; 2] = [0, 2];
    const U: [usize; 2] = [1, 3];
    let pick = |rows: [usize; 2], cols: [usize; 2]| {
        [
            [g[rows[0]][cols[0]], g[rows[0]][cols[1]]],
            [g[rows[1]][cols[0]], g[rows[1]][cols[1]]],
        ]
    };
    let mut auu = pick(U, U);
    let relax = sigma / (eps * eps);
    auu[0][0] += relax;
    auu[1][1] += relax;
    Blocks {
        app: pick(P, P),
        apu: pick(P, U),
        aup: pick(U, P),
        auu,
    }
}

/// Closed-form eigenvalues of the alternating-flux symbol: with
/// `App = Auu = 0` the characteristic equation factorizes into
/// `lambda (lambda + sigma/eps^2) = mu` for the two eigenvalues `mu` of
/// `Apu Aup`.
fn alt_closed_form(blocks: &Blocks, eps: f64, sigma: f64) -> [C64; 4] {
    let e2 = eps * eps;
    // mu_hat = eps^2 * eig(Apu Aup) keeps the arithmetic O(1) in eps.
    let scaled = |m: &[[C64; 2]; 2]| {
        [
            [m[0][0] * eps, m[0][1] * eps],
            [m[1][0] * eps, m[1][1] * eps],
        ]
    };
    let b = eigen::mul2(&scaled(&blocks.apu), &scaled(&blocks.aup));
    let (mu1, mu2) = eigen::eig2(&b);
    let mut out = [ZERO; 4];
    for (k, mu_hat) in [mu1, mu2].into_iter().enumerate() {
        let w = (Complex::new(sigma * sigma, 0.0) + 4.0 * e2 * mu_hat).sqrt();
        let denom = w + sigma;
        out[2 * k] = if denom.norm() > 0.0 {
            2.0 * mu_hat / denom
        } else {
            ZERO
        };
        out[2 * k + 1] = -denom / (2.0 * e2);
    }
    out
}

/// Newton refinement of an eigenvalue through the Schur complement
/// `det(App + Apu ((lambda + sigma/eps^2) I - Auu)^{-1} Aup - lambda I) = 0`,
/// valid while the shifted `u` block is diagonally dominated by the
/// relaxation scale.
fn js_schur_refine(blocks: &Blocks, eps: f64, sigma: f64, seed: C64) -> Option<C64> {
    let relax = sigma / (eps * eps);
    let auu_norm = blocks
        .auu
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.norm()));
    let mut lambda = seed;
    for _ in 0..12 {
        let shift = lambda + relax;
        if shift.norm() < 50.0 * auu_norm {
            return None;
        }
        let x = [
            [shift - blocks.auu[0][0], -blocks.auu[0][1]],
            [-blocks.auu[1][0], shift - blocks.auu[1][1]],
        ];
        let k = eigen::inv2(&x).ok()?;
        let kk = eigen::mul2(&k, &k);
        let m = {
            let aka = eigen::mul2(&blocks.apu, &eigen::mul2(&k, &blocks.aup));
            [
                [blocks.app[0][0] + aka[0][0], blocks.app[0][1] + aka[0][1]],
                [blocks.app[1][0] + aka[1][0], blocks.app[1][1] + aka[1][1]],
            ]
        };
        let dm = {
            let t = eigen::mul2(&blocks.apu, &eigen::mul2(&kk, &blocks.aup));
            [[-t[0][0], -t[0][1]], [-t[1][0], -t[1][1]]]
        };
        let g = (m[0][0] - lambda) * (m[1][1] - lambda) - m[0][1] * m[1][0];
        let gp = (dm[0][0] - 1.0) * (m[1][1] - lambda) + (m[0][0] - lambda) * (dm[1][1] - 1.0)
            - dm[0][1] * m[1][0]
            - m[0][1] * dm[1][0];
        if gp == ZERO {
            return None;
        }
        let step = g / gp;
        lambda -= step;
        if step.norm() <= 1e-16 * (1.0 + lambda.norm()) {
            break;
        }
    }
    // A refinement that wandered far from its seed picked up a different
    // root; reject it.
    if (lambda - seed).norm() > 1e-2 * (1.0 + seed.norm()) {
        return None;
    }
    Some(lambda)
}

/// Assemble the symbol and compute its eigen-decomposition.
pub fn scheme_symbol(
    variant: Variant,
    omega: f64,
    dx: f64,
    epsilon: f64,
    sigma: f64,
) -> Result<SchemeSymbol> {
    if !(dx > 0.0) || !(epsilon > 0.0) || sigma < 0.0 {
        return Err(Error::InvalidParams(alloc::format!(
            "scheme symbol with dx={dx}, eps={epsilon}, sigma={sigma}"
        )));
    }
    let t_x = Complex::new(0.0, omega * dx).exp();
    let matrix = match variant {
        Variant::Js => js_matrix(t_x, epsilon, sigma, dx),
        Variant::Alt => alt_matrix(t_x, epsilon, sigma, dx),
    };
    // Structural seeds: the PDE eigenvalues plus the leading terms of the
    // spurious branches.
    let pde = pde_symbol(omega, epsilon, sigma);
    let e2 = epsilon * epsilon;
    let seeds = match variant {
        Variant::Js => {
            let st = Complex::new(sigma * sigma - 36.0 * e2 * omega * omega, 0.0).sqrt();
            let sp = st + sigma;
            let fast = -6.0 / (epsilon * dx);
            let l3 = fast - sp / (2.0 * e2);
            let l4 = if sp.norm() > 0.0 {
                fast - 18.0 * omega * omega / sp
            } else {
                Complex::new(fast, 0.0)
            };
            [pde.lambda1, pde.lambda2, l3, l4]
        }
        Variant::Alt => {
            let fast = Complex::new(-sigma / (2.0 * e2), 6.0 / (epsilon * dx));
            [pde.lambda1, pde.lambda2, fast, fast.conj()]
        }
    };
    let mut eig = eigen::eigen4(&matrix, Some(seeds))?;

    let blocks = split_blocks(&matrix, epsilon, sigma);
    match variant {
        Variant::Alt => {
            // Exact diagonalization; splice in, matched to the dense values.
            let exact = alt_closed_form(&blocks, epsilon, sigma);
            let perm = eigen::match_nearest(&eig.values, &exact);
            for (i, &pi) in perm.iter().enumerate() {
                eig.values[i] = exact[pi];
                eig.vectors[i] = eigen::inverse_iteration(&matrix, eig.values[i]);
            }
        }
        Variant::Js => {
            for i in 0..4 {
                if let Some(refined) = js_schur_refine(&blocks, epsilon, sigma, eig.values[i]) {
                    eig.values[i] = refined;
                    eig.vectors[i] = eigen::inverse_iteration(&matrix, refined);
                }
            }
        }
    }
    Ok(SchemeSymbol {
        variant,
        omega,
        dx,
        epsilon,
        sigma,
        t_x,
        matrix,
        eigen: eig,
    })
}

impl SchemeSymbol {
    /// `G w` for a coefficient vector.
    pub fn apply(&self, w: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for i in 0..4 {
            let mut acc = ZERO;
            for j in 0..4 {
                acc += self.matrix[i][j] * w[j];
            }
            out[i] = acc;
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Indices of the physical pair (each tagged with the PDE eigenvalue it
/// tracks: 0 for `lambda1`, 1 for `lambda2`) and of the spurious pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classified {
    pub physical: [(usize, usize); 2],
    pub spurious: [usize; 2],
}

/// Relative distance used for matching eigenvalues.
fn rel_dist(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

pub fn classify_modes(symbol: &SchemeSymbol) -> Result<Classified> {
    let gap = eigen::min_relative_gap(&symbol.eigen.values);
    if gap < 1e-8 {
        return Err(Error::DegenerateModes { gap });
    }
    let pde = pde_symbol(symbol.omega, symbol.epsilon, symbol.sigma);
    let targets = [pde.lambda1, pde.lambda2];
    // Best injective assignment of the two PDE eigenvalues onto the four
    // discrete ones.
    let mut best: Option<([(usize, usize); 2], f64)> = None;
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let cost = rel_dist(symbol.eigen.values[i], targets[0])
                + rel_dist(symbol.eigen.values[j], targets[1]);
            if best.map_or(true, |(_, c)| cost < c) {
                best = Some(([(i, 0), (j, 1)], cost));
            }
        }
    }
    let (physical, _) = best.expect("nonempty");
    let mut spurious = [usize::MAX; 2];
    let mut k = 0;
    for idx in 0..4 {
        if idx != physical[0].0 && idx != physical[1].0 {
            spurious[k] = idx;
            k += 1;
        }
    }
    Ok(Classified { physical, spurious })
}

// ---------------------------------------------------------------------------
// Mode projection and decomposition
// ---------------------------------------------------------------------------

/// `2 sin(x/2) / x` with the smooth `x -> 0` limit.
fn average_factor(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 24.0 + x2 * x2 / 1920.0
    } else {
        2.0 * (0.5 * x).sin() / x
    }
}

/// Project the PDE mode `(p0, u0) e^{i omega x}` onto the per-cell DOF
/// coefficients `[avg_p, avg_u, pt_p, pt_u]`.
pub fn project_mode(p0: C64, u0: C64, omega: f64, dx: f64) -> [C64; 4] {
    let favg = average_factor(omega * dx);
    let fpt = Complex::new(0.0, 0.5 * omega * dx).exp();
    [p0 * favg, u0 * favg, p0 * fpt, u0 * fpt]
}

/// Decomposition of a DOF coefficient vector along the eigenvectors of the
/// scheme symbol, with the per-mode errors against the PDE projections.
#[derive(Debug, Clone)]
pub struct ModeDecomposition {
    pub classification: Classified,
    /// Coefficient of each eigenvector (symbol ordering).
    pub coefficients: [C64; 4],
    /// `V~_k = c_k v_k` (symbol ordering).
    pub contributions: [[C64; 4]; 4],
    /// `| sum_k V~_k - w0_hat |`.
    pub completeness_error: f64,
    /// For PDE mode `k` (0: heat mode, 1: layer mode): the vector
    /// `pi V_k - V~_(matching index)`.
    pub physical_errors: [[C64; 4]; 2],
}

fn norm4(v: &[C64; 4]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

impl ModeDecomposition {
    pub fn spurious_norm(&self) -> f64 {
        self.classification
            .spurious
            .iter()
            .map(|&k| norm4(&self.contributions[k]))
            .sum()
    }

    pub fn physical_error_norm(&self, pde_mode: usize) -> f64 {
        norm4(&self.physical_errors[pde_mode])
    }
}

/// Decompose `w0_hat` in the eigenbasis of `symbol`. The underlying PDE
/// amplitudes are recovered from the point-value entries of `w0_hat`
/// (they carry the plain phase factor `e^{i omega dx / 2}`).
pub fn decompose_mode(w0_hat: &[C64; 4], symbol: &SchemeSymbol) -> Result<ModeDecomposition> {
    let classification = classify_modes(symbol)?;
    // Eigenvector matrix columns.
    let mut vmat = [[ZERO; 4]; 4];
    for (k, vec) in symbol.eigen.vectors.iter().enumerate() {
        for i in 0..4 {
            vmat[i][k] = vec[i];
        }
    }
    let coefficients_vec = eigen::lu4_solve(&vmat, w0_hat)
        .map_err(|_| Error::EigenFailure(alloc::format!("singular eigenbasis")))?;
    let coefficients = coefficients_vec;
    let mut contributions = [[ZERO; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            contributions[k][i] = coefficients[k] * symbol.eigen.vectors[k][i];
        }
    }
    let mut recon = [ZERO; 4];
    for k in 0..4 {
        for i in 0..4 {
            recon[i] += contributions[k][i];
        }
    }
    let mut diff = [ZERO; 4];
    for i in 0..4 {
        diff[i] = recon[i] - w0_hat[i];
    }
    let completeness_error = norm4(&diff);

    // PDE-side decomposition of the same datum.
    let fpt = Complex::new(0.0, 0.5 * symbol.omega * symbol.dx).exp();
    let p0 = w0_hat[2] / fpt;
    let u0 = w0_hat[3] / fpt;
    let pde = pde_symbol(symbol.omega, symbol.epsilon, symbol.sigma);
    let (v1, v2) = pde.decompose(p0, u0)?;
    let mut physical_errors = [[ZERO; 4]; 2];
    for (idx, pde_mode) in classification.physical {
        let v = if pde_mode == 0 { v1 } else { v2 };
        let projected = project_mode(v[0], v[1], symbol.omega, symbol.dx);
        for i in 0..4 {
            physical_errors[pde_mode][i] = projected[i] - contributions[idx][i];
        }
    }
    Ok(ModeDecomposition {
        classification,
        coefficients,
        contributions,
        completeness_error,
        physical_errors,
    })
}

/// Amplitude `u0` making the datum well-prepared at leading order
/// (`V2 = 0`): `u0 = -2 i eps omega p0 / (s + sigma)`.
pub fn well_prepared_u0(p0: C64, omega: f64, epsilon: f64, sigma: f64) -> C64 {
    let pde = pde_symbol(omega, epsilon, sigma);
    let sp = pde.s + sigma;
    -Complex::new(0.0, 2.0 * epsilon * omega) * p0 / sp
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    #[test]
    fn pde_symbol_closed_form_example() {
        // sigma = 2, eps = 0.5, omega = 1: s = sqrt(3),
        // lambda = 2(-2 +- sqrt 3).
        let p = pde_symbol(1.0, 0.5, 2.0);
        assert_relative_eq!(p.s.re, 3.0f64.sqrt(), max_relative = 1e-14);
        assert_eq!(p.s.im, 0.0);
        assert_relative_eq!(p.lambda1.re, 2.0 * (-2.0 + 3.0f64.sqrt()), max_relative = 1e-13);
        assert_relative_eq!(p.lambda2.re, 2.0 * (-2.0 - 3.0f64.sqrt()), max_relative = 1e-13);
    }

    #[test]
    fn pde_symbol_hyperbolic_regime() {
        // sigma = 0: purely imaginary eigenvalues +- i omega / eps.
        let p = pde_symbol(1.0, 0.5, 0.0);
        assert!((p.lambda1 - c(0.0, 2.0)).norm() <= 1e-14);
        assert!((p.lambda2 - c(0.0, -2.0)).norm() <= 1e-14);
    }

    #[test]
    fn pde_trace_and_determinant_identities() {
        let mut seed = 9u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / ((1u64 << 53) as f64)
        };
        for _ in 0..50 {
            let omega = 0.1 + 5.0 * next();
            let eps = 10f64.powf(-6.0 * next());
            let sigma = 0.5 + 4.0 * next();
            let p = pde_symbol(omega, eps, sigma);
            let e2 = eps * eps;
            let tr = p.lambda1 + p.lambda2;
            let det = p.lambda1 * p.lambda2;
            assert!(
                (tr.re + sigma / e2).abs() <= 1e-13 * (sigma / e2).abs(),
                "trace {tr} vs {}",
                -sigma / e2
            );
            assert!(tr.im.abs() <= 1e-13 * (sigma / e2));
            let want = omega * omega / e2;
            assert!(
                (det - want).norm() <= 1e-13 * want.max(1e-300),
                "det {det} vs {want}"
            );
        }
    }

    #[test]
    fn pde_eigen_decomposition_reconstructs_datum() {
        let p = pde_symbol(2.0, 0.3, 1.5);
        let p0 = c(0.7, -0.2);
        let u0 = c(-0.1, 0.4);
        let (v1, v2) = p.decompose(p0, u0).unwrap();
        assert!((v1[0] + v2[0] - p0).norm() <= 1e-14);
        assert!((v1[1] + v2[1] - u0).norm() <= 1e-14);
        // And each V_k is an eigenvector direction: E V1 = lambda1 V1.
        for (v, lam) in [(v1, p.lambda1), (v2, p.lambda2)] {
            for i in 0..2 {
                let ev = p.matrix[i][0] * v[0] + p.matrix[i][1] * v[1];
                assert!((ev - lam * v[i]).norm() <= 1e-12 * lam.norm().max(1.0));
            }
        }
    }

    #[test]
    fn degenerate_s_flagged() {
        // sigma = 2 eps omega exactly.
        let p = pde_symbol(1.0, 0.5, 1.0);
        assert!(matches!(
            p.decompose(ONE, ZERO),
            Err(Error::DegenerateModes { .. })
        ));
    }

    #[test]
    fn constant_mode_in_kernel_both_variants() {
        for variant in [Variant::Js, Variant::Alt] {
            let s = scheme_symbol(variant, 0.0, 0.1, 0.5, 1.0).unwrap();
            let w = [ONE, ZERO, ONE, ZERO];
            let gw = s.apply(&w);
            for v in gw {
                assert!(v.norm() <= 1e-12, "{variant:?}: {v}");
            }
        }
    }

    #[test]
    fn eigenvalues_satisfy_char_poly_identities() {
        // Sum and product of the eigenvalues against trace/determinant.
        for variant in [Variant::Js, Variant::Alt] {
            for eps in [0.5, 1e-2, 1e-6] {
                let s = scheme_symbol(variant, 1.0, 0.05, eps, 1.0).unwrap();
                let tr: C64 = (0..4).map(|i| s.matrix[i][i]).sum();
                let sum: C64 = s.eigen.values.iter().sum();
                assert!(
                    (tr - sum).norm() <= 1e-10 * tr.norm(),
                    "{variant:?} eps {eps}: trace {tr} vs {sum}"
                );
            }
        }
    }

    #[test]
    fn js_physical_eigenvalue_series() {
        // lambda~1 = lambda1 - dx^3 omega^4 / (72 eps) + O(dx^4).
        let (omega, eps, sigma) = (1.0, 0.5, 1.0);
        let pde = pde_symbol(omega, eps, sigma);
        let mut dxs = alloc::vec::Vec::new();
        let mut errs = alloc::vec::Vec::new();
        for k in 0..6 {
            let dx = 0.02 / 2.0f64.powi(k);
            let s = scheme_symbol(Variant::Js, omega, dx, eps, sigma).unwrap();
            let cls = classify_modes(&s).unwrap();
            let l1 = s.eigen.values[cls.physical[0].0];
            dxs.push(dx);
            errs.push((l1 - pde.lambda1).norm());
        }
        let (slope, intercept) = crate::fit::loglog_fit(&dxs, &errs);
        assert!((slope - 3.0).abs() < 0.1, "slope {slope}");
        let coeff = intercept.exp();
        let want = omega.powi(4) / (72.0 * eps);
        assert!(
            (coeff - want).abs() <= 0.05 * want,
            "coefficient {coeff} vs {want}"
        );
    }

    #[test]
    fn alt_physical_eigenvalue_series() {
        // Fourth order, with the eps-independent coefficient
        // omega^6 / (540 |s|).
        let (omega, sigma) = (1.0, 1.0);
        for eps in [1e-2, 1e-4, 1e-6] {
            let pde = pde_symbol(omega, eps, sigma);
            let mut dxs = alloc::vec::Vec::new();
            let mut errs = alloc::vec::Vec::new();
            for k in 0..5 {
                let dx = 0.4 / 2.0f64.powi(k);
                let s = scheme_symbol(Variant::Alt, omega, dx, eps, sigma).unwrap();
                let cls = classify_modes(&s).unwrap();
                let l1 = s.eigen.values[cls.physical[0].0];
                dxs.push(dx);
                errs.push((l1 - pde.lambda1).norm());
            }
            let (slope, intercept) = crate::fit::loglog_fit(&dxs, &errs);
            assert!((slope - 4.0).abs() < 0.15, "eps {eps}: slope {slope}");
            let want = omega.powi(6) / (540.0 * pde.s.norm());
            let coeff = intercept.exp();
            assert!(
                (coeff - want).abs() <= 0.1 * want,
                "eps {eps}: coefficient {coeff} vs {want}"
            );
        }
    }

    #[test]
    fn js_spurious_magnitudes() {
        // At dx = 1e-3, eps = 0.5: |lambda~_{3,4}| ~ 6/(eps dx) = 12000
        // within 5%.
        let s = scheme_symbol(Variant::Js, 1.0, 1e-3, 0.5, 1.0).unwrap();
        let cls = classify_modes(&s).unwrap();
        let want = 6.0 / (0.5 * 1e-3);
        for &k in &cls.spurious {
            let m = s.eigen.values[k].norm();
            assert!((m - want).abs() <= 0.05 * want, "|{в}| = {m}", в = k);
        }
    }

    #[test]
    fn alt_spurious_values() {
        // lambda~_{3,4} ~ +-6i/(eps dx) - sigma/(2 eps^2).
        let (eps, sigma, dx) = (0.5, 1.0, 1e-3);
        let s = scheme_symbol(Variant::Alt, 1.0, dx, eps, sigma).unwrap();
        let cls = classify_modes(&s).unwrap();
        let re_want = -sigma / (2.0 * eps * eps);
        let im_want = 6.0 / (eps * dx);
        let mut ims: alloc::vec::Vec<f64> = cls
            .spurious
            .iter()
            .map(|&k| s.eigen.values[k].im)
            .collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + im_want).abs() <= 1e-2 * im_want);
        assert!((ims[1] - im_want).abs() <= 1e-2 * im_want);
        for &k in &cls.spurious {
            assert!(
                (s.eigen.values[k].re - re_want).abs() <= 1e-2 * re_want.abs().max(1.0)
            );
        }
    }

    #[test]
    fn degenerate_clusters_flagged() {
        let mut s = scheme_symbol(Variant::Js, 1.0, 0.1, 0.5, 1.0).unwrap();
        s.eigen.values[1] = s.eigen.values[0] * (1.0 + 1e-12);
        assert!(matches!(
            classify_modes(&s),
            Err(Error::DegenerateModes { .. })
        ));
    }

    #[test]
    fn projection_limits() {
        let w = project_mode(ONE, c(0.5, 0.0), 1e-12, 0.1);
        assert!((w[0] - ONE).norm() <= 1e-12);
        assert!((w[2] - ONE).norm() <= 1e-12);
        // omega dx = pi: average factor 2/pi.
        let w = project_mode(ONE, ZERO, core::f64::consts::PI, 1.0);
        assert!((w[0].re - 2.0 / core::f64::consts::PI).abs() <= 1e-14);
    }

    #[test]
    fn projection_matches_quadrature() {
        // Against the initial-data projection of the exponential mode.
        use crate::grid::GridSpec1D;
        use crate::project::project_initial_1d;
        let grid = GridSpec1D::new(0.0, 2.0 * core::f64::consts::PI, 16).unwrap();
        for k in [1.0, 2.0, 3.0] {
            let re = project_initial_1d(&|x: f64| (k * x).cos(), &|_| 0.0, &grid).unwrap();
            let im = project_initial_1d(&|x: f64| (k * x).sin(), &|_| 0.0, &grid).unwrap();
            let w0 = project_mode(ONE, ZERO, k, grid.dx());
            for i in [0usize, 7, 15] {
                let phase = Complex::new(0.0, k * grid.cell_center(i)).exp();
                let avg = c(re.avg_p[i], im.avg_p[i]);
                let pt = c(re.pt_p[i], im.pt_p[i]);
                assert!((avg - w0[0] * phase).norm() <= 1e-12, "avg k={k} i={i}");
                assert!((pt - w0[2] * phase).norm() <= 1e-12, "pt k={k} i={i}");
            }
        }
    }

    #[test]
    fn decomposition_is_complete() {
        for variant in [Variant::Js, Variant::Alt] {
            for eps in [0.5, 1e-6] {
                let s = scheme_symbol(variant, 1.0, 0.05, eps, 1.0).unwrap();
                let w0 = project_mode(ONE, c(0.1, 0.0), 1.0, 0.05);
                let d = decompose_mode(&w0, &s).unwrap();
                assert!(
                    d.completeness_error <= 1e-12,
                    "{variant:?} eps {eps}: {}",
                    d.completeness_error
                );
            }
        }
    }

    #[test]
    fn js_spurious_contributions_are_third_order() {
        // Well-prepared datum: |V~3| + |V~4| ~ dx^3.
        for eps in [0.5, 1e-6] {
            let mut dxs = alloc::vec::Vec::new();
            let mut norms = alloc::vec::Vec::new();
            for k in 0..5 {
                let dx = 0.2 / 2.0f64.powi(k);
                let s = scheme_symbol(Variant::Js, 1.0, dx, eps, 1.0).unwrap();
                let u0 = well_prepared_u0(ONE, 1.0, eps, 1.0);
                let w0 = project_mode(ONE, u0, 1.0, dx);
                let d = decompose_mode(&w0, &s).unwrap();
                dxs.push(dx);
                norms.push(d.spurious_norm());
            }
            let (slope, _) = crate::fit::loglog_fit(&dxs, &norms);
            assert!((slope - 3.0).abs() < 0.3, "eps {eps}: slope {slope}");
        }
    }

    #[test]
    fn js_heat_mode_error_fourth_entry_diffusive_limit() {
        // eps -> 0: fourth entry of the V1 error tends to
        // i dx^3 omega^3 p0 / 72.
        let (omega, eps, sigma, dx) = (1.0, 1e-6, 1.0, 1e-2);
        let s = scheme_symbol(Variant::Js, omega, dx, eps, sigma).unwrap();
        let p0 = ONE;
        let u0 = c(0.1, 0.0);
        let w0 = project_mode(p0, u0, omega, dx);
        let d = decompose_mode(&w0, &s).unwrap();
        let got = d.physical_errors[0][3];
        let want = c(0.0, dx.powi(3) * omega.powi(3) / 72.0) * p0;
        assert!(
            (got - want).norm() <= 0.1 * want.norm(),
            "got {got}, want {want}"
        );
    }
}
