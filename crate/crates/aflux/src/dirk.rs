//! Stiffly accurate four-stage third-order DIRK time integration of the
//! linear autonomous system `dw/dt = L w`.
//!
//! The default tableau is the implicit part of the Kennedy-Carpenter
//! ARK3(2)4L[2]SA pair: an ESDIRK with an explicit first stage, identical
//! diagonal `gamma` on stages 2-4 (so one factorization serves every
//! implicit stage of a step), stiffly accurate and L-stable. Any tableau
//! passing [`ButcherTableau::validate`] can be substituted.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use num_traits::Float;

use crate::linsolve::{build_stage_matrix, SolveMode, SolveStats, StageSystem};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

pub const STAGES: usize = 4;

/// Butcher tableau of a four-stage DIRK method.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub a: [[f64; STAGES]; STAGES],
    pub b: [f64; STAGES],
    pub c: [f64; STAGES],
    pub id: &'static str,
}

/// Residual of each validated condition, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct TableauReport {
    pub conditions: Vec<(&'static str, f64)>,
}

const COND_TOL: f64 = 1e-12;

impl ButcherTableau {
    /// ESDIRK3(2)4L[2]SA (Kennedy & Carpenter): gamma on the diagonal of
    /// stages 2-4, last row equal to `b`.
    pub fn esdirk3_kennedy_carpenter() -> Self {
        let g = 1767732205903.0 / 4055673282236.0;
        let a31 = 2746238789719.0 / 10658868560708.0;
        let a32 = -640167445237.0 / 6845629431997.0;
        let b1 = 1471266399579.0 / 7840856788654.0;
        let b2 = -4482444167858.0 / 7529755066697.0;
        let b3 = 11266239266428.0 / 11593286722821.0;
        Self {
            a: [
                [0.0, 0.0, 0.0, 0.0],
                [g, g, 0.0, 0.0],
                [a31, a32, g, 0.0],
                [b1, b2, b3, g],
            ],
            b: [b1, b2, b3, g],
            c: [0.0, 2.0 * g, 3.0 / 5.0, 1.0],
            id: "esdirk3(2)4l[2]sa",
        }
    }

    pub fn is_stiffly_accurate(&self) -> bool {
        self.a[STAGES - 1]
            .iter()
            .zip(self.b.iter())
            .all(|(a, b)| (a - b).abs() <= COND_TOL)
    }

    /// Check the structural and order-3 conditions. Returns the residual of
    /// every condition; the first violated one is an error carrying its
    /// name and residual.
    pub fn validate(&self) -> Result<TableauReport> {
        let mut conditions = Vec::new();

        let mut upper = 0.0f64;
        for i in 0..STAGES {
            for j in (i + 1)..STAGES {
                upper = upper.max(self.a[i][j].abs());
            }
        }
        conditions.push(("lower-triangular stage matrix", upper));

        // Explicit first stage allowed; the rest of the diagonal must be
        // nonzero.
        let min_diag = (1..STAGES).fold(f64::INFINITY, |m, i| m.min(self.a[i][i].abs()));
        conditions.push((
            "nonzero diagonal from stage 2",
            if min_diag == 0.0 { 1.0 } else { 0.0 },
        ));

        let sum_b: f64 = self.b.iter().sum();
        conditions.push(("order 1: sum b = 1", (sum_b - 1.0).abs()));

        let sum_bc: f64 = self.b.iter().zip(self.c.iter()).map(|(b, c)| b * c).sum();
        conditions.push(("order 2: sum b c = 1/2", (sum_bc - 0.5).abs()));

        let sum_bc2: f64 = self
            .b
            .iter()
            .zip(self.c.iter())
            .map(|(b, c)| b * c * c)
            .sum();
        conditions.push(("order 3: sum b c^2 = 1/3", (sum_bc2 - 1.0 / 3.0).abs()));

        let mut sum_bac = 0.0;
        for i in 0..STAGES {
            for j in 0..STAGES {
                sum_bac += self.b[i] * self.a[i][j] * self.c[j];
            }
        }
        conditions.push(("order 3: sum b A c = 1/6", (sum_bac - 1.0 / 6.0).abs()));

        let stiff = self.a[STAGES - 1]
            .iter()
            .zip(self.b.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        conditions.push(("stiffly accurate (last row of A equals b)", stiff));

        for (condition, residual) in &conditions {
            if *residual > COND_TOL {
                return Err(Error::InvalidTableau {
                    condition,
                    residual: *residual,
                });
            }
        }
        Ok(TableauReport { conditions })
    }
}

/// Time step selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStepPolicy {
    /// `dt = c_cfl * h_min`.
    Cfl { c_cfl: f64 },
    /// `dt = prefactor * dx^(4/3)`, the accuracy-test choice that makes
    /// spatial error dominant for an order-3 scheme.
    Accuracy1d { prefactor: f64 },
    Fixed { dt: f64 },
}

impl TimeStepPolicy {
    pub fn dt(&self, h_min: f64) -> f64 {
        match self {
            TimeStepPolicy::Cfl { c_cfl } => c_cfl * h_min,
            TimeStepPolicy::Accuracy1d { prefactor } => prefactor * h_min.powf(4.0 / 3.0),
            TimeStepPolicy::Fixed { dt } => *dt,
        }
    }
}

/// Aggregate run statistics.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub steps: usize,
    pub solves: Vec<SolveStats>,
}

impl RunStats {
    pub fn max_residual(&self) -> f64 {
        self.solves.iter().fold(0.0, |m, s| m.max(s.residual))
    }

    pub fn total_iterations(&self) -> usize {
        self.solves.iter().map(|s| s.iterations).sum()
    }
}

/// DIRK integrator bound to one operator. Stage factorizations are cached
/// by the exact bits of `alpha = dt * a_ii`, so repeated steps at the same
/// step size reuse one factorization and stay bitwise reproducible.
pub struct DirkIntegrator<'a> {
    l: &'a CsrMatrix,
    tableau: ButcherTableau,
    mode: SolveMode,
    cache: BTreeMap<u64, StageSystem>,
    pub stats: RunStats,
}

impl<'a> DirkIntegrator<'a> {
    pub fn new(l: &'a CsrMatrix, tableau: ButcherTableau, mode: SolveMode) -> Result<Self> {
        tableau.validate()?;
        if l.n_rows() != l.n_cols() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "operator is {}x{}",
                l.n_rows(),
                l.n_cols()
            )));
        }
        Ok(Self {
            l,
            tableau,
            mode,
            cache: BTreeMap::new(),
            stats: RunStats::default(),
        })
    }

    pub fn tableau(&self) -> &ButcherTableau {
        &self.tableau
    }

    fn ensure_system(&mut self, alpha: f64) -> Result<()> {
        let key = alpha.to_bits();
        if !self.cache.contains_key(&key) {
            let sys = build_stage_matrix(self.l, alpha, self.mode)?;
            self.cache.insert(key, sys);
        }
        Ok(())
    }

    /// One DIRK step: stage `i` solves
    /// `(I - dt a_ii L) W_i = w + dt sum_{j<i} a_ij (L W_j)`;
    /// the step output is the last stage (stiff accuracy).
    pub fn step(&mut self, w: &[f64], dt: f64) -> Result<Vec<f64>> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParams(alloc::format!("dt = {dt}")));
        }
        let l = self.l;
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(STAGES - 1);
        let mut w_stage: Vec<f64> = w.to_vec();
        for i in 0..STAGES {
            let mut rhs = w.to_vec();
            for (j, kj) in k.iter().enumerate() {
                let aij = self.tableau.a[i][j];
                if aij != 0.0 {
                    let f = dt * aij;
                    for (r, kv) in rhs.iter_mut().zip(kj.iter()) {
                        *r += f * kv;
                    }
                }
            }
            let aii = self.tableau.a[i][i];
            w_stage = if aii == 0.0 {
                rhs
            } else {
                let alpha = dt * aii;
                self.ensure_system(alpha).map_err(|e| Error::StageSolve {
                    stage: i,
                    source: e.to_string(),
                })?;
                let sys = self.cache.get(&alpha.to_bits()).expect("cached");
                let (x, st) = sys.solve(&rhs).map_err(|e| Error::StageSolve {
                    stage: i,
                    source: e.to_string(),
                })?;
                self.stats.solves.push(st);
                x
            };
            if i + 1 < STAGES {
                k.push(l.matvec(&w_stage));
            }
        }
        self.stats.steps += 1;
        Ok(w_stage)
    }

    /// March from `t = 0` to `t_final` with the nominal step from `policy`,
    /// clipping steps to land exactly on every snapshot time and on
    /// `t_final`. Returns the final state and the recorded snapshots.
    pub fn integrate(
        &mut self,
        w0: &[f64],
        t_final: f64,
        policy: &TimeStepPolicy,
        h_min: f64,
        snapshot_times: &[f64],
    ) -> Result<(Vec<f64>, Vec<(f64, Vec<f64>)>)> {
        if !(t_final > 0.0) {
            return Err(Error::InvalidParams(alloc::format!(
                "t_final = {t_final}"
            )));
        }
        let dt_nom = policy.dt(h_min);
        if !(dt_nom > 0.0) || !dt_nom.is_finite() {
            return Err(Error::InvalidParams(alloc::format!(
                "policy produced dt = {dt_nom}"
            )));
        }
        let mut events: Vec<f64> = snapshot_times
            .iter()
            .copied()
            .filter(|&t| t > 0.0 && t < t_final)
            .collect();
        events.push(t_final);
        events.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        events.dedup();

        let mut w = w0.to_vec();
        let mut snapshots = Vec::new();
        let mut t = 0.0f64;
        for &event in &events {
            while t < event {
                let remaining = event - t;
                // Clip to the event, absorbing sub-ulp leftovers.
                let dt = if remaining <= dt_nom * (1.0 + 1e-9) {
                    remaining
                } else {
                    dt_nom
                };
                w = self.step(&w, dt)?;
                t = if dt == remaining { event } else { t + dt };
            }
            if event < t_final {
                snapshots.push((event, w.clone()));
            }
        }
        Ok((w, snapshots))
    }
}
