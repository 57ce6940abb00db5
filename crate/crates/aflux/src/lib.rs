//! Semi-discrete active flux (AF) schemes for the hyperbolic heat equation
//!
//! ```text
//!   p_t + (1/eps) div u           = 0
//!   u_t + (1/eps) grad p + (sigma/eps^2) u = 0
//! ```
//!
//! on periodic uniform grids in one and two space dimensions. The method
//! evolves cell averages together with point values at cell interfaces
//! (1D) or at face centers and corners (2D); fluxes are read directly from
//! the point values, so no Riemann solver is involved.
//!
//! The crate provides
//!
//! - the semi-discrete right-hand sides for the Jacobian-splitting (JS) and
//!   alternating-flux point updates ([`ops1d`], [`ops2d`]),
//! - assembly of the global linear operator in compressed sparse row form
//!   and the stage solvers needed by implicit time stepping ([`sparse`],
//!   [`linsolve`]),
//! - a stiffly accurate four-stage third-order DIRK integrator ([`dirk`]),
//! - the Fourier symbols of the PDE and of both schemes, together with
//!   eigen-decomposition, mode projection and error-splitting reports
//!   ([`fourier`]),
//! - the formal `eps -> 0` limit schemes and spectral heat-equation
//!   references used to verify the asymptotic-preserving property
//!   ([`limits`]).
//!
//! Everything here is pure computation on owned buffers; file formats and
//! experiment drivers live in the companion CLI crate. The crate is
//! `no_std` (with `alloc`); float transcendentals come from `libm` through
//! `num-traits`.

#![no_std]
#![forbid(unsafe_code)]
// Float transcendentals resolve through `num_traits::Float` in no_std
// builds; under `cfg(test)` the std inherent methods win and those imports
// go quiet.
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dirk;
pub mod error;
pub mod fit;
pub mod fourier;
pub mod grid;
pub mod limits;
pub mod linsolve;
pub mod model;
pub mod norms;
pub mod ops1d;
pub mod ops2d;
pub mod project;
pub mod sparse;
pub mod state;

pub use error::Error;
pub use grid::{GridSpec1D, GridSpec2D};
pub use model::{ModelParams1D, ModelParams2D, Variant};
pub use sparse::CsrMatrix;
pub use state::{LimitState1D, LimitState2D, State1D, State2D};

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
