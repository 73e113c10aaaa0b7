//! Invariant and classical finite-difference schemes for the periodic viscous
//! Burgers equation `u_t + u u_x = ν u_xx`.
//!
//! - [`mesh`]: grid slices and the grid equations (stationary, Lagrangian,
//!   constant speed, equidistribution).
//! - [`scheme`]: the discrete update and the time integrator.
//! - [`interp`]: periodic interpolation used for projection and comparisons.
//! - [`symmetry`]: group actions and stencil-level invariance defects.
//! - [`exact`]: the Cole–Hopf reference solution for `u(0, x) = sin x`.
//! - [`harness`]: error norms, studies and CSV output.

pub mod error;
pub mod exact;
pub mod harness;
pub mod interp;
pub mod mesh;
pub mod scheme;
pub mod symmetry;

pub use error::{Error, Result};
pub use exact::FourierCoeffs;
pub use interp::{InterpKind, PeriodicInterpolant};
pub use mesh::{GridSlice, MonitorForm, MonitorParams, RelaxationParams};
pub use scheme::{run, DiscreteField, SchemeConfig, SchemeKind, Trajectory};
pub use symmetry::{Generator, GroupElement};
