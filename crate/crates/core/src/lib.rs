//! Dynamics of the generalized tangent family `T_α(z) = (w − 1)/(αw − 1)`,
//! `w = e^{(α−1)z/8}`, and of the Newton maps of `z ↦ a e^z + 1`.
//!
//! The crate covers point evaluation on the Riemann sphere, orbit
//! classification with cycle refinement, parameter-plane analysis, the
//! model conjugacy constants, rational approximants, rendering of fate
//! grids and an HTTP backend for the explorer.

pub mod analysis;
pub mod cli;
pub mod conjugacy;
pub mod error;
pub mod json;
pub mod model;
pub mod newton;
pub mod orbit;
pub mod rational;
pub mod render;
pub mod service;
pub mod sphere;

pub use error::{Result, TandelbrotError};
pub use model::{Clamp, EvalOutcome, TangentParam};
pub use orbit::{classify_orbit, refine_cycle, CycleInfo, IterationSettings, OrbitFate, OrbitMap};
pub use sphere::SpherePoint;
