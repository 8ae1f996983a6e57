//! Numerical laboratory for radial solutions of a Neumann problem on the
//! ball: -Δu + μu = |u|^{p-2}u with zero normal derivative.
//!
//! The crate provides a singularity-safe radial integrator, a shooting
//! solver for the boundary value problem, pseudo-arclength continuation of
//! solution branches in the exponent p, the radial Neumann Green's function
//! with its mass at the origin, bubble asymptotics with reduced-energy
//! landscapes, and Pohozaev-identity audits of computed profiles.

pub mod asymptotics;
pub mod bvp;
pub mod config;
pub mod continuation;
pub mod diagnostics;
pub mod error;
pub mod geom;
pub mod greenmass;
pub mod io;
pub mod ode;
pub mod problem;
pub mod quad;
pub mod radial_ode;
pub mod roots;

pub use error::{Error, Result};
pub use problem::{Profile, RadialProblem};
