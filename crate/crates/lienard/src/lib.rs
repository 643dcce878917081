//! Analysis of planar vector fields of the form
//!
//! ```text
//! x' = phi(y) - F(x, y)
//! y' = -g(x)
//! ```
//!
//! on a strip `(a, b) x R`. When `F` vanishes on `x = 0` and on two curves
//! `x = psi1(y) > 0 > psi2(y)` satisfying a set of sign and monotonicity
//! hypotheses, such a system admits at most one limit cycle crossing both
//! curves. This crate audits those hypotheses numerically on a window,
//! locates cycles as fixed points of the Poincare return map on the positive
//! x-axis, and certifies each cycle against the structural facts the theory
//! predicts (vanishing loop integral of `g F`, one curve crossing per
//! quadrant, arc sign decomposition).
//!
//! Modules follow the pipeline: [`descriptor`] and [`system`] model the
//! field with exact derivatives, [`hypotheses`] audits the assumptions,
//! [`integrator`] provides adaptive integration with event detection,
//! [`cycles`] locates and certifies cycles, and [`presets`] builds the
//! Gaussian-bump example family.

pub mod cycles;
pub mod descriptor;
pub mod hypotheses;
pub mod integrator;
pub mod presets;
pub mod quad;
pub mod system;

pub use descriptor::{Antiderivative, BivariateDescriptor, FunctionDescriptor};
pub use system::{EnergyPair, Interval, PlanarSystem, SystemError};
