//! Implicit discretization of nonautonomous monotone inclusions and
//! subgradient flows, with Brézis–Haraux/Fitzpatrick evaluators, the
//! viscosity value map, and numerical summability diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ext_real;
pub mod diagnostics;
pub mod experiments;
pub mod fitzpatrick;
pub mod integrator;
pub mod linalg;
pub mod operator_core;
pub mod viscosity_omega;

pub use error::{Error, Result};
pub use ext_real::ExtReal;
pub use linalg::{vector, Matrix, Vector};
