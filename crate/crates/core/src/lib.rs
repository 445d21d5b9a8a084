//! Shooting solver and verifier for the momentum-construction ODE
//! boundary-value problems behind conical higher cscK and smooth higher
//! extremal Kähler metrics on the pseudo-Hirzebruch surface.

// negated comparisons are used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod extrapolate;
pub mod futaki;
pub mod invariants;
pub mod ivp;
pub mod params;
pub mod profile;
pub mod quadrature;
pub mod report;
pub mod shooting;

pub use error::{Error, Result};
