//! Symmetric-power L-functions of holomorphic newforms.
//!
//! The crate covers exact q-expansions and Hecke validation, Dirichlet
//! characters and Gauss sums, symmetric-power Euler factors, CM forms from
//! Hecke characters of class-number-one imaginary quadratic fields,
//! critical sets and period predictions, the closed-form cohomological
//! bookkeeping for GL(n), arbitrary-precision evaluation of completed
//! L-functions, and the harnesses that check special-value relations.

pub mod analytic;
pub mod arith;
pub mod characters;
pub mod cohomology;
pub mod critical;
pub mod cyclo;
pub mod dihedral;
pub mod error;
pub mod numeric;
pub mod qseries;
pub mod satake;
pub mod verify;

pub use error::{Error, Result};
