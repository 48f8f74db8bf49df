//! Numerical verification of Picone-type identities for half-linear
//! second- and fourth-order differential equations.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It is split
//! into:
//!
//! - [`sgnpow`]: the signed power `φ(s) = |s|^(α-1) s`, its inverse and the
//!   nonnegative Q-form shared by every identity;
//! - [`expr`]: a small expression language for coefficients and test
//!   functions, with evaluation and symbolic differentiation;
//! - [`ode`]: quasi-derivative first-order systems and an adaptive
//!   Dormand–Prince integrator with dense output;
//! - [`picone`]: bracket/right-hand-side evaluators and residual
//!   verification for each identity;
//! - [`sturm`]: zero finding, eigenvalue shooting and the comparison
//!   theorem harnesses.

#![no_std]
// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod expr;
pub mod ode;
pub mod picone;
pub mod sgnpow;
pub mod sturm;

pub use error::{Error, Result};
pub use expr::CoeffExpr;
pub use sgnpow::SignedPowerParam;
