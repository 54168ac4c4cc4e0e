//! The Askey-Wilson divided-difference operator `D_q` on weighted `L²[-1, 1]`
//! spaces and its right inverse `D_q^{-1}`.
//!
//! Two independent realizations of the inverse are provided and checked
//! against each other:
//!
//! - a spectral coefficient map between Chebyshev `U`- and `T`-expansions
//!   ([`awoperator::dq_inverse_spectral`]);
//! - an integral operator whose kernel is the logarithmic derivative of the
//!   Jacobi theta function `ϑ₄` ([`awoperator::dq_inverse_integral`]).
//!
//! The [`qhermite`] module carries the same construction over to the space
//! weighted by the Rogers q-Hermite weight, and [`conformal`] evaluates the
//! Riemann map of an ellipse onto the unit disc, whose series is a multiple
//! of the same kernel.

pub mod awoperator;
pub mod chebyshev;
pub mod cli;
pub mod conformal;
mod dd;
mod error;
pub mod qcore;
pub mod qhermite;
pub mod quadrature;
pub mod theta;

pub use error::{Error, Result};
pub use qcore::{Order, QParameter, Tolerance};
