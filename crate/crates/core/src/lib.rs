//! Explicit constants for second-moment inequalities of the form
//! `E‖S_n‖² ≤ K Σ E‖X_i‖²` on `ℝ^d` with `r`-norms, together with the
//! numerical machinery used to check them: Gaussian tails, quadrature for
//! `E max_j Z_j²`, exact enumeration and seeded Monte Carlo over finite laws.
//!
//! Modules:
//! - [`norm`]: `r`-norms, the functional `V(f) = ‖f‖_r²` and its gradient.
//! - [`constants`]: every `K(d, r)` variant and the auxiliary constants.
//! - [`gauss`]: normal density/CDF, tail bounds, `c_d²` and its bounds.
//! - [`simulate`]: extremal distributions, exact and Monte Carlo ratios.
//! - [`report`]: tabular documents and the command implementations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod gauss;
pub mod norm;
pub mod optimize;
pub mod quad;
pub mod report;
pub mod rng;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
pub use norm::{RExponent, RealVector};
