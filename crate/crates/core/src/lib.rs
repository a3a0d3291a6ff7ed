//! Posterior sampling for linear inverse problems `y = A f + ε` with Besov
//! space priors, using randomize-then-optimize proposals corrected by an
//! independence Metropolis-Hastings step.
//!
//! The prior is whitened: `f = B⁻¹ g(h)` with `h` standard normal, `B` the
//! weighted wavelet transform and `g` the componentwise map from a standard
//! normal to a generalized Gaussian. Sampling happens in `h`.

// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod forward;
pub mod gen_gaussian;
pub mod prior;
pub mod rto;
pub mod runner;
pub mod wavelet;

pub use error::{Error, Result};
