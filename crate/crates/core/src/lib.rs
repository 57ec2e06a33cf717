//! Numerical toolkit for smooth character sums to a product of three
//! distinct primes: exact modular kernels, Dirichlet characters, complete
//! sums, the smooth delta symbol, Poisson-summation verification, central
//! L-values, and the sweep harness behind the `charsum-lab` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod character;
pub mod complete_sums;
pub mod delta;
pub mod error;
pub mod experiments;
pub mod lfunction;
pub mod modular;
pub mod phase;
pub mod quad;
pub mod smooth_sums;
pub mod weights;

pub use error::{Error, Result};
