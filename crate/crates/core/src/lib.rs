//! Neural network operators activated by the error function.
//!
//! [`partition`] builds the bell-shaped density `chi` from `erf` and its
//! partition of unity; [`operators`] evaluates the quasi-interpolation,
//! Kantorovich, quadrature and interval-normalized operators; [`bounds`]
//! computes their error bounds from moduli of continuity ([`modulus`]) and
//! Caputo derivatives ([`fractional`]) and checks them against measured errors.
//!
//! ```
//! use erfnn::partition::{partition_sum, TruncationPolicy};
//! let s = partition_sum(0.3, 16, &TruncationPolicy::default()).unwrap();
//! assert!((s - 1.0).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod fractional;
pub mod modulus;
pub mod operators;
pub mod partition;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
