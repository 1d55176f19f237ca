//! q-series numerics and identity certification for little q-Bessel functions.
//!
//! * [`qcore`]: q-shifted factorials for finite, negative and infinite index.
//! * [`hyperq`]: the r-phi-s engine, the regularized 1φ1 and its shift relation.
//! * [`qspecial`]: little q-Bessel, little q-Jacobi, affine q-Krawtchouk and big
//!   q-Bessel functions, r-polynomials and c-coefficients.
//! * [`identities`]: residual reports for addition, product, orthogonality,
//!   limit and bound identities, and the product-formula kernel.
//! * [`oracle`]: brute-force evaluators for tests, generic over precision.
//!
//! ```
//! use qbessel::{qcore::{QBase, TruncationPolicy}, qspecial::little_q_bessel_j};
//! let q = QBase::new(0.5).unwrap();
//! let j = little_q_bessel_j(1.5, 0.25, q, &TruncationPolicy::default()).unwrap();
//! assert!(j.tail_bound < 1e-15);
//! ```

// `!(x > a)` is used on purpose so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hyperq;
pub mod identities;
pub mod numeric;
pub mod oracle;
pub mod qcore;
pub mod qspecial;

pub use error::{QError, Result};
