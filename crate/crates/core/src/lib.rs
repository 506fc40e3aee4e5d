//! Exact and asymptotic computations for the divisor sum
//! `S_N(x) = sum_{m,n <= x} d(n^2 + N m^2)` over the class-number-one forms.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: factorisation, Kronecker symbol, modular square roots, CRT.
//! * [`roots`]: solutions of `v^2 + N = 0 (mod d)` by lifting and by norm
//!   representations.
//! * [`approx`]: rational approximations `a/q` to `v/d` with `q` of size `sqrt(d)`.
//! * [`expsums`]: the large-sieve sum over roots and its bound study.
//! * [`rho`]: the multiplicative functions `rho_0`, `rho` and their partial sums.
//! * [`constants`]: L-values, Euler products and the asymptotic coefficients.
//! * [`sums`]: brute-force and hyperbola engines for `S_N(x)`.
//! * [`verify`]: invariant suites used by the command-line front end.

pub mod approx;
pub mod arith;
pub mod constants;
mod error;
pub mod expsums;
pub mod form;
pub mod rho;
pub mod roots;
pub mod sums;
pub mod thresholds;
pub mod verify;

pub use error::{Error, Result};
pub use form::FormParameter;
