//! Exact integer primitives shared by every other module.

pub mod factor;
pub mod functions;
pub mod modular;

pub use factor::{factor, factor_seeded, is_prime, primes_up_to, FactoredInteger};
pub use functions::{
    dirichlet_divisor_sum, divisor_count, divisors, euler_phi, mobius, ramanujan_sum, SpfSieve,
};
pub use modular::{crt_combine, gcd, hensel_lift, isqrt, kronecker, mod_inverse, sqrt_mod};
