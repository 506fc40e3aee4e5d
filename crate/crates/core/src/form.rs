use serde::Serialize;

use crate::arith::kronecker;
use crate::error::{domain, Result};

/// The nine `N` for which `Q(sqrt(-N))` has class number one.
pub const CLASS_NUMBER_ONE: [u32; 9] = [1, 2, 3, 7, 11, 19, 43, 67, 163];

/// The values covered by the main theorem.
pub const THEOREM_SET: [u32; 3] = [2, 67, 163];

/// A validated `N` together with the data of the character `chi_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FormParameter {
    n: u32,
    discriminant: i64,
    units: u32,
}

impl FormParameter {
    pub fn new(n: u32) -> Result<Self> {
        if !CLASS_NUMBER_ONE.contains(&n) {
            return domain(format!("N = {n} is not one of {CLASS_NUMBER_ONE:?}"));
        }
        let discriminant = if n <= 2 { -4 * n as i64 } else { -(n as i64) };
        let units = match n {
            1 => 4,
            3 => 6,
            _ => 2,
        };
        Ok(FormParameter { n, discriminant, units })
    }

    /// Like [`FormParameter::new`] but restricted to `{1, 2, 67, 163}`,
    /// the values for which the approximation and sieve lemmas are stated.
    pub fn for_theorem_paths(n: u32) -> Result<Self> {
        if ![1, 2, 67, 163].contains(&n) {
            return domain(format!("N = {n} is outside {{1, 2, 67, 163}}"));
        }
        Self::new(n)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_u64(&self) -> u64 {
        self.n as u64
    }

    pub fn fundamental_discriminant(&self) -> i64 {
        self.discriminant
    }

    /// Conductor `|D|` of `chi_N`.
    pub fn conductor(&self) -> u64 {
        self.discriminant.unsigned_abs()
    }

    pub fn units_count(&self) -> u32 {
        self.units
    }

    /// `N = 3 mod 4`: the ring of integers is `Z[(1 + sqrt(-N))/2]`.
    pub fn half_integral(&self) -> bool {
        self.n % 4 == 3
    }

    /// `chi_N(n) = (D / n)`.
    pub fn chi(&self, n: i128) -> i8 {
        kronecker(self.discriminant as i128, n)
    }

    /// Primes dividing `2N`.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut v = vec![2u64];
        if self.n > 2 {
            v.push(self.n as u64);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FormParameter::new(5).is_err());
        assert!(FormParameter::new(0).is_err());
        assert!(FormParameter::for_theorem_paths(7).is_err());
        let f = FormParameter::new(163).unwrap();
        assert_eq!(f.fundamental_discriminant(), -163);
        assert_eq!(FormParameter::new(2).unwrap().fundamental_discriminant(), -8);
        assert_eq!(FormParameter::new(1).unwrap().units_count(), 4);
    }

    #[test]
    fn chi_examples() {
        let f = FormParameter::new(2).unwrap();
        assert_eq!(f.chi(3), 1);
        assert_eq!(f.chi(5), -1);
        assert_eq!(f.chi(2), 0);
        for n in [3u32, 11, 19, 43, 67, 163] {
            assert_eq!(FormParameter::new(n).unwrap().chi(2), -1);
        }
        assert_eq!(FormParameter::new(7).unwrap().chi(2), 1);
    }

    #[test]
    fn chi_vanishes_exactly_on_ramified() {
        for &n in &CLASS_NUMBER_ONE {
            let f = FormParameter::new(n).unwrap();
            for m in 1..500i128 {
                let ramified = (m % 2 == 0 && n <= 2) || (n > 2 && m % n as i128 == 0);
                assert_eq!(f.chi(m) == 0, ramified, "N={n} m={m}");
            }
        }
    }
}
