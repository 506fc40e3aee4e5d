//! Verification thresholds, read from the checked-in `data/thresholds.toml`.

use serde::Deserialize;

use crate::error::{Error, Result};

const DEFAULTS: &str = include_str!("../data/thresholds.toml");

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Thresholds {
    pub approx: ApproxThresholds,
    pub sieve: SieveThresholds,
    pub rho: RhoThresholds,
    pub constants: ConstantsThresholds,
    pub lattice: LatticeThresholds,
    pub sums: SumsThresholds,
    pub identities: IdentityThresholds,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ApproxThresholds {
    pub c1_floor: f64,
    pub d_max: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SieveThresholds {
    pub d_min: u64,
    pub d_max: u64,
    pub h: u64,
    pub growth_exponent: f64,
    pub growth_slack: f64,
    pub d_from: u64,
}

impl SieveThresholds {
    pub fn max_growth(&self) -> f64 {
        2f64.powf(self.growth_exponent) * self.growth_slack
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RhoThresholds {
    pub d_max_brute: u64,
    pub convolution_k_max: u64,
    pub dirichlet_n_max: u64,
    pub dirichlet_relative: f64,
    pub e_safety: f64,
    pub calibration_max: u64,
    pub e_check_max: u64,
    pub rho_over_d_c: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ConstantsThresholds {
    pub l1_tolerance: f64,
    pub cutoffs: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LatticeThresholds {
    pub ellipse_c: f64,
    pub ellipse_x_max: u64,
    pub constrained_c: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SumsThresholds {
    pub oracle_x_max: u64,
    pub spot_checks: Vec<u64>,
    pub grid: Vec<u64>,
    pub slope_max: f64,
    pub decrease_min: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct IdentityThresholds {
    pub geometric_tolerance: f64,
}

impl Thresholds {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::parse(DEFAULTS).expect("bundled thresholds parse")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_defaults_parse() {
        let t = Thresholds::default();
        assert_eq!(t.approx.c1_floor, 0.05);
        assert!((t.sieve.max_growth() - 2f64.powf(0.2) * 1.25).abs() < 1e-15);
        assert_eq!(t.sums.grid, vec![512, 1024, 2048, 4096]);
        assert!(Thresholds::parse("[approx]\nc1_floor = 1").is_err());
    }
}
