use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Reduced Planck constant and particle mass. Defaults to `ħ = m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        let c = Self { hbar, mass };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return config(format!("hbar must be positive, got {}", self.hbar));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return config(format!("mass must be positive, got {}", self.mass));
        }
        Ok(())
    }

    /// Nelson diffusion coefficient `ħ/2m`.
    pub fn diffusion(&self) -> f64 {
        self.hbar / (2.0 * self.mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert!(PhysicalConstants::new(f64::NAN, 1.0).is_err());
        assert_eq!(PhysicalConstants::new(1.0, 1.0).unwrap(), PhysicalConstants::default());
    }
}
