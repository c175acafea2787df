//! Physical problem description.

use crate::profile::PerturbationProfile;
use crate::transverse::check_simple_spectrum;
use crate::{Error, Result};

/// The waveguide: dimension, width, base coupling, perturbation.
///
/// `n` is the longitudinal dimension (1 = strip in ℝ², 2 = layer in ℝ³),
/// `d` the transversal width, and the boundary coupling is
/// `α(x) = α₀ + ε β(x)`.
#[derive(Debug, Clone)]
pub struct WaveguideConfig {
    pub n: u8,
    pub d: f64,
    pub alpha0: f64,
    pub epsilon: f64,
    pub beta: PerturbationProfile,
}

impl WaveguideConfig {
    pub fn new(
        n: u8,
        d: f64,
        alpha0: f64,
        epsilon: f64,
        beta: PerturbationProfile,
    ) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidInput(format!(
                "longitudinal dimension must be 1 or 2, got {n}"
            )));
        }
        if !(d > 0.0) {
            return Err(Error::InvalidInput(format!("width d must be positive, got {d}")));
        }
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "epsilon must be nonnegative, got {epsilon}"
            )));
        }
        if beta.n != n {
            return Err(Error::InvalidInput(format!(
                "profile dimension {} does not match waveguide dimension {n}",
                beta.n
            )));
        }
        check_simple_spectrum(alpha0, d)?;
        beta.validate_decay()?;
        Ok(Self { n, d, alpha0, epsilon, beta })
    }

    /// μ₀² = min{α₀², (π/d)²}.
    pub fn threshold(&self) -> f64 {
        crate::transverse::threshold(self.alpha0, self.d)
    }

    /// α₀⟨β⟩, the sign that decides bound-state existence.
    pub fn coupling_sign(&self) -> f64 {
        self.alpha0 * self.beta.mean
    }

    /// Bound-state searches need the alpha mode below the first cosine mode.
    pub fn require_subcritical(&self) -> Result<()> {
        let crit = std::f64::consts::PI / self.d;
        if self.alpha0.abs() >= crit {
            return Err(Error::BorderlineCase {
                value: self.alpha0.abs(),
                tol: crit,
            });
        }
        Ok(())
    }

    /// α(x) = α₀ + ε β(x).
    pub fn alpha_at(&self, x: &[f64]) -> f64 {
        self.alpha0 + self.epsilon * self.beta.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_beta() -> PerturbationProfile {
        PerturbationProfile::gaussian(1, -1.0 / std::f64::consts::PI.sqrt(), 1.0, 0.0).unwrap()
    }

    #[test]
    fn validates_inputs() {
        let beta = demo_beta();
        assert!(WaveguideConfig::new(1, std::f64::consts::PI, 0.5, 0.1, beta.clone()).is_ok());
        assert!(WaveguideConfig::new(3, 1.0, 0.5, 0.1, beta.clone()).is_err());
        assert!(WaveguideConfig::new(1, -1.0, 0.5, 0.1, beta.clone()).is_err());
        assert!(WaveguideConfig::new(1, 1.0, 0.5, -0.1, beta.clone()).is_err());
        // simple-spectrum violation: alpha0*d/pi = 2
        assert!(WaveguideConfig::new(1, std::f64::consts::PI, 2.0, 0.1, beta.clone()).is_err());
        // dimension mismatch
        assert!(WaveguideConfig::new(2, 1.0, 0.5, 0.1, beta).is_err());
    }

    #[test]
    fn derived_quantities() {
        let cfg =
            WaveguideConfig::new(1, std::f64::consts::PI, 0.5, 0.1, demo_beta()).unwrap();
        assert!((cfg.threshold() - 0.25).abs() < 1e-15);
        assert!((cfg.coupling_sign() + 0.5).abs() < 1e-12); // <beta> = -1
        assert!(cfg.require_subcritical().is_ok());
        let wide = WaveguideConfig::new(1, std::f64::consts::PI, 1.4, 0.1, demo_beta());
        assert!(wide.unwrap().require_subcritical().is_err());
    }
}
