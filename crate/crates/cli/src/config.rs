//! Run configuration: flat `key = value` text with dotted sections.

use robin_waveguide::bs::BsDiscretization;
use robin_waveguide::direct::{DirectNumerics, EndBc};
use robin_waveguide::{Error, PerturbationProfile, WaveguideConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: u8,
    pub d: f64,
    pub alpha0: f64,
    pub epsilon: f64,
    pub beta: BetaConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaConfig {
    pub kind: String,
    pub amplitude: f64,
    pub width: f64,
    #[serde(default)]
    pub center: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// truncation half-length; 0 = automatic
    pub l: f64,
    pub h_x: f64,
    /// 0 = automatic (d/64)
    pub h_u: f64,
    pub j_max: usize,
    /// transversal quadrature order; 0 = automatic
    pub quad_order: usize,
    pub newton_tol: f64,
    /// transversal modes in the Birman-Schwinger reduction
    pub bs_modes: usize,
    /// longitudinal nodes in the Birman-Schwinger reduction
    pub bs_nx: usize,
    /// Birman-Schwinger box half-width; 0 = automatic
    pub bs_l: f64,
    pub end_bc: String,
    pub window_count: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            l: 0.0,
            h_x: 0.1,
            h_u: 0.0,
            j_max: 20,
            quad_order: 0,
            newton_tol: 1e-12,
            bs_modes: 10,
            bs_nx: 121,
            bs_l: 0.0,
            end_bc: "dirichlet".into(),
            window_count: 5,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub csv_path: String,
    pub precision: usize,
}

/// The built-in demo problem: strip, d = π, α₀ = 0.5, gaussian β with
/// ⟨β⟩ = -1, ε = 0.1.
pub const DEMO_CONFIG: &str = r#"
problem.n = 1
problem.d = 3.14159265358979312
problem.alpha0 = 0.5
problem.epsilon = 0.1
problem.beta.kind = "gaussian"
problem.beta.amplitude = -0.56418958354775628
problem.beta.width = 1.0
problem.beta.center = 0.0
"#;

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let cfg: RunConfig = toml::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn demo() -> Self {
        Self::parse(DEMO_CONFIG).expect("demo config is valid")
    }

    fn validate(&self) -> Result<(), Error> {
        let p = &self.problem;
        if !(p.n == 1 || p.n == 2) {
            return Err(Error::InvalidInput(format!("problem.n must be 1 or 2, got {}", p.n)));
        }
        if !(p.d > 0.0) {
            return Err(Error::InvalidInput(format!("problem.d must be positive, got {}", p.d)));
        }
        if !(p.epsilon >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "problem.epsilon must be nonnegative, got {}",
                p.epsilon
            )));
        }
        if !(p.beta.width > 0.0) {
            return Err(Error::InvalidInput(format!(
                "problem.beta.width must be positive, got {}",
                p.beta.width
            )));
        }
        let n = &self.numerics;
        for (name, v) in [
            ("numerics.l", n.l),
            ("numerics.h_x", n.h_x),
            ("numerics.h_u", n.h_u),
            ("numerics.newton_tol", n.newton_tol),
            ("numerics.bs_l", n.bs_l),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if n.h_x == 0.0 {
            return Err(Error::InvalidInput("numerics.h_x must be positive".into()));
        }
        if n.newton_tol == 0.0 || n.newton_tol < 0.0 {
            return Err(Error::InvalidInput(format!(
                "numerics.newton_tol must be positive, got {}",
                n.newton_tol
            )));
        }
        if n.bs_modes < 2 || n.bs_nx < 8 || n.j_max == 0 || n.window_count == 0 {
            return Err(Error::InvalidInput(
                "numerics.bs_modes >= 2, bs_nx >= 8, j_max >= 1, window_count >= 1 required".into(),
            ));
        }
        if !matches!(n.end_bc.as_str(), "dirichlet" | "neumann") {
            return Err(Error::InvalidInput(format!(
                "numerics.end_bc must be dirichlet or neumann, got {}",
                n.end_bc
            )));
        }
        if !matches!(p.beta.kind.as_str(), "gaussian" | "bump") {
            return Err(Error::InvalidInput(format!(
                "problem.beta.kind must be gaussian or bump, got {}",
                p.beta.kind
            )));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<PerturbationProfile, Error> {
        let b = &self.problem.beta;
        match b.kind.as_str() {
            "gaussian" => {
                PerturbationProfile::gaussian(self.problem.n, b.amplitude, b.width, b.center)
            }
            "bump" => PerturbationProfile::bump(self.problem.n, b.amplitude, b.width, b.center),
            other => Err(Error::InvalidInput(format!("unknown beta kind {other}"))),
        }
    }

    pub fn waveguide(&self) -> Result<WaveguideConfig, Error> {
        WaveguideConfig::new(
            self.problem.n,
            self.problem.d,
            self.problem.alpha0,
            self.problem.epsilon,
            self.profile()?,
        )
    }

    /// Same problem at a different coupling strength.
    pub fn waveguide_at(&self, epsilon: f64) -> Result<WaveguideConfig, Error> {
        WaveguideConfig::new(
            self.problem.n,
            self.problem.d,
            self.problem.alpha0,
            epsilon,
            self.profile()?,
        )
    }

    pub fn direct_numerics(&self) -> DirectNumerics {
        DirectNumerics {
            l: self.numerics.l,
            h_x: self.numerics.h_x,
            h_u: self.numerics.h_u,
            end_bc: if self.numerics.end_bc == "neumann" {
                EndBc::Neumann
            } else {
                EndBc::Dirichlet
            },
            window_count: self.numerics.window_count,
        }
    }

    pub fn bs_discretization(&self) -> BsDiscretization {
        BsDiscretization {
            j_modes: self.numerics.bs_modes,
            n_x: self.numerics.bs_nx,
            l: self.numerics.bs_l,
            quad_order_u: self.numerics.quad_order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_parses_and_builds() {
        let cfg = RunConfig::demo();
        let wg = cfg.waveguide().unwrap();
        assert_eq!(wg.n, 1);
        assert!((wg.beta.mean + 1.0).abs() < 1e-10);
    }

    #[test]
    fn flat_dotted_keys_parse() {
        let text = "problem.n = 1\nproblem.d = 3.0\nproblem.alpha0 = 0.4\nproblem.epsilon = 0.05\nproblem.beta.kind = \"bump\"\nproblem.beta.amplitude = -1.0\nproblem.beta.width = 2.0\nnumerics.h_x = 0.05\noutput.precision = 17\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.problem.beta.kind, "bump");
        assert_eq!(cfg.numerics.h_x, 0.05);
    }

    #[test]
    fn rejects_bad_values() {
        // negative tolerance
        let text = "problem.n = 1\nproblem.d = 3.0\nproblem.alpha0 = 0.4\nproblem.epsilon = 0.05\nproblem.beta.kind = \"gaussian\"\nproblem.beta.amplitude = -1.0\nproblem.beta.width = 1.0\nnumerics.newton_tol = -1.0\n";
        assert!(RunConfig::parse(text).is_err());
        // unknown key
        let text2 = "problem.n = 1\nproblem.d = 3.0\nproblem.alpha0 = 0.4\nproblem.epsilon = 0.05\nproblem.beta.kind = \"gaussian\"\nproblem.beta.amplitude = -1.0\nproblem.beta.width = 1.0\nproblem.mystery = 2\n";
        assert!(RunConfig::parse(text2).is_err());
        // bad dimension
        let text3 = "problem.n = 5\nproblem.d = 3.0\nproblem.alpha0 = 0.4\nproblem.epsilon = 0.05\nproblem.beta.kind = \"gaussian\"\nproblem.beta.amplitude = -1.0\nproblem.beta.width = 1.0\n";
        assert!(RunConfig::parse(text3).is_err());
    }
}
