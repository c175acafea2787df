//! Boundary-coupling perturbation profiles β: ℝⁿ → ℝ.
//!
//! Two built-in families with closed-form means and derivatives — a gaussian
//! and a C² compactly supported bump — plus an escape hatch for custom
//! closures.  Profiles carry their decay class; solvers reject profiles that
//! fail the polynomial-decay sampling check required by the weak-coupling
//! machinery (`|x|^{5+δ} β → 0` for the strip, `|x|^{4+δ} β` for the layer).

use std::sync::Arc;

use crate::{Error, Result};

/// Decay classification of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayClass {
    Gaussian,
    CompactBump,
    Custom,
}

#[derive(Clone)]
enum ProfileKind {
    /// b · exp(-|x - c|²/σ²), center on the first axis.
    Gaussian { amplitude: f64, width: f64, center: f64 },
    /// b · (1 - |x - c|²/σ²)³ inside |x - c| < σ, zero outside (C²).
    Bump { amplitude: f64, width: f64, center: f64 },
    Custom {
        eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        grad: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
        hess_trace: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        mean: f64,
        /// skip the decay sampling check (test-only constants etc.)
        unchecked: bool,
    },
}

/// The perturbation β together with its first two derivatives, its mean
/// `⟨β⟩ = ∫ β`, and decay metadata.  Immutable and cheap to clone.
#[derive(Clone)]
pub struct PerturbationProfile {
    kind: ProfileKind,
    /// Longitudinal dimension the profile lives on (1 or 2).
    pub n: u8,
    /// ⟨β⟩ = ∫_{ℝⁿ} β(x) dx, closed form for the built-in families.
    pub mean: f64,
    pub decay_class: DecayClass,
}

impl std::fmt::Debug for PerturbationProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PerturbationProfile")
            .field("n", &self.n)
            .field("mean", &self.mean)
            .field("decay_class", &self.decay_class)
            .finish()
    }
}

impl PerturbationProfile {
    pub fn gaussian(n: u8, amplitude: f64, width: f64, center: f64) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidInput(format!("n must be 1 or 2, got {n}")));
        }
        if width <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "gaussian width must be positive, got {width}"
            )));
        }
        let mean = match n {
            1 => amplitude * width * std::f64::consts::PI.sqrt(),
            _ => amplitude * width * width * std::f64::consts::PI,
        };
        let p = Self {
            kind: ProfileKind::Gaussian { amplitude, width, center },
            n,
            mean,
            decay_class: DecayClass::Gaussian,
        };
        p.validate_decay()?;
        Ok(p)
    }

    pub fn bump(n: u8, amplitude: f64, width: f64, center: f64) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidInput(format!("n must be 1 or 2, got {n}")));
        }
        if width <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "bump width must be positive, got {width}"
            )));
        }
        // ∫(1-t²)³ dt over [-1,1] = 32/35; 2π ∫₀¹ (1-t²)³ t dt = π/4
        let mean = match n {
            1 => amplitude * width * 32.0 / 35.0,
            _ => amplitude * width * width * std::f64::consts::PI / 4.0,
        };
        let p = Self {
            kind: ProfileKind::Bump { amplitude, width, center },
            n,
            mean,
            decay_class: DecayClass::CompactBump,
        };
        p.validate_decay()?;
        Ok(p)
    }

    /// Custom profile from closures; the caller supplies the mean and must
    /// have verified decay (the sampling check still runs).
    pub fn custom(
        n: u8,
        eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        grad: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
        hess_trace: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        mean: f64,
    ) -> Result<Self> {
        let p = Self {
            kind: ProfileKind::Custom { eval, grad, hess_trace, mean, unchecked: false },
            n,
            mean,
            decay_class: DecayClass::Custom,
        };
        p.validate_decay()?;
        Ok(p)
    }

    /// Custom profile that bypasses the decay check.  Gauge-transform tests
    /// use this for constant β, which the weak-coupling solvers reject.
    pub fn custom_unchecked(
        n: u8,
        eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        grad: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
        hess_trace: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        mean: f64,
    ) -> Self {
        Self {
            kind: ProfileKind::Custom { eval, grad, hess_trace, mean, unchecked: true },
            n,
            mean,
            decay_class: DecayClass::Custom,
        }
    }

    /// β(x).
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n as usize);
        match &self.kind {
            ProfileKind::Gaussian { amplitude, width, center } => {
                let r2 = radius_sq(x, *center);
                amplitude * (-r2 / (width * width)).exp()
            }
            ProfileKind::Bump { amplitude, width, center } => {
                let t2 = radius_sq(x, *center) / (width * width);
                if t2 >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - t2).powi(3)
                }
            }
            ProfileKind::Custom { eval, .. } => eval(x),
        }
    }

    /// ∇β(x).
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Gaussian { width, center, .. } => {
                let b = self.eval(x);
                let s2 = width * width;
                x.iter()
                    .enumerate()
                    .map(|(i, xi)| {
                        let sh = if i == 0 { xi - center } else { *xi };
                        -2.0 * sh / s2 * b
                    })
                    .collect()
            }
            ProfileKind::Bump { amplitude, width, center } => {
                let s2 = width * width;
                let t2 = radius_sq(x, *center) / s2;
                if t2 >= 1.0 {
                    return vec![0.0; x.len()];
                }
                let common = -6.0 * amplitude * (1.0 - t2) * (1.0 - t2) / s2;
                x.iter()
                    .enumerate()
                    .map(|(i, xi)| {
                        let sh = if i == 0 { xi - center } else { *xi };
                        common * sh
                    })
                    .collect()
            }
            ProfileKind::Custom { grad, .. } => grad(x),
        }
    }

    /// Δ'β(x), the trace of the longitudinal Hessian.
    pub fn hess_trace(&self, x: &[f64]) -> f64 {
        let nf = self.n as f64;
        match &self.kind {
            ProfileKind::Gaussian { width, center, .. } => {
                let b = self.eval(x);
                let s2 = width * width;
                let r2 = radius_sq(x, *center);
                b * (4.0 * r2 / (s2 * s2) - 2.0 * nf / s2)
            }
            ProfileKind::Bump { amplitude, width, center } => {
                let s2 = width * width;
                let r2 = radius_sq(x, *center);
                let t2 = r2 / s2;
                if t2 >= 1.0 {
                    return 0.0;
                }
                // ∂_i [ -6 a (1-t²)² x_i/σ² ] summed:
                // -6a/σ² [ n (1-t²)² - 4 (1-t²) r²/σ² ]
                -6.0 * amplitude / s2 * ((1.0 - t2) * (1.0 - t2) * nf - 4.0 * (1.0 - t2) * t2)
            }
            ProfileKind::Custom { hess_trace, .. } => hess_trace(x),
        }
    }

    /// Center offset along the first axis (0 for custom profiles).
    pub fn center(&self) -> f64 {
        match &self.kind {
            ProfileKind::Gaussian { center, .. } | ProfileKind::Bump { center, .. } => *center,
            ProfileKind::Custom { .. } => 0.0,
        }
    }

    /// Characteristic width used for grid sizing (1 for custom profiles).
    pub fn width(&self) -> f64 {
        match &self.kind {
            ProfileKind::Gaussian { width, .. } | ProfileKind::Bump { width, .. } => *width,
            ProfileKind::Custom { .. } => 1.0,
        }
    }

    /// Copy of the profile with flipped sign: (-β)(x) = -β(x).
    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        match &mut p.kind {
            ProfileKind::Gaussian { amplitude, .. } | ProfileKind::Bump { amplitude, .. } => {
                *amplitude = -*amplitude;
            }
            ProfileKind::Custom { eval, grad, hess_trace, mean, .. } => {
                let (e, g, h) = (eval.clone(), grad.clone(), hess_trace.clone());
                *eval = Arc::new(move |x: &[f64]| -e(x));
                *grad = Arc::new(move |x: &[f64]| g(x).iter().map(|v| -v).collect());
                *hess_trace = Arc::new(move |x: &[f64]| -h(x));
                *mean = -*mean;
            }
        }
        p.mean = -p.mean;
        p
    }

    /// Copy of the profile translated so its center sits at the origin.
    pub fn centered(&self) -> Self {
        let mut p = self.clone();
        match &mut p.kind {
            ProfileKind::Gaussian { center, .. } | ProfileKind::Bump { center, .. } => {
                *center = 0.0;
            }
            ProfileKind::Custom { .. } => {}
        }
        p
    }

    /// Half-width L beyond which |β| and its derivatives drop below `tol`
    /// (measured from the center).
    pub fn support_halfwidth(&self, tol: f64) -> f64 {
        match &self.kind {
            ProfileKind::Gaussian { amplitude, width, .. } => {
                let a = amplitude.abs().max(1e-30);
                width * (a / tol).ln().max(1.0).sqrt() + width
            }
            ProfileKind::Bump { width, .. } => *width,
            ProfileKind::Custom { .. } => {
                // scan outward
                let mut l = 1.0;
                while l < 1e4 {
                    let v = self.eval_axis(l).abs().max(self.eval_axis(-l).abs());
                    if v < tol {
                        return l;
                    }
                    l *= 1.5;
                }
                l
            }
        }
    }

    fn eval_axis(&self, x1: f64) -> f64 {
        let mut x = vec![0.0; self.n as usize];
        x[0] = x1;
        self.eval(&x)
    }

    /// Sampling check of the decay hypotheses: `|x|^{5+δ} β(x)` (strip) or
    /// `|x|^{4+δ} β(x)` (layer) must decrease monotonically through
    /// |x| ∈ {10, 20, 40} (relative to the center) down to < 1e-6, for β and
    /// both derivative levels.  δ = 1/2.
    pub fn validate_decay(&self) -> Result<()> {
        if let ProfileKind::Custom { unchecked: true, .. } = self.kind {
            return Ok(());
        }
        let exponent = if self.n == 1 { 5.5 } else { 4.5 };
        let c = self.center();
        let samples = [10.0, 20.0, 40.0];
        let mut prev = f64::INFINITY;
        for r in samples {
            let mut x = vec![0.0; self.n as usize];
            x[0] = c + r;
            let weight = r.powf(exponent);
            let g = self.grad(&x);
            let level = weight
                * self
                    .eval(&x)
                    .abs()
                    .max(g.iter().fold(0.0f64, |a, b| a.max(b.abs())))
                    .max(self.hess_trace(&x).abs());
            if level > prev {
                return Err(Error::InvalidInput(format!(
                    "profile violates the decay hypothesis: |x|^{exponent}*|beta| grows from {prev:.3e} to {level:.3e} at |x-c| = {r}"
                )));
            }
            prev = level;
        }
        if prev >= 1e-6 {
            return Err(Error::InvalidInput(format!(
                "profile violates the decay hypothesis: |x|^{exponent}*|beta| = {prev:.3e} >= 1e-6 at |x-c| = 40"
            )));
        }
        Ok(())
    }
}

fn radius_sq(x: &[f64], center: f64) -> f64 {
    let mut r2 = 0.0;
    for (i, xi) in x.iter().enumerate() {
        let sh = if i == 0 { xi - center } else { *xi };
        r2 += sh * sh;
    }
    r2
}
