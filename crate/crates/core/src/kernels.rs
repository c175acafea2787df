//! Integral kernels of the free longitudinal resolvent and its split into
//! singular, regularized and projected parts.
//!
//! With `w = √(μ₀² - λ)` (branch Re ≥ 0) the resolvent kernel of the
//! constant-coupling operator decomposes along the transversal basis as
//! `Σ_j ψ_j(u) R_{μ_j²-λ}(x,x') conj(φ_j(u'))`.  The lowest mode is split
//! into the rank-one singular part L (∝ 1/(2k) for the strip, ∝ -1/(2πk)
//! for the layer) plus the regular remainder N; the higher modes form the
//! projected resolvent R⊥ whose tail is controlled explicitly.

use crate::special::{
    bessel_k_complex, cexpm1, k0_plus_ln_complex, sqrt_minus_with_positive_re,
};
use crate::transverse::{eval_psi, TransversalMode};
use crate::{C64, Error, Result};

/// The spectral variable k and the energy λ it encodes.
///
/// * strip (n = 1): `k = √(μ₀² - λ)`, physical (bound-state) side Re k > 0;
/// * layer (n = 2): `k = (ln √(μ₀² - λ))⁻¹`, physical side Re k < 0.
///
/// The threshold distance `gap = μ₀² - λ` is stored explicitly: for the
/// layer it is `e^{2/k}`, far below the resolution of λ itself for the
/// physically interesting k, and every kernel is evaluated from the gap.
#[derive(Debug, Clone, Copy)]
pub struct SpectralVariable {
    pub k: C64,
    pub lambda: C64,
    /// μ₀² - λ at full precision.
    pub gap: C64,
    pub mu0_sq: f64,
    pub n: u8,
}

impl SpectralVariable {
    pub fn from_lambda(lambda: C64, mu0_sq: f64, n: u8) -> Result<Self> {
        let gap = C64::new(mu0_sq, 0.0) - lambda;
        let w = sqrt_minus_with_positive_re(-gap); // √(μ₀²-λ), Re ≥ 0
        let k = match n {
            1 => w,
            2 => {
                let lw = w.ln();
                if lw.norm() == 0.0 || !lw.is_finite() {
                    return Err(Error::DomainError(format!(
                        "lambda = {lambda} maps to an unrepresentable layer variable k"
                    )));
                }
                C64::new(1.0, 0.0) / lw
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "spectral variable defined for n = 1, 2; got {n}"
                )))
            }
        };
        Ok(Self { k, lambda, gap, mu0_sq, n })
    }

    pub fn from_k(k: C64, mu0_sq: f64, n: u8) -> Result<Self> {
        let gap = match n {
            1 => k * k,
            2 => {
                if k.norm() == 0.0 {
                    return Err(Error::ThresholdSingularity);
                }
                (C64::new(2.0, 0.0) / k).exp()
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "spectral variable defined for n = 1, 2; got {n}"
                )))
            }
        };
        let lambda = C64::new(mu0_sq, 0.0) - gap;
        Ok(Self { k, lambda, gap, mu0_sq, n })
    }

    /// `√(μ₀² - λ) = √gap` on the decaying branch (Re ≥ 0).  For the layer
    /// this is `e^{1/k}` evaluated directly from k, exact even when the gap
    /// underflows relative to λ.
    pub fn w0(&self) -> C64 {
        match self.n {
            2 => (C64::new(1.0, 0.0) / self.k).exp(),
            _ => {
                let w = self.gap.sqrt();
                if w.re < 0.0 {
                    -w
                } else {
                    w
                }
            }
        }
    }

    /// `√(μ_j² - λ)` for a higher mode, branch Re ≥ 0.
    pub fn kappa(&self, mu_sq: f64) -> C64 {
        sqrt_minus_with_positive_re(self.lambda - mu_sq)
    }
}

/// Integral kernel of `(-Δ' - z)⁻¹` on ℝⁿ at separation `r = |x - x'|`,
/// branch `Re √-z > 0`.
pub fn free_resolvent_kernel(n: u8, z: C64, r: f64) -> Result<C64> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::OnCutError { re: z.re, im: z.im });
    }
    if r < 0.0 {
        return Err(Error::InvalidInput(format!("separation r must be >= 0, got {r}")));
    }
    let w = sqrt_minus_with_positive_re(z);
    match n {
        1 => Ok((-w * r).exp() / (w * 2.0)),
        2 => {
            if r == 0.0 {
                return Err(Error::SingularPoint { n });
            }
            Ok(bessel_k_complex(0, w * r)? / (2.0 * std::f64::consts::PI))
        }
        3 => {
            if r == 0.0 {
                return Err(Error::SingularPoint { n });
            }
            Ok((-w * r).exp() / (4.0 * std::f64::consts::PI * r))
        }
        _ => Err(Error::InvalidInput(format!(
            "free resolvent implemented for n = 1, 2, 3; got {n}"
        ))),
    }
}

/// Rank-one singular kernel `L_λ(u, u')`: the part of the lowest-mode
/// resolvent that blows up as k → 0.
pub fn singular_kernel_l(
    sv: &SpectralVariable,
    alpha0: f64,
    modes: &[TransversalMode],
    u: f64,
    u_prime: f64,
) -> Result<C64> {
    if sv.k.norm() < 1e-300 {
        return Err(Error::ThresholdSingularity);
    }
    let m0 = &modes[0];
    let psi0 = eval_psi(m0, alpha0, u);
    let phi0_bar = m0.a_norm * eval_psi(m0, alpha0, u_prime); // conj(φ₀(u'))
    match sv.n {
        1 => Ok(psi0 * phi0_bar / (sv.k * 2.0)),
        2 => Ok(-psi0 * phi0_bar / (sv.k * 2.0 * std::f64::consts::PI)),
        n => Err(Error::InvalidInput(format!("singular kernel needs n = 1|2, got {n}"))),
    }
}

/// Regularized lowest-mode kernel `N_λ(x, u, x', u')`, finite through k = 0.
pub fn regular_kernel_n(
    sv: &SpectralVariable,
    alpha0: f64,
    modes: &[TransversalMode],
    x: f64,
    x_prime: f64,
    u: f64,
    u_prime: f64,
) -> Result<C64> {
    let m0 = &modes[0];
    let psi0 = eval_psi(m0, alpha0, u);
    let phi0_bar = m0.a_norm * eval_psi(m0, alpha0, u_prime);
    let r = (x - x_prime).abs();
    match sv.n {
        1 => {
            let k = sv.k;
            let scalar = if k.norm() < 1e-14 {
                C64::new(-r * 0.5, 0.0)
            } else {
                cexpm1(-k * r) / (k * 2.0)
            };
            Ok(psi0 * phi0_bar * scalar)
        }
        2 => {
            if r == 0.0 {
                return Err(Error::SingularPoint { n: 2 });
            }
            let w0 = sv.w0();
            // K₀(w₀ r) + ln w₀ = [K₀(w₀ r) + ln(w₀ r)] - ln r, stable at w₀ -> 0
            let scalar =
                (k0_plus_ln_complex(w0 * r)? - r.ln()) / (2.0 * std::f64::consts::PI);
            Ok(psi0 * phi0_bar * scalar)
        }
        n => Err(Error::InvalidInput(format!("regular kernel needs n = 1|2, got {n}"))),
    }
}

/// Partial mode sum of the projected resolvent plus a rigorous tail bound.
#[derive(Debug, Clone, Copy)]
pub struct KernelEval {
    pub value: C64,
    /// Majorant of the dropped tail; infinite when no bound is available
    /// (coincident longitudinal points for the strip).
    pub tail_bound: f64,
}

/// Projected resolvent kernel `R⊥(x, u, x', u'; λ)`: modes above the lowest,
/// summed through index `j_trunc` of the sorted mode list.
///
/// `modes` must contain at least `j_trunc + 1` entries.  Requires
/// `Re λ < μ²_{J+1}` so the dropped modes decay.
pub fn projected_resolvent_kernel(
    sv: &SpectralVariable,
    alpha0: f64,
    d: f64,
    modes: &[TransversalMode],
    x: f64,
    x_prime: f64,
    u: f64,
    u_prime: f64,
    j_trunc: usize,
) -> Result<KernelEval> {
    if j_trunc < 1 || modes.len() <= j_trunc {
        return Err(Error::InvalidInput(format!(
            "projected kernel needs 1 <= j_trunc < modes.len(), got {j_trunc} with {} modes",
            modes.len()
        )));
    }
    let r = (x - x_prime).abs();
    let mut value = C64::new(0.0, 0.0);
    for m in &modes[1..=j_trunc] {
        let kappa = sqrt_minus_with_positive_re(sv.lambda - m.mu_sq);
        let psi = eval_psi(m, alpha0, u);
        let phi_bar = m.a_norm * eval_psi(m, alpha0, u_prime);
        let scalar = match sv.n {
            1 => (-kappa * r).exp() / (kappa * 2.0),
            2 => {
                if r == 0.0 {
                    return Err(Error::SingularPoint { n: 2 });
                }
                bessel_k_complex(0, kappa * r)? / (2.0 * std::f64::consts::PI)
            }
            n => {
                return Err(Error::InvalidInput(format!(
                    "projected kernel needs n = 1|2, got {n}"
                )))
            }
        };
        value += psi * phi_bar * scalar;
    }
    let tail_bound = projected_tail_bound(sv, alpha0, d, modes, r, j_trunc)?;
    Ok(KernelEval { value, tail_bound })
}

/// Rigorous majorant of `Σ_{j > J} |ψ_j| |R_j| |φ_j|`.
///
/// Uses `|ψ_j| ≤ √(1 + (α₀/μ_j)²)`, `|A_j| ≤ 2μ²/((μ²-α₀²)d)` (decreasing in
/// μ past the threshold), `Re √(μ² - λ) ≥ √(μ² - Re λ) ≥ γ μ` with
/// `γ = √(1 - Re λ / μ²_{J+1})`, and a geometric sum over the ladder
/// spacing π/d.  The strip kernel at r = 0 admits no such bound; the tail
/// is reported as infinite there.
fn projected_tail_bound(
    sv: &SpectralVariable,
    alpha0: f64,
    d: f64,
    modes: &[TransversalMode],
    r: f64,
    j_trunc: usize,
) -> Result<f64> {
    // smallest cosine-ladder μ beyond the truncation
    let mu_next = modes[j_trunc].mu.abs().max(std::f64::consts::PI / d)
        + std::f64::consts::PI / d * 0.999;
    let re_lambda = sv.lambda.re;
    if mu_next * mu_next <= re_lambda {
        return Err(Error::TailBoundFailure {
            tol: f64::NAN,
            j_max: j_trunc,
        });
    }
    let c_psi = (1.0 + (alpha0 / mu_next) * (alpha0 / mu_next)).sqrt();
    let c_phi = c_psi * 2.0 * mu_next * mu_next
        / ((mu_next * mu_next - alpha0 * alpha0) * d);
    let s_next = (mu_next * mu_next - re_lambda).sqrt();
    let gamma = if re_lambda <= 0.0 {
        1.0
    } else {
        (1.0 - re_lambda / (mu_next * mu_next)).sqrt()
    };
    let step = std::f64::consts::PI / d;
    if r == 0.0 {
        return Ok(match sv.n {
            1 => f64::INFINITY,
            _ => f64::INFINITY,
        });
    }
    let q = (-gamma * step * r).exp();
    let geometric = (-gamma * mu_next * r).exp() / (1.0 - q);
    Ok(match sv.n {
        1 => c_psi * c_phi / (2.0 * s_next) * geometric,
        2 => {
            // |K₀(w)| ≤ K₀(Re w) ≤ √(π/(2 Re w)) e^{-Re w}
            c_psi * c_phi / (2.0 * std::f64::consts::PI)
                * (std::f64::consts::PI / (2.0 * s_next * r)).sqrt()
                * geometric
        }
        _ => f64::INFINITY,
    })
}

/// Adaptive truncation: doubles J until `tail_bound < tol · |value|`,
/// starting from `j_start`, hard cap 10⁴.
#[allow(clippy::too_many_arguments)]
pub fn projected_resolvent_auto(
    sv: &SpectralVariable,
    alpha0: f64,
    d: f64,
    x: f64,
    x_prime: f64,
    u: f64,
    u_prime: f64,
    tol: f64,
) -> Result<KernelEval> {
    let mut j = 8usize;
    loop {
        let modes = crate::transverse::transversal_eigenvalues(alpha0, d, j + 1)?;
        let eval = projected_resolvent_kernel(sv, alpha0, d, &modes, x, x_prime, u, u_prime, j)?;
        if eval.tail_bound <= tol * eval.value.norm().max(1e-300) {
            return Ok(eval);
        }
        if j >= 10_000 {
            return Err(Error::TailBoundFailure { tol, j_max: j });
        }
        j *= 2;
    }
}

/// Schur–Holmgren bound of an integral operator from kernel samples:
/// `(sup_x ∫|K(x,y)|dy · sup_y ∫|K(x,y)|dx)^{1/2}` by quadrature.
pub fn schur_holmgren_norm(
    kernel: &crate::linalg::CMat,
    weights_x: &[f64],
    weights_y: &[f64],
) -> f64 {
    assert_eq!(kernel.nrows(), weights_x.len());
    assert_eq!(kernel.ncols(), weights_y.len());
    let mut sup_row = 0.0f64;
    for i in 0..kernel.nrows() {
        let mut acc = 0.0;
        for j in 0..kernel.ncols() {
            acc += kernel[(i, j)].norm() * weights_y[j];
        }
        sup_row = sup_row.max(acc);
    }
    let mut sup_col = 0.0f64;
    for j in 0..kernel.ncols() {
        let mut acc = 0.0;
        for i in 0..kernel.nrows() {
            acc += kernel[(i, j)].norm() * weights_x[i];
        }
        sup_col = sup_col.max(acc);
    }
    (sup_row * sup_col).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use crate::special::bessel_k;
    use crate::transverse::transversal_eigenvalues;
    use std::f64::consts::PI;

    #[test]
    fn spectral_variable_round_trip() {
        // λ -> k -> λ at 1e-12 relative, in the regime where the gap is
        // representable next to μ₀²
        for (n, k) in [
            (1u8, C64::new(0.3, 0.0)),
            (1, C64::new(0.05, 0.02)),
            (2, C64::new(-0.2, 0.0)),
            (2, C64::new(-0.35, 0.01)),
        ] {
            let sv = SpectralVariable::from_k(k, 0.25, n).unwrap();
            let back = SpectralVariable::from_lambda(sv.lambda, 0.25, n).unwrap();
            assert!(
                (back.k - k).norm() < 1e-12 * k.norm(),
                "n={n} k={k}: {:?}",
                back.k
            );
            assert!((back.lambda - sv.lambda).norm() <= 1e-12 * sv.lambda.norm());
        }
        // the layer gap below machine resolution of λ survives in `gap`
        let sv = SpectralVariable::from_k(C64::new(-0.02, 0.0), 0.25, 2).unwrap();
        assert!(sv.lambda.re == 0.25); // e^{-100} is sub-ulp next to 0.25
        assert!((sv.gap.re.ln() + 100.0).abs() < 1e-9);
        assert!((sv.w0() - C64::new((-50.0f64).exp(), 0.0)).norm() < 1e-60);
    }

    #[test]
    fn free_kernel_values() {
        // n=1, z=-1: r=0 -> 1/2; r=1 -> e^{-1}/2
        let v = free_resolvent_kernel(1, C64::new(-1.0, 0.0), 0.0).unwrap();
        assert!((v - C64::new(0.5, 0.0)).norm() < 1e-15);
        let v = free_resolvent_kernel(1, C64::new(-1.0, 0.0), 1.0).unwrap();
        assert!((v - C64::new((-1.0f64).exp() / 2.0, 0.0)).norm() < 1e-15);
        // n=2, z=-1, r=1 -> K0(1)/(2π)
        let v = free_resolvent_kernel(2, C64::new(-1.0, 0.0), 1.0).unwrap();
        let expect = bessel_k(0, 1.0).unwrap() / (2.0 * PI);
        assert!((v - C64::new(expect, 0.0)).norm() < 1e-14);
        assert!((v.re - 0.0670086).abs() < 1e-6);
        // n=3
        let v = free_resolvent_kernel(3, C64::new(-4.0, 0.0), 0.5).unwrap();
        assert!((v - C64::new((-1.0f64).exp() / (2.0 * PI), 0.0)).norm() < 1e-12);
        // cut and singular points
        assert!(matches!(
            free_resolvent_kernel(1, C64::new(1.0, 0.0), 1.0),
            Err(Error::OnCutError { .. })
        ));
        assert!(matches!(
            free_resolvent_kernel(2, C64::new(-1.0, 0.0), 0.0),
            Err(Error::SingularPoint { n: 2 })
        ));
    }

    #[test]
    fn branch_and_conjugate_symmetry() {
        // R_conj(z)(r) = conj(R_z(r)) and Re √-z > 0, on a z-sample off the cut
        for (re, im) in [(-1.0, 0.3), (0.5, 1.0), (-2.0, -0.7), (3.0, -0.01)] {
            let z = C64::new(re, im);
            for n in [1u8, 2, 3] {
                let r = 0.7;
                let a = free_resolvent_kernel(n, z, r).unwrap();
                let b = free_resolvent_kernel(n, z.conj(), r).unwrap();
                assert!((a.conj() - b).norm() < 1e-12 * a.norm(), "n={n} z={z}");
            }
            let w = sqrt_minus_with_positive_re(z);
            assert!(w.re > 0.0);
            assert!((w * w + z).norm() < 1e-12 * z.norm());
        }
    }

    #[test]
    fn singular_kernel_values_and_scaling() {
        let modes = transversal_eigenvalues(0.5, PI, 4).unwrap();
        let a0 = modes[0].a_norm;
        // n=1, u=u'=0, k=1: conj(φ₀(0))/2 = A₀/2
        let sv = SpectralVariable::from_k(C64::new(1.0, 0.0), 0.25, 1).unwrap();
        let v = singular_kernel_l(&sv, 0.5, &modes, 0.0, 0.0).unwrap();
        assert!((v - a0 * 0.5).norm() < 1e-14);
        // exact 1/k scaling
        let sv2 = SpectralVariable::from_k(C64::new(0.25, 0.0), 0.25, 1).unwrap();
        let v2 = singular_kernel_l(&sv2, 0.5, &modes, 0.3, 0.9).unwrap();
        let v1 = singular_kernel_l(&sv, 0.5, &modes, 0.3, 0.9).unwrap();
        assert!((v2 - v1 * 4.0).norm() < 1e-13 * v2.norm());
        // n=2, k=-0.1: (10/2π) conj(φ₀(0))
        let sv = SpectralVariable::from_k(C64::new(-0.1, 0.0), 0.25, 2).unwrap();
        let v = singular_kernel_l(&sv, 0.5, &modes, 0.0, 0.0).unwrap();
        assert!((v - a0 * (10.0 / (2.0 * PI))).norm() < 1e-12 * v.norm());
        // threshold singularity
        let sv0 = SpectralVariable::from_lambda(C64::new(0.25, 0.0), 0.25, 1).unwrap();
        assert!(matches!(
            singular_kernel_l(&sv0, 0.5, &modes, 0.0, 0.0),
            Err(Error::ThresholdSingularity)
        ));
    }

    #[test]
    fn regular_kernel_values_and_bound() {
        let modes = transversal_eigenvalues(0.5, PI, 4).unwrap();
        let sv = SpectralVariable::from_k(C64::new(1.0, 0.0), 0.25, 1).unwrap();
        // x = x' -> 0 exactly
        let v = regular_kernel_n(&sv, 0.5, &modes, 0.3, 0.3, 0.1, 0.2).unwrap();
        assert!(v.norm() == 0.0);
        // k = 1, |x-x'| = 1: (e^{-1}-1)/2 times the mode factor
        let v = regular_kernel_n(&sv, 0.5, &modes, 1.0, 0.0, 0.0, 0.0).unwrap();
        let mode_factor = modes[0].a_norm; // ψ₀(0) conj(φ₀(0)) = A₀
        let scalar = ((-1.0f64).exp() - 1.0) / 2.0;
        assert!((v - mode_factor * scalar).norm() < 1e-14);
        assert!((scalar + 0.3160603).abs() < 1e-7);
        // bound |value| <= (r/2)|ψ₀||φ₀| scanning Re k >= 0
        let mut state = 7u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let k = C64::new(3.0 * rnd(), 4.0 * (rnd() - 0.5));
            let sv = SpectralVariable::from_k(k, 0.25, 1).unwrap();
            let (x, xp, u, up) = (4.0 * rnd(), 4.0 * rnd(), PI * rnd(), PI * rnd());
            let v = regular_kernel_n(&sv, 0.5, &modes, x, xp, u, up).unwrap();
            let m0 = &modes[0];
            let cap = 0.5
                * (x - xp).abs()
                * eval_psi(m0, 0.5, u).norm()
                * (m0.a_norm * eval_psi(m0, 0.5, up)).norm();
            assert!(v.norm() <= cap * (1.0 + 1e-12), "{} vs {cap}", v.norm());
        }
        // k -> 0 limit equals -r/2 times mode factor
        let sv0 = SpectralVariable::from_k(C64::new(1e-16, 0.0), 0.25, 1).unwrap();
        let v = regular_kernel_n(&sv0, 0.5, &modes, 2.0, 0.5, 0.0, 0.0).unwrap();
        assert!((v - modes[0].a_norm * C64::new(-0.75, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn regular_kernel_layer_threshold_limit() {
        let modes = transversal_eigenvalues(0.5, PI, 4).unwrap();
        // k -> 0⁻ for the layer: -(1/2π)(ln r + γ - ln 2) ψ₀ conj(φ₀)
        let sv = SpectralVariable::from_k(C64::new(-1e-9, 0.0), 0.25, 2).unwrap();
        let r: f64 = 0.8;
        let v = regular_kernel_n(&sv, 0.5, &modes, r, 0.0, 0.2, 0.4).unwrap();
        let m0 = &modes[0];
        let mode_factor = eval_psi(m0, 0.5, 0.2) * (m0.a_norm * eval_psi(m0, 0.5, 0.4));
        let expect = mode_factor
            * ((2.0f64.ln() - crate::special::EULER_GAMMA - r.ln()) / (2.0 * PI));
        assert!((v - expect).norm() < 1e-8 * expect.norm(), "{v} vs {expect}");
    }

    #[test]
    fn projected_kernel_monotone_at_coincidence() {
        // x = x', λ real < μ₁²: scalar parts positive and decreasing in j,
        // partial sums monotone; tail bound infinite at r = 0
        let modes = transversal_eigenvalues(0.5, PI, 40).unwrap();
        let sv = SpectralVariable::from_lambda(C64::new(0.1, 0.0), 0.25, 1).unwrap();
        let mut prev = 0.0;
        for j in [2usize, 4, 8, 16] {
            let scalar: f64 = modes[1..=j]
                .iter()
                .map(|m| 1.0 / (2.0 * (m.mu_sq - 0.1).sqrt()))
                .sum();
            assert!(scalar > prev);
            prev = scalar;
            let eval = projected_resolvent_kernel(
                &sv, 0.5, PI, &modes, 0.0, 0.0, 0.1, 0.1, j,
            )
            .unwrap();
            assert!(eval.tail_bound.is_infinite());
        }
    }

    #[test]
    fn tail_bound_halves_and_brute_force() {
        let modes = transversal_eigenvalues(0.5, PI, 4100).unwrap();
        let sv = SpectralVariable::from_lambda(C64::new(-0.5, 0.0), 0.25, 1).unwrap();
        let (x, xp, u, up) = (1.5, 0.3, 0.4, 2.0);
        // r > 1: doubling J at least halves the bound
        for j in [4usize, 8, 16] {
            let e1 = projected_resolvent_kernel(&sv, 0.5, PI, &modes, x, xp, u, up, j).unwrap();
            let e2 =
                projected_resolvent_kernel(&sv, 0.5, PI, &modes, x, xp, u, up, 2 * j).unwrap();
            assert!(e2.tail_bound <= e1.tail_bound / 2.0);
            // brute-force check: |sum_to_4000 - sum_to_J| <= tail_bound(J)
            let full =
                projected_resolvent_kernel(&sv, 0.5, PI, &modes, x, xp, u, up, 4000).unwrap();
            assert!(
                (full.value - e1.value).norm() <= e1.tail_bound * (1.0 + 1e-10),
                "J={j}: dropped {} vs bound {}",
                (full.value - e1.value).norm(),
                e1.tail_bound
            );
        }
    }

    #[test]
    fn projected_kernel_finite_at_threshold() {
        // λ = μ₀² (k = 0) keeps the j >= 1 sum finite
        let modes = transversal_eigenvalues(0.5, PI, 20).unwrap();
        let sv = SpectralVariable::from_lambda(C64::new(0.25, 0.0), 0.25, 1).unwrap();
        let eval =
            projected_resolvent_kernel(&sv, 0.5, PI, &modes, 1.0, 0.0, 0.3, 0.7, 12).unwrap();
        assert!(eval.value.norm().is_finite());
        assert!(eval.tail_bound.is_finite());
    }

    #[test]
    fn mode_sum_consistency() {
        // L + N + R⊥ reproduces the free mode-sum resolvent kernel
        for n in [1u8, 2] {
            let modes = transversal_eigenvalues(0.5, PI, 80).unwrap();
            let lambda = C64::new(-0.4, if n == 1 { 0.2 } else { 0.0 });
            let sv = SpectralVariable::from_lambda(lambda, 0.25, n).unwrap();
            let (x, xp, u, up) = (0.9, 0.1, 0.3, 1.1);
            let j = 60;
            let l = singular_kernel_l(&sv, 0.5, &modes, u, up).unwrap();
            let nn = regular_kernel_n(&sv, 0.5, &modes, x, xp, u, up).unwrap();
            let perp =
                projected_resolvent_kernel(&sv, 0.5, PI, &modes, x, xp, u, up, j).unwrap();
            let split = l + nn + perp.value;
            let mut direct = C64::new(0.0, 0.0);
            for m in &modes[..=j] {
                let rz = free_resolvent_kernel(n, lambda - m.mu_sq, (x - xp).abs()).unwrap();
                direct += eval_psi(m, 0.5, u) * rz * (m.a_norm * eval_psi(m, 0.5, up));
            }
            assert!(
                (split - direct).norm() < 1e-10 + perp.tail_bound,
                "n={n}: {split} vs {direct}"
            );
        }
    }

    #[test]
    fn schur_holmgren_examples() {
        // kernel e^{-|x-y|} on a large truncation: row integrals -> 2
        let l = 40.0;
        let n = 801;
        let h = 2.0 * l / (n - 1) as f64;
        let mut kern = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (-l + i as f64 * h, -l + j as f64 * h);
                kern[(i, j)] = C64::new((-(x - y).abs()).exp(), 0.0);
            }
        }
        let w = vec![h; n];
        let bound = schur_holmgren_norm(&kern, &w, &w);
        assert!((bound - 2.0).abs() < 1e-2, "{bound}");
        // symmetric kernel: the two sup-integrals coincide by inspection of
        // the formula; just confirm the bound dominates the largest singular
        // value of the weighted operator (power iteration on K^H K)
        let mut apply = |v: &[C64]| {
            // (W^{1/2} K W^{1/2}) applied twice with adjoint
            let n = v.len();
            let mut kv = vec![C64::new(0.0, 0.0); n];
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    acc += kern[(i, j)] * v[j] * h;
                }
                kv[i] = acc;
            }
            let mut out = vec![C64::new(0.0, 0.0); n];
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    acc += kern[(j, i)].conj() * kv[j] * h;
                }
                out[i] = acc;
            }
            out
        };
        let (s2, _, _) = crate::linalg::power_iteration(&mut apply, n, 60, 1e-10);
        let sigma_max = s2.norm().sqrt();
        assert!(sigma_max <= bound * (1.0 + 1e-8), "{sigma_max} vs {bound}");
    }
}
