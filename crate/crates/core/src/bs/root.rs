//! The reduced implicit equation `k = G(k, ε)` and its root.
//!
//! With the rank-one singular part split off, λ is an eigenvalue exactly
//! when `k = G(k, ε)` where (strip)
//! `G = -(ε/2) ∫_Ω ψ₀ (C_ε*(I + M)⁻¹ D conj(φ₀))`, and the layer variant
//! carries `+ε/(2π)` instead.  Pushing the component operators through the
//! scalar reduction turns this into: solve `(I + ε(N+R⊥)Z_ε) h = φ̄₀`, then
//! pair `Z_ε h` with ψ₀.  Leading order: `G = -ε α₀⟨β⟩ + O(ε²)` (strip),
//! `G = (ε/π) α₀⟨β⟩ + O(ε²)` (layer).

use super::assemble::{build_workspace, BsDiscretization, BsParts};
use super::{BoundStateOutcome, Method, SpectralResult};
use crate::config::WaveguideConfig;
use crate::kernels::SpectralVariable;
use crate::linalg::{power_iteration, LuFactors};
use crate::{C64, Error, Result};

/// Closed-form leading-order eigenvalue prediction.
///
/// Strip: `μ₀² - ε² α₀² ⟨β⟩²`.  Layer: `μ₀² - e^{2/w}` with
/// `w = (ε/π) α₀ ⟨β⟩`; the gap underflows next to μ₀² for any interesting
/// ε, which is why the layer is validated through the k-equation instead.
pub fn asymptotic_lambda(epsilon: f64, config: &WaveguideConfig) -> f64 {
    let mu0_sq = config.threshold();
    match config.n {
        1 => mu0_sq - (epsilon * config.coupling_sign()).powi(2),
        _ => {
            let w = epsilon / std::f64::consts::PI * config.coupling_sign();
            if w >= 0.0 {
                // only the attractive side produces an eigenvalue; at w = 0
                // the gap closes
                mu0_sq
            } else {
                mu0_sq - (2.0 / w).exp()
            }
        }
    }
}

/// Leading-order root of the implicit equation (the Newton seed).
pub fn k_seed(epsilon: f64, config: &WaveguideConfig) -> C64 {
    let a0b = config.coupling_sign();
    match config.n {
        1 => C64::new(-epsilon * a0b, 0.0),
        _ => C64::new(epsilon / std::f64::consts::PI * a0b, 0.0),
    }
}

/// Spectral-radius estimate of the regular part `M_ε^λ` at the given k,
/// through its scalar reduction (identical nonzero spectrum).
pub fn m_norm_estimate(
    k: C64,
    epsilon: f64,
    config: &WaveguideConfig,
    disc: &BsDiscretization,
) -> Result<f64> {
    let mut cfg = config.clone();
    cfg.epsilon = epsilon;
    let sv = SpectralVariable::from_k(k, cfg.threshold(), cfg.n)?;
    let ws = build_workspace(&sv, &cfg, disc, BsParts::MOnly)?;
    let s0 = ws.scalar_matrix();
    let mut apply = |x: &[C64]| s0.matvec(x);
    let (eig, _, _) = power_iteration(&mut apply, s0.nrows(), 60, 1e-8);
    Ok(eig.norm())
}

/// Value of `G(k, ε)` by the dense solve of `(I + M) h = φ̄₀` in the scalar
/// reduction.
pub fn g_function(
    k: C64,
    epsilon: f64,
    config: &WaveguideConfig,
    disc: &BsDiscretization,
) -> Result<C64> {
    let mut cfg = config.clone();
    cfg.epsilon = epsilon;
    let sv = SpectralVariable::from_k(k, cfg.threshold(), cfg.n)?;
    let ws = build_workspace(&sv, &cfg, disc, BsParts::MOnly)?;
    let s0 = ws.scalar_matrix();
    let rhs = ws.rhs_from_phi0();
    // (I + S0) v = rhs
    let n = s0.nrows();
    let mut a = s0;
    for i in 0..n {
        a[(i, i)] += C64::new(1.0, 0.0);
    }
    let lu = LuFactors::factor(&a)?;
    let v = lu.solve(&rhs);
    let h = ws.phi0_minus(&v);
    let pairing = ws.pair_with_psi0(&h);
    Ok(match config.n {
        1 => -pairing * (epsilon / 2.0),
        _ => pairing * epsilon, // (ε/2π) × the angular factor 2π
    })
}

/// Weak-coupling bound state by secant iteration on `F(k) = k - G(k, ε)`.
///
/// PT symmetry makes the exact G real along the physical axis and the root
/// real; the iteration therefore runs over real k against `Re G`, which
/// converges to the solver tolerance.  The discretization leaves an O(h³)
/// imaginary remnant in G; it is monitored as a PT-consistency diagnostic
/// and the solve is rejected if it is not far below |k|.
///
/// Requires `|α₀| < π/d` and a decisive sign of `α₀⟨β⟩`: the attractive
/// sign produces the unique root near the seed `-ε α₀⟨β⟩` (strip) or
/// `(ε/π) α₀⟨β⟩` (layer); the repulsive sign returns
/// [`BoundStateOutcome::NoEigenvalue`].
pub fn solve_weak_coupling(
    config: &WaveguideConfig,
    disc: &BsDiscretization,
    newton_tol: f64,
) -> Result<BoundStateOutcome> {
    config.require_subcritical()?;
    if config.epsilon == 0.0 {
        // constant coupling: the point spectrum is empty
        return Ok(BoundStateOutcome::NoEigenvalue);
    }
    let a0b = config.coupling_sign();
    if a0b.abs() < 1e-8 {
        return Err(Error::BorderlineCase {
            value: a0b.abs(),
            tol: 1e-8,
        });
    }
    if a0b > 0.0 {
        return Ok(BoundStateOutcome::NoEigenvalue);
    }
    let epsilon = config.epsilon;
    let k0 = k_seed(epsilon, config).re;
    // adaptive smallness check of the regular part
    let m_norm = m_norm_estimate(C64::new(k0, 0.0), epsilon, config, disc)?;
    if m_norm >= 0.5 {
        return Err(Error::NeumannSeriesDivergence {
            norm_estimate: m_norm,
            k_re: k0,
            k_im: 0.0,
            limit: 0.5,
        });
    }
    let tol = if newton_tol > 0.0 { newton_tol } else { 1e-12 };
    let mut worst_im: f64 = 0.0;
    let mut eval = |k: f64| -> Result<f64> {
        let g = g_function(C64::new(k, 0.0), epsilon, config, disc)?;
        worst_im = worst_im.max(g.im.abs());
        Ok(k - g.re)
    };
    let in_physical = |k: f64| -> bool {
        match config.n {
            1 => k > 0.0,
            _ => k < 0.0,
        }
    };
    let mut k_prev = k0 * 1.05;
    let mut k_cur = k0;
    let mut f_prev = eval(k_prev)?;
    let mut f_cur = eval(k_cur)?;
    let mut iterations = 0usize;
    let scale = k0.abs();
    while f_cur.abs() > tol && iterations < 50 {
        iterations += 1;
        let denom = f_cur - f_prev;
        let k_next = if denom.abs() > 1e-300 {
            k_cur - f_cur * (k_cur - k_prev) / denom
        } else {
            // fallback: damped fixed point k <- (k + G)/2
            0.5 * (k_cur + (k_cur - f_cur))
        };
        if (k_next - k0).abs() > 5.0 * scale || !in_physical(k_next) {
            return Err(Error::NoRoot(format!(
                "iteration left the physical half-axis: k = {k_next} from seed {k0}"
            )));
        }
        k_prev = k_cur;
        f_prev = f_cur;
        k_cur = k_next;
        f_cur = eval(k_cur)?;
    }
    if f_cur.abs() > tol {
        return Err(Error::NoRoot(format!(
            "no convergence after {iterations} iterations, |F| = {}",
            f_cur.abs()
        )));
    }
    // the layer's panel quadrature carries a larger kink remnant than the
    // strip's product integration
    let pt_gate = if config.n == 1 { 1e-4 } else { 1e-3 };
    if worst_im > pt_gate * scale {
        return Err(Error::NoRoot(format!(
            "PT-consistency remnant Im G = {worst_im:.3e} too large next to |k| = {scale:.3e}; refine the discretization"
        )));
    }
    let k_root = C64::new(k_cur, 0.0);
    let sv = SpectralVariable::from_k(k_root, config.threshold(), config.n)?;
    Ok(BoundStateOutcome::Eigenvalue(SpectralResult {
        lambda: sv.lambda,
        k: k_root,
        epsilon,
        method: Method::BsRoot,
        residual: f_cur.abs(),
        iterations,
    }))
}

/// Winding number of `F(k) = k - G(k, ε)` along the circle
/// `|k - k₀| = radius`, counted from the accumulated argument over `steps`
/// samples.  Equals the number of roots inside for analytic F.
pub fn winding_number(
    k0: C64,
    radius: f64,
    steps: usize,
    epsilon: f64,
    config: &WaveguideConfig,
    disc: &BsDiscretization,
) -> Result<i64> {
    let mut total = 0.0f64;
    let mut prev_arg: Option<f64> = None;
    let mut first = 0.0;
    for s in 0..=steps {
        let theta = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
        let k = k0 + C64::new(radius * theta.cos(), radius * theta.sin());
        let fv = k - g_function(k, epsilon, config, disc)?;
        let arg = fv.im.atan2(fv.re);
        match prev_arg {
            None => first = arg,
            Some(pa) => {
                let mut d = arg - pa;
                while d > std::f64::consts::PI {
                    d -= 2.0 * std::f64::consts::PI;
                }
                while d < -std::f64::consts::PI {
                    d += 2.0 * std::f64::consts::PI;
                }
                total += d;
            }
        }
        prev_arg = Some(arg);
    }
    let _ = first;
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}
