//! Shift-invert Arnoldi windows and the bound-state search.

use super::assemble::{assemble_hamiltonian, DiscretizedHamiltonian};
use super::grid::EndBc;
use super::modesum::discrete_transverse_basis;
use crate::bs::{Method, SpectralResult};
use crate::config::WaveguideConfig;
use crate::kernels::SpectralVariable;
use crate::linalg::{arnoldi, dense_eigen, vec_norm, BandLu, CMat};
use crate::{C64, Error, Result};

/// One converged Ritz pair.
#[derive(Debug, Clone)]
pub struct EigPair {
    pub lambda: C64,
    pub vector: Vec<C64>,
    /// `‖(S - λ)v‖ / ‖v‖`.
    pub residual: f64,
}

/// `count` eigenpairs nearest `center` by shift-invert Arnoldi.
///
/// The shift is nudged and retried when the factorization lands on (or too
/// close to) an eigenvalue.
pub fn spectrum_window(
    h: &DiscretizedHamiltonian,
    center: C64,
    count: usize,
) -> Result<Vec<EigPair>> {
    let dim = h.grid.dim();
    if count == 0 || count >= dim {
        return Err(Error::InvalidInput(format!(
            "count must be in 1..{dim}, got {count}"
        )));
    }
    let scale = h.band.get(0, 0).norm().max(1.0);
    let mut shift = center;
    let mut lu = None;
    for attempt in 0..4 {
        let mut shifted = h.band.clone();
        for i in 0..dim {
            let v = shifted.get(i, i) - shift;
            shifted.set(i, i, v);
        }
        match BandLu::factor(&shifted) {
            Ok(f) if f.min_pivot() > 1e-13 * scale => {
                lu = Some(f);
                break;
            }
            _ => {
                // land off the eigenvalue and retry
                shift = center + C64::new(0.0, 1e-6 * scale * (attempt + 1) as f64);
            }
        }
    }
    let lu = lu.ok_or_else(|| {
        Error::ConvergenceFailure(format!(
            "shift-invert factorization failed near center {center} after retries"
        ))
    })?;

    let m = (3 * count + 25).min(dim - 1).max(8);
    let v0: Vec<C64> = (0..dim)
        .map(|i| {
            let t = (i as f64 * 0.6180339887498949).fract();
            C64::new(1.0 - t, 0.25 + 0.5 * t)
        })
        .collect();
    let mut apply = |x: &[C64]| lu.solve(x);
    let res = arnoldi(&mut apply, &v0, m);
    let steps = res.steps;
    let mut hm = CMat::zeros(steps, steps);
    for i in 0..steps {
        for j in 0..steps {
            hm[(i, j)] = res.hess[(i, j)];
        }
    }
    let ritz = dense_eigen(&hm)?;
    let mut pairs: Vec<EigPair> = Vec::new();
    for (theta, y) in ritz {
        if theta.norm() < 1e-13 {
            continue;
        }
        let lambda = shift + C64::new(1.0, 0.0) / theta;
        let mut v = vec![C64::new(0.0, 0.0); dim];
        for (j, yj) in y.iter().enumerate() {
            for (vi, bi) in v.iter_mut().zip(res.basis[j].iter()) {
                *vi += yj * bi;
            }
        }
        let nrm = vec_norm(&v);
        if nrm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= nrm;
        }
        let av = h.apply(&v);
        let mut r = 0.0;
        for (a, b) in av.iter().zip(&v) {
            r += (a - lambda * b).norm_sqr();
        }
        pairs.push(EigPair {
            lambda,
            vector: v,
            residual: r.sqrt(),
        });
    }
    if pairs.is_empty() {
        return Err(Error::ConvergenceFailure(
            "Arnoldi produced no finite Ritz values".into(),
        ));
    }
    pairs.sort_by(|a, b| {
        (a.lambda - center)
            .norm()
            .partial_cmp(&(b.lambda - center).norm())
            .unwrap()
    });
    pairs.truncate(count);
    Ok(pairs)
}

/// Grid parameters of the direct solver.
#[derive(Debug, Clone, Copy)]
pub struct DirectNumerics {
    /// Truncation half-length; 0 requests the automatic choice
    /// `max(12 σ, 5.5/k₀)` that keeps both the profile tail and the
    /// bound-state tail inside the box.
    pub l: f64,
    pub h_x: f64,
    pub h_u: f64,
    pub end_bc: EndBc,
    /// Ritz pairs per window.
    pub window_count: usize,
}

impl Default for DirectNumerics {
    fn default() -> Self {
        Self {
            l: 0.0,
            h_x: 0.1,
            h_u: 0.0,
            end_bc: EndBc::Dirichlet,
            window_count: 5,
        }
    }
}

impl DirectNumerics {
    /// Resolve automatic entries against a problem.
    pub fn resolved(&self, config: &WaveguideConfig) -> Self {
        let mut out = *self;
        let k0 = (config.epsilon * config.coupling_sign()).abs().max(1e-6);
        if out.l == 0.0 {
            out.l = (12.0 * config.beta.width()).max(5.5 / k0);
            // snap so h_x divides 2L
            let cells = (2.0 * out.l / out.h_x).ceil();
            out.l = 0.5 * cells * out.h_x;
        }
        if out.h_u == 0.0 {
            out.h_u = config.d / 64.0;
        }
        out
    }
}

/// Relative resolution floor of the computed gap: second-order stencil error
/// plus the Dirichlet-box truncation error of the bound-state tail.
fn relative_gap_floor(num: &DirectNumerics, k0: f64) -> f64 {
    let hbar = num.h_x.max(num.h_u);
    10.0 * hbar * hbar + 4.0 * (-2.0 * k0 * num.l).exp()
}

/// Search for the isolated eigenvalue below the discrete threshold.
///
/// Looks in the window `(μ₀,h² - 4 Δ_pred, μ₀,h² - δ_grid)` where
/// `Δ_pred = ε² α₀² ⟨β⟩²` and `δ_grid` is the grid trust floor; a candidate
/// must separate from the essential-band edge by more than `δ_grid`, have a
/// small residual, and be longitudinally localized (participation of |Ψ|²
/// inside |x - c| ≤ L/2 above 0.99).  Returns `Ok(None)` when no such
/// eigenvalue exists (the repulsive sign of the perturbation).
pub fn discrete_eigenvalue_below_threshold(
    config: &WaveguideConfig,
    numerics: &DirectNumerics,
) -> Result<Option<SpectralResult>> {
    config.require_subcritical()?;
    if config.n != 1 {
        // the layer gap e^{2/w} is below machine resolution for any grid
        return Err(Error::ResolutionLimit {
            predicted_gap: 0.0,
            delta_grid: f64::EPSILON * config.threshold(),
        });
    }
    let num = numerics.resolved(config);
    let a0b = config.coupling_sign();
    let gap_pred = (config.epsilon * a0b).powi(2);
    let k0 = (config.epsilon * a0b).abs();
    if config.epsilon == 0.0 || gap_pred == 0.0 {
        // constant coupling: the spectrum is purely essential
        return Ok(None);
    }
    let floor = relative_gap_floor(&num, k0);
    let delta_grid = (gap_pred * floor).max(1e3 * f64::EPSILON * config.threshold());
    if gap_pred < delta_grid || floor > 0.5 {
        return Err(Error::ResolutionLimit {
            predicted_gap: gap_pred,
            delta_grid: delta_grid.max(gap_pred * floor),
        });
    }
    let h = assemble_hamiltonian(config, num.l, num.h_x, num.h_u, num.end_bc)?;
    let basis = discrete_transverse_basis(h.grid.n_u(), h.grid.h_u, config.alpha0)?;
    let mu0_h = basis.threshold().re;
    let shift = C64::new(mu0_h - gap_pred, 0.0);
    let pairs = spectrum_window(&h, shift, num.window_count)?;
    let mut best: Option<&EigPair> = None;
    for p in &pairs {
        if p.lambda.re >= mu0_h - delta_grid {
            continue;
        }
        if p.lambda.re <= mu0_h - 4.0 * gap_pred {
            continue;
        }
        if p.residual > 1e-8 {
            continue;
        }
        // longitudinal localization: |Ψ|² participation inside |x-c| ≤ L/2
        let mut inside = 0.0;
        let mut total = 0.0;
        for (i, v) in p.vector.iter().enumerate() {
            let x = h.grid.x_of(i)[0];
            let w = v.norm_sqr();
            total += w;
            if (x - h.grid.center).abs() <= num.l / 2.0 {
                inside += w;
            }
        }
        if inside / total < 0.99 {
            continue;
        }
        match best {
            Some(b) if (b.lambda - shift).norm() <= (p.lambda - shift).norm() => {}
            _ => best = Some(p),
        }
    }
    match best {
        None => Ok(None),
        Some(p) => {
            let sv = SpectralVariable::from_lambda(p.lambda, config.threshold(), 1)?;
            Ok(Some(SpectralResult {
                lambda: p.lambda,
                k: sv.k,
                epsilon: config.epsilon,
                method: Method::Direct,
                residual: p.residual,
                iterations: 0,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::PerturbationProfile;
    use std::f64::consts::PI;

    fn demo(epsilon: f64, mean_sign: f64) -> WaveguideConfig {
        let beta =
            PerturbationProfile::gaussian(1, mean_sign / PI.sqrt(), 1.0, 0.0).unwrap();
        WaveguideConfig::new(1, PI, 0.5, epsilon, beta).unwrap()
    }

    #[test]
    fn neumann_window_near_zero_for_selfadjoint() {
        // α ≡ 0: the discretized operator is self-adjoint with spectrum
        // starting at 0 (Neumann strip)
        let beta = PerturbationProfile::gaussian(1, -1.0, 1.0, 0.0).unwrap();
        let cfg = WaveguideConfig::new(1, PI, 0.0, 0.0, beta).unwrap();
        let h = assemble_hamiltonian(&cfg, 6.0, 0.25, PI / 16.0, EndBc::Neumann).unwrap();
        let pairs = spectrum_window(&h, C64::new(-1e-3, 0.0), 4).unwrap();
        for p in &pairs {
            assert!(p.lambda.im.abs() < 1e-10);
            assert!(p.lambda.re > -1e-10);
            assert!(p.residual < 1e-9, "residual {}", p.residual);
        }
        // the lowest eigenvalue is the constant mode at ~0
        assert!(pairs[0].lambda.norm() < 1e-8, "{}", pairs[0].lambda);
    }

    #[test]
    fn constant_coupling_threshold_convergence() {
        // smallest window eigenvalue -> μ₀² as h -> 0, with Neumann ends in
        // x so the longitudinal box contributes 0 exactly
        let mut errs = vec![];
        for nu_cells in [16usize, 32] {
            let cfg = demo(0.0, -1.0);
            let h = assemble_hamiltonian(
                &cfg,
                6.0,
                0.25,
                PI / nu_cells as f64,
                EndBc::Neumann,
            )
            .unwrap();
            let pairs = spectrum_window(&h, C64::new(0.25, 0.0), 3).unwrap();
            let min_re = pairs
                .iter()
                .map(|p| p.lambda.re)
                .fold(f64::INFINITY, f64::min);
            errs.push((min_re - 0.25).abs());
        }
        let slope = (errs[0] / errs[1]).log2();
        assert!(
            (1.8..=2.2).contains(&slope),
            "errors {errs:?}, slope {slope}"
        );
    }

    #[test]
    fn bound_state_found_and_sign_law() {
        // attractive sign: eigenvalue near μ₀² - ε²α₀²⟨β⟩²
        let cfg = demo(0.2, -1.0);
        let num = DirectNumerics {
            h_x: 0.1,
            h_u: PI / 48.0,
            ..Default::default()
        };
        let found = discrete_eigenvalue_below_threshold(&cfg, &num)
            .unwrap()
            .expect("bound state expected");
        let gap_pred = (0.2f64 * 0.5).powi(2);
        assert!(
            (0.25 - found.lambda.re - gap_pred).abs() < 0.3 * gap_pred,
            "lambda {} vs prediction {}",
            found.lambda,
            0.25 - gap_pred
        );
        assert!(found.lambda.im.abs() < 1e-8);

        // repulsive sign: no eigenvalue below the threshold
        let cfg = demo(0.2, 1.0);
        assert!(discrete_eigenvalue_below_threshold(&cfg, &num)
            .unwrap()
            .is_none());

        // ε = 0: purely essential spectrum
        let cfg = demo(0.0, -1.0);
        let out = discrete_eigenvalue_below_threshold(&cfg, &num).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn resolution_limit_for_tiny_epsilon() {
        let cfg = demo(1e-3, -1.0);
        let num = DirectNumerics {
            l: 30.0,
            h_x: 0.1,
            h_u: PI / 32.0,
            ..Default::default()
        };
        assert!(matches!(
            discrete_eigenvalue_below_threshold(&cfg, &num),
            Err(Error::ResolutionLimit { .. })
        ));
    }
}
