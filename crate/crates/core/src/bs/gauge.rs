//! Grid verification of the unitary gauge transform.

use crate::bs::factorize::{apply_z_direct, AnalyticField};
use crate::config::WaveguideConfig;
use crate::direct::{assemble_hamiltonian, EndBc};
use crate::{C64, Result};

/// Residual of `U_ε⁻¹ H_α U_ε Ψ - (H_{α₀} + ε Z_ε) Ψ` on a grid.
///
/// `H_α` acts through the finite-difference operator with the perturbed
/// Robin rows, `H_{α₀}` through the constant-coupling one, and `Z_ε Ψ` is
/// evaluated in closed form.  The max-norm residual over nodes away from
/// the longitudinal truncation is returned; it vanishes identically for
/// ε = 0 and decays at O(h²) otherwise.
pub fn gauge_transform_check(
    config: &WaveguideConfig,
    field: &AnalyticField,
    l: f64,
    h_x: f64,
    h_u: f64,
) -> Result<f64> {
    let perturbed = assemble_hamiltonian(config, l, h_x, h_u, EndBc::Dirichlet)?;
    let constant = {
        let mut c0 = config.clone();
        c0.epsilon = 0.0;
        assemble_hamiltonian(&c0, l, h_x, h_u, EndBc::Dirichlet)?
    };
    let grid = &perturbed.grid;
    let dim = grid.dim();
    let nu = grid.n_u();
    let eps = config.epsilon;

    // Ψ and U_ε Ψ on the grid
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    let mut u_psi = vec![C64::new(0.0, 0.0); dim];
    for i in 0..dim {
        let x = grid.x_of(i);
        let u = grid.u_nodes[i % nu];
        let v = (field.value)(&x, u);
        psi[i] = v;
        let phase = C64::new(0.0, -eps * config.beta.eval(&x) * u).exp();
        u_psi[i] = phase * v;
    }
    let h_pert_u_psi = perturbed.apply_fd(&u_psi);
    let h0_psi = constant.apply_fd(&psi);

    let mut worst = 0.0f64;
    for i in 0..dim {
        let q = i % nu;
        // the Robin penalty of the wall rows cancels between the two sides
        // exactly, but its O(h) expansion remainder would mask the O(h²)
        // interior truncation order; measure over interior rows
        if q == 0 || q == nu - 1 {
            continue;
        }
        let x = grid.x_of(i);
        let u = grid.u_nodes[q];
        // keep clear of the artificial |x| = L walls where the test field
        // need not vanish exactly
        if x.iter().any(|&xi| (xi - grid.center).abs() > l - 2.0 * h_x) {
            continue;
        }
        let phase_back = C64::new(0.0, eps * config.beta.eval(&x) * u).exp();
        let lhs = phase_back * h_pert_u_psi[i];
        let rhs = h0_psi[i] + eps * apply_z_direct(&config.beta, eps, field, &x, u);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::PerturbationProfile;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn smooth_field() -> AnalyticField<'static> {
        // compactly-supported-in-x envelope times a u-polynomial that
        // satisfies the unperturbed Robin rows only approximately; the
        // identity holds for any smooth field
        fn value(x: &[f64], u: f64) -> C64 {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            C64::new((-r2 / 2.0).exp(), 0.0) * C64::new(1.0 + 0.2 * u, 0.3 * u * u)
        }
        fn dx(x: &[f64], u: f64, axis: usize) -> C64 {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            C64::new(-x[axis] * (-r2 / 2.0).exp(), 0.0) * C64::new(1.0 + 0.2 * u, 0.3 * u * u)
        }
        fn du(x: &[f64], u: f64) -> C64 {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            C64::new((-r2 / 2.0).exp(), 0.0) * C64::new(0.2, 0.6 * u)
        }
        AnalyticField { value: &value, dx: &dx, du: &du }
    }

    #[test]
    fn zero_epsilon_residual_vanishes() {
        let beta = PerturbationProfile::gaussian(1, -1.0 / PI.sqrt(), 1.0, 0.0).unwrap();
        let cfg = WaveguideConfig::new(1, PI, 0.5, 0.0, beta).unwrap();
        let r = gauge_transform_check(&cfg, &smooth_field(), 6.0, 0.25, PI / 16.0).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn constant_beta_reduces_to_du_term() {
        // β ≡ c: Z_ε = 2ic ∂_u + εc²; residual is pure discretization error
        let c = 0.35;
        let cyl_eval = Arc::new(move |_: &[f64]| c);
        let cyl_grad = Arc::new(|x: &[f64]| vec![0.0; x.len()]);
        let cyl_h = Arc::new(|_: &[f64]| 0.0);
        let beta = PerturbationProfile::custom_unchecked(1, cyl_eval, cyl_grad, cyl_h, 0.0);
        let cfg = WaveguideConfig {
            n: 1,
            d: PI,
            alpha0: 0.5,
            epsilon: 0.1,
            beta,
        };
        let mut errs = vec![];
        for m in [16usize, 32] {
            let r = gauge_transform_check(
                &cfg,
                &smooth_field(),
                6.0,
                1.5 / m as f64,
                PI / (2 * m) as f64,
            )
            .unwrap();
            errs.push(r);
        }
        assert!(errs[0] < 0.05, "{errs:?}");
        let ratio = errs[0] / errs[1];
        assert!(ratio > 3.0, "expected ~4x decay, got {errs:?}");
    }

    #[test]
    fn gaussian_beta_second_order_convergence() {
        let beta = PerturbationProfile::gaussian(1, -1.0 / PI.sqrt(), 1.0, 0.0).unwrap();
        let cfg = WaveguideConfig::new(1, PI, 0.5, 0.1, beta).unwrap();
        let mut errs = vec![];
        for m in [16usize, 32] {
            let r = gauge_transform_check(
                &cfg,
                &smooth_field(),
                6.0,
                1.5 / m as f64,
                PI / (2 * m) as f64,
            )
            .unwrap();
            errs.push(r);
        }
        let ratio = errs[0] / errs[1];
        assert!(
            (2.8..6.0).contains(&ratio),
            "expected ~4x decay, got {errs:?} (ratio {ratio})"
        );
    }
}
