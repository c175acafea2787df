//! The `verify` subcommand: run every operator/kernel invariant on the
//! configured problem and report pass/fail per check.

use crate::config::RunConfig;
use robin_waveguide::bs::{g_function, solve_weak_coupling, BoundStateOutcome};
use robin_waveguide::direct::{
    apply_resolvent_modesum, assemble_hamiltonian, verify_operator_facts,
};
use robin_waveguide::kernels::{
    free_resolvent_kernel, projected_resolvent_kernel, regular_kernel_n, singular_kernel_l,
    SpectralVariable,
};
use robin_waveguide::linalg::{vec_norm, BandLu};
use robin_waveguide::special::{bessel_k, bessel_k_integral, cexpm1};
use robin_waveguide::transverse::{
    biorthonormality_residual, eval_psi, transversal_eigenvalues,
};
use robin_waveguide::{C64, Error};

pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, threshold: f64) -> Check {
    Check {
        name,
        value,
        threshold,
        pass: value <= threshold,
    }
}

/// A small deterministic xorshift for the sampling checks.
struct Rng(u64);
impl Rng {
    fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn run_all(cfg: &RunConfig, seed: u64) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();
    let wg = cfg.waveguide()?;
    let p = &cfg.problem;

    // biorthonormality
    let quad = 4 * (cfg.numerics.j_max + 2);
    let biortho = biorthonormality_residual(p.alpha0, p.d, cfg.numerics.j_max, quad)?;
    checks.push(check("biorthonormality", biortho, 1e-10));

    // Macdonald functions against the integral oracle
    let mut worst = 0.0f64;
    for i in 0..20 {
        let z = 1e-3 * (5e4f64).powf(i as f64 / 19.0);
        for order in [0u8, 1] {
            let a = bessel_k(order, z)?;
            let b = bessel_k_integral(order, z)?;
            worst = worst.max(((a - b) / b).abs());
        }
    }
    checks.push(check("bessel_vs_oracle", worst, 1e-12));

    // Macdonald identities: K0' = -K1 by finite differences; z K1 -> 1
    let mut worst = 0.0f64;
    for z in [0.5, 1.0, 3.0, 8.0] {
        let h = 1e-6;
        let fd = (bessel_k(0, z + h)? - bessel_k(0, z - h)?) / (2.0 * h);
        worst = worst.max((fd + bessel_k(1, z)?).abs() / bessel_k(1, z)?);
    }
    checks.push(check("k0_derivative_identity", worst, 1e-5));
    let mut worst = 0.0f64;
    for i in 1..=100 {
        let z = i as f64 * 1e-4;
        worst = worst.max((bessel_k(1, z)? - 1.0 / z).abs());
    }
    checks.push(check("k1_pole_remainder_bounded", worst, 0.1));

    // regularized-kernel bound |e^{-kr}-1|/|kr| <= 1 and the k-derivative
    // bound on 10^4 random samples with Re k >= 0
    let mut rng = Rng(seed | 1);
    let mut worst_ratio = 0.0f64;
    let mut worst_deriv = 0.0f64;
    for _ in 0..10_000 {
        let k = C64::new(3.0 * rng.next_f64(), 6.0 * (rng.next_f64() - 0.5));
        let r = 5.0 * rng.next_f64() + 1e-6;
        let kr = k * r;
        if kr.norm() < 1e-12 {
            continue;
        }
        worst_ratio = worst_ratio.max(cexpm1(-kr).norm() / kr.norm());
        // |(-kr e^{-kr} - e^{-kr} + 1)/(2k²)| <= r²
        let e = (-kr).exp();
        let numer = -kr * e - e + C64::new(1.0, 0.0);
        worst_deriv = worst_deriv.max((numer / (k * k * 2.0)).norm() / (r * r));
    }
    checks.push(check("regularized_kernel_bound", worst_ratio, 1.0 + 1e-12));
    checks.push(check("kernel_k_derivative_bound", worst_deriv, 1.0 + 1e-12));

    // mode-sum split consistency: L + N + R⊥ vs the free mode sum
    let modes = transversal_eigenvalues(p.alpha0, p.d, 60)?;
    let lambda = C64::new(wg.threshold() - 0.5, 0.1);
    let sv = SpectralVariable::from_lambda(lambda, wg.threshold(), 1)?;
    let (x, xp, u, up) = (0.8, 0.1, 0.25 * p.d, 0.7 * p.d);
    let split = singular_kernel_l(&sv, p.alpha0, &modes, u, up)?
        + regular_kernel_n(&sv, p.alpha0, &modes, x, xp, u, up)?
        + projected_resolvent_kernel(&sv, p.alpha0, p.d, &modes, x, xp, u, up, 50)?.value;
    let mut free_sum = C64::new(0.0, 0.0);
    for m in &modes[..=50] {
        let rz = free_resolvent_kernel(1, lambda - m.mu_sq, (x - xp).abs())?;
        free_sum += eval_psi(m, p.alpha0, u) * rz * (m.a_norm * eval_psi(m, p.alpha0, up));
    }
    checks.push(check(
        "mode_sum_split_consistency",
        (split - free_sum).norm(),
        1e-9,
    ));

    // operator identities on a small assembled matrix
    let (l, hx, hu) = if p.n == 1 {
        (6.0, 0.25, p.d / 24.0)
    } else {
        (2.5, 0.5, p.d / 8.0)
    };
    let ham = assemble_hamiltonian(&wg, l, hx, hu, cfg.direct_numerics().end_bc)?;
    let report = verify_operator_facts(&ham, &wg, seed, None)?;
    checks.push(check("pt_commutation", report.pt_residual, 1e-14));
    checks.push(check("adjoint_law", report.adjoint_residual, 1e-14));
    checks.push(check("t_selfadjoint_symmetry", report.symmetry_residual, 1e-14));
    checks.push(check(
        "spectral_parabola",
        if report.parabola_ok { 0.0 } else { 1.0 },
        0.5,
    ));
    checks.push(check("form_bound", report.form_bound_max_ratio, 1.0));

    // mode-sum resolvent against the banded solve (strip only; the layer
    // smoke grid is exercised in the unit suites)
    if p.n == 1 {
        let c0 = cfg.waveguide_at(0.0)?;
        let ham0 = assemble_hamiltonian(&c0, 6.0, 0.25, p.d / 24.0, cfg.direct_numerics().end_bc)?;
        let dim = ham0.grid.dim();
        let mut rng = Rng(seed | 3);
        let rhs: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect();
        let lam = C64::new(-1.0, 0.0);
        let xm = apply_resolvent_modesum(&ham0, &rhs, lam, ham0.grid.n_u() - 1)?;
        let mut shifted = ham0.band.clone();
        for i in 0..dim {
            let v = shifted.get(i, i) - lam;
            shifted.set(i, i, v);
        }
        let xd = BandLu::factor(&shifted)?.solve(&rhs);
        let num: f64 = xm
            .iter()
            .zip(&xd)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        checks.push(check(
            "modesum_resolvent_equivalence",
            num / vec_norm(&xd),
            1e-6,
        ));
    }

    // Birman-Schwinger fixed point: at the solved root, -1 is an eigenvalue
    // of the discretized operator
    if p.n == 1 && wg.coupling_sign() < 0.0 && wg.epsilon > 0.0 {
        match solve_weak_coupling(&wg, &cfg.bs_discretization(), cfg.numerics.newton_tol)? {
            BoundStateOutcome::Eigenvalue(r) => {
                let eig = crate::bs_eig_at_lambda(cfg, r.lambda.re)?;
                checks.push(check(
                    "bs_eigenvalue_at_root",
                    (eig + C64::new(1.0, 0.0)).norm(),
                    1e-6,
                ));
                checks.push(check(
                    "bs_reality",
                    r.lambda.im.abs() / r.lambda.norm(),
                    1e-8,
                ));
                // sign law: flipping the profile kills the eigenvalue
                let flipped = robin_waveguide::WaveguideConfig::new(
                    wg.n,
                    wg.d,
                    wg.alpha0,
                    wg.epsilon,
                    wg.beta.negated(),
                )?;
                let none = matches!(
                    solve_weak_coupling(
                        &flipped,
                        &cfg.bs_discretization(),
                        cfg.numerics.newton_tol
                    )?,
                    BoundStateOutcome::NoEigenvalue
                );
                checks.push(check("sign_law", if none { 0.0 } else { 1.0 }, 0.5));
            }
            BoundStateOutcome::NoEigenvalue => {
                checks.push(check("bs_eigenvalue_at_root", 1.0, 0.5));
            }
        }
    }

    // G stays real along the physical axis (PT consistency)
    if wg.epsilon > 0.0 {
        let k0 = robin_waveguide::bs::k_seed(wg.epsilon, &wg);
        let g = g_function(k0, wg.epsilon, &wg, &cfg.bs_discretization())?;
        checks.push(check(
            "g_pt_reality",
            g.im.abs() / g.norm().max(1e-300),
            1e-3,
        ));
    }

    Ok(checks)
}
