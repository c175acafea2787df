//! Matrix-level verification of the operator identities: PT commutation,
//! the adjoint law, complex symmetry, the spectral parabola, and the
//! boundary-form bound.

use super::assemble::{assemble_hamiltonian, DiscretizedHamiltonian};
use super::eigen::spectrum_window;
use crate::config::WaveguideConfig;
use crate::linalg::vec_norm;
use crate::{C64, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Report of the operator-level checks.  All residuals are max-norms.
#[derive(Debug, Clone)]
pub struct OperatorFactsReport {
    /// `‖P conj(S) P - S‖_max` (discrete PT commutation).
    pub pt_residual: f64,
    /// `‖S(α)^H - S(-α)‖_max` (adjoint law).
    pub adjoint_residual: f64,
    /// `‖S - S^T‖_max` (T-self-adjointness at the matrix level).
    pub symmetry_residual: f64,
    /// Window eigenvalues and whether each sits inside the parabola
    /// `Re z ≥ -slack, |Im z| ≤ 2‖α‖_∞ √(Re z)+ + slack`.
    pub parabola: Vec<(C64, bool)>,
    pub parabola_ok: bool,
    pub parabola_slack: f64,
    /// max over random fields of |h²[Ψ]| / (2‖α‖_∞ ‖Ψ‖ √(h¹[Ψ])).
    pub form_bound_max_ratio: f64,
}

/// Run every matrix-level identity check on the assembled operator.
///
/// `window` (center, count) selects the eigenvalues tested against the
/// parabola; pass `None` to probe around the threshold.
pub fn verify_operator_facts(
    h: &DiscretizedHamiltonian,
    config: &WaveguideConfig,
    seed: u64,
    window: Option<(C64, usize)>,
) -> Result<OperatorFactsReport> {
    // exact structural identities
    let perm = h.parity_permutation();
    let mut pt_residual = 0.0f64;
    let mut symmetry_residual = 0.0f64;
    for (i, j, v) in h.band.entries() {
        pt_residual = pt_residual.max((h.band.get(perm[i], perm[j]).conj() - v).norm());
        symmetry_residual = symmetry_residual.max((h.band.get(j, i) - v).norm());
    }
    let neg_cfg = WaveguideConfig::new(
        config.n,
        config.d,
        -config.alpha0,
        config.epsilon,
        config.beta.negated(),
    )?;
    let grid = &h.grid;
    let h_neg = assemble_hamiltonian(&neg_cfg, grid.l, grid.h_x, grid.h_u, grid.end_bc)?;
    let mut adjoint_residual = 0.0f64;
    for (i, j, v) in h.band.entries() {
        adjoint_residual = adjoint_residual.max((v.conj() - h_neg.band.get(j, i)).norm());
    }

    // spectral parabola with discretization slack
    let hbar = grid.h_x.max(grid.h_u);
    let parabola_slack = 2.0 * hbar * hbar;
    let alpha_sup = h.alpha_sup();
    let (center, count) = window.unwrap_or((C64::new(config.threshold(), 0.0), 6));
    let pairs = spectrum_window(h, center, count)?;
    let mut parabola = Vec::with_capacity(pairs.len());
    let mut parabola_ok = true;
    for p in &pairs {
        let re = p.lambda.re;
        let ok = re >= -parabola_slack
            && p.lambda.im.abs() <= 2.0 * alpha_sup * re.max(0.0).sqrt() + parabola_slack;
        parabola_ok &= ok;
        parabola.push((p.lambda, ok));
    }

    // discrete form bound |h²[Ψ]| ≤ 2 ‖α‖_∞ ‖Ψ‖ √(h¹[Ψ]) on random fields;
    // h¹ and h² are the real and imaginary parts of the quadratic form of S
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let mut form_bound_max_ratio = 0.0f64;
    for _ in 0..100 {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let sv = h.apply(&v);
        let quad: C64 = v.iter().zip(&sv).map(|(a, b)| a.conj() * b).sum();
        let h1 = quad.re; // ∫|∇Ψ|² in discrete form
        let h2 = quad.im; // boundary term
        let ratio = h2.abs() / (2.0 * alpha_sup * vec_norm(&v) * h1.max(0.0).sqrt());
        form_bound_max_ratio = form_bound_max_ratio.max(ratio);
    }

    Ok(OperatorFactsReport {
        pt_residual,
        adjoint_residual,
        symmetry_residual,
        parabola,
        parabola_ok,
        parabola_slack,
        form_bound_max_ratio,
    })
}

/// Dump the assembled matrix in coordinate text format: one
/// `row col re im` line per stored entry.
pub fn dump_coo<W: std::io::Write>(h: &DiscretizedHamiltonian, out: &mut W) -> std::io::Result<()> {
    for (i, j, v) in h.band.entries() {
        if v.norm_sqr() != 0.0 {
            writeln!(out, "{} {} {:.17e} {:.17e}", i, j, v.re, v.im)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::EndBc;
    use crate::profile::PerturbationProfile;
    use std::f64::consts::PI;

    #[test]
    fn all_identities_hold_on_perturbed_operator() {
        let beta = PerturbationProfile::gaussian(1, -1.0 / PI.sqrt(), 1.0, 0.0).unwrap();
        let cfg = WaveguideConfig::new(1, PI, 0.5, 0.1, beta).unwrap();
        let h = assemble_hamiltonian(&cfg, 6.0, 0.25, PI / 16.0, EndBc::Dirichlet).unwrap();
        let report = verify_operator_facts(&h, &cfg, 7, None).unwrap();
        assert!(report.pt_residual <= 1e-14);
        assert!(report.adjoint_residual <= 1e-14);
        assert!(report.symmetry_residual == 0.0);
        assert!(report.parabola_ok, "{:?}", report.parabola);
        assert!(
            report.form_bound_max_ratio <= 1.0,
            "ratio {}",
            report.form_bound_max_ratio
        );
    }

    #[test]
    fn self_adjoint_case_real_spectrum() {
        let beta = PerturbationProfile::gaussian(1, 1.0, 1.0, 0.0).unwrap();
        let cfg = WaveguideConfig::new(1, PI, 0.0, 0.0, beta).unwrap();
        let h = assemble_hamiltonian(&cfg, 5.0, 0.25, PI / 8.0, EndBc::Dirichlet).unwrap();
        let report =
            verify_operator_facts(&h, &cfg, 3, Some((C64::new(0.1, 0.0), 5))).unwrap();
        assert!(report.parabola_ok);
        for (lambda, _) in &report.parabola {
            assert!(lambda.im.abs() < 1e-9);
            assert!(lambda.re >= -1e-9);
        }
    }

    #[test]
    fn coo_dump_round_trips() {
        let beta = PerturbationProfile::gaussian(1, -1.0 / PI.sqrt(), 1.0, 0.0).unwrap();
        let cfg = WaveguideConfig::new(1, PI, 0.5, 0.05, beta).unwrap();
        let h = assemble_hamiltonian(&cfg, 3.0, 0.5, PI / 4.0, EndBc::Dirichlet).unwrap();
        let mut buf = Vec::new();
        dump_coo(&h, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut worst = 0.0f64;
        let mut count = 0;
        for line in text.lines() {
            let f: Vec<&str> = line.split_whitespace().collect();
            let (i, j): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
            let v = C64::new(f[2].parse().unwrap(), f[3].parse().unwrap());
            worst = worst.max((h.band.get(i, j) - v).norm());
            count += 1;
        }
        assert!(count > h.grid.dim());
        assert!(worst == 0.0);
    }
}
