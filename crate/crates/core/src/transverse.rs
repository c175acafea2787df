//! Transversal eigensystem of `-d²/du²` on `(0, d)` with the complex Robin
//! conditions `ψ' + iα₀ψ = 0` at both endpoints, together with the
//! biorthonormal family of adjoint eigenfunctions.
//!
//! The point spectrum is `{μ_j²}` with one "alpha mode" `μ = α₀` and the
//! cosine ladder `μ = jπ/d`; eigenfunctions are
//! `ψ_j(u) = cos(μ_j u) - i (α₀/μ_j) sin(μ_j u)` and the adjoint family is
//! `φ_j = conj(A_j ψ_j)` with `(φ_j, ψ_k) = δ_jk`.

use crate::linalg::CMat;
use crate::quad::UGrid;
use crate::{C64, Error, Result};

/// Which branch of the transversal spectrum a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// μ = α₀ (boundary-driven mode, `ψ = e^{-iα₀u}`).
    Alpha,
    /// μ = jπ/d for j ≥ 1.
    Cosine,
}

/// One transversal eigenpair.
#[derive(Debug, Clone, Copy)]
pub struct TransversalMode {
    /// Position in the μ²-ascending ordering.
    pub index: usize,
    /// μ_j (signed for the alpha mode, positive for cosine modes).
    pub mu: f64,
    /// μ_j², the transversal eigenvalue.
    pub mu_sq: f64,
    /// Biorthonormalisation constant A_j.
    pub a_norm: C64,
    pub kind: ModeKind,
}

/// Tolerance (relative to π/d) below which α₀ is treated as 0 in the
/// alpha-mode closed forms.
const ALPHA_ZERO_REL: f64 = 1e-8;

/// Reject configurations with `|α₀ d/π - round(α₀ d/π)| < 1e-9` for a
/// nonzero round: the normalisation constants A_j blow up there.
pub const SIMPLE_SPECTRUM_TOL: f64 = 1e-9;

/// Check the simple-spectrum hypothesis `α₀ d / π ∉ ℤ \ {0}`.
pub fn check_simple_spectrum(alpha0: f64, d: f64) -> Result<()> {
    let value = alpha0 * d / std::f64::consts::PI;
    let nearest = value.round();
    if nearest != 0.0 && (value - nearest).abs() < SIMPLE_SPECTRUM_TOL {
        return Err(Error::SimpleSpectrumViolation {
            value,
            nearest: nearest as i64,
            tol: SIMPLE_SPECTRUM_TOL,
        });
    }
    Ok(())
}

/// Infimum of the essential spectrum, `μ₀² = min{α₀², (π/d)²}`.
pub fn threshold(alpha0: f64, d: f64) -> f64 {
    let a = alpha0 * alpha0;
    let b = (std::f64::consts::PI / d) * (std::f64::consts::PI / d);
    a.min(b)
}

fn a_norm_alpha(alpha0: f64, d: f64) -> C64 {
    if alpha0.abs() < ALPHA_ZERO_REL * (std::f64::consts::PI / d) {
        // limit α₀ -> 0
        C64::new(1.0 / d, 0.0)
    } else {
        let two_i_a = C64::new(0.0, 2.0 * alpha0);
        let denom = C64::new(1.0, 0.0) - (C64::new(0.0, -2.0 * alpha0 * d)).exp();
        two_i_a / denom
    }
}

fn a_norm_cosine(mu: f64, alpha0: f64, d: f64) -> C64 {
    C64::new(2.0 * mu * mu / ((mu * mu - alpha0 * alpha0) * d), 0.0)
}

/// The first `j_max + 1` transversal modes, sorted by μ² ascending.
///
/// The alpha mode and the cosine ladder interleave: for `|α₀| ≤ π/d` the
/// alpha mode comes first, otherwise it slots in after the cosine modes it
/// exceeds.
pub fn transversal_eigenvalues(alpha0: f64, d: f64, j_max: usize) -> Result<Vec<TransversalMode>> {
    if d <= 0.0 {
        return Err(Error::InvalidInput(format!("d must be positive, got {d}")));
    }
    check_simple_spectrum(alpha0, d)?;
    let mut modes = Vec::with_capacity(j_max + 2);
    modes.push(TransversalMode {
        index: 0,
        mu: alpha0,
        mu_sq: alpha0 * alpha0,
        a_norm: a_norm_alpha(alpha0, d),
        kind: ModeKind::Alpha,
    });
    for j in 1..=j_max + 1 {
        let mu = j as f64 * std::f64::consts::PI / d;
        modes.push(TransversalMode {
            index: 0,
            mu,
            mu_sq: mu * mu,
            a_norm: a_norm_cosine(mu, alpha0, d),
            kind: ModeKind::Cosine,
        });
    }
    modes.sort_by(|a, b| a.mu_sq.partial_cmp(&b.mu_sq).unwrap());
    modes.truncate(j_max + 1);
    for (i, m) in modes.iter_mut().enumerate() {
        m.index = i;
    }
    Ok(modes)
}

/// ψ_j(u); the alpha mode uses the exact closed form `e^{-iα₀u}` which is
/// regular through α₀ = 0.
pub fn eval_psi(mode: &TransversalMode, alpha0: f64, u: f64) -> C64 {
    match mode.kind {
        ModeKind::Alpha => (C64::new(0.0, -alpha0 * u)).exp(),
        ModeKind::Cosine => {
            let mu = mode.mu;
            C64::new((mu * u).cos(), -(alpha0 / mu) * (mu * u).sin())
        }
    }
}

/// dψ_j/du, analytic.
pub fn eval_psi_prime(mode: &TransversalMode, alpha0: f64, u: f64) -> C64 {
    match mode.kind {
        ModeKind::Alpha => {
            C64::new(0.0, -alpha0) * (C64::new(0.0, -alpha0 * u)).exp()
        }
        ModeKind::Cosine => {
            let mu = mode.mu;
            C64::new(-mu * (mu * u).sin(), -alpha0 * (mu * u).cos())
        }
    }
}

/// φ_j(u) = conj(A_j ψ_j(u)), the adjoint-basis eigenfunction.
pub fn eval_phi(mode: &TransversalMode, alpha0: f64, _d: f64, u: f64) -> C64 {
    (mode.a_norm * eval_psi(mode, alpha0, u)).conj()
}

/// Gram matrix `(φ_j, ψ_k) = ∫ conj(φ_j) ψ_k du` by Gauss–Legendre
/// quadrature; deviates from the identity only by quadrature error.
pub fn biorthonormality_matrix(
    alpha0: f64,
    d: f64,
    j_max: usize,
    quad_order: usize,
) -> Result<CMat> {
    let modes = transversal_eigenvalues(alpha0, d, j_max)?;
    let grid = UGrid::gauss(d, quad_order);
    let mut g = CMat::zeros(j_max + 1, j_max + 1);
    // cache ψ and conj(φ) = A ψ on the nodes
    let mut psi = vec![vec![C64::new(0.0, 0.0); grid.len()]; j_max + 1];
    let mut phi_bar = psi.clone();
    for (j, m) in modes.iter().enumerate() {
        for (q, u) in grid.nodes.iter().enumerate() {
            let p = eval_psi(m, alpha0, *u);
            psi[j][q] = p;
            phi_bar[j][q] = m.a_norm * p;
        }
    }
    for j in 0..=j_max {
        for k in 0..=j_max {
            let mut acc = C64::new(0.0, 0.0);
            for q in 0..grid.len() {
                acc += grid.weights[q] * phi_bar[j][q] * psi[k][q];
            }
            g[(j, k)] = acc;
        }
    }
    Ok(g)
}

/// Max deviation of the biorthonormality Gram matrix from the identity.
pub fn biorthonormality_residual(alpha0: f64, d: f64, j_max: usize, quad_order: usize) -> Result<f64> {
    let g = biorthonormality_matrix(alpha0, d, j_max, quad_order)?;
    let mut worst = 0.0f64;
    for j in 0..g.nrows() {
        for k in 0..g.ncols() {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g[(j, k)] - C64::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Project a tensor-sampled field `Ψ(x_p, u_q)` onto mode `j`:
/// `Ψ_j(x_p) = (φ_j, Ψ(x_p, ·)) = ∫ conj(φ_j(u)) Ψ(x_p, u) du`.
///
/// The field is stored row-major over the x-grid with `u` fastest and must
/// be sampled exactly on the quadrature nodes of `ugrid`.
pub fn project_mode(
    field: &[C64],
    n_x: usize,
    ugrid: &UGrid,
    mode: &TransversalMode,
    alpha0: f64,
) -> Result<Vec<C64>> {
    if field.len() != n_x * ugrid.len() {
        return Err(Error::GridMismatch(format!(
            "field has {} samples, expected {} x-nodes x {} u-nodes",
            field.len(),
            n_x,
            ugrid.len()
        )));
    }
    let nu = ugrid.len();
    let mut phi_bar_w = vec![C64::new(0.0, 0.0); nu];
    for q in 0..nu {
        phi_bar_w[q] =
            mode.a_norm * eval_psi(mode, alpha0, ugrid.nodes[q]) * ugrid.weights[q];
    }
    let mut out = vec![C64::new(0.0, 0.0); n_x];
    for p in 0..n_x {
        let row = &field[p * nu..(p + 1) * nu];
        let mut acc = C64::new(0.0, 0.0);
        for q in 0..nu {
            acc += phi_bar_w[q] * row[q];
        }
        out[p] = acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mu_squared_lists() {
        // α₀ = 0.5, d = π: {0.25, 1, 4, 9}
        let m = transversal_eigenvalues(0.5, PI, 3).unwrap();
        let mu2: Vec<f64> = m.iter().map(|x| x.mu_sq).collect();
        for (a, b) in mu2.iter().zip([0.25, 1.0, 4.0, 9.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(m[0].kind, ModeKind::Alpha);

        // Neumann limit α₀ = 0, d = 1: {0, π², 4π²}
        let m = transversal_eigenvalues(0.0, 1.0, 2).unwrap();
        let mu2: Vec<f64> = m.iter().map(|x| x.mu_sq).collect();
        for (a, b) in mu2.iter().zip([0.0, PI * PI, 4.0 * PI * PI]) {
            assert!((a - b).abs() < 1e-12);
        }

        // supercritical α₀: alpha mode slots in after the first cosine mode
        let m = transversal_eigenvalues(1.7, PI, 3).unwrap();
        let kinds: Vec<ModeKind> = m.iter().map(|x| x.kind).collect();
        assert_eq!(
            kinds,
            [ModeKind::Cosine, ModeKind::Alpha, ModeKind::Cosine, ModeKind::Cosine]
        );
        assert!((m[1].mu_sq - 1.7 * 1.7).abs() < 1e-14);
    }

    #[test]
    fn simple_spectrum_violation() {
        let err = transversal_eigenvalues(2.0, PI, 2).unwrap_err();
        match err {
            Error::SimpleSpectrumViolation { nearest, .. } => assert_eq!(nearest, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(transversal_eigenvalues(2.0 + 1e-10, PI, 2).is_err());
        assert!(transversal_eigenvalues(2.0 + 1e-6, PI, 2).is_ok());
        // zero is excluded from the violation set
        assert!(transversal_eigenvalues(0.0, PI, 2).is_ok());
    }

    #[test]
    fn psi_values() {
        let m = transversal_eigenvalues(0.5, PI, 3).unwrap();
        // any mode at u = 0 equals 1
        for mode in &m {
            assert!((eval_psi(mode, 0.5, 0.0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
        // alpha mode at u = 1: e^{-0.5i}
        let v = eval_psi(&m[0], 0.5, 1.0);
        assert!((v - C64::new(0.87758256189, -0.47942553860)).norm() < 1e-10);
        // cosine mode with α₀ = 0 at u = d: (-1)^j
        let m0 = transversal_eigenvalues(0.0, PI, 3).unwrap();
        for mode in m0.iter().skip(1) {
            let j = (mode.mu / 1.0).round() as i32; // d = π so μ = j
            let v = eval_psi(mode, 0.0, PI);
            assert!((v - C64::new((-1.0f64).powi(j), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn phi_normalisation() {
        // α₀ = 0: alpha-mode φ is the constant 1/d
        let m = transversal_eigenvalues(0.0, 2.0, 1).unwrap();
        for u in [0.0, 0.7, 2.0] {
            assert!((eval_phi(&m[0], 0.0, 2.0, u) - C64::new(0.5, 0.0)).norm() < 1e-12);
        }
        // quadrature oracle: ∫ conj(φ0) ψ0 du = 1 at α₀ = 0.5, d = π
        let m = transversal_eigenvalues(0.5, PI, 1).unwrap();
        let grid = UGrid::gauss(PI, 32);
        let mut acc = C64::new(0.0, 0.0);
        for (u, w) in grid.nodes.iter().zip(&grid.weights) {
            acc += eval_phi(&m[0], 0.5, PI, *u).conj() * eval_psi(&m[0], 0.5, *u) * *w;
        }
        assert!((acc - C64::new(1.0, 0.0)).norm() < 1e-12);
        // A_2 = 8 / (3.75 π) for the second cosine mode at α₀ = 0.5, d = π
        let m = transversal_eigenvalues(0.5, PI, 3).unwrap();
        assert!((m[2].a_norm - C64::new(8.0 / (3.75 * PI), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn threshold_values() {
        assert!((threshold(0.5, PI) - 0.25).abs() < 1e-15);
        assert!((threshold(2.0, PI) - 1.0).abs() < 1e-15);
        assert!(threshold(0.0, 1.0) == 0.0);
        // equals the minimum over the computed modes for every j_max ≥ 1
        for j_max in 1..6 {
            let m = transversal_eigenvalues(0.7, 2.0, j_max).unwrap();
            let min = m.iter().map(|x| x.mu_sq).fold(f64::INFINITY, f64::min);
            assert!((min - threshold(0.7, 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn biorthonormality_small_and_identity_cases() {
        // j_max = 0: 1x1 identity
        let g = biorthonormality_matrix(0.5, PI, 0, 8).unwrap();
        assert!((g[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-13);
        // α₀ = 0.5, d = π, j_max = 10
        let r = biorthonormality_residual(0.5, PI, 10, 4 * 11).unwrap();
        assert!(r < 1e-10, "residual {r}");
        // self-adjoint cosine basis at α₀ = 0
        let r = biorthonormality_residual(0.0, 1.3, 6, 4 * 7).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn boundary_conditions_analytic() {
        let alpha0 = 0.8;
        let d = 2.2;
        let modes = transversal_eigenvalues(alpha0, d, 6).unwrap();
        for m in &modes {
            for u in [0.0, d] {
                let bc = eval_psi_prime(m, alpha0, u)
                    + C64::new(0.0, alpha0) * eval_psi(m, alpha0, u);
                assert!(bc.norm() < 1e-12, "mode {} at u={u}: {}", m.index, bc.norm());
            }
        }
    }

    #[test]
    fn ode_residual_finite_difference() {
        let alpha0 = 0.5;
        let d = PI;
        let modes = transversal_eigenvalues(alpha0, d, 4).unwrap();
        let mut prev_err = f64::INFINITY;
        for h in [1e-3, 5e-4] {
            let mut worst = 0.0f64;
            for m in &modes {
                for u in [0.3, 1.1, 2.4] {
                    let dd = (eval_psi(m, alpha0, u + h) - eval_psi(m, alpha0, u) * 2.0
                        + eval_psi(m, alpha0, u - h))
                        / (h * h);
                    let res = (-dd - C64::new(m.mu_sq, 0.0) * eval_psi(m, alpha0, u)).norm();
                    worst = worst.max(res);
                }
            }
            assert!(worst < prev_err);
            // truncation coefficient is μ⁴/12 ≈ 21 for the highest mode here
            assert!(worst < 30.0 * h * h, "h={h}: residual {worst}");
            prev_err = worst;
        }
    }

    #[test]
    fn alpha_continuity_at_zero() {
        // |ψ_alpha(α₀, u) - 1| -> 0 uniformly as α₀ -> 0
        let d = PI;
        for alpha0 in [1e-2, 1e-4, 1e-6] {
            let m = transversal_eigenvalues(alpha0, d, 1).unwrap();
            let worst = (0..50)
                .map(|i| {
                    let u = d * i as f64 / 49.0;
                    (eval_psi(&m[0], alpha0, u) - C64::new(1.0, 0.0)).norm()
                })
                .fold(0.0, f64::max);
            assert!(worst <= alpha0 * d * 1.0001, "alpha0={alpha0}: {worst}");
            // and the A constant approaches 1/d (first-order drift ~ α₀)
            assert!((m[0].a_norm - C64::new(1.0 / d, 0.0)).norm() < 2.0 * alpha0 + 1e-12);
        }
    }

    #[test]
    fn projection_picks_out_modes() {
        let alpha0 = 0.5;
        let d = PI;
        let j_max = 4;
        let modes = transversal_eigenvalues(alpha0, d, j_max).unwrap();
        let grid = UGrid::gauss(d, 4 * (j_max + 1));
        let n_x = 7;
        // field = f(x) ψ_3(u) with f(x) = x², plus ψ_0 + ψ_1 with f ≡ 1
        let f = |p: usize| C64::new((p as f64).powi(2), 0.3);
        let mut field = vec![C64::new(0.0, 0.0); n_x * grid.len()];
        for p in 0..n_x {
            for q in 0..grid.len() {
                let u = grid.nodes[q];
                field[p * grid.len() + q] = f(p) * eval_psi(&modes[3], alpha0, u)
                    + eval_psi(&modes[0], alpha0, u)
                    + eval_psi(&modes[1], alpha0, u);
            }
        }
        for j in 0..=j_max {
            let proj = project_mode(&field, n_x, &grid, &modes[j], alpha0).unwrap();
            for p in 0..n_x {
                let expect = match j {
                    3 => f(p),
                    0 | 1 => C64::new(1.0, 0.0),
                    _ => C64::new(0.0, 0.0),
                };
                assert!(
                    (proj[p] - expect).norm() < 1e-10,
                    "mode {j} node {p}: {:?} vs {expect:?}",
                    proj[p]
                );
            }
        }
        // mismatched field length errors out
        assert!(project_mode(&field[1..], n_x, &grid, &modes[0], alpha0).is_err());
    }

    #[test]
    fn random_field_reconstruction() {
        // Σ_j Ψ_j(x) ψ_j(u) reconstructs a smooth field, residual decays in j_max
        let alpha0 = 0.4;
        let d = 1.0;
        let field_fn = |u: f64| C64::new((2.0 * u).sin(), (1.5 * u).cos() * 0.5);
        let mut errs = vec![];
        for j_max in [6usize, 12] {
            let modes = transversal_eigenvalues(alpha0, d, j_max).unwrap();
            let grid = UGrid::gauss(d, 4 * (j_max + 1));
            let field: Vec<C64> = grid.nodes.iter().map(|u| field_fn(*u)).collect();
            let mut coeffs = vec![];
            for m in &modes {
                coeffs.push(project_mode(&field, 1, &grid, m, alpha0).unwrap()[0]);
            }
            let mut worst = 0.0f64;
            for (q, u) in grid.nodes.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, m) in coeffs.iter().zip(&modes) {
                    acc += c * eval_psi(m, alpha0, *u);
                }
                worst = worst.max((acc - field[q]).norm());
            }
            errs.push(worst);
        }
        // generic smooth fields violate the Robin conditions, so the
        // expansion converges like 1/j_max in the sup norm
        assert!(errs[1] < errs[0] * 0.65, "residuals {errs:?}");
        assert!(errs[1] < 0.05, "residuals {errs:?}");
    }
}
