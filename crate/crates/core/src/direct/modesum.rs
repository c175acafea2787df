//! Mode-sum application of the constant-coupling resolvent.
//!
//! For α ≡ α₀ the symmetrized matrix is the Kronecker sum
//! `S = S_x ⊗ I + I ⊗ S_u(α₀)`, so the resolvent factorizes over the
//! discrete transversal eigenbasis: project each mode with the biorthogonal
//! pairing, solve the longitudinal problem with the explicit discrete
//! kernel, re-expand.  With the full mode count this reproduces the direct
//! solve to roundoff; truncation drops the high modes.

use super::assemble::DiscretizedHamiltonian;
use super::grid::EndBc;
use crate::linalg::{dense_eigen, dot_bilinear, BandLu, BandMat, CMat};
use crate::{C64, Error, Result};

/// Discrete transversal eigensystem of the symmetrized Robin block.
///
/// The block is complex symmetric, so left eigenvectors are plain
/// transposes; vectors are normalized to `v^T v = 1`, the discrete analogue
/// of the biorthonormalisation `(φ_j, ψ_k) = δ_jk`.
#[derive(Debug, Clone)]
pub struct TransverseBasis {
    /// Discrete transversal eigenvalues, sorted by real part.
    pub mu_sq: Vec<C64>,
    /// Eigenvectors (one per mode, length n_u).
    pub vectors: Vec<Vec<C64>>,
}

impl TransverseBasis {
    /// Lowest discrete transversal eigenvalue = discrete threshold μ₀,h².
    pub fn threshold(&self) -> C64 {
        self.mu_sq[0]
    }
}

/// The symmetrized transversal block `S_u(α₀)` as a dense matrix.
fn transverse_block(n_u: usize, h_u: f64, alpha0: f64) -> CMat {
    let mut m = CMat::zeros(n_u, n_u);
    let w = |q: usize| -> f64 {
        if q == 0 || q == n_u - 1 {
            0.5 * h_u
        } else {
            h_u
        }
    };
    for q in 0..n_u {
        let stiff = if q == 0 || q == n_u - 1 { 1.0 / h_u } else { 2.0 / h_u };
        let mut diag = C64::new(stiff, 0.0);
        if q == 0 {
            diag += C64::new(0.0, -alpha0);
        } else if q == n_u - 1 {
            diag += C64::new(0.0, alpha0);
        }
        m[(q, q)] = diag / w(q);
        if q + 1 < n_u {
            let v = C64::new(-1.0 / h_u / (w(q) * w(q + 1)).sqrt(), 0.0);
            m[(q, q + 1)] = v;
            m[(q + 1, q)] = v;
        }
    }
    m
}

/// Eigendecomposition of the discrete transversal operator.
pub fn discrete_transverse_basis(n_u: usize, h_u: f64, alpha0: f64) -> Result<TransverseBasis> {
    let block = transverse_block(n_u, h_u, alpha0);
    let mut eig = dense_eigen(&block)?;
    eig.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
    let mut mu_sq = Vec::with_capacity(n_u);
    let mut vectors = Vec::with_capacity(n_u);
    for (lambda, mut v) in eig {
        let c = dot_bilinear(&v, &v).sqrt();
        if c.norm() < 1e-10 {
            return Err(Error::ConvergenceFailure(format!(
                "transversal mode at {lambda} is quasi-degenerate (v^T v = {c}); \
                 the simple-spectrum hypothesis is violated at the discrete level"
            )));
        }
        for z in &mut v {
            *z /= c;
        }
        mu_sq.push(lambda);
        vectors.push(v);
    }
    Ok(TransverseBasis { mu_sq, vectors })
}

/// Solve `(S_x + w) c = b` for the 1D Dirichlet Toeplitz stiffness via its
/// explicit kernel, the discrete analogue of `e^{-√w |x-x'|}/(2√w)` with
/// image corrections from the truncation.  O(n) via prefix recursions; all
/// exponentials decay.
fn toeplitz_green_solve(b: &[C64], h: f64, w: C64) -> Result<Vec<C64>> {
    let n = b.len();
    // cosh θ = 1 + w h²/2; ρ = e^{-θ} with |ρ| < 1
    let zeta = C64::new(1.0, 0.0) + w * (0.5 * h * h);
    let mut s = (zeta * zeta - 1.0).sqrt();
    // pick the root that makes |ζ + s| ≥ 1 (decaying ρ)
    if (zeta + s).norm() < (zeta - s).norm() {
        s = -s;
    }
    let big = zeta + s; // e^{θ}, |big| ≥ 1
    if big.norm() <= 1.0 + 1e-13 {
        return Err(Error::OnSpectrum {
            re: w.re,
            im: w.im,
            dist: (big.norm() - 1.0).abs(),
        });
    }
    let rho = C64::new(1.0, 0.0) / big;
    let m = n + 1; // Dirichlet walls sit at 0 and m in 1-based numbering
    // powers ρ^{2q} for q = 0..m
    let mut pow2 = vec![C64::new(1.0, 0.0); m + 1];
    let r2 = rho * rho;
    for q in 1..=m {
        pow2[q] = pow2[q - 1] * r2;
    }
    let one = C64::new(1.0, 0.0);
    // F_p = Σ_{q<=p} ρ^{p-q} (1-ρ^{2q}) b_q (1-based p, q)
    let mut f = vec![C64::new(0.0, 0.0); n + 2];
    for p in 1..=n {
        f[p] = f[p - 1] * rho + (one - pow2[p]) * b[p - 1];
    }
    // B_p = Σ_{q>p} ρ^{q-p} (1-ρ^{2(m-q)}) b_q
    let mut back = vec![C64::new(0.0, 0.0); n + 2];
    for p in (1..=n).rev() {
        let next = if p + 1 <= n {
            (one - pow2[m - (p + 1)]) * b[p]
        } else {
            C64::new(0.0, 0.0)
        };
        back[p] = (back[p + 1] + next) * rho;
    }
    let pref = rho * (h * h) / ((one - r2) * (one - pow2[m]));
    let mut x = vec![C64::new(0.0, 0.0); n];
    for p in 1..=n {
        x[p - 1] = pref * ((one - pow2[m - p]) * f[p] + (one - pow2[p]) * back[p]);
    }
    Ok(x)
}

/// Longitudinal solve `(S_longitudinal + w) c = b` for one transversal mode.
fn solve_longitudinal(h: &DiscretizedHamiltonian, w: C64, b: &[C64]) -> Result<Vec<C64>> {
    let grid = &h.grid;
    let nx = grid.n_x();
    if grid.n == 1 && grid.end_bc == EndBc::Dirichlet {
        // explicit-kernel path, cross-checked against the banded solve
        return toeplitz_green_solve(b, grid.h_x, w);
    }
    // generic banded path (Neumann ends or layer)
    let dim = b.len();
    let halfband = if grid.n == 1 { 1 } else { nx };
    let mut band = BandMat::zeros(dim, halfband, halfband);
    let free_x = matches!(grid.end_bc, EndBc::Neumann);
    let stiff = |i: usize| -> f64 {
        if free_x && (i == 0 || i == nx - 1) {
            1.0 / grid.h_x
        } else {
            2.0 / grid.h_x
        }
    };
    match grid.n {
        1 => {
            for p in 0..nx {
                band.set(p, p, C64::new(stiff(p) / grid.wx[p], 0.0) + w);
                if p + 1 < nx {
                    let v = C64::new(
                        -1.0 / grid.h_x / (grid.wx[p] * grid.wx[p + 1]).sqrt(),
                        0.0,
                    );
                    band.set(p, p + 1, v);
                    band.set(p + 1, p, v);
                }
            }
        }
        _ => {
            for p1 in 0..nx {
                for p2 in 0..nx {
                    let row = p1 * nx + p2;
                    let diag = stiff(p1) / grid.wx[p1] + stiff(p2) / grid.wx[p2];
                    band.set(row, row, C64::new(diag, 0.0) + w);
                    if p2 + 1 < nx {
                        let v = C64::new(
                            -1.0 / grid.h_x / (grid.wx[p2] * grid.wx[p2 + 1]).sqrt(),
                            0.0,
                        );
                        band.set(row, row + 1, v);
                        band.set(row + 1, row, v);
                    }
                    if p1 + 1 < nx {
                        let v = C64::new(
                            -1.0 / grid.h_x / (grid.wx[p1] * grid.wx[p1 + 1]).sqrt(),
                            0.0,
                        );
                        band.set(row, row + nx, v);
                        band.set(row + nx, row, v);
                    }
                }
            }
        }
    }
    let lu = BandLu::factor(&band)?;
    Ok(lu.solve(b))
}

/// Apply the truncated mode-sum resolvent `(S - λ)^{-1}` (constant coupling)
/// to a vector in S-coordinates.  `j_trunc` is the highest retained mode
/// index; pass `n_u - 1` for the full (untruncated) resolvent.
pub fn apply_resolvent_modesum(
    h: &DiscretizedHamiltonian,
    rhs: &[C64],
    lambda: C64,
    j_trunc: usize,
) -> Result<Vec<C64>> {
    if h.epsilon != 0.0 {
        return Err(Error::InvalidInput(
            "mode-sum resolvent requires constant coupling (epsilon = 0)".into(),
        ));
    }
    let mu0_sq = crate::transverse::threshold(h.alpha0, h.d);
    let dist = if lambda.re >= mu0_sq {
        lambda.im.abs()
    } else {
        (lambda - C64::new(mu0_sq, 0.0)).norm()
    };
    if dist < 1e-10 * lambda.norm().max(1.0) {
        return Err(Error::OnSpectrum {
            re: lambda.re,
            im: lambda.im,
            dist,
        });
    }
    let grid = &h.grid;
    let nu = grid.n_u();
    let n_long = grid.dim() / nu;
    if rhs.len() != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "rhs has {} entries, grid has {}",
            rhs.len(),
            grid.dim()
        )));
    }
    let basis = discrete_transverse_basis(nu, grid.h_u, h.alpha0)?;
    let j_top = j_trunc.min(nu - 1);
    let mut out = vec![C64::new(0.0, 0.0); grid.dim()];
    let mut b_j = vec![C64::new(0.0, 0.0); n_long];
    for j in 0..=j_top {
        let v = &basis.vectors[j];
        for p in 0..n_long {
            let row = &rhs[p * nu..(p + 1) * nu];
            b_j[p] = dot_bilinear(v, row);
        }
        let shift = basis.mu_sq[j] - lambda;
        let c_j = solve_longitudinal(h, shift, &b_j)?;
        for p in 0..n_long {
            let base = p * nu;
            let cj = c_j[p];
            for q in 0..nu {
                out[base + q] += cj * v[q];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::assemble::assemble_hamiltonian;
    use crate::linalg::vec_norm;
    use crate::profile::PerturbationProfile;
    use crate::WaveguideConfig;
    use std::f64::consts::PI;

    fn const_config(n: u8, alpha0: f64) -> WaveguideConfig {
        let beta = PerturbationProfile::gaussian(n, -1.0 / PI.sqrt(), 1.0, 0.0).unwrap();
        WaveguideConfig::new(n, PI, alpha0, 0.0, beta).unwrap()
    }

    #[test]
    fn transverse_basis_matches_analytic() {
        // discrete transversal eigenvalues approach μ_j² at O(h²)
        let alpha0 = 0.5;
        let d = PI;
        let mut errs = vec![];
        for nu in [33usize, 65] {
            let h = d / (nu - 1) as f64;
            let basis = discrete_transverse_basis(nu, h, alpha0).unwrap();
            let exact = crate::transverse::transversal_eigenvalues(alpha0, d, 3).unwrap();
            let mut worst = 0.0f64;
            for (j, m) in exact.iter().enumerate() {
                worst = worst.max((basis.mu_sq[j] - C64::new(m.mu_sq, 0.0)).norm());
            }
            errs.push(worst);
        }
        assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
        // biorthogonality: v_i^T v_j = δ
        let basis = discrete_transverse_basis(33, PI / 32.0, 0.5).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let g = dot_bilinear(&basis.vectors[i], &basis.vectors[j]);
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((g - C64::new(t, 0.0)).norm() < 1e-10, "({i},{j}): {g}");
            }
        }
    }

    #[test]
    fn toeplitz_green_matches_banded() {
        let n = 50;
        let h = 0.1;
        for w in [C64::new(1.3, 0.0), C64::new(0.4, -0.8), C64::new(2.0, 3.0)] {
            let b: Vec<C64> = (0..n)
                .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let x = toeplitz_green_solve(&b, h, w).unwrap();
            // dense check: (S_x + w) x = b
            let mut band = BandMat::zeros(n, 1, 1);
            for p in 0..n {
                band.set(p, p, C64::new(2.0 / (h * h), 0.0) + w);
                if p + 1 < n {
                    band.set(p, p + 1, C64::new(-1.0 / (h * h), 0.0));
                    band.set(p + 1, p, C64::new(-1.0 / (h * h), 0.0));
                }
            }
            let r = band.matvec(&x);
            let err: f64 = r
                .iter()
                .zip(&b)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-10 * vec_norm(&b), "w={w}: residual {err}");
        }
    }

    #[test]
    fn full_modesum_matches_direct_solve() {
        let cfg = const_config(1, 0.5);
        let h = assemble_hamiltonian(&cfg, 6.0, 0.25, PI / 16.0, EndBc::Dirichlet).unwrap();
        let dim = h.grid.dim();
        let lambda = C64::new(-1.0, 0.0);
        let rhs: Vec<C64> = (0..dim)
            .map(|i| C64::new((i as f64 * 0.17).sin(), (i as f64 * 0.059).cos() * 0.3))
            .collect();
        let x_modes = apply_resolvent_modesum(&h, &rhs, lambda, h.grid.n_u() - 1).unwrap();
        // direct banded solve of (S - λ) x = rhs
        let mut shifted = h.band.clone();
        for i in 0..dim {
            let v = shifted.get(i, i) - lambda;
            shifted.set(i, i, v);
        }
        let lu = BandLu::factor(&shifted).unwrap();
        let x_direct = lu.solve(&rhs);
        let diff: f64 = x_modes
            .iter()
            .zip(&x_direct)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / vec_norm(&x_direct);
        assert!(diff < 1e-10, "relative difference {diff}");
    }

    #[test]
    fn modesum_roundtrip_and_mode_confinement() {
        let cfg = const_config(1, 0.5);
        let h = assemble_hamiltonian(&cfg, 6.0, 0.5, PI / 8.0, EndBc::Dirichlet).unwrap();
        let dim = h.grid.dim();
        let nu = h.grid.n_u();
        let lambda = C64::new(-0.7, 0.2);
        // rhs = (S - λ) v for a smooth v: resolvent round-trips to v
        let v: Vec<C64> = (0..dim)
            .map(|i| {
                let x = h.grid.x_of(i)[0];
                let u = h.grid.u_nodes[i % nu];
                C64::new((-(x * x) / 4.0).exp() * (1.0 + 0.2 * u), 0.1 * u)
            })
            .collect();
        let mut rhs = h.apply(&v);
        for i in 0..dim {
            rhs[i] -= lambda * v[i];
        }
        let back = apply_resolvent_modesum(&h, &rhs, lambda, nu - 1).unwrap();
        let err: f64 = back
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / vec_norm(&v);
        assert!(err < 1e-9, "round trip error {err}");

        // rhs concentrated in discrete mode 0 stays in mode 0
        let basis = discrete_transverse_basis(nu, h.grid.h_u, 0.5).unwrap();
        let n_long = dim / nu;
        let mut rhs0 = vec![C64::new(0.0, 0.0); dim];
        for p in 0..n_long {
            let amp = C64::new((-((p as f64) - (n_long as f64) / 2.0).powi(2) / 9.0).exp(), 0.0);
            for q in 0..nu {
                rhs0[p * nu + q] = amp * basis.vectors[0][q];
            }
        }
        let out = apply_resolvent_modesum(&h, &rhs0, lambda, nu - 1).unwrap();
        // project the output onto higher modes: everything should sit in j=0
        for p in [0usize, n_long / 2] {
            for j in 1..5 {
                let c = dot_bilinear(&basis.vectors[j], &out[p * nu..(p + 1) * nu]);
                assert!(c.norm() < 1e-10, "leak into mode {j}: {c}");
            }
        }
    }

    #[test]
    fn rejects_spectrum_and_perturbed() {
        let cfg = const_config(1, 0.5);
        let h = assemble_hamiltonian(&cfg, 4.0, 0.5, PI / 8.0, EndBc::Dirichlet).unwrap();
        let rhs = vec![C64::new(1.0, 0.0); h.grid.dim()];
        assert!(matches!(
            apply_resolvent_modesum(&h, &rhs, C64::new(0.5, 0.0), 7),
            Err(Error::OnSpectrum { .. })
        ));
        let beta = PerturbationProfile::gaussian(1, -1.0 / PI.sqrt(), 1.0, 0.0).unwrap();
        let pert = WaveguideConfig::new(1, PI, 0.5, 0.1, beta).unwrap();
        let hp = assemble_hamiltonian(&pert, 4.0, 0.5, PI / 8.0, EndBc::Dirichlet).unwrap();
        assert!(apply_resolvent_modesum(&hp, &rhs, C64::new(-1.0, 0.0), 7).is_err());
    }

    #[test]
    fn layer_modesum_roundtrip() {
        let cfg = const_config(2, 0.5);
        let h = assemble_hamiltonian(&cfg, 2.0, 0.5, PI / 6.0, EndBc::Dirichlet).unwrap();
        let dim = h.grid.dim();
        let nu = h.grid.n_u();
        let lambda = C64::new(-0.9, 0.0);
        let v: Vec<C64> = (0..dim)
            .map(|i| {
                let xs = h.grid.x_of(i);
                let u = h.grid.u_nodes[i % nu];
                C64::new(
                    (-(xs[0] * xs[0] + xs[1] * xs[1]) / 2.0).exp(),
                    0.05 * u,
                )
            })
            .collect();
        let mut rhs = h.apply(&v);
        for i in 0..dim {
            rhs[i] -= lambda * v[i];
        }
        let back = apply_resolvent_modesum(&h, &rhs, lambda, nu - 1).unwrap();
        let err: f64 = back
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / vec_norm(&v);
        assert!(err < 1e-9, "layer round trip error {err}");
    }
}
