//! Discretization of the Birman–Schwinger operator.
//!
//! All operator work happens in the mode × longitudinal-grid representation:
//! a field is a vector of coefficients `f_j(x_p)` against the transversal
//! basis `ψ_j`.  On that space the resolvent is mode-diagonal with explicit
//! longitudinal kernels, and the gauge perturbation `Z_ε` becomes a small
//! family of mode-coupling tables (moments of u and ∂_u against the
//! biorthogonal pairing) times pointwise β factors.  Longitudinal integrals
//! use product-integration weights (strip) or composite Gauss panels
//! (layer), and derivatives never touch the unknown: `∂_x` is integrated by
//! parts onto the kernel and β, `∂_u` turns into the mode table.
//!
//! Two operators are exposed:
//! * [`scalar_bs_matrix`] — `ε R Z_ε` (or its regular part `ε(N+R⊥)Z_ε`),
//!   acting on scalar fields.  It shares its nonzero spectrum with the
//!   (2n+3)-component `K_ε^λ = ε D R C_ε*` (AB versus BA), which is what
//!   the eigenvalue-near(-1) computation uses.
//! * [`assemble_bs_operator`] — the (2n+3)-component matrix itself for the
//!   strip; for the layer the rotational reduction of the scalar form is
//!   returned (the Cartesian component operator is not rotationally
//!   diagonal, the scalar reduction carries the same nonzero spectrum).

use crate::config::WaveguideConfig;
use crate::kernels::SpectralVariable;
use crate::linalg::{power_iteration, CMat};
use crate::profile::PerturbationProfile;
use crate::quad::{
    abs_product_weights, composite_cubic_weights, exp_product_weights, gauss_legendre_on,
    UGrid,
};
use crate::special::{bessel_i0, bessel_i1, bessel_k, k0_plus_ln};
use crate::transverse::{eval_psi, eval_psi_prime, transversal_eigenvalues, TransversalMode};
use crate::{C64, Error, Result};

/// Which part of the Birman–Schwinger operator to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsParts {
    /// L + N + R⊥ (diverges at k = 0).
    Full,
    /// The regular part M = N + R⊥ only; finite through k = 0.
    MOnly,
}

/// Discretization parameters for the Birman–Schwinger operators.
#[derive(Debug, Clone, Copy)]
pub struct BsDiscretization {
    /// Number of transversal modes retained (lowest included).
    pub j_modes: usize,
    /// Longitudinal nodes (strip: uniform grid; layer: rounded up to full
    /// Gauss panels).
    pub n_x: usize,
    /// Longitudinal half-width (strip) or radius (layer); 0 = automatic
    /// from the profile support.
    pub l: f64,
    /// Gauss order for the transversal moment tables; 0 = automatic.
    pub quad_order_u: usize,
}

impl Default for BsDiscretization {
    fn default() -> Self {
        Self {
            j_modes: 11,
            n_x: 97,
            l: 0.0,
            quad_order_u: 0,
        }
    }
}

/// Transversal moment tables against the biorthogonal pairing.
pub(crate) struct ModeTables {
    pub modes: Vec<TransversalMode>,
    /// `U1[k][j] = (φ_k, u ψ_j)`
    pub u1: CMat,
    /// `U2[k][j] = (φ_k, u² ψ_j)`
    pub u2: CMat,
    /// `UD[k][j] = (φ_k, ψ_j')`
    pub ud: CMat,
    /// `T0[j] = ∫ ψ₀ ψ_j du` and the u, u², ∂_u variants
    pub t0: Vec<C64>,
    pub t1: Vec<C64>,
    pub t2: Vec<C64>,
    pub td: Vec<C64>,
}

fn mode_tables(
    alpha0: f64,
    d: f64,
    j_modes: usize,
    quad_order: usize,
) -> Result<ModeTables> {
    let modes = transversal_eigenvalues(alpha0, d, j_modes - 1)?;
    let order = if quad_order == 0 {
        4 * (j_modes + 2)
    } else {
        quad_order
    };
    let grid = UGrid::gauss(d, order);
    let nq = grid.len();
    let m = j_modes;
    let mut psi = vec![vec![C64::new(0.0, 0.0); nq]; m];
    let mut dpsi = vec![vec![C64::new(0.0, 0.0); nq]; m];
    for (j, mode) in modes.iter().enumerate() {
        for (q, u) in grid.nodes.iter().enumerate() {
            psi[j][q] = eval_psi(mode, alpha0, *u);
            dpsi[j][q] = eval_psi_prime(mode, alpha0, *u);
        }
    }
    let mut u1 = CMat::zeros(m, m);
    let mut u2 = CMat::zeros(m, m);
    let mut ud = CMat::zeros(m, m);
    for k in 0..m {
        let ak = modes[k].a_norm;
        for j in 0..m {
            let mut s1 = C64::new(0.0, 0.0);
            let mut s2 = C64::new(0.0, 0.0);
            let mut sd = C64::new(0.0, 0.0);
            for q in 0..nq {
                let w = grid.weights[q];
                let base = psi[k][q] * psi[j][q] * w;
                s1 += base * grid.nodes[q];
                s2 += base * grid.nodes[q] * grid.nodes[q];
                sd += psi[k][q] * dpsi[j][q] * w;
            }
            u1[(k, j)] = ak * s1;
            u2[(k, j)] = ak * s2;
            ud[(k, j)] = ak * sd;
        }
    }
    let mut t0 = vec![C64::new(0.0, 0.0); m];
    let mut t1 = t0.clone();
    let mut t2 = t0.clone();
    let mut td = t0.clone();
    for j in 0..m {
        for q in 0..nq {
            let w = grid.weights[q];
            let base = psi[0][q] * psi[j][q] * w;
            t0[j] += base;
            t1[j] += base * grid.nodes[q];
            t2[j] += base * grid.nodes[q] * grid.nodes[q];
            td[j] += psi[0][q] * dpsi[j][q] * w;
        }
    }
    Ok(ModeTables {
        modes,
        u1,
        u2,
        ud,
        t0,
        t1,
        t2,
        td,
    })
}

/// Everything needed to apply `ε R Z_ε` at one spectral point.
pub(crate) struct BsWorkspace {
    pub epsilon: f64,
    pub j_modes: usize,
    pub n_x: usize,
    /// longitudinal nodes (kept for diagnostics and tests)
    #[allow(dead_code)]
    pub xs: Vec<f64>,
    /// plain integration weights (strip) or Gauss weights × r (layer)
    pub wbase: Vec<f64>,
    pub beta_v: Vec<f64>,
    pub gr_v: Vec<f64>,
    pub ht_v: Vec<f64>,
    pub gr2_v: Vec<f64>,
    pub tables: ModeTables,
    /// kernel weights per mode: `Σ_q wm[j][p][q] f(x_q) ≈ (R_j f)(x_p)`
    pub wm: Vec<Vec<Vec<C64>>>,
    /// ∂_{x'}-kernel weights per mode (by-parts companion)
    pub dm: Vec<Vec<Vec<C64>>>,
}

fn resolve_box(disc: &BsDiscretization, beta: &PerturbationProfile) -> f64 {
    if disc.l > 0.0 {
        disc.l
    } else {
        beta.support_halfwidth(1e-12) + 1.0
    }
}

pub(crate) fn build_workspace(
    sv: &SpectralVariable,
    config: &WaveguideConfig,
    disc: &BsDiscretization,
    parts: BsParts,
) -> Result<BsWorkspace> {
    if sv.n != config.n {
        return Err(Error::InvalidInput(format!(
            "spectral variable dimension {} does not match config {}",
            sv.n, config.n
        )));
    }
    let beta = config.beta.centered();
    let tables = mode_tables(config.alpha0, config.d, disc.j_modes, disc.quad_order_u)?;
    // dropped modes must stay dissipative at this λ
    let mu_top = tables.modes.last().unwrap().mu_sq;
    if sv.lambda.re >= mu_top {
        return Err(Error::InvalidInput(format!(
            "Re lambda = {} reaches the truncated mode band starting at {mu_top}; raise j_modes",
            sv.lambda.re
        )));
    }
    match config.n {
        1 => build_workspace_strip(sv, config, &beta, disc, parts, tables),
        2 => build_workspace_layer(sv, config, &beta, disc, parts, tables),
        n => Err(Error::InvalidInput(format!("bs operators need n = 1|2, got {n}"))),
    }
}

fn build_workspace_strip(
    sv: &SpectralVariable,
    config: &WaveguideConfig,
    beta: &PerturbationProfile,
    disc: &BsDiscretization,
    parts: BsParts,
    tables: ModeTables,
) -> Result<BsWorkspace> {
    let l = resolve_box(disc, beta);
    let n_x = disc.n_x.max(8);
    let h = 2.0 * l / (n_x - 1) as f64;
    let xs: Vec<f64> = (0..n_x).map(|p| -l + p as f64 * h).collect();
    let wbase = composite_cubic_weights(n_x, h);
    let (beta_v, gr_v, ht_v, gr2_v) = sample_profile(beta, &xs);

    let m = disc.j_modes;
    let mut wm = Vec::with_capacity(m);
    let mut dm = Vec::with_capacity(m);
    for j in 0..m {
        if j == 0 {
            let k0 = sv.w0();
            let dgrid = exp_product_weights(k0, n_x, h, true)?;
            let d0: Vec<Vec<C64>> = dgrid
                .iter()
                .map(|row| row.iter().map(|v| v * 0.5).collect())
                .collect();
            let w0 = match parts {
                BsParts::Full => {
                    if k0.norm() < 1e-300 {
                        return Err(Error::ThresholdSingularity);
                    }
                    let wgrid = exp_product_weights(k0, n_x, h, false)?;
                    wgrid
                        .iter()
                        .map(|row| row.iter().map(|v| v / (k0 * 2.0)).collect())
                        .collect()
                }
                BsParts::MOnly => {
                    if k0.norm() < 1e-8 {
                        // k -> 0 limit: kernel -(|x-y|)/2
                        let absw = abs_product_weights(n_x, h);
                        absw.iter()
                            .map(|row| row.iter().map(|v| C64::new(-0.5 * v, 0.0)).collect())
                            .collect()
                    } else {
                        let wgrid = exp_product_weights(k0, n_x, h, false)?;
                        let mut out = vec![vec![C64::new(0.0, 0.0); n_x]; n_x];
                        for p in 0..n_x {
                            for q in 0..n_x {
                                out[p][q] =
                                    (wgrid[p][q] - C64::new(wbase[q], 0.0)) / (k0 * 2.0);
                            }
                        }
                        out
                    }
                }
            };
            wm.push(w0);
            dm.push(d0);
        } else {
            let kappa = sv.kappa(tables.modes[j].mu_sq);
            let wgrid = exp_product_weights(kappa, n_x, h, false)?;
            let dgrid = exp_product_weights(kappa, n_x, h, true)?;
            wm.push(
                wgrid
                    .iter()
                    .map(|row| row.iter().map(|v| v / (kappa * 2.0)).collect())
                    .collect(),
            );
            dm.push(
                dgrid
                    .iter()
                    .map(|row| row.iter().map(|v| v * 0.5).collect())
                    .collect(),
            );
        }
    }
    Ok(BsWorkspace {
        epsilon: config.epsilon,
        j_modes: m,
        n_x,
        xs,
        wbase,
        beta_v,
        gr_v,
        ht_v,
        gr2_v,
        tables,
        wm,
        dm,
    })
}

fn build_workspace_layer(
    sv: &SpectralVariable,
    config: &WaveguideConfig,
    beta: &PerturbationProfile,
    disc: &BsDiscretization,
    parts: BsParts,
    tables: ModeTables,
) -> Result<BsWorkspace> {
    if sv.k.im != 0.0 || sv.k.re > 0.0 {
        return Err(Error::InvalidInput(format!(
            "the layer path is restricted to real k ≤ 0 (PT-real roots), got {}",
            sv.k
        )));
    }
    let r_max = resolve_box(disc, beta);
    // composite Gauss panels, 6 nodes each
    let gl_per_panel = 6usize;
    let n_panels = disc.n_x.div_ceil(gl_per_panel).max(4);
    let n_x = n_panels * gl_per_panel;
    let mut xs = Vec::with_capacity(n_x);
    let mut wbase = Vec::with_capacity(n_x);
    for panel in 0..n_panels {
        let a = r_max * panel as f64 / n_panels as f64;
        let b = r_max * (panel + 1) as f64 / n_panels as f64;
        let (nodes, weights) = gauss_legendre_on(a, b, gl_per_panel);
        for (r, w) in nodes.iter().zip(&weights) {
            xs.push(*r);
            wbase.push(w * r); // radial measure r dr (angular 2π folded in G)
        }
    }
    let (beta_v, gr_v, ht_v, gr2_v) = sample_profile_radial(beta, &xs);

    let m = disc.j_modes;
    let w0 = sv.w0().re; // e^{1/k}, real on this path
    let mut wm = Vec::with_capacity(m);
    let mut dm = Vec::with_capacity(m);
    for j in 0..m {
        let mut wj = vec![vec![C64::new(0.0, 0.0); n_x]; n_x];
        let mut dj = vec![vec![C64::new(0.0, 0.0); n_x]; n_x];
        if j == 0 {
            for p in 0..n_x {
                for q in 0..n_x {
                    let (rl, rg) = (xs[p].min(xs[q]), xs[p].max(xs[q]));
                    let kernel = layer_regular_kernel(w0, sv.k.re, rl, rg)?;
                    wj[p][q] = C64::new(kernel * wbase[q], 0.0);
                    dj[p][q] = C64::new(layer_deriv_kernel(w0, xs[p], xs[q])? * wbase[q], 0.0);
                }
            }
            if matches!(parts, BsParts::Full) {
                if sv.k.norm() == 0.0 {
                    return Err(Error::ThresholdSingularity);
                }
                let lcoef = -1.0 / sv.k.re;
                for p in 0..n_x {
                    for q in 0..n_x {
                        wj[p][q] += C64::new(lcoef * wbase[q], 0.0);
                    }
                }
            }
        } else {
            let kappa = sv.kappa(tables.modes[j].mu_sq);
            if kappa.im != 0.0 {
                return Err(Error::InvalidInput(
                    "layer path needs real lambda below the mode band".into(),
                ));
            }
            let kap = kappa.re;
            for p in 0..n_x {
                for q in 0..n_x {
                    let (rl, rg) = (xs[p].min(xs[q]), xs[p].max(xs[q]));
                    let kernel = bessel_i0(kap * rl) * bessel_k(0, kap * rg)?;
                    wj[p][q] = C64::new(kernel * wbase[q], 0.0);
                    dj[p][q] = C64::new(deriv_ik_kernel(kap, xs[p], xs[q])? * wbase[q], 0.0);
                }
            }
        }
        wm.push(wj);
        dm.push(dj);
    }
    Ok(BsWorkspace {
        epsilon: config.epsilon,
        j_modes: m,
        n_x,
        xs,
        wbase,
        beta_v,
        gr_v,
        ht_v,
        gr2_v,
        tables,
        wm,
        dm,
    })
}

/// `I₀(w₀ r_<) K₀(w₀ r_>) + ln w₀`, evaluated stably down to w₀ = 0
/// (limit `ln 2 - γ - ln r_>`).
fn layer_regular_kernel(w0: f64, k: f64, r_lo: f64, r_hi: f64) -> Result<f64> {
    if w0 == 0.0 {
        return Ok(2.0f64.ln() - crate::special::EULER_GAMMA - r_hi.ln());
    }
    let i0 = bessel_i0(w0 * r_lo);
    let a = k0_plus_ln(w0 * r_hi)?;
    // I₀ (A - ln r_>) - (I₀ - 1)/k  with 1/k = ln w₀
    let i0m1 = i0 - 1.0;
    Ok(i0 * (a - r_hi.ln()) - i0m1 * (1.0 / k))
}

/// `∂_{r'} [I₀(κ r_<) K₀(κ r_>)]`, with the diagonal averaged across its
/// jump (Wronskian 1/r).
fn deriv_ik_kernel(kappa: f64, r: f64, r_prime: f64) -> Result<f64> {
    if r_prime < r {
        Ok(kappa * bessel_i1(kappa * r_prime) * bessel_k(0, kappa * r)?)
    } else if r_prime > r {
        Ok(-kappa * bessel_i0(kappa * r) * bessel_k(1, kappa * r_prime)?)
    } else {
        let a = kappa * bessel_i1(kappa * r) * bessel_k(0, kappa * r)?;
        let b = -kappa * bessel_i0(kappa * r) * bessel_k(1, kappa * r)?;
        Ok(0.5 * (a + b))
    }
}

/// ∂-kernel of the layer's regularized lowest mode (the ln w₀ constant
/// drops under differentiation); w₀ → 0 has the finite limit -1/r_> on the
/// outgoing side and 0 on the incoming side.
fn layer_deriv_kernel(w0: f64, r: f64, r_prime: f64) -> Result<f64> {
    if w0 == 0.0 {
        return Ok(if r_prime > r {
            -1.0 / r_prime
        } else if r_prime < r {
            0.0
        } else {
            -0.5 / r
        });
    }
    deriv_ik_kernel(w0, r, r_prime)
}

fn sample_profile(beta: &PerturbationProfile, xs: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut b = Vec::with_capacity(xs.len());
    let mut g = Vec::with_capacity(xs.len());
    let mut ht = Vec::with_capacity(xs.len());
    let mut g2 = Vec::with_capacity(xs.len());
    for &x in xs {
        let pt = [x];
        b.push(beta.eval(&pt));
        let gr = beta.grad(&pt)[0];
        g.push(gr);
        ht.push(beta.hess_trace(&pt));
        g2.push(gr * gr);
    }
    (b, g, ht, g2)
}

fn sample_profile_radial(
    beta: &PerturbationProfile,
    rs: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut b = Vec::with_capacity(rs.len());
    let mut g = Vec::with_capacity(rs.len());
    let mut ht = Vec::with_capacity(rs.len());
    let mut g2 = Vec::with_capacity(rs.len());
    for &r in rs {
        let pt = [r, 0.0];
        b.push(beta.eval(&pt));
        let gr = beta.grad(&pt)[0]; // radial derivative on the axis
        g.push(gr);
        ht.push(beta.hess_trace(&pt));
        g2.push(gr * gr);
    }
    (b, g, ht, g2)
}

impl BsWorkspace {
    pub fn dim(&self) -> usize {
        self.j_modes * self.n_x
    }

    /// Mode-coupling coefficient of `Z_ε` after the ∂_x by-parts:
    /// `zc[k][j](q) = 2iβ UD - i(Δ'β) U1 + εβ² δ + ε|∇β|² U2`, evaluated at
    /// node q.
    fn zc(&self, k: usize, j: usize, q: usize) -> C64 {
        let i = C64::new(0.0, 1.0);
        let mut acc = 2.0 * i * self.beta_v[q] * self.tables.ud[(k, j)]
            - i * self.ht_v[q] * self.tables.u1[(k, j)]
            + self.epsilon * self.gr2_v[q] * self.tables.u2[(k, j)];
        if k == j {
            acc += C64::new(self.epsilon * self.beta_v[q] * self.beta_v[q], 0.0);
        }
        acc
    }

    /// Assemble the scalar operator `ε R Z_ε` (R per the chosen parts).
    pub fn scalar_matrix(&self) -> CMat {
        let m = self.j_modes;
        let nx = self.n_x;
        let mut s = CMat::zeros(m * nx, m * nx);
        let i2 = C64::new(0.0, 2.0);
        for k in 0..m {
            let wmk = &self.wm[k];
            let dmk = &self.dm[k];
            for j in 0..m {
                let u1kj = self.tables.u1[(k, j)];
                for p in 0..nx {
                    let row = k * nx + p;
                    let out = s.row_mut(row);
                    for q in 0..nx {
                        let v = wmk[p][q] * self.zc(k, j, q)
                            - i2 * self.gr_v[q] * dmk[p][q] * u1kj;
                        out[j * nx + q] += v * self.epsilon;
                    }
                }
            }
        }
        s
    }

    /// `ε (N + R⊥) Z_ε φ̄₀` as a coefficient vector: the right-hand side of
    /// the reduced implicit equation.  `Z_ε φ̄₀` needs no by-parts (φ̄₀ is
    /// constant in x): the Δ'β term enters with +i.
    pub fn rhs_from_phi0(&self) -> Vec<C64> {
        let m = self.j_modes;
        let nx = self.n_x;
        let a0 = self.tables.modes[0].a_norm;
        let i = C64::new(0.0, 1.0);
        // (Z_ε φ̄₀)_k(x_q)
        let mut z = vec![vec![C64::new(0.0, 0.0); nx]; m];
        for k in 0..m {
            for q in 0..nx {
                let mut acc = 2.0 * i * self.beta_v[q] * self.tables.ud[(k, 0)]
                    + i * self.ht_v[q] * self.tables.u1[(k, 0)]
                    + self.epsilon * self.gr2_v[q] * self.tables.u2[(k, 0)];
                if k == 0 {
                    acc += C64::new(self.epsilon * self.beta_v[q] * self.beta_v[q], 0.0);
                }
                z[k][q] = a0 * acc;
            }
        }
        let mut rhs = vec![C64::new(0.0, 0.0); m * nx];
        for k in 0..m {
            for p in 0..nx {
                let mut acc = C64::new(0.0, 0.0);
                for q in 0..nx {
                    acc += self.wm[k][p][q] * z[k][q];
                }
                rhs[k * nx + p] = acc * self.epsilon;
            }
        }
        rhs
    }

    /// The final pairing of the implicit equation: `∫_Ω ψ₀ (Z_ε h)` over the
    /// truncated box, with the ∂_x term integrated by parts.  For the layer
    /// the angular factor 2π is folded into the caller's prefactor.
    pub fn pair_with_psi0(&self, h: &[C64]) -> C64 {
        let m = self.j_modes;
        let nx = self.n_x;
        let i = C64::new(0.0, 1.0);
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            for q in 0..nx {
                let cg = 2.0 * i * self.beta_v[q] * self.tables.td[j]
                    - i * self.ht_v[q] * self.tables.t1[j]
                    + self.epsilon * self.beta_v[q] * self.beta_v[q] * self.tables.t0[j]
                    + self.epsilon * self.gr2_v[q] * self.tables.t2[j];
                acc += C64::new(self.wbase[q], 0.0) * cg * h[j * nx + q];
            }
        }
        acc
    }

    /// h = φ̄₀ - v as a coefficient vector, given the correction v.
    pub fn phi0_minus(&self, v: &[C64]) -> Vec<C64> {
        let a0 = self.tables.modes[0].a_norm;
        let mut h = vec![C64::new(0.0, 0.0); self.dim()];
        for q in 0..self.n_x {
            h[q] = a0;
        }
        for (hi, vi) in h.iter_mut().zip(v.iter()) {
            *hi -= vi;
        }
        h
    }
}

/// Dense matrix of the scalar operator `ε R Z_ε` at the spectral point, in
/// the mode × grid representation.  `BsParts::MOnly` drops the rank-one
/// singular term and is regular through k = 0.
pub fn scalar_bs_matrix(
    sv: &SpectralVariable,
    config: &WaveguideConfig,
    disc: &BsDiscretization,
    parts: BsParts,
) -> Result<CMat> {
    Ok(build_workspace(sv, config, disc, parts)?.scalar_matrix())
}

/// The Birman–Schwinger operator on the (2n+3)-component field space
/// (strip); for the layer the scalar rotational reduction is returned, see
/// the module docs.
pub fn assemble_bs_operator(
    sv: &SpectralVariable,
    config: &WaveguideConfig,
    disc: &BsDiscretization,
    parts: BsParts,
) -> Result<CMat> {
    if config.n == 2 {
        return scalar_bs_matrix(sv, config, disc, parts);
    }
    let ws = build_workspace(sv, config, disc, parts)?;
    let m = ws.j_modes;
    let nx = ws.n_x;
    let ncomp = 2 * config.n as usize + 3;
    let dim = ncomp * m * nx;
    let mut k_mat = CMat::zeros(dim, dim);
    let i = C64::new(0.0, 1.0);
    let eps = ws.epsilon;
    let signed_sqrt = |v: f64| v.signum() * v.abs().sqrt();

    // row factors b_i(x_p) and their kernel flavour; col factors a_i'(x_q)
    // with u-power tables
    for icomp in 0..ncomp {
        for kmode in 0..m {
            for p in 0..nx {
                let row = (icomp * m + kmode) * nx + p;
                let b_pref = match icomp {
                    0 => ws.gr_v[p].abs().sqrt(),
                    1 => ws.beta_v[p].abs().sqrt(),
                    2 => ws.ht_v[p].abs().sqrt(),
                    3 => ws.beta_v[p],
                    _ => ws.gr_v[p],
                };
                if b_pref == 0.0 {
                    continue;
                }
                for jcomp in 0..ncomp {
                    for jmode in 0..m {
                        for q in 0..nx {
                            let col = (jcomp * m + jmode) * nx + q;
                            let a_val: C64 = match jcomp {
                                0 => 2.0 * i * signed_sqrt(ws.gr_v[q]),
                                1 => 2.0 * i * signed_sqrt(ws.beta_v[q]),
                                2 => i * signed_sqrt(ws.ht_v[q]),
                                3 => C64::new(eps * ws.beta_v[q], 0.0),
                                _ => C64::new(eps * ws.gr_v[q], 0.0),
                            };
                            if a_val.norm_sqr() == 0.0 {
                                continue;
                            }
                            // Σ_jj C_i[kmode,jj] Ker_i[jj][p][q] Upow_i'[jj,jmode]
                            let mut acc = C64::new(0.0, 0.0);
                            match icomp {
                                1 => {
                                    // ∂_u output: reprojected through UD
                                    for jj in 0..m {
                                        let upow = upow(&ws, jcomp, jj, jmode);
                                        if upow.norm_sqr() == 0.0 {
                                            continue;
                                        }
                                        acc += ws.tables.ud[(kmode, jj)]
                                            * ws.wm[jj][p][q]
                                            * upow;
                                    }
                                }
                                0 => {
                                    // ∂_x kernel = -(∂_{x'} kernel)
                                    acc = -ws.dm[kmode][p][q]
                                        * upow(&ws, jcomp, kmode, jmode);
                                }
                                _ => {
                                    acc = ws.wm[kmode][p][q]
                                        * upow(&ws, jcomp, kmode, jmode);
                                }
                            }
                            k_mat[(row, col)] = eps * b_pref * acc * a_val;
                        }
                    }
                }
            }
        }
    }
    Ok(k_mat)
}

fn upow(ws: &BsWorkspace, jcomp: usize, jj: usize, jmode: usize) -> C64 {
    match jcomp {
        // u-power of the A factor: grads carry u, ∂_u none, Δ'β carries u,
        // β² none, ε-grad² carries u²
        0 | 2 => ws.tables.u1[(jj, jmode)],
        1 | 3 => {
            if jj == jmode {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }
        _ => ws.tables.u2[(jj, jmode)],
    }
}

/// Eigenvalue of the discretized `K_ε^λ` nearest -1, computed by power
/// iteration on the scalar reduction (same nonzero spectrum; the -1 branch
/// dominates every other eigenvalue by a factor ~1/ε near the root).
pub fn bs_eigenvalue_near_minus_one(
    sv: &SpectralVariable,
    config: &WaveguideConfig,
    disc: &BsDiscretization,
) -> Result<C64> {
    let s = scalar_bs_matrix(sv, config, disc, BsParts::Full)?;
    let n = s.nrows();
    let mut apply = |x: &[C64]| s.matvec(x);
    let (lambda, _, residual) = power_iteration(&mut apply, n, 300, 1e-12);
    if residual > 1e-6 * lambda.norm().max(1.0) {
        return Err(Error::ConvergenceFailure(format!(
            "power iteration residual {residual} at eigenvalue {lambda}"
        )));
    }
    Ok(lambda)
}
