//! Quadrature rules: Gauss–Legendre nodes/weights, composite cubic weights
//! on uniform grids, and product-integration weights for exponential
//! kernels `e^{-κ|x-y|}` whose derivative kink sits on grid nodes.

use crate::{C64, Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' at x
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        xs.iter().map(|x| mid + half * x).collect(),
        ws.iter().map(|w| w * half).collect(),
    )
}

/// Quadrature grid on the transversal interval `(0, d)`.
#[derive(Debug, Clone)]
pub struct UGrid {
    pub d: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UGrid {
    pub fn gauss(d: f64, order: usize) -> Self {
        let (nodes, weights) = gauss_legendre_on(0.0, d, order);
        Self { d, nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Integral of the Lagrange basis of the 4-point stencil `ts` over `[0, 1]`
/// (panel-local coordinates).  Exact via 4-point Gauss.
fn panel_lagrange_weights(ts: [f64; 4]) -> [f64; 4] {
    let (gx, gw) = gauss_legendre_on(0.0, 1.0, 4);
    let mut out = [0.0; 4];
    for (j, w) in out.iter_mut().enumerate() {
        for (x, gwx) in gx.iter().zip(gw.iter()) {
            let mut l = 1.0;
            for (m, tm) in ts.iter().enumerate() {
                if m != j {
                    l *= (x - tm) / (ts[j] - tm);
                }
            }
            *w += gwx * l;
        }
    }
    out
}

/// Weights of the composite piecewise-cubic rule on a uniform grid of `n`
/// nodes with spacing `h` (`n ≥ 4`): integrating the cubic interpolant of
/// the samples reproduces smooth integrals to O(h⁴).
pub fn composite_cubic_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 4, "composite cubic rule needs at least 4 nodes");
    let mut w = vec![0.0; n];
    for panel in 0..n - 1 {
        let s0 = panel.saturating_sub(1).min(n - 4);
        let ts = [
            s0 as f64 - panel as f64,
            s0 as f64 + 1.0 - panel as f64,
            s0 as f64 + 2.0 - panel as f64,
            s0 as f64 + 3.0 - panel as f64,
        ];
        let pw = panel_lagrange_weights(ts);
        for j in 0..4 {
            w[s0 + j] += h * pw[j];
        }
    }
    w
}

/// Monomial moments `E_m(c) = ∫₀¹ e^{c t} t^m dt` for m = 0..3, with a series
/// branch for small |c| to avoid cancellation.
pub fn exp_moments(c: C64) -> [C64; 4] {
    let one = C64::new(1.0, 0.0);
    if c.norm() < 0.5 {
        let mut out = [C64::new(0.0, 0.0); 4];
        for (m, o) in out.iter_mut().enumerate() {
            let mut term = one / (m as f64 + 1.0);
            let mut acc = term;
            let mut s = 1.0;
            loop {
                term *= c * ((m as f64 + s) / (s * (m as f64 + s + 1.0)));
                acc += term;
                s += 1.0;
                if term.norm() < 1e-18 * acc.norm().max(1e-300) || s > 60.0 {
                    break;
                }
            }
            *o = acc;
        }
        return out;
    }
    let e = c.exp();
    let e0 = (e - one) / c;
    let e1 = (e * (c - one) + one) / (c * c);
    let e2 = (e * (c * c - c * 2.0 + 2.0) - 2.0) / (c * c * c);
    let e3 = (e * (c * c * c - c * c * 3.0 + c * 6.0 - 6.0) + 6.0) / (c * c * c * c);
    [e0, e1, e2, e3]
}

/// Product-integration weights for an exponential kernel on a uniform grid.
///
/// Returns the dense matrix `W` with
/// `Σ_q W[p][q] g(x_q) ≈ ∫ K(x_p, y) g(y) dy` where `K = e^{-κ|x-y|}`
/// (`deriv = false`) or `K = sgn(x-y) e^{-κ|x-y|}` (`deriv = true`), `g`
/// replaced panel-wise by its cubic interpolant.  The kernel's kink at
/// `y = x_p` always falls on a panel boundary, so the only error is cubic
/// interpolation of `g`: O(h⁴).
///
/// Requires `Re κ ≥ -30 / (n·h)` so the growing exponential stays bounded on
/// the grid.
pub fn exp_product_weights(kappa: C64, n: usize, h: f64, deriv: bool) -> Result<Vec<Vec<C64>>> {
    assert!(n >= 4);
    let span = (n - 1) as f64 * h;
    if kappa.re * span < -30.0 {
        return Err(Error::DomainError(format!(
            "exp_product_weights: Re kappa = {} too negative for span {}",
            kappa.re, span
        )));
    }
    let c = kappa * h;
    let em_plus = exp_moments(c); // ∫ e^{+c t} t^m
    let em_minus = exp_moments(-c); // ∫ e^{-c t} t^m
    // decay factors e^{-c ℓ} for lags ℓ = 0..n-1
    let mut decay = vec![C64::new(1.0, 0.0); n];
    let fac = (-c).exp();
    for l in 1..n {
        decay[l] = decay[l - 1] * fac;
    }
    let mut w = vec![vec![C64::new(0.0, 0.0); n]; n];
    for panel in 0..n - 1 {
        let s0 = panel.saturating_sub(1).min(n - 4);
        let ts = [
            s0 as f64 - panel as f64,
            (s0 + 1) as f64 - panel as f64,
            (s0 + 2) as f64 - panel as f64,
            (s0 + 3) as f64 - panel as f64,
        ];
        // cubic Lagrange coefficients: values at stencil -> monomial coeffs
        // M[m][j]: coefficient of t^m in basis function j
        let mut mm = [[0.0f64; 4]; 4];
        for j in 0..4 {
            // expand ∏_{m≠j} (t - ts[m]) / (ts[j] - ts[m])
            let mut poly = [1.0, 0.0, 0.0, 0.0];
            let mut deg = 0;
            let mut denom = 1.0;
            for m in 0..4 {
                if m == j {
                    continue;
                }
                denom *= ts[j] - ts[m];
                // poly *= (t - ts[m])
                let mut next = [0.0; 4];
                for k in 0..=deg {
                    next[k + 1] += poly[k];
                    next[k] += -ts[m] * poly[k];
                }
                deg += 1;
                poly = next;
            }
            for m in 0..4 {
                mm[m][j] = poly[m] / denom;
            }
        }
        for p in 0..n {
            // moments I_m = ∫₀¹ K(x_p, x_panel + t h) t^m dt (times sign), x h
            let (sign, moments): (f64, &[C64; 4]) = if p as i64 >= panel as i64 + 1 {
                (1.0, &em_plus) // y below x_p: e^{-c(p-panel)} e^{+c t}
            } else {
                (-1.0, &em_minus) // y above x_p
            };
            let lag = if p >= panel + 1 { p - panel } else { panel - p };
            let base = if p >= panel + 1 {
                decay[lag]
            } else {
                // e^{+c (p-panel)} = e^{-c (panel-p)}
                decay[lag]
            };
            let s = if deriv { sign } else { 1.0 };
            for j in 0..4 {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..4 {
                    if mm[m][j] != 0.0 {
                        acc += moments[m] * mm[m][j];
                    }
                }
                w[p][s0 + j] += base * acc * (h * s);
            }
        }
    }
    Ok(w)
}

/// Product-integration weights for the kernel `|x - y|` on a uniform grid
/// (cubic interpolation of the density, kink on nodes): the k → 0 limit of
/// the regularized lowest-mode kernel up to the factor -1/2.
pub fn abs_product_weights(n: usize, h: f64) -> Vec<Vec<f64>> {
    assert!(n >= 4);
    let mut w = vec![vec![0.0; n]; n];
    // moments ∫₀¹ |lag - t| t^m dt for integer lag
    let moment = |lag: i64, m: usize| -> f64 {
        let mf = m as f64;
        if lag >= 1 {
            lag as f64 / (mf + 1.0) - 1.0 / (mf + 2.0)
        } else {
            -(lag as f64) / (mf + 1.0) + 1.0 / (mf + 2.0)
        }
    };
    for panel in 0..n - 1 {
        let s0 = panel.saturating_sub(1).min(n - 4);
        let ts = [
            s0 as f64 - panel as f64,
            (s0 + 1) as f64 - panel as f64,
            (s0 + 2) as f64 - panel as f64,
            (s0 + 3) as f64 - panel as f64,
        ];
        let mut mm = [[0.0f64; 4]; 4];
        for j in 0..4 {
            let mut poly = [1.0, 0.0, 0.0, 0.0];
            let mut deg = 0;
            let mut denom = 1.0;
            for m in 0..4 {
                if m == j {
                    continue;
                }
                denom *= ts[j] - ts[m];
                let mut next = [0.0; 4];
                for k in 0..=deg {
                    next[k + 1] += poly[k];
                    next[k] += -ts[m] * poly[k];
                }
                deg += 1;
                poly = next;
            }
            for m in 0..4 {
                mm[m][j] = poly[m] / denom;
            }
        }
        for p in 0..n {
            let lag = p as i64 - panel as i64;
            for j in 0..4 {
                let mut acc = 0.0;
                for m in 0..4 {
                    if mm[m][j] != 0.0 {
                        acc += moment(lag, m) * mm[m][j];
                    }
                }
                // kernel scale h·|lag - t| and measure h dt
                w[p][s0 + j] += acc * h * h;
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_weights_match_reference() {
        let l = 3.0;
        let n = 61;
        let h = 2.0 * l / (n - 1) as f64;
        let w = abs_product_weights(n, h);
        let g = |y: f64| (-(y * y)).exp() * (1.0 + y);
        for &p in &[0usize, 20, 30, 45] {
            let xp = -l + p as f64 * h;
            let num: f64 = (0..n).map(|q| w[p][q] * g(-l + q as f64 * h)).sum();
            let mut reference = 0.0;
            for (a, b) in [(-l, xp), (xp, l)] {
                if (b - a).abs() < 1e-14 {
                    continue;
                }
                let (xs, ws) = gauss_legendre_on(a, b, 100);
                for (y, wy) in xs.iter().zip(&ws) {
                    reference += (xp - y).abs() * g(*y) * wy;
                }
            }
            assert!(
                (num - reference).abs() < 1e-5 * (1.0 + reference.abs()),
                "p={p}: {num} vs {reference}"
            );
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [2usize, 5, 16, 84] {
            let (xs, ws) = gauss_legendre(n);
            // exact for degree 2n-1
            for k in (0..2 * n).step_by(3) {
                let num: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!(
                    (num - exact).abs() < 1e-12 * (1.0 + exact.abs()),
                    "n={n} k={k}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn gauss_legendre_oscillatory() {
        // ∫₀^π cos(20 u) e^u du, order high enough for spectral accuracy
        let (xs, ws) = gauss_legendre_on(0.0, std::f64::consts::PI, 80);
        let num: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(x, w)| w * (20.0 * x).cos() * x.exp())
            .sum();
        // antiderivative e^u (cos 20u + 20 sin 20u)/401
        let f = |u: f64| u.exp() * ((20.0 * u).cos() + 20.0 * (20.0 * u).sin()) / 401.0;
        let exact = f(std::f64::consts::PI) - f(0.0);
        assert!((num - exact).abs() < 1e-11);
    }

    #[test]
    fn composite_cubic_is_h4() {
        let f = |x: f64| (1.3 * x).sin() * (-0.3 * x).exp();
        let exact = {
            // ∫₀^5 via very fine GL
            let (xs, ws) = gauss_legendre_on(0.0, 5.0, 200);
            xs.iter().zip(&ws).map(|(x, w)| w * f(*x)).sum::<f64>()
        };
        let mut errs = vec![];
        for n in [81usize, 161] {
            let h = 5.0 / (n - 1) as f64;
            let w = composite_cubic_weights(n, h);
            let num: f64 = (0..n).map(|q| w[q] * f(q as f64 * h)).sum();
            errs.push((num - exact).abs());
        }
        assert!(errs[0] < 1e-6, "{errs:?}");
        // halving h should shrink error by ~16 (asymptotically)
        assert!(errs[1] < errs[0] / 10.0, "{errs:?}");
    }

    #[test]
    fn exp_moments_match_quadrature() {
        for c in [
            C64::new(0.001, 0.0002),
            C64::new(-0.3, 0.1),
            C64::new(2.0, -1.0),
            C64::new(-6.0, 3.0),
        ] {
            let em = exp_moments(c);
            let (xs, ws) = gauss_legendre_on(0.0, 1.0, 40);
            for m in 0..4 {
                let num: C64 = xs
                    .iter()
                    .zip(&ws)
                    .map(|(x, w)| (c * x).exp() * x.powi(m as i32) * *w)
                    .sum();
                assert!(
                    (num - em[m]).norm() < 1e-13 * (1.0 + num.norm()),
                    "c={c} m={m}"
                );
            }
        }
    }

    #[test]
    fn product_weights_reproduce_kernel_integrals() {
        // ∫_{-L}^{L} e^{-κ|x-y|} g(y) dy against adaptive-fine GL reference
        let l = 4.0;
        let n = 81;
        let h = 2.0 * l / (n - 1) as f64;
        let g = |y: f64| (-(y * y) / 2.0).exp() * (1.0 + 0.3 * y);
        for kappa in [C64::new(0.8, 0.0), C64::new(0.05, 0.4), C64::new(2.5, -0.7)] {
            let w = exp_product_weights(kappa, n, h, false).unwrap();
            let wd = exp_product_weights(kappa, n, h, true).unwrap();
            for &p in &[0usize, 17, 40, 63, n - 1] {
                let xp = -l + p as f64 * h;
                let num: C64 = (0..n)
                    .map(|q| w[p][q] * g(-l + q as f64 * h))
                    .sum();
                let numd: C64 = (0..n)
                    .map(|q| wd[p][q] * g(-l + q as f64 * h))
                    .sum();
                // reference: split at xp, high-order GL on each side
                let mut refv = C64::new(0.0, 0.0);
                let mut refd = C64::new(0.0, 0.0);
                for (a, b) in [(-l, xp), (xp, l)] {
                    if (b - a).abs() < 1e-14 {
                        continue;
                    }
                    let (xs, ws) = gauss_legendre_on(a, b, 120);
                    for (y, wy) in xs.iter().zip(&ws) {
                        let ker = (-kappa * (xp - y).abs()).exp();
                        refv += ker * g(*y) * *wy;
                        refd += ker * g(*y) * *wy * (xp - y).signum();
                    }
                }
                assert!(
                    (num - refv).norm() < 2e-6 * (1.0 + refv.norm()),
                    "kappa={kappa} p={p}: {num} vs {refv}"
                );
                assert!(
                    (numd - refd).norm() < 2e-6 * (1.0 + refd.norm()),
                    "deriv kappa={kappa} p={p}: {numd} vs {refd}"
                );
            }
        }
    }
}
