//! Assembly of the symmetrized discrete Hamiltonian.

use super::grid::{EndBc, TensorGrid};
use crate::config::WaveguideConfig;
use crate::linalg::BandMat;
use crate::{C64, Result};

/// The discretized operator `S = B^{-1/2} A B^{-1/2}` in banded storage,
/// together with its grid and the boundary coupling sampled on the x-grid.
#[derive(Debug, Clone)]
pub struct DiscretizedHamiltonian {
    pub band: BandMat,
    pub grid: TensorGrid,
    /// α at the longitudinal nodes, flattened like the x-part of the grid.
    pub alpha: Vec<f64>,
    pub alpha0: f64,
    pub d: f64,
    pub epsilon: f64,
}

/// Per-axis stiffness of the 1D second-difference form `Σ |ψ_{i+1}-ψ_i|²/h`:
/// tridiagonal with diagonal `2/h` (interior) or `1/h` (free ends) and
/// off-diagonal `-1/h`.  For eliminated Dirichlet nodes every retained node
/// is "interior".
fn axis_stiffness_diag(i: usize, len: usize, h: f64, free_ends: bool) -> f64 {
    if free_ends && (i == 0 || i == len - 1) {
        1.0 / h
    } else {
        2.0 / h
    }
}

/// Build the discretized Hamiltonian of the perturbed waveguide on a
/// truncated grid.  `l` is the truncation half-length, `end_bc` the
/// artificial condition at |x - c| = l; the transversal Robin rows come from
/// the boundary term of the quadratic form, so no ghost points appear and
/// the adjoint/PT identities hold exactly at the matrix level.
pub fn assemble_hamiltonian(
    config: &WaveguideConfig,
    l: f64,
    h_x: f64,
    h_u: f64,
    end_bc: EndBc,
) -> Result<DiscretizedHamiltonian> {
    let grid = TensorGrid::new(
        config.n,
        config.d,
        config.beta.center(),
        l,
        h_x,
        h_u,
        end_bc,
    )?;
    let nx = grid.n_x();
    let nu = grid.n_u();
    let free_x = matches!(end_bc, EndBc::Neumann);

    // α on the longitudinal nodes
    let alpha: Vec<f64> = match config.n {
        1 => grid.x_nodes.iter().map(|&x| config.alpha_at(&[x])).collect(),
        _ => {
            let mut a = Vec::with_capacity(nx * nx);
            for &x1 in &grid.x_nodes {
                for &x2 in &grid.x_nodes {
                    a.push(config.alpha_at(&[x1, x2]));
                }
            }
            a
        }
    };

    let dim = grid.dim();
    let halfband = match config.n {
        1 => nu,
        _ => nx * nu,
    };
    let mut band = BandMat::zeros(dim, halfband, halfband);

    let mass = |grid: &TensorGrid, p1: usize, p2: usize, q: usize| -> f64 {
        match grid.n {
            1 => grid.wx[p1] * grid.wu[q],
            _ => grid.wx[p1] * grid.wx[p2] * grid.wu[q],
        }
    };

    let n_axes = config.n as usize;
    let px_count = if config.n == 1 { 1 } else { nx };
    for p1 in 0..nx {
        for p2 in 0..px_count {
            for q in 0..nu {
                let row = grid.idx(p1, p2, q);
                let m_row = mass(&grid, p1, p2, q);
                let alpha_here = if config.n == 1 { alpha[p1] } else { alpha[p1 * nx + p2] };

                // diagonal: sum of axis stiffness diagonals times the
                // complementary masses, plus the Robin boundary term
                let mut diag = C64::new(0.0, 0.0);
                // x1 axis
                let sx1 = axis_stiffness_diag(p1, nx, grid.h_x, free_x);
                diag += C64::new(sx1 * m_row / grid.wx[p1], 0.0);
                if n_axes == 2 {
                    let sx2 = axis_stiffness_diag(p2, nx, grid.h_x, free_x);
                    diag += C64::new(sx2 * m_row / grid.wx[p2], 0.0);
                }
                let su = axis_stiffness_diag(q, nu, grid.h_u, true);
                diag += C64::new(su * m_row / grid.wu[q], 0.0);
                if q == 0 {
                    diag += C64::new(0.0, -alpha_here) * (m_row / grid.wu[q]);
                } else if q == nu - 1 {
                    diag += C64::new(0.0, alpha_here) * (m_row / grid.wu[q]);
                }
                band.set(row, row, diag / m_row); // B^{-1/2} A B^{-1/2} on the diagonal

                // off-diagonals: -1/h times complementary mass, symmetrized
                if q + 1 < nu {
                    let col = grid.idx(p1, p2, q + 1);
                    let m_col = mass(&grid, p1, p2, q + 1);
                    let a = -m_row / grid.wu[q] / grid.h_u;
                    let v = C64::new(a / (m_row * m_col).sqrt(), 0.0);
                    band.set(row, col, v);
                    band.set(col, row, v);
                }
                if p1 + 1 < nx {
                    let col = grid.idx(p1 + 1, p2, q);
                    let m_col = mass(&grid, p1 + 1, p2, q);
                    let a = -m_row / grid.wx[p1] / grid.h_x;
                    let v = C64::new(a / (m_row * m_col).sqrt(), 0.0);
                    band.set(row, col, v);
                    band.set(col, row, v);
                }
                if n_axes == 2 && p2 + 1 < nx {
                    let col = grid.idx(p1, p2 + 1, q);
                    let m_col = mass(&grid, p1, p2 + 1, q);
                    let a = -m_row / grid.wx[p2] / grid.h_x;
                    let v = C64::new(a / (m_row * m_col).sqrt(), 0.0);
                    band.set(row, col, v);
                    band.set(col, row, v);
                }
            }
        }
    }

    Ok(DiscretizedHamiltonian {
        band,
        grid,
        alpha,
        alpha0: config.alpha0,
        d: config.d,
        epsilon: config.epsilon,
    })
}

impl DiscretizedHamiltonian {
    /// Apply the operator in S-coordinates.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.band.matvec(v)
    }

    /// Apply the plain finite-difference operator `B^{-1} A` to a grid
    /// field: `field -> B^{-1/2} S B^{1/2} field`.
    pub fn apply_fd(&self, field: &[C64]) -> Vec<C64> {
        let dim = self.grid.dim();
        assert_eq!(field.len(), dim);
        let mut weighted = vec![C64::new(0.0, 0.0); dim];
        for i in 0..dim {
            weighted[i] = field[i] * self.mass_sqrt(i);
        }
        let out = self.band.matvec(&weighted);
        out.iter()
            .enumerate()
            .map(|(i, v)| v / self.mass_sqrt(i))
            .collect()
    }

    /// √(mass) of a flattened node.
    pub fn mass_sqrt(&self, idx: usize) -> f64 {
        let nu = self.grid.n_u();
        let q = idx % nu;
        let pp = idx / nu;
        let m = match self.grid.n {
            1 => self.grid.wx[pp] * self.grid.wu[q],
            _ => {
                self.grid.wx[pp / self.grid.n_x()]
                    * self.grid.wx[pp % self.grid.n_x()]
                    * self.grid.wu[q]
            }
        };
        m.sqrt()
    }

    /// Largest |α| on the grid.
    pub fn alpha_sup(&self) -> f64 {
        self.alpha.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    }

    /// u-reflection permutation: the discrete parity map P.
    pub fn parity_permutation(&self) -> Vec<usize> {
        let nu = self.grid.n_u();
        let dim = self.grid.dim();
        (0..dim)
            .map(|i| {
                let q = i % nu;
                let pp = i / nu;
                pp * nu + (nu - 1 - q)
            })
            .collect()
    }
}
