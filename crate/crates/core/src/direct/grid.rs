//! Tensor grids for the truncated strip/layer.

use crate::{Error, Result};

/// Artificial boundary condition at the longitudinal truncation |x| = L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndBc {
    Dirichlet,
    Neumann,
}

/// Uniform tensor grid on `[c-L, c+L]ⁿ × [0, d]`.
///
/// Longitudinal axes share the same node set; the transversal axis includes
/// both endpoints (the Robin rows live there).  Mass weights are trapezoid:
/// half-cells at retained endpoints.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    pub n: u8,
    pub l: f64,
    pub center: f64,
    pub h_x: f64,
    pub h_u: f64,
    pub end_bc: EndBc,
    pub x_nodes: Vec<f64>,
    pub u_nodes: Vec<f64>,
    /// trapezoid mass per x node (h, or h/2 at Neumann endpoints)
    pub wx: Vec<f64>,
    /// trapezoid mass per u node (h/2 at the two walls)
    pub wu: Vec<f64>,
}

fn divides(len: f64, h: f64) -> Result<usize> {
    let m = (len / h).round();
    if m < 1.0 || (m * h - len).abs() > 1e-9 * len.max(1.0) {
        return Err(Error::GridError(format!(
            "step {h} does not divide length {len}"
        )));
    }
    Ok(m as usize)
}

impl TensorGrid {
    pub fn new(
        n: u8,
        d: f64,
        center: f64,
        l: f64,
        h_x: f64,
        h_u: f64,
        end_bc: EndBc,
    ) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::GridError(format!("n must be 1 or 2, got {n}")));
        }
        let m_u = divides(d, h_u)?;
        let m_x = divides(2.0 * l, h_x)?;
        if m_u < 2 || m_x < 3 {
            return Err(Error::GridError(format!(
                "grid too coarse: {m_x} x-cells, {m_u} u-cells"
            )));
        }
        let u_nodes: Vec<f64> = (0..=m_u).map(|q| q as f64 * d / m_u as f64).collect();
        let mut wu = vec![h_u; m_u + 1];
        wu[0] = 0.5 * h_u;
        wu[m_u] = 0.5 * h_u;
        let (x_nodes, wx): (Vec<f64>, Vec<f64>) = match end_bc {
            EndBc::Dirichlet => {
                // interior nodes only; the pinned endpoints are eliminated
                let nodes: Vec<f64> = (1..m_x)
                    .map(|p| center - l + p as f64 * 2.0 * l / m_x as f64)
                    .collect();
                let w = vec![h_x; nodes.len()];
                (nodes, w)
            }
            EndBc::Neumann => {
                let nodes: Vec<f64> = (0..=m_x)
                    .map(|p| center - l + p as f64 * 2.0 * l / m_x as f64)
                    .collect();
                let mut w = vec![h_x; nodes.len()];
                w[0] = 0.5 * h_x;
                w[m_x] = 0.5 * h_x;
                (nodes, w)
            }
        };
        Ok(Self {
            n,
            l,
            center,
            h_x,
            h_u,
            end_bc,
            x_nodes,
            u_nodes,
            wx,
            wu,
        })
    }

    pub fn n_x(&self) -> usize {
        self.x_nodes.len()
    }

    pub fn n_u(&self) -> usize {
        self.u_nodes.len()
    }

    /// Total unknowns: `n_x^n * n_u`.
    pub fn dim(&self) -> usize {
        self.n_x().pow(self.n as u32) * self.n_u()
    }

    /// Flattened index; u fastest, then x₂ (layer only), then x₁.
    pub fn idx(&self, p1: usize, p2: usize, q: usize) -> usize {
        match self.n {
            1 => p1 * self.n_u() + q,
            _ => (p1 * self.n_x() + p2) * self.n_u() + q,
        }
    }

    /// Longitudinal coordinates of a flattened index.
    pub fn x_of(&self, idx: usize) -> Vec<f64> {
        let nu = self.n_u();
        match self.n {
            1 => vec![self.x_nodes[idx / nu]],
            _ => {
                let pp = idx / nu;
                vec![self.x_nodes[pp / self.n_x()], self.x_nodes[pp % self.n_x()]]
            }
        }
    }
}
