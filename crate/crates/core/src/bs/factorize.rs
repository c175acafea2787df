//! Factorization of the gauge-transformed perturbation `Z_ε` into pairs of
//! first-order factors `A_i* B_i`.

use crate::profile::PerturbationProfile;
use crate::{C64, Error, Result};

/// Differential/multiplication action of a B factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorOp {
    Multiply,
    /// ∂/∂x_axis
    Dx(usize),
    /// ∂/∂u
    Du,
}

/// Which β-derived coefficient a factor carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaCoef {
    Beta,
    Grad(usize),
    HessTrace,
    /// sgn(f)·|f|^{1/2} of the named function
    SignedSqrt(BetaBase),
    /// |f|^{1/2}
    AbsSqrt(BetaBase),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaBase {
    Beta,
    Grad(usize),
    HessTrace,
}

fn base_value(beta: &PerturbationProfile, base: BetaBase, x: &[f64]) -> f64 {
    match base {
        BetaBase::Beta => beta.eval(x),
        BetaBase::Grad(axis) => beta.grad(x)[axis],
        BetaBase::HessTrace => beta.hess_trace(x),
    }
}

fn coef_value(beta: &PerturbationProfile, coef: BetaCoef, x: &[f64]) -> f64 {
    match coef {
        BetaCoef::Beta => beta.eval(x),
        BetaCoef::Grad(axis) => beta.grad(x)[axis],
        BetaCoef::HessTrace => beta.hess_trace(x),
        BetaCoef::SignedSqrt(b) => {
            let v = base_value(beta, b, x);
            v.signum() * v.abs().sqrt()
        }
        BetaCoef::AbsSqrt(b) => base_value(beta, b, x).abs().sqrt(),
    }
}

/// Multiplication factor `scale · c(x) · u^pow` (the A side).
#[derive(Debug, Clone, Copy)]
pub struct AFactor {
    pub scale: C64,
    pub coef: BetaCoef,
    pub u_power: u8,
    /// true for the factors that enter `C_ε` with an extra ε weight
    pub eps_weighted: bool,
}

impl AFactor {
    pub fn eval(&self, beta: &PerturbationProfile, x: &[f64], u: f64, epsilon: f64) -> C64 {
        let w = if self.eps_weighted { epsilon } else { 1.0 };
        self.scale * coef_value(beta, self.coef, x) * u.powi(self.u_power as i32) * w
    }
}

/// First-order factor `c(x) · op` (the B side).
#[derive(Debug, Clone, Copy)]
pub struct BFactor {
    pub coef: BetaCoef,
    pub op: FactorOp,
}

/// A scalar field with analytic derivatives, for applying differential
/// factors without grids.
pub struct AnalyticField<'a> {
    pub value: &'a dyn Fn(&[f64], f64) -> C64,
    pub dx: &'a dyn Fn(&[f64], f64, usize) -> C64,
    pub du: &'a dyn Fn(&[f64], f64) -> C64,
}

impl BFactor {
    pub fn apply(
        &self,
        beta: &PerturbationProfile,
        field: &AnalyticField,
        x: &[f64],
        u: f64,
    ) -> C64 {
        let c = coef_value(beta, self.coef, x);
        match self.op {
            FactorOp::Multiply => c * (field.value)(x, u),
            FactorOp::Dx(axis) => c * (field.dx)(x, u, axis),
            FactorOp::Du => c * (field.du)(x, u),
        }
    }
}

/// The factor lists of `Z_ε = Σ_{i≤n+2} A_i* B_i + ε Σ_{i>n+2} A_i* B_i`.
#[derive(Debug, Clone)]
pub struct FactorizedPerturbation {
    pub a_factors: Vec<AFactor>,
    pub b_factors: Vec<BFactor>,
    pub epsilon: f64,
    pub n: u8,
}

/// Build the 2n+3 factor pairs.
///
/// Ordering: n gradient pairs, the ∂_u pair, the Δ'β pair, the β² pair,
/// then n ε-weighted gradient-squared pairs.
pub fn factorize_perturbation(
    beta: &PerturbationProfile,
    n: u8,
    epsilon: f64,
) -> Result<FactorizedPerturbation> {
    if beta.n != n {
        return Err(Error::InvalidInput(format!(
            "profile dimension {} does not match n = {n}",
            beta.n
        )));
    }
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let mut a_factors = Vec::with_capacity(2 * n as usize + 3);
    let mut b_factors = Vec::with_capacity(2 * n as usize + 3);
    for axis in 0..n as usize {
        a_factors.push(AFactor {
            scale: 2.0 * i,
            coef: BetaCoef::SignedSqrt(BetaBase::Grad(axis)),
            u_power: 1,
            eps_weighted: false,
        });
        b_factors.push(BFactor {
            coef: BetaCoef::AbsSqrt(BetaBase::Grad(axis)),
            op: FactorOp::Dx(axis),
        });
    }
    a_factors.push(AFactor {
        scale: 2.0 * i,
        coef: BetaCoef::SignedSqrt(BetaBase::Beta),
        u_power: 0,
        eps_weighted: false,
    });
    b_factors.push(BFactor {
        coef: BetaCoef::AbsSqrt(BetaBase::Beta),
        op: FactorOp::Du,
    });
    a_factors.push(AFactor {
        scale: i,
        coef: BetaCoef::SignedSqrt(BetaBase::HessTrace),
        u_power: 1,
        eps_weighted: false,
    });
    b_factors.push(BFactor {
        coef: BetaCoef::AbsSqrt(BetaBase::HessTrace),
        op: FactorOp::Multiply,
    });
    a_factors.push(AFactor {
        scale: one,
        coef: BetaCoef::Beta,
        u_power: 0,
        eps_weighted: true,
    });
    b_factors.push(BFactor {
        coef: BetaCoef::Beta,
        op: FactorOp::Multiply,
    });
    for axis in 0..n as usize {
        a_factors.push(AFactor {
            scale: one,
            coef: BetaCoef::Grad(axis),
            u_power: 2,
            eps_weighted: true,
        });
        b_factors.push(BFactor {
            coef: BetaCoef::Grad(axis),
            op: FactorOp::Multiply,
        });
    }
    Ok(FactorizedPerturbation {
        a_factors,
        b_factors,
        epsilon,
        n,
    })
}

impl FactorizedPerturbation {
    /// Apply `Σ_i (ε-weights) A_i* B_i` to an analytic field at a point.
    pub fn apply_composition(
        &self,
        beta: &PerturbationProfile,
        field: &AnalyticField,
        x: &[f64],
        u: f64,
    ) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in self.a_factors.iter().zip(&self.b_factors) {
            acc += a.eval(beta, x, u, self.epsilon) * b.apply(beta, field, x, u);
        }
        acc
    }
}

/// Apply `Z_ε` directly (its closed form) to an analytic field at a point.
pub fn apply_z_direct(
    beta: &PerturbationProfile,
    epsilon: f64,
    field: &AnalyticField,
    x: &[f64],
    u: f64,
) -> C64 {
    let i = C64::new(0.0, 1.0);
    let grad = beta.grad(x);
    let b = beta.eval(x);
    let ht = beta.hess_trace(x);
    let grad2: f64 = grad.iter().map(|g| g * g).sum();
    let mut acc = C64::new(0.0, 0.0);
    for (axis, g) in grad.iter().enumerate() {
        acc += 2.0 * i * u * *g * (field.dx)(x, u, axis);
    }
    acc += 2.0 * i * b * (field.du)(x, u);
    acc += (C64::new(epsilon * b * b + epsilon * u * u * grad2, 0.0) + i * ht * u)
        * (field.value)(x, u);
    acc
}
