//! Macdonald functions K₀, K₁ and the modified Bessel functions I₀, I₁.
//!
//! The production path splits at z = 2: power series with the logarithmic
//! term below, Chebyshev expansions of the scaled function `K_ν(z) eᶻ √z`
//! above (coefficients frozen in this file).  `bessel_k_integral` evaluates
//! the integral representation `K_ν(z) = ∫₀^∞ e^{-z cosh t} cosh(νt) dt` by
//! trapezoid quadrature; it is deliberately independent of the series and
//! Chebyshev paths and serves as the reference oracle in the test suites.

use crate::{C64, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// ---------------------------------------------------------------------------
// I0 / I1
// ---------------------------------------------------------------------------

/// Modified Bessel function I₀(z) for real z ≥ 0.
pub fn bessel_i0(z: f64) -> f64 {
    if z < 30.0 {
        let q = 0.25 * z * z;
        let mut term = 1.0;
        let mut acc = 1.0;
        let mut m = 1.0;
        while term > 1e-18 * acc {
            term *= q / (m * m);
            acc += term;
            m += 1.0;
        }
        acc
    } else {
        // asymptotic expansion, optimal truncation far below 1e-15 here
        let mut c = 1.0;
        let mut acc = 1.0;
        for k in 1..=12 {
            let kf = k as f64;
            c *= -(0.0 - (2.0 * kf - 1.0) * (2.0 * kf - 1.0)) / (8.0 * z * kf);
            acc += c;
        }
        acc * z.exp() / (2.0 * std::f64::consts::PI * z).sqrt()
    }
}

/// Modified Bessel function I₁(z) for real z ≥ 0.
pub fn bessel_i1(z: f64) -> f64 {
    if z < 30.0 {
        let q = 0.25 * z * z;
        let mut term = 0.5 * z;
        let mut acc = term;
        let mut m = 1.0;
        while term.abs() > 1e-18 * acc.abs() {
            term *= q / (m * (m + 1.0));
            acc += term;
            m += 1.0;
        }
        acc
    } else {
        let mu = 4.0;
        let mut c = 1.0;
        let mut acc = 1.0;
        for k in 1..=12 {
            let kf = k as f64;
            c *= -(mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0)) / (8.0 * z * kf);
            acc += c;
        }
        acc * z.exp() / (2.0 * std::f64::consts::PI * z).sqrt()
    }
}

// ---------------------------------------------------------------------------
// K0 / K1, real argument
// ---------------------------------------------------------------------------

/// Chebyshev coefficients of `K₀(z) eᶻ √z` in `w = 4/z - 1`, z ∈ [2, ∞).
/// Generated by the `generate_k_chebyshev_tables` test from the integral
/// representation.
const K0_CHEB: [f64; 28] = [
    2.44030308206596124876e0,
    -3.14481013119678881607e-2,
    1.56988388573505951475e-3,
    -1.28495495820644126594e-4,
    1.39498137228644126362e-5,
    -1.83175552699088583216e-6,
    2.76681367934461513200e-7,
    -4.66049034963944587792e-8,
    8.57403856802108033317e-9,
    -1.69753944456729750112e-9,
    3.57744418533201244568e-10,
    -7.95794652397319142963e-11,
    1.85642590189161194566e-11,
    -4.51968684700432290093e-12,
    1.14522835659158764536e-12,
    -3.03232994269819777787e-13,
    8.51829717873897597108e-14,
    -2.72160072256610859173e-14,
    1.13620224340138524133e-14,
    -7.19646564562026393772e-15,
    6.53255227689442146251e-15,
    -5.74651437545981003235e-15,
    5.68434188608080180251e-15,
    -5.34461364054550364871e-15,
    5.26689802882174237533e-15,
    -5.44009282066326704808e-15,
    5.27133892092024290683e-15,
    -5.49782441794377553528e-15,
];

/// Chebyshev coefficients of `K₁(z) eᶻ √z` in `w = 4/z - 1`, z ∈ [2, ∞).
const K1_CHEB: [f64; 28] = [
    2.72062619048444886971e0,
    1.03923736576816139188e-1,
    -2.85781685961753253999e-3,
    1.95215518466835836467e-4,
    -1.93619797376287635174e-5,
    2.40648494401973774779e-6,
    -3.50196056444485024968e-7,
    5.74108365980485762812e-8,
    -1.03457576283716441390e-8,
    2.01504488872572554681e-9,
    -4.19030456999536208547e-10,
    9.21784404361858331723e-11,
    -2.12951101197234025484e-11,
    5.13447506733655223007e-12,
    -1.28409505251170234661e-12,
    3.29865024184527994509e-13,
    -8.51141379598629995004e-14,
    1.95532479096982574948e-14,
    -1.97841742988202898659e-15,
    -3.27515792264421179425e-15,
    5.22026866178748640017e-15,
    -5.26911847487099303551e-15,
    5.66213742558829835616e-15,
    -5.48894263374677368342e-15,
    5.48006084954977262042e-15,
    -5.30686605770824794768e-15,
    5.06261699229071398210e-15,
    -5.72430991496730737486e-15,
];

/// Clenshaw evaluation of a Chebyshev series at w ∈ [-1, 1]; the constant
/// coefficient enters with weight 1/2.
fn chebyshev_eval(w: f64, coeffs: &[f64]) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * w * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    w * b1 - b2 + 0.5 * coeffs[0]
}

fn harmonic(m: usize) -> f64 {
    (1..=m).map(|j| 1.0 / j as f64).sum()
}

fn k0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let i0 = bessel_i0(z);
    let mut term = 1.0;
    let mut acc = 0.0;
    for m in 1..=40 {
        let mf = m as f64;
        term *= q / (mf * mf);
        let add = term * harmonic(m);
        acc += add;
        if add.abs() < 1e-18 * acc.abs().max(1.0) {
            break;
        }
    }
    -((0.5 * z).ln() + EULER_GAMMA) * i0 + acc
}

fn k1_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let i1 = bessel_i1(z);
    // Σ_{m≥0} [ψ(m+1)+ψ(m+2)] q^m / (m! (m+1)!)
    let mut term = 1.0; // q^m/(m!(m+1)!) at m=0
    let mut acc = 0.0;
    for m in 0..=40 {
        let mf = m as f64;
        let psi_sum = -2.0 * EULER_GAMMA + harmonic(m) + harmonic(m + 1);
        let add = term * psi_sum;
        acc += add;
        term *= q / ((mf + 1.0) * (mf + 2.0));
        if add.abs() < 1e-18 * acc.abs().max(1.0) && m > 2 {
            break;
        }
    }
    (0.5 * z).ln() * i1 + 1.0 / z - 0.25 * z * acc
}

/// Macdonald function K₀(z) or K₁(z) for real z > 0 to ~1e-13 relative.
pub fn bessel_k(order: u8, z: f64) -> Result<f64> {
    if !(order == 0 || order == 1) {
        return Err(Error::DomainError(format!(
            "bessel_k supports orders 0 and 1, got {order}"
        )));
    }
    if !(z > 0.0) {
        return Err(Error::DomainError(format!(
            "bessel_k requires z > 0, got {z}"
        )));
    }
    Ok(if z <= 2.0 {
        if order == 0 {
            k0_series(z)
        } else {
            k1_series(z)
        }
    } else {
        let w = 4.0 / z - 1.0;
        let table = if order == 0 { &K0_CHEB } else { &K1_CHEB };
        let scaled = chebyshev_eval(w, table);
        scaled * (-z).exp() / z.sqrt()
    })
}

/// `K₀(z) + ln(z)`, stable as z → 0 (limit `ln 2 - γ`).
pub fn k0_plus_ln(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::DomainError(format!(
            "k0_plus_ln requires z > 0, got {z}"
        )));
    }
    if z <= 2.0 {
        let q = 0.25 * z * z;
        let i0 = bessel_i0(z);
        let mut term = 1.0;
        let mut acc = 0.0;
        for m in 1..=40 {
            let mf = m as f64;
            term *= q / (mf * mf);
            let add = term * harmonic(m);
            acc += add;
            if add.abs() < 1e-18 * acc.abs().max(1.0) {
                break;
            }
        }
        // K0 + ln z = (1 - I0) ln z + (ln 2 - γ) I0 + Σ, no cancellation
        Ok((1.0 - i0) * z.ln() + (2.0f64.ln() - EULER_GAMMA) * i0 + acc)
    } else {
        Ok(bessel_k(0, z)? + z.ln())
    }
}

// ---------------------------------------------------------------------------
// Integral-representation oracle (real and complex argument)
// ---------------------------------------------------------------------------

/// K₀ or K₁ by trapezoid quadrature of `∫₀^∞ e^{-z cosh t} cosh(νt) dt`.
///
/// Converges geometrically in 1/h for this even analytic integrand; step
/// 0.5/√z capped at 1e-2 gives full double precision over z ∈ [1e-3, 700].
/// Independent oracle: shares no code with the series/Chebyshev paths.
pub fn bessel_k_integral(order: u8, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::DomainError(format!(
            "bessel_k_integral requires z > 0, got {z}"
        )));
    }
    if !(order == 0 || order == 1) {
        return Err(Error::DomainError("order must be 0 or 1".into()));
    }
    // e^{-z cosh T} below 1e-320 terminates the sum
    let t_max = ((745.0 + 20.0) / z).max(2.0).acosh() + 1.0;
    // integrand width shrinks like 1/sqrt(z); keep several nodes inside it
    let h = (0.25 / z.sqrt()).min(5e-3);
    // half-weight t = 0 endpoint; cosh(0) = 1 so orders 0 and 1 agree there
    let mut acc = 0.5 * (-z).exp();
    let mut t = h;
    while t <= t_max {
        let c = t.cosh();
        let w = (-z * c).exp();
        if w == 0.0 {
            break;
        }
        acc += if order == 0 { w } else { w * c };
        t += h;
    }
    Ok(acc * h)
}

/// Exponentially scaled oracle `K_ν(z) eᶻ` via the integral representation
/// `∫₀^∞ e^{-z (cosh t - 1)} cosh(νt) dt`; stable for arbitrarily large z.
pub fn bessel_k_scaled_integral(order: u8, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::DomainError(format!(
            "bessel_k_scaled_integral requires z > 0, got {z}"
        )));
    }
    if !(order == 0 || order == 1) {
        return Err(Error::DomainError("order must be 0 or 1".into()));
    }
    let t_max = ((745.0 + 20.0) / z + 1.0).max(2.0).acosh() + 1.0;
    let h = (0.25 / z.sqrt()).min(5e-3);
    let mut acc = 0.5;
    let mut t = h;
    while t <= t_max {
        let c = t.cosh();
        let w = (-z * (c - 1.0)).exp();
        if w == 0.0 {
            break;
        }
        acc += if order == 0 { w } else { w * c };
        t += h;
    }
    Ok(acc * h)
}

/// Complex-argument K₀/K₁ for Re w > 0: series for |w| ≤ 2, trapezoid
/// integral representation beyond.
pub fn bessel_k_complex(order: u8, w: C64) -> Result<C64> {
    if w.re <= 0.0 {
        return Err(Error::DomainError(format!(
            "bessel_k_complex requires Re w > 0, got {w}"
        )));
    }
    if !(order == 0 || order == 1) {
        return Err(Error::DomainError("order must be 0 or 1".into()));
    }
    if w.norm() <= 2.0 {
        Ok(if order == 0 {
            k0_series_complex(w)
        } else {
            k1_series_complex(w)
        })
    } else {
        let t_max = ((745.0 + 20.0) / w.re).max(2.0).acosh() + 1.0;
        let h = (0.25 / w.norm().sqrt()).min(5e-3);
        let mut acc = (-w).exp() * 0.5;
        let mut t = h;
        while t <= t_max {
            let c = t.cosh();
            let e = (-w * c).exp();
            if e.norm() == 0.0 {
                break;
            }
            acc += if order == 0 { e } else { e * c };
            t += h;
        }
        Ok(acc * h)
    }
}

fn i0_series_complex(w: C64) -> C64 {
    let q = w * w * 0.25;
    let mut term = C64::new(1.0, 0.0);
    let mut acc = term;
    let mut m = 1.0;
    while term.norm() > 1e-18 * acc.norm() && m < 80.0 {
        term *= q / (m * m);
        acc += term;
        m += 1.0;
    }
    acc
}

fn i1_series_complex(w: C64) -> C64 {
    let q = w * w * 0.25;
    let mut term = w * 0.5;
    let mut acc = term;
    let mut m = 1.0;
    while term.norm() > 1e-18 * acc.norm() && m < 80.0 {
        term *= q / (m * (m + 1.0));
        acc += term;
        m += 1.0;
    }
    acc
}

fn k0_series_complex(w: C64) -> C64 {
    let q = w * w * 0.25;
    let i0 = i0_series_complex(w);
    let mut term = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for m in 1..=60 {
        let mf = m as f64;
        term *= q / (mf * mf);
        acc += term * harmonic(m);
        if term.norm() * harmonic(m) < 1e-18 * acc.norm().max(1.0) {
            break;
        }
    }
    -((w * 0.5).ln() + EULER_GAMMA) * i0 + acc
}

fn k1_series_complex(w: C64) -> C64 {
    let q = w * w * 0.25;
    let i1 = i1_series_complex(w);
    let mut term = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..=60 {
        let mf = m as f64;
        let psi_sum = -2.0 * EULER_GAMMA + harmonic(m) + harmonic(m + 1);
        acc += term * psi_sum;
        term *= q / ((mf + 1.0) * (mf + 2.0));
    }
    (w * 0.5).ln() * i1 + C64::new(1.0, 0.0) / w - w * 0.25 * acc
}

/// `K₀(w) + ln(w)` for complex w with Re w > 0, stable near w = 0.
pub fn k0_plus_ln_complex(w: C64) -> Result<C64> {
    if w.re <= 0.0 && w.norm() > 0.0 {
        return Err(Error::DomainError(format!(
            "k0_plus_ln_complex requires Re w > 0, got {w}"
        )));
    }
    if w.norm() == 0.0 {
        return Ok(C64::new(2.0f64.ln() - EULER_GAMMA, 0.0));
    }
    if w.norm() <= 2.0 {
        let q = w * w * 0.25;
        let i0 = i0_series_complex(w);
        let mut term = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for m in 1..=60 {
            let mf = m as f64;
            term *= q / (mf * mf);
            acc += term * harmonic(m);
        }
        let one = C64::new(1.0, 0.0);
        Ok((one - i0) * w.ln() + i0 * (2.0f64.ln() - EULER_GAMMA) + acc)
    } else {
        Ok(bessel_k_complex(0, w)? + w.ln())
    }
}

/// Principal square root of `-z` with the branch fixed to Re ≥ 0, the
/// decaying-exponential sheet of the free resolvent.
pub fn sqrt_minus_with_positive_re(z: C64) -> C64 {
    let r = (-z).sqrt();
    if r.re < 0.0 {
        -r
    } else {
        r
    }
}

/// `e^w - 1` without cancellation for small |w|.
pub fn cexpm1(w: C64) -> C64 {
    if w.norm() < 0.5 {
        let mut term = w;
        let mut acc = w;
        let mut m = 2.0;
        while term.norm() > 1e-18 * acc.norm().max(1e-300) && m < 40.0 {
            term *= w / m;
            acc += term;
            m += 1.0;
        }
        acc
    } else {
        w.exp() - C64::new(1.0, 0.0)
    }
}
