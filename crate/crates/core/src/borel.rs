//! Borel-plane data and the summability bounds σ(ν), σ̃(μ).
//!
//! With b(t) = Σ a_{n+1,0} tⁿ/n!, the base solution is u(z) = −1 + ∫₀^∞ e^{−zt} b(t) dt,
//! and b solves
//!
//! ```text
//! (t²+3) b(t) = 2ν∫₀ᵗ τb + 3a₂₀ t − 3a₂₀∫₀ᵗ (t−τ) b + (3/2)∫₀ᵗ b(τ) b(t−τ) dτ.
//! ```
//!
//! A contraction argument in the norm |h(t)| ≤ ‖h‖ c e^{σt} gives |b(t)| ≤ c e^{σt}
//! whenever (c, σ) satisfy the two inequalities checked by [`sigma_bound`].

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{self, PrecisionContext};
use crate::series::{base_series, ProblemParams};

/// b₀..b_N with b_n = a_{n+1,0}/n!.
pub fn borel_taylor(params: &ProblemParams, n: usize, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    let a = base_series(params, (n + 1).max(4), ctx)?;
    let mut fact = ctx.real(1);
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            fact *= k as u32;
        }
        out.push(ctx.complex(&a[k + 1] / &fact));
    }
    Ok(out)
}

/// max_{n ∈ [N/2, N], b_n ≠ 0} |b_n|^{1/n}, which tends to 1/√3.
pub fn borel_root_test(b: &[Complex]) -> Option<f64> {
    let n = b.len().checked_sub(1)?;
    (n / 2..=n)
        .filter(|&k| k > 0 && !b[k].is_zero())
        .map(|k| {
            let l = mp::log2_abs(&b[k]) / k as f64;
            2f64.powf(l)
        })
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

/// a₂₀ = (4/15)ν(6ν/5 − 1).
pub fn a20_of_nu(nu: f64) -> f64 {
    4.0 / 15.0 * nu * (1.2 * nu - 1.0)
}

/// ν = 5μ/(2(μ+4)) inverted.
pub fn mu_of_nu(nu: f64) -> f64 {
    8.0 * nu / (5.0 - 2.0 * nu)
}

pub fn nu_of_mu(mu: f64) -> f64 {
    5.0 * mu / (2.0 * (mu + 4.0))
}

/// Fallback when a₂₀ = 0.
pub const DEFAULT_C: f64 = 0.7;

/// c = √(3/α² + 4/α) − √3/α with α = |ν/a₂₀| + 3/2; 7/10 when a₂₀ = 0.
pub fn optimal_c(nu: f64) -> f64 {
    let a20 = a20_of_nu(nu);
    if a20 == 0.0 {
        log::info!("a20 vanishes at nu = {nu}; using c = {DEFAULT_C}");
        return DEFAULT_C;
    }
    let alpha = (nu / a20).abs() + 1.5;
    (3.0 / (alpha * alpha) + 4.0 / alpha).sqrt() - 3f64.sqrt() / alpha
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelBound {
    pub nu: f64,
    pub c: f64,
    pub sigma: f64,
    pub sigma_tilde: f64,
    pub lhs1: f64,
    pub lhs2: f64,
}

/// Left-hand sides of the two closing inequalities at (c, σ).
pub fn inequality_lhs(nu: f64, c: f64, sigma: f64) -> (f64, f64) {
    let a = a20_of_nu(nu).abs();
    let b = (nu.abs() + 1.5 * a) / 3f64.sqrt();
    let s3 = 3f64.sqrt();
    if sigma == 0.0 {
        let rest = if a == 0.0 && b == 0.0 { 0.0 } else { f64::INFINITY };
        return (s3 / 4.0 * c + rest, s3 / 2.0 * c + rest);
    }
    (a / (c * sigma) + s3 / 4.0 * c + b / sigma, s3 / 2.0 * c + b / sigma)
}

/// Smallest σ satisfying both inequalities for the given (or optimal) c.
pub fn sigma_bound(nu: f64, c: Option<f64>) -> Result<BorelBound> {
    let c = c.unwrap_or_else(|| optimal_c(nu));
    let s3 = 3f64.sqrt();
    if !(c > 0.0) || s3 / 2.0 * c >= 1.0 {
        return Err(Error::InfeasibleBound(format!("c = {c} needs 0 < c < 2/sqrt(3)")));
    }
    let a = a20_of_nu(nu).abs();
    let b = (nu.abs() + 1.5 * a) / s3;
    let sigma1 = (a / c + b) / (1.0 - s3 * c / 4.0);
    let sigma2 = b / (1.0 - s3 * c / 2.0);
    let sigma = sigma1.max(sigma2);
    if sigma == 0.0 {
        log::info!("all nu-dependent terms vanish at nu = {nu}; sigma = 0");
    }
    let (lhs1, lhs2) = inequality_lhs(nu, c, sigma);
    Ok(BorelBound {
        nu,
        c,
        sigma,
        sigma_tilde: sigma_tilde(mu_of_nu(nu), sigma),
        lhs1,
        lhs2,
    })
}

/// σ̃ = ((6^{1/4}/8)(μ+4)σ)^{1/(1+μ/4)}: the solution exists for x > σ̃.
pub fn sigma_tilde(mu: f64, sigma: f64) -> f64 {
    (6f64.powf(0.25) / 8.0 * (mu + 4.0) * sigma).powf(1.0 / (1.0 + mu / 4.0))
}

/// σ recovered from σ̃ (inverse of [`sigma_tilde`]).
pub fn sigma_from_tilde(mu: f64, st: f64) -> f64 {
    st.powf(1.0 + mu / 4.0) / (6f64.powf(0.25) / 8.0 * (mu + 4.0))
}

/// Residuals of the integral equation for the truncated Borel series.
#[derive(Clone, Debug)]
pub struct IntegralResidual {
    /// max over the grid of the full residual of the degree-N polynomial b.
    pub max_residual: Float,
    /// The same restricted to powers t⁰..t^N, where truncation plays no part.
    pub max_residual_low: Float,
    pub grid_points: usize,
}

/// Residual of the integral equation on a uniform grid of [0, t_max], with all
/// integrals and the convolution done termwise on the polynomial b.
pub fn verify_integral_equation(
    params: &ProblemParams,
    t_max: f64,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<IntegralResidual> {
    if !(t_max >= 0.0 && t_max < 3f64.sqrt()) {
        return Err(Error::InvalidParameter(format!(
            "t_max = {t_max} must lie in [0, sqrt 3)"
        )));
    }
    let b = borel_taylor(params, n, ctx)?;
    let r = residual_polynomial(params, &b, ctx);
    let points = 101;
    let mut max = ctx.real(0);
    let mut max_low = ctx.real(0);
    for i in 0..points {
        let t = ctx.real(t_max) * i as u32 / (points - 1) as u32;
        let mut acc = ctx.complex(0);
        let mut low = ctx.complex(0);
        let mut tp = ctx.real(1);
        for (k, c) in r.iter().enumerate() {
            let term = ctx.complex(c * &tp);
            if k <= n {
                low += &term;
            }
            acc += term;
            tp *= &t;
        }
        max = max.max(&mp::abs(&acc));
        max_low = max_low.max(&mp::abs(&low));
    }
    Ok(IntegralResidual {
        max_residual: max,
        max_residual_low: max_low,
        grid_points: points,
    })
}

/// Coefficients of (t²+3)b − 2ν∫τb − 3a₂₀t + 3a₂₀∫(t−τ)b − (3/2) b∗b.
pub fn residual_polynomial(params: &ProblemParams, b: &[Complex], ctx: &PrecisionContext) -> Vec<Complex> {
    let n = b.len() - 1;
    let nu = params.nu(ctx);
    let a20 = ctx.complex(params.a20_exact());
    let mut r = vec![ctx.complex(0); 2 * n + 3];
    for (k, bk) in b.iter().enumerate() {
        r[k] += ctx.complex(bk * 3u32);
        r[k + 2] += bk;
        // ∫₀ᵗ τ^{k+1} = t^{k+2}/(k+2)
        r[k + 2] -= ctx.complex(bk * &nu) * 2u32 / (k as u32 + 2);
        // ∫₀ᵗ (t−τ) τ^k = t^{k+2}/((k+1)(k+2))
        r[k + 2] += ctx.complex(bk * &a20) * 3u32 / ((k as u32 + 1) * (k as u32 + 2));
    }
    r[1] -= ctx.complex(&a20 * 3u32);
    // ∫₀ᵗ τ^i (t−τ)^j = t^{i+j+1} i! j!/(i+j+1)!
    let mut fact = vec![ctx.real(1)];
    for k in 1..=2 * n + 1 {
        let f = ctx.real(&fact[k - 1] * k as u32);
        fact.push(f);
    }
    for i in 0..=n {
        for j in 0..=n {
            let w = ctx.real(&fact[i] * &fact[j]) / &fact[i + j + 1];
            let prod = ctx.complex(&b[i] * &b[j]) * w;
            r[i + j + 1] -= prod * ctx.real(1.5);
        }
    }
    r
}
