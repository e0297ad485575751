//! Stokes multipliers K± from the late coefficients of the base series.
//!
//! The n-th instance of the late-term relation
//!
//! ```text
//! a_{2n,0} ≈ (K₋/(−πi)) Σ_{m<M} a_{m,1} Γ(2n−m−ν) / (i√3)^{2n−m−ν}
//! ```
//!
//! is solved for K₋ as an equality; K₊ is its conjugate.

use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{self, PrecisionContext};
use crate::series::{base_series, level_one_series, Branch, ProblemParams};

#[derive(Clone, Debug)]
pub struct StokesResult {
    pub k_minus: Complex,
    pub k_plus: Complex,
    /// The index 2n of the base coefficient used.
    pub n_used: usize,
    pub terms_used: usize,
    /// Relative size of the first omitted term of the late-term sum.
    pub estimated_error: f64,
}

/// Summary of [`StokesResult`] in plain numbers, for reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StokesReport {
    pub mu: String,
    pub n: usize,
    pub terms: usize,
    pub k_minus_re: String,
    pub k_minus_im: String,
    pub est_err: f64,
}

impl StokesResult {
    pub fn report(&self, params: &ProblemParams, digits: u32) -> StokesReport {
        StokesReport {
            mu: params.mu().to_string(),
            n: self.n_used / 2,
            terms: self.terms_used,
            k_minus_re: mp::format_real(self.k_minus.real(), digits),
            k_minus_im: mp::format_real(self.k_minus.imag(), digits),
            est_err: self.estimated_error,
        }
    }
}

/// K₋ from the 2n-th base coefficient with `m_terms` level-one corrections.
pub fn compute_stokes(
    params: &ProblemParams,
    n: usize,
    m_terms: usize,
    ctx: &PrecisionContext,
) -> Result<StokesResult> {
    if params.branch() != Branch::Minus {
        return Err(Error::InvalidParameter(
            "Stokes multipliers are computed for the a00 = -1 family".into(),
        ));
    }
    if m_terms == 0 || m_terms > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= terms <= n, got terms = {m_terms}, n = {n}"
        )));
    }
    let two_n = 2 * n;
    let base = base_series(params, two_n.max(m_terms + 1).max(4), ctx)?;
    let level1 = level_one_series(params, &base, m_terms, ctx)?;

    let nu = params.nu(ctx);
    let log_beta = mp::principal_ln(&params.sqrt3a00(ctx));
    let term = |m: usize| -> Result<Complex> {
        let order = ctx.complex((ctx.real((two_n - m) as u32) - &nu, 0));
        let g = mp::gamma(&order, ctx)?;
        let power = (log_beta.clone() * &order).exp();
        Ok(ctx.complex(&level1[m] * &g) / power)
    };
    let mut sum = ctx.complex(0);
    for m in 0..m_terms {
        sum += term(m)?;
    }
    let omitted = if m_terms < two_n { term(m_terms)? } else { ctx.complex(0) };
    let minus_pi_i = ctx.complex((0, -ctx.pi()));
    let k_minus = minus_pi_i * &base[two_n] / &sum;
    let k_plus = k_minus.clone().conj();
    let estimated_error = (mp::abs(&omitted) / mp::abs(&sum)).to_f64();
    Ok(StokesResult {
        k_minus,
        k_plus,
        n_used: two_n,
        terms_used: m_terms,
        estimated_error,
    })
}

/// Stokes estimates over several n (with terms = n), flagged when the error
/// estimate stops decreasing.
#[derive(Clone, Debug)]
pub struct StokesSweep {
    pub results: Vec<StokesResult>,
    pub diverging: bool,
}

pub fn sweep(params: &ProblemParams, ns: &[usize], ctx: &PrecisionContext) -> Result<StokesSweep> {
    let mut results = Vec::with_capacity(ns.len());
    for &n in ns {
        results.push(compute_stokes(params, n, n, ctx)?);
    }
    let diverging = results
        .windows(2)
        .any(|w| w[1].estimated_error >= w[0].estimated_error);
    if diverging {
        log::warn!("Stokes estimates are not improving with n for {params}");
    }
    Ok(StokesSweep { results, diverging })
}

/// K₋ = −3^{1/4}(1+i)/√(5π), the known value for μ = 1.
pub fn exact_stokes_mu1(ctx: &PrecisionContext) -> Complex {
    let num = ctx.real(3).root(4);
    let den = (ctx.pi() * 5u32).sqrt();
    let r = -(num / den);
    ctx.complex((r.clone(), r))
}
