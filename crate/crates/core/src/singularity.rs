//! Locating poles, log-corrected poles and zeros.
//!
//! Contour integrals are evaluated with the trapezoidal rule
//! (1/2M) Σ_{m<2M} w_m F(w_m), w_m = r e^{πim/M}, the solution values at the
//! nodes coming from one node-to-node Taylor walk around the circle.

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::continuation::{SolutionState, WalkOptions, Walker};
use crate::error::{Error, Result};
use crate::mp::{self, PrecisionContext};
use crate::series::ProblemParams;
use crate::stokes::StokesResult;

/// Integrand whose residue is wanted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// F = −x y'/(2y); residue x_j at a double pole.
    PoleLocation,
    /// F = y'³/(56y); residue h_j at a pole (μ = 1 only).
    HResidue,
    /// F = x y'/y; residue z₁ at a simple zero.
    ZeroLocation,
}

impl Functional {
    fn apply(self, s: &SolutionState, ctx: &PrecisionContext) -> Complex {
        match self {
            Functional::PoleLocation => -(ctx.complex(&s.x * &s.dy) / &s.y) / 2u32,
            Functional::HResidue => {
                let d2 = ctx.complex(&s.dy * &s.dy);
                ctx.complex(&d2 * &s.dy) / &s.y / 56u32
            }
            Functional::ZeroLocation => ctx.complex(&s.x * &s.dy) / &s.y,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    DoublePole,
    LogCorrectedPole,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Contour,
    LocalExpansion,
    Prediction,
}

#[derive(Clone, Debug)]
pub struct SingularityEstimate {
    pub location: Complex,
    pub kind: SingularityKind,
    pub h: Option<Complex>,
    pub method: Method,
    /// Centre of the contour (or the initial guess for other methods).
    pub center: Complex,
    pub radius: Float,
    /// Half the node count (the M of the trapezoidal rule).
    pub nodes: usize,
    /// |full rule − half rule|: the node-doubling stability diagnostic.
    pub residual_diag: f64,
    /// |y(w₀ after one loop) − y(w₀)|/|y(w₀)|; non-zero around branch points.
    pub closure_gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReport {
    pub x_re: String,
    pub x_im: String,
    pub kind: SingularityKind,
    pub method: Method,
    pub h_re: Option<String>,
    pub h_im: Option<String>,
    pub center_re: String,
    pub center_im: String,
    pub radius: String,
    pub nodes: usize,
    pub residual_diag: f64,
    pub closure_gap: f64,
}

impl SingularityEstimate {
    pub fn report(&self, digits: u32) -> EstimateReport {
        EstimateReport {
            x_re: mp::format_real(self.location.real(), digits),
            x_im: mp::format_real(self.location.imag(), digits),
            kind: self.kind,
            method: self.method,
            h_re: self.h.as_ref().map(|h| mp::format_real(h.real(), digits)),
            h_im: self.h.as_ref().map(|h| mp::format_real(h.imag(), digits)),
            center_re: mp::format_real(self.center.real(), digits),
            center_im: mp::format_real(self.center.imag(), digits),
            radius: mp::format_real(&self.radius, 6),
            nodes: self.nodes,
            residual_diag: self.residual_diag,
            closure_gap: self.closure_gap,
        }
    }
}

/// Contour settings.
#[derive(Clone, Debug)]
pub struct ContourConfig {
    pub radius: Float,
    /// M: the rule uses 2M nodes.
    pub half_nodes: usize,
    /// Taylor coefficients b₀..b_M per step, on the loop and on the approach.
    pub taylor_terms: usize,
    /// Straight-line steps from the seed to the start node centre + r, used
    /// when the seed is elsewhere.
    pub approach_steps: usize,
    pub walk_options: WalkOptions,
    /// Error out (non-analyticity) when |full − half rule| exceeds this
    /// multiple of r.
    pub stability_tolerance: Option<f64>,
}

impl ContourConfig {
    pub fn new(radius: Float, half_nodes: usize, taylor_terms: usize) -> Self {
        ContourConfig {
            radius,
            half_nodes,
            taylor_terms,
            approach_steps: 1000,
            walk_options: WalkOptions::default(),
            stability_tolerance: Some(1e-2),
        }
    }

    pub fn approach_steps(mut self, steps: usize) -> Self {
        self.approach_steps = steps;
        self
    }

    pub fn walk_options(mut self, options: WalkOptions) -> Self {
        self.walk_options = options;
        self
    }

    pub fn stability_tolerance(mut self, tol: Option<f64>) -> Self {
        self.stability_tolerance = tol;
        self
    }
}

/// Trapezoidal contour sums for several functionals at once.
#[derive(Clone, Debug)]
pub struct ContourSums {
    pub values: Vec<Complex>,
    pub half_rule: Vec<Complex>,
    pub closure_gap: f64,
    /// State at the start node on arrival (before the loop).
    pub start: SolutionState,
}

/// Unit-circle node offsets r e^{πim/M}, m = 0..2M−1.
fn node_offsets(radius: &Float, half_nodes: usize, ctx: &PrecisionContext) -> Vec<Complex> {
    let pi = ctx.pi();
    (0..2 * half_nodes)
        .map(|m| {
            let theta = ctx.real(&pi * m as u32) / half_nodes as u32;
            let (s, c) = theta.sin_cos(ctx.real(0));
            ctx.complex((c * radius, s * radius))
        })
        .collect()
}

/// Trapezoidal rule (1/2M) Σ w_m F(c + w_m) for a closed-form integrand.
pub fn trapezoid_contour<F>(center: &Complex, radius: &Float, half_nodes: usize, ctx: &PrecisionContext, f: F) -> Complex
where
    F: Fn(&Complex) -> Complex,
{
    let mut sum = ctx.complex(0);
    for w in node_offsets(radius, half_nodes, ctx) {
        let x = ctx.complex(center + &w);
        sum += w * f(&x);
    }
    sum / (2 * half_nodes) as u32
}

/// Walks from `seed` to the start node, once around the circle, and returns
/// the trapezoidal sums for each functional.
pub fn contour_sums(
    center: &Complex,
    seed: &SolutionState,
    params: &ProblemParams,
    config: &ContourConfig,
    functionals: &[Functional],
    ctx: &PrecisionContext,
) -> Result<ContourSums> {
    if config.half_nodes < 2 {
        return Err(Error::InvalidParameter("need at least 4 contour nodes".into()));
    }
    if functionals.contains(&Functional::HResidue) && params.mu_nonnegative_integer() != Some(1) {
        return Err(Error::HResidueRequiresMuOne);
    }
    let offsets = node_offsets(&config.radius, config.half_nodes, ctx);
    let start_x = ctx.complex(center + &offsets[0]);
    let mut walker = Walker::with_options(seed.clone(), params, ctx, config.walk_options)?;
    if walker.state().x != start_x {
        walker.walk_segment(&start_x, config.approach_steps, config.taylor_terms)?;
    }
    let start = walker.state().clone();

    let n = offsets.len();
    let mut values = vec![ctx.complex(0); functionals.len()];
    let mut half = vec![ctx.complex(0); functionals.len()];
    for m in 0..n {
        if m > 0 {
            let target = ctx.complex(center + &offsets[m]);
            let h = ctx.complex(&target - &walker.state().x);
            walker.step(&h, config.taylor_terms)?;
        }
        let state = walker.state();
        for (j, f) in functionals.iter().enumerate() {
            let v = ctx.complex(&offsets[m] * f.apply(state, ctx));
            if m % 2 == 0 {
                half[j] += &v;
            }
            values[j] += v;
        }
    }
    // close the loop
    let h = ctx.complex(&start_x - &walker.state().x);
    walker.step(&h, config.taylor_terms)?;
    let gap = mp::abs(&ctx.complex(&walker.state().y - &start.y)) / mp::abs(&start.y);

    for v in values.iter_mut() {
        *v /= n as u32;
    }
    for v in half.iter_mut() {
        *v /= (n / 2) as u32;
    }
    if let Some(tol) = config.stability_tolerance {
        let limit = tol * config.radius.to_f64();
        for (v, hv) in values.iter().zip(&half) {
            let d = mp::abs(&ctx.complex(v - hv)).to_f64();
            if !(d <= limit) {
                return Err(Error::NonAnalytic(format!("{d:.3e}")));
            }
        }
    }
    Ok(ContourSums {
        values,
        half_rule: half,
        closure_gap: gap.to_f64(),
        start,
    })
}

fn pole_kind(params: &ProblemParams) -> SingularityKind {
    match params.mu_nonnegative_integer() {
        Some(0) | Some(1) => SingularityKind::DoublePole,
        _ => SingularityKind::LogCorrectedPole,
    }
}

/// Contour estimate of the singularity (or zero) inside |x − center| = r.
///
/// For [`Functional::HResidue`] the location is left at the centre and the
/// residue is returned in `h`.
pub fn contour_locate(
    center: &Complex,
    seed: &SolutionState,
    params: &ProblemParams,
    config: &ContourConfig,
    functional: Functional,
    ctx: &PrecisionContext,
) -> Result<SingularityEstimate> {
    let sums = contour_sums(center, seed, params, config, &[functional], ctx)?;
    let value = sums.values[0].clone();
    let diag = mp::abs(&ctx.complex(&value - &sums.half_rule[0])).to_f64();
    let (location, kind, h) = match functional {
        Functional::PoleLocation => (value, pole_kind(params), None),
        Functional::HResidue => (ctx.complex(center), pole_kind(params), Some(value)),
        Functional::ZeroLocation => (value, SingularityKind::Zero, None),
    };
    Ok(SingularityEstimate {
        location,
        kind,
        h,
        method: Method::Contour,
        center: ctx.complex(center),
        radius: ctx.real(&config.radius),
        nodes: config.half_nodes,
        residual_diag: diag,
        closure_gap: sums.closure_gap,
    })
}

/// Solves L = x_j + (1/28)μ(μ−1) x_j^{μ−1} (r + x̃ − x_j)⁶ for x_j, where L is
/// the raw contour value in `estimate.location` and x̃ its centre.
pub fn log_corrected_locate(
    estimate: &SingularityEstimate,
    params: &ProblemParams,
    ctx: &PrecisionContext,
) -> Result<SingularityEstimate> {
    let mu = params.mu_float(ctx);
    let coef = ctx.real(&mu * ctx.real(&mu - 1u32)) / 28u32;
    if coef.is_zero() {
        return Ok(estimate.clone());
    }
    let l = ctx.complex(&estimate.location);
    let shift = ctx.complex(&estimate.center + &estimate.radius);
    let mu1 = ctx.real(&mu - 1u32);
    let mu2 = ctx.real(&mu - 2u32);
    let g = |x: &Complex| -> (Complex, Complex) {
        let d = ctx.complex(&shift - x);
        let d5 = pow_small(&d, 5, ctx);
        let d6 = ctx.complex(&d5 * &d);
        let p1 = mp::powf(x, &mu1);
        let p2 = mp::powf(x, &mu2);
        let val = ctx.complex(x - &l) + ctx.complex(&p1 * &d6) * &coef;
        let dp = ctx.complex(&p2 * &d6) * &mu1 - ctx.complex(&p1 * &d5) * 6u32;
        let der = ctx.complex(1) + dp * &coef;
        (val, der)
    };
    let x = newton(l.clone(), g, ctx, "log-corrected location")?;
    let mut out = estimate.clone();
    out.location = x;
    Ok(out)
}

fn pow_small(z: &Complex, n: u32, ctx: &PrecisionContext) -> Complex {
    let mut acc = ctx.complex(1);
    for _ in 0..n {
        acc *= z;
    }
    acc
}

fn newton<G>(mut x: Complex, g: G, ctx: &PrecisionContext, what: &'static str) -> Result<Complex>
where
    G: Fn(&Complex) -> (Complex, Complex),
{
    let tol = ctx.real(Float::u_exp(1, -(ctx.bits() as i32) + 8));
    let max_iter = 200;
    for _ in 0..max_iter {
        let (val, der) = g(&x);
        if der.is_zero() {
            break;
        }
        let mut dx = val / der;
        let scale = mp::abs(&x).max(&ctx.real(1));
        // damp wild steps
        let len = mp::abs(&dx);
        if len > ctx.real(&scale / 2u32) {
            dx *= ctx.real(&scale / 2u32) / &len;
        }
        x -= &dx;
        if mp::abs(&dx) <= ctx.real(&tol * &scale) {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        what,
        iterations: max_iter,
    })
}

/// Solves y_probe = (x − x_j)⁻² + (x_j^μ/10)(x − x_j)² + (μ/6) x_j^{μ−1}(x − x_j)³
/// for x_j by Newton from `x_guess`, with x = `x_probe`.
pub fn local_expansion_refine(
    x_probe: &Complex,
    y_probe: &Complex,
    x_guess: &Complex,
    params: &ProblemParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let mu = params.mu_float(ctx);
    let mu1 = ctx.real(&mu - 1u32);
    let mu2 = ctx.real(&mu - 2u32);
    let xp = ctx.complex(x_probe);
    let yp = ctx.complex(y_probe);
    let integral_mu = params.mu_nonnegative_integer();
    let power = |x: &Complex, e: &Float, k: i64| -> Complex {
        // exact integer powers avoid a branch for integral μ (x_j may be 0)
        match integral_mu {
            Some(m) => {
                let n = m as i64 - k;
                if n < 0 {
                    if x.is_zero() {
                        ctx.complex(0)
                    } else {
                        ctx.complex(1) / pow_small(x, (-n) as u32, ctx)
                    }
                } else {
                    pow_small(x, n as u32, ctx)
                }
            }
            None => mp::powf(x, e),
        }
    };
    let g = |xj: &Complex| -> (Complex, Complex) {
        let d = ctx.complex(&xp - xj);
        let d2 = ctx.complex(&d * &d);
        let d3 = ctx.complex(&d2 * &d);
        let p0 = power(xj, &mu, 0);
        let p1 = power(xj, &mu1, 1);
        let p2 = power(xj, &mu2, 2);
        let inv2 = ctx.complex(1) / &d2;
        let val = ctx.complex(&inv2 - &yp) + ctx.complex(&p0 * &d2) / 10u32
            + ctx.complex(&p1 * &d3) * ctx.real(&mu / 6u32);
        // derivative in x_j (note dd/dx_j = −1)
        let inv3 = ctx.complex(&inv2 / &d);
        let der = inv3 * 2u32 + ctx.complex(&p1 * &d2) * ctx.real(&mu / 10u32)
            - ctx.complex(&p0 * &d) / 5u32
            + ctx.complex(&p2 * &d3) * ctx.real(ctx.real(&mu * &mu1) / 6u32)
            - ctx.complex(&p1 * &d2) * ctx.real(&mu / 2u32);
        (val, der)
    };
    newton(ctx.complex(x_guess), g, ctx, "local expansion refinement")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalfPlane {
    Upper,
    Lower,
}

/// Axis-aligned search window in the x-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn contains(&self, x: &Complex) -> bool {
        let (re, im) = (x.real().to_f64(), x.imag().to_f64());
        re >= self.re_min && re <= self.re_max && im >= self.im_min && im <= self.im_max
    }

    /// Square window of half-width `half` around `c`.
    pub fn around(c: (f64, f64), half: f64) -> Self {
        Window {
            re_min: c.0 - half,
            re_max: c.0 + half,
            im_min: c.1 - half,
            im_max: c.1 + half,
        }
    }
}

/// Roots in `window` of the first-array pole equation
///
/// ```text
/// K± e^{±i√3 z} z^{−ν} = −12 ± i√3 ν(2ν − 124/15)/z,   z = λ x^{(μ+4)/4},
/// ```
///
/// upper sign for the upper half-plane. The equation is solved in w = ln x,
/// seeded from the ladder of logarithm branches of the frozen equation with
/// right-hand side −12.
pub fn predict_singularities(
    params: &ProblemParams,
    stokes: &StokesResult,
    half_plane: HalfPlane,
    window: &Window,
    ctx: &PrecisionContext,
) -> Result<Vec<Complex>> {
    let work = PrecisionContext::new(2 * ctx.target_digits());
    let c = &work;
    let mu = params.mu_float(c);
    let nu = params.nu(c);
    let lambda = params.lambda(c);
    let e = ctx_real_div(c, &(c.real(&mu + 4u32)), 4);
    let s3 = c.real(3).sqrt();
    let sign = match half_plane {
        HalfPlane::Upper => 1i32,
        HalfPlane::Lower => -1,
    };
    let k = match half_plane {
        HalfPlane::Upper => c.complex(&stokes.k_plus),
        HalfPlane::Lower => c.complex(&stokes.k_minus),
    };
    let ln_k = mp::principal_ln(&k);
    let alpha = c.real(&nu * ctx_real_div(c, &c.real(c.real(&nu * 30u32) - 124u32), 15)) * &s3;
    let i_s3 = c.complex((0, c.real(&s3 * sign)));
    let ln12 = c.real(12).ln();
    let ln_lambda = c.real(lambda.clone().ln());
    let pi = c.pi();

    // H(w) = ln K + σ z − ν ln λ − ν e w − ln(−12) − ln(RHS/−12) − 2πik
    let h = |w: &Complex, branch: i64, frozen: bool| -> (Complex, Complex) {
        let zexp = ctx_complex_mul(c, w, &e).exp();
        let z = c.complex(&zexp * &lambda);
        let dz = c.complex(&z * &e);
        let mut val = c.complex(&ln_k + c.complex(&i_s3 * &z)) - c.complex(&ln_lambda * &nu);
        val -= ctx_complex_mul(c, w, &c.real(&nu * &e));
        val -= c.complex((ln12.clone(), c.real(&pi * (2 * branch + 1) as i64)));
        let mut der = c.complex(&i_s3 * &dz) - c.real(&nu * &e);
        if !frozen {
            // RHS/−12 = 1 ∓ i α/(12 z)
            let q = c.complex((0, c.real(&alpha * -sign))) / c.complex(&z * 12u32);
            let ratio = c.complex(1) + &q;
            val -= mp::principal_ln(&ratio);
            // d q/dw = −e q
            let dq = c.complex(&q * &e) * -1i32;
            der -= dq / ratio;
        }
        (val, der)
    };

    // |z| bound over the window gives the branch range
    let corners = [
        (window.re_min, window.im_min),
        (window.re_min, window.im_max),
        (window.re_max, window.im_min),
        (window.re_max, window.im_max),
    ];
    let rmax = corners.iter().map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max);
    let zmax = lambda.to_f64() * rmax.powf(e.to_f64());
    let kmax = (3f64.sqrt() * zmax / (2.0 * std::f64::consts::PI)).ceil() as i64 + 3;

    let mut roots: Vec<Complex> = Vec::new();
    for branch in -kmax..=kmax {
        // frozen equation, seeded from σz = 2πi(k + 1/2) + ln 12 − ln K
        let seed_z = c.complex((ln12.clone(), c.real(&pi * (2 * branch + 1) as i64))) - &ln_k;
        let seed_z = seed_z / &i_s3;
        if seed_z.is_zero() {
            continue;
        }
        let log_seed = mp::principal_ln(&(seed_z / &lambda));
        // arg z ranges over (−eπ, eπ] on the principal x-sheet
        let sheets = (e.to_f64() / 2.0).ceil() as i64 + 1;
        for sheet in -sheets..=sheets {
            let lifted = c.complex(&log_seed + c.complex((0, c.real(&pi * (2 * sheet)))));
            let w0 = ctx_complex_div(c, &lifted, &e);
            let Ok(w1) = newton(w0, |w| h(w, branch, true), c, "frozen pole equation") else {
                continue;
            };
            let Ok(w) = newton(w1, |w| h(w, branch, false), c, "pole equation") else {
                continue;
            };
            // x = e^w on the principal sheet only
            let im = w.imag().to_f64();
            if im <= -std::f64::consts::PI || im > std::f64::consts::PI {
                continue;
            }
            let x = w.exp();
            let in_half = match half_plane {
                HalfPlane::Upper => *x.imag() >= 0,
                HalfPlane::Lower => *x.imag() <= 0,
            };
            if !in_half || !window.contains(&x) {
                continue;
            }
            let dup = roots
                .iter()
                .any(|r| mp::abs(&c.complex(r - &x)).to_f64() < 1e-8 * (1.0 + mp::abs(&x).to_f64()));
            if !dup {
                roots.push(ctx.complex(&x));
            }
        }
    }
    if roots.is_empty() {
        return Err(Error::NoRootsInWindow);
    }
    roots.sort_by(|a, b| mp::abs(a).partial_cmp(&mp::abs(b)).unwrap_or(std::cmp::Ordering::Equal));
    Ok(roots)
}

fn ctx_real_div(c: &PrecisionContext, x: &Float, d: u32) -> Float {
    c.real(x / d)
}

fn ctx_complex_mul(c: &PrecisionContext, z: &Complex, f: &Float) -> Complex {
    c.complex(z * f)
}

fn ctx_complex_div(c: &PrecisionContext, z: &Complex, f: &Float) -> Complex {
    c.complex(z / f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse_rational;

    fn params(mu: &str) -> ProblemParams {
        ProblemParams::minus(parse_rational(mu).unwrap()).unwrap()
    }

    #[test]
    fn zero_residue_identity() {
        // y = (x − a) g(x): x y'/y has residue a at x = a
        let ctx = PrecisionContext::new(30);
        let a = ctx.complex((0.3, -0.2));
        let center = ctx.complex(0);
        let r = ctx.real(0.5);
        let v = trapezoid_contour(&center, &r, 200, &ctx, |x| {
            let d = ctx.complex(x - &a);
            let g = ctx.complex(x * x) + 2u32;
            let dg = ctx.complex(x * 2u32);
            let y = ctx.complex(&d * &g);
            let dy = g + d * dg;
            ctx.complex(x * &dy) / y
        });
        assert!(mp::abs(&(v - &a)).to_f64() < 1e-25);
    }

    #[test]
    fn h_residue_identity_for_laurent_model() {
        // y = d⁻² + (x_j/10) d² + d³/6 + h d⁴ with d = x − x_j
        let ctx = PrecisionContext::new(30);
        let xj = ctx.complex((-2.4, 0.1));
        let h = ctx.complex((0.0621, 0.01));
        let r = ctx.real(0.25);
        let v = trapezoid_contour(&xj, &r, 200, &ctx, |x| {
            let d = ctx.complex(x - &xj);
            let d2 = ctx.complex(&d * &d);
            let d3 = ctx.complex(&d2 * &d);
            let y = ctx.complex(1) / &d2 + ctx.complex(&xj * &d2) / 10u32 + ctx.complex(&d3 / 6u32)
                + ctx.complex(&h * &d3) * &d;
            let dy = ctx.complex(-2) / &d3 + ctx.complex(&xj * &d) / 5u32 + ctx.complex(&d2 / 2u32)
                + ctx.complex(&h * &d3) * 4u32;
            let dy3 = ctx.complex(&dy * &dy) * &dy;
            dy3 / y / 56u32
        });
        assert!(mp::abs(&(v - &h)).to_f64() < 1e-20, "{}", mp::format_complex(&h, 10));
    }

    #[test]
    fn h_residue_needs_mu_one() {
        let ctx = PrecisionContext::new(20);
        let seed = SolutionState::new(ctx.complex(1), ctx.complex(1), ctx.complex(0));
        let cfg = ContourConfig::new(ctx.real(0.5), 10, 10);
        let r = contour_locate(&ctx.complex(0.5), &seed, &params("15/7"), &cfg, Functional::HResidue, &ctx);
        assert_eq!(r.unwrap_err(), Error::HResidueRequiresMuOne);
    }

    #[test]
    fn local_refine_on_exact_double_pole() {
        let ctx = PrecisionContext::new(30);
        // μ = 0: the model is d⁻² + d²/10 exactly
        let p = params("0");
        let a = ctx.complex((-1.5, 0.7));
        let xp = ctx.complex(&a + ctx.complex((0.01, 0.0)));
        let d = ctx.complex(&xp - &a);
        let d2 = ctx.complex(&d * &d);
        let y = ctx.complex(1) / &d2 + d2 / 10u32;
        let guess = ctx.complex(&a + ctx.complex((0.001, -0.001)));
        let found = local_expansion_refine(&xp, &y, &guess, &p, &ctx).unwrap();
        assert!(mp::abs(&(found - &a)).to_f64() < 1e-35);
    }

    #[test]
    fn log_correction_is_identity_for_mu_zero_and_one() {
        let ctx = PrecisionContext::new(20);
        for mu in ["0", "1"] {
            let est = SingularityEstimate {
                location: ctx.complex((-2.0, 1.0)),
                kind: SingularityKind::DoublePole,
                h: None,
                method: Method::Contour,
                center: ctx.complex((-2.1, 1.0)),
                radius: ctx.real(0.5),
                nodes: 10,
                residual_diag: 0.0,
                closure_gap: 0.0,
            };
            let out = log_corrected_locate(&est, &params(mu), &ctx).unwrap();
            assert_eq!(out.location, est.location);
        }
    }

    #[test]
    fn window_membership() {
        let ctx = PrecisionContext::new(20);
        let w = Window::around((-2.7, 1.7), 0.5);
        assert!(w.contains(&ctx.complex((-2.7, 1.6))));
        assert!(!w.contains(&ctx.complex((-2.0, 1.6))));
    }
}
