//! Taylor-series continuation of solutions of y'' = 6y² − x^μ along complex
//! paths.
//!
//! At each point x₀ the coefficients of y = Σ b_m (x − x₀)^m follow from
//!
//! ```text
//! (m+2)(m+1) b_{m+2} = 6 Σ_{ℓ=0}^m b_ℓ b_{m−ℓ} − C(μ, m) x₀^{μ−m}
//! ```
//!
//! with b₀ = y(x₀), b₁ = y'(x₀). For non-integer μ the power x₀^{μ−m} is taken
//! on the branch obtained by continuing log x along the path.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{self, PrecisionContext};
use crate::series::ProblemParams;

/// (x, y(x), y'(x)): enough to restart continuation anywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionState {
    pub x: Complex,
    pub y: Complex,
    pub dy: Complex,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateReport {
    pub x_re: String,
    pub x_im: String,
    pub y_re: String,
    pub y_im: String,
    pub dy_re: String,
    pub dy_im: String,
}

impl SolutionState {
    pub fn new(x: Complex, y: Complex, dy: Complex) -> Self {
        SolutionState { x, y, dy }
    }

    /// The same state rounded or extended to the precision of `ctx`.
    pub fn at(&self, ctx: &PrecisionContext) -> Self {
        SolutionState {
            x: ctx.complex(&self.x),
            y: ctx.complex(&self.y),
            dy: ctx.complex(&self.dy),
        }
    }

    pub fn report(&self, digits: u32) -> StateReport {
        StateReport {
            x_re: mp::format_real(self.x.real(), digits),
            x_im: mp::format_real(self.x.imag(), digits),
            y_re: mp::format_real(self.y.real(), digits),
            y_im: mp::format_real(self.y.imag(), digits),
            dy_re: mp::format_real(self.dy.real(), digits),
            dy_im: mp::format_real(self.dy.imag(), digits),
        }
    }

    fn check(&self, ctx: &PrecisionContext) -> Result<()> {
        let limit = 2.0 * ctx.working_digits() as f64 * std::f64::consts::LOG2_10;
        let finite = |z: &Complex| z.real().is_finite() && z.imag().is_finite();
        if !finite(&self.y) || !finite(&self.dy) || mp::log2_abs(&self.y) > limit || mp::log2_abs(&self.dy) > limit
        {
            return Err(Error::SingularityProximity(mp::format_complex(&self.x, 12)));
        }
        Ok(())
    }
}

/// Polygonal path: the walk goes from the seed through each waypoint in
/// turn, with the same number of uniform steps on every segment.
#[derive(Clone, Debug)]
pub struct PathPlan {
    waypoints: Vec<Complex>,
    steps_per_segment: usize,
    taylor_terms: usize,
}

impl PathPlan {
    pub fn new(waypoints: Vec<Complex>, steps_per_segment: usize, taylor_terms: usize) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::InvalidParameter("path needs at least one waypoint".into()));
        }
        if taylor_terms < 4 {
            return Err(Error::InvalidParameter(format!(
                "need at least 4 Taylor terms, got {taylor_terms}"
            )));
        }
        if steps_per_segment == 0 {
            return Err(Error::InvalidParameter("steps per segment must be positive".into()));
        }
        if waypoints.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("consecutive waypoints coincide".into()));
        }
        Ok(PathPlan {
            waypoints,
            steps_per_segment,
            taylor_terms,
        })
    }

    /// Straight segment to `to`.
    pub fn straight(to: Complex, steps: usize, taylor_terms: usize) -> Result<Self> {
        Self::new(vec![to], steps, taylor_terms)
    }

    pub fn waypoints(&self) -> &[Complex] {
        &self.waypoints
    }

    pub fn steps_per_segment(&self) -> usize {
        self.steps_per_segment
    }

    pub fn taylor_terms(&self) -> usize {
        self.taylor_terms
    }
}

/// Coefficients C(μ, m) x₀^{μ−m}, m = 0..count−1, of the Taylor expansion of
/// x^μ at x₀. `log_x0` selects the branch for non-integer μ.
fn source_coefficients(
    params: &ProblemParams,
    x0: &Complex,
    log_x0: Option<&Complex>,
    count: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Complex>> {
    let mut c = Vec::with_capacity(count);
    if let Some(k) = params.mu_nonnegative_integer() {
        // exact binomials; valid at x₀ = 0
        let mut binom = Float::with_val(ctx.bits(), 1);
        for m in 0..count {
            if m as u32 > k {
                c.push(ctx.complex(0));
                continue;
            }
            let power = pow_u(x0, k - m as u32, ctx);
            c.push(power * &binom);
            binom *= k - m as u32;
            binom /= (m + 1) as u32;
        }
        return Ok(c);
    }
    if x0.is_zero() {
        return Err(Error::BranchPoint("0".into()));
    }
    let log = match log_x0 {
        Some(l) => ctx.complex(l),
        None => mp::principal_ln(x0),
    };
    let mu = params.mu_float(ctx);
    let mut cur = (log * &mu).exp();
    let inv_x0 = ctx.complex(1) / x0;
    for m in 0..count {
        c.push(cur.clone());
        let factor = ctx.real(&mu - m as u32) / (m + 1) as u32;
        cur *= &inv_x0;
        cur *= &factor;
    }
    Ok(c)
}

fn pow_u(x: &Complex, n: u32, ctx: &PrecisionContext) -> Complex {
    let mut acc = ctx.complex(1);
    let mut base = ctx.complex(x);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = ctx.complex(&base * &base);
        e >>= 1;
    }
    acc
}

fn taylor_with_log(
    state: &SolutionState,
    m_max: usize,
    params: &ProblemParams,
    log_x0: Option<&Complex>,
    ctx: &PrecisionContext,
) -> Result<Vec<Complex>> {
    if m_max < 1 {
        return Err(Error::InvalidParameter("need at least b_0 and b_1".into()));
    }
    let source = source_coefficients(params, &state.x, log_x0, m_max.saturating_sub(1), ctx)?;
    let mut b: Vec<Complex> = Vec::with_capacity(m_max + 1);
    b.push(ctx.complex(&state.y));
    b.push(ctx.complex(&state.dy));
    for m in 0..m_max.saturating_sub(1) {
        let mut conv = ctx.complex(0);
        for l in 0..=m {
            conv += ctx.complex(&b[l] * &b[m - l]);
        }
        let rhs = conv * 6u32 - &source[m];
        b.push(rhs / ((m + 2) * (m + 1)) as u32);
    }
    Ok(b)
}

/// Taylor coefficients b₀..b_M at `state.x`, with x₀^{μ−m} on the principal
/// branch. Inside a walk the walker's continued logarithm is used instead.
pub fn taylor_expand(
    state: &SolutionState,
    m_max: usize,
    params: &ProblemParams,
    ctx: &PrecisionContext,
) -> Result<Vec<Complex>> {
    taylor_with_log(state, m_max, params, None, ctx)
}

/// Radius-of-convergence estimate from the top quartile of coefficients:
/// min over m ≥ ⌊3M/4⌋ of (|b_m|/s)^{−1/m} with s = max(|b₀|, |b₁|).
/// `None` when the tail vanishes (polynomial data).
pub fn radius_estimate(b: &[Complex]) -> Option<f64> {
    let m_max = b.len() - 1;
    let scale = mp::log2_abs(&b[0]).max(mp::log2_abs(&b[1]));
    if !scale.is_finite() {
        return None;
    }
    let mut best: Option<f64> = None;
    for (m, c) in b.iter().enumerate().skip(((3 * m_max) / 4).max(2)) {
        let l = mp::log2_abs(c);
        if l.is_finite() {
            let r = (-(l - scale) / m as f64).exp2();
            best = Some(best.map_or(r, |v: f64| v.min(r)));
        }
    }
    best
}

/// y and y' at x₀ + h from the coefficients at x₀.
fn sum_taylor(b: &[Complex], h: &Complex, ctx: &PrecisionContext) -> (Complex, Complex) {
    let mut y = ctx.complex(0);
    let mut dy = ctx.complex(0);
    for (m, c) in b.iter().enumerate().rev() {
        y *= h;
        y += c;
        if m >= 1 {
            dy *= h;
            dy += ctx.complex(c * m as u32);
        }
    }
    (y, dy)
}

/// Single Taylor step with principal-branch powers.
pub fn advance(
    state: &SolutionState,
    step: &Complex,
    m_max: usize,
    params: &ProblemParams,
    ctx: &PrecisionContext,
) -> Result<SolutionState> {
    let mut w = Walker::new(state.clone(), params, ctx)?;
    w.step(step, m_max)?;
    Ok(w.into_state())
}

/// Walk along `plan` starting from `seed`.
pub fn walk(
    seed: &SolutionState,
    plan: &PathPlan,
    params: &ProblemParams,
    ctx: &PrecisionContext,
) -> Result<SolutionState> {
    let mut w = Walker::new(seed.clone(), params, ctx)?;
    w.follow(plan)?;
    Ok(w.into_state())
}

/// Knobs of a [`Walker`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkOptions {
    /// Reject steps longer than this fraction of the estimated radius of
    /// convergence; `None` disables the check.
    pub radius_fraction: Option<f64>,
    /// Radius of the disk around the origin that paths may not enter when μ
    /// is not a non-negative integer.
    pub exclusion_radius: f64,
    pub record_trace: bool,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions {
            radius_fraction: Some(1.0 / 3.0),
            exclusion_radius: 1e-3,
            record_trace: false,
        }
    }
}

/// Owns a moving solution state and the branch of log x along the path.
#[derive(Clone, Debug)]
pub struct Walker {
    params: ProblemParams,
    ctx: PrecisionContext,
    state: SolutionState,
    log_x: Option<Complex>,
    options: WalkOptions,
    error_bound: Float,
    steps: usize,
    trace: Vec<SolutionState>,
}

impl Walker {
    pub fn new(seed: SolutionState, params: &ProblemParams, ctx: &PrecisionContext) -> Result<Self> {
        Self::with_options(seed, params, ctx, WalkOptions::default())
    }

    pub fn with_options(
        seed: SolutionState,
        params: &ProblemParams,
        ctx: &PrecisionContext,
        options: WalkOptions,
    ) -> Result<Self> {
        let state = seed.at(ctx);
        state.check(ctx)?;
        let integral = params.mu_nonnegative_integer().is_some();
        if !integral && mp::abs(&state.x).to_f64() <= options.exclusion_radius {
            return Err(Error::BranchPoint(mp::format_complex(&state.x, 10)));
        }
        let log_x = if state.x.is_zero() {
            None
        } else {
            Some(mp::principal_ln(&state.x))
        };
        let trace = if options.record_trace {
            vec![state.clone()]
        } else {
            Vec::new()
        };
        Ok(Walker {
            params: params.clone(),
            ctx: *ctx,
            state,
            log_x,
            options,
            error_bound: ctx.real(0),
            steps: 0,
            trace,
        })
    }

    pub fn state(&self) -> &SolutionState {
        &self.state
    }

    pub fn into_state(self) -> SolutionState {
        self.state
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn options(&self) -> &WalkOptions {
        &self.options
    }

    pub fn set_options(&mut self, options: WalkOptions) {
        self.options = options;
    }

    /// The continued value of log x at the current point.
    pub fn log_x(&self) -> Option<&Complex> {
        self.log_x.as_ref()
    }

    /// Sum of the per-step tail estimates so far.
    pub fn error_bound(&self) -> &Float {
        &self.error_bound
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn trace(&self) -> &[SolutionState] {
        &self.trace
    }

    /// Taylor coefficients b₀..b_M at the current point, on the walker's branch.
    pub fn taylor(&self, m_max: usize) -> Result<Vec<Complex>> {
        taylor_with_log(&self.state, m_max, &self.params, self.log_x.as_ref(), &self.ctx)
    }

    fn check_segment(&self, from: &Complex, to: &Complex) -> Result<()> {
        if self.params.mu_nonnegative_integer().is_some() {
            return Ok(());
        }
        // distance from the origin to the segment [from, to]
        let ctx = &self.ctx;
        let d = ctx.complex(to - from);
        let dd = ctx.real(d.norm_ref());
        let t = if dd.is_zero() {
            ctx.real(0)
        } else {
            let minus_from = ctx.complex(-from);
            let proj = ctx.real((minus_from * d.clone().conj()).real());
            let t = proj / &dd;
            t.clamp(&ctx.real(0), &ctx.real(1))
        };
        let closest = ctx.complex(from + ctx.complex(&d * &t));
        if mp::abs(&closest).to_f64() <= self.options.exclusion_radius {
            return Err(Error::BranchPoint(mp::format_complex(&closest, 10)));
        }
        Ok(())
    }

    /// One Taylor step of length `h` with `m_max` + 1 coefficients.
    pub fn step(&mut self, h: &Complex, m_max: usize) -> Result<()> {
        if h.is_zero() {
            return Ok(());
        }
        let ctx = self.ctx;
        let h = ctx.complex(h);
        let x1 = ctx.complex(&self.state.x + &h);
        self.check_segment(&self.state.x, &x1)?;
        let b = self.taylor(m_max)?;
        let step_len = mp::abs(&h).to_f64();
        if let (Some(frac), Some(rho)) = (self.options.radius_fraction, radius_estimate(&b)) {
            if step_len > frac * rho {
                return Err(Error::StepTooLarge {
                    step: format!("{step_len:.3e}"),
                    radius: format!("{rho:.3e}"),
                });
            }
        }
        let (y, dy) = sum_taylor(&b, &h, &ctx);
        let hf = mp::abs(&h);
        let tail = mp::abs(&b[m_max]) * ctx.real(hf.clone().pow(m_max as u32))
            + mp::abs(&b[m_max - 1]) * ctx.real(hf.clone().pow((m_max - 1) as u32));
        // largest term of the series; the tail must be below it
        let mut scale = ctx.real(0);
        let mut hp = ctx.real(1);
        for c in &b {
            let t = mp::abs(c) * &hp;
            if t > scale {
                scale = t;
            }
            hp *= &hf;
        }
        if tail > scale && !scale.is_zero() {
            return Err(Error::SingularityProximity(mp::format_complex(&x1, 12)));
        }
        self.error_bound += &tail;

        self.log_x = match self.log_x.take() {
            Some(l) => {
                let ratio = ctx.complex(&x1 / &self.state.x);
                Some(l + mp::principal_ln(&ratio))
            }
            None if !x1.is_zero() => Some(mp::principal_ln(&x1)),
            None => None,
        };
        if x1.is_zero() {
            self.log_x = None;
        }
        let next = SolutionState::new(x1, y, dy);
        next.check(&ctx)?;
        self.state = next;
        self.steps += 1;
        if self.options.record_trace {
            self.trace.push(self.state.clone());
        }
        Ok(())
    }

    /// `steps` uniform steps along the straight segment to `to`.
    pub fn walk_segment(&mut self, to: &Complex, steps: usize, m_max: usize) -> Result<()> {
        if steps == 0 {
            return Err(Error::InvalidParameter("steps must be positive".into()));
        }
        let ctx = self.ctx;
        let start = self.state.x.clone();
        let delta = ctx.complex(to - &start);
        for j in 1..=steps {
            // aim at start + j·delta/steps to avoid accumulating rounding
            let target = if j == steps {
                ctx.complex(to)
            } else {
                ctx.complex(&start + ctx.complex(&delta * j as u32) / steps as u32)
            };
            let h = ctx.complex(&target - &self.state.x);
            self.step(&h, m_max)?;
            self.state.x = target;
        }
        Ok(())
    }

    pub fn follow(&mut self, plan: &PathPlan) -> Result<()> {
        for wp in plan.waypoints() {
            self.walk_segment(wp, plan.steps_per_segment, plan.taylor_terms)?;
        }
        Ok(())
    }

    /// Straight walk to `to` with step lengths chosen so the last Taylor term
    /// stays below `tol` (relative to max(1, |y|)).
    pub fn walk_adaptive(&mut self, to: &Complex, m_max: usize, tol: f64) -> Result<usize> {
        let ctx = self.ctx;
        let target = ctx.complex(to);
        let mut count = 0usize;
        loop {
            let remaining = ctx.complex(&target - &self.state.x);
            let dist = mp::abs(&remaining).to_f64();
            if dist == 0.0 {
                return Ok(count);
            }
            let b = self.taylor(m_max)?;
            let scale = mp::log2_abs(&b[0]).max(0.0);
            let lb = mp::log2_abs(&b[m_max]).max(mp::log2_abs(&b[m_max - 1]));
            let mut h_len = if lb.is_finite() {
                ((tol.log2() + scale - lb) / m_max as f64).exp2()
            } else {
                dist
            };
            if let (Some(frac), Some(rho)) = (self.options.radius_fraction, radius_estimate(&b)) {
                h_len = h_len.min(frac * rho * 0.999);
            }
            let last = h_len >= dist;
            let h = if last {
                remaining
            } else {
                remaining * ctx.real(h_len / dist)
            };
            self.step(&h, m_max)?;
            if last {
                self.state.x = target.clone();
            }
            count += 1;
            if count > 10_000_000 {
                return Err(Error::NoConvergence {
                    what: "adaptive walk",
                    iterations: count,
                });
            }
        }
    }
}
