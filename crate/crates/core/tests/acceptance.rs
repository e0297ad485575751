//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p pplab --test acceptance --release`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rug::Complex;

use pplab::asymptotic::Evaluator;
use pplab::borel::{inequality_lhs, sigma_bound, verify_integral_equation, DEFAULT_C};
use pplab::continuation::{SolutionState, Walker};
use pplab::mp::{self, PrecisionContext};
use pplab::pade::build_pade;
use pplab::pipelines::{self, CaseOutput};
use pplab::reference::DigitCheck;
use pplab::series::{base_series, parse_rational, ProblemParams};
use pplab::singularity::{contour_locate, ContourConfig, Functional};
use pplab::stokes::{compute_stokes, exact_stokes_mu1};

const STOKES_MU1_MIN_DIGITS: f64 = 60.0;
const STOKES_MU1_BUDGET: Duration = Duration::from_secs(120);
const STOKES_MU157_BUDGET: Duration = Duration::from_secs(10);
const ORIGIN_BUDGET: Duration = Duration::from_secs(600);
const STEP_DOUBLING_TOL: f64 = 1e-60;
const PREDICTION_SPREAD: f64 = 0.2;
const HYPER_DIGITS: u32 = 240;
const HYPER_K: f64 = 1.0;
const HYPER_SLOPE_SPREAD: f64 = 0.1;
const BOREL_RESIDUAL_TOL: f64 = 1e-20;
const BOREL_ASYMPTOTE_TOL: f64 = 1e-3;
const BOREL_ACTIVE_TOL: f64 = 1e-12;
const INVARIANT_DIGITS: u32 = 30;
const INVARIANT_BUDGET: Duration = Duration::from_secs(300);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = fn() -> Result<Outcome, String>;

fn params(mu: &str) -> ProblemParams {
    ProblemParams::minus(parse_rational(mu).unwrap()).unwrap()
}

fn run_case(case: &str) -> Result<(CaseOutput, Vec<DigitCheck>), String> {
    let out = pipelines::run(case, None).map_err(|e| format!("{case}: {e}"))?;
    let checks = out.checks().map_err(|e| e.to_string())?;
    Ok((out, checks))
}

/// Digit checks of the named cases, restricted to `keys` when given.
fn digit_criterion(cases: &[&str], keys: Option<&[&str]>) -> Result<Outcome, String> {
    digit_outputs(cases, keys).map(|(o, _)| o)
}

fn digit_outputs(cases: &[&str], keys: Option<&[&str]>) -> Result<(Outcome, Vec<CaseOutput>), String> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut outputs = Vec::new();
    for case in cases {
        let (out, checks) = run_case(case)?;
        outputs.push(out);
        for c in checks {
            if keys.is_some_and(|k| !k.contains(&c.key.as_str())) {
                continue;
            }
            let ok = c.pass();
            pass &= ok;
            let d = c.matching_digits();
            if ok {
                parts.push(format!("{} ok", c.key));
            } else {
                parts.push(format!("{} MISMATCH ({d:.1} digits)", c.key));
            }
        }
    }
    Ok((Outcome::new(pass, parts.join(", ")), outputs))
}

fn abs_f64(z: &Complex) -> f64 {
    mp::abs(z).to_f64()
}

fn criterion_1() -> Result<Outcome, String> {
    let t = Instant::now();
    let (out, checks) = run_case("mu1-stokes")?;
    let el = t.elapsed();
    let ctx = PrecisionContext::new(out.digits);
    let k = out.value("K-").ok_or("no K-")?;
    let exact = exact_stokes_mu1(&ctx);
    let digits = (abs_f64(&exact) / abs_f64(&ctx.complex(k - &exact))).log10();
    let pass = digits >= STOKES_MU1_MIN_DIGITS && el <= STOKES_MU1_BUDGET && checks.iter().all(|c| c.pass());
    Ok(Outcome::new(
        pass,
        format!(
            "{digits:.1} digits at {} working digits in {:.1} s",
            ctx.working_digits(),
            el.as_secs_f64()
        ),
    ))
}

fn criterion_2() -> Result<Outcome, String> {
    let t = Instant::now();
    let o = digit_criterion(&["mu157-stokes"], None)?;
    let el = t.elapsed();
    Ok(Outcome::new(
        o.pass && el <= STOKES_MU157_BUDGET,
        format!("{} in {:.2} s", o.detail, el.as_secs_f64()),
    ))
}

fn criterion_3() -> Result<Outcome, String> {
    digit_criterion(&["mu4-stokes"], None)
}

fn criterion_4() -> Result<Outcome, String> {
    digit_criterion(&["mu1-seed", "mu157-seed"], Some(&["y(33)", "y'(33)", "y(6)", "y'(6)"]))
}

fn criterion_5() -> Result<Outcome, String> {
    let t = Instant::now();
    let o = digit_criterion(&["mu1-origin"], None)?;
    let el = t.elapsed();
    let ctx = PrecisionContext::new(pipelines::default_digits("mu1-origin"));
    let a = pipelines::mu1_origin(&ctx, 1000).map_err(|e| e.to_string())?;
    let b = pipelines::mu1_origin(&ctx, 2000).map_err(|e| e.to_string())?;
    let dy = abs_f64(&ctx.complex(&a.y - &b.y));
    let ddy = abs_f64(&ctx.complex(&a.dy - &b.dy));
    let pass = o.pass && dy.max(ddy) <= STEP_DOUBLING_TOL && el <= ORIGIN_BUDGET;
    Ok(Outcome::new(
        pass,
        format!(
            "{}; 1000 vs 2000 steps: |dy| {dy:.1e}, |dy'| {ddy:.1e}; {:.1} s",
            o.detail,
            el.as_secs_f64()
        ),
    ))
}

fn criterion_6() -> Result<Outcome, String> {
    let (o, outputs) = digit_outputs(&["mu1-zero", "mu1-p1", "mu1-p2"], None)?;
    let h = outputs[1].value("h1").ok_or("no h1")?;
    Ok(Outcome::new(
        o.pass,
        format!("{}; computed h1 = {}", o.detail, mp::format_complex(h, 12)),
    ))
}

fn criterion_7() -> Result<Outcome, String> {
    digit_criterion(
        &["mu157-p1", "mu157-p2"],
        Some(&[
            "p1 (r=1/2)",
            "p1 (r=1/10)",
            "p1 (r=1/100)",
            "p2 (r=1/2)",
            "p2 (r=1/10)",
            "p2 (r=1/100)",
            "x_j (local)",
        ]),
    )
}

fn criterion_8() -> Result<Outcome, String> {
    let stated = [
        ("mu157-predict", "p1", 0.002),
        ("mu157-predict", "p2", 0.0004),
        ("mu1-predict", "p1", 0.008),
        ("mu1-predict", "p2", 0.0007),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for case in ["mu157-predict", "mu1-predict"] {
        let (out, checks) = run_case(case)?;
        for c in checks.iter().filter(|c| c.key.starts_with("x near")) {
            pass &= c.pass();
            parts.push(format!(
                "{}/{} {}",
                out.mu,
                c.key,
                if c.pass() { "ok" } else { "MISMATCH" }
            ));
        }
        for (_, label, want) in stated.iter().filter(|s| s.0 == case) {
            let got = out
                .value(&format!("rel err {label}"))
                .map(|v| v.real().to_f64())
                .ok_or("missing rel err")?;
            let ok = (got / want - 1.0).abs() <= PREDICTION_SPREAD;
            pass &= ok;
            parts.push(format!("{}/{label} rel err {got:.2e} (stated {want})", out.mu));
        }
    }
    Ok(Outcome::new(pass, parts.join(", ")))
}

fn criterion_9() -> Result<Outcome, String> {
    digit_criterion(&["mu4-scan"], None)
}

fn criterion_10() -> Result<Outcome, String> {
    let p = params("1");
    let ctx = PrecisionContext::new(HYPER_DIGITS);
    let mut ev = Evaluator::new(&p, &ctx);
    let far = ev.eval_level0(&ctx.complex(200), None).map_err(|e| e.to_string())?;
    let mut w = Walker::new(far.state, &p, &ctx).map_err(|e| e.to_string())?;
    let mut stokes = compute_stokes(&p, 10, 10, &ctx).map_err(|e| e.to_string())?;
    stokes.k_minus = exact_stokes_mu1(&ctx);
    stokes.k_plus = stokes.k_minus.clone().conj();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut fit = Vec::new();
    for x in [50u32, 33, 20] {
        let tol = 10f64.powi(-(HYPER_DIGITS as i32) + 10);
        w.walk_adaptive(&ctx.complex(x), 80, tol).map_err(|e| e.to_string())?;
        let r = w.state().clone();
        let e0 = ev.eval_level0(&ctx.complex(x), None).map_err(|e| e.to_string())?;
        let e1 = ev.eval_level1(&ctx.complex(x), &stokes, None).map_err(|e| e.to_string())?;
        let az = abs_f64(&ev.z_of_x(&ctx.complex(x)));
        let d0 = mp::log2_abs(&ctx.complex(&e0.state.y - &r.y)) * std::f64::consts::LN_2;
        let d1 = mp::log2_abs(&ctx.complex(&e1.state.y - &r.y)) * std::f64::consts::LN_2;
        let s3 = 3f64.sqrt();
        // in logs: bound ln K − 2√3|z| + ln|z|, gain √3|z| − ln|z|
        let bound_ok = d1 <= HYPER_K.ln() - 2.0 * s3 * az + az.ln();
        let gain_ok = d0 - d1 >= s3 * az - az.ln();
        pass &= bound_ok && gain_ok;
        fit.push((az, d1 - az.ln()));
        parts.push(format!(
            "x={x}: err1 e^{d1:.1}, gain e^{:.1} (need e^{:.1})",
            d0 - d1,
            s3 * az - az.ln()
        ));
    }
    let n = fit.len() as f64;
    let mx = fit.iter().map(|f| f.0).sum::<f64>() / n;
    let my = fit.iter().map(|f| f.1).sum::<f64>() / n;
    let slope = fit.iter().map(|f| (f.0 - mx) * (f.1 - my)).sum::<f64>()
        / fit.iter().map(|f| (f.0 - mx).powi(2)).sum::<f64>();
    let want = -2.0 * 3f64.sqrt();
    let slope_ok = (slope / want - 1.0).abs() <= HYPER_SLOPE_SPREAD;
    pass &= slope_ok;
    parts.push(format!("fitted exponent {:.4} vs {:.4}", -slope, -want));
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn criterion_11() -> Result<Outcome, String> {
    let ctx = PrecisionContext::new(40);
    let res = verify_integral_equation(&params("1"), 1.0, 60, &ctx).map_err(|e| e.to_string())?;
    let full = res.max_residual.to_f64();
    let low = res.max_residual_low.to_f64();
    let residual_ok = full < BOREL_RESIDUAL_TOL;

    let nu = -1000.0;
    let b = sigma_bound(nu, Some(DEFAULT_C)).map_err(|e| e.to_string())?;
    let asym = 4.0 / 25.0 * (3f64.sqrt() + 2.0 / b.c) * nu * nu;
    let ratio = b.sigma / asym;
    let asym_ok = (ratio - 1.0).abs() <= BOREL_ASYMPTOTE_TOL;

    let mut grid_ok = true;
    for i in 0..50 {
        let nu = -25.0 + 27.45 * i as f64 / 49.0;
        let b = sigma_bound(nu, None).map_err(|e| e.to_string())?;
        let (l1, l2) = inequality_lhs(nu, b.c, b.sigma);
        let holds = l1 <= 1.0 + BOREL_ACTIVE_TOL && l2 <= 1.0 + BOREL_ACTIVE_TOL;
        let active = (l1.max(l2) - 1.0).abs() <= BOREL_ACTIVE_TOL;
        grid_ok &= holds && active;
    }
    Ok(Outcome::new(
        residual_ok && asym_ok && grid_ok,
        format!(
            "residual {full:.2e} ({}; degrees <= N: {low:.1e}), asymptote ratio {ratio:.4} ({}), 50-point grid {}",
            if residual_ok { "ok" } else { "above 1e-20" },
            if asym_ok { "ok" } else { "off" },
            if grid_ok { "ok" } else { "violated" }
        ),
    ))
}

fn check(name: &str, ok: bool, failed: &mut Vec<String>) {
    if !ok {
        failed.push(name.to_string());
    }
}

/// The invariant battery behind criterion 12, at 30 digits.
fn criterion_12() -> Result<Outcome, String> {
    let t = Instant::now();
    let ctx = PrecisionContext::new(INVARIANT_DIGITS);
    let tol = 1e-25;
    let mut failed = Vec::new();
    let e = |e: pplab::Error| e.to_string();

    // parity of the base series
    let a = base_series(&params("15/7"), 40, &ctx).map_err(e)?;
    check("parity", a.iter().skip(1).step_by(2).all(|c| c.is_zero()), &mut failed);

    // closed form at μ = 2: y = −x/√6
    let p2 = params("2");
    let s6 = ctx.real(6).sqrt();
    let x = ctx.complex(5);
    let ev = Evaluator::new(&p2, &ctx).eval_level0(&x, None).map_err(e)?;
    let exact = -ctx.complex(&x / &s6);
    check("closed form level 0", abs_f64(&ctx.complex(&ev.state.y - &exact)) < tol, &mut failed);
    let mut w = Walker::new(ev.state, &p2, &ctx).map_err(e)?;
    let target = ctx.complex((1, 2));
    w.walk_segment(&target, 40, 30).map_err(e)?;
    let exact = -ctx.complex(&target / &s6);
    check("closed form walk", abs_f64(&ctx.complex(&w.state().y - &exact)) < tol, &mut failed);

    // round trip 2 → 2+i → 2 at μ = 15/7
    let p = params("15/7");
    let two: SolutionState = pipelines::mu157_at_two(&ctx).map_err(e)?;
    let mut w = Walker::new(two.clone(), &p, &ctx).map_err(e)?;
    w.walk_segment(&ctx.complex((2, 1)), 50, 30).map_err(e)?;
    w.walk_segment(&ctx.complex(2), 50, 30).map_err(e)?;
    check("round trip", abs_f64(&ctx.complex(&w.state().y - &two.y)) < tol, &mut failed);

    // ODE residual by central differences of y'
    let mut w = Walker::new(two.clone(), &p, &ctx).map_err(e)?;
    let x0 = ctx.complex((1, 1));
    let h = ctx.real(1e-8);
    w.walk_segment(&ctx.complex(&x0 - &h), 40, 30).map_err(e)?;
    let lo = w.state().clone();
    w.walk_segment(&x0, 1, 30).map_err(e)?;
    let mid = w.state().clone();
    w.walk_segment(&ctx.complex(&x0 + &h), 1, 30).map_err(e)?;
    let hi = w.state().clone();
    let ypp = ctx.complex(&hi.dy - &lo.dy) / (ctx.real(2) * &h);
    let rhs = ctx.complex(&mid.y * &mid.y) * 6u32 - mp::powf(&x0, &p.mu_float(&ctx));
    check("ODE residual", abs_f64(&ctx.complex(&ypp - &rhs)) < 1e-12, &mut failed);

    // trapezoid M-doubling for the first zero at μ = 1
    let p1 = params("1");
    let o = pipelines::mu1_origin(&ctx, 1000).map_err(e)?;
    let c = ctx.complex(-0.5);
    let z30 = contour_locate(&c, &o, &p1, &ContourConfig::new(ctx.real(0.5), 30, 30), Functional::ZeroLocation, &ctx)
        .map_err(e)?;
    let z60 = contour_locate(&c, &o, &p1, &ContourConfig::new(ctx.real(0.5), 60, 30), Functional::ZeroLocation, &ctx)
        .map_err(e)?;
    check(
        "M-doubling",
        abs_f64(&ctx.complex(&z30.location - &z60.location)) < 1e-20,
        &mut failed,
    );

    // Padé matching of the Taylor data it was built from
    let w = Walker::new(two, &p, &ctx).map_err(e)?;
    let b = w.taylor(20).map_err(e)?;
    let pade = build_pade(&b, &ctx.complex(2), 10, 10, &ctx).map_err(e)?;
    let back = pade.taylor(21, &ctx);
    let worst = b
        .iter()
        .zip(&back)
        .map(|(u, v)| abs_f64(&ctx.complex(u - v)))
        .fold(0.0, f64::max);
    check("Padé matching", worst < 1e-20, &mut failed);

    let el = t.elapsed();
    let pass = failed.is_empty() && el <= INVARIANT_BUDGET;
    let detail = if failed.is_empty() {
        format!("7 invariants at {INVARIANT_DIGITS} digits in {:.1} s", el.as_secs_f64())
    } else {
        format!("failed: {} ({:.1} s)", failed.join(", "), el.as_secs_f64())
    };
    Ok(Outcome::new(pass, detail))
}

fn main() -> ExitCode {
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let criteria: [(usize, &str, Criterion); 12] = [
        (1, "Stokes multiplier, mu=1", criterion_1),
        (2, "Stokes multiplier, mu=15/7", criterion_2),
        (3, "Stokes multiplier, mu=4", criterion_3),
        (4, "seed evaluation", criterion_4),
        (5, "continuation to the origin, mu=1", criterion_5),
        (6, "zero and poles, mu=1", criterion_6),
        (7, "pole sequences, mu=15/7", criterion_7),
        (8, "predicted singularities", criterion_8),
        (9, "Pade scan, mu=4", criterion_9),
        (10, "hyperasymptotic error", criterion_10),
        (11, "Borel bounds", criterion_11),
        (12, "invariant suites", criterion_12),
    ];
    let mut failures = 0;
    for (n, name, f) in criteria {
        if filter.is_some_and(|k| k != n) {
            continue;
        }
        let t = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "criterion {n:2} {} {name}: {} [{:.1} s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
