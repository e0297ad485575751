//! End-to-end runs behind the published tables.
//!
//! Each case computes a list of named values; [`CaseOutput::checks`] compares
//! them with the stored reference digits.

use rug::Complex;

use crate::asymptotic::{Evaluation, Evaluator};
use crate::continuation::{SolutionState, WalkOptions, Walker};
use crate::error::{Error, Result};
use crate::mp::{self, PrecisionContext};
use crate::pade::{build_pade_with_fallback, pade_scan, PadeScan};
use crate::reference::{self, DigitCheck};
use crate::series::{parse_rational, ProblemParams};
use crate::singularity::{
    contour_locate, contour_sums, local_expansion_refine, predict_singularities, ContourConfig, Functional, HalfPlane,
    Window,
};
use crate::stokes::{compute_stokes, exact_stokes_mu1};

pub const CASES: &[&str] = &[
    "mu1-stokes",
    "mu157-stokes",
    "mu4-stokes",
    "mu1-seed",
    "mu157-seed",
    "mu1-origin",
    "mu1-zero",
    "mu1-p1",
    "mu1-p2",
    "mu157-p1",
    "mu157-p2",
    "mu4-scan",
    "mu157-predict",
    "mu1-predict",
];

#[derive(Clone, Debug)]
pub struct CaseOutput {
    pub name: String,
    pub mu: String,
    pub digits: u32,
    pub values: Vec<(String, Complex)>,
    /// (key, printed value) pairs to compare against.
    pub references: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl CaseOutput {
    pub fn value(&self, key: &str) -> Option<&Complex> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn checks(&self) -> Result<Vec<DigitCheck>> {
        let mut out = Vec::new();
        for (key, printed) in &self.references {
            let v = self
                .value(key)
                .ok_or_else(|| Error::Reference(format!("case {} computed no {key:?}", self.name)))?;
            out.push(reference::check(key, v, printed)?);
        }
        Ok(out)
    }
}

/// Working digits used by each case unless overridden.
pub fn default_digits(case: &str) -> u32 {
    match case {
        "mu1-stokes" => 70,
        c if c.starts_with("mu1-") => 60,
        _ => 20,
    }
}

fn params(mu: &str) -> Result<ProblemParams> {
    ProblemParams::minus(parse_rational(mu)?)
}

/// Approach walks of the fixed-step runs skip the step/radius guard (see the
/// module docs of the continuation engine).
pub fn approach_options() -> WalkOptions {
    WalkOptions {
        radius_fraction: None,
        ..WalkOptions::default()
    }
}

pub fn mu1_seed(ctx: &PrecisionContext) -> Result<Evaluation> {
    let p = params("1")?;
    Evaluator::new(&p, ctx).eval_level0(&ctx.complex(33), None)
}

/// y₋ at the origin for μ = 1: x = 33 walked in 1000 steps with 40 coefficients.
pub fn mu1_origin(ctx: &PrecisionContext, steps: usize) -> Result<SolutionState> {
    let p = params("1")?;
    let seed = mu1_seed(ctx)?;
    let mut w = Walker::new(seed.state, &p, ctx)?;
    w.walk_segment(&ctx.complex(0), steps, 40)?;
    Ok(w.into_state())
}

pub fn mu157_seed(ctx: &PrecisionContext) -> Result<Evaluation> {
    let p = params("15/7")?;
    Evaluator::new(&p, ctx).eval_level0(&ctx.complex(6), None)
}

/// y₋ at x = 2 for μ = 15/7: x = 6 walked in 100 steps with 20 coefficients.
pub fn mu157_at_two(ctx: &PrecisionContext) -> Result<SolutionState> {
    let p = params("15/7")?;
    let seed = mu157_seed(ctx)?;
    let mut w = Walker::new(seed.state, &p, ctx)?;
    w.walk_segment(&ctx.complex(2), 100, 20)?;
    Ok(w.into_state())
}

/// Contour sequence r = 1/2, 1/10, 1/100, each run approached from `from` in
/// 1000 steps and centred on the previous result.
pub fn pole_sequence(
    start_center: &Complex,
    from: &SolutionState,
    params: &ProblemParams,
    ctx: &PrecisionContext,
) -> Result<Vec<(String, SolutionState, Complex)>> {
    let mut center = ctx.complex(start_center);
    let mut out = Vec::new();
    for r in ["1/2", "1/10", "1/100"] {
        let radius = mp::parse_real(r, ctx.bits())?;
        let cfg = ContourConfig::new(radius, 1000, 20)
            .approach_steps(1000)
            .walk_options(approach_options());
        let sums = contour_sums(&center, from, params, &cfg, &[Functional::PoleLocation], ctx)?;
        center = sums.values[0].clone();
        out.push((r.to_string(), sums.start, center.clone()));
    }
    Ok(out)
}

/// μ = 4 Padé scan at the origin: 120 coefficients, order [59,60].
pub fn mu4_scan(scan_digits: u32) -> Result<(PadeScan, SolutionState)> {
    let p = params("4")?;
    let ctx = PrecisionContext::new(scan_digits);
    let seed = Evaluator::new(&p, &ctx).eval_level0(&ctx.complex(10), None)?;
    let mut w = Walker::new(seed.state, &p, &ctx)?;
    w.walk_segment(&ctx.complex(0), 400, 40)?;
    let b = w.taylor(119)?;
    let approx = build_pade_with_fallback(&b, &ctx.complex(0), 59, 60, &ctx)?;
    if approx.order != (59, 60) {
        log::warn!("mu = 4 scan fell back to order {:?}", approx.order);
    }
    let scan = pade_scan(&approx, None, &ctx)?;
    Ok((scan, w.into_state()))
}

/// μ = 15/7 Padé scan at x = 2: 200 coefficients, order [99,100].
pub fn mu157_scan(scan_digits: u32) -> Result<PadeScan> {
    let p = params("15/7")?;
    let ctx = PrecisionContext::new(scan_digits);
    let seed = Evaluator::new(&p, &ctx).eval_level0(&ctx.complex(20), None)?;
    let mut w = Walker::new(seed.state, &p, &ctx)?;
    w.walk_segment(&ctx.complex(2), 600, 50)?;
    let b = w.taylor(199)?;
    let approx = build_pade_with_fallback(&b, &ctx.complex(2), 99, 100, &ctx)?;
    pade_scan(&approx, None, &ctx)
}

/// Rough positions read off the μ = 4 pole plot; each selects the nearest
/// non-doublet Padé pole.
pub const MU4_GUIDES: [(f64, f64); 3] = [(-1.2, 0.0), (-0.9, 2.35), (-0.75, 3.34)];

fn relative_error(a: &Complex, b: &Complex, ctx: &PrecisionContext) -> Complex {
    ctx.complex(mp::abs(&ctx.complex(a - b)) / mp::abs(b))
}

fn nearest<'a>(roots: &'a [Complex], x: &Complex, ctx: &PrecisionContext) -> Option<&'a Complex> {
    roots.iter().min_by(|a, b| {
        let da = mp::abs(&ctx.complex(*a - x));
        let db = mp::abs(&ctx.complex(*b - x));
        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Runs a named case. `digits` overrides [`default_digits`].
pub fn run(case: &str, digits: Option<u32>) -> Result<CaseOutput> {
    if !CASES.contains(&case) {
        return Err(Error::InvalidParameter(format!(
            "unknown case {case:?}; known: {}",
            CASES.join(", ")
        )));
    }
    let digits = digits.unwrap_or_else(|| default_digits(case));
    let ctx = PrecisionContext::new(digits);
    let mut values: Vec<(String, Complex)> = Vec::new();
    let mut notes = Vec::new();
    let mut references = None;
    let mu = match case {
        "mu1-stokes" => {
            let p = params("1")?;
            let s = compute_stokes(&p, 100, 100, &ctx)?;
            values.push(("K-".into(), s.k_minus));
            references = Some(vec![(
                "K-".to_string(),
                mp::format_complex(&exact_stokes_mu1(&ctx), 63),
            )]);
            notes.push("reference: K- = -3^(1/4)(1+i)/sqrt(5 pi) to 63 digits".into());
            "1"
        }
        "mu157-stokes" | "mu4-stokes" => {
            let mu = if case == "mu157-stokes" { "15/7" } else { "4" };
            let s = compute_stokes(&params(mu)?, 15, 15, &ctx)?;
            values.push(("K-".into(), s.k_minus));
            mu
        }
        "mu1-seed" => {
            let e = mu1_seed(&ctx)?;
            notes.push(format!("N = {} ({} non-zero terms)", e.n_terms, e.n_terms.div_ceil(2)));
            values.push(("y(33)".into(), e.state.y));
            values.push(("y'(33)".into(), e.state.dy));
            "1"
        }
        "mu157-seed" => {
            let e = mu157_seed(&ctx)?;
            values.push(("y(6)".into(), e.state.y));
            values.push(("y'(6)".into(), e.state.dy));
            let two = mu157_at_two(&ctx)?;
            values.push(("y(2)".into(), two.y));
            values.push(("y'(2)".into(), two.dy));
            "15/7"
        }
        "mu1-origin" => {
            let o = mu1_origin(&ctx, 1000)?;
            values.push(("y(0)".into(), o.y));
            values.push(("y'(0)".into(), o.dy));
            "1"
        }
        "mu1-zero" => {
            let p = params("1")?;
            let o = mu1_origin(&ctx, 1000)?;
            let cfg = ContourConfig::new(ctx.real(0.5), 60, 40);
            let z = contour_locate(&ctx.complex(-0.5), &o, &p, &cfg, Functional::ZeroLocation, &ctx)?;
            let mut w = Walker::new(o, &p, &ctx)?;
            w.walk_segment(&z.location, 10, 40)?;
            notes.push(format!("|y(z1)| = {:.2e}", mp::abs(&w.state().y).to_f64()));
            values.push(("z1".into(), z.location));
            values.push(("y'(z1)".into(), w.state().dy.clone()));
            "1"
        }
        "mu1-p1" => {
            let p = params("1")?;
            let o = mu1_origin(&ctx, 1000)?;
            let mut w = Walker::new(o, &p, &ctx)?;
            w.walk_segment(&ctx.complex(-2), 300, 40)?;
            let cfg = ContourConfig::new(ctx.real(0.5), 200, 40);
            let s = contour_sums(
                &ctx.complex(-2.5),
                w.state(),
                &p,
                &cfg,
                &[Functional::PoleLocation, Functional::HResidue],
                &ctx,
            )?;
            values.push(("y(-2)".into(), w.state().y.clone()));
            values.push(("y'(-2)".into(), w.state().dy.clone()));
            values.push(("p1".into(), s.values[0].clone()));
            values.push(("h1".into(), s.values[1].clone()));
            notes.push(
                "h1 is the residue of y'^3/(56y); its sign follows from y = d^-2 + (x_j/10)d^2 + d^3/6 + h d^4".into(),
            );
            "1"
        }
        "mu1-p2" => {
            let p = params("1")?;
            let o = mu1_origin(&ctx, 1000)?;
            let center = mp::parse_complex("-4+1.3i", ctx.bits())?;
            let cfg = ContourConfig::new(ctx.real(0.5), 200, 40).approach_steps(300);
            let e = contour_locate(&center, &o, &p, &cfg, Functional::PoleLocation, &ctx)?;
            notes.push("path: straight 0 -> -3.5+1.3i in 300 steps".into());
            values.push(("p2".into(), e.location));
            "1"
        }
        "mu157-p1" | "mu157-p2" => {
            let p = params("15/7")?;
            let two = mu157_at_two(&ctx)?;
            let (label, start) = if case == "mu157-p1" {
                ("p1", "-2.75+1.7i")
            } else {
                ("p2", "-3.2+3.05i")
            };
            let seq = pole_sequence(&mp::parse_complex(start, ctx.bits())?, &two, &p, &ctx)?;
            if case == "mu157-p1" {
                values.push(("y(p1+1/2)".into(), seq[0].1.y.clone()));
                values.push(("y'(p1+1/2)".into(), seq[0].1.dy.clone()));
            }
            for (r, _, x) in &seq {
                values.push((format!("{label} (r={r})"), x.clone()));
            }
            if case == "mu157-p2" {
                let guess = mp::parse_complex("-3.199+3.074i", ctx.bits())?;
                let xp = ctx.complex(&guess + mp::parse_real("1/100", ctx.bits())?);
                let mut w = Walker::with_options(two, &p, &ctx, approach_options())?;
                w.walk_segment(&xp, 1000, 20)?;
                let xj = local_expansion_refine(&xp, &w.state().y, &guess, &p, &ctx)?;
                values.push(("y(p2+1/100)".into(), w.state().y.clone()));
                values.push(("x_j (local)".into(), xj));
            }
            "15/7"
        }
        "mu4-scan" => {
            let p = params("4")?;
            let (scan, origin) = mu4_scan(100)?;
            let origin = origin.at(&ctx);
            for (label, guide) in ["p0", "p1", "p2"].into_iter().zip(MU4_GUIDES) {
                let cand = scan
                    .nearest_candidate(&ctx.complex(guide), &ctx)
                    .ok_or(Error::NoRootsInWindow)?;
                let mut center = ctx.complex(&cand.location);
                notes.push(format!("{label}: Padé candidate {}", mp::format_complex(&center, 8)));
                for r in ["1/10", "1/100"] {
                    let radius = mp::parse_real(r, ctx.bits())?;
                    let cfg = ContourConfig::new(radius, 1000, 20)
                        .approach_steps(1000)
                        .walk_options(approach_options());
                    center = contour_locate(&center, &origin, &p, &cfg, Functional::PoleLocation, &ctx)?.location;
                }
                values.push((label.into(), center));
            }
            "4"
        }
        "mu157-predict" | "mu1-predict" => {
            let (mu, confirmed) = if case == "mu157-predict" {
                let p = params("15/7")?;
                let two = mu157_at_two(&ctx)?;
                let mut conf = Vec::new();
                for start in ["-2.75+1.7i", "-3.2+3.05i"] {
                    let seq = pole_sequence(&mp::parse_complex(start, ctx.bits())?, &two, &p, &ctx)?;
                    conf.push(seq[2].2.clone());
                }
                ("15/7", conf)
            } else {
                let a = run("mu1-p1", Some(digits))?;
                let b = run("mu1-p2", Some(digits))?;
                let p1 = a.value("p1").cloned().ok_or(Error::NoRootsInWindow)?;
                let p2 = b.value("p2").cloned().ok_or(Error::NoRootsInWindow)?;
                ("1", vec![p1, p2])
            };
            let p = params(mu)?;
            let stokes = if mu == "1" {
                let mut s = compute_stokes(&p, 10, 10, &ctx)?;
                s.k_minus = exact_stokes_mu1(&ctx);
                s.k_plus = s.k_minus.clone().conj();
                s
            } else {
                compute_stokes(&p, 15, 15, &ctx)?
            };
            for (label, conf) in ["p1", "p2"].into_iter().zip(&confirmed) {
                let c = (conf.real().to_f64(), conf.imag().to_f64());
                let roots = predict_singularities(&p, &stokes, HalfPlane::Upper, &Window::around(c, 0.3), &ctx)?;
                let x = nearest(&roots, conf, &ctx).ok_or(Error::NoRootsInWindow)?.clone();
                values.push((format!("rel err {label}"), relative_error(&x, conf, &ctx)));
                values.push((format!("x near {label}"), x));
                values.push((format!("{label} (contour)"), conf.clone()));
            }
            mu
        }
        _ => unreachable!(),
    };
    let references = match references {
        Some(r) => r,
        None => reference::case(case)?
            .values
            .into_iter()
            .map(|v| (v.key, v.value))
            .collect(),
    };
    Ok(CaseOutput {
        name: case.to_string(),
        mu: mu.to_string(),
        digits,
        values,
        references,
        notes,
    })
}
