//! `pplab`: transseries coefficients, Stokes multipliers, asymptotic seeds,
//! analytic continuation, Padé scans, singularity location and Borel bounds
//! for y'' = 6y² − x^μ.
//!
//! Every JSON artifact carries a `config` header with the fully resolved
//! arguments, so a file can be regenerated from its own contents.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Complex, Rational};
use serde::Serialize;
use serde_json::{json, Value};

use pplab::asymptotic::Evaluator;
use pplab::borel::{self, sigma_bound, BorelBound};
use pplab::continuation::{SolutionState, WalkOptions, Walker};
use pplab::mp::{self, PrecisionContext};
use pplab::pade::{build_pade_with_fallback, pade_scan, RootKind};
use pplab::pipelines;
use pplab::series::{parse_rational, transseries_table, Branch, ProblemParams};
use pplab::singularity::{
    contour_locate, log_corrected_locate, predict_singularities, ContourConfig, Functional, HalfPlane,
    SingularityKind, Window,
};
use pplab::stokes::{compute_stokes, exact_stokes_mu1, StokesResult};

#[derive(Parser, Debug)]
#[command(name = "pplab", version, about = "Exponential asymptotics and singularities of y'' = 6y^2 - x^mu")]
struct Cli {
    /// Target decimal digits (at least 10).
    #[arg(long, global = true, env = "PPLAB_DIGITS", value_parser = parse_digits)]
    digits: Option<u32>,

    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transseries coefficient table a_{n,k} as CSV (n, k, re, im).
    Coeffs(CoeffsArgs),
    /// Stokes multiplier K- from the late base coefficients.
    Stokes(StokesArgs),
    /// Optimally truncated asymptotic evaluation of y and y'.
    Eval(EvalArgs),
    /// Taylor-series continuation along a polygonal path.
    Walk(WalkArgs),
    /// Padé approximant of the local Taylor series; CSV of its zeros and poles.
    PadeScan(PadeScanArgs),
    /// Contour-integral location of a pole or zero.
    Locate(LocateArgs),
    /// Singularities predicted by the exponentially small correction.
    Predict(PredictArgs),
    /// Borel-plane growth bound sigma and the existence threshold sigma~.
    BorelBound(BorelArgs),
    /// Runs a named end-to-end case and diffs it against the stored digits.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct MuArg {
    /// Exponent mu > -4, exact rational ("1", "15/7", "-0.5").
    #[arg(long, value_parser = parse_mu)]
    mu: String,
}

#[derive(Args, Debug, Serialize)]
struct CoeffsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    mu: MuArg,
    #[arg(long, default_value_t = 40)]
    n_max: usize,
    #[arg(long, default_value_t = 2)]
    k_max: usize,
    #[arg(long, value_enum, default_value_t = BranchArg::Minus)]
    branch: BranchArg,
}

#[derive(Args, Debug, Serialize)]
struct StokesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    mu: MuArg,
    /// Uses the base coefficient a_{2n,0}.
    #[arg(long, default_value_t = 15)]
    n: usize,
    /// Level-one terms in the late-term sum (defaults to n).
    #[arg(long)]
    terms: Option<usize>,
    /// Also report K- for each of these n (terms = n).
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct StokesSource {
    /// n for the Stokes multiplier used at level one.
    #[arg(long, default_value_t = 15)]
    stokes_n: usize,
    /// Use the closed form K- = -3^(1/4)(1+i)/sqrt(5 pi) (mu = 1 only).
    #[arg(long)]
    exact_stokes: bool,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    mu: MuArg,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    x: String,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    level: u8,
    /// Truncation N; optimal when omitted.
    #[arg(long = "N")]
    n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    stokes: StokesSource,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SeedArgs {
    /// Start of the walk; seeded by the level-0 evaluation unless --y0/--dy0 are given.
    #[arg(long = "from", value_parser = parse_point, allow_hyphen_values = true)]
    from: String,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, requires = "dy0")]
    y0: Option<String>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, requires = "y0")]
    dy0: Option<String>,
    /// Intermediate waypoints, in order.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    via: Vec<String>,
    /// Uniform steps per segment.
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Taylor coefficients per step.
    #[arg(long, default_value_t = 40)]
    terms: usize,
    /// Disable the step/radius guard (fixed-step runs that approach poles).
    #[arg(long)]
    no_guard: bool,
}

#[derive(Args, Debug, Serialize)]
struct WalkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    mu: MuArg,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArgs,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    to: String,
    /// Step adaptively to this absolute tolerance instead of fixed steps.
    #[arg(long)]
    adaptive: Option<f64>,
    /// Per-step CSV trace (x, y, dy).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PadeScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    mu: MuArg,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArgs,
    /// Expansion point, reached by walking from the seed.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    center: String,
    /// Number of Taylor coefficients (defaults to L + M + 1).
    #[arg(long)]
    coeffs: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["L", "M"], default_values_t = [59usize, 60])]
    order: Vec<usize>,
    /// Froissart doublet threshold; 10^(-digits/2) when omitted.
    #[arg(long)]
    doublet_threshold: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FunctionalArg {
    Pole,
    Zero,
    H,
}

#[derive(Args, Debug, Serialize)]
struct LocateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    mu: MuArg,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArgs,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    center: String,
    #[arg(long, default_value = "1/2", value_parser = parse_radius)]
    radius: String,
    /// Half the number of trapezoid nodes (2M nodes in total).
    #[arg(long, default_value_t = 200)]
    nodes: usize,
    #[arg(long, value_enum, default_value_t = FunctionalArg::Pole)]
    functional: FunctionalArg,
    /// Steps from the walked state to the first contour node.
    #[arg(long, default_value_t = 1000)]
    approach_steps: usize,
    /// Taylor coefficients per contour step.
    #[arg(long, default_value_t = 20)]
    contour_terms: usize,
    /// Apply the (x - x_j)^6 log correction to pole locations.
    #[arg(long)]
    log_correct: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum HalfPlaneArg {
    Upper,
    Lower,
}

#[derive(Args, Debug, Serialize)]
struct PredictArgs {
    #[command(flatten)]
    #[serde(flatten)]
    mu: MuArg,
    #[arg(long, value_enum, default_value_t = HalfPlaneArg::Upper)]
    half_plane: HalfPlaneArg,
    /// re_min re_max im_min im_max
    #[arg(long, required = true, num_args = 4, allow_negative_numbers = true, value_names = ["RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"])]
    window: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    stokes: StokesSource,
}

#[derive(Args, Debug, Serialize)]
struct BorelArgs {
    #[arg(long, allow_negative_numbers = true, conflicts_with = "mu", required_unless_present_any = ["mu", "curve"])]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// "optimal", or a value in (0, 2/sqrt 3).
    #[arg(long, default_value = "optimal", value_parser = parse_c)]
    c: String,
    /// nu_min nu_max points: CSV curve (nu, c, sigma, mu, sigma_tilde).
    #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["NU_MIN", "NU_MAX", "POINTS"], conflicts_with_all = ["nu", "mu"])]
    curve: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
struct ReproduceArgs {
    /// Case name; see --list.
    #[arg(required_unless_present = "list")]
    case: Option<String>,
    #[arg(long)]
    list: bool,
    /// Print the JSON record instead of the text report.
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BranchArg {
    Minus,
    Plus,
}

fn parse_digits(s: &str) -> Result<u32, String> {
    let d: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if d < 10 {
        return Err(format!("digits must be at least 10, got {d}"));
    }
    Ok(d)
}

fn parse_mu(s: &str) -> Result<String, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if r <= -4 {
        return Err(format!("mu must exceed -4, got {r}"));
    }
    Ok(s.to_string())
}

fn parse_point(s: &str) -> Result<String, String> {
    mp::parse_complex(s, 64).map_err(|e| e.to_string())?;
    Ok(s.to_string())
}

fn parse_radius(s: &str) -> Result<String, String> {
    let r = mp::parse_real(s, 64).map_err(|e| e.to_string())?;
    if !(r > 0) {
        return Err(format!("radius must be positive, got {s}"));
    }
    Ok(s.to_string())
}

fn parse_c(s: &str) -> Result<String, String> {
    if s == "optimal" {
        return Ok(s.to_string());
    }
    let c: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(c > 0.0 && c < 2.0 / 3f64.sqrt()) {
        return Err(format!("c must lie in (0, 2/sqrt 3), got {c}"));
    }
    Ok(s.to_string())
}

const DEFAULT_DIGITS: u32 = 30;

struct Session {
    ctx: PrecisionContext,
    output: Option<PathBuf>,
}

impl Session {
    fn digits(&self) -> u32 {
        self.ctx.target_digits()
    }

    fn point(&self, s: &str) -> anyhow::Result<Complex> {
        Ok(mp::parse_complex(s, self.ctx.bits())?)
    }

    fn writer(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn emit_json(&self, command: &str, config: impl Serialize, result: impl Serialize) -> anyhow::Result<()> {
        let mut cfg = serde_json::to_value(config)?;
        if let Value::Object(map) = &mut cfg {
            map.insert("command".into(), json!(command));
            map.insert("digits".into(), json!(self.digits()));
            map.insert("working_digits".into(), json!(self.ctx.working_digits()));
            map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        }
        let doc = json!({ "config": cfg, "result": result });
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        Ok(())
    }
}

fn params(mu: &MuArg) -> anyhow::Result<ProblemParams> {
    Ok(ProblemParams::minus(parse_rational(&mu.mu)?)?)
}

fn stokes_for(params: &ProblemParams, src: &StokesSource, ctx: &PrecisionContext) -> anyhow::Result<StokesResult> {
    let mut s = compute_stokes(params, src.stokes_n, src.stokes_n, ctx)?;
    if src.exact_stokes {
        if *params.mu() != Rational::from(1) {
            return Err(anyhow!("--exact-stokes needs mu = 1"));
        }
        s.k_minus = exact_stokes_mu1(ctx);
        s.k_plus = s.k_minus.clone().conj();
    }
    Ok(s)
}

fn walk_options(seed: &SeedArgs) -> WalkOptions {
    if seed.no_guard {
        pipelines::approach_options()
    } else {
        WalkOptions::default()
    }
}

/// Seeds at `--from` and walks through the `--via` points.
fn seeded_walker(
    params: &ProblemParams,
    seed: &SeedArgs,
    options: WalkOptions,
    s: &Session,
) -> anyhow::Result<Walker> {
    let ctx = &s.ctx;
    let from = s.point(&seed.from)?;
    let state = match (&seed.y0, &seed.dy0) {
        (Some(y), Some(dy)) => SolutionState::new(from, s.point(y)?, s.point(dy)?),
        _ => Evaluator::new(params, ctx)
            .eval_level0(&from, None)
            .context("level-0 seed")?
            .state,
    };
    let mut w = Walker::with_options(state, params, ctx, options)?;
    for v in &seed.via {
        w.walk_segment(&s.point(v)?, seed.steps, seed.terms)?;
    }
    Ok(w)
}

fn coeffs(a: CoeffsArgs, s: &Session) -> anyhow::Result<()> {
    let branch = match a.branch {
        BranchArg::Minus => Branch::Minus,
        BranchArg::Plus => Branch::Plus,
    };
    let p = ProblemParams::new(parse_rational(&a.mu.mu)?, branch)?;
    let table = transseries_table(&p, a.n_max, a.k_max, &s.ctx)?;
    table.write_csv(s.writer()?, s.digits())?;
    Ok(())
}

fn stokes(a: StokesArgs, s: &Session) -> anyhow::Result<()> {
    let p = params(&a.mu)?;
    let terms = a.terms.unwrap_or(a.n);
    let r = compute_stokes(&p, a.n, terms, &s.ctx)?;
    let mut result = serde_json::to_value(r.report(&p, s.digits()))?;
    if !a.sweep.is_empty() {
        let sweep = pplab::stokes::sweep(&p, &a.sweep, &s.ctx)?;
        let rows: Vec<_> = sweep.results.iter().map(|r| r.report(&p, s.digits())).collect();
        result["sweep"] = json!({ "results": rows, "diverging": sweep.diverging });
    }
    s.emit_json("stokes", json!({ "mu": a.mu.mu, "n": a.n, "terms": terms, "sweep": a.sweep }), result)
}

fn eval(a: EvalArgs, s: &Session) -> anyhow::Result<()> {
    let p = params(&a.mu)?;
    let x = s.point(&a.x)?;
    let mut ev = Evaluator::new(&p, &s.ctx);
    let e = if a.level == 0 {
        ev.eval_level0(&x, a.n)?
    } else {
        let k = stokes_for(&p, &a.stokes, &s.ctx)?;
        ev.eval_level1(&x, &k, a.n)?
    };
    s.emit_json("eval", &a, e.report(s.digits()))
}

fn walk(a: WalkArgs, s: &Session) -> anyhow::Result<()> {
    let p = params(&a.mu)?;
    let mut options = walk_options(&a.seed);
    options.record_trace = a.trace.is_some();
    let mut w = seeded_walker(&p, &a.seed, options, s)?;
    let to = s.point(&a.to)?;
    let steps = match a.adaptive {
        Some(tol) => w.walk_adaptive(&to, a.seed.terms, tol)?,
        None => {
            w.walk_segment(&to, a.seed.steps, a.seed.terms)?;
            w.steps_taken()
        }
    };
    if let Some(path) = &a.trace {
        let mut csv = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
        csv.write_record(["x_re", "x_im", "y_re", "y_im", "dy_re", "dy_im"])?;
        for st in w.trace() {
            let r = st.report(s.digits());
            csv.write_record([r.x_re, r.x_im, r.y_re, r.y_im, r.dy_re, r.dy_im])?;
        }
        csv.flush()?;
    }
    let mut result = serde_json::to_value(w.state().report(s.digits()))?;
    result["steps"] = json!(steps);
    result["error_bound"] = json!(mp::format_real(w.error_bound(), 3));
    s.emit_json("walk", &a, result)
}

fn pade(a: PadeScanArgs, s: &Session) -> anyhow::Result<()> {
    let p = params(&a.mu)?;
    let (l, m) = (a.order[0], a.order[1]);
    let n = a.coeffs.unwrap_or(l + m + 1);
    if n < l + m + 1 {
        return Err(anyhow!("order [{l}/{m}] needs at least {} coefficients, got {n}", l + m + 1));
    }
    let center = s.point(&a.center)?;
    let mut w = seeded_walker(&p, &a.seed, walk_options(&a.seed), s)?;
    w.walk_segment(&center, a.seed.steps, a.seed.terms)?;
    let b = w.taylor(n - 1)?;
    let approx = build_pade_with_fallback(&b, &center, l, m, &s.ctx)?;
    if approx.order != (l, m) {
        eprintln!("note: order [{l}/{m}] was singular; using {:?}", approx.order);
    }
    let scan = pade_scan(&approx, a.doublet_threshold, &s.ctx)?;
    if scan.zeros.partial || scan.poles.partial {
        eprintln!("note: root iteration stopped before convergence; residuals flag the weak roots");
    }
    let mut csv = csv::Writer::from_writer(s.writer()?);
    csv.write_record(["root_re", "root_im", "type", "residual", "doublet_flag"])?;
    for r in scan.all() {
        csv.write_record([
            mp::format_real(r.location.real(), s.digits()),
            mp::format_real(r.location.imag(), s.digits()),
            match r.kind {
                RootKind::Zero => "zero".to_string(),
                RootKind::Pole => "pole".to_string(),
            },
            format!("{:.3e}", r.residual),
            u8::from(r.doublet).to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

fn locate(a: LocateArgs, s: &Session) -> anyhow::Result<()> {
    let p = params(&a.mu)?;
    let w = seeded_walker(&p, &a.seed, walk_options(&a.seed), s)?;
    let radius = mp::parse_real(&a.radius, s.ctx.bits())?;
    let cfg = ContourConfig::new(radius, a.nodes, a.contour_terms)
        .approach_steps(a.approach_steps)
        .walk_options(walk_options(&a.seed));
    let functional = match a.functional {
        FunctionalArg::Pole => Functional::PoleLocation,
        FunctionalArg::Zero => Functional::ZeroLocation,
        FunctionalArg::H => Functional::HResidue,
    };
    let mut est = contour_locate(&s.point(&a.center)?, w.state(), &p, &cfg, functional, &s.ctx)?;
    if a.log_correct && est.kind == SingularityKind::LogCorrectedPole {
        est = log_corrected_locate(&est, &p, &s.ctx)?;
    }
    s.emit_json("locate", &a, vec![est.report(s.digits())])
}

fn predict(a: PredictArgs, s: &Session) -> anyhow::Result<()> {
    let p = params(&a.mu)?;
    let k = stokes_for(&p, &a.stokes, &s.ctx)?;
    let window = Window {
        re_min: a.window[0],
        re_max: a.window[1],
        im_min: a.window[2],
        im_max: a.window[3],
    };
    let hp = match a.half_plane {
        HalfPlaneArg::Upper => HalfPlane::Upper,
        HalfPlaneArg::Lower => HalfPlane::Lower,
    };
    let roots = predict_singularities(&p, &k, hp, &window, &s.ctx)?;
    let kind = match p.mu_nonnegative_integer() {
        Some(0) | Some(1) => SingularityKind::DoublePole,
        _ => SingularityKind::LogCorrectedPole,
    };
    let rows: Vec<_> = roots
        .iter()
        .map(|x| {
            json!({
                "x_re": mp::format_real(x.real(), s.digits()),
                "x_im": mp::format_real(x.imag(), s.digits()),
                "kind": kind,
                "method": "Prediction",
            })
        })
        .collect();
    s.emit_json("predict", &a, rows)
}

fn borel_bound(a: BorelArgs, s: &Session) -> anyhow::Result<()> {
    let c = match a.c.as_str() {
        "optimal" => None,
        v => Some(v.parse::<f64>()?),
    };
    if !a.curve.is_empty() {
        let (lo, hi, n) = (a.curve[0], a.curve[1], a.curve[2]);
        if !(n >= 2.0 && n.fract() == 0.0) || !(hi > lo) {
            return Err(anyhow!("--curve needs nu_min < nu_max and an integer point count >= 2"));
        }
        let n = n as usize;
        let mut csv = csv::Writer::from_writer(s.writer()?);
        csv.write_record(["nu", "c", "sigma", "mu", "sigma_tilde"])?;
        for i in 0..n {
            let nu = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let b = sigma_bound(nu, c)?;
            csv.write_record([nu, b.c, b.sigma, borel::mu_of_nu(nu), b.sigma_tilde].map(|v| format!("{v:.12e}")))?;
        }
        csv.flush()?;
        return Ok(());
    }
    let nu = match (a.nu, a.mu) {
        (Some(nu), _) => nu,
        (None, Some(mu)) if mu > -4.0 => borel::nu_of_mu(mu),
        (None, Some(mu)) => return Err(anyhow!("mu must exceed -4, got {mu}")),
        (None, None) => unreachable!("clap requires --nu, --mu or --curve"),
    };
    let b: BorelBound = sigma_bound(nu, c)?;
    s.emit_json("borel-bound", &a, json!({ "bound": b, "mu": borel::mu_of_nu(nu) }))
}

fn reproduce(a: ReproduceArgs, s: &Session, digits: Option<u32>) -> anyhow::Result<bool> {
    if a.list {
        let mut w = s.writer()?;
        for c in pipelines::CASES {
            writeln!(w, "{c:16} default digits {}", pipelines::default_digits(c))?;
        }
        return Ok(true);
    }
    let case = a.case.as_deref().unwrap_or_default();
    let out = pipelines::run(case, digits)?;
    let checks = out.checks()?;
    let pass = checks.iter().all(|c| c.pass());
    let mut w = s.writer()?;
    if a.json {
        let values: Vec<_> = out
            .values
            .iter()
            .map(|(k, v)| json!({ "key": k, "value": mp::format_complex(v, out.digits) }))
            .collect();
        let report: Vec<_> = checks
            .iter()
            .map(|c| json!({ "key": c.key, "pass": c.pass(), "matching_digits": c.matching_digits() }))
            .collect();
        let doc = json!({
            "config": { "command": "reproduce", "case": case, "mu": out.mu, "digits": out.digits,
                        "version": env!("CARGO_PKG_VERSION") },
            "result": { "values": values, "checks": report, "notes": out.notes, "pass": pass },
        });
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        return Ok(pass);
    }
    writeln!(w, "case {case} (mu = {}, {} digits)", out.mu, out.digits)?;
    for (k, v) in &out.values {
        writeln!(w, "  {k:16} {}", mp::format_complex(v, out.digits))?;
    }
    for n in &out.notes {
        writeln!(w, "  note: {n}")?;
    }
    for c in &checks {
        let digits = c.matching_digits();
        let shown = if digits.is_finite() { format!("{digits:.1}") } else { "exact".into() };
        writeln!(
            w,
            "{} {} ({shown} matching digits)",
            if c.pass() { "match   " } else { "MISMATCH" },
            c.key
        )?;
        for line in c.diff_lines() {
            writeln!(w, "{line}")?;
        }
    }
    writeln!(
        w,
        "{}/{} values match the stored digits",
        checks.iter().filter(|c| c.pass()).count(),
        checks.len()
    )?;
    Ok(pass)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let explicit = cli.digits;
    let ctx = PrecisionContext::new(explicit.unwrap_or(DEFAULT_DIGITS));
    let s = Session { ctx, output: cli.output };
    match cli.command {
        Command::Coeffs(a) => coeffs(a, &s)?,
        Command::Stokes(a) => stokes(a, &s)?,
        Command::Eval(a) => eval(a, &s)?,
        Command::Walk(a) => walk(a, &s)?,
        Command::PadeScan(a) => pade(a, &s)?,
        Command::Locate(a) => locate(a, &s)?,
        Command::Predict(a) => predict(a, &s)?,
        Command::BorelBound(a) => borel_bound(a, &s)?,
        Command::Reproduce(a) => return reproduce(a, &s, explicit),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
