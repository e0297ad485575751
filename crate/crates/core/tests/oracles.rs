//! Cross-checks against independent computations: quadrature, finite
//! differences, closed forms and refinement limits.

use num_complex::Complex64;
use rug::Complex;

use pplab::asymptotic::Evaluator;
use pplab::borel::{borel_root_test, borel_taylor};
use pplab::continuation::Walker;
use pplab::mp::{self, PrecisionContext};
use pplab::pipelines;
use pplab::reference;
use pplab::series::{parse_rational, ProblemParams};
use pplab::singularity::{contour_locate, log_corrected_locate, ContourConfig, Functional};
use pplab::stokes::{compute_stokes, exact_stokes_mu1};

fn params(mu: &str) -> ProblemParams {
    ProblemParams::minus(parse_rational(mu).unwrap()).unwrap()
}

fn to64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

fn dist(a: &Complex, b: &Complex, ctx: &PrecisionContext) -> f64 {
    mp::abs(&ctx.complex(a - b)).to_f64()
}

/// Composite Simpson rule on [0, len] with n (even) panels.
fn simpson(f: impl Fn(f64) -> Complex64, len: f64, n: usize) -> Complex64 {
    let h = len / n as f64;
    let mut s = f(0.0) + f(len);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(i as f64 * h) * w;
    }
    s * (h / 3.0)
}

#[test]
fn incomplete_gamma_matches_quadrature() {
    let ctx = PrecisionContext::new(30);
    let cases = [(1.5, 0.0, 2.0, 0.5), (0.0, 0.0, 1.0, 1.0), (-2.0, 0.0, 3.0, -1.0), (0.3, 0.7, 4.0, 2.0)];
    for (ar, ai, zr, zi) in cases {
        let a = Complex64::new(ar, ai);
        let z = Complex64::new(zr, zi);
        // Γ(a, z) = ∫₀^∞ (z+s)^{a−1} e^{−(z+s)} ds
        let oracle = simpson(|s| (z + s).powc(a - 1.0) * (-(z + s)).exp(), 60.0, 60_000);
        let got = mp::upper_incomplete_gamma(&ctx.complex((ar, ai)), &ctx.complex((zr, zi)), &ctx).unwrap();
        let err = (to64(&got) - oracle).norm() / oracle.norm();
        assert!(err < 1e-11, "a={a} z={z}: {err:e}");
    }
}

#[test]
fn hyperterminant_matches_its_integral() {
    let ctx = PrecisionContext::new(30);
    for (n, zr, zi) in [(3u32, -2.0, 1.0), (0, 1.0, 2.0), (6, -5.0, -0.5)] {
        let z = Complex64::new(zr, zi);
        // σ = −1 puts the integration ray on the positive real axis
        let oracle = simpson(|t| (-t).exp() * t.powi(n as i32) / (z - t), 80.0, 80_000);
        let got = mp::hyperterminant_f1(&ctx.complex((zr, zi)), &ctx.complex(n + 1), &ctx.complex(-1), &ctx).unwrap();
        let err = (to64(&got) - oracle).norm() / oracle.norm();
        assert!(err < 1e-10, "N={n} z={z}: {err:e}");
    }
}

#[test]
fn level0_satisfies_the_equation() {
    let ctx = PrecisionContext::new(60);
    let p = params("15/7");
    let mu = p.mu_float(&ctx);
    let mut ev = Evaluator::new(&p, &ctx);
    let x = ctx.complex(40);
    let h = ctx.real(1e-12);
    let lo = ev.eval_level0(&ctx.complex(&x - &h), None).unwrap();
    let mid = ev.eval_level0(&x, None).unwrap();
    let hi = ev.eval_level0(&ctx.complex(&x + &h), None).unwrap();
    let ypp = ctx.complex(&hi.state.dy - &lo.state.dy) / (ctx.real(2) * &h);
    let rhs = ctx.complex(&mid.state.y * &mid.state.y) * 6u32 - mp::powf(&x, &mu);
    let scale = mp::powf(&x, &mu);
    let rel = mp::abs(&ctx.complex(&ypp - &rhs)).to_f64() / mp::abs(&scale).to_f64();
    assert!(rel < 1e-20, "{rel:e}");
}

#[test]
fn level0_derivative_matches_finite_difference() {
    let ctx = PrecisionContext::new(50);
    let p = params("1");
    let mut ev = Evaluator::new(&p, &ctx);
    let x = ctx.complex((30, 5));
    let h = ctx.real(1e-15);
    let a = ev.eval_level0(&ctx.complex(&x - &h), None).unwrap();
    let b = ev.eval_level0(&ctx.complex(&x + &h), None).unwrap();
    let m = ev.eval_level0(&x, None).unwrap();
    let fd = ctx.complex(&b.state.y - &a.state.y) / (ctx.real(2) * &h);
    assert!(dist(&fd, &m.state.dy, &ctx) < 1e-25);
}

#[test]
fn stokes_estimates_improve_with_n() {
    let ctx = PrecisionContext::new(60);
    let p = params("1");
    let exact = exact_stokes_mu1(&ctx);
    let e = |n| dist(&compute_stokes(&p, n, n, &ctx).unwrap().k_minus, &exact, &ctx);
    let (e10, e20, e40) = (e(10), e(20), e(40));
    assert!(e20 < e10 && e40 < e20, "{e10:e} {e20:e} {e40:e}");

    let p = params("15/7");
    let k = |n| compute_stokes(&p, n, n, &ctx).unwrap().k_minus;
    let (a, b, c) = (k(15), k(30), k(60));
    assert!(dist(&b, &c, &ctx) < dist(&a, &b, &ctx));
}

#[test]
fn stokes_pair_is_conjugate() {
    let ctx = PrecisionContext::new(30);
    let s = compute_stokes(&params("4"), 15, 15, &ctx).unwrap();
    assert!(dist(&s.k_plus, &s.k_minus.clone().conj(), &ctx) < 1e-28);
}

#[test]
fn real_solution_is_conjugation_symmetric() {
    let ctx = PrecisionContext::new(30);
    let p = params("15/7");
    let two = pipelines::mu157_at_two(&ctx).unwrap();
    assert!(two.y.imag().to_f64().abs() < 1e-28);
    let mut up = Walker::new(two.clone(), &p, &ctx).unwrap();
    let mut down = Walker::new(two, &p, &ctx).unwrap();
    up.walk_segment(&ctx.complex((1, 1)), 60, 30).unwrap();
    down.walk_segment(&ctx.complex((1, -1)), 60, 30).unwrap();
    assert!(dist(&up.state().y, &down.state().y.clone().conj(), &ctx) < 1e-25);
}

#[test]
fn step_halving_converges() {
    let ctx = PrecisionContext::new(40);
    let a = pipelines::mu1_origin(&ctx, 500).unwrap();
    let b = pipelines::mu1_origin(&ctx, 1000).unwrap();
    assert!(dist(&a.y, &b.y, &ctx) < 1e-38);
}

#[test]
fn walk_there_and_back() {
    let ctx = PrecisionContext::new(40);
    let p = params("1");
    let o = pipelines::mu1_origin(&ctx, 1000).unwrap();
    let mut w = Walker::new(o.clone(), &p, &ctx).unwrap();
    w.walk_segment(&ctx.complex((-1, 1)), 100, 40).unwrap();
    w.walk_segment(&ctx.complex(0), 100, 40).unwrap();
    assert!(dist(&w.state().y, &o.y, &ctx) < 1e-35);
    assert!(dist(&w.state().dy, &o.dy, &ctx) < 1e-35);
}

#[test]
fn first_zero_is_a_zero() {
    let ctx = PrecisionContext::new(40);
    let p = params("1");
    let o = pipelines::mu1_origin(&ctx, 1000).unwrap();
    let cfg = ContourConfig::new(ctx.real(0.5), 60, 40);
    let z = contour_locate(&ctx.complex(-0.5), &o, &p, &cfg, Functional::ZeroLocation, &ctx).unwrap();
    let mut w = Walker::new(o, &p, &ctx).unwrap();
    w.walk_segment(&z.location, 10, 40).unwrap();
    assert!(mp::abs(&w.state().y).to_f64() < 1e-35);
}

#[test]
fn trapezoid_converges_with_node_count() {
    let ctx = PrecisionContext::new(40);
    let p = params("1");
    let o = pipelines::mu1_origin(&ctx, 1000).unwrap();
    let z = |m| {
        let cfg = ContourConfig::new(ctx.real(0.5), m, 40).stability_tolerance(None);
        contour_locate(&ctx.complex(-0.5), &o, &p, &cfg, Functional::ZeroLocation, &ctx)
            .unwrap()
            .location
    };
    let (a, b, c) = (z(15), z(30), z(60));
    let (d1, d2) = (dist(&a, &c, &ctx), dist(&b, &c, &ctx));
    // geometric convergence: doubling M roughly squares the error
    assert!(d2 < d1 * d1 * 1e3 + 1e-38, "{d1:e} {d2:e}");
    assert!(d2 < d1 * 1e-3);
}

#[test]
fn log_correction_removes_the_radius_bias() {
    let ctx = PrecisionContext::new(30);
    let p = params("15/7");
    let two = pipelines::mu157_at_two(&ctx).unwrap();
    let printed = reference::case("mu157-p1").unwrap();
    let guess = mp::parse_complex(printed.get("p1 (r=1/100)").unwrap(), ctx.bits()).unwrap();
    let near = ctx.complex(&guess + mp::parse_real("1/100", ctx.bits()).unwrap());
    let mut w = Walker::with_options(two, &p, &ctx, pipelines::approach_options()).unwrap();
    w.walk_segment(&near, 1000, 20).unwrap();
    let seed = w.into_state();
    let locate = |r: &str| {
        let cfg = ContourConfig::new(mp::parse_real(r, ctx.bits()).unwrap(), 1000, 20)
            .approach_steps(100)
            .walk_options(pipelines::approach_options());
        contour_locate(&guess, &seed, &p, &cfg, Functional::PoleLocation, &ctx).unwrap()
    };
    let coarse = locate("1/100");
    let fine = locate("1/1000");
    let corrected = log_corrected_locate(&coarse, &p, &ctx).unwrap();
    let raw_gap = dist(&coarse.location, &fine.location, &ctx);
    let corrected_gap = dist(&corrected.location, &fine.location, &ctx);
    // the next term is smaller by a further factor of order r
    assert!(corrected_gap < raw_gap / 50.0, "{raw_gap:e} {corrected_gap:e}");
}

#[test]
fn borel_root_test_approaches_inverse_sqrt3() {
    let ctx = PrecisionContext::new(30);
    let b = borel_taylor(&params("1"), 400, &ctx).unwrap();
    let r = borel_root_test(&b).unwrap();
    assert!((r * 3f64.sqrt() - 1.0).abs() < 0.05, "{r}");
}

#[test]
fn stokes_doubling_gains_a_correction_order() {
    let ctx = PrecisionContext::new(90);
    let p = params("1");
    let exact = exact_stokes_mu1(&ctx);
    let err = |n| dist(&compute_stokes(&p, n, n, &ctx).unwrap().k_minus, &exact, &ctx);
    let (e50, e100) = (err(50), err(100));
    assert!(e100 / e50 < 1e-10, "{e50:e} {e100:e}");
}
