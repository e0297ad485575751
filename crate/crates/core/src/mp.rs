//! Arbitrary-precision context and the handful of special functions the rest
//! of the crate consumes: the complex gamma function, the upper incomplete
//! gamma function, the first hyperterminant and Pochhammer symbols.
//!
//! Everything is built on MPFR/MPC through [`rug`]. Values are plain
//! [`rug::Float`] and [`rug::Complex`]; a [`PrecisionContext`] decides how many
//! bits they carry.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Requested output accuracy plus guard digits.
///
/// All arithmetic runs at `target_digits + guard_digits` decimal digits;
/// results are meant to be trusted (and reported) at `target_digits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    target_digits: u32,
    guard_digits: u32,
}

impl PrecisionContext {
    pub const DEFAULT_GUARD: u32 = 20;
    pub const MIN_GUARD: u32 = 10;

    /// Context with the default of 20 guard digits.
    pub fn new(target_digits: u32) -> Self {
        PrecisionContext {
            target_digits: target_digits.max(1),
            guard_digits: Self::DEFAULT_GUARD,
        }
    }

    pub fn with_guard(target_digits: u32, guard_digits: u32) -> Result<Self> {
        if target_digits == 0 {
            return Err(Error::InvalidParameter("target_digits must be positive".into()));
        }
        if guard_digits < Self::MIN_GUARD {
            return Err(Error::InvalidParameter(format!(
                "guard_digits must be at least {}, got {guard_digits}",
                Self::MIN_GUARD
            )));
        }
        Ok(PrecisionContext {
            target_digits,
            guard_digits,
        })
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn working_digits(&self) -> u32 {
        self.target_digits + self.guard_digits
    }

    /// Binary precision of every value created through this context.
    pub fn bits(&self) -> u32 {
        (self.working_digits() as f64 * LOG2_10).ceil() as u32 + 4
    }

    /// Same target, more guard digits.
    pub fn with_extra_guard(&self, extra: u32) -> Self {
        PrecisionContext {
            target_digits: self.target_digits,
            guard_digits: self.guard_digits + extra,
        }
    }

    /// Guard digits scaled up by `ceil(log10 n!)` for `n`-term recurrences.
    pub fn for_recurrence_depth(&self, n: usize) -> Self {
        let log10_fact: f64 = (2..=n).map(|k| (k as f64).log10()).sum();
        self.with_extra_guard(log10_fact.ceil() as u32)
    }

    pub fn real<T>(&self, value: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn complex<T>(&self, value: T) -> Complex
    where
        Complex: Assign<T>,
    {
        Complex::with_val(self.bits(), value)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// `10^(-target_digits)`.
    pub fn tolerance(&self) -> Float {
        let ten = self.real(10);
        ten.pow(-(self.target_digits as i32))
    }
}

/// |z| at the precision of `z`.
pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// Principal argument in (−π, π].
pub fn arg(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.arg_ref())
}

/// Approximate log2 |z|; −∞ for zero.
pub fn log2_abs(z: &Complex) -> f64 {
    let a = abs(z);
    if a.is_zero() {
        f64::NEG_INFINITY
    } else {
        a.log2().to_f64()
    }
}

/// Principal logarithm with the argument taken in (−π, π].
///
/// MPC follows the signed-zero convention on the negative real axis, so
/// `-x - 0i` would get argument −π. Here the cut is closed from above.
pub fn principal_ln(z: &Complex) -> Complex {
    let prec = z.prec().0;
    let modulus = abs(z).ln();
    let mut theta = arg(z);
    if z.imag().is_zero() && z.real().is_sign_negative() && !z.real().is_zero() {
        theta = Float::with_val(prec, Constant::Pi);
    }
    Complex::with_val(prec, (modulus, theta))
}

/// `z^w = exp(w Log z)` on the principal branch.
pub fn powc(z: &Complex, w: &Complex) -> Complex {
    (principal_ln(z) * w).exp()
}

/// `z^w` for real `w`.
pub fn powf(z: &Complex, w: &Float) -> Complex {
    (principal_ln(z) * w).exp()
}

fn nonpositive_integer(z: &Complex) -> Option<i64> {
    if !z.imag().is_zero() {
        return None;
    }
    let re = z.real();
    if re.is_integer() && *re <= 0 {
        re.to_integer().and_then(|i| i.to_i64())
    } else {
        None
    }
}

fn is_integer(z: &Complex) -> bool {
    z.imag().is_zero() && z.real().is_integer()
}

/// Γ(z) for complex `z`.
///
/// Stirling's series after an upward shift, with reflection for Re z < 1/2.
pub fn gamma(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    if let Some(n) = nonpositive_integer(z) {
        return Err(Error::GammaPole(n.to_string()));
    }
    let work = ctx.bits() + 32;
    let zw = Complex::with_val(work, z);
    Ok(Complex::with_val(ctx.bits(), gamma_at(&zw, work)))
}

fn gamma_at(z: &Complex, prec: u32) -> Complex {
    let pi = Float::with_val(prec, Constant::Pi);
    if *z.real() < 0.5 {
        let reflected = Complex::with_val(prec, 1) - z;
        let s = (z.clone() * &pi).sin();
        let g = gamma_at(&reflected, prec);
        return Complex::with_val(prec, (pi, 0)) / (s * g);
    }
    // Stirling's series has minimal term ~ exp(-2π|w|).
    let radius = 0.12 * prec as f64 + 12.0;
    let mut w = z.clone();
    let mut shift_product = Complex::with_val(prec, 1);
    while abs(&w).to_f64() < radius {
        shift_product *= &w;
        w += 1;
    }
    ln_gamma_stirling(&w, prec).exp() / shift_product
}

fn ln_gamma_stirling(w: &Complex, prec: u32) -> Complex {
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let four_pi2 = Float::with_val(prec, &two_pi * &two_pi);
    let ln_w = w.clone().ln();
    let half_ln_2pi = two_pi.clone().ln() / 2u32;
    let mut sum = (w.clone() - 0.5f64) * &ln_w - w + &half_ln_2pi;

    // |B_2k| / (2k(2k-1)) = 2 (2k-2)! ζ(2k) / (2π)^{2k}
    let w2 = Complex::with_val(prec, w * w);
    let mut wpow = w.clone();
    let mut g = Float::with_val(prec, 2u32) / &four_pi2;
    let eps = Float::with_val(prec, Float::u_exp(1, -(prec as i32) - 8));
    for k in 1u32..(4 * prec) {
        let zeta = Float::with_val(prec, Float::zeta_u(2 * k));
        let term = Complex::with_val(prec, (Float::with_val(prec, &g * &zeta), 0)) / &wpow;
        if k % 2 == 1 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if abs(&term) < Float::with_val(prec, &eps * abs(&sum)) {
            break;
        }
        g *= (2 * k) * (2 * k - 1);
        g /= &four_pi2;
        wpow *= &w2;
    }
    sum
}

/// Upper incomplete gamma function Γ(a, z) on the principal branch.
///
/// Legendre's continued fraction when |z| > max(1, |a|), otherwise the
/// power-series route (through E₁ when `a` is a non-positive integer). The
/// series is re-run with more bits until the cancellation it measures is
/// covered.
pub fn upper_incomplete_gamma(a: &Complex, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let bits = ctx.bits();
    if z.real().is_zero() && z.imag().is_zero() {
        if *a.real() > 0 {
            return gamma(a, ctx);
        }
        return Err(Error::IncompleteGammaOrigin);
    }
    let abs_z = abs(z).to_f64();
    let abs_a = abs(a).to_f64();
    let value = if abs_z > abs_a.max(1.0) {
        incomplete_gamma_cf(a, z, bits + 32)?
    } else {
        incomplete_gamma_series(a, z, bits)?
    };
    Ok(Complex::with_val(bits, value))
}

fn incomplete_gamma_series(a: &Complex, z: &Complex, bits: u32) -> Result<Complex> {
    // Terms of the lower series peak around e^{|z|}.
    let mut extra = 48 + (2.0 * abs(z).to_f64() * LOG2_E) as u32;
    for _ in 0..6 {
        let prec = bits + extra;
        let (value, lost) = if let Some(n) = nonpositive_integer(a) {
            incomplete_gamma_negative_integer(n.unsigned_abs(), z, prec)
        } else {
            incomplete_gamma_kummer(a, z, prec)
        };
        if lost + 24.0 < extra as f64 {
            return Ok(value);
        }
        extra = lost.max(0.0) as u32 + 64;
    }
    Err(Error::NoConvergence {
        what: "incomplete gamma precision control",
        iterations: 6,
    })
}

/// Γ(a) − z^a e^{−z} Σ z^k / (a)_{k+1}; returns the value and the number of
/// bits lost to cancellation.
fn incomplete_gamma_kummer(a: &Complex, z: &Complex, prec: u32) -> (Complex, f64) {
    let a = Complex::with_val(prec, a);
    let z = Complex::with_val(prec, z);
    let eps_exp = -(prec as i32) - 8;
    let mut term = Complex::with_val(prec, 1) / &a;
    let mut sum = term.clone();
    let mut max_log = log2_abs(&term);
    let floor = abs(&a).to_f64() + abs(&z).to_f64();
    let mut k = 1u64;
    loop {
        let denom = a.clone() + k;
        term *= &z;
        term /= &denom;
        sum += &term;
        let lt = log2_abs(&term);
        max_log = max_log.max(lt);
        if (k as f64) > floor && lt < log2_abs(&sum) + eps_exp as f64 {
            break;
        }
        k += 1;
    }
    let prefactor = (principal_ln(&z) * &a - &z).exp();
    let lower = prefactor.clone() * &sum;
    let g = gamma_at(&a, prec);
    let value = g.clone() - &lower;
    let scale = log2_abs(&g).max(log2_abs(&prefactor) + max_log);
    let lost = scale - log2_abs(&value);
    (value, lost)
}

/// Γ(−n, z) = ((−1)^n/n!) (E₁(z) − e^{−z} Σ_{k<n} (−1)^k k!/z^{k+1}).
fn incomplete_gamma_negative_integer(n: u64, z: &Complex, prec: u32) -> (Complex, f64) {
    let z = Complex::with_val(prec, z);
    let eps_exp = -(prec as i32) - 8;
    let euler = Float::with_val(prec, Constant::Euler);

    // E₁(z) = −γ − ln z − Σ_{k≥1} (−z)^k/(k k!)
    let minus_z = Complex::with_val(prec, -&z);
    let mut power = Complex::with_val(prec, 1);
    let mut series = Complex::with_val(prec, 0);
    let mut max_log = f64::NEG_INFINITY;
    let floor = abs(&z).to_f64();
    let mut k = 1u64;
    loop {
        power *= &minus_z;
        power /= k;
        let term = power.clone() / k;
        series += &term;
        let lt = log2_abs(&term);
        max_log = max_log.max(lt);
        if (k as f64) > floor && lt < log2_abs(&series).max(0.0) + eps_exp as f64 {
            break;
        }
        k += 1;
    }
    let ln_z = principal_ln(&z);
    let e1 = Complex::with_val(prec, -&euler) - &ln_z - &series;
    max_log = max_log.max(log2_abs(&ln_z)).max(1.0);

    let mut tail = Complex::with_val(prec, 0);
    let mut t = Complex::with_val(prec, 1) / &z;
    for k in 0..n {
        if k % 2 == 0 {
            tail += &t;
        } else {
            tail -= &t;
        }
        t *= k + 1;
        t /= &z;
    }
    let e_minus_z = Complex::with_val(prec, -&z).exp();
    let tail = tail * &e_minus_z;
    let inner = e1 - &tail;
    let mut nfact = Float::with_val(prec, 1);
    for k in 2..=n {
        nfact *= k;
    }
    let mut value = inner.clone() / &nfact;
    if n % 2 == 1 {
        value = -value;
    }
    let lost = max_log.max(log2_abs(&tail)) - log2_abs(&inner);
    (value, lost)
}

fn incomplete_gamma_cf(a: &Complex, z: &Complex, prec: u32) -> Result<Complex> {
    let a = Complex::with_val(prec, a);
    let z = Complex::with_val(prec, z);
    let tiny = Complex::with_val(prec, (Float::with_val(prec, Float::u_exp(1, -(prec as i32) - 64)), 0));
    let eps = Float::with_val(prec, Float::u_exp(1, -(prec as i32) - 4));
    let mut b = z.clone() + 1u32 - &a;
    let mut c = Complex::with_val(prec, 1) / &tiny;
    let mut d = Complex::with_val(prec, 1) / &b;
    let mut h = d.clone();
    let max_iter = 200 * prec as usize + 50 * abs(&a).to_f64() as usize;
    let mut converged = false;
    for i in 1..=max_iter {
        let an = (a.clone() - i as u64) * i as u64;
        b += 2u32;
        d = an.clone() * &d + &b;
        if abs(&d).is_zero() {
            d.assign(&tiny);
        }
        c = an / &c + &b;
        if abs(&c).is_zero() {
            c.assign(&tiny);
        }
        d = Complex::with_val(prec, 1) / &d;
        let del = c.clone() * &d;
        h *= &del;
        if abs(&(del - 1u32)) < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "incomplete gamma continued fraction",
            iterations: max_iter,
        });
    }
    Ok((principal_ln(&z) * &a - &z).exp() * h)
}

/// Branch angle φ = π − arg σ reduced to (−π, π]: the direction of the
/// integration ray in the integral representation of the hyperterminant.
fn hyperterminant_ray(sigma: &Complex, prec: u32) -> Float {
    let pi = Float::with_val(prec, Constant::Pi);
    let mut phi = Float::with_val(prec, &pi - arg(sigma));
    if phi > pi {
        phi -= Float::with_val(prec, &pi * 2u32);
    }
    phi
}

/// First hyperterminant F⁽¹⁾(z; N+1, σ) = −e^{σz} (−z)^N Γ(N+1) Γ(−N, σz).
///
/// The integral form is ∫₀^{∞e^{iφ}} e^{σt} t^N /(z − t) dt with
/// φ = π − arg σ in (−π, π]. The branch of (−z)^N is the one inherited from
/// that integral: arg(−z) = φ + Arg(σz). F⁽¹⁾ is analytic in z off the ray
/// arg z = φ, where it has its Stokes jump.
pub fn hyperterminant_f1(
    z: &Complex,
    order: &Complex,
    sigma: &Complex,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    hyperterminant_parts(z, order, sigma, ctx).map(|p| Complex::with_val(ctx.bits(), &p.value))
}

/// F⁽¹⁾ together with ∂F⁽¹⁾/∂z.
///
/// ∂F/∂z = (σ + N/z) F + Γ(N+1) e^{iNφ} |σ|^{−N} / z.
pub fn hyperterminant_f1_with_derivative(
    z: &Complex,
    order: &Complex,
    sigma: &Complex,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    let parts = hyperterminant_parts(z, order, sigma, ctx)?;
    let prec = parts.value.prec().0;
    let z = Complex::with_val(prec, z);
    let sigma = Complex::with_val(prec, sigma);
    let n = Complex::with_val(prec, order) - 1u32;
    let phi = hyperterminant_ray(&sigma, prec);
    let ln_c = Complex::with_val(prec, (-abs(&sigma).ln(), phi));
    let c_pow = (ln_c * &n).exp();
    let deriv = (sigma + Complex::with_val(prec, &n / &z)) * &parts.value + parts.gamma_order * c_pow / &z;
    Ok((
        Complex::with_val(ctx.bits(), &parts.value),
        Complex::with_val(ctx.bits(), &deriv),
    ))
}

struct HyperterminantParts {
    value: Complex,
    gamma_order: Complex,
}

fn hyperterminant_parts(
    z: &Complex,
    order: &Complex,
    sigma: &Complex,
    ctx: &PrecisionContext,
) -> Result<HyperterminantParts> {
    if z.real().is_zero() && z.imag().is_zero() {
        return Err(Error::InvalidParameter("hyperterminant at z = 0".into()));
    }
    let inner = ctx.with_extra_guard(10);
    let prec = inner.bits();
    let z = Complex::with_val(prec, z);
    let sigma = Complex::with_val(prec, sigma);
    let order = Complex::with_val(prec, order);
    let n = order.clone() - 1u32;
    let w = Complex::with_val(prec, &sigma * &z);
    let phi = hyperterminant_ray(&sigma, prec);

    let minus_n = Complex::with_val(prec, -&n);
    let upper = upper_incomplete_gamma(&minus_n, &w, &inner)?;
    let gamma_order = gamma(&order, &inner)?;
    let phase = Float::with_val(prec, &phi + arg(&w));
    let log_minus_z = Complex::with_val(prec, (abs(&z).ln(), phase));
    let minus_z_pow = (log_minus_z * &n).exp();
    let value = -(w.exp() * minus_z_pow * &gamma_order * upper);
    Ok(HyperterminantParts { value, gamma_order })
}

/// Rising factorial (a)_m = a(a+1)…(a+m−1), with (a)_0 = 1.
pub fn pochhammer(a: &Complex, m: u32) -> Complex {
    let prec = a.prec().0;
    let mut acc = Complex::with_val(prec, 1);
    for j in 0..m {
        acc *= Complex::with_val(prec, a + j);
    }
    acc
}

/// `true` when `z` is an integer (real, no fractional part).
pub fn is_integral(z: &Complex) -> bool {
    is_integer(z)
}

/// Decimal rendering with `digits` significant digits. Plain notation for
/// moderate exponents, scientific otherwise.
pub fn format_real(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1) as usize;
    let s = x.to_string_radix(10, Some(digits));
    let (mantissa, exp) = match s.find('e') {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().unwrap_or(0)),
        None => (s.as_str(), 0),
    };
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let all: String = format!("{int_part}{frac_part}");
    let point = int_part.len() as i64 + exp;
    if !(-6..=21).contains(&point) {
        let first = &all[..1];
        let rest = &all[1..];
        let sci_exp = point - 1;
        return if rest.is_empty() {
            format!("{sign}{first}e{sci_exp}")
        } else {
            format!("{sign}{first}.{rest}e{sci_exp}")
        };
    }
    if point <= 0 {
        format!("{sign}0.{}{all}", "0".repeat((-point) as usize))
    } else if point as usize >= all.len() {
        format!("{sign}{all}{}", "0".repeat(point as usize - all.len()))
    } else {
        let (a, b) = all.split_at(point as usize);
        format!("{sign}{a}.{b}")
    }
}

/// `re+imi` rendering at `digits` significant digits per component.
pub fn format_complex(z: &Complex, digits: u32) -> String {
    let re = format_real(z.real(), digits);
    let im = format_real(z.imag(), digits);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

/// Parses a real decimal (`-2.75`, `1e-3`) or a rational (`15/7`).
pub fn parse_real(s: &str, prec: u32) -> Result<Float> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_real(num, prec)?;
        let d = parse_real(den, prec)?;
        if d.is_zero() {
            return Err(Error::InvalidParameter(format!("zero denominator in {s:?}")));
        }
        return Ok(n / d);
    }
    Float::parse(s)
        .map(|p| Float::with_val(prec, p))
        .map_err(|e| Error::InvalidParameter(format!("cannot parse {s:?} as a real: {e}")))
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` or `(a,b)`.
pub fn parse_complex(s: &str, prec: u32) -> Result<Complex> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner
            .split_once(',')
            .ok_or_else(|| Error::InvalidParameter(format!("expected (re,im), got {s:?}")))?;
        return Ok(Complex::with_val(prec, (parse_real(re, prec)?, parse_real(im, prec)?)));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex::with_val(prec, (parse_real(&t, prec)?, 0)));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx];
        if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let (re_s, im_s) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("0", body),
    };
    let im_s = match im_s {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(Complex::with_val(prec, (parse_real(re_s, prec)?, parse_real(im_s, prec)?)))
}
