//! Formal series and transseries coefficients a_{n,k} of the rescaled
//! equation
//!
//! ```text
//! u'' + 2ν u'/z + (4/5)ν(6ν/5 − 1) u/z² = (3/2)(u² − 1)
//! ```
//!
//! together with the closed-form resummation functions G₀ and G₁.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{self, PrecisionContext};

/// Which square root of 3a₀,₀ the transseries is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// a₀,₀ = −1, √(3a₀,₀) = i√3: the solution with y ~ −√(x^μ/6).
    Minus,
    /// a₀,₀ = +1, √(3a₀,₀) = √3.
    Plus,
}

impl Branch {
    pub fn a00(self) -> i32 {
        match self {
            Branch::Minus => -1,
            Branch::Plus => 1,
        }
    }
}

/// One instance of the equation y'' = 6y² − x^μ.
///
/// μ is held as an exact rational so that ν and λ are not contaminated by a
/// decimal rounding of μ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProblemParams {
    mu: Rational,
    branch: Branch,
}

impl ProblemParams {
    pub fn new(mu: Rational, branch: Branch) -> Result<Self> {
        if mu <= -4 {
            return Err(Error::InvalidParameter(format!("mu must exceed -4, got {mu}")));
        }
        Ok(ProblemParams { mu, branch })
    }

    /// The y₋ instance (a₀,₀ = −1) for the given μ.
    pub fn minus(mu: Rational) -> Result<Self> {
        Self::new(mu, Branch::Minus)
    }

    /// Parses μ from `"1"`, `"15/7"`, `"-0.5"` or `"2.5e-1"` exactly.
    pub fn parse_mu(s: &str) -> Result<Rational> {
        parse_rational(s)
    }

    pub fn with_branch(&self, branch: Branch) -> Self {
        ProblemParams {
            mu: self.mu.clone(),
            branch,
        }
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn a00(&self) -> i32 {
        self.branch.a00()
    }

    /// ν = 5μ/(2(μ+4)), exactly.
    pub fn nu_exact(&self) -> Rational {
        Rational::from(5 * &self.mu) / Rational::from(2 * Rational::from(&self.mu + 4))
    }

    /// a₂,₀ = (4/15)ν(6ν/5 − 1), exactly.
    pub fn a20_exact(&self) -> Rational {
        let nu = self.nu_exact();
        let inner = Rational::from(Rational::from(6 * &nu) / 5) - 1;
        Rational::from(4 * nu) / 15 * inner
    }

    pub fn mu_float(&self, ctx: &PrecisionContext) -> Float {
        ctx.real(&self.mu)
    }

    pub fn nu(&self, ctx: &PrecisionContext) -> Float {
        ctx.real(&self.nu_exact())
    }

    /// λ = 8·6^{−1/4}/(μ+4).
    pub fn lambda(&self, ctx: &PrecisionContext) -> Float {
        let six = ctx.real(6);
        let quarter = six.root(4);
        let mu4 = ctx.real(Rational::from(&self.mu + 4));
        ctx.real(8) / quarter / mu4
    }

    /// The exponent (μ+4)/4 in z = λ x^{(μ+4)/4}.
    pub fn z_exponent(&self, ctx: &PrecisionContext) -> Float {
        ctx.real(Rational::from(&self.mu + 4) / 4)
    }

    /// √(3a₀,₀), fixed to i√3 on the minus branch.
    pub fn sqrt3a00(&self, ctx: &PrecisionContext) -> Complex {
        let s3 = ctx.real(3).sqrt();
        match self.branch {
            Branch::Minus => ctx.complex((0, s3)),
            Branch::Plus => ctx.complex((s3, 0)),
        }
    }

    /// μ as a non-negative integer, when it is one.
    pub fn mu_nonnegative_integer(&self) -> Option<u32> {
        if *self.mu.denom() == 1 && self.mu >= 0 {
            self.mu.numer().to_u32()
        } else {
            None
        }
    }

    /// Opening half-angle 4π/(μ+4) of the sector |arg x| < 4π/(μ+4).
    pub fn sector_half_angle(&self, ctx: &PrecisionContext) -> Float {
        ctx.pi() * 4u32 / ctx.real(Rational::from(&self.mu + 4))
    }
}

impl fmt::Display for ProblemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu={} a00={}", self.mu, self.a00())
    }
}

/// Exact parse of a rational or finite decimal string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse {s:?} as an exact rational"));
    if t.contains('/') {
        return Rational::from_str(t).map_err(|_| bad());
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let numer = Integer::from_str(&digits).map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = Integer::from(10);
    let mut r = Rational::from(numer);
    if scale >= 0 {
        r *= Integer::from(ten.pow(scale as u32));
    } else {
        r /= Integer::from(ten.pow((-scale) as u32));
    }
    if negative {
        r = -r;
    }
    Ok(r)
}

/// Base series a₀,₀ … a_{n_max,0}.
///
/// a₂,₀ and a₄,₀ are seeded from their closed forms; the rest follow from
/// 3a₀,₀ a_n = (n−2)(n−1−2ν) a_{n−2} − (3/2) Σ_{m=3}^{n−3} a_m a_{n−m}.
pub fn base_series(params: &ProblemParams, n_max: usize, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    if n_max < 4 {
        return Err(Error::InvalidParameter(format!("n_max must be at least 4, got {n_max}")));
    }
    let a00 = params.a00();
    let nu = params.nu(ctx);
    let a20 = params.a20_exact();
    let nu_r = params.nu_exact();
    let a40 = Rational::from(2 * Rational::from(Rational::from(2 * &nu_r) / 15 - 1))
        * Rational::from(Rational::from(3 * &nu_r) / 5 - 1)
        * a00
        * &a20;

    // The base row is real; keep it in Floats and promote at the end.
    let mut a: Vec<Float> = vec![ctx.real(0); n_max + 1];
    a[0] = ctx.real(a00);
    a[2] = ctx.real(&a20);
    a[4] = ctx.real(&a40);
    let two_nu = ctx.real(&nu * 2u32);
    for n in (6..=n_max).step_by(2) {
        let mut conv = ctx.real(0);
        for m in (4..=n - 4).step_by(2) {
            conv += ctx.real(&a[m] * &a[n - m]);
        }
        let factor = ctx.real((n - 1) as u32) - &two_nu;
        let lead = ctx.real(&factor * &a[n - 2]) * (n - 2) as u32;
        let rhs = lead - conv * 1.5f64;
        a[n] = rhs / (3 * a00);
    }
    Ok(a.into_iter().map(|v| ctx.complex((v, 0))).collect())
}

/// Level-one row a₀,₁ … a_{n_max,1}, with a₀,₁ = 1 and
/// 2√(3a₀,₀) n a_{n,1} = (n−1+ν)(ν−n) a_{n−1,1} + 3 Σ_{m=4}^{n+1} a_{m,0} a_{n−m+1,1}.
///
/// `base` must reach index n_max + 1.
pub fn level_one_series(
    params: &ProblemParams,
    base: &[Complex],
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Complex>> {
    if base.len() < n_max + 2 {
        return Err(Error::InvalidParameter(format!(
            "level-one row to n = {n_max} needs the base row to n = {}",
            n_max + 1
        )));
    }
    let nu = params.nu(ctx);
    let beta = params.sqrt3a00(ctx);
    let mut a1: Vec<Complex> = Vec::with_capacity(n_max + 1);
    a1.push(ctx.complex(1));
    for n in 1..=n_max {
        let c1 = ctx.real((n - 1) as u32) + &nu;
        let c2 = ctx.real(&nu - n as u32);
        let mut rhs = ctx.complex(&a1[n - 1]) * ctx.real(&c1 * &c2);
        let mut conv = ctx.complex(0);
        for m in 4..=n + 1 {
            conv += ctx.complex(&base[m] * &a1[n + 1 - m]);
        }
        rhs += conv * 3u32;
        let denom = ctx.complex(&beta * (2 * n) as u32);
        a1.push(rhs / denom);
    }
    Ok(a1)
}

/// Two-index table of transseries coefficients, stored row by row in k.
#[derive(Clone, Debug)]
pub struct CoeffTable {
    params: ProblemParams,
    ctx: PrecisionContext,
    rows: Vec<Vec<Complex>>,
}

impl CoeffTable {
    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn n_max(&self) -> usize {
        self.rows[0].len() - 1
    }

    pub fn k_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// a_{n,k}.
    pub fn get(&self, n: usize, k: usize) -> &Complex {
        &self.rows[k][n]
    }

    pub fn row(&self, k: usize) -> &[Complex] {
        &self.rows[k]
    }

    /// CSV with columns `n,k,re,im` at `digits` significant digits.
    pub fn write_csv<W: Write>(&self, writer: W, digits: u32) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "k", "re", "im"])?;
        for (k, row) in self.rows.iter().enumerate() {
            for (n, a) in row.iter().enumerate() {
                w.write_record([
                    n.to_string(),
                    k.to_string(),
                    mp::format_real(a.real(), digits),
                    mp::format_real(a.imag(), digits),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Full table a_{n,k} for 0 ≤ n ≤ n_max, 0 ≤ k ≤ k_max.
///
/// Rows k ≥ 2 come from the level-k recurrence with a_{0,k} = k/(12a₀,₀)^{k−1}.
pub fn transseries_table(
    params: &ProblemParams,
    n_max: usize,
    k_max: usize,
    ctx: &PrecisionContext,
) -> Result<CoeffTable> {
    if n_max < 1 || k_max < 1 {
        return Err(Error::InvalidParameter("n_max and k_max must be at least 1".into()));
    }
    let mut base = base_series(params, (n_max + 1).max(4), ctx)?;
    let level1 = level_one_series(params, &base, n_max, ctx)?;
    base.truncate(n_max + 1);
    let mut rows = vec![base, level1];

    let a00 = params.a00();
    let nu = params.nu(ctx);
    let beta = params.sqrt3a00(ctx);
    for k in 2..=k_max {
        let mut row: Vec<Complex> = Vec::with_capacity(n_max + 1);
        let twelve = Rational::from(12 * a00);
        let a0k = Rational::from(k as u32) / Rational::from(twelve.pow((k - 1) as i32));
        row.push(ctx.complex(&a0k));
        let lead = ctx.real((3 * (k * k - 1)) as u32 as i64 * a00 as i64);
        let kf = ctx.real(k as u32);
        for n in 1..=n_max {
            let mut quad = ctx.complex(0);
            for l in 1..k {
                for m in 0..=n {
                    quad += ctx.complex(&rows[l][m] * &rows[k - l][n - m]);
                }
            }
            let mut rhs = quad * 1.5f64;
            let c1 = ctx.real((n - 1) as u32) + ctx.real(&nu * (k - 1) as u32);
            let t1 = ctx.complex(&beta * &row[n - 1]) * ctx.real(&c1 * &kf) * 2u32;
            rhs -= t1;
            if n >= 2 {
                let c2 = ctx.real((n - 2) as u32) + ctx.real(&nu * k as u32);
                let c3 = ctx.real((n - 1) as u32) + ctx.real(&nu * (k as f64 - 2.0));
                rhs -= ctx.complex(&row[n - 2]) * ctx.real(&c2 * &c3);
            }
            let mut conv = ctx.complex(0);
            for m in 4..=n {
                conv += ctx.complex(&rows[0][m] * &row[n - m]);
            }
            rhs += conv * 3u32;
            row.push(rhs / &lead);
        }
        rows.push(row);
    }
    Ok(CoeffTable {
        params: params.clone(),
        ctx: *ctx,
        rows,
    })
}

/// Rational closed forms of G₀ and G₁ as coefficient lists in powers of X.
#[derive(Clone, Debug)]
pub struct ResumFunction {
    params: ProblemParams,
    g0_num: Vec<Complex>,
    g0_den: Vec<Complex>,
    g1_num: Vec<Complex>,
    g1_den: Vec<Complex>,
    pole: Complex,
}

impl ResumFunction {
    /// G₀(X) = a₀,₀ + 144X/(X − 12a₀,₀)² and
    /// G₁(X) = ν√(3a₀,₀) X (288(1−ν) − 8(3ν−19)a₀,₀X + 2X² − a₀,₀X³/90)/(X − 12a₀,₀)³.
    pub fn new(params: &ProblemParams, ctx: &PrecisionContext) -> Self {
        let a = params.a00();
        let nu = params.nu(ctx);
        let nb = ctx.complex(&params.sqrt3a00(ctx) * &nu);
        let g0_num = vec![ctx.complex(144 * a), ctx.complex(120), ctx.complex(a)];
        let g0_den = vec![ctx.complex(144), ctx.complex(-24 * a), ctx.complex(1)];
        let one_minus_nu = ctx.real(1) - &nu;
        let three_nu = ctx.real(&nu * 3u32) - 19u32;
        let g1_num = vec![
            ctx.complex(0),
            ctx.complex(&nb * ctx.real(&one_minus_nu * 288u32)),
            ctx.complex(&nb * ctx.real(&three_nu * (-8 * a))),
            ctx.complex(&nb * 2u32),
            ctx.complex(&nb * ctx.real(-a)) / 90u32,
        ];
        let g1_den = vec![ctx.complex(-1728 * a), ctx.complex(432), ctx.complex(-36 * a), ctx.complex(1)];
        ResumFunction {
            params: params.clone(),
            g0_num,
            g0_den,
            g1_num,
            g1_den,
            pole: ctx.complex(12 * a),
        }
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    /// The double/triple pole X = 12a₀,₀.
    pub fn pole(&self) -> &Complex {
        &self.pole
    }

    pub fn g0(&self, x: &Complex) -> Result<Complex> {
        ratio(&self.g0_num, &self.g0_den, x, &self.pole)
    }

    pub fn g1(&self, x: &Complex) -> Result<Complex> {
        ratio(&self.g1_num, &self.g1_den, x, &self.pole)
    }

    /// Taylor coefficients of G₀ at X = 0, which should equal a_{0,k}.
    pub fn g0_taylor(&self, terms: usize) -> Vec<Complex> {
        series_quotient(&self.g0_num, &self.g0_den, terms)
    }

    /// Taylor coefficients of G₁ at X = 0, which should equal a_{1,k}.
    pub fn g1_taylor(&self, terms: usize) -> Vec<Complex> {
        series_quotient(&self.g1_num, &self.g1_den, terms)
    }
}

/// G₀(X) for the given instance.
pub fn g0(x: &Complex, params: &ProblemParams, ctx: &PrecisionContext) -> Result<Complex> {
    ResumFunction::new(params, ctx).g0(x)
}

/// G₁(X) for the given instance.
pub fn g1(x: &Complex, params: &ProblemParams, ctx: &PrecisionContext) -> Result<Complex> {
    ResumFunction::new(params, ctx).g1(x)
}

fn horner(coeffs: &[Complex], x: &Complex) -> Complex {
    let prec = x.prec().0.max(coeffs[0].prec().0);
    let mut acc = Complex::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn ratio(num: &[Complex], den: &[Complex], x: &Complex, pole: &Complex) -> Result<Complex> {
    let prec = num[0].prec().0;
    let gap = mp::abs(&Complex::with_val(prec, x - pole));
    let floor = Float::with_val(prec, Float::u_exp(1, 8 - prec as i32));
    if gap <= floor {
        return Err(Error::ResummationPole(mp::format_complex(x, 12)));
    }
    let x = Complex::with_val(prec, x);
    Ok(horner(num, &x) / horner(den, &x))
}

fn series_quotient(num: &[Complex], den: &[Complex], terms: usize) -> Vec<Complex> {
    let prec = num[0].prec().0;
    let mut out: Vec<Complex> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut acc = num.get(k).cloned().unwrap_or_else(|| Complex::with_val(prec, 0));
        for j in 1..den.len().min(k + 1) {
            acc -= Complex::with_val(prec, &den[j] * &out[k - j]);
        }
        out.push(acc / &den[0]);
    }
    out
}
