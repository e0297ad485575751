//! Evaluation of y₋(x), y₋'(x) for large |x|: optimal truncation (level 0),
//! the first hyperasymptotic re-expansion (level 1) and the resummed
//! transseries near the edge of the sector.

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::continuation::SolutionState;
use crate::error::{Error, Result};
use crate::mp::{self, PrecisionContext};
use crate::series::{base_series, level_one_series, Branch, ProblemParams};
use crate::stokes::StokesResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Zero,
    One,
}

/// N = round(√3|z|), ties to even. Level one uses 2N outer terms and N inner
/// terms built on the same N.
pub fn optimal_n(z: &Complex, level: Level) -> Result<usize> {
    let _ = level;
    let r = mp::abs(z).to_f64();
    if r <= 1.0 {
        return Err(Error::TooClose(format!("{r}")));
    }
    let target = 3f64.sqrt() * r;
    let floor = target.floor();
    let frac = target - floor;
    let n = if frac > 0.5 || (frac == 0.5 && floor as u64 % 2 == 1) {
        floor + 1.0
    } else {
        floor
    };
    Ok(n as usize)
}

/// Number of non-zero terms among a₀ … a_{N−1} (odd coefficients vanish).
pub fn nonzero_terms(n: usize) -> usize {
    n.div_ceil(2)
}

/// An evaluated point together with the truncation that produced it.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub state: SolutionState,
    pub level: Level,
    /// Truncation N (level one sums the base series to 2N−1).
    pub n_terms: usize,
    /// Estimated absolute error in y.
    pub est_err: Float,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub x_re: String,
    pub x_im: String,
    pub y_re: String,
    pub y_im: String,
    pub dy_re: String,
    pub dy_im: String,
    pub level: u8,
    #[serde(rename = "N")]
    pub n: usize,
    pub est_err: String,
}

impl Evaluation {
    pub fn report(&self, digits: u32) -> EvalReport {
        let s = &self.state;
        EvalReport {
            x_re: mp::format_real(s.x.real(), digits),
            x_im: mp::format_real(s.x.imag(), digits),
            y_re: mp::format_real(s.y.real(), digits),
            y_im: mp::format_real(s.y.imag(), digits),
            dy_re: mp::format_real(s.dy.real(), digits),
            dy_im: mp::format_real(s.dy.imag(), digits),
            level: match self.level {
                Level::Zero => 0,
                Level::One => 1,
            },
            n: self.n_terms,
            est_err: mp::format_real(&self.est_err, 3),
        }
    }
}

/// Evaluator holding the coefficient rows it has needed so far.
#[derive(Clone, Debug)]
pub struct Evaluator {
    params: ProblemParams,
    ctx: PrecisionContext,
    base: Vec<Complex>,
    level1: Vec<Complex>,
}

struct Frame {
    x: Complex,
    z: Complex,
    /// √(x^μ/6)
    prefactor: Complex,
}

impl Evaluator {
    pub fn new(params: &ProblemParams, ctx: &PrecisionContext) -> Self {
        Evaluator {
            params: params.clone(),
            ctx: *ctx,
            base: Vec::new(),
            level1: Vec::new(),
        }
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    /// z = λ x^{(μ+4)/4} on the principal branch.
    pub fn z_of_x(&self, x: &Complex) -> Complex {
        let ctx = &self.ctx;
        let e = self.params.z_exponent(ctx);
        let x = ctx.complex(x);
        mp::powf(&x, &e) * self.params.lambda(ctx)
    }

    fn frame(&self, x: &Complex) -> Result<Frame> {
        let ctx = &self.ctx;
        let x = ctx.complex(x);
        if x.is_zero() {
            return Err(Error::TooClose("0".into()));
        }
        let half_mu = ctx.real(self.params.mu_float(ctx) / 2u32);
        let prefactor = mp::powf(&x, &half_mu) / ctx.real(6).sqrt();
        let z = self.z_of_x(&x);
        Ok(Frame { x, z, prefactor })
    }

    fn check_level0_sector(&self, x: &Complex) -> Result<()> {
        let ctx = &self.ctx;
        let theta = mp::arg(&ctx.complex(x)).to_f64();
        let half = self.params.sector_half_angle(ctx).to_f64();
        let ok = match self.params.branch() {
            Branch::Minus => theta.abs() < half,
            Branch::Plus => theta > -1.5 * half && theta < 0.5 * half,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SectorViolation {
                what: "level-0 evaluation",
                x: mp::format_complex(x, 10),
                limit: format!("{half:.6}"),
            })
        }
    }

    fn ensure_base(&mut self, n: usize) -> Result<()> {
        if self.base.len() <= n {
            let want = (n + 1).max(2 * self.base.len()).max(8);
            self.base = base_series(&self.params, want, &self.ctx)?;
        }
        Ok(())
    }

    fn ensure_level1(&mut self, n: usize) -> Result<()> {
        self.ensure_base(n + 1)?;
        if self.level1.len() <= n {
            let want = (n + 1).max(2 * self.level1.len()).min(self.base.len() - 2);
            self.level1 = level_one_series(&self.params, &self.base, want, &self.ctx)?;
        }
        Ok(())
    }

    /// Returns (u, z·du/dz) for Σ_{n<count} a_n z^{−n}.
    fn base_sum(&self, z: &Complex, count: usize) -> (Complex, Complex) {
        let ctx = &self.ctx;
        let inv = ctx.complex(1) / z;
        let inv2 = ctx.complex(&inv * &inv);
        let mut power = ctx.complex(1);
        let mut u = ctx.complex(0);
        let mut w = ctx.complex(0);
        for n in (0..count).step_by(2) {
            let t = ctx.complex(&self.base[n] * &power);
            w -= ctx.complex(&t * n as u32);
            u += t;
            power *= &inv2;
        }
        // odd coefficients vanish; nothing else to add
        (u, w)
    }

    fn to_state(&self, f: &Frame, u: &Complex, zu: &Complex) -> SolutionState {
        let ctx = &self.ctx;
        let half_mu = ctx.real(self.params.mu_float(ctx) / 2u32);
        let e = self.params.z_exponent(ctx);
        let y = ctx.complex(&f.prefactor * u);
        let inner = ctx.complex(u * &half_mu) + ctx.complex(zu * &e);
        let dy = ctx.complex(&f.prefactor * &inner) / &f.x;
        SolutionState::new(f.x.clone(), y, dy)
    }

    /// Optimally truncated level-0 evaluation with the term-wise derivative.
    pub fn eval_level0(&mut self, x: &Complex, n_override: Option<usize>) -> Result<Evaluation> {
        self.check_level0_sector(x)?;
        let f = self.frame(x)?;
        let n = match n_override {
            Some(n) => n,
            None => optimal_n(&f.z, Level::Zero)?,
        };
        if n < 4 {
            return Err(Error::TooClose(mp::format_real(&mp::abs(&f.z), 6)));
        }
        let first_omitted = n + n % 2;
        self.ensure_base(first_omitted)?;
        let (u, zu) = self.base_sum(&f.z, n);
        let ctx = &self.ctx;
        let omitted = ctx.complex(&self.base[first_omitted])
            / mp::powf(&f.z, &ctx.real(first_omitted as u32));
        let est_err = mp::abs(&omitted) * mp::abs(&f.prefactor);
        Ok(Evaluation {
            state: self.to_state(&f, &u, &zu),
            level: Level::Zero,
            n_terms: n,
            est_err,
        })
    }

    /// Level-1 hyperasymptotic evaluation for the a₀,₀ = −1 family.
    pub fn eval_level1(
        &mut self,
        x: &Complex,
        stokes: &StokesResult,
        n_override: Option<usize>,
    ) -> Result<Evaluation> {
        if self.params.branch() != Branch::Minus {
            return Err(Error::InvalidParameter(
                "level-1 evaluation is implemented for the a00 = -1 family".into(),
            ));
        }
        let f = self.frame(x)?;
        let ctx = self.ctx;
        let half_pi = ctx.pi() / 2u32;
        let arg_z = mp::arg(&f.z);
        if Float::with_val(ctx.bits(), arg_z.abs_ref()) >= half_pi {
            return Err(Error::SectorViolation {
                what: "level-1 evaluation",
                x: mp::format_complex(x, 10),
                limit: "|arg z| < pi/2".into(),
            });
        }
        let n = match n_override {
            Some(n) => n,
            None => optimal_n(&f.z, Level::One)?,
        };
        if n < 2 {
            return Err(Error::TooClose(mp::format_real(&mp::abs(&f.z), 6)));
        }
        self.ensure_base(2 * n)?;
        self.ensure_level1(n)?;
        let (mut u, mut zu) = self.base_sum(&f.z, 2 * n);

        let nu = self.params.nu(&ctx);
        let s3 = ctx.real(3).sqrt();
        let sigma_plus = ctx.complex((0, s3.clone()));
        let sigma_minus = ctx.complex((0, -s3));
        let two_pi_i = ctx.complex((0, ctx.pi() * 2u32));
        let c_plus = ctx.complex(&stokes.k_plus / &two_pi_i);
        let c_minus = ctx.complex(&stokes.k_minus / &two_pi_i);

        let mut sum = ctx.complex(0);
        let mut dsum = ctx.complex(0);
        if !(c_plus.is_zero() && c_minus.is_zero()) {
            for m in 0..n {
                let order = ctx.complex((ctx.real((2 * n - m) as u32) - &nu, 0));
                let (fp, dfp) = mp::hyperterminant_f1_with_derivative(&f.z, &order, &sigma_plus, &ctx)?;
                let (fm, dfm) = mp::hyperterminant_f1_with_derivative(&f.z, &order, &sigma_minus, &ctx)?;
                let a = &self.level1[m];
                let sign_a = if m % 2 == 0 { a.clone() } else { ctx.complex(-a) };
                let wp = ctx.complex(&c_plus * &sign_a);
                let wm = ctx.complex(&c_minus * a);
                sum += ctx.complex(&wp * &fp) - ctx.complex(&wm * &fm);
                dsum += ctx.complex(&wp * &dfp) - ctx.complex(&wm * &dfm);
            }
        }
        // T = z^{1−2N} sum,  z dT/dz = (1−2N) T + z^{2−2N} dsum
        let one_minus = ctx.real(1) - ctx.real((2 * n) as u32);
        let zpow = mp::powf(&f.z, &one_minus);
        let t = ctx.complex(&zpow * &sum);
        let zt = ctx.complex(&t * &one_minus) + ctx.complex(&zpow * &f.z) * &dsum;
        u += &t;
        zu += &zt;

        let r = mp::abs(&f.z);
        let expo = ctx.real(-(ctx.real(3).sqrt() * 2u32) * &r).exp();
        let est_err = expo * &r * mp::abs(&f.prefactor);
        Ok(Evaluation {
            state: self.to_state(&f, &u, &zu),
            level: Level::One,
            n_terms: n,
            est_err,
        })
    }
}

/// Level-0 evaluation of y₋ (or y₊ when `params` carries the plus branch).
pub fn eval_level0(x: &Complex, params: &ProblemParams, ctx: &PrecisionContext) -> Result<Evaluation> {
    Evaluator::new(params, ctx).eval_level0(x, None)
}

/// Level-1 evaluation of y₋.
pub fn eval_level1(
    x: &Complex,
    params: &ProblemParams,
    stokes: &StokesResult,
    ctx: &PrecisionContext,
) -> Result<Evaluation> {
    Evaluator::new(params, ctx).eval_level1(x, stokes, None)
}

/// √(x^μ/6)(−1 + T/(1 + T/12)²) with T = K₊ e^{i√3 z} z^{−ν}: the first
/// transseries row resummed near arg x = 4π/(μ+4).
pub fn resum_boundary(
    x: &Complex,
    params: &ProblemParams,
    k_plus: &Complex,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let ev = Evaluator::new(params, ctx);
    let f = ev.frame(x)?;
    let t = boundary_exponential(&f.z, params, k_plus, ctx);
    let denom = ctx.complex(1) + ctx.complex(&t / 12u32);
    let floor = Float::with_val(ctx.bits(), Float::u_exp(1, 16 - ctx.bits() as i32));
    if mp::abs(&denom) <= floor {
        return Err(Error::ResummationPole(mp::format_complex(x, 12)));
    }
    let sq = ctx.complex(&denom * &denom);
    let inner = t / sq - 1u32;
    Ok(f.prefactor * inner)
}

/// K₊ e^{i√3 z} z^{−ν}.
pub fn boundary_exponential(z: &Complex, params: &ProblemParams, k_plus: &Complex, ctx: &PrecisionContext) -> Complex {
    let nu = params.nu(ctx);
    let i_s3 = ctx.complex((0, ctx.real(3).sqrt()));
    let e = (i_s3 * z).exp();
    let zp = mp::powf(z, &ctx.real(-nu));
    ctx.complex(k_plus * &e) * zp
}
