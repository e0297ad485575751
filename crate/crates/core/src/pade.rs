//! Padé approximants from Taylor coefficients, and their zeros and poles.

use nalgebra::{Complex as C64, DMatrix};
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::continuation::radius_estimate;
use crate::error::{Error, Result};
use crate::mp::{self, PrecisionContext};

/// p(t)/q(t) in t = (x − center)/scale, q₀ = 1.
#[derive(Clone, Debug)]
pub struct RationalApproximant {
    pub center: Complex,
    /// Variable scaling used when solving; coefficients refer to t = (x − c)/scale.
    pub scale: Float,
    pub p: Vec<Complex>,
    pub q: Vec<Complex>,
    pub order: (usize, usize),
}

impl RationalApproximant {
    pub fn eval(&self, x: &Complex, ctx: &PrecisionContext) -> Complex {
        let t = ctx.complex(x - &self.center) / &self.scale;
        let (p, _) = horner(&self.p, &t, ctx);
        let (q, _) = horner(&self.q, &t, ctx);
        p / q
    }

    /// Taylor coefficients of p/q in the original variable x − center.
    pub fn taylor(&self, n: usize, ctx: &PrecisionContext) -> Vec<Complex> {
        let mut c: Vec<Complex> = Vec::with_capacity(n);
        for k in 0..n {
            let mut v = self.p.get(k).map(|p| ctx.complex(p)).unwrap_or_else(|| ctx.complex(0));
            for j in 1..=k.min(self.q.len() - 1) {
                v -= ctx.complex(&self.q[j] * &c[k - j]);
            }
            c.push(v);
        }
        let mut s = ctx.real(1);
        for v in c.iter_mut() {
            *v /= &s;
            s *= &self.scale;
        }
        c
    }
}

fn horner(coeffs: &[Complex], t: &Complex, ctx: &PrecisionContext) -> (Complex, Complex) {
    let mut p = ctx.complex(0);
    let mut dp = ctx.complex(0);
    for c in coeffs.iter().rev() {
        dp = ctx.complex(&dp * t) + &p;
        p = ctx.complex(&p * t) + c;
    }
    (p, dp)
}

/// [L/M] Padé approximant of Σ b_m (x − center)^m.
pub fn build_pade(
    taylor: &[Complex],
    center: &Complex,
    l: usize,
    m: usize,
    ctx: &PrecisionContext,
) -> Result<RationalApproximant> {
    if taylor.len() < l + m + 1 {
        return Err(Error::InvalidParameter(format!(
            "[{l},{m}] needs {} coefficients, got {}",
            l + m + 1,
            taylor.len()
        )));
    }
    let scale = if l + m >= 2 {
        radius_estimate(&taylor[..=l + m]).filter(|r| r.is_finite() && *r > 0.0)
    } else {
        None
    };
    let scale = ctx.real(scale.unwrap_or(1.0));
    let mut s = ctx.real(1);
    let c: Vec<Complex> = taylor[..=l + m]
        .iter()
        .map(|b| {
            let v = ctx.complex(b * &s);
            s *= &scale;
            v
        })
        .collect();
    let coef = |i: isize| -> Complex {
        if i < 0 {
            ctx.complex(0)
        } else {
            ctx.complex(&c[i as usize])
        }
    };

    let mut q = vec![ctx.complex(1)];
    if m > 0 {
        // Σ_{j=1..M} q_j c_{L+k−j} = −c_{L+k}, k = 1..M
        let mut a: Vec<Vec<Complex>> = (1..=m)
            .map(|k| (1..=m).map(|j| coef((l + k) as isize - j as isize)).collect())
            .collect();
        let mut rhs: Vec<Complex> = (1..=m).map(|k| -coef((l + k) as isize)).collect();
        let sol = solve_full_pivot(&mut a, &mut rhs, ctx).ok_or(Error::SingularPadeSystem { l, m })?;
        q.extend(sol);
    }
    let p: Vec<Complex> = (0..=l)
        .map(|i| {
            let mut v = ctx.complex(0);
            for (j, qj) in q.iter().enumerate().take(i.min(m) + 1) {
                v += ctx.complex(qj * &c[i - j]);
            }
            v
        })
        .collect();
    Ok(RationalApproximant {
        center: ctx.complex(center),
        scale,
        p,
        q,
        order: (l, m),
    })
}

/// Tries [L/M], then [L−1/M−1], … on singular blocks of the table.
pub fn build_pade_with_fallback(
    taylor: &[Complex],
    center: &Complex,
    l: usize,
    m: usize,
    ctx: &PrecisionContext,
) -> Result<RationalApproximant> {
    let (mut l, mut m) = (l, m);
    loop {
        match build_pade(taylor, center, l, m, ctx) {
            Err(Error::SingularPadeSystem { .. }) if l > 0 && m > 0 => {
                log::info!("singular Padé block at [{l},{m}], retrying one order lower");
                l -= 1;
                m -= 1;
            }
            other => return other,
        }
    }
}

fn solve_full_pivot(a: &mut [Vec<Complex>], rhs: &mut [Complex], ctx: &PrecisionContext) -> Option<Vec<Complex>> {
    let n = rhs.len();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut max_entry = ctx.real(0);
    for row in a.iter() {
        for v in row {
            let m = mp::abs(v);
            if m > max_entry {
                max_entry = m;
            }
        }
    }
    if max_entry.is_zero() {
        return None;
    }
    let tiny = ctx.real(&max_entry * ctx.real(Float::u_exp(1, 16 - ctx.bits() as i32)));
    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, ctx.real(-1));
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().skip(k) {
                let m = ctx.real(v.norm_ref());
                if m > best {
                    best = m;
                    pr = i;
                    pc = j;
                }
            }
        }
        if best.sqrt() <= tiny {
            return None;
        }
        a.swap(k, pr);
        rhs.swap(k, pr);
        if pc != k {
            for row in a.iter_mut() {
                row.swap(k, pc);
            }
            col_perm.swap(k, pc);
        }
        let pivot = ctx.complex(&a[k][k]);
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = ctx.complex(&a[i][k] / &pivot);
            for j in k + 1..n {
                let t = ctx.complex(&f * &a[k][j]);
                a[i][j] -= t;
            }
            let t = ctx.complex(&f * &rhs[k]);
            rhs[i] -= t;
            a[i][k] = ctx.complex(0);
        }
    }
    let mut x = vec![ctx.complex(0); n];
    for k in (0..n).rev() {
        let mut v = ctx.complex(&rhs[k]);
        for j in k + 1..n {
            v -= ctx.complex(&a[k][j] * &x[j]);
        }
        x[k] = v / &a[k][k];
    }
    let mut out = vec![ctx.complex(0); n];
    for (k, &c) in col_perm.iter().enumerate() {
        out[c] = x[k].clone();
    }
    Some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    Zero,
    Pole,
}

#[derive(Clone, Debug)]
pub struct PadeRoot {
    pub location: Complex,
    pub kind: RootKind,
    /// |poly(t)|/|poly'(t)·t| at the root.
    pub residual: f64,
    /// Part of a pole–zero pair closer than the doublet threshold.
    pub doublet: bool,
    /// Distance to the nearest root of the same kind.
    pub spacing: f64,
}

#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<PadeRoot>,
    /// Set when the iteration cap was hit before every root converged.
    pub partial: bool,
}

/// Zeros or poles of `approx`.
pub fn rational_roots(approx: &RationalApproximant, which: RootKind, ctx: &PrecisionContext) -> Result<RootSet> {
    let poly = match which {
        RootKind::Zero => &approx.p,
        RootKind::Pole => &approx.q,
    };
    let poly = trim(poly, ctx);
    if poly.len() < 2 {
        return Err(Error::InvalidParameter("polynomial of degree 0 has no roots".into()));
    }
    let (ts, partial) = polynomial_roots(&poly, ctx);
    let mut roots: Vec<PadeRoot> = ts
        .iter()
        .map(|t| {
            let (v, d) = horner(&poly, t, ctx);
            let den = mp::abs(&ctx.complex(&d * t));
            let residual = if den.is_zero() {
                mp::abs(&v).to_f64()
            } else {
                (mp::abs(&v) / den).to_f64()
            };
            PadeRoot {
                location: ctx.complex(&approx.center + ctx.complex(t * &approx.scale)),
                kind: which,
                residual,
                doublet: false,
                spacing: f64::INFINITY,
            }
        })
        .collect();
    set_spacing(&mut roots, ctx);
    if partial {
        log::warn!("root iteration hit its cap; returning a partial list");
    }
    Ok(RootSet { roots, partial })
}

/// Zeros and poles with Froissart doublets flagged.
#[derive(Clone, Debug)]
pub struct PadeScan {
    pub zeros: RootSet,
    pub poles: RootSet,
    pub doublet_threshold: f64,
}

impl PadeScan {
    /// Poles not paired with a nearby zero.
    pub fn candidates(&self) -> Vec<&PadeRoot> {
        self.poles.roots.iter().filter(|r| !r.doublet).collect()
    }

    /// Candidate pole nearest to `x`.
    pub fn nearest_candidate(&self, x: &Complex, ctx: &PrecisionContext) -> Option<&PadeRoot> {
        self.candidates().into_iter().min_by(|a, b| {
            let da = mp::abs(&ctx.complex(&a.location - x));
            let db = mp::abs(&ctx.complex(&b.location - x));
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    pub fn all(&self) -> impl Iterator<Item = &PadeRoot> {
        self.zeros.roots.iter().chain(self.poles.roots.iter())
    }
}

/// Doublet threshold 10^{−target/2} unless given.
pub fn pade_scan(approx: &RationalApproximant, threshold: Option<f64>, ctx: &PrecisionContext) -> Result<PadeScan> {
    let thr = threshold.unwrap_or_else(|| 10f64.powf(-(ctx.target_digits() as f64) / 2.0));
    let mut zeros = if trim(&approx.p, ctx).len() >= 2 {
        rational_roots(approx, RootKind::Zero, ctx)?
    } else {
        RootSet {
            roots: Vec::new(),
            partial: false,
        }
    };
    let mut poles = rational_roots(approx, RootKind::Pole, ctx)?;
    for pole in poles.roots.iter_mut() {
        for zero in zeros.roots.iter_mut() {
            let d = mp::abs(&ctx.complex(&pole.location - &zero.location)).to_f64();
            if d < thr {
                pole.doublet = true;
                zero.doublet = true;
            }
        }
    }
    Ok(PadeScan {
        zeros,
        poles,
        doublet_threshold: thr,
    })
}

fn set_spacing(roots: &mut [PadeRoot], ctx: &PrecisionContext) {
    let n = roots.len();
    for i in 0..n {
        let mut best = f64::INFINITY;
        for j in 0..n {
            if i != j {
                let d = mp::abs(&ctx.complex(&roots[i].location - &roots[j].location)).to_f64();
                best = best.min(d);
            }
        }
        roots[i].spacing = best;
    }
}

fn trim(poly: &[Complex], ctx: &PrecisionContext) -> Vec<Complex> {
    let max = poly.iter().map(mp::abs).fold(ctx.real(0), |a, b| if b > a { b } else { a });
    let tiny = ctx.real(&max * ctx.real(Float::u_exp(1, 24 - ctx.bits() as i32)));
    let mut end = poly.len();
    while end > 1 && mp::abs(&poly[end - 1]) <= tiny {
        end -= 1;
    }
    poly[..end].to_vec()
}

const ABERTH_CAP: usize = 500;

/// All roots of Σ a_k t^k; the flag is set when some root did not converge.
pub fn polynomial_roots(a: &[Complex], ctx: &PrecisionContext) -> (Vec<Complex>, bool) {
    let n = a.len() - 1;
    // Cauchy-style radius from the coefficient magnitudes
    let lead = mp::abs(&a[n]).to_f64();
    let r0 = (mp::abs(&a[0]).to_f64() / lead).powf(1.0 / n as f64);
    let r0 = if r0.is_finite() && r0 > 0.0 { r0 } else { 1.0 };
    let circle: Vec<Complex> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            ctx.complex((r0 * th.cos(), r0 * th.sin()))
        })
        .collect();
    let (roots, ok) = aberth(a, circle, ctx);
    if ok {
        return (roots, false);
    }
    match companion_seeds(a) {
        Some(seeds) => {
            let seeds = seeds.into_iter().map(|z| ctx.complex((z.re, z.im))).collect();
            let (roots, ok) = aberth(a, seeds, ctx);
            (roots, !ok)
        }
        None => (roots, true),
    }
}

fn aberth(a: &[Complex], mut z: Vec<Complex>, ctx: &PrecisionContext) -> (Vec<Complex>, bool) {
    let n = z.len();
    let tol = ctx.real(Float::u_exp(1, 12 - ctx.bits() as i32));
    let floor = ctx.real(Float::u_exp(1, 24 - ctx.bits() as i32));
    let mags: Vec<Float> = a.iter().map(mp::abs).collect();
    let mut done = vec![false; n];
    for _ in 0..ABERTH_CAP {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(a, &z[k], ctx);
            // at the rounding floor the correction is noise
            if mp::abs(&p) <= ctx.real(&floor * magnitude_bound(&mags, &z[k], ctx)) {
                done[k] = true;
                continue;
            }
            let ratio = ctx.complex(&p / &dp);
            let mut s = ctx.complex(0);
            for j in 0..n {
                if j != k {
                    let d = ctx.complex(&z[k] - &z[j]);
                    if !d.is_zero() {
                        s += ctx.complex(1) / d;
                    }
                }
            }
            let den = ctx.complex(1) - ctx.complex(&ratio * &s);
            let w = if den.is_zero() { ratio } else { ratio / den };
            z[k] -= &w;
            let size = mp::abs(&z[k]).max(&ctx.real(1e-300));
            if mp::abs(&w) <= ctx.real(&tol * &size) {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return (z, true);
        }
    }
    (z, false)
}

/// Σ |a_k| |z|^k
fn magnitude_bound(mags: &[Float], z: &Complex, ctx: &PrecisionContext) -> Float {
    let r = mp::abs(z);
    let mut acc = ctx.real(0);
    for m in mags.iter().rev() {
        acc = ctx.real(&acc * &r) + m;
    }
    acc
}

fn companion_seeds(a: &[Complex]) -> Option<Vec<C64<f64>>> {
    let n = a.len() - 1;
    let lead = C64::new(a[n].real().to_f64(), a[n].imag().to_f64());
    if lead.norm() == 0.0 {
        return None;
    }
    let mut m = DMatrix::<C64<f64>>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        let c = C64::new(a[i].real().to_f64(), a[i].imag().to_f64());
        m[(i, n - 1)] = -c / lead;
    }
    let ev = m.eigenvalues()?;
    Some(ev.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Complex, b: (f64, f64), tol: f64) -> bool {
        (a.real().to_f64() - b.0).abs() < tol && (a.imag().to_f64() - b.1).abs() < tol
    }

    #[test]
    fn geometric_series() {
        let ctx = PrecisionContext::new(30);
        let b: Vec<Complex> = (0..4).map(|_| ctx.complex(1)).collect();
        let r = build_pade(&b, &ctx.complex(0), 0, 1, &ctx).unwrap();
        let t = r.taylor(4, &ctx);
        for v in &t {
            assert!(close(v, (1.0, 0.0), 1e-25));
        }
        let poles = rational_roots(&r, RootKind::Pole, &ctx).unwrap();
        assert_eq!(poles.roots.len(), 1);
        assert!(close(&poles.roots[0].location, (1.0, 0.0), 1e-25));
    }

    #[test]
    fn exponential_one_one() {
        let ctx = PrecisionContext::new(30);
        let b = vec![ctx.complex(1), ctx.complex(1), ctx.complex(0.5)];
        let r = build_pade(&b, &ctx.complex(0), 1, 1, &ctx).unwrap();
        // (1 + x/2)/(1 − x/2): pole at 2, zero at −2
        let x = ctx.complex(0.3);
        let v = r.eval(&x, &ctx);
        assert!(close(&v, (1.15 / 0.85, 0.0), 1e-15));
        let z = rational_roots(&r, RootKind::Zero, &ctx).unwrap();
        assert!(close(&z.roots[0].location, (-2.0, 0.0), 1e-25));
    }

    #[test]
    fn quadratic_roots() {
        let ctx = PrecisionContext::new(30);
        let (r, partial) = polynomial_roots(&[ctx.complex(1), ctx.complex(0), ctx.complex(1)], &ctx);
        assert!(!partial);
        let mut ims: Vec<f64> = r.iter().map(|z| z.imag().to_f64()).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + 1.0).abs() < 1e-25 && (ims[1] - 1.0).abs() < 1e-25);
    }

    #[test]
    fn degenerate_block_falls_back() {
        let ctx = PrecisionContext::new(30);
        // 1/(1 − x²) is even, so the [1/1] system is the singular 1×1 block (c₁)
        let b: Vec<Complex> = (0..8).map(|n| ctx.complex(if n % 2 == 0 { 1 } else { 0 })).collect();
        assert_eq!(
            build_pade(&b, &ctx.complex(0), 1, 1, &ctx).unwrap_err(),
            Error::SingularPadeSystem { l: 1, m: 1 }
        );
        let r = build_pade_with_fallback(&b, &ctx.complex(0), 1, 1, &ctx).unwrap();
        assert_eq!(r.order, (0, 0));
        let r = build_pade(&b, &ctx.complex(0), 0, 2, &ctx).unwrap();
        let t = r.taylor(8, &ctx);
        for (v, e) in t.iter().zip(&b) {
            assert!(mp::abs(&ctx.complex(v - e)).to_f64() < 1e-25);
        }
    }

    #[test]
    fn doublet_flagged() {
        let ctx = PrecisionContext::new(30);
        // (1 − x/2)(1 − x/(3 + ε)) / ((1 − x/3)) with ε tiny gives a near doublet at 3
        let eps = 1e-20;
        let center = ctx.complex(0);
        let a = 0.5;
        let b = 1.0 / (3.0 + eps);
        let approx = RationalApproximant {
            center,
            scale: ctx.real(1),
            p: vec![ctx.complex(1), ctx.complex(-(a + b)), ctx.complex(a * b)],
            q: vec![ctx.complex(1), ctx.complex(-1.0 / 3.0)],
            order: (2, 1),
        };
        let scan = pade_scan(&approx, None, &ctx).unwrap();
        assert!(scan.poles.roots[0].doublet);
        assert!(scan.candidates().is_empty());
    }
}
