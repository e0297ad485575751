//! Published reference values and printed-digit comparison.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mp;

const DATA: &str = include_str!("../data/reference.toml");

#[derive(Clone, Debug, Deserialize)]
pub struct ReferenceValue {
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ReferenceCase {
    pub name: String,
    pub mu: String,
    pub values: Vec<ReferenceValue>,
}

impl ReferenceCase {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.iter().find(|v| v.key == key).map(|v| v.value.as_str())
    }
}

#[derive(Debug, Deserialize)]
struct ReferenceFile {
    version: u32,
    case: Vec<ReferenceCase>,
}

pub fn cases() -> Result<Vec<ReferenceCase>> {
    let file: ReferenceFile = toml::from_str(DATA).map_err(|e| Error::Reference(e.to_string()))?;
    if file.version != 1 {
        return Err(Error::Reference(format!("unsupported version {}", file.version)));
    }
    Ok(file.case)
}

pub fn case(name: &str) -> Result<ReferenceCase> {
    cases()?
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::Reference(format!("no reference case {name:?}")))
}

/// Splits "a+bi" into its printed real and imaginary parts.
fn split_parts(s: &str) -> (String, Option<String>) {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return (t, None);
    };
    let bytes = body.as_bytes();
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx];
        if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            return (body[..idx].to_string(), Some(body[idx..].to_string()));
        }
    }
    ("0".to_string(), Some(body.to_string()))
}

/// Unit of the last printed digit: 10^{exponent − decimals}.
fn last_digit_exponent(s: &str) -> i32 {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().unwrap_or(0)),
        None => (s, 0),
    };
    let decimals = mant.split_once('.').map(|(_, f)| f.len() as i32).unwrap_or(0);
    exp - decimals
}

/// Outcome of comparing one part against its printed digits.
#[derive(Clone, Debug)]
pub struct PartCheck {
    pub printed: String,
    pub computed: String,
    pub abs_diff: f64,
    /// Unit in the last printed digit.
    pub unit: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct DigitCheck {
    pub key: String,
    pub parts: Vec<PartCheck>,
}

impl DigitCheck {
    pub fn pass(&self) -> bool {
        self.parts.iter().all(|p| p.pass)
    }

    /// Correct significant digits of the worst part (printed count when exact).
    pub fn matching_digits(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| {
                let mag = p.printed.parse::<f64>().map(f64::abs).unwrap_or(0.0);
                if p.abs_diff == 0.0 || mag == 0.0 {
                    f64::INFINITY
                } else {
                    (mag / p.abs_diff).log10()
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Printed and computed strings, with a caret under the first differing
    /// digit of each part that fails.
    pub fn diff_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for p in &self.parts {
            let first = p
                .printed
                .chars()
                .zip(p.computed.chars())
                .position(|(a, b)| a != b);
            out.push(format!("  printed  {}", p.printed));
            out.push(format!("  computed {}", p.computed));
            if let (false, Some(i)) = (p.pass, first) {
                out.push(format!("           {}^", " ".repeat(i)));
            }
        }
        out
    }
}

/// Compares `computed` with a printed value, to within one unit in the last
/// printed digit of each part.
pub fn check(key: &str, computed: &Complex, printed: &str) -> Result<DigitCheck> {
    let (re, im) = split_parts(printed);
    let prec = computed.prec().0.max(64);
    let mut parts = Vec::new();
    let mut push = |printed: &str, value: &Float| -> Result<()> {
        let p = mp::parse_real(printed, prec)?;
        let ue = last_digit_exponent(printed);
        let diff = Float::with_val(prec, value - &p).abs();
        let unit = Float::with_val(prec, Float::with_val(prec, 10).pow(ue));
        let decimals = (-ue).max(0) as u32;
        let computed = format_fixed(value, decimals);
        parts.push(PartCheck {
            printed: printed.trim_start_matches('+').to_string(),
            computed,
            abs_diff: diff.to_f64(),
            unit: unit.to_f64(),
            pass: diff <= unit,
        });
        Ok(())
    };
    push(&re, computed.real())?;
    match im {
        Some(im) => push(&im, computed.imag())?,
        None => {
            // a printed real value asserts a vanishing imaginary part at that scale
            let ue = last_digit_exponent(&re);
            let unit = 10f64.powi(ue);
            let d = computed.imag().to_f64().abs();
            parts.push(PartCheck {
                printed: "0".into(),
                computed: format!("{d:.1e}"),
                abs_diff: d,
                unit,
                pass: d <= unit,
            });
        }
    }
    Ok(DigitCheck {
        key: key.to_string(),
        parts,
    })
}

/// Fixed-point decimal string rounded to `decimals` places.
pub fn format_fixed(x: &Float, decimals: u32) -> String {
    let prec = x.prec().max(64);
    let scale = Float::with_val(prec, Float::with_val(prec, 10).pow(decimals));
    let scaled = Float::with_val(prec, x * scale).round();
    let Some(int) = scaled.to_integer() else {
        return mp::format_real(x, decimals.max(1));
    };
    let neg = int < 0;
    let digits = int.abs().to_string();
    let d = decimals as usize;
    let digits = if digits.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (ip, fp) = digits.split_at(digits.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{fp}")
    }
}
