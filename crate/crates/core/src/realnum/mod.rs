//! Certified arithmetic over exactly described reals.
//!
//! Three carriers are supported: rationals, quadratic irrationals `(a + b√d)/c`, and
//! decimal literals with an optional guaranteed-digit budget. Rationals, quadratics
//! and budget-free decimals are exact and flow through [`Quad`]; budgeted decimals
//! are enclosed by intervals whose width grows with the scale they are multiplied by.

mod interval;
mod quad;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use interval::half;
pub use interval::{format_decimal, format_rational, format_sci, pow10_inv, pow2_inv, CertifiedInterval};
pub use quad::{is_perfect_square, Quad};

/// An exact or precision-budgeted description of a real number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RealSpec {
    Rational(BigRational),
    /// `(a + b√d)/c`, canonicalized.
    Quadratic(Quad),
    /// A decimal literal. With `digits = Some(k)` it denotes `[value − 10^-k, value + 10^-k]`;
    /// without a budget the literal is exact.
    Decimal {
        text: String,
        value: BigRational,
        digits: Option<u32>,
    },
}

impl RealSpec {
    pub fn rational(p: i64, q: i64) -> RealSpec {
        assert!(q != 0, "zero denominator");
        RealSpec::Rational(BigRational::new(p.into(), q.into()))
    }

    pub fn integer(n: i64) -> RealSpec {
        RealSpec::rational(n, 1)
    }

    /// `(a + b√d)/c`. Errors when `d` is a square or not positive, or `c = 0`.
    pub fn quadratic(a: i64, b: i64, d: i64, c: i64) -> Result<RealSpec> {
        Self::quadratic_big(a.into(), b.into(), d.into(), c.into())
    }

    pub fn quadratic_big(a: BigInt, b: BigInt, d: BigInt, c: BigInt) -> Result<RealSpec> {
        if c.is_zero() {
            return Err(Error::invalid("quadratic denominator must be nonzero"));
        }
        if !d.is_positive() || is_perfect_square(&d) {
            return Err(Error::invalid(format!("radicand {d} must be a positive non-square")));
        }
        if b.is_zero() {
            return Err(Error::invalid("quadratic with b = 0 is rational; use p/q"));
        }
        Ok(RealSpec::Quadratic(Quad::new(a, b, d, c)))
    }

    /// The golden ratio minus one, `(−1 + √5)/2`.
    pub fn golden_conjugate() -> RealSpec {
        RealSpec::quadratic(-1, 1, 5, 2).expect("valid")
    }

    /// `√2 − 1`.
    pub fn silver_conjugate() -> RealSpec {
        RealSpec::quadratic(-1, 1, 2, 1).expect("valid")
    }

    /// Exact field element, when the spec is exact.
    pub fn exact(&self) -> Option<Quad> {
        match self {
            RealSpec::Rational(r) => Some(Quad::from_rational(r)),
            RealSpec::Quadratic(q) => Some(q.clone()),
            RealSpec::Decimal { value, digits: None, .. } => Some(Quad::from_rational(value)),
            RealSpec::Decimal { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, RealSpec::Decimal { digits: Some(_), .. })
    }

    pub fn is_rational(&self) -> bool {
        self.exact().is_some_and(|q| q.is_rational())
    }

    /// The exact rational value, for rationals and unbudgeted decimals.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.exact().and_then(|q| q.as_rational())
    }

    /// Enclosure of `n·x` of width at most `tol`.
    pub fn enclose_multiple(&self, n: &BigInt, tol: &BigRational) -> Result<CertifiedInterval> {
        match self {
            RealSpec::Decimal { value, digits: Some(k), .. } => {
                let radius = BigRational::from_integer(n.abs()) * pow10_inv(*k);
                if &(&radius + &radius) > tol {
                    return Err(Error::precision(format!(
                        "{} guaranteed digits cannot support scale {} at tolerance {}",
                        k,
                        n,
                        format_sci(tol)
                    )));
                }
                let center = value * BigRational::from_integer(n.clone());
                Ok(CertifiedInterval::new(&center - &radius, &center + &radius))
            }
            _ => Ok(self.exact().expect("exact variant").mul_int(n).enclose(tol)),
        }
    }

    pub fn enclose(&self, tol: &BigRational) -> Result<CertifiedInterval> {
        self.enclose_multiple(&BigInt::one(), tol)
    }

    /// Non-certified estimate for reporting.
    pub fn to_f64(&self) -> f64 {
        match self {
            RealSpec::Decimal { value, .. } => num_traits::ToPrimitive::to_f64(value).unwrap_or(f64::NAN),
            _ => self.exact().unwrap().to_f64(),
        }
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            RealSpec::Quadratic(q) => write!(f, "quad:{},{},{},{}", q.a(), q.b(), q.d(), q.c()),
            RealSpec::Decimal { text, .. } => f.write_str(text),
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad decimal literal {s:?}")));
    }
    let digits = format!("{}{}", if int.is_empty() { "0" } else { int }, frac);
    let numer = BigInt::from_str(&digits).map_err(|_| Error::Parse(format!("bad decimal literal {s:?}")))?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(numer, denom);
    Ok(if neg { -v } else { v })
}

impl FromStr for RealSpec {
    type Err = Error;

    /// Accepts `p/q`, `quad:a,b,d,c`, or a decimal literal with optional `@digits`.
    fn from_str(s: &str) -> Result<RealSpec> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("quad:") {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("expected quad:a,b,d,c, got {s:?}")));
            }
            let [a, b, d, c] = [parts[0], parts[1], parts[2], parts[3]].map(parse_int);
            return RealSpec::quadratic_big(a?, b?, d?, c?);
        }
        if let Some((p, q)) = s.split_once('/') {
            let (p, q) = (parse_int(p)?, parse_int(q)?);
            if q.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            return Ok(RealSpec::Rational(BigRational::new(p, q)));
        }
        let (lit, digits) = match s.split_once('@') {
            Some((lit, d)) => {
                let k: u32 = d.trim().parse().map_err(|_| Error::Parse(format!("bad digit budget in {s:?}")))?;
                if k == 0 {
                    return Err(Error::Parse("digit budget must be at least 1".into()));
                }
                (lit, Some(k))
            }
            None => (s, None),
        };
        let value = parse_decimal(lit)?;
        Ok(RealSpec::Decimal {
            text: s.to_string(),
            value,
            digits,
        })
    }
}

impl Serialize for RealSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RealSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Certified `‖x‖` at tolerance `tol`.
pub fn dist_to_nearest_int(x: &RealSpec, tol: &BigRational) -> Result<CertifiedInterval> {
    match x.exact() {
        Some(q) => Ok(q.dist_to_nearest_int().enclose(tol)),
        None => x.enclose(tol)?.dist_to_nearest_int(tol),
    }
}

/// Certified `{x} = x − ⌊x⌋` at tolerance `tol`.
pub fn frac_mod1(x: &RealSpec, tol: &BigRational) -> Result<CertifiedInterval> {
    frac_of_multiple(x, &BigInt::one(), tol)
}

/// Certified `{n·x}` at tolerance `tol`.
pub fn frac_of_multiple(x: &RealSpec, n: &BigInt, tol: &BigRational) -> Result<CertifiedInterval> {
    match x.exact() {
        Some(q) => {
            let f = q.mul_int(n).frac();
            let iv = f.enclose(tol);
            // the exact value lies in [0, 1), so clamping the rounded ends stays sound
            let lo = iv.lo().clone().max(BigRational::zero());
            let hi = iv.hi().clone().min(BigRational::one());
            Ok(CertifiedInterval::new(lo, hi))
        }
        None => x.enclose_multiple(n, tol)?.frac_mod1(),
    }
}

/// Exact `n·α − γ` when both specs are exact and share a field.
pub fn exact_linear_form(n: &BigInt, alpha: &RealSpec, gamma: &RealSpec) -> Option<Quad> {
    alpha.exact()?.mul_int(n).checked_sub(&gamma.exact()?)
}

/// Certified `‖nα − γ‖` of width at most `tol`. Working precision scales with `|n|`
/// automatically; budgeted decimals fail with `InsufficientPrecision` rather than
/// return an uncertified value.
pub fn linear_form_dist(n: &BigInt, alpha: &RealSpec, gamma: &RealSpec, tol: &BigRational) -> Result<CertifiedInterval> {
    if let Some(q) = exact_linear_form(n, alpha, gamma) {
        return Ok(q.dist_to_nearest_int().enclose(tol));
    }
    let part = tol * half();
    let x = alpha.enclose_multiple(n, &part)?;
    let g = gamma.enclose(&part)?;
    x.sub(&g).dist_to_nearest_int(tol)
}

#[cfg(test)]
mod tests;
