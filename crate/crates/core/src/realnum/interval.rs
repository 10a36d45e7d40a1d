use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A closed interval with exact rational endpoints that is guaranteed to contain
/// some target real.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CertifiedInterval {
    lo: BigRational,
    hi: BigRational,
}

pub(crate) fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// `2^-bits` as an exact rational.
pub fn pow2_inv(bits: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

/// `10^-digits` as an exact rational.
pub fn pow10_inv(digits: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize))
}

impl CertifiedInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        CertifiedInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        CertifiedInterval { lo: x.clone(), hi: x }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &CertifiedInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &CertifiedInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) * half()
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn add(&self, other: &CertifiedInterval) -> CertifiedInterval {
        CertifiedInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &CertifiedInterval) -> CertifiedInterval {
        CertifiedInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> CertifiedInterval {
        CertifiedInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn scale(&self, k: &BigRational) -> CertifiedInterval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            CertifiedInterval { lo: a, hi: b }
        } else {
            CertifiedInterval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, other: &CertifiedInterval) -> CertifiedInterval {
        let cands = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        CertifiedInterval { lo, hi }
    }

    /// Enclosure of `‖x‖` for every `x` in the interval. Always sound; never wider than
    /// the input.
    pub fn nearest_int_distance(&self) -> CertifiedInterval {
        if self.width() >= BigRational::one() {
            return CertifiedInterval {
                lo: BigRational::zero(),
                hi: half(),
            };
        }
        let dist = |x: &BigRational| {
            let f = x - x.floor();
            let g = BigRational::one() - &f;
            if f <= g {
                f
            } else {
                g
            }
        };
        let (a, b) = (dist(&self.lo), dist(&self.hi));
        let mut lo = a.clone().min(b.clone());
        let mut hi = a.max(b);
        // an integer inside pulls the minimum to 0
        if self.lo.floor() != self.hi.floor() || self.lo.is_integer() {
            lo = BigRational::zero();
        }
        // a half-integer inside pulls the maximum to 1/2
        let h = half();
        let shifted_lo = &self.lo + &h;
        let shifted_hi = &self.hi + &h;
        if shifted_lo.floor() != shifted_hi.floor() || shifted_lo.is_integer() {
            hi = h;
        }
        CertifiedInterval { lo, hi }
    }

    /// Certified `‖x‖` that must be no wider than `tol`.
    pub fn dist_to_nearest_int(&self, tol: &BigRational) -> Result<CertifiedInterval> {
        let d = self.nearest_int_distance();
        if &d.width() > tol {
            return Err(Error::precision(format!(
                "distance to nearest integer has width {} > tolerance",
                format_sci(&d.width())
            )));
        }
        Ok(d)
    }

    /// Certified fractional part. An interval containing an integer cannot be reduced
    /// without splitting, so it is rejected.
    pub fn frac_mod1(&self) -> Result<CertifiedInterval> {
        let k = self.lo.floor();
        if self.hi.floor() != k {
            return Err(Error::precision("interval straddles an integer; fractional part is ambiguous"));
        }
        Ok(CertifiedInterval {
            lo: &self.lo - &k,
            hi: &self.hi - &k,
        })
    }

    /// Widens both endpoints to the grid `2^-bits`, outward. Keeps big-denominator
    /// arithmetic bounded in long computations.
    pub fn round_out(&self, bits: u64) -> CertifiedInterval {
        let scale = BigRational::from_integer(BigInt::one() << bits);
        let lo = (&self.lo * &scale).floor() / &scale;
        let hi = (&self.hi * &scale).ceil() / &scale;
        CertifiedInterval { lo, hi }
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "[{}]", format_rational(&self.lo))
        } else {
            write!(f, "[{}, {}]", format_decimal(&self.lo, 20), format_decimal(&self.hi, 20))
        }
    }
}

/// `p/q` form, or `p` when the denominator is 1.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal expansion truncated toward zero after `digits` fractional digits.
/// Integers print without a fractional part.
pub fn format_decimal(x: &BigRational, digits: usize) -> String {
    if x.is_integer() {
        return x.to_integer().to_string();
    }
    let neg = x.is_negative();
    let ax = x.abs();
    let int = ax.to_integer();
    let frac = &ax - BigRational::from_integer(int.clone());
    let scaled = (frac * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits))).to_integer();
    let mut s = scaled.to_string();
    while s.len() < digits {
        s.insert(0, '0');
    }
    let s = s.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if s.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{s}")
    }
}

/// Short scientific rendering for diagnostics.
pub fn format_sci(x: &BigRational) -> String {
    match x.to_f64() {
        Some(v) if v.is_finite() && v != 0.0 => format!("{v:.3e}"),
        _ => {
            if x.is_zero() {
                "0".into()
            } else {
                let bits = x.numer().bits() as i64 - x.denom().bits() as i64;
                format!("~2^{bits}")
            }
        }
    }
}

/// Smallest `k` with `2^-k <= tol` (tol > 0).
pub(crate) fn bits_for_tolerance(tol: &BigRational) -> u64 {
    assert!(tol.is_positive(), "tolerance must be positive");
    // 2^-k <= p/q  <=>  q <= p 2^k
    let p = tol.numer();
    let q = tol.denom();
    let mut k = (q.bits() as i64 - p.bits() as i64).max(0) as u64;
    while (p << k) < *q {
        k += 1;
    }
    k
}

pub(crate) fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}
