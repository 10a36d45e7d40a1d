//! Exact arithmetic in a real quadratic field `Q(√d)`.
//!
//! A [`Quad`] is `(a + b√d)/c` with `c > 0` and `gcd(a, b, c) = 1`. Rationals are the
//! case `b = 0`, stored with `d = 0` so that they mix with any field. Signs, floors and
//! comparisons are decided exactly through integer square roots, never by rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{bits_for_tolerance, floor_div, CertifiedInterval};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quad {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

/// True when `d` is a perfect square (including 0 and 1).
pub fn is_perfect_square(d: &BigInt) -> bool {
    if d.is_negative() {
        return false;
    }
    let r = d.sqrt();
    &r * &r == *d
}

impl Quad {
    /// `(a + b√d)/c`. Panics on `c = 0`, negative `d`, or a square `d` with `b ≠ 0`;
    /// callers validate user input before reaching here.
    pub fn new(a: BigInt, b: BigInt, d: BigInt, c: BigInt) -> Quad {
        assert!(!c.is_zero(), "zero denominator");
        assert!(!d.is_negative(), "negative radicand");
        if !b.is_zero() {
            assert!(!is_perfect_square(&d), "square radicand");
        }
        Quad::normalized(a, b, c, d)
    }

    fn normalized(mut a: BigInt, mut b: BigInt, mut c: BigInt, mut d: BigInt) -> Quad {
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        if b.is_zero() {
            d = BigInt::zero();
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() && !g.is_zero() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        Quad { a, b, c, d }
    }

    pub fn from_integer(n: BigInt) -> Quad {
        Quad::normalized(n, BigInt::zero(), BigInt::one(), BigInt::zero())
    }

    pub fn from_rational(r: &BigRational) -> Quad {
        Quad::normalized(r.numer().clone(), BigInt::zero(), r.denom().clone(), BigInt::zero())
    }

    pub fn zero() -> Quad {
        Quad::from_integer(BigInt::zero())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| BigRational::new(self.a.clone(), self.c.clone()))
    }

    /// Field shared by both operands, if any.
    fn common_d(&self, other: &Quad) -> Option<BigInt> {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => Some(other.d.clone()),
            (_, true) => Some(self.d.clone()),
            _ if self.d == other.d => Some(self.d.clone()),
            _ => None,
        }
    }

    pub fn compatible(&self, other: &Quad) -> bool {
        self.common_d(other).is_some()
    }

    pub fn checked_add(&self, other: &Quad) -> Option<Quad> {
        let d = self.common_d(other)?;
        let a = &self.a * &other.c + &other.a * &self.c;
        let b = &self.b * &other.c + &other.b * &self.c;
        Some(Quad::normalized(a, b, &self.c * &other.c, d))
    }

    pub fn checked_sub(&self, other: &Quad) -> Option<Quad> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Quad) -> Option<Quad> {
        let d = self.common_d(other)?;
        let a = &self.a * &other.a + &self.b * &other.b * &d;
        let b = &self.a * &other.b + &self.b * &other.a;
        Some(Quad::normalized(a, b, &self.c * &other.c, d))
    }

    pub fn neg(&self) -> Quad {
        Quad {
            a: -&self.a,
            b: -&self.b,
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Quad {
        Quad::normalized(&self.a * n, &self.b * n, self.c.clone(), self.d.clone())
    }

    pub fn add_int(&self, n: &BigInt) -> Quad {
        Quad::normalized(&self.a + n * &self.c, self.b.clone(), self.c.clone(), self.d.clone())
    }

    /// `1/x`, or `None` for zero.
    pub fn recip(&self) -> Option<Quad> {
        if self.is_zero() {
            return None;
        }
        // c/(a + b√d) = c(a − b√d)/(a² − b²d)
        let norm = &self.a * &self.a - &self.b * &self.b * &self.d;
        Some(Quad::normalized(&self.c * &self.a, -(&self.c * &self.b), norm, self.d.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of `a + b√d`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.sign();
        let sb = self.b.sign();
        match (sa, sb) {
            (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
            (Sign::Plus, Sign::Plus) | (Sign::Plus, Sign::NoSign) | (Sign::NoSign, Sign::Plus) => Ordering::Greater,
            (Sign::Minus, Sign::Minus) | (Sign::Minus, Sign::NoSign) | (Sign::NoSign, Sign::Minus) => Ordering::Less,
            _ => {
                // opposite signs: compare a² with b²d (never equal since d is non-square)
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * &self.d;
                let a_wins = a2 > b2d;
                match (sa, a_wins) {
                    (Sign::Plus, true) | (Sign::Minus, false) => Ordering::Greater,
                    _ => Ordering::Less,
                }
            }
        }
    }

    /// Exact comparison; `None` when the fields differ.
    pub fn checked_cmp(&self, other: &Quad) -> Option<Ordering> {
        Some(self.checked_sub(other)?.signum())
    }

    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return floor_div(&self.a, &self.c);
        }
        // b√d lies strictly between consecutive integers s and s + 1 (up to sign)
        let s = (&self.b * &self.b * &self.d).sqrt();
        let lower = if self.b.is_positive() { &self.a + &s } else { &self.a - &s - BigInt::one() };
        floor_div(&lower, &self.c)
    }

    pub fn frac(&self) -> Quad {
        self.add_int(&-self.floor())
    }

    /// `‖x‖`, the distance to the nearest integer, exactly.
    pub fn dist_to_nearest_int(&self) -> Quad {
        let f = self.frac();
        let g = f.neg().add_int(&BigInt::one());
        if f.checked_cmp(&g).expect("same field") == Ordering::Greater {
            g
        } else {
            f
        }
    }

    pub fn abs(&self) -> Quad {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Certified enclosure of width at most `tol`. Rationals enclose exactly.
    pub fn enclose(&self, tol: &BigRational) -> CertifiedInterval {
        if self.b.is_zero() {
            return CertifiedInterval::point(BigRational::new(self.a.clone(), self.c.clone()));
        }
        // width is 1/(c 2^p); pick p with 2^-p <= tol·c
        let p = bits_for_tolerance(&(tol * BigRational::from_integer(self.c.clone())));
        let scale = BigInt::one() << p;
        let r = (&self.b * &self.b * &self.d * &scale * &scale).sqrt();
        let base = &self.a * &scale;
        let (lo, hi) = if self.b.is_positive() {
            (&base + &r, &base + &r + BigInt::one())
        } else {
            (&base - &r - BigInt::one(), &base - &r)
        };
        let den = &self.c * &scale;
        CertifiedInterval::new(BigRational::new(lo, den.clone()), BigRational::new(hi, den))
    }

    /// Double-precision estimate, for reporting and non-certified statistics only.
    pub fn to_f64(&self) -> f64 {
        let iv = self.enclose(&BigRational::new(BigInt::one(), BigInt::one() << 80u32));
        iv.mid_f64()
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            if self.c.is_one() {
                write!(f, "{}", self.a)
            } else {
                write!(f, "{}/{}", self.a, self.c)
            }
        } else {
            write!(f, "({} + {}*sqrt({}))/{}", self.a, self.b, self.d, self.c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(a: i64, b: i64, d: i64, c: i64) -> Quad {
        Quad::new(a.into(), b.into(), d.into(), c.into())
    }

    #[test]
    fn canonical_form() {
        let x = quad(2, 4, 5, -6);
        assert_eq!((x.a().clone(), x.b().clone(), x.c().clone()), ((-1).into(), (-2).into(), 3.into()));
    }

    #[test]
    fn floors_of_surds() {
        // √2 − 1 ≈ 0.414
        assert_eq!(quad(-1, 1, 2, 1).floor(), BigInt::zero());
        // −√2 ≈ −1.414
        assert_eq!(quad(0, -1, 2, 1).floor(), BigInt::from(-2));
        // (1 + √5)/2 ≈ 1.618
        assert_eq!(quad(1, 1, 5, 2).floor(), BigInt::one());
        // 1000(√2 − 1) ≈ 414.21
        assert_eq!(quad(-1000, 1000, 2, 1).floor(), BigInt::from(414));
        assert_eq!(quad(-7, 0, 0, 2).floor(), BigInt::from(-4));
    }

    #[test]
    fn signs_and_recip() {
        assert_eq!(quad(-3, 2, 2, 1).signum(), Ordering::Less); // 2√2 < 3
        assert_eq!(quad(-2, 2, 2, 1).signum(), Ordering::Greater);
        let x = quad(-1, 1, 2, 1);
        let y = x.recip().unwrap(); // 1/(√2 − 1) = √2 + 1
        assert_eq!(y, quad(1, 1, 2, 1));
        assert_eq!(x.checked_mul(&y).unwrap(), Quad::from_integer(BigInt::one()));
    }

    #[test]
    fn incompatible_fields() {
        assert!(quad(0, 1, 2, 1).checked_add(&quad(0, 1, 3, 1)).is_none());
        assert!(quad(0, 1, 2, 1).checked_add(&quad(1, 0, 0, 3)).is_some());
    }

    #[test]
    fn enclosure_width_and_containment() {
        let tol = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 20));
        let iv = quad(0, 1, 2, 1).enclose(&tol);
        assert!(iv.width() <= tol);
        let lo = iv.lo().clone();
        assert!(&lo * &lo <= BigRational::from_integer(2.into()));
        let hi = iv.hi().clone();
        assert!(&hi * &hi >= BigRational::from_integer(2.into()));
    }
}
