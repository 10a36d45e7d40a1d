//! Continued fractions with certified partial quotients.
//!
//! Exact inputs (rationals and quadratic surds) are expanded exactly in their field.
//! Budgeted decimals are expanded from both ends of their enclosure at once; a quotient
//! is emitted only when both ends agree, so every emitted quotient is certified.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::realnum::{CertifiedInterval, RealSpec};

/// Why an expansion stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stop {
    /// Reached the requested depth.
    Complete,
    /// The number is rational and its expansion ended.
    Terminated,
    /// The next quotient of a budgeted decimal could not be certified.
    PrecisionExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CfExpansion {
    #[serde(skip)]
    pub alpha: RealSpec,
    #[serde(serialize_with = "big_string")]
    pub a0: BigInt,
    /// `a_1, …, a_k`.
    #[serde(serialize_with = "big_strings")]
    pub quotients: Vec<BigInt>,
    /// `p_0, …, p_k`.
    #[serde(rename = "p", serialize_with = "big_strings")]
    pub numerators: Vec<BigInt>,
    /// `q_0, …, q_k`.
    #[serde(rename = "q", serialize_with = "big_strings")]
    pub denominators: Vec<BigInt>,
    pub certified_depth: usize,
    pub stop: Stop,
}

pub(crate) fn big_string<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn big_strings<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

impl CfExpansion {
    pub fn depth(&self) -> usize {
        self.certified_depth
    }

    /// `q_k` for `0 ≤ k ≤ certified_depth`.
    pub fn q(&self, k: usize) -> &BigInt {
        &self.denominators[k]
    }

    pub fn p(&self, k: usize) -> &BigInt {
        &self.numerators[k]
    }

    /// `a_k` for `1 ≤ k ≤ certified_depth`.
    pub fn a(&self, k: usize) -> &BigInt {
        &self.quotients[k - 1]
    }

    /// Errors when a budgeted decimal ran out of digits before `depth`.
    pub fn require_depth(&self, depth: usize) -> Result<&Self> {
        if self.certified_depth < depth && self.stop == Stop::PrecisionExhausted {
            return Err(Error::precision(format!(
                "digit budget of {} certifies only {} partial quotients, {} requested",
                self.alpha, self.certified_depth, depth
            )));
        }
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

struct Continuants {
    p: Vec<BigInt>,
    q: Vec<BigInt>,
    p_prev: BigInt,
    q_prev: BigInt,
}

impl Continuants {
    fn new(a0: &BigInt) -> Self {
        Continuants {
            p: vec![a0.clone()],
            q: vec![BigInt::one()],
            p_prev: BigInt::one(),
            q_prev: BigInt::zero(),
        }
    }

    fn push(&mut self, a: &BigInt) {
        let (p, q) = (self.p.last().unwrap().clone(), self.q.last().unwrap().clone());
        let p_next = a * &p + &self.p_prev;
        let q_next = a * &q + &self.q_prev;
        self.p_prev = p;
        self.q_prev = q;
        self.p.push(p_next);
        self.q.push(q_next);
    }
}

/// Expands `alpha` to at most `depth` partial quotients.
pub fn expand(alpha: &RealSpec, depth: usize) -> Result<CfExpansion> {
    if depth == 0 {
        return Err(Error::invalid("depth must be positive"));
    }
    let (a0, quotients, stop) = match alpha.exact() {
        Some(x) => {
            let a0 = x.floor();
            let mut frac = x.add_int(&-&a0);
            let mut qs = Vec::with_capacity(depth);
            let mut stop = Stop::Complete;
            while qs.len() < depth {
                if frac.is_zero() {
                    stop = Stop::Terminated;
                    break;
                }
                let y = frac.recip().expect("nonzero");
                let a = y.floor();
                frac = y.add_int(&-&a);
                qs.push(a);
            }
            (a0, qs, stop)
        }
        None => expand_interval(alpha, depth)?,
    };
    let mut conts = Continuants::new(&a0);
    for a in &quotients {
        conts.push(a);
    }
    Ok(CfExpansion {
        alpha: alpha.clone(),
        a0,
        certified_depth: quotients.len(),
        quotients,
        numerators: conts.p,
        denominators: conts.q,
        stop,
    })
}

fn expand_interval(alpha: &RealSpec, depth: usize) -> Result<(BigInt, Vec<BigInt>, Stop)> {
    // the budgeted enclosure is exact at any tolerance wider than itself
    let iv: CertifiedInterval = alpha.enclose(&BigRational::from_integer(BigInt::from(2)))?;
    let (mut lo, mut hi) = (iv.lo().clone(), iv.hi().clone());
    let a0 = lo.floor().to_integer();
    if hi.floor().to_integer() != a0 {
        return Err(Error::precision(format!("integer part of {alpha} is not certified")));
    }
    let mut qs = Vec::new();
    let mut stop = Stop::Complete;
    let mut a = a0.clone();
    while qs.len() < depth {
        let a_r = BigRational::from_integer(a.clone());
        let (f_lo, f_hi) = (&lo - &a_r, &hi - &a_r);
        if f_lo.is_zero() {
            stop = Stop::PrecisionExhausted;
            break;
        }
        let (next_lo, next_hi) = (f_hi.recip(), f_lo.recip());
        let next = next_lo.floor().to_integer();
        if next_hi.floor().to_integer() != next {
            stop = Stop::PrecisionExhausted;
            break;
        }
        qs.push(next.clone());
        lo = next_lo;
        hi = next_hi;
        a = next;
    }
    Ok((a0, qs, stop))
}

/// Natural log of a positive big integer as an outward-padded `(lower, upper)` pair.
pub fn ln_bounds(x: &BigInt) -> (f64, f64) {
    assert!(x.is_positive(), "log of nonpositive integer");
    let bits = x.bits();
    let v = if bits <= 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 60;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    };
    let pad = v.abs() * 1e-13 + 1e-15;
    ((v - pad).max(0.0), v + pad)
}

/// Enclosure of `max_{1≤k≤depth} log q_k / k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevyReport {
    pub depth: usize,
    pub lower: f64,
    pub upper: f64,
    pub argmax: usize,
}

impl LevyReport {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

pub fn levy_of(exp: &CfExpansion) -> Result<LevyReport> {
    let depth = exp.certified_depth;
    if depth == 0 {
        return Err(Error::invalid(format!("{} has no partial quotients", exp.alpha)));
    }
    let mut best = LevyReport {
        depth,
        lower: f64::NEG_INFINITY,
        upper: f64::NEG_INFINITY,
        argmax: 0,
    };
    for k in 1..=depth {
        let (lo, hi) = ln_bounds(exp.q(k));
        let (lo, hi) = (lo / k as f64, hi / k as f64);
        if lo > best.lower {
            best.lower = lo;
            best.upper = hi;
            best.argmax = k;
        }
    }
    Ok(best)
}

/// The growth exponent at finite depth; a certified lower bound for the supremum.
pub fn levy_exponent(alpha: &RealSpec, depth: usize) -> Result<LevyReport> {
    let exp = expand(alpha, depth)?;
    exp.require_depth(depth)?;
    levy_of(&exp)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BadCheck {
    pub bounded: bool,
    /// First `k` with `a_k > bound`.
    pub witness: Option<usize>,
    pub depth: usize,
}

/// Whether all partial quotients up to `depth` are at most `bound`.
pub fn is_bad_at_depth(alpha: &RealSpec, depth: usize, bound: &BigInt) -> Result<BadCheck> {
    let exp = expand(alpha, depth)?;
    exp.require_depth(depth)?;
    let witness = exp.quotients.iter().position(|a| a > bound).map(|i| i + 1);
    Ok(BadCheck {
        bounded: witness.is_none(),
        witness,
        depth: exp.certified_depth,
    })
}
