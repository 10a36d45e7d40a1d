use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realnum::{format_rational, pow2_inv, RealSpec};

/// Where a sequence came from.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Geometric { base: u64 },
    Inhomogeneous { alpha: RealSpec, gamma: RealSpec, lambda: f64 },
    UserSupplied,
}

/// Strictly increasing positive integers with a certified ratio `r > 1` such that
/// `n_{t+1} > r·n_t` for every consecutive pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LacunarySequence {
    terms: Vec<BigInt>,
    ratio: BigRational,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    terms: Vec<String>,
    ratio: String,
    provenance: Provenance,
}

impl LacunarySequence {
    /// Validates `terms` against `ratio`: every gap must satisfy `n_{t+1} > r·n_t`, `r > 1`.
    pub fn new(terms: Vec<BigInt>, ratio: BigRational, provenance: Provenance) -> Result<LacunarySequence> {
        if terms.is_empty() {
            return Err(Error::invalid("a sequence needs at least one term"));
        }
        if ratio <= BigRational::one() {
            return Err(Error::NotLacunary(format!("ratio {} is not > 1", format_rational(&ratio))));
        }
        if let Some(t) = terms.iter().position(|n| !n.is_positive()) {
            return Err(Error::invalid(format!("term {} is not positive", t + 1)));
        }
        for (t, w) in terms.windows(2).enumerate() {
            if BigRational::from_integer(w[1].clone()) <= &ratio * BigRational::from_integer(w[0].clone()) {
                return Err(Error::NotLacunary(format!(
                    "n_{} = {} is not > {} · n_{}",
                    t + 2,
                    w[1],
                    format_rational(&ratio),
                    t + 1
                )));
            }
        }
        Ok(LacunarySequence { terms, ratio, provenance })
    }

    /// Terms with the largest certified ratio found by [`validate_lacunary`].
    pub fn from_terms(terms: Vec<BigInt>) -> Result<LacunarySequence> {
        let ratio = validate_lacunary(&terms)?;
        LacunarySequence::new(terms, ratio, Provenance::UserSupplied)
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `n_t`, 1-based.
    pub fn term(&self, t: usize) -> &BigInt {
        &self.terms[t - 1]
    }

    pub fn ratio(&self) -> &BigRational {
        &self.ratio
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `min(r, 2)`, the ratio in the range `(1, 2]` used by the counting bounds.
    pub fn capped_ratio(&self) -> BigRational {
        self.ratio.clone().min(BigRational::from_integer(2.into()))
    }

    /// Terms as `i128`, when they fit.
    pub fn terms_i128(&self, count: usize) -> Result<Vec<i128>> {
        if count > self.terms.len() {
            return Err(Error::invalid(format!("sequence has {} terms, {} needed", self.terms.len(), count)));
        }
        self.terms[..count]
            .iter()
            .map(|n| i128::try_from(n).map_err(|_| Error::invalid(format!("term {n} exceeds 128 bits"))))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let j = SequenceJson {
            terms: self.terms.iter().map(|n| n.to_string()).collect(),
            ratio: format!("{}/{}", self.ratio.numer(), self.ratio.denom()),
            provenance: self.provenance.clone(),
        };
        serde_json::to_string(&j).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<LacunarySequence> {
        let j: SequenceJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let terms = j
            .terms
            .iter()
            .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad term {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let ratio = match j.ratio.parse::<RealSpec>()? {
            RealSpec::Rational(r) => r,
            other => return Err(Error::Parse(format!("ratio must be p/q, got {other}"))),
        };
        LacunarySequence::new(terms, ratio, j.provenance)
    }
}

/// `n_t = m^t` for `1 ≤ t ≤ T`. The reported ratio is 2 for `m ≥ 3` and 3/2 for `m = 2`:
/// the counting lemmas need `r ∈ (1, 2]` and strictness rules out `r = m`.
pub fn geometric_sequence(base: u64, count: usize) -> Result<LacunarySequence> {
    if base < 2 {
        return Err(Error::invalid("geometric base must be at least 2"));
    }
    if count == 0 {
        return Err(Error::invalid("need at least one term"));
    }
    let m = BigInt::from(base);
    let mut terms = Vec::with_capacity(count);
    let mut x = m.clone();
    for _ in 0..count {
        terms.push(x.clone());
        x *= &m;
    }
    let ratio = if base == 2 {
        BigRational::new(3.into(), 2.into())
    } else {
        BigRational::from_integer(2.into())
    };
    LacunarySequence::new(terms, ratio, Provenance::Geometric { base })
}

/// Certified ratio `r = min_t n_{t+1}/n_t · (1 − 2^-20)`, so that `n_{t+1} > r·n_t`
/// holds strictly. Rejects sequences that are not strictly increasing, have a
/// nonpositive term, or have minimum ratio ≤ 1. A single term gets `r = 2`.
pub fn validate_lacunary(terms: &[BigInt]) -> Result<BigRational> {
    if terms.is_empty() {
        return Err(Error::invalid("empty sequence"));
    }
    if terms.iter().any(|n| !n.is_positive()) {
        return Err(Error::NotLacunary("terms must be positive".into()));
    }
    let min_ratio = terms.windows(2).map(|w| BigRational::new(w[1].clone(), w[0].clone())).min();
    let Some(min_ratio) = min_ratio else {
        return Ok(BigRational::from_integer(2.into()));
    };
    if min_ratio <= BigRational::one() {
        return Err(Error::NotLacunary(format!("minimum ratio {} is not > 1", format_rational(&min_ratio))));
    }
    let r = &min_ratio * (BigRational::one() - pow2_inv(20));
    // the margin can only push r below 1 when min_ratio is within 2^-20 of 1
    if r <= BigRational::one() {
        let mid = (min_ratio + BigRational::one()) / BigRational::from_integer(2.into());
        return Ok(mid);
    }
    debug_assert!(!r.is_zero());
    Ok(r)
}
