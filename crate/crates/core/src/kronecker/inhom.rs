//! The inhomogeneous lacunary sequence: for each `t`, an integer `n_t` with
//!
//! ```text
//! 8^t ≤ n_t ≤ 4·e^{6Λt},    n_t‖n_tα − γ‖ ≤ 8,    n_{t+1} > 2·n_t.
//! ```
//!
//! Each `n_t` is the least certified witness above `max(8^t, 2n_{t−1} + 1)`. Candidates
//! come from a dyadic approximation of `nα − γ` fed to [`first_in_window`]; the window
//! is padded so no true witness is skipped, and every candidate is then certified
//! (or rejected) with exact or interval arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::search::first_in_window;
use super::sequence::{LacunarySequence, Provenance};
use crate::cf::{expand, levy_of, ln_bounds, Stop};
use crate::error::{Error, Result};
use crate::realnum::{exact_linear_form, linear_form_dist, pow2_inv, CertifiedInterval, RealSpec};

const MAX_CANDIDATES: usize = 100_000;

/// Per-term record that all three inequalities hold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermCertificate {
    pub t: usize,
    #[serde(serialize_with = "crate::cf::big_string")]
    pub n: BigInt,
    /// `8^t ≤ n_t`.
    pub lower_ok: bool,
    /// `n_t ≤ 4e^{6Λt}`, checked in log form with outward rounding.
    pub upper_ok: bool,
    /// Enclosure of `‖n_tα − γ‖`.
    #[serde(skip)]
    pub dist: CertifiedInterval,
    /// `n_t‖n_tα − γ‖ ≤ 8`.
    pub product_ok: bool,
    /// `n_t > 2n_{t−1}` (true for `t = 1`).
    pub growth_ok: bool,
}

impl TermCertificate {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok && self.product_ok && self.growth_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaSource {
    Override,
    /// Finite-depth growth exponent, at the first depth whose continuant exceeds `8^T`.
    Levy {
        depth: usize,
    },
}

#[derive(Clone, Debug)]
pub struct InhomSequence {
    pub sequence: LacunarySequence,
    pub certificates: Vec<TermCertificate>,
    /// The value of `Λ` used in the upper window.
    pub lambda: f64,
    pub lambda_source: LambdaSource,
}

fn eight_pow(t: usize) -> BigInt {
    BigInt::one() << (3 * t)
}

/// `ln 4 + 6Λt`, rounded down slightly so that passing the check is conservative.
fn log_upper(lambda: f64, t: usize) -> f64 {
    let v = 4f64.ln() + 6.0 * lambda * t as f64;
    v - v.abs() * 1e-13 - 1e-15
}

fn certify_tolerance(n: &BigInt, refine: u32) -> BigRational {
    pow2_inv(n.bits() + 20) / BigRational::from_integer(BigInt::from(refine.max(1)))
}

/// Decides `n‖nα − γ‖ ≤ 8`, exactly when the inputs share a field.
fn certify_product(n: &BigInt, alpha: &RealSpec, gamma: &RealSpec, refine: u32) -> Result<(bool, CertifiedInterval)> {
    let tol = certify_tolerance(n, refine);
    let eight = BigRational::from_integer(8.into());
    if let Some(x) = exact_linear_form(n, alpha, gamma) {
        let d = x.dist_to_nearest_int();
        let ok = d.mul_int(n).checked_cmp(&crate::realnum::Quad::from_integer(8.into())).expect("rational") != Ordering::Greater;
        return Ok((ok, d.enclose(&tol)));
    }
    let d = linear_form_dist(n, alpha, gamma, &tol)?;
    let ok = d.hi() * BigRational::from_integer(n.clone()) <= eight;
    Ok((ok, d))
}

/// Re-checks every inequality for the given terms from scratch. `refine` divides the
/// working tolerance (10 re-verifies at ten times the precision).
pub fn verify_inhom_terms(terms: &[BigInt], alpha: &RealSpec, gamma: &RealSpec, lambda: f64, refine: u32) -> Result<Vec<TermCertificate>> {
    terms
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let t = i + 1;
            let (product_ok, dist) = certify_product(n, alpha, gamma, refine)?;
            let growth_ok = i == 0 || n > &(&terms[i - 1] * 2u32);
            Ok(TermCertificate {
                t,
                n: n.clone(),
                lower_ok: n >= &eight_pow(t),
                upper_ok: n.is_positive() && ln_bounds(n).1 <= log_upper(lambda, t),
                dist,
                product_ok,
                growth_ok,
            })
        })
        .collect()
}

/// `Λ` at the first depth whose continuant exceeds `8^T`.
fn auto_lambda(alpha: &RealSpec, count: usize) -> Result<(f64, usize)> {
    let target = eight_pow(count);
    // q_k ≥ φ^{k−1}, so this depth always reaches the target for irrational α
    let depth = (count as f64 * 8f64.ln() / 1.618_033_988_7f64.ln()).ceil() as usize + 3;
    let exp = expand(alpha, depth)?;
    if exp.stop == Stop::Terminated {
        return Err(Error::invalid(format!("{alpha} is rational")));
    }
    let k = (1..=exp.certified_depth).find(|&k| exp.q(k) > &target).ok_or_else(|| {
        Error::precision(format!(
            "continuants of {alpha} certified only to depth {}; need q_k > 8^{count}",
            exp.certified_depth
        ))
    })?;
    let mut truncated = exp.clone();
    truncated.certified_depth = k;
    let report = levy_of(&truncated)?;
    Ok((report.lower, k))
}

struct Approximation {
    modulus: BigInt,
    step: BigInt,
    shift: BigInt,
    /// Bound on the accumulated error of `n·step − shift` versus `M(nα − γ)`, in units of `1/M`, for `n ≤ 2^n_bits`.
    pad: BigInt,
}

fn approximate(alpha: &RealSpec, gamma: &RealSpec, bits: u64, n_bits: u64) -> Result<Approximation> {
    let modulus = BigInt::one() << bits;
    let m = BigRational::from_integer(modulus.clone());
    let a = alpha.enclose(&pow2_inv(bits + 1))?;
    let step = (a.lo() * &m).floor().to_integer();
    let g = match gamma.enclose(&pow2_inv(bits + 1)) {
        Ok(g) => g,
        // a budgeted γ is as tight as it gets; its own width goes into the padding
        Err(_) => gamma.enclose(&BigRational::one())?,
    };
    let shift = (g.lo() * &m).floor().to_integer();
    let gamma_width = (g.width() * &m).ceil().to_integer();
    let pad = (BigInt::one() << (n_bits + 1)) + 4 + gamma_width;
    Ok(Approximation { modulus, step, shift, pad })
}

/// Builds `n_1, …, n_T` with a certificate per term. `Λ` is `lambda_override` when given,
/// otherwise the finite-depth growth exponent of `α`.
pub fn build_inhom_sequence(alpha: &RealSpec, gamma: &RealSpec, count: usize, lambda_override: Option<f64>) -> Result<InhomSequence> {
    if count == 0 {
        return Err(Error::invalid("need T ≥ 1"));
    }
    if alpha.is_rational() {
        return Err(Error::invalid(format!("{alpha} is rational; the construction needs irrational α")));
    }
    let (lambda, lambda_source) = match lambda_override {
        Some(l) if l > 0.0 && l.is_finite() => (l, LambdaSource::Override),
        Some(l) => return Err(Error::invalid(format!("Λ override {l} must be positive"))),
        None => {
            let (l, depth) = auto_lambda(alpha, count)?;
            (l, LambdaSource::Levy { depth })
        }
    };

    let mut terms: Vec<BigInt> = Vec::with_capacity(count);
    for t in 1..=count {
        let floor = eight_pow(t);
        let start = match terms.last() {
            Some(prev) => (prev * 2u32 + 1u32).max(floor),
            None => floor,
        };
        let log_cap = log_upper(lambda, t);
        let n_bits = (log_cap / std::f64::consts::LN_2).ceil().max(1.0) as u64 + 1;
        let bits = n_bits + start.bits() + 32;
        let approx = approximate(alpha, gamma, bits, n_bits)?;
        // |{nα − γ}| ≤ 8/start covers every witness n ≥ start
        let reach = (BigInt::from(8) * &approx.modulus) / &start + &approx.pad;
        let window = &reach * 2u32;
        let mut from = start.clone();
        let mut found = None;
        for _ in 0..MAX_CANDIDATES {
            let n = if window >= &approx.modulus - 1u32 {
                Some(from.clone())
            } else {
                first_in_window(&approx.step, &(&reach - &approx.shift), &approx.modulus, &BigInt::zero(), &window, &from)
            };
            let Some(n) = n else { break };
            if ln_bounds(&n).0 > log_cap {
                break;
            }
            if certify_product(&n, alpha, gamma, 1)?.0 {
                found = Some(n);
                break;
            }
            from = n + 1u32;
        }
        match found {
            Some(n) => terms.push(n),
            None => {
                return Err(Error::ConstructionFailed {
                    t,
                    reason: format!("no certified witness in [{}, 4e^(6·{lambda:.6}·{t})]", start),
                })
            }
        }
    }

    let certificates = verify_inhom_terms(&terms, alpha, gamma, lambda, 1)?;
    if let Some(bad) = certificates.iter().find(|c| !c.holds()) {
        return Err(Error::ConstructionFailed {
            t: bad.t,
            reason: "certificate failed on re-check".into(),
        });
    }
    let provenance = Provenance::Inhomogeneous {
        alpha: alpha.clone(),
        gamma: gamma.clone(),
        lambda,
    };
    let sequence = LacunarySequence::new(terms, BigRational::from_integer(2.into()), provenance)?;
    Ok(InhomSequence {
        sequence,
        certificates,
        lambda,
        lambda_source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kronecker::validate_lacunary;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Least `n ≥ start` with `n‖nα − γ‖ ≤ 8`, by direct scan in double precision
    /// with a wide margin; only used where values are far from the boundary.
    fn scan_oracle(alpha: f64, gamma: f64, start: u64) -> u64 {
        (start..)
            .find(|&n| {
                let x = (n as f64 * alpha - gamma).rem_euclid(1.0);
                n as f64 * x.min(1.0 - x) <= 8.0
            })
            .unwrap()
    }

    #[test]
    fn fibonacci_terms_pass_certificates() {
        let alpha = RealSpec::golden_conjugate();
        let zero = RealSpec::integer(0);
        let (lambda, _) = auto_lambda(&alpha, 3).unwrap();
        let certs = verify_inhom_terms(&ints(&[13, 89, 610]), &alpha, &zero, lambda, 1).unwrap();
        assert!(certs.iter().all(TermCertificate::holds), "{certs:?}");
    }

    #[test]
    fn convergent_denominators_witness_homogeneous_case() {
        // any convergent denominator in [8, 4e^{6Λ}] works for t = 1
        let alpha = RealSpec::silver_conjugate();
        let zero = RealSpec::integer(0);
        let (lambda, _) = auto_lambda(&alpha, 1).unwrap();
        for q in [12, 29, 70] {
            let c = &verify_inhom_terms(&ints(&[q]), &alpha, &zero, lambda, 1).unwrap()[0];
            assert!(c.product_ok && c.lower_ok && c.upper_ok, "q = {q}");
        }
    }

    #[test]
    fn search_returns_least_witness() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let silver = 2f64.sqrt() - 1.0;
        for (alpha, af, gamma, gf) in [
            (RealSpec::golden_conjugate(), golden, RealSpec::integer(0), 0.0),
            (RealSpec::silver_conjugate(), silver, RealSpec::rational(1, 3), 1.0 / 3.0),
            (RealSpec::golden_conjugate(), golden, "0.7@20".parse().unwrap(), 0.7),
        ] {
            let s = build_inhom_sequence(&alpha, &gamma, 5, None).unwrap();
            let mut prev = 0u64;
            for (t, n) in s.sequence.terms().iter().enumerate() {
                let start = (8u64.pow(t as u32 + 1)).max(2 * prev + 1);
                let want = scan_oracle(af, gf, start);
                assert_eq!(n, &BigInt::from(want), "t = {} for {alpha}, {gamma}", t + 1);
                prev = want;
            }
        }
    }

    #[test]
    fn silver_with_third_shift() {
        let alpha = RealSpec::silver_conjugate();
        let gamma = RealSpec::rational(1, 3);
        let s = build_inhom_sequence(&alpha, &gamma, 5, None).unwrap();
        assert_eq!(s.sequence.len(), 5);
        let again = verify_inhom_terms(s.sequence.terms(), &alpha, &gamma, s.lambda, 10).unwrap();
        assert!(again.iter().all(TermCertificate::holds));
        let r = validate_lacunary(s.sequence.terms()).unwrap();
        assert!(r > BigRational::from_integer(2.into()));
        assert!(matches!(s.lambda_source, LambdaSource::Levy { .. }));
    }

    #[test]
    fn rejects_rational_alpha_and_tiny_lambda() {
        assert!(build_inhom_sequence(&RealSpec::rational(1, 3), &RealSpec::integer(0), 3, None).is_err());
        // with Λ forced tiny the window above 8^t is empty
        let err = build_inhom_sequence(&RealSpec::golden_conjugate(), &RealSpec::integer(0), 3, Some(0.05)).unwrap_err();
        assert!(matches!(err, Error::ConstructionFailed { t: 1, .. }), "{err:?}");
    }

    #[test]
    fn zero_gamma_override() {
        let s = build_inhom_sequence(&RealSpec::golden_conjugate(), &RealSpec::integer(0), 4, Some(0.5)).unwrap();
        assert_eq!(s.lambda, 0.5);
        assert_eq!(s.lambda_source, LambdaSource::Override);
        assert!(s.certificates.iter().all(TermCertificate::holds));
    }
}
