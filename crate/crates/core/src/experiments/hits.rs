//! Certified hit scans: `n‖nα − γ‖‖nβ − δ‖ < (ln ln n)^{3+ε}/ln n` over `16 ≤ n ≤ N`,
//! and `‖n_tβ − δ‖ < (ln t)^{3+ε}/t` over `3 ≤ t ≤ T`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::kronecker::LacunarySequence;
use crate::realnum::{linear_form_dist, pow2_inv, CertifiedInterval, RealSpec};

/// Smallest `n` for which the multiplicative threshold is evaluated.
pub const MULTIPLICATIVE_START: u64 = 16;
/// Smallest `t` for which the lacunary threshold is evaluated.
pub const LACUNARY_START: usize = 3;
/// Largest tolerated fraction of skipped indices.
pub const MAX_SKIP_FRACTION: f64 = 0.001;

const REFINEMENTS: u32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct HitRecord {
    /// `n` for multiplicative scans, `t` for lacunary scans.
    pub index: BigInt,
    pub lhs: CertifiedInterval,
    pub threshold: CertifiedInterval,
    /// Certified: `lhs.hi < threshold.lo`.
    pub is_hit: bool,
}

impl HitRecord {
    fn decide(index: BigInt, lhs: CertifiedInterval, threshold: CertifiedInterval) -> HitRecord {
        let is_hit = lhs.hi() < threshold.lo();
        HitRecord { index, lhs, threshold, is_hit }
    }

    /// Whether the comparison is settled either way.
    pub fn is_decided(&self) -> bool {
        self.is_hit || self.lhs.lo() >= self.threshold.hi()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrendPoint {
    pub checkpoint: u64,
    pub cumulative_hits: u64,
    pub normalizer: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Skip {
    pub index: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HitScan {
    pub records: Vec<HitRecord>,
    pub skipped: Vec<Skip>,
    pub trend: Vec<TrendPoint>,
}

impl HitScan {
    pub fn hit_count(&self) -> usize {
        self.records.iter().filter(|r| r.is_hit).count()
    }

    pub fn hits(&self) -> impl Iterator<Item = &HitRecord> {
        self.records.iter().filter(|r| r.is_hit)
    }

    pub fn hits_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n_or_t", "lhs_lo", "lhs_hi", "threshold", "is_hit"]).expect("in-memory csv");
        for r in &self.records {
            w.write_record([
                r.index.to_string(),
                r.lhs.lo_f64().to_string(),
                r.lhs.hi_f64().to_string(),
                r.threshold.mid_f64().to_string(),
                r.is_hit.to_string(),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }

    pub fn trend_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.trend {
            w.serialize(p).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }
}

/// A positive `f64` as a certified interval, padded by a relative `10^-12` for the
/// rounding of `ln` and `powf`.
pub fn threshold_interval(v: f64) -> CertifiedInterval {
    let lo = BigRational::from_f64(v * (1.0 - 1e-12)).expect("finite threshold");
    let hi = BigRational::from_f64(v * (1.0 + 1e-12)).expect("finite threshold");
    CertifiedInterval::new(lo, hi)
}

/// `(ln ln n)^{3+ε}/ln n`.
pub fn multiplicative_threshold(n: &BigInt, epsilon: f64) -> f64 {
    let ln = crate::cf::ln_bounds(n);
    let ln_n = 0.5 * (ln.0 + ln.1);
    ln_n.ln().powf(3.0 + epsilon) / ln_n
}

/// `(ln t)^{3+ε}/t`.
pub fn lacunary_threshold(t: usize, epsilon: f64) -> f64 {
    (t as f64).ln().powf(3.0 + epsilon) / t as f64
}

/// `n‖nα − γ‖‖nβ − δ‖` at absolute tolerance about `2^-bits` per factor.
pub fn product_lhs(n: &BigInt, alpha: &RealSpec, gamma: &RealSpec, beta: &RealSpec, delta: &RealSpec, bits: u64) -> Result<CertifiedInterval> {
    let tol = pow2_inv(n.bits() + bits);
    let a = linear_form_dist(n, alpha, gamma, &tol)?;
    let b = linear_form_dist(n, beta, delta, &tol)?;
    Ok(CertifiedInterval::point(BigRational::from_integer(n.clone())).mul(&a).mul(&b))
}

fn settle<F>(index: BigInt, threshold: CertifiedInterval, eval: F) -> Result<HitRecord>
where
    F: Fn(u64) -> Result<CertifiedInterval>,
{
    let mut rec = HitRecord::decide(index.clone(), eval(64)?, threshold.clone());
    let mut bits = 64;
    for _ in 0..REFINEMENTS {
        if rec.is_decided() {
            break;
        }
        bits *= 2;
        rec = HitRecord::decide(index.clone(), eval(bits)?, threshold.clone());
    }
    Ok(rec)
}

fn trend(records: &[HitRecord], checkpoints: &[u64], normalizer: impl Fn(u64) -> f64) -> Vec<TrendPoint> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut hits = 0u64;
    let mut i = 0;
    for &cp in checkpoints {
        while i < records.len() && records[i].index <= BigInt::from(cp) {
            hits += records[i].is_hit as u64;
            i += 1;
        }
        let z = normalizer(cp);
        out.push(TrendPoint {
            checkpoint: cp,
            cumulative_hits: hits,
            normalizer: z,
            ratio: hits as f64 / z,
        });
    }
    out
}

/// Powers of two in `[start, end]`, plus `end`.
fn dyadic_checkpoints(start: u64, end: u64) -> Vec<u64> {
    let mut cps: Vec<u64> = (0..64).map(|k| 1u64 << k).filter(|&c| c >= start && c <= end).collect();
    if cps.last() != Some(&end) {
        cps.push(end);
    }
    cps
}

fn collect(results: Vec<(u64, Result<HitRecord>)>, range: u64) -> Result<(Vec<HitRecord>, Vec<Skip>)> {
    let mut records = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for (index, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(Error::InsufficientPrecision(reason)) => skipped.push(Skip { index, reason }),
            Err(e) => return Err(e),
        }
    }
    if skipped.len() as f64 > MAX_SKIP_FRACTION * range as f64 {
        return Err(Error::precision(format!(
            "{} of {} indices skipped for precision (limit {:.1}%)",
            skipped.len(),
            range,
            MAX_SKIP_FRACTION * 100.0
        )));
    }
    Ok((records, skipped))
}

/// Scans `16 ≤ n ≤ N` for `n‖nα − γ‖‖nβ − δ‖ < (ln ln n)^{3+ε}/ln n`.
pub fn multiplicative_hits(
    alpha: &RealSpec,
    gamma: &RealSpec,
    beta: &RealSpec,
    delta: &RealSpec,
    n_max: u64,
    epsilon: f64,
    exec: Execution,
) -> Result<HitScan> {
    if n_max < MULTIPLICATIVE_START {
        return Err(Error::InvalidRange(format!("N_max = {n_max} < {MULTIPLICATIVE_START}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let range = n_max - MULTIPLICATIVE_START + 1;
    let results = exec.map(range as usize, |i| {
        let n = MULTIPLICATIVE_START + i as u64;
        let nb = BigInt::from(n);
        let thr = threshold_interval(multiplicative_threshold(&nb, epsilon));
        (n, settle(nb.clone(), thr, |bits| product_lhs(&nb, alpha, gamma, beta, delta, bits)))
    });
    let (records, skipped) = collect(results, range)?;
    let trend = trend(&records, &dyadic_checkpoints(MULTIPLICATIVE_START, n_max), |n| (n as f64).ln().ln());
    Ok(HitScan { records, skipped, trend })
}

/// `‖n_tβ − δ‖` at absolute tolerance about `2^-bits`.
pub fn lacunary_lhs(n: &BigInt, beta: &RealSpec, delta: &RealSpec, bits: u64) -> Result<CertifiedInterval> {
    linear_form_dist(n, beta, delta, &pow2_inv(bits))
}

/// Scans `3 ≤ t ≤ T` for `‖n_tβ − δ‖ < (ln t)^{3+ε}/t`.
pub fn lacunary_hits(seq: &LacunarySequence, beta: &RealSpec, delta: &RealSpec, t_max: usize, epsilon: f64, exec: Execution) -> Result<HitScan> {
    if t_max < LACUNARY_START {
        return Err(Error::InvalidRange(format!("T_max = {t_max} < {LACUNARY_START}")));
    }
    if seq.len() < t_max {
        return Err(Error::invalid(format!("sequence has {} terms, T_max = {t_max}", seq.len())));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let range = (t_max - LACUNARY_START + 1) as u64;
    let results = exec.map(range as usize, |i| {
        let t = LACUNARY_START + i;
        let thr = threshold_interval(lacunary_threshold(t, epsilon));
        let n = seq.term(t);
        (t as u64, settle(BigInt::from(t), thr, |bits| lacunary_lhs(n, beta, delta, bits)))
    });
    let (records, skipped) = collect(results, range)?;
    let trend = trend(&records, &dyadic_checkpoints(LACUNARY_START as u64, t_max as u64), |t| (t as f64).ln());
    Ok(HitScan { records, skipped, trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kronecker::geometric_sequence;

    fn q(p: i64, d: i64) -> RealSpec {
        RealSpec::rational(p, d)
    }

    #[test]
    fn rational_kill() {
        let s = multiplicative_hits(&q(1, 2), &q(0, 1), &q(1, 2), &q(0, 1), 100, 0.5, Execution::default()).unwrap();
        for r in &s.records {
            let n: u64 = (&r.index).try_into().unwrap();
            assert_eq!(r.is_hit, n.is_multiple_of(2), "n = {n}");
        }
        assert_eq!(s.hit_count(), 43);
        assert!(s.skipped.is_empty());
        assert!(matches!(
            multiplicative_hits(&q(1, 2), &q(0, 1), &q(1, 2), &q(0, 1), 15, 0.5, Execution::default()),
            Err(Error::InvalidRange(_))
        ));
    }

    #[test]
    fn pell_denominator_is_a_hit() {
        let alpha = RealSpec::silver_conjugate();
        let beta = RealSpec::golden_conjugate();
        let s = multiplicative_hits(&alpha, &q(0, 1), &beta, &q(0, 1), 10_000, 0.5, Execution::default()).unwrap();
        let r = s.records.iter().find(|r| r.index == BigInt::from(169)).unwrap();
        // 169‖169α‖ < 1 and ‖169β‖ < 1/2 put the product well under the threshold near 0.86
        assert!(r.lhs.hi_f64() < 0.5);
        assert!(r.is_hit);
        let ones = s.trend.windows(2).all(|w| w[0].cumulative_hits <= w[1].cumulative_hits);
        assert!(ones);
        assert_eq!(s.trend.last().unwrap().checkpoint, 10_000);
        assert_eq!(s.trend.last().unwrap().cumulative_hits as usize, s.hit_count());
    }

    #[test]
    fn lacunary_thirds() {
        let seq = geometric_sequence(2, 20).unwrap();
        let s = lacunary_hits(&seq, &q(1, 3), &q(1, 3), 20, 0.5, Execution::default()).unwrap();
        for r in &s.records {
            let t: usize = (&r.index).try_into().unwrap();
            // ‖2^t/3 − 1/3‖ is 0 for even t and 1/3 for odd t
            let expect = t.is_multiple_of(2) || lacunary_threshold(t, 0.5) > 1.0 / 3.0 * (1.0 + 1e-9);
            assert_eq!(r.is_hit, expect, "t = {t}");
            if t.is_multiple_of(2) {
                assert!(r.lhs.hi_f64() == 0.0);
            }
        }
        assert!(s.records.iter().filter(|r| r.is_hit).any(|r| r.index == BigInt::from(4)));
    }

    #[test]
    fn cantor_orbit_misses_one_half() {
        // β = 1/4 = 0.0202…₃ lies in the Cantor set; 3^tβ mod 1 ∈ {1/4, 3/4}
        let seq = geometric_sequence(3, 40).unwrap();
        let s = lacunary_hits(&seq, &q(1, 4), &q(1, 2), 40, 0.5, Execution::default()).unwrap();
        for r in &s.records {
            let t: usize = (&r.index).try_into().unwrap();
            assert_eq!(r.is_hit, lacunary_threshold(t, 0.5) > 0.25 * (1.0 + 1e-9), "t = {t}");
        }
    }

    #[test]
    fn hits_survive_refinement() {
        let seq = geometric_sequence(2, 64).unwrap();
        let beta = RealSpec::golden_conjugate();
        let gamma: RealSpec = "0.7@30".parse().unwrap();
        let s = lacunary_hits(&seq, &beta, &gamma, 64, 0.5, Execution::default()).unwrap();
        for r in s.hits() {
            let t: usize = (&r.index).try_into().unwrap();
            let fine = lacunary_lhs(seq.term(t), &beta, &gamma, 90).unwrap();
            assert!(fine.hi() < r.threshold.lo());
        }
    }

    #[test]
    fn csv_shapes() {
        let seq = geometric_sequence(2, 8).unwrap();
        let s = lacunary_hits(&seq, &q(1, 3), &q(1, 3), 8, 0.5, Execution::default()).unwrap();
        let csv = s.hits_csv();
        assert!(csv.starts_with("n_or_t,lhs_lo,lhs_hi,threshold,is_hit\n3,"));
        assert_eq!(csv.lines().count(), 7);
        let trend = s.trend_csv();
        assert!(trend.starts_with("checkpoint,cumulative_hits,normalizer,ratio\n4,"));
    }

    #[test]
    fn modes_agree() {
        let a = multiplicative_hits(
            &RealSpec::golden_conjugate(),
            &q(1, 3),
            &RealSpec::silver_conjugate(),
            &q(0, 1),
            2000,
            0.5,
            Execution::Sequential,
        )
        .unwrap();
        let b = multiplicative_hits(
            &RealSpec::golden_conjugate(),
            &q(1, 3),
            &RealSpec::silver_conjugate(),
            &q(0, 1),
            2000,
            0.5,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(a.hits_csv(), b.hits_csv());
    }
}
