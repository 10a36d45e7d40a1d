//! From lacunary hits to multiplicative hits.
//!
//! With `n_t‖n_tα − γ‖ ≤ 8` certified for the inhomogeneous sequence, every lacunary
//! hit `‖n_tβ − δ‖ < (ln t)^{3+ε}/t` gives
//! `n_t‖n_tα − γ‖‖n_tβ − δ‖ ≤ 8‖n_tβ − δ‖ < 8(ln t)^{3+ε}/t`. The factor 8 is kept
//! explicit, and each translated hit is re-verified from scratch.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use super::hits::{lacunary_hits, lacunary_threshold, multiplicative_threshold, product_lhs, threshold_interval};
use crate::error::Result;
use crate::exec::Execution;
use crate::kronecker::{build_inhom_sequence, InhomSequence};
use crate::measures::{sample, MeasureModel, DEFAULT_SAMPLE_BITS};
use crate::realnum::{CertifiedInterval, RealSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct TranslatedHit {
    pub t: usize,
    pub n: BigInt,
    /// `‖n_tβ − δ‖`.
    pub lacunary_lhs: CertifiedInterval,
    /// `n_t‖n_tα − γ‖‖n_tβ − δ‖`, recomputed independently.
    pub product_lhs: CertifiedInterval,
    /// `8(ln t)^{3+ε}/t`.
    pub bound: CertifiedInterval,
    /// `product ≤ 8·lacunary` and `product < bound`, both certified.
    pub verified: bool,
    /// `product / ((ln ln n)^{3+ε}/ln n)`, the translated rate against the multiplicative one.
    pub rate_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaReport {
    pub beta_id: usize,
    pub beta: RealSpec,
    pub lacunary_hits: usize,
    pub translated: Vec<TranslatedHit>,
}

impl BetaReport {
    pub fn verified_count(&self) -> usize {
        self.translated.iter().filter(|h| h.verified).count()
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub sequence: InhomSequence,
    pub epsilon: f64,
    pub betas: Vec<BetaReport>,
}

impl PipelineReport {
    /// Fraction of sampled `β` with at least one verified translated hit.
    pub fn covered_fraction(&self) -> f64 {
        self.betas.iter().filter(|b| b.verified_count() > 0).count() as f64 / self.betas.len() as f64
    }

    pub fn hits_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["beta_id", "t", "log2_n", "lacunary_lhs_hi", "product_lhs_hi", "bound", "rate_ratio", "verified"])
            .expect("in-memory csv");
        for b in &self.betas {
            for h in &b.translated {
                w.write_record([
                    b.beta_id.to_string(),
                    h.t.to_string(),
                    (h.n.bits() - 1).to_string(),
                    h.lacunary_lhs.hi_f64().to_string(),
                    h.product_lhs.hi_f64().to_string(),
                    h.bound.mid_f64().to_string(),
                    h.rate_ratio.to_string(),
                    h.verified.to_string(),
                ])
                .expect("in-memory csv");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let per_beta: Vec<serde_json::Value> = self
            .betas
            .iter()
            .map(|b| json!({"beta_id": b.beta_id, "lacunary_hits": b.lacunary_hits, "verified_translated_hits": b.verified_count()}))
            .collect();
        json!({
            "terms": self.sequence.sequence.len(),
            "lambda": self.sequence.lambda,
            "epsilon": self.epsilon,
            "samples": self.betas.len(),
            "covered_fraction": self.covered_fraction(),
            "translated_hits": self.betas.iter().map(|b| b.translated.len()).sum::<usize>(),
            "verified_hits": self.betas.iter().map(BetaReport::verified_count).sum::<usize>(),
            "per_beta": per_beta,
        })
    }
}

/// Re-derives a translated hit at index `t` from scratch.
#[allow(clippy::too_many_arguments)]
pub fn verify_translated(
    n: &BigInt,
    t: usize,
    alpha: &RealSpec,
    gamma: &RealSpec,
    beta: &RealSpec,
    delta: &RealSpec,
    epsilon: f64,
    lacunary: CertifiedInterval,
) -> Result<TranslatedHit> {
    let product = product_lhs(n, alpha, gamma, beta, delta, 96)?;
    let eight = BigRational::from_integer(8.into());
    let bound = threshold_interval(lacunary_threshold(t, epsilon)).scale(&eight);
    let chained = product.hi() <= &(lacunary.hi() * &eight);
    let verified = chained && product.hi() < bound.lo();
    let rate_ratio = product.hi_f64() / multiplicative_threshold(n, epsilon);
    Ok(TranslatedHit {
        t,
        n: n.clone(),
        lacunary_lhs: lacunary,
        product_lhs: product,
        bound,
        verified,
        rate_ratio,
    })
}

/// Builds the inhomogeneous sequence for `(α, γ)` up to `T`, samples `β`, and translates
/// every lacunary hit into a multiplicative one.
#[allow(clippy::too_many_arguments)]
pub fn pipeline(
    alpha: &RealSpec,
    gamma: &RealSpec,
    delta: &RealSpec,
    model: &MeasureModel,
    epsilon: f64,
    t_max: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<PipelineReport> {
    let sequence = build_inhom_sequence(alpha, gamma, t_max, None)?;
    let seq = &sequence.sequence;
    let bits = seq.term(t_max).bits() + DEFAULT_SAMPLE_BITS;
    let betas = sample(model, seed, samples, bits, exec)?;
    let reports = exec.try_map(samples, |i| {
        let beta = &betas[i];
        // the scan is already per-β parallel; keep the inner one sequential
        let scan = lacunary_hits(seq, beta, delta, t_max, epsilon, Execution::Sequential)?;
        let translated = scan
            .hits()
            .map(|r| {
                let t: usize = (&r.index).try_into().expect("small index");
                verify_translated(seq.term(t), t, alpha, gamma, beta, delta, epsilon, r.lhs.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BetaReport {
            beta_id: i,
            beta: beta.clone(),
            lacunary_hits: scan.hit_count(),
            translated,
        })
    })?;
    Ok(PipelineReport {
        sequence,
        epsilon,
        betas: reports,
    })
}
