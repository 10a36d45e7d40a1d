//! Monte-Carlo surveys over sampled `β`: block dispersion, the smoothed counter on a
//! cover of the circle, and moments of the truncated counter.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use super::counter::{block_dispersion, shifted_offsets, Scale, Smoothing};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::kronecker::LacunarySequence;
use crate::measures::{sample, MeasureModel, DEFAULT_SAMPLE_BITS};
use crate::realnum::{format_decimal, linear_form_dist, pow2_inv, CertifiedInterval, RealSpec};

/// Sample resolution that keeps `n_tβ mod 1` meaningful up to `t = 2T`: the bit length
/// of `n_{2T}` plus the default sample precision.
pub fn sample_bits_for(seq: &LacunarySequence, t_max: usize) -> Result<u64> {
    if seq.len() < 2 * t_max {
        return Err(Error::invalid(format!("sequence has {} terms, {} needed", seq.len(), 2 * t_max)));
    }
    Ok(seq.term(2 * t_max).bits() + DEFAULT_SAMPLE_BITS)
}

/// `count` draws from `model` at the resolution needed for blocks up to `(t_max, 2t_max]`.
pub fn sample_betas(model: &MeasureModel, seq: &LacunarySequence, t_max: usize, count: usize, seed: u64, exec: Execution) -> Result<Vec<RealSpec>> {
    sample(model, seed, count, sample_bits_for(seq, t_max)?, exec)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurveyRecord {
    pub beta_id: usize,
    pub beta: RealSpec,
    pub dispersion: CertifiedInterval,
    /// `C_{T,c}(β)` for each centre of the cover.
    pub counts: Vec<f64>,
    /// Some cover ball holds no block point, i.e. `min_c C_{T,c}(β) = 0`. Decided exactly.
    pub deficient: bool,
    /// Some `|C_{T,c}(β) − D| > D/2`.
    pub concentration_violation: bool,
}

impl SurveyRecord {
    pub fn min_count(&self) -> f64 {
        self.counts.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `disp·T/(ln T)^{3+2ε}`, an upper value from the dispersion enclosure.
    pub fn normalized_dispersion(&self, scale: &Scale) -> f64 {
        self.dispersion.hi_f64() * scale.t as f64 / scale.d
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionSurvey {
    pub scale: Scale,
    pub cover: Vec<BigRational>,
    pub records: Vec<SurveyRecord>,
}

fn beta_repr(beta: &RealSpec) -> String {
    match beta.as_rational() {
        Some(r) if r.denom().bits() > 64 => format_decimal(&r, 30),
        _ => beta.to_string(),
    }
}

impl DispersionSurvey {
    pub fn deficiency_fraction(&self) -> f64 {
        self.records.iter().filter(|r| r.deficient).count() as f64 / self.records.len() as f64
    }

    pub fn concentration_violation_fraction(&self) -> f64 {
        self.records.iter().filter(|r| r.concentration_violation).count() as f64 / self.records.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "beta_id",
            "beta_repr",
            "T",
            "epsilon",
            "disp_lo",
            "disp_hi",
            "min_CT_over_cover",
            "deficiency_flag",
        ])
        .expect("in-memory csv");
        for r in &self.records {
            w.write_record([
                r.beta_id.to_string(),
                beta_repr(&r.beta),
                self.scale.t.to_string(),
                self.scale.epsilon.to_string(),
                r.dispersion.lo_f64().to_string(),
                r.dispersion.hi_f64().to_string(),
                r.min_count().to_string(),
                r.deficient.to_string(),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let normalized: Vec<f64> = self.records.iter().map(|r| r.normalized_dispersion(&self.scale)).collect();
        json!({
            "T": self.scale.t,
            "epsilon": self.scale.epsilon,
            "D": self.scale.d,
            "L": self.scale.l,
            "radius": self.scale.radius,
            "cover_size": self.cover.len(),
            "samples": self.records.len(),
            "deficiency_fraction": self.deficiency_fraction(),
            "concentration_violation_fraction": self.concentration_violation_fraction(),
            "max_normalized_dispersion": normalized.iter().copied().fold(0.0, f64::max),
        })
    }
}

/// Whether some `t` in the block has `‖n_tβ − c‖ < r`. The `f64` offsets decide
/// unless they land within `10^-12` of the radius; then the enclosure decides.
fn ball_is_hit(seq: &LacunarySequence, beta: &RealSpec, c: &RealSpec, t: usize, offsets: &[f64], radius: &BigRational, radius_f: f64) -> Result<bool> {
    let mut unsure = Vec::new();
    for (i, &y) in offsets.iter().enumerate() {
        let dist = y.min(1.0 - y);
        if dist < radius_f - 1e-12 {
            return Ok(true);
        }
        if dist <= radius_f + 1e-12 {
            unsure.push(i);
        }
    }
    let tol = pow2_inv(120);
    for i in unsure {
        let n: &BigInt = seq.term(t + 1 + i);
        let d = linear_form_dist(n, beta, c, &tol)?;
        if d.hi() < radius {
            return Ok(true);
        }
        if d.lo() < radius {
            return Err(Error::precision(format!("‖n_tβ − c‖ at t = {} is within 2^-120 of the radius", t + 1 + i)));
        }
    }
    Ok(false)
}

/// Evaluates the block dispersion and `C_{T,c}(β)` on the cover for every `β`.
/// Records come back in input order.
pub fn concentration_survey(seq: &LacunarySequence, betas: &[RealSpec], scale: &Scale, exec: Execution) -> Result<DispersionSurvey> {
    if betas.is_empty() {
        return Err(Error::invalid("survey needs at least one sample"));
    }
    let cover = scale.cover();
    let centres: Vec<RealSpec> = cover.iter().cloned().map(RealSpec::Rational).collect();
    let radius = scale.radius_exact();
    let smoothing = Smoothing::new(*scale);
    let records = exec.try_map(betas.len(), |i| {
        let beta = &betas[i];
        let dispersion = block_dispersion(seq, beta, scale.t)?;
        let mut counts = Vec::with_capacity(centres.len());
        let mut deficient = false;
        for c in &centres {
            let offsets = shifted_offsets(seq, beta, c, scale.t)?;
            counts.push(smoothing.smoothed(&offsets));
            if !ball_is_hit(seq, beta, c, scale.t, &offsets, &radius, scale.radius)? {
                deficient = true;
            }
        }
        let concentration_violation = counts.iter().any(|&v| (v - scale.d).abs() > scale.d / 2.0);
        Ok(SurveyRecord {
            beta_id: i,
            beta: beta.clone(),
            dispersion,
            counts,
            deficient,
            concentration_violation,
        })
    })?;
    Ok(DispersionSurvey { scale: *scale, cover, records })
}

/// Monte-Carlo estimate of `∫|C_0(β)|^{2s} dμ(β)`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MomentEstimate {
    pub s: u32,
    pub samples: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `|C_0(β)|^{2s}` per sample, in sample order.
    pub values: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn moment_estimate(
    seq: &LacunarySequence,
    model: &MeasureModel,
    s: u32,
    scale: &Scale,
    c: &RealSpec,
    count: usize,
    seed: u64,
    exec: Execution,
) -> Result<MomentEstimate> {
    if s == 0 {
        return Err(Error::invalid("s must be positive"));
    }
    let betas = sample_betas(model, seq, scale.t, count, seed, exec)?;
    let smoothing = Smoothing::new(*scale);
    let values = exec.try_map(count, |i| {
        let offsets = shifted_offsets(seq, &betas[i], c, scale.t)?;
        Ok::<f64, Error>(smoothing.truncated(&offsets).abs().powi(2 * s as i32))
    })?;
    let n = count as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if count > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(MomentEstimate {
        s,
        samples: count,
        mean,
        std_error: (var / n).sqrt(),
        values,
    })
}
