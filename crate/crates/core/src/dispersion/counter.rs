//! The smoothed counter `C_T(β) = Σ_t Σ_u ω((n_tβ − c + u)/(D/T))` and its Fourier
//! truncation `C_0(β) = (D/T) Σ_{0<|ℓ|≤L} ω̂(Dℓ/T) Σ_t e(ℓ(n_tβ − c))`.
//!
//! By Poisson summation `C_T = D + C_0 + (tail over |ℓ| > L)`, and the tail is at most
//! `E = 2D Σ_{ℓ>L} |ω̂(Dℓ/T)|`. The envelope reported here adds the quadrature and
//! rounding allowances, so `|C_0 + D − C_T| ≤ E` is a checkable statement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::Serialize;

use super::bump::{bump, XI_QUADRATURE_MAX};
use crate::error::{Error, Result};
use crate::kronecker::{dispersion, LacunarySequence, PointBlock};
use crate::realnum::{exact_linear_form, frac_of_multiple, pow2_inv, CertifiedInterval, RealSpec};

/// The block `(T, 2T]` and the derived scales `D = (ln T)^{3+2ε}`, `L = T/(ln T)^{3+ε}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scale {
    pub t: usize,
    pub epsilon: f64,
    pub d: f64,
    pub l: f64,
    /// `D/T`, the bump radius on the circle.
    pub radius: f64,
}

impl Scale {
    pub fn new(t: usize, epsilon: f64) -> Result<Scale> {
        if t < 3 {
            return Err(Error::invalid("block start T must be at least 3"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon must be positive"));
        }
        let lt = (t as f64).ln();
        let d = lt.powf(3.0 + 2.0 * epsilon);
        let l = t as f64 / lt.powf(3.0 + epsilon);
        Ok(Scale {
            t,
            epsilon,
            d,
            l,
            radius: d / t as f64,
        })
    }

    /// Largest frequency kept in `C_0`; zero when `L < 1`.
    pub fn cutoff(&self) -> usize {
        self.l.floor() as usize
    }

    /// `⌈T/D⌉` equally spaced centres; balls of radius `D/T` around them cover the circle.
    pub fn cover(&self) -> Vec<BigRational> {
        let k = (self.t as f64 / self.d).ceil().max(1.0) as i64;
        (0..k).map(|j| BigRational::new(j.into(), k.into())).collect()
    }

    /// The radius as an exact rational, used for exact support decisions.
    pub fn radius_exact(&self) -> BigRational {
        BigRational::from_f64(self.radius).expect("finite radius")
    }
}

/// `{n_tβ mod 1 : T < t ≤ 2T}`, tagged by `t`.
pub fn block_points(seq: &LacunarySequence, beta: &RealSpec, t: usize) -> Result<PointBlock> {
    if seq.len() < 2 * t {
        return Err(Error::invalid(format!("sequence has {} terms, block (T, 2T] needs {}", seq.len(), 2 * t)));
    }
    let tags: Vec<BigInt> = (t + 1..=2 * t).map(BigInt::from).collect();
    let terms = &seq.terms()[t..2 * t];
    if let Some(b) = beta.as_rational() {
        let denom = b.denom().clone();
        let numers = terms
            .iter()
            .map(|n| (n * b.numer()) % &denom)
            .map(|r| if r < BigInt::from(0) { r + &denom } else { r })
            .collect();
        return Ok(PointBlock::from_residues(numers, denom, Some(tags)));
    }
    if let Some(q) = beta.exact() {
        return PointBlock::from_quads(terms.iter().map(|n| q.mul_int(n).frac()).collect(), Some(tags));
    }
    let tol = pow2_inv(96);
    let values = terms.iter().map(|n| frac_of_multiple(beta, n, &tol)).collect::<Result<Vec<_>>>()?;
    PointBlock::from_intervals(values, Some(tags), tol)
}

/// Dispersion of the block `(T, 2T]`.
pub fn block_dispersion(seq: &LacunarySequence, beta: &RealSpec, t: usize) -> Result<CertifiedInterval> {
    Ok(dispersion(&block_points(seq, beta, t)?))
}

/// `y_t = (n_tβ − c) mod 1` for `T < t ≤ 2T`, reduced exactly before rounding to `f64`.
pub fn shifted_offsets(seq: &LacunarySequence, beta: &RealSpec, c: &RealSpec, t: usize) -> Result<Vec<f64>> {
    if seq.len() < 2 * t {
        return Err(Error::invalid(format!("sequence has {} terms, block (T, 2T] needs {}", seq.len(), 2 * t)));
    }
    let terms = &seq.terms()[t..2 * t];
    if let (Some(b), Some(c)) = (beta.as_rational(), c.as_rational()) {
        // common denominator, integer reduction
        let den = b.denom() * c.denom();
        let shift = c.numer() * b.denom();
        return Ok(terms
            .iter()
            .map(|n| {
                let r = num_integer::Integer::mod_floor(&(n * b.numer() * c.denom() - &shift), &den);
                BigRational::new(r, den.clone()).to_f64().unwrap_or(0.0)
            })
            .collect());
    }
    let tol = pow2_inv(80);
    terms
        .iter()
        .map(|n| {
            if let Some(x) = exact_linear_form(n, beta, c) {
                return Ok(x.frac().to_f64());
            }
            let x = beta.enclose_multiple(n, &tol)?.sub(&c.enclose(&tol)?);
            // an enclosure straddling an integer means y is within 2^-79 of 0 mod 1
            Ok(x.frac_mod1().map_or(0.0, |f| f.mid_f64()))
        })
        .collect()
}

/// `Σ_t Σ_u ω((y_t + u)/r)`: each offset meets every integer shift within the radius.
pub fn smoothed_from_offsets(offsets: &[f64], radius: f64) -> f64 {
    let b = bump();
    offsets
        .iter()
        .map(|&y| {
            let lo = (-radius - y).ceil() as i64;
            let hi = (radius - y).floor() as i64;
            (lo..=hi).map(|u| b.eval((y + u as f64) / radius)).sum::<f64>()
        })
        .sum()
}

/// `C_0 + D − C_T`, both sides and the envelope it must respect.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationCheck {
    pub smoothed: f64,
    pub truncated: f64,
    pub d: f64,
    /// `2D Σ_{ℓ>L} |ω̂(Dℓ/T)|`, from quadrature values and the analytic far tail.
    pub tail: f64,
    /// Quadrature and rounding allowance for the two computed sides.
    pub numeric: f64,
}

impl TruncationCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.truncated + self.d - self.smoothed).abs()
    }

    pub fn envelope(&self) -> f64 {
        self.tail + self.numeric
    }

    pub fn holds(&self) -> bool {
        self.discrepancy() <= self.envelope()
    }
}

/// Per-scale table of `ω̂(Dℓ/T)` for `1 ≤ ℓ ≤ L` and the Poisson tail envelope.
#[derive(Clone, Debug)]
pub struct Smoothing {
    pub scale: Scale,
    hat: Vec<f64>,
    hat_err: Vec<f64>,
    tail: f64,
}

impl Smoothing {
    pub fn new(scale: Scale) -> Smoothing {
        let b = bump();
        let r = scale.radius;
        let cutoff = scale.cutoff();
        let (hat, hat_err): (Vec<f64>, Vec<f64>) = (1..=cutoff)
            .map(|l| {
                let f = b.fourier(r * l as f64);
                (f.value, f.err)
            })
            .unzip();
        // Σ_{ℓ>L} |ω̂(rℓ)| by quadrature up to the last ℓ with rℓ ≤ Ξ, then analytically
        let mut near = 0.0;
        let mut l = cutoff + 1;
        while r * l as f64 <= XI_QUADRATURE_MAX {
            let f = b.fourier(r * l as f64);
            near += f.value.abs() + f.err;
            l += 1;
        }
        // Σ_{ℓ≥l} (rℓ)^{-3} ≤ r^{-3}(l^{-3} + l^{-2}/2)
        let lf = l as f64;
        let far = b.third_derivative_l1() / (std::f64::consts::TAU * r).powi(3) * (lf.powi(-3) + 0.5 * lf.powi(-2));
        let tail = 2.0 * scale.d * (near + far);
        Smoothing { scale, hat, hat_err, tail }
    }

    pub fn smoothed(&self, offsets: &[f64]) -> f64 {
        smoothed_from_offsets(offsets, self.scale.radius)
    }

    /// `C_0 = 2r Σ_{1≤ℓ≤L} ω̂(rℓ) Σ_t cos(2πℓy_t)`, real by symmetry of `ω̂`.
    pub fn truncated(&self, offsets: &[f64]) -> f64 {
        let r = self.scale.radius;
        self.hat
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let l = (i + 1) as f64;
                let s: f64 = offsets.iter().map(|&y| (std::f64::consts::TAU * (l * y).fract()).cos()).sum();
                2.0 * r * h * s
            })
            .sum()
    }

    pub fn check(&self, offsets: &[f64]) -> TruncationCheck {
        let eps = f64::EPSILON;
        let r = self.scale.radius;
        let n = offsets.len() as f64;
        let smoothed = self.smoothed(offsets);
        let truncated = self.truncated(offsets);
        // quadrature error of each kept ω̂, plus f64 rounding of both sums
        let hat_part: f64 = self
            .hat
            .iter()
            .zip(&self.hat_err)
            .enumerate()
            .map(|(i, (&h, &e))| 2.0 * r * n * (e + h.abs() * (n + 8.0 + 8.0 * (i + 1) as f64) * eps))
            .sum();
        let terms = n * (2.0 * r + 2.0);
        let smoothed_part = 8.0 * terms * eps * (smoothed.abs() + bump().peak());
        let numeric = hat_part + smoothed_part + 8.0 * eps * self.scale.d;
        TruncationCheck {
            smoothed,
            truncated,
            d: self.scale.d,
            tail: self.tail,
            numeric,
        }
    }
}

/// `C_T(β)` at shift `c`.
pub fn smoothed_count(seq: &LacunarySequence, beta: &RealSpec, c: &RealSpec, scale: &Scale) -> Result<f64> {
    Ok(smoothed_from_offsets(&shifted_offsets(seq, beta, c, scale.t)?, scale.radius))
}

/// `C_0(β)` at shift `c` with the truncation check against `C_T(β)`.
pub fn truncated_count(seq: &LacunarySequence, beta: &RealSpec, c: &RealSpec, scale: &Scale) -> Result<TruncationCheck> {
    let offsets = shifted_offsets(seq, beta, c, scale.t)?;
    Ok(Smoothing::new(*scale).check(&offsets))
}

/// A `t` with `‖n_tβ − c‖ < D/T` whenever `C_T(β) > 0` (the support of `ω`).
pub fn support_witness(offsets: &[f64], radius: f64) -> Option<usize> {
    offsets.iter().position(|&y| y.min(1.0 - y) < radius)
}
