//! Probability measures on `[0, 1]` with Fourier coefficients `μ̂(ξ) = ∫ e(−ξx) dμ(x)`
//! and seeded sampling.
//!
//! Lebesgue measure has `μ̂(ξ) = 0` for every integer `ξ ≠ 0`. Self-similar Cantor
//! measures are the negative control: for `m = 3` with digits `{0, 2}`,
//! `|μ̂(3^k)|` does not decay. Samples are exact rationals so that downstream
//! dilations `n_t·β` stay certified.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::realnum::{format_rational, RealSpec};

pub const DEFAULT_CANTOR_DEPTH: u32 = 40;

/// Bits of a Lebesgue sample by default: `2^-213 < 10^-64`.
pub const DEFAULT_SAMPLE_BITS: u64 = 213;

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureModel {
    Lebesgue,
    /// Self-similar measure with equal weights on the maps `x ↦ (x + d)/m`.
    Cantor {
        base: u32,
        digits: Vec<u32>,
    },
    /// Point masses `(x, w)` with `x ∈ [0, 1]` and weights summing to 1.
    Atomic(Vec<(BigRational, BigRational)>),
}

impl MeasureModel {
    pub fn cantor(base: u32, mut digits: Vec<u32>) -> Result<MeasureModel> {
        if base < 3 {
            return Err(Error::invalid("Cantor base must be at least 3"));
        }
        digits.sort_unstable();
        let n = digits.len();
        digits.dedup();
        if digits.len() != n {
            return Err(Error::invalid("Cantor digits must be distinct"));
        }
        if digits.len() < 2 || digits.iter().any(|&d| d >= base) {
            return Err(Error::invalid(format!("need at least two digits in 0..{base}")));
        }
        Ok(MeasureModel::Cantor { base, digits })
    }

    pub fn atomic(atoms: Vec<(BigRational, BigRational)>) -> Result<MeasureModel> {
        if atoms.is_empty() {
            return Err(Error::invalid("atomic measure needs at least one atom"));
        }
        let (zero, one) = (BigRational::zero(), BigRational::one());
        if atoms.iter().any(|(x, w)| x < &zero || x > &one || w.is_negative()) {
            return Err(Error::invalid("atoms must lie in [0, 1] with nonnegative weights"));
        }
        let total: BigRational = atoms.iter().map(|(_, w)| w.clone()).fold(zero, |a, b| a + b);
        if total != one {
            return Err(Error::invalid(format!("atom weights sum to {}, not 1", format_rational(&total))));
        }
        Ok(MeasureModel::Atomic(atoms))
    }

    /// Informational decay exponent along the worst frequencies: none claimed for
    /// Lebesgue, 0 for Cantor and atomic measures.
    pub fn nominal_decay(&self) -> Option<f64> {
        match self {
            MeasureModel::Lebesgue => None,
            _ => Some(0.0),
        }
    }
}

impl fmt::Display for MeasureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureModel::Lebesgue => write!(f, "lebesgue"),
            MeasureModel::Cantor { base, digits } => {
                let d: Vec<String> = digits.iter().map(u32::to_string).collect();
                write!(f, "cantor:m={base},digits={}", d.join(";"))
            }
            MeasureModel::Atomic(atoms) => {
                let a: Vec<String> = atoms.iter().map(|(x, w)| format!("{}:{}", format_rational(x), format_rational(w))).collect();
                write!(f, "atomic:{}", a.join(","))
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let x = s.trim().parse::<RealSpec>()?;
    x.as_rational().ok_or_else(|| Error::Parse(format!("expected an exact rational, got {x}")))
}

impl FromStr for MeasureModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<MeasureModel> {
        let s = s.trim();
        if s == "lebesgue" {
            return Ok(MeasureModel::Lebesgue);
        }
        if let Some(rest) = s.strip_prefix("cantor:") {
            let mut base = None;
            let mut digits = None;
            for part in rest.split(',') {
                match part.split_once('=') {
                    Some(("m", v)) => base = Some(v.parse::<u32>().map_err(|_| Error::Parse(format!("bad base {v:?}")))?),
                    Some(("digits", v)) => {
                        digits = Some(
                            v.split(';')
                                .map(|d| d.parse::<u32>().map_err(|_| Error::Parse(format!("bad digit {d:?}"))))
                                .collect::<Result<Vec<_>>>()?,
                        )
                    }
                    _ => return Err(Error::Parse(format!("bad cantor field {part:?}"))),
                }
            }
            let (Some(base), Some(digits)) = (base, digits) else {
                return Err(Error::Parse("cantor needs m=… and digits=…".into()));
            };
            return MeasureModel::cantor(base, digits);
        }
        if let Some(rest) = s.strip_prefix("atomic:") {
            let atoms = rest
                .split(',')
                .map(|a| {
                    let (x, w) = a.split_once(':').ok_or_else(|| Error::Parse(format!("atom {a:?} is not x:w")))?;
                    Ok((parse_rational(x)?, parse_rational(w)?))
                })
                .collect::<Result<Vec<_>>>()?;
            return MeasureModel::atomic(atoms);
        }
        Err(Error::Parse(format!("unknown measure {s:?}")))
    }
}

/// `μ̂(ξ)` with a bound on `|computed − true|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierValue {
    pub value: Complex64,
    pub err: f64,
}

impl FourierValue {
    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }
}

/// `e(−θ)` for `θ = num/den` reduced mod 1 exactly first.
fn phase(num: &BigInt, den: &BigInt) -> Complex64 {
    let r = num.mod_floor(den);
    let theta = BigRational::new(r, den.clone()).to_f64().unwrap_or(0.0);
    Complex64::from_polar(1.0, -TAU * theta)
}

/// Fourier coefficient at integer `ξ`. `depth` is the number of Cantor factors kept.
pub fn fourier_coeff(model: &MeasureModel, xi: i128, depth: u32) -> FourierValue {
    let eps = f64::EPSILON;
    match model {
        MeasureModel::Lebesgue => FourierValue {
            value: Complex64::new(if xi == 0 { 1.0 } else { 0.0 }, 0.0),
            err: 0.0,
        },
        MeasureModel::Atomic(atoms) => {
            let xi = BigInt::from(xi);
            let value: Complex64 = atoms
                .iter()
                .map(|(x, w)| phase(&(&xi * x.numer()), x.denom()) * w.to_f64().unwrap_or(0.0))
                .sum();
            FourierValue {
                value,
                err: 8.0 * eps * atoms.len() as f64,
            }
        }
        MeasureModel::Cantor { base, digits } => {
            if xi == 0 {
                return FourierValue {
                    value: Complex64::new(1.0, 0.0),
                    err: 0.0,
                };
            }
            let m = BigInt::from(*base);
            let xi_big = BigInt::from(xi);
            let weight = 1.0 / digits.len() as f64;
            let mut value = Complex64::new(1.0, 0.0);
            let mut scale = BigInt::one();
            for _ in 0..depth {
                scale *= &m;
                let factor: Complex64 = digits.iter().map(|&d| phase(&(&xi_big * d), &scale)).sum::<Complex64>() * weight;
                value *= factor;
            }
            // the dropped factors form μ̂(ξ/m^depth), within 2π|ξ|/m^depth of 1
            let tail = TAU * (xi.unsigned_abs() as f64) / (*base as f64).powi(depth as i32);
            let rounding = (depth as f64 + 1.0) * (digits.len() as f64 + 4.0) * 4.0 * eps;
            FourierValue {
                value,
                err: tail.min(2.0) + rounding,
            }
        }
    }
}

fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform integer in `[0, 2^bits)`.
fn random_bits(rng: &mut ChaCha8Rng, bits: u64) -> BigInt {
    let words = bits.div_ceil(64) as usize;
    let mut x = BigInt::zero();
    for _ in 0..words {
        x = (x << 64u32) + BigInt::from(rng.random::<u64>());
    }
    x >> (words as u64 * 64 - bits)
}

/// Number of base-`m` digits needed for `m^-depth ≤ 2^-bits`.
pub fn cantor_depth_for_bits(base: u32, bits: u64) -> u64 {
    (bits as f64 / (base as f64).log2()).ceil() as u64 + 1
}

fn sample_one(model: &MeasureModel, seed: u64, index: u64, bits: u64) -> BigRational {
    let mut rng = stream_rng(seed, index);
    match model {
        MeasureModel::Lebesgue => BigRational::new(random_bits(&mut rng, bits), BigInt::one() << bits),
        MeasureModel::Cantor { base, digits } => {
            let depth = cantor_depth_for_bits(*base, bits);
            let m = BigInt::from(*base);
            let mut numer = BigInt::zero();
            for _ in 0..depth {
                let d = digits[rng.random_range(0..digits.len())];
                numer = numer * &m + d;
            }
            BigRational::new(numer, num_traits::pow(m, depth as usize))
        }
        MeasureModel::Atomic(atoms) => {
            let u = BigRational::new(random_bits(&mut rng, 128), BigInt::one() << 128u32);
            let mut acc = BigRational::zero();
            for (x, w) in atoms {
                acc += w;
                if u < acc {
                    return x.clone();
                }
            }
            atoms.iter().rev().find(|(_, w)| !w.is_zero()).expect("weights sum to 1").0.clone()
        }
    }
}

/// `count` exact samples. Sample `i` uses its own ChaCha stream under `seed`, so the result
/// is the same for every execution mode and worker count. `bits` is the resolution:
/// Lebesgue draws are multiples of `2^-bits`, Cantor draws have enough base-`m` digits
/// to pin the point to `2^-bits`.
pub fn sample(model: &MeasureModel, seed: u64, count: usize, bits: u64, exec: Execution) -> Result<Vec<RealSpec>> {
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let bits = bits.max(1);
    Ok(exec.map(count, |i| RealSpec::Rational(sample_one(model, seed, i as u64, bits))))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub xi: i128,
    pub mag: f64,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayProfile {
    pub model: String,
    pub depth: u32,
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `log|μ̂|` against `−log(1 + |ξ|)`.
    pub tau: Option<f64>,
    /// Root-mean-square residual of the fit.
    pub residual: Option<f64>,
    /// Why `tau` is absent.
    pub reason: Option<String>,
    pub fitted_points: usize,
}

impl DecayProfile {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "model": self.model,
            "depth": self.depth,
            "frequencies": self.rows.len(),
            "fitted_points": self.fitted_points,
            "tau_hat": self.tau,
            "residual": self.residual,
            "reason": self.reason,
        })
    }
}

pub fn decay_profile(model: &MeasureModel, frequencies: &[i128], depth: u32) -> Result<DecayProfile> {
    if frequencies.is_empty() {
        return Err(Error::invalid("need at least one frequency"));
    }
    let rows: Vec<DecayRow> = frequencies
        .iter()
        .map(|&xi| {
            let f = fourier_coeff(model, xi, depth);
            DecayRow {
                xi,
                mag: f.magnitude(),
                err: f.err,
            }
        })
        .collect();
    let significant: Vec<&DecayRow> = rows.iter().filter(|r| r.mag > 10.0 * r.err && r.mag > 0.0).collect();
    let any_significant = !significant.is_empty();
    let usable: Vec<(f64, f64)> = significant
        .into_iter()
        .filter(|r| r.xi.unsigned_abs() >= 2)
        .map(|r| (-(1.0 + r.xi.unsigned_abs() as f64).ln(), r.mag.ln()))
        .collect();
    let mut profile = DecayProfile {
        model: model.to_string(),
        depth,
        rows,
        tau: None,
        residual: None,
        reason: None,
        fitted_points: usable.len(),
    };
    if !any_significant {
        profile.reason = Some("all coefficients vanish".into());
        return Ok(profile);
    }
    if usable.len() < 2 {
        profile.reason = Some("fewer than two usable frequencies with |xi| >= 2".into());
        return Ok(profile);
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        profile.reason = Some("all usable frequencies have the same magnitude".into());
        return Ok(profile);
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = usable.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    profile.tau = Some(slope);
    profile.residual = Some((rss / n).sqrt());
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cantor() -> MeasureModel {
        "cantor:m=3,digits=0;2".parse().unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "lebesgue",
            "cantor:m=3,digits=0;2",
            "cantor:m=5,digits=0;2;4",
            "atomic:1/4:1/2,3/4:1/2",
            "atomic:0:1",
        ] {
            let m: MeasureModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        for bad in [
            "cantor:m=2,digits=0;1",
            "cantor:m=3,digits=0",
            "cantor:m=3,digits=0;0",
            "atomic:1/2:1/2",
            "atomic:2:1",
            "gauss",
        ] {
            assert!(bad.parse::<MeasureModel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn lebesgue_and_dirac() {
        let l = MeasureModel::Lebesgue;
        assert_eq!(fourier_coeff(&l, 5, 0).magnitude(), 0.0);
        assert_eq!(fourier_coeff(&l, 0, 0).value, Complex64::new(1.0, 0.0));
        let d: MeasureModel = "atomic:0:1".parse().unwrap();
        for xi in [-7, 0, 1, 1000] {
            assert!((fourier_coeff(&d, xi, 0).magnitude() - 1.0).abs() < 1e-15);
        }
        // half-integer atoms: μ̂(ξ) = (1 + (−1)^ξ)/2
        let h: MeasureModel = "atomic:0:1/2,1/2:1/2".parse().unwrap();
        assert!(fourier_coeff(&h, 1, 0).magnitude() < 1e-15);
        assert!((fourier_coeff(&h, 2, 0).magnitude() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cantor_is_not_rajchman() {
        let m = cantor();
        // |μ̂(1)| = Π |cos(2π/3^j)| from the closed form of each factor
        let closed: f64 = (1..60).map(|j| (TAU / 3f64.powi(j)).cos().abs()).product();
        let base = fourier_coeff(&m, 1, 40);
        assert!((base.magnitude() - closed).abs() < 1e-12, "{} vs {closed}", base.magnitude());
        assert!((closed - 0.3705).abs() < 1e-3);
        for k in 0..=12 {
            let f = fourier_coeff(&m, 3i128.pow(k), 40);
            assert!((f.magnitude() - base.magnitude()).abs() < 1e-9, "k = {k}");
            assert!(f.err < 1e-9);
        }
    }

    #[test]
    fn cantor_matches_two_point_closed_form() {
        // each factor (1 + e(−2ξ/3^j))/2 has modulus |cos(2πξ/3^j)|
        let m = cantor();
        for xi in [2i128, 5, 7, 10, 100, 1234] {
            let closed: f64 = (1..60).map(|j| (TAU * xi as f64 / 3f64.powi(j)).cos().abs()).product();
            assert!((fourier_coeff(&m, xi, 40).magnitude() - closed).abs() < 1e-10, "xi = {xi}");
        }
    }

    #[test]
    fn decay_examples() {
        let xs: Vec<i128> = (1..=100).collect();
        let p = decay_profile(&MeasureModel::Lebesgue, &xs, 40).unwrap();
        assert_eq!(p.tau, None);
        assert_eq!(p.reason.as_deref(), Some("all coefficients vanish"));
        let pow3: Vec<i128> = (0..=12).map(|k| 3i128.pow(k)).collect();
        let p = decay_profile(&cantor(), &pow3, 40).unwrap();
        assert!(p.tau.unwrap().abs() < 1e-8, "{:?}", p.tau);
        let p = decay_profile(&"atomic:0:1".parse().unwrap(), &xs, 40).unwrap();
        assert!(p.tau.unwrap().abs() < 1e-12);
        let csv = p.to_csv();
        assert!(csv.starts_with("xi,mag,err\n1,"));
        assert!(decay_profile(&MeasureModel::Lebesgue, &[], 40).is_err());
    }

    #[test]
    fn sampling_examples() {
        let a: MeasureModel = "atomic:1/4:1".parse().unwrap();
        let s = sample(&a, 7, 3, 64, Execution::default()).unwrap();
        assert!(s.iter().all(|x| x == &RealSpec::rational(1, 4)));
        let l1 = sample(&MeasureModel::Lebesgue, 42, 2, DEFAULT_SAMPLE_BITS, Execution::Sequential).unwrap();
        let l2 = sample(&MeasureModel::Lebesgue, 42, 2, DEFAULT_SAMPLE_BITS, Execution::Parallel).unwrap();
        assert_eq!(l1, l2);
        assert_ne!(l1[0], l1[1]);
        // prefix stability: the first draws do not depend on the count
        assert_eq!(
            sample(&MeasureModel::Lebesgue, 42, 5, DEFAULT_SAMPLE_BITS, Execution::Parallel).unwrap()[..2],
            l1[..]
        );
        let c = sample(&cantor(), 1, 20, 100, Execution::default()).unwrap();
        for x in c {
            let RealSpec::Rational(r) = x else { panic!() };
            let depth = cantor_depth_for_bits(3, 100);
            // numerator over 3^depth
            let mut n = r.numer() * (num_traits::pow(BigInt::from(3), depth as usize) / r.denom());
            for _ in 0..depth {
                let (qt, d) = n.div_mod_floor(&BigInt::from(3));
                assert_ne!(d, BigInt::one());
                n = qt;
            }
        }
    }

    #[test]
    fn lebesgue_samples_equidistribute() {
        let s = sample(&MeasureModel::Lebesgue, 2024, 100_000, 64, Execution::default()).unwrap();
        let sum: Complex64 = s.iter().map(|x| Complex64::from_polar(1.0, -TAU * x.to_f64())).sum();
        assert!(sum.norm() / 1e5 <= 0.02);
    }

    proptest! {
        #[test]
        fn coefficient_properties(xi in -5000i128..5000, which in 0usize..4) {
            let models = [MeasureModel::Lebesgue, cantor(), "cantor:m=5,digits=1;3;4".parse().unwrap(), MeasureModel::atomic(vec![(q(1, 3), q(1, 2)), (q(5, 7), q(1, 2))]).unwrap()];
            let m = &models[which];
            let f = fourier_coeff(m, xi, 40);
            prop_assert!(f.magnitude() <= 1.0 + f.err);
            let g = fourier_coeff(m, -xi, 40);
            prop_assert!((f.value - g.value.conj()).norm() <= f.err + g.err + 1e-15);
            prop_assert_eq!(fourier_coeff(m, 0, 40).value, Complex64::new(1.0, 0.0));
        }
    }
}
