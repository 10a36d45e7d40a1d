use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::realnum::{frac_of_multiple, CertifiedInterval, Quad, RealSpec};

/// Points of a block, in the cheapest representation that keeps them exact.
#[derive(Clone, Debug, PartialEq)]
enum Points {
    /// `numer / denom` with `0 ≤ numer < denom`, sorted ascending.
    Rational { numers: Vec<BigInt>, denom: BigInt },
    /// Exact elements of one quadratic field, sorted ascending.
    Quadratic(Vec<Quad>),
    /// Certified enclosures, pairwise ordered (or identical points), sorted ascending.
    Intervals(Vec<CertifiedInterval>),
}

/// A finite multiset of points in `[0, 1)`, kept sorted. Gap computations use the
/// wrap convention `a_{T+1} = a_1 + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointBlock {
    points: Points,
    tags: Option<Vec<BigInt>>,
    tolerance: BigRational,
}

fn check_unit(x: &BigRational) -> Result<()> {
    if x < &BigRational::zero() || x >= &BigRational::one() {
        return Err(Error::invalid(format!("point {x} outside [0, 1)")));
    }
    Ok(())
}

impl PointBlock {
    /// Block of exact rationals in `[0, 1)`.
    pub fn from_rationals(values: &[BigRational]) -> Result<PointBlock> {
        if values.is_empty() {
            return Err(Error::invalid("a point block needs at least one point"));
        }
        values.iter().try_for_each(check_unit)?;
        let denom = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numers = values.iter().map(|v| v.numer() * (&denom / v.denom())).collect();
        Ok(PointBlock::from_residues(numers, denom, None))
    }

    /// Block `{numer_i / denom}`; numerators are reduced mod `denom` and sorted.
    pub fn from_residues(mut numers: Vec<BigInt>, denom: BigInt, tags: Option<Vec<BigInt>>) -> PointBlock {
        for x in numers.iter_mut() {
            *x = x.mod_floor(&denom);
        }
        let (numers, tags) = sort_tagged(numers, tags, |a, b| a.cmp(b));
        PointBlock {
            points: Points::Rational { numers, denom },
            tags,
            tolerance: BigRational::zero(),
        }
    }

    /// Block of exact values from a common quadratic field, each in `[0, 1)`.
    pub fn from_quads(values: Vec<Quad>, tags: Option<Vec<BigInt>>) -> Result<PointBlock> {
        if values.is_empty() {
            return Err(Error::invalid("a point block needs at least one point"));
        }
        if let Some(r) = values.iter().find(|v| !v.compatible(&values[0])) {
            return Err(Error::invalid(format!("{r} is not in the field of {}", values[0])));
        }
        if values.iter().all(Quad::is_rational) {
            let rats: Vec<BigRational> = values.iter().map(|v| v.as_rational().unwrap()).collect();
            rats.iter().try_for_each(check_unit)?;
            let denom = rats.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let numers = rats.iter().map(|v| v.numer() * (&denom / v.denom())).collect();
            return Ok(PointBlock::from_residues(numers, denom, tags));
        }
        let (values, tags) = sort_tagged(values, tags, |a, b| a.checked_cmp(b).expect("same field"));
        Ok(PointBlock {
            points: Points::Quadratic(values),
            tags,
            tolerance: BigRational::zero(),
        })
    }

    /// Block of certified enclosures. Errors if two points cannot be ordered.
    pub fn from_intervals(values: Vec<CertifiedInterval>, tags: Option<Vec<BigInt>>, tolerance: BigRational) -> Result<PointBlock> {
        if values.is_empty() {
            return Err(Error::invalid("a point block needs at least one point"));
        }
        let (values, tags) = sort_tagged(values, tags, |a, b| a.lo().cmp(b.lo()).then_with(|| a.hi().cmp(b.hi())));
        for w in values.windows(2) {
            let ordered = w[0].hi() <= w[1].lo() || (w[0].is_point() && w[0] == w[1]);
            if !ordered {
                return Err(Error::precision(format!("points {} and {} cannot be ordered", w[0], w[1])));
            }
        }
        Ok(PointBlock {
            points: Points::Intervals(values),
            tags,
            tolerance,
        })
    }

    pub fn len(&self) -> usize {
        match &self.points {
            Points::Rational { numers, .. } => numers.len(),
            Points::Quadratic(v) => v.len(),
            Points::Intervals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.points, Points::Intervals(_))
    }

    pub fn tags(&self) -> Option<&[BigInt]> {
        self.tags.as_deref()
    }

    /// Common certification tolerance of the points (zero for exact blocks).
    pub fn tolerance(&self) -> &BigRational {
        &self.tolerance
    }

    /// The sorted points as enclosures; quadratic points are enclosed at `tol`.
    pub fn intervals(&self, tol: &BigRational) -> Vec<CertifiedInterval> {
        match &self.points {
            Points::Rational { numers, denom } => numers
                .iter()
                .map(|n| CertifiedInterval::point(BigRational::new(n.clone(), denom.clone())))
                .collect(),
            Points::Quadratic(v) => v.iter().map(|q| q.enclose(tol)).collect(),
            Points::Intervals(v) => v.clone(),
        }
    }

    /// Midpoint estimates in `[0, 1)`, for fast non-certified statistics.
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.points {
            Points::Rational { numers, denom } => {
                let shift = denom.bits().saturating_sub(60);
                let d = num_traits::ToPrimitive::to_f64(&(denom >> shift)).unwrap();
                numers.iter().map(|n| num_traits::ToPrimitive::to_f64(&(n >> shift)).unwrap() / d).collect()
            }
            Points::Quadratic(v) => v.iter().map(Quad::to_f64).collect(),
            Points::Intervals(v) => v.iter().map(CertifiedInterval::mid_f64).collect(),
        }
    }

    /// Gap lengths `a_{i+1} − a_i` over distinct points, wrap gap last.
    fn gaps(&self) -> Vec<GapLength> {
        match &self.points {
            Points::Rational { numers, denom } => {
                let mut distinct = numers.clone();
                distinct.dedup();
                let n = distinct.len();
                (0..n)
                    .map(|i| {
                        let next = if i + 1 < n { distinct[i + 1].clone() } else { &distinct[0] + denom };
                        GapLength::Exact(Quad::from_rational(&BigRational::new(next - &distinct[i], denom.clone())))
                    })
                    .collect()
            }
            Points::Quadratic(v) => {
                let mut distinct = v.clone();
                distinct.dedup();
                let n = distinct.len();
                (0..n)
                    .map(|i| {
                        let next = if i + 1 < n {
                            distinct[i + 1].clone()
                        } else {
                            distinct[0].add_int(&BigInt::one())
                        };
                        GapLength::Exact(next.checked_sub(&distinct[i]).expect("same field"))
                    })
                    .collect()
            }
            Points::Intervals(v) => {
                let mut distinct = v.clone();
                distinct.dedup_by(|a, b| a.is_point() && a == b);
                let n = distinct.len();
                let one = CertifiedInterval::point(BigRational::one());
                (0..n)
                    .map(|i| {
                        let next = if i + 1 < n { distinct[i + 1].clone() } else { distinct[0].add(&one) };
                        let g = next.sub(&distinct[i]);
                        let lo = g.lo().clone().max(BigRational::zero());
                        GapLength::Interval(CertifiedInterval::new(lo, g.hi().clone()))
                    })
                    .collect()
            }
        }
    }
}

fn sort_tagged<T, F>(values: Vec<T>, tags: Option<Vec<BigInt>>, cmp: F) -> (Vec<T>, Option<Vec<BigInt>>)
where
    F: Fn(&T, &T) -> Ordering,
{
    match tags {
        None => {
            let mut v = values;
            v.sort_by(&cmp);
            (v, None)
        }
        Some(t) => {
            assert_eq!(t.len(), values.len(), "one tag per point");
            let mut pairs: Vec<(T, BigInt)> = values.into_iter().zip(t).collect();
            pairs.sort_by(|a, b| cmp(&a.0, &b.0).then_with(|| a.1.cmp(&b.1)));
            let (v, t) = pairs.into_iter().unzip();
            (v, Some(t))
        }
    }
}

#[derive(Clone, Debug)]
enum GapLength {
    Exact(Quad),
    Interval(CertifiedInterval),
}

impl GapLength {
    fn same(&self, other: &GapLength) -> bool {
        match (self, other) {
            (GapLength::Exact(a), GapLength::Exact(b)) => a == b,
            (a, b) => a.enclosure().overlaps(&b.enclosure()),
        }
    }

    fn cmp(&self, other: &GapLength) -> Ordering {
        match (self, other) {
            (GapLength::Exact(a), GapLength::Exact(b)) => a.checked_cmp(b).expect("same field"),
            (a, b) => a.enclosure().lo().cmp(b.enclosure().lo()),
        }
    }

    fn enclosure(&self) -> CertifiedInterval {
        match self {
            GapLength::Exact(q) => q.enclose(&BigRational::new(BigInt::one(), BigInt::one() << 128u32)),
            GapLength::Interval(iv) => iv.clone(),
        }
    }
}

/// One distinct gap length and how often it occurs.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    pub length: CertifiedInterval,
    /// Present when the length is known exactly.
    pub exact: Option<Quad>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    /// Distinct lengths in ascending order.
    pub gaps: Vec<Gap>,
    pub dispersion: CertifiedInterval,
    pub dispersion_exact: Option<Quad>,
}

impl GapReport {
    pub fn distinct_count(&self) -> usize {
        self.gaps.len()
    }

    /// Sum of multiplicities: the number of distinct points in the block.
    pub fn point_count(&self) -> usize {
        self.gaps.iter().map(|g| g.multiplicity).sum()
    }
}

/// Distinct gap lengths with multiplicities, plus the dispersion (largest gap
/// including the wrap gap). Coincident points are collapsed first; a block with a
/// single distinct point has one gap of length 1.
pub fn gap_report(block: &PointBlock) -> GapReport {
    let tol = if block.tolerance.is_zero() {
        BigRational::new(BigInt::one(), BigInt::one() << 128u32)
    } else {
        block.tolerance.clone()
    };
    let mut gaps = block.gaps();
    gaps.sort_by(|a, b| a.cmp(b));
    let mut grouped: Vec<(GapLength, usize)> = Vec::new();
    for g in gaps {
        match grouped.last_mut() {
            Some((last, count)) if last.same(&g) => *count += 1,
            _ => grouped.push((g, 1)),
        }
    }
    let out: Vec<Gap> = grouped
        .into_iter()
        .map(|(g, m)| match g {
            GapLength::Exact(q) => Gap {
                length: q.enclose(&tol),
                exact: Some(q),
                multiplicity: m,
            },
            GapLength::Interval(iv) => Gap {
                length: iv,
                exact: None,
                multiplicity: m,
            },
        })
        .collect();
    let (dispersion, dispersion_exact) = match block.gaps().into_iter().max_by(|a, b| match (a, b) {
        (GapLength::Exact(x), GapLength::Exact(y)) => x.checked_cmp(y).expect("same field"),
        (x, y) => x.enclosure().hi().cmp(y.enclosure().hi()),
    }) {
        Some(GapLength::Exact(q)) => (q.enclose(&tol), Some(q)),
        Some(GapLength::Interval(_)) => {
            // largest gap of enclosures: max of lower ends to max of upper ends
            let all: Vec<CertifiedInterval> = block.gaps().iter().map(GapLength::enclosure).collect();
            let lo = all.iter().map(|g| g.lo()).max().unwrap().clone();
            let hi = all.iter().map(|g| g.hi()).max().unwrap().clone();
            (CertifiedInterval::new(lo, hi), None)
        }
        None => unreachable!("blocks are nonempty"),
    };
    GapReport {
        gaps: out,
        dispersion,
        dispersion_exact,
    }
}

/// Dispersion of a block: the largest gap, wrap gap included.
pub fn dispersion(block: &PointBlock) -> CertifiedInterval {
    if let Points::Rational { numers, denom } = &block.points {
        // sorted residues: the largest difference, wrap included, over a common denominator
        let wrap = &numers[0] + denom - numers.last().unwrap();
        let widest = numers.windows(2).map(|w| &w[1] - &w[0]).max().map_or(wrap.clone(), |m| m.max(wrap));
        return CertifiedInterval::point(BigRational::new(widest, denom.clone()));
    }
    gap_report(block).dispersion
}

/// The orbit `{nα mod 1 : 1 ≤ n ≤ N}`, tagged by `n`.
pub fn orbit_block(alpha: &RealSpec, count: usize, tol: &BigRational) -> Result<PointBlock> {
    if count < 2 {
        return Err(Error::invalid("an orbit block needs N ≥ 2"));
    }
    let tags: Vec<BigInt> = (1..=count).map(BigInt::from).collect();
    match alpha.exact() {
        Some(a) => {
            let values = tags.iter().map(|n| a.mul_int(n).frac()).collect();
            PointBlock::from_quads(values, Some(tags))
        }
        None => {
            let values = tags.iter().map(|n| frac_of_multiple(alpha, n, tol)).collect::<Result<Vec<_>>>()?;
            PointBlock::from_intervals(values, Some(tags), tol.clone())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeDistanceReport {
    pub n: usize,
    pub distinct_count: usize,
    pub at_most_three: bool,
    /// When three lengths occur, whether the largest is the sum of the other two;
    /// vacuously true otherwise.
    pub largest_is_sum: bool,
    pub gaps: Vec<Gap>,
}

impl ThreeDistanceReport {
    pub fn holds(&self) -> bool {
        self.at_most_three && self.largest_is_sum
    }
}

pub fn three_distance_check(alpha: &RealSpec, count: usize, tol: &BigRational) -> Result<ThreeDistanceReport> {
    let block = orbit_block(alpha, count, tol)?;
    let report = gap_report(&block);
    let k = report.distinct_count();
    let largest_is_sum = if k == 3 {
        let g = &report.gaps;
        match (&g[0].exact, &g[1].exact, &g[2].exact) {
            (Some(a), Some(b), Some(c)) => a.checked_add(b).expect("same field") == *c,
            _ => g[0].length.add(&g[1].length).overlaps(&g[2].length),
        }
    } else {
        true
    };
    Ok(ThreeDistanceReport {
        n: count,
        distinct_count: k,
        at_most_three: k <= 3,
        largest_is_sum,
        gaps: report.gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realnum::pow10_inv;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn exact_lengths(r: &GapReport) -> Vec<(BigRational, usize)> {
        r.gaps
            .iter()
            .map(|g| (g.exact.as_ref().unwrap().as_rational().unwrap(), g.multiplicity))
            .collect()
    }

    #[test]
    fn rational_orbits() {
        let b = orbit_block(&RealSpec::rational(3, 8), 3, &pow10_inv(10)).unwrap();
        let pts: Vec<_> = b.intervals(&pow10_inv(10)).iter().map(|p| p.lo().clone()).collect();
        assert_eq!(pts, vec![q(1, 8), q(3, 8), q(3, 4)]);
        assert_eq!(b.tags().unwrap(), &[BigInt::from(3), BigInt::from(1), BigInt::from(2)]);

        // n·3/8 mod 1 for n = 1..8 runs through all eighths, 0 included
        let b = orbit_block(&RealSpec::rational(3, 8), 8, &pow10_inv(10)).unwrap();
        let pts: Vec<_> = b.intervals(&pow10_inv(10)).iter().map(|p| p.lo().clone()).collect();
        assert_eq!(pts, (0..8).map(|k| q(k, 8)).collect::<Vec<_>>());
    }

    #[test]
    fn golden_orbit_is_distinct() {
        let b = orbit_block(&RealSpec::golden_conjugate(), 5, &pow10_inv(30)).unwrap();
        assert_eq!(b.len(), 5);
        let ivs = b.intervals(&pow10_inv(30));
        assert!(ivs.windows(2).all(|w| w[0].hi() < w[1].lo()));
    }

    #[test]
    fn gap_report_examples() {
        let b = PointBlock::from_rationals(&[q(0, 1), q(1, 4), q(1, 2), q(3, 4)]).unwrap();
        let r = gap_report(&b);
        assert_eq!(exact_lengths(&r), vec![(q(1, 4), 4)]);
        assert_eq!(r.dispersion, CertifiedInterval::point(q(1, 4)));

        let b = PointBlock::from_rationals(&[q(1, 10), q(2, 10), q(7, 10)]).unwrap();
        let r = gap_report(&b);
        assert_eq!(exact_lengths(&r), vec![(q(1, 10), 1), (q(4, 10), 1), (q(1, 2), 1)]);
        assert_eq!(r.dispersion, CertifiedInterval::point(q(1, 2)));

        // (1/8, 3/8, 3/4): gaps 1/4, 3/8, and wrap 1/8 + 1/4 = 3/8
        let b = orbit_block(&RealSpec::rational(3, 8), 3, &pow10_inv(10)).unwrap();
        let r = gap_report(&b);
        assert_eq!(exact_lengths(&r), vec![(q(1, 4), 1), (q(3, 8), 2)]);
        assert_eq!(r.dispersion, CertifiedInterval::point(q(3, 8)));
    }

    #[test]
    fn multiset_collapse() {
        let b = PointBlock::from_rationals(&[q(1, 3), q(1, 3), q(1, 3)]).unwrap();
        let r = gap_report(&b);
        assert_eq!(r.dispersion, CertifiedInterval::point(q(1, 1)));
        assert_eq!(r.point_count(), 1);
        let b = PointBlock::from_rationals(&[q(0, 1), q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(dispersion(&b), CertifiedInterval::point(q(1, 2)));
    }

    #[test]
    fn three_distance_examples() {
        let t = pow10_inv(30);
        let r = three_distance_check(&RealSpec::silver_conjugate(), 10, &t).unwrap();
        assert!(r.holds());
        let r = three_distance_check(&RealSpec::golden_conjugate(), 7, &t).unwrap();
        assert!(r.holds());
        let r = three_distance_check(&RealSpec::rational(3, 8), 3, &t).unwrap();
        assert_eq!(r.distinct_count, 2);
        assert!(r.holds());
    }

    #[test]
    fn budgeted_orbit_uses_intervals() {
        let alpha: RealSpec = "0.41421356237309504880168872420969807856967@40".parse().unwrap();
        let t = pow10_inv(25);
        let r = three_distance_check(&alpha, 50, &t).unwrap();
        assert!(r.holds());
        assert!(r.gaps.iter().all(|g| g.exact.is_none()));
        let exact = three_distance_check(&RealSpec::silver_conjugate(), 50, &t).unwrap();
        assert_eq!(r.distinct_count, exact.distinct_count);
    }

    #[test]
    fn unorderable_points_error() {
        let alpha: RealSpec = "0.4142@4".parse().unwrap();
        let err = orbit_block(&alpha, 2000, &pow10_inv(1)).unwrap_err();
        assert!(matches!(err, Error::InsufficientPrecision(_)));
    }
}
