use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, SrvfError};

pub type Rational = Ratio<i128>;

/// Default cap on the fat Cantor level; level `k` has `2^k` intervals.
pub const MAX_CANTOR_LEVEL: u32 = 20;

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational within f64 range")
}

/// Finite union of disjoint closed intervals in `[0, 1]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalSet {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        let zero = Rational::zero();
        let one = Rational::one();
        for (i, (lo, hi)) in intervals.iter().enumerate() {
            if *lo < zero || hi > &one || lo > hi {
                return Err(SrvfError::InvalidArgument(format!(
                    "interval {i} = [{lo}, {hi}] is not inside [0, 1]"
                )));
            }
            if i > 0 && intervals[i - 1].1 >= *lo {
                return Err(SrvfError::InvalidArgument(format!(
                    "intervals {} and {i} overlap or are unsorted",
                    i - 1
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self {
            intervals: vec![(Rational::zero(), Rational::one())],
        }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure, exact.
    pub fn measure(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, (lo, hi)| acc + (hi - lo))
    }

    /// Closure of `[0, 1]` minus the set. Degenerate pieces are dropped, so the
    /// measure of the complement is always `1 - measure`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = Rational::zero();
        for (lo, hi) in &self.intervals {
            if *lo > cursor {
                out.push((cursor, *lo));
            }
            cursor = *hi;
        }
        if cursor < Rational::one() {
            out.push((cursor, Rational::one()));
        }
        IntervalSet { intervals: out }
    }

    /// Every interval widened by `delta` on both sides and clipped to `[0, 1]`.
    /// Fails if two widened intervals would touch.
    pub fn fatten(&self, delta: Rational) -> Result<IntervalSet> {
        if delta < Rational::zero() {
            return Err(SrvfError::InvalidArgument("negative fattening".into()));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        let widened: Vec<(Rational, Rational)> = self
            .intervals
            .iter()
            .map(|(lo, hi)| ((lo - delta).max(zero), (hi + delta).min(one)))
            .collect();
        IntervalSet::new(widened).map_err(|_| {
            SrvfError::InvalidArgument(format!(
                "fattening by {delta} makes neighbouring intervals overlap"
            ))
        })
    }

    /// Smallest gap between consecutive intervals, if there are at least two.
    pub fn min_gap(&self) -> Option<Rational> {
        self.intervals.windows(2).map(|w| w[1].0 - w[0].1).min()
    }

    pub fn contains(&self, t: f64) -> bool {
        let k = self.intervals.partition_point(|(lo, _)| to_f64(lo) <= t);
        k > 0 && t <= to_f64(&self.intervals[k - 1].1)
    }

    /// All endpoints as floats, in order.
    pub fn endpoints_f64(&self) -> Vec<f64> {
        self.intervals
            .iter()
            .flat_map(|(lo, hi)| [to_f64(lo), to_f64(hi)])
            .collect()
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[String; 2]> = self
            .intervals
            .iter()
            .map(|(lo, hi)| [rational_string(lo), rational_string(hi)])
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<[String; 2]> = Vec::deserialize(d)?;
        let intervals = v
            .iter()
            .map(|[lo, hi]| Ok((parse_rational(lo)?, parse_rational(hi)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        IntervalSet::new(intervals).map_err(serde::de::Error::custom)
    }
}

/// `num/den`, always with an explicit denominator.
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `n/d`, an integer, or a plain decimal such as `0.05`, read exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || SrvfError::InvalidArgument(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: i128 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(Rational::new(digits, 10i128.pow(frac.len() as u32)))
}

/// Level-`k` Smith–Volterra–Cantor set: starting from `[0, 1]`, step `j` removes
/// the open middle interval of length `4^{-j}` from each of the `2^{j-1}` current
/// intervals. The measure is `(1 + 2^{-k}) / 2`.
pub fn fat_cantor(k: u32) -> Result<IntervalSet> {
    fat_cantor_capped(k, MAX_CANTOR_LEVEL)
}

pub fn fat_cantor_capped(k: u32, cap: u32) -> Result<IntervalSet> {
    if k == 0 {
        return Err(SrvfError::InvalidArgument(
            "cantor level must be ≥ 1".into(),
        ));
    }
    // denominators grow like 2^{2k+1}; i128 arithmetic stays exact far beyond the cap
    if k > cap || k > 30 {
        return Err(SrvfError::InvalidArgument(format!(
            "cantor level {k} exceeds the exact-arithmetic cap {}",
            cap.min(30)
        )));
    }
    let mut intervals = vec![(Rational::zero(), Rational::one())];
    for j in 1..=k {
        let half_gap = Rational::new(1, 2 * 4i128.pow(j));
        intervals = intervals
            .into_iter()
            .flat_map(|(lo, hi)| {
                let mid = (lo + hi) / 2;
                [(lo, mid - half_gap), (mid + half_gap, hi)]
            })
            .collect();
    }
    IntervalSet::new(intervals)
}
