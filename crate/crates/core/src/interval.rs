//! Closed intervals of naturals, the ratio `μ([a, b]) = b/a`, m-interval
//! classification, canonical tilings, and normalized interval unions.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// The closed interval `[a, b] = {n : a ≤ n ≤ b}` with `1 ≤ a ≤ b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    a: u64,
    b: u64,
}

/// Which interval predicate matched first (m-interval is tested first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalClass {
    MInterval,
    PlusM,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub label: IntervalClass,
    /// `m·a − 1 < b ≤ m·a`
    pub m_interval: bool,
    /// `b/a > m`
    pub plus_m: bool,
}

impl Interval {
    pub fn new(a: u64, b: u64) -> Result<Interval> {
        if a == 0 || a > b {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `‖I‖ = b − a + 1`
    pub fn len(&self) -> u64 {
        self.b - self.a + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: u64) -> bool {
        self.a <= n && n <= self.b
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let a = self.a.max(other.a);
        let b = self.b.min(other.b);
        (a <= b).then_some(Interval { a, b })
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.intersect(other).is_some()
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.a..=self.b
    }

    /// `μ(I) = b/a`
    pub fn mu(&self) -> Rat {
        Rat::new(self.b as i128, self.a as i128).expect("a >= 1")
    }

    /// Decides both interval predicates exactly for `m > 1`.
    pub fn classify(&self, m: Rat) -> Result<Classification> {
        let m = m.require_gt_one("m")?;
        let (n, d) = (m.numer(), m.denom());
        let (a, b) = (self.a as i128, self.b as i128);
        let ma = n.checked_mul(a).ok_or(Error::Overflow("m * a"))?;
        let bd = b.checked_mul(d).ok_or(Error::Overflow("b * den(m)"))?;
        let m_interval = ma - d < bd && bd <= ma;
        let plus_m = bd > ma;
        let label = if m_interval {
            IntervalClass::MInterval
        } else if plus_m {
            IntervalClass::PlusM
        } else {
            IntervalClass::Neither
        };
        Ok(Classification {
            label,
            m_interval,
            plus_m,
        })
    }

    pub fn is_m_interval(&self, m: Rat) -> Result<bool> {
        Ok(self.classify(m)?.m_interval)
    }

    pub fn is_plus_m(&self, m: Rat) -> Result<bool> {
        Ok(self.classify(m)?.plus_m)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Interval, D::Error> {
        let [a, b] = <[u64; 2]>::deserialize(d)?;
        Interval::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// The unique m-interval with left endpoint `a`: `[a, ⌊m·a⌋]`.
pub fn m_interval_at(a: u64, m: Rat) -> Result<Interval> {
    let m = m.require_gt_one("m")?;
    if a == 0 {
        return Err(Error::Zero);
    }
    let b = m.floor_mul(a)?;
    let b = u64::try_from(b).map_err(|_| Error::Overflow("m-interval right endpoint"))?;
    Interval::new(a, b)
}

/// Consecutive m-intervals starting at `lo` until one reaches `hi`.
///
/// The last interval is never clipped, so it may extend past `hi`.
pub fn tile_m_intervals(lo: u64, hi: u64, m: Rat) -> Result<Vec<Interval>> {
    if lo == 0 {
        return Err(Error::Zero);
    }
    if lo > hi {
        return Err(Error::InvalidInterval { a: lo, b: hi });
    }
    let mut tiles = Vec::new();
    let mut next = lo;
    loop {
        let tile = m_interval_at(next, m)?;
        tiles.push(tile);
        if tile.b() >= hi {
            return Ok(tiles);
        }
        next = tile.b() + 1;
    }
}

/// Finds the first pair of overlapping intervals, in sorted order.
pub fn first_overlap(intervals: &[Interval]) -> Option<(Interval, Interval)> {
    let mut sorted = intervals.to_vec();
    sorted.sort();
    sorted
        .windows(2)
        .find(|w| w[0].b() >= w[1].a())
        .map(|w| (w[0], w[1]))
}

/// A finite union of intervals, kept sorted, disjoint and non-adjacent.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
    // prefix[i] = total size of parts[..i]
    prefix: Vec<u64>,
}

impl IntervalUnion {
    pub fn empty() -> IntervalUnion {
        IntervalUnion {
            parts: Vec::new(),
            prefix: vec![0],
        }
    }

    pub fn new(mut parts: Vec<Interval>) -> IntervalUnion {
        parts.sort();
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.a <= last.b.saturating_add(1) => {
                    last.b = last.b.max(p.b);
                }
                _ => merged.push(p),
            }
        }
        let mut prefix = Vec::with_capacity(merged.len() + 1);
        let mut total = 0u64;
        prefix.push(0);
        for p in &merged {
            total += p.len();
            prefix.push(total);
        }
        IntervalUnion {
            parts: merged,
            prefix,
        }
    }

    /// Builds a union from ascending points, merging runs.
    pub fn from_sorted_points<I: IntoIterator<Item = u64>>(points: I) -> IntervalUnion {
        let mut parts: Vec<Interval> = Vec::new();
        for n in points {
            match parts.last_mut() {
                Some(last) if n <= last.b.saturating_add(1) => last.b = last.b.max(n),
                _ => parts.push(Interval { a: n.max(1), b: n.max(1) }),
            }
        }
        IntervalUnion::new(parts)
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn component_count(&self) -> usize {
        self.parts.len()
    }

    /// Total number of naturals in the union.
    pub fn len(&self) -> u64 {
        *self.prefix.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.parts.first().map(|p| p.a)
    }

    pub fn max(&self) -> Option<u64> {
        self.parts.last().map(|p| p.b)
    }

    pub fn contains(&self, n: u64) -> bool {
        let idx = self.parts.partition_point(|p| p.b < n);
        self.parts.get(idx).is_some_and(|p| p.a <= n)
    }

    /// Number of members `≤ n`.
    pub fn count_leq(&self, n: u64) -> u64 {
        let idx = self.parts.partition_point(|p| p.b <= n);
        let mut count = self.prefix[idx];
        if let Some(p) = self.parts.get(idx) {
            if p.a <= n {
                count += n - p.a + 1;
            }
        }
        count
    }

    pub fn count_in(&self, i: &Interval) -> u64 {
        self.count_leq(i.b) - self.count_leq(i.a - 1)
    }

    pub fn intersect_interval(&self, i: &Interval) -> IntervalUnion {
        IntervalUnion::new(self.parts.iter().filter_map(|p| p.intersect(i)).collect())
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::new(self.parts.iter().chain(&other.parts).copied().collect())
    }

    /// Members of `self` not in `other`.
    pub fn minus(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        for p in &self.parts {
            let mut start = Some(p.a);
            let first = other.parts.partition_point(|o| o.b < p.a);
            for o in &other.parts[first..] {
                let Some(s) = start else { break };
                if o.a > p.b {
                    break;
                }
                if o.a > s {
                    out.push(Interval { a: s, b: o.a - 1 });
                }
                start = (o.b < p.b).then(|| s.max(o.b + 1));
            }
            if let Some(s) = start {
                out.push(Interval { a: s, b: p.b });
            }
        }
        IntervalUnion::new(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.parts.iter().flat_map(|p| p.iter())
    }
}

impl fmt::Debug for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.parts).finish()
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        for (idx, p) in self.parts.iter().enumerate() {
            if idx > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalUnion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<IntervalUnion, D::Error> {
        Ok(IntervalUnion::new(Vec::<Interval>::deserialize(d)?))
    }
}
