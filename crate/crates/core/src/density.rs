//! Prefix densities, limsup/liminf estimates, densities inside intervals and
//! a finite-scale checker for the interval characterization of density.
//!
//! A set `S` has density `D` exactly when, for every `ε > 0` and `m > 1`,
//! the density of `S` inside every +m-interval `[a, b]` with `a` large enough
//! is within `ε` of `D`. [`check_thm1`] tests that statement on all (or a
//! geometric sample of) +m-intervals below a scan limit; it is evidence at a
//! finite scale, not a proof.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rat::Rat;
use crate::sets::{ensure_known, NatSet};

/// `‖S_n‖ / n`
pub fn prefix_density(set: &dyn NatSet, n: u64) -> Result<Rat> {
    if n == 0 {
        return Err(Error::Zero);
    }
    ensure_known(set, n)?;
    Rat::new(set.count_leq(n) as i128, n as i128)
}

/// `‖S ∩ I‖ / ‖I‖`
pub fn interval_density(set: &dyn NatSet, i: &Interval) -> Result<Rat> {
    ensure_known(set, i.b())?;
    Rat::new(set.count_in(i) as i128, i.len() as i128)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub n: u64,
    pub density: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityProfile {
    pub n_max: u64,
    /// Samples with `n ≥ tail_start` feed the estimates.
    pub tail_start: u64,
    pub samples: Vec<Sample>,
    pub limsup_est: Rat,
    pub liminf_est: Rat,
}

impl DensityProfile {
    pub fn tail(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(move |s| s.n >= self.tail_start)
    }
}

/// Sample positions for [`estimate_limits`]: `grid` geometrically spaced
/// points in `[1, n_max]`, plus `⌊c·2^j⌋` and `⌊c·2^j⌋ − 1` for
/// `c ∈ {1, 3/2}`, which are the extremal points of sets built from dyadic
/// blocks and half blocks.
pub fn sample_points(n_max: u64, grid: u32) -> Vec<u64> {
    let mut points = Vec::new();
    let span = (n_max as f64).ln();
    for j in 0..grid {
        let x = (span * j as f64 / (grid - 1) as f64).exp().round() as u64;
        points.push(x.clamp(1, n_max));
    }
    points.push(n_max);
    for j in 0..64u32 {
        let p = 1u64 << j;
        for v in [p, p + p / 2] {
            if v > n_max || (j == 0 && v != p) {
                continue;
            }
            points.push(v);
            if v > 1 {
                points.push(v - 1);
            }
        }
        if p > n_max / 2 + 1 {
            break;
        }
    }
    points.sort_unstable();
    points.dedup();
    points
}

/// Estimates `limsup` and `liminf` of `‖S_n‖/n` as the max and min over the
/// sampled `n ≥ tail_fraction · n_max`.
pub fn estimate_limits(
    set: &dyn NatSet,
    n_max: u64,
    tail_fraction: Rat,
    grid: u32,
) -> Result<DensityProfile> {
    if n_max < 16 {
        return Err(Error::Precondition(format!("n_max = {n_max} must be at least 16")));
    }
    if grid < 8 {
        return Err(Error::Precondition(format!("grid = {grid} must be at least 8")));
    }
    let tail_fraction = tail_fraction.require_unit_open("tail_fraction")?;
    ensure_known(set, n_max)?;
    let tail_start = u64::try_from(tail_fraction.checked_mul(&Rat::from(n_max))?.ceil())
        .map_err(|_| Error::Overflow("tail start"))?
        .max(1);

    let samples: Vec<Sample> = sample_points(n_max, grid)
        .into_iter()
        .map(|n| prefix_density(set, n).map(|density| Sample { n, density }))
        .collect::<Result<_>>()?;
    let tail: Vec<Rat> = samples
        .iter()
        .filter(|s| s.n >= tail_start)
        .map(|s| s.density)
        .collect();
    let limsup_est = *tail.iter().max().expect("n_max is always sampled");
    let liminf_est = *tail.iter().min().expect("n_max is always sampled");
    Ok(DensityProfile {
        n_max,
        tail_start,
        samples,
        limsup_est,
        liminf_est,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Exhaustive up to [`EXHAUSTIVE_CUTOFF`], sampled above it.
    #[default]
    Auto,
    Exhaustive,
    Sampled,
}

pub const EXHAUSTIVE_CUTOFF: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thm1Params {
    pub d: Rat,
    pub m: Rat,
    pub epsilon: Rat,
    /// Only intervals with `a > n` are examined.
    pub n: u64,
    pub scan_limit: u64,
    pub mode: ScanMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Thm1Report {
    pub d: Rat,
    pub m: Rat,
    pub epsilon: Rat,
    #[serde(rename = "N")]
    pub n: u64,
    pub scan_limit: u64,
    pub mode: ScanMode,
    pub intervals_checked: u64,
    pub worst_interval: Interval,
    pub worst_density: Rat,
    pub worst_deviation: Rat,
    pub pass: bool,
}

/// `|count/len − D|` kept as an unreduced fraction so the scan loop avoids
/// gcd work.
#[derive(Clone, Copy)]
struct Deviation {
    num: u128,
    den: u128,
}

impl Deviation {
    fn new(count: u64, len: u64, d: &Rat) -> Deviation {
        let (dn, dd) = (d.numer(), d.denom());
        let diff = (count as i128 * dd) - (dn * len as i128);
        Deviation {
            num: diff.unsigned_abs(),
            den: len as u128 * dd as u128,
        }
    }

    fn cmp(&self, other: &Deviation) -> Ordering {
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => self.to_rat().cmp(&other.to_rat()),
        }
    }

    fn to_rat(self) -> Rat {
        Rat::new(self.num as i128, self.den as i128).expect("len >= 1")
    }
}

#[derive(Clone, Copy)]
struct Worst {
    dev: Deviation,
    interval: Interval,
    checked: u64,
}

fn merge(a: Option<Worst>, b: Option<Worst>) -> Option<Worst> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            let checked = x.checked + y.checked;
            let pick = match x.dev.cmp(&y.dev) {
                Ordering::Greater => x,
                Ordering::Less => y,
                Ordering::Equal => {
                    if x.interval <= y.interval {
                        x
                    } else {
                        y
                    }
                }
            };
            Some(Worst { checked, ..pick })
        }
    }
}

/// Next point of a geometric grid with ratio 21/20, always advancing.
fn geometric_next(x: u64) -> u64 {
    (x.saturating_mul(21).div_ceil(20)).max(x + 1)
}

/// Checks `|‖S ∩ I‖/‖I‖ − D| < ε` over +m-intervals `I = [a, b]` with
/// `N < a ≤ b ≤ scan_limit`, reporting the worst interval found.
///
/// Exhaustive mode tries every such interval. Sampled mode takes `a` on a
/// geometric grid (ratio 1.05) from `N + 1` and, for each `a`, the shortest
/// +m-interval `b = ⌊m·a⌋ + 1` followed by a geometric grid of `b` up to the
/// scan limit. Ties keep the lexicographically smallest interval.
pub fn check_thm1(set: &dyn NatSet, params: &Thm1Params) -> Result<Thm1Report> {
    let m = params.m.require_gt_one("m")?;
    let epsilon = params.epsilon.require_unit_open("epsilon")?;
    let d = params
        .d
        .require("D", params.d >= Rat::ZERO && params.d <= Rat::ONE, "must lie in [0, 1]")?;
    if params.n >= params.scan_limit {
        return Err(Error::Precondition(format!(
            "N = {} leaves nothing to scan below scan_limit = {}",
            params.n, params.scan_limit
        )));
    }
    ensure_known(set, params.scan_limit)?;
    let limit = params.scan_limit;
    let mode = match params.mode {
        ScanMode::Auto if limit <= EXHAUSTIVE_CUTOFF => ScanMode::Exhaustive,
        ScanMode::Auto => ScanMode::Sampled,
        other => other,
    };

    // shortest +m-interval starting at a ends at ⌊m·a⌋ + 1
    let first_b = |a: u64| -> Option<u64> {
        let b = m.floor_mul(a).ok()? + 1;
        u64::try_from(b).ok().filter(|&b| b <= limit)
    };

    let worst = match mode {
        ScanMode::Exhaustive => {
            let mut prefix = Vec::with_capacity(limit as usize + 1);
            let mut running = 0u64;
            prefix.push(0);
            for n in 1..=limit {
                running += set.contains(n) as u64;
                prefix.push(running);
            }
            let starts: Vec<u64> = (params.n + 1..=limit).collect();
            starts
                .par_iter()
                .map(|&a| {
                    let b0 = first_b(a)?;
                    let mut best: Option<Worst> = None;
                    for b in b0..=limit {
                        let count = prefix[b as usize] - prefix[a as usize - 1];
                        let w = Worst {
                            dev: Deviation::new(count, b - a + 1, &d),
                            interval: Interval::new(a, b).expect("a <= b"),
                            checked: 1,
                        };
                        best = merge(best, Some(w));
                    }
                    best
                })
                .reduce(|| None, merge)
        }
        _ => {
            let mut starts = Vec::new();
            let mut a = params.n + 1;
            while a <= limit {
                starts.push(a);
                a = geometric_next(a);
            }
            starts
                .par_iter()
                .map(|&a| {
                    let mut best: Option<Worst> = None;
                    let mut b = first_b(a)?;
                    loop {
                        let i = Interval::new(a, b).expect("a <= b");
                        let w = Worst {
                            dev: Deviation::new(set.count_in(&i), i.len(), &d),
                            interval: i,
                            checked: 1,
                        };
                        best = merge(best, Some(w));
                        if b == limit {
                            break;
                        }
                        b = geometric_next(b).min(limit);
                    }
                    best
                })
                .reduce(|| None, merge)
        }
    };

    let worst = worst.ok_or_else(|| {
        Error::Precondition(format!(
            "no +m-interval with N < a fits below scan_limit = {limit} for m = {m}"
        ))
    })?;
    let worst_deviation = worst.dev.to_rat();
    Ok(Thm1Report {
        d,
        m,
        epsilon,
        n: params.n,
        scan_limit: limit,
        mode,
        intervals_checked: worst.checked,
        worst_interval: worst.interval,
        worst_density: interval_density(set, &worst.interval)?,
        worst_deviation,
        pass: worst_deviation < epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Thm1Constants {
    /// Prefix densities within `ε′ < ((m − 1)/(m + 1))·ε` of `D` force
    /// interval densities within `ε` on +m-intervals.
    pub eps_prime_bound: Rat,
    /// Interval densities on +m-intervals with `m > 3/ε` (and tolerance
    /// `ε/3`) force prefix densities within `ε`.
    pub m_min_for_converse: Rat,
}

pub fn thm1_constants(epsilon: Rat, m: Rat) -> Result<Thm1Constants> {
    let m = m.require_gt_one("m")?;
    let epsilon = epsilon.require("epsilon", epsilon > Rat::ZERO, "must be positive")?;
    let ratio = (m - Rat::ONE) / (m + Rat::ONE);
    Ok(Thm1Constants {
        eps_prime_bound: ratio * epsilon,
        m_min_for_converse: Rat::int(3) / epsilon,
    })
}
