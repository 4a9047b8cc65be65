//! One-to-one maps ℕ → ℕ: the 2^n shuffle and its inverse, the identity, and
//! maps defined in the piecewise DSL.
//!
//! The shuffle permutes every dyadic block `[2^i, 2^{i+1} − 1]`, `i ≥ 2`,
//! sending the lower half of the block onto the even members and the upper
//! half onto the odd members. Its inverse deals the evens back to the lower
//! half and the odds to the upper half.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fndsl::MapSpec;
use crate::interval::{Interval, IntervalUnion};
use crate::sets::{BitWindow, BitWindowSet, NatSet};

/// A function ℕ → ℕ that is expected to be one-to-one.
pub trait NatMap: Send + Sync {
    fn name(&self) -> &str;

    fn apply(&self, n: u64) -> Result<u64>;

    /// The inverse at `n`, when the map knows it. `None` means "not
    /// available", not "no preimage".
    fn invert(&self, _n: u64) -> Option<u64> {
        None
    }

    /// `{k : f(k) ∈ I}` in structured form, when the map can produce it.
    fn preimage_of_interval(&self, _i: &Interval) -> Option<IntervalUnion> {
        None
    }

    /// The largest domain point whose image can be `≤ x`, when declared.
    fn reach_bound(&self, _x: u64) -> Option<u64> {
        None
    }
}

pub type SharedMap = Arc<dyn NatMap>;

/// `⌊log2 k⌋`, the dyadic block of `k`. `k` must be nonzero.
pub fn block_of(k: u64) -> u32 {
    debug_assert!(k > 0);
    63 - k.leading_zeros()
}

/// Last element of the dyadic block containing `k`.
pub fn block_end(k: u64) -> u64 {
    let i = block_of(k);
    if i == 63 {
        u64::MAX
    } else {
        (1u64 << (i + 1)) - 1
    }
}

fn check_nat(k: u64) -> Result<u64> {
    if k == 0 {
        Err(Error::Zero)
    } else {
        Ok(k)
    }
}

/// The 2^n shuffle.
pub fn sh(k: u64) -> Result<u64> {
    let k = check_nat(k)?;
    if k < 4 {
        return Ok(k);
    }
    let i = block_of(k);
    let base = 1u64 << i;
    let half = base >> 1;
    let j = k - base;
    let image = if j < half {
        base.checked_add(2 * j)
    } else {
        base.checked_add(2 * (j - half) + 1)
    };
    image.ok_or(Error::Overflow("sh"))
}

/// Inverse of the 2^n shuffle.
pub fn sh_inv(k: u64) -> Result<u64> {
    let k = check_nat(k)?;
    if k < 4 {
        return Ok(k);
    }
    let i = block_of(k);
    let base = 1u64 << i;
    let half = base >> 1;
    let j = k - base;
    Ok(if j.is_multiple_of(2) {
        base + j / 2
    } else {
        base + half + (j - 1) / 2
    })
}

/// Splits `I` into its pieces inside each dyadic block (`[1, 3]` counts as
/// one fixed block).
fn block_pieces(i: &Interval) -> Vec<(Interval, Option<u32>)> {
    let mut pieces = Vec::new();
    let mut lo = i.a();
    while lo <= i.b() {
        let (end, block) = if lo < 4 { (3, None) } else { (block_end(lo), Some(block_of(lo))) };
        let hi = end.min(i.b());
        pieces.push((Interval::new(lo, hi).expect("lo <= hi"), block));
        if hi == u64::MAX {
            break;
        }
        lo = hi + 1;
    }
    pieces
}

/// `sh⁻¹(I) = {k : sh(k) ∈ I}`.
///
/// Within one block the even members of `I` pull back to a single interval in
/// the lower half and the odd members to a single interval in the upper half.
/// After merging across blocks the result has at most three components.
pub fn sh_preimage_interval(i: &Interval) -> IntervalUnion {
    let mut parts = Vec::new();
    for (piece, block) in block_pieces(i) {
        let Some(block) = block else {
            parts.push(piece);
            continue;
        };
        let base = 1u64 << block;
        let half = base >> 1;
        // evens 2^i + 2j ↦ 2^i + j, odds 2^i + 2j + 1 ↦ 2^i + 2^{i-1} + j
        let (lo, hi) = (piece.a() - base, piece.b() - base);
        let (even_lo, even_hi) = (lo.div_ceil(2), hi / 2);
        if even_lo <= even_hi {
            parts.push(Interval::new(base + even_lo, base + even_hi).expect("ordered"));
        }
        if hi >= 1 {
            let odd_lo = if lo == 0 { 0 } else { (lo - 1).div_ceil(2) };
            let odd_hi = (hi - 1) / 2;
            if odd_lo <= odd_hi {
                parts.push(
                    Interval::new(base + half + odd_lo, base + half + odd_hi).expect("ordered"),
                );
            }
        }
    }
    IntervalUnion::new(parts)
}

/// `sh(I) = {k : sh⁻¹(k) ∈ I}`: evens and odds scattered through the
/// blocks, so the result can have up to `‖I‖` components.
pub fn sh_image_interval(i: &Interval) -> IntervalUnion {
    let mut points = Vec::new();
    for (piece, block) in block_pieces(i) {
        let whole_block = block.is_some_and(|i| piece.len() == 1u64 << i);
        if block.is_none() || whole_block {
            points.extend(piece.iter());
        } else {
            points.extend(piece.iter().map(|k| sh(k).expect("within block")));
        }
    }
    points.sort_unstable();
    IntervalUnion::from_sorted_points(points)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Shuffle;

#[derive(Debug, Clone, Copy, Default)]
pub struct ShuffleInverse;

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

fn block_reach(x: u64) -> u64 {
    if x < 4 {
        3
    } else {
        block_end(x)
    }
}

impl NatMap for Shuffle {
    fn name(&self) -> &str {
        "sh"
    }
    fn apply(&self, n: u64) -> Result<u64> {
        sh(n)
    }
    fn invert(&self, n: u64) -> Option<u64> {
        sh_inv(n).ok()
    }
    fn preimage_of_interval(&self, i: &Interval) -> Option<IntervalUnion> {
        Some(sh_preimage_interval(i))
    }
    fn reach_bound(&self, x: u64) -> Option<u64> {
        Some(block_reach(x))
    }
}

impl NatMap for ShuffleInverse {
    fn name(&self) -> &str {
        "sh-inv"
    }
    fn apply(&self, n: u64) -> Result<u64> {
        sh_inv(n)
    }
    fn invert(&self, n: u64) -> Option<u64> {
        sh(n).ok()
    }
    fn preimage_of_interval(&self, i: &Interval) -> Option<IntervalUnion> {
        Some(sh_image_interval(i))
    }
    fn reach_bound(&self, x: u64) -> Option<u64> {
        Some(block_reach(x))
    }
}

impl NatMap for Identity {
    fn name(&self) -> &str {
        "identity"
    }
    fn apply(&self, n: u64) -> Result<u64> {
        check_nat(n)
    }
    fn invert(&self, n: u64) -> Option<u64> {
        Some(n)
    }
    fn preimage_of_interval(&self, i: &Interval) -> Option<IntervalUnion> {
        Some(IntervalUnion::new(vec![*i]))
    }
    fn reach_bound(&self, x: u64) -> Option<u64> {
        Some(x)
    }
}

/// A map defined by a parsed DSL spec. It declares no reach bound.
#[derive(Clone)]
pub struct DslMap {
    name: String,
    spec: Arc<MapSpec>,
}

impl DslMap {
    pub fn new(name: impl Into<String>, spec: MapSpec) -> Self {
        DslMap {
            name: name.into(),
            spec: Arc::new(spec),
        }
    }

    pub fn spec(&self) -> &MapSpec {
        &self.spec
    }
}

impl NatMap for DslMap {
    fn name(&self) -> &str {
        &self.name
    }
    fn apply(&self, n: u64) -> Result<u64> {
        Ok(self.spec.eval(n)?)
    }
}

impl fmt::Debug for DslMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DslMap").field("name", &self.name).finish()
    }
}

/// Looks up `sh`, `sh-inv` (also `sh_inv`) or `identity`.
pub fn builtin(name: &str) -> Option<SharedMap> {
    match name {
        "sh" => Some(Arc::new(Shuffle)),
        "sh-inv" | "sh_inv" => Some(Arc::new(ShuffleInverse)),
        "identity" | "id" => Some(Arc::new(Identity)),
        _ => None,
    }
}

/// A builtin name or the path of a `.dsl` file.
pub fn resolve(name: &str) -> Result<SharedMap> {
    if let Some(m) = builtin(name) {
        return Ok(m);
    }
    let spec = crate::fndsl::parse_file(std::path::Path::new(name))?;
    Ok(Arc::new(DslMap::new(name, spec)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub first: u64,
    pub second: u64,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjectivityReport {
    pub window: Interval,
    pub ok: bool,
    pub collision: Option<Collision>,
}

pub const MAX_INJECTIVITY_WINDOW: u64 = 1 << 26;

/// Checks that `f` is one-to-one on `window`, reporting the first collision
/// in scan order: the smallest `second` whose image was already produced.
pub fn verify_injective(f: &dyn NatMap, window: &Interval) -> Result<InjectivityReport> {
    if window.len() > MAX_INJECTIVITY_WINDOW {
        return Err(Error::Precondition(format!(
            "injectivity window {window} exceeds 2^26 points"
        )));
    }
    let domain: Vec<u64> = window.iter().collect();
    let mut pairs: Vec<(u64, u64)> = domain
        .par_iter()
        .map(|&n| f.apply(n).map(|v| (v, n)))
        .collect::<Result<_>>()?;
    pairs.par_sort_unstable();
    let collision = pairs
        .windows(2)
        .filter(|w| w[0].0 == w[1].0)
        .map(|w| (w[0].0, w[1].1))
        .min_by_key(|&(_, second)| second)
        .map(|(value, second)| {
            // the earliest point sharing this image
            let start = pairs.partition_point(|p| p.0 < value);
            Collision {
                first: pairs[start].1,
                second,
                value,
            }
        });
    Ok(InjectivityReport {
        window: *window,
        ok: collision.is_none(),
        collision,
    })
}

/// `f(S) ∩ window`, materialized.
///
/// Every domain point whose image can land in the window must be scanned:
/// the map's declared reach bound gives that range, otherwise `scan_bound`
/// must be supplied.
pub fn image_on_window(
    f: &dyn NatMap,
    set: &dyn NatSet,
    window: &Interval,
    scan_bound: Option<u64>,
) -> Result<BitWindowSet> {
    let bound = scan_bound
        .or_else(|| f.reach_bound(window.b()))
        .ok_or_else(|| Error::MissingScanBound(f.name().to_string()))?;
    if let Some(h) = set.horizon() {
        if bound > h {
            return Err(Error::BeyondHorizon { n: bound, horizon: h });
        }
    }
    let mut bits = BitWindow::new(*window);
    for n in 1..=bound {
        if !set.contains(n) {
            continue;
        }
        let v = f.apply(n)?;
        if window.contains(v) && bits.insert(v) {
            let first = (1..n)
                .find(|&t| set.contains(t) && f.apply(t).ok() == Some(v))
                .unwrap_or(0);
            return Err(Error::NotInjective {
                map: f.name().to_string(),
                first,
                second: n,
                value: v,
            });
        }
    }
    Ok(bits.freeze())
}
