//! Textual set specifications.
//!
//! | spec | set |
//! |------|-----|
//! | `evens`, `odds` | residues mod 2 |
//! | `multiples:k` | `kℕ` |
//! | `nodensity` | `⋃ [4^m, 2·4^m − 1]` |
//! | `sh-inv-evens` | `sh⁻¹(evens)` in interval form |
//! | `interval-union:a1-b1,a2-b2,...` | finite union |
//! | `bits:FILE` | members listed one per line |
//! | `image:MAP:BASE` | image of `BASE` under a builtin map or DSL file |
//! | `dsl-image:FILE:BASE` | image of `BASE` under a DSL map |
//!
//! Images are materialized on `[1, window_end]`.

use std::path::Path;
use std::sync::Arc;

use crate::adversary::{no_density_example, sh_inv_evens_set};
use crate::error::{Error, Result};
use crate::fndsl;
use crate::interval::{Interval, IntervalUnion};
use crate::maps::{self, image_on_window, DslMap, SharedMap};
use crate::sets::{BitWindowSet, IntervalUnionSet, NatSet, ResidueSet};

pub type SharedSet = Arc<dyn NatSet>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetOptions {
    /// Right end of the window on which image sets are materialized.
    pub window_end: u64,
    /// Domain scan bound for maps without a declared reach bound.
    pub scan_bound: Option<u64>,
}

fn bad(spec: &str, reason: impl Into<String>) -> Error {
    Error::SetSpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn parse_nat(spec: &str, s: &str) -> Result<u64> {
    match s.trim().parse::<u64>() {
        Ok(0) => Err(Error::Zero),
        Ok(n) => Ok(n),
        Err(_) => Err(bad(spec, format!("{s:?} is not a natural number"))),
    }
}

pub fn parse_set(spec: &str, opts: &SetOptions) -> Result<SharedSet> {
    let spec = spec.trim();
    let (head, rest) = match spec.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (spec, None),
    };
    match (head, rest) {
        ("evens", None) => Ok(Arc::new(ResidueSet::evens())),
        ("odds", None) => Ok(Arc::new(ResidueSet::odds())),
        ("nodensity", None) => Ok(Arc::new(no_density_example())),
        ("sh-inv-evens", None) => Ok(Arc::new(sh_inv_evens_set())),
        ("multiples", Some(k)) => Ok(Arc::new(ResidueSet::multiples(parse_nat(spec, k)?)?)),
        ("interval-union", Some(list)) => {
            let mut parts = Vec::new();
            for item in list.split(',').filter(|s| !s.trim().is_empty()) {
                let (a, b) = item
                    .split_once('-')
                    .ok_or_else(|| bad(spec, format!("{item:?} is not of the form a-b")))?;
                parts.push(Interval::new(parse_nat(spec, a)?, parse_nat(spec, b)?)?);
            }
            Ok(Arc::new(IntervalUnionSet::new(IntervalUnion::new(parts))))
        }
        ("bits", Some(path)) => Ok(Arc::new(BitWindowSet::read_from(Path::new(path))?)),
        ("image", Some(rest)) => {
            let (map, base) = rest
                .split_once(':')
                .ok_or_else(|| bad(spec, "expected image:MAP:BASE"))?;
            image_set(&maps::resolve(map)?, base, opts)
        }
        ("dsl-image", Some(rest)) => {
            let (file, base) = rest
                .split_once(':')
                .ok_or_else(|| bad(spec, "expected dsl-image:FILE:BASE"))?;
            let map_spec = fndsl::parse_file(Path::new(file))?;
            let f: SharedMap = Arc::new(DslMap::new(file, map_spec));
            image_set(&f, base, opts)
        }
        _ => Err(bad(spec, "unknown set specification")),
    }
}

fn image_set(f: &SharedMap, base: &str, opts: &SetOptions) -> Result<SharedSet> {
    let base = parse_set(base, opts)?;
    let window = Interval::new(1, opts.window_end)?;
    Ok(Arc::new(image_on_window(f.as_ref(), base.as_ref(), &window, opts.scan_bound)?))
}
