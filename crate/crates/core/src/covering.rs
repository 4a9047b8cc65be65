//! The covering condition for one-to-one maps.
//!
//! Fix an inclusion factor `q`, an omission factor `r`, a +p-interval `I` and
//! disjoint m-intervals `J_1, …, J_k` whose images cover `I`. Intervals with
//! `‖I ∩ f(J)‖ ≥ q‖J‖` form the good collection `C`; the rest make up `T`.
//! The condition holds for the instance when `‖f(T) ∩ I‖ < r‖I‖`.
//!
//! This module evaluates the condition on concrete instances, builds the
//! coverings that make it hold for the shuffle, searches for instances where
//! it fails and produces the failing instances for the inverse shuffle.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{first_overlap, tile_m_intervals, Interval, IntervalUnion};
use crate::maps::{self, NatMap, SharedMap};
use crate::rat::Rat;

/// Largest domain range scanned when a preimage has to be found point by
/// point.
pub const MAX_PREIMAGE_SCAN: u64 = 1 << 26;

#[derive(Clone)]
pub struct CoveringInstance {
    pub f: SharedMap,
    pub i: Interval,
    pub js: Vec<Interval>,
    pub p: Rat,
    pub q: Rat,
    pub r: Rat,
    pub m: Rat,
}

impl fmt::Debug for CoveringInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoveringInstance")
            .field("map", &self.f.name())
            .field("I", &self.i)
            .field("Js", &self.js)
            .field("p", &self.p)
            .field("q", &self.q)
            .field("r", &self.r)
            .field("m", &self.m)
            .finish()
    }
}

/// On-disk form of a [`CoveringInstance`]; the map is stored by name (a
/// builtin or a DSL file path).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub map: String,
    pub p: Rat,
    pub q: Rat,
    pub r: Rat,
    pub m: Rat,
    #[serde(rename = "I")]
    pub i: Interval,
    #[serde(rename = "Js")]
    pub js: Vec<Interval>,
}

impl CoveringInstance {
    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            map: self.f.name().to_string(),
            p: self.p,
            q: self.q,
            r: self.r,
            m: self.m,
            i: self.i,
            js: self.js.clone(),
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<CoveringInstance> {
        Ok(CoveringInstance {
            f: maps::resolve(&file.map)?,
            i: file.i,
            js: file.js.clone(),
            p: file.p,
            q: file.q,
            r: file.r,
            m: file.m,
        })
    }

    pub fn load(path: &Path) -> Result<CoveringInstance> {
        let io = |e: &dyn fmt::Display| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let text = std::fs::read_to_string(path).map_err(|e| io(&e))?;
        let file: InstanceFile = serde_json::from_str(&text).map_err(|e| io(&e))?;
        CoveringInstance::from_file(&file)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringReport {
    /// `‖I ∩ f(J)‖ / ‖J‖`, one entry per `J` in input order.
    pub inclusion: Vec<Rat>,
    /// `‖I ∩ f(J)‖`, one entry per `J`.
    pub hits: Vec<u64>,
    #[serde(rename = "C")]
    pub c: Vec<Interval>,
    #[serde(rename = "T")]
    pub t: Vec<Interval>,
    #[serde(rename = "T_union")]
    pub t_union: IntervalUnion,
    #[serde(rename = "fT_in_I")]
    pub ft_in_i: u64,
    pub omission: Rat,
    pub condition_holds: bool,
}

/// `{x : f(x) ∈ I}`, from the map's structured form when it has one,
/// otherwise by scanning the domain up to the map's reach bound.
pub fn preimage(f: &dyn NatMap, i: &Interval) -> Result<IntervalUnion> {
    if let Some(p) = f.preimage_of_interval(i) {
        return Ok(p);
    }
    let bound = f
        .reach_bound(i.b())
        .ok_or_else(|| Error::NoPreimage(f.name().to_string()))?;
    if bound > MAX_PREIMAGE_SCAN {
        return Err(Error::Precondition(format!(
            "preimage of {i} under {} needs a scan up to {bound}",
            f.name()
        )));
    }
    let mut points = Vec::new();
    for x in 1..=bound {
        if i.contains(f.apply(x)?) {
            points.push(x);
        }
    }
    Ok(IntervalUnion::from_sorted_points(points))
}

fn validate(inst: &CoveringInstance) -> Result<()> {
    inst.q.require_unit_open("q")?;
    inst.r.require_unit_open("r")?;
    inst.m.require_gt_one("m")?;
    inst.p.require_gt_one("p")?;
    if let Some((x, y)) = first_overlap(&inst.js) {
        return Err(Error::NotDisjoint(x, y));
    }
    for j in &inst.js {
        if !j.is_m_interval(inst.m)? {
            return Err(Error::NotMInterval {
                interval: *j,
                m: inst.m.to_string(),
            });
        }
    }
    if !inst.i.is_plus_m(inst.p)? {
        return Err(Error::NotPlusInterval {
            interval: inst.i,
            p: inst.p.to_string(),
        });
    }
    Ok(())
}

/// `‖I ∩ f(J)‖` for every `J`, failing when the images miss part of `I`.
fn image_hits(inst: &CoveringInstance) -> Result<Vec<u64>> {
    let f = inst.f.as_ref();
    let i = inst.i;
    if let Some(pre) = f.preimage_of_interval(&i) {
        if pre.len() == i.len() {
            let covered = IntervalUnion::new(inst.js.clone());
            let missed = pre.minus(&covered);
            if let Some(missing) = missed.iter().map(|x| f.apply(x)).collect::<Result<Vec<_>>>()?.into_iter().min() {
                return Err(Error::NotCovered { target: i, missing });
            }
            return Ok(inst.js.iter().map(|j| pre.count_in(j)).collect());
        }
    }

    let mut seen = vec![false; i.len() as usize];
    let mut origin = vec![0u64; i.len() as usize];
    let mut hits = Vec::with_capacity(inst.js.len());
    for j in &inst.js {
        let mut h = 0;
        for x in j.iter() {
            let y = f.apply(x)?;
            if !i.contains(y) {
                continue;
            }
            let slot = (y - i.a()) as usize;
            if seen[slot] {
                return Err(Error::NotInjective {
                    map: f.name().to_string(),
                    first: origin[slot],
                    second: x,
                    value: y,
                });
            }
            seen[slot] = true;
            origin[slot] = x;
            h += 1;
        }
        hits.push(h);
    }
    if let Some(gap) = seen.iter().position(|&s| !s) {
        return Err(Error::NotCovered {
            target: i,
            missing: i.a() + gap as u64,
        });
    }
    Ok(hits)
}

/// Splits the covering into `C` and `T` and decides `‖f(T) ∩ I‖ < r‖I‖`
/// exactly.
///
/// Checks run in a fixed order: disjointness of the `J`s, each `J` being an
/// m-interval, `I` being a +p-interval, then coverage of `I`.
pub fn evaluate_covering(inst: &CoveringInstance) -> Result<CoveringReport> {
    validate(inst)?;
    let hits = image_hits(inst)?;
    let mut inclusion = Vec::with_capacity(hits.len());
    let (mut c, mut t) = (Vec::new(), Vec::new());
    let mut ft_in_i = 0;
    for (j, &h) in inst.js.iter().zip(&hits) {
        let frac = Rat::new(h as i128, j.len() as i128)?;
        inclusion.push(frac);
        if frac >= inst.q {
            c.push(*j);
        } else {
            t.push(*j);
            ft_in_i += h;
        }
    }
    let size = Rat::from(inst.i.len());
    let omission = Rat::from(ft_in_i) / size;
    Ok(CoveringReport {
        inclusion,
        hits,
        t_union: IntervalUnion::new(t.clone()),
        c,
        t,
        ft_in_i,
        omission,
        condition_holds: Rat::from(ft_in_i) < inst.r * size,
    })
}

/// `(m − 1)(b + a)`: the most elements of `[a, b]` that can fall outside the
/// tiles of an m-interval tiling lying fully inside it.
pub fn boundary_loss_bound(i: &Interval, m: Rat) -> Result<Rat> {
    let m = m.require_gt_one("m")?;
    (m - Rat::ONE).checked_mul(&Rat::from(i.a() + i.b()))
}

/// Threshold below which preimage components are discarded:
/// `p′ = 1 + (1/9)((p − 1)/p)·r`.
pub fn sh_threshold(p: Rat, r: Rat) -> Rat {
    Rat::ONE + Rat::frac(1, 9) * ((p - Rat::ONE) / p) * r
}

/// The largest `m = 1 + 1/t` with `m − 1 < ((p′ − 1)/(p′ + 1))(r/3)` and
/// `m³ ≤ p′`.
pub fn sh_covering_m(p_prime: Rat, r: Rat) -> Result<Rat> {
    let p_prime = p_prime.require_gt_one("p'")?;
    let r = r.require_unit_open("r")?;
    let gap = (p_prime - Rat::ONE) / (p_prime + Rat::ONE) * r / Rat::int(3);
    // 1/t < gap  ⟺  t > 1/gap
    let mut t = gap.recip()?.floor() + 1;
    loop {
        let m = Rat::ONE + Rat::new(1, t)?;
        if m.checked_mul(&m)?.checked_mul(&m)? <= p_prime {
            return Ok(m);
        }
        t += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub component: Interval,
    pub mu: Rat,
    pub kept: bool,
    pub tiles: usize,
    /// Elements of the component left outside the returned tiles.
    pub omitted: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShCovering {
    #[serde(rename = "I")]
    pub i: Interval,
    pub p: Rat,
    pub r: Rat,
    pub p_prime: Rat,
    pub m: Rat,
    pub preimage: IntervalUnion,
    pub components: Vec<ComponentReport>,
    #[serde(rename = "Js")]
    pub js: Vec<Interval>,
    /// `‖sh⁻¹(I) − ⋃ Js‖`
    pub omitted: u64,
    /// `r·‖I‖`, which `omitted` stays strictly below.
    pub omission_bound: Rat,
}

/// Covers `sh⁻¹(I)` by disjoint m-intervals, leaving fewer than `r·‖I‖`
/// points of the preimage uncovered.
///
/// Components of the preimage with `μ ≤ p′` are dropped. Each remaining
/// component is tiled from its left end and only tiles lying fully inside it
/// are kept.
pub fn construct_covering_sh(i: &Interval, p: Rat, r: Rat) -> Result<ShCovering> {
    let p = p.require_gt_one("p")?;
    let r = r.require_unit_open("r")?;
    if !i.is_plus_m(p)? {
        return Err(Error::NotPlusInterval {
            interval: *i,
            p: p.to_string(),
        });
    }
    // a > 6/((p − 1)r)
    let threshold = Rat::int(6) / ((p - Rat::ONE) * r);
    if Rat::from(i.a()) <= threshold {
        return Err(Error::Precondition(format!(
            "left endpoint {} must exceed 6/((p - 1)r) = {threshold}",
            i.a()
        )));
    }
    let p_prime = sh_threshold(p, r);
    let m = sh_covering_m(p_prime, r)?;
    let pre = maps::sh_preimage_interval(i);

    let mut components = Vec::new();
    let mut js = Vec::new();
    for comp in pre.parts() {
        let mu = comp.mu();
        if mu <= p_prime {
            components.push(ComponentReport {
                component: *comp,
                mu,
                kept: false,
                tiles: 0,
                omitted: comp.len(),
            });
            continue;
        }
        let tiles: Vec<Interval> = tile_m_intervals(comp.a(), comp.b(), m)?
            .into_iter()
            .filter(|t| comp.contains_interval(t))
            .collect();
        let covered: u64 = tiles.iter().map(Interval::len).sum();
        components.push(ComponentReport {
            component: *comp,
            mu,
            kept: true,
            tiles: tiles.len(),
            omitted: comp.len() - covered,
        });
        js.extend(tiles);
    }

    let omitted = components.iter().map(|c| c.omitted).sum::<u64>();
    let omission_bound = r * Rat::from(i.len());
    if Rat::from(omitted) >= omission_bound {
        return Err(Error::Guarantee(format!(
            "{omitted} preimage points of {i} left uncovered, bound is {omission_bound}"
        )));
    }
    Ok(ShCovering {
        i: *i,
        p,
        r,
        p_prime,
        m,
        preimage: pre,
        components,
        js,
        omitted,
        omission_bound,
    })
}

/// Candidate targets for [`search_violation`] anchored in block `i`: the
/// lower half, the whole block, the upper half, then the shortest
/// +p-intervals starting at `2^i`, `(5/4)2^i` and `(3/2)2^i`.
fn block_candidates(i: u32, p: Rat) -> Vec<Interval> {
    let base = 1u64 << i;
    let mut out = vec![
        Interval::new(base, base + base / 2 - 1),
        Interval::new(base, 2 * base - 1),
        Interval::new(base + base / 2, 2 * base - 1),
    ];
    for a in [base, base + base / 4, base + base / 2] {
        let b = p
            .floor_mul(a)
            .ok()
            .and_then(|b| u64::try_from(b + 1).ok())
            .unwrap_or(0);
        out.push(Interval::new(a, b));
    }
    out.into_iter().filter_map(|c| c.ok()).collect()
}

/// The canonical covering of `I`: tiles of `tile_m_intervals` over the span
/// of `f⁻¹(I)`, keeping those that meet the preimage.
pub fn canonical_covering(
    f: &SharedMap,
    i: &Interval,
    p: Rat,
    q: Rat,
    r: Rat,
    m: Rat,
) -> Result<CoveringInstance> {
    let pre = preimage(f.as_ref(), i)?;
    let (lo, hi) = match (pre.min(), pre.max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => {
            return Err(Error::NotCovered {
                target: *i,
                missing: i.a(),
            })
        }
    };
    let js = tile_m_intervals(lo, hi, m)?
        .into_iter()
        .filter(|t| pre.count_in(t) > 0)
        .collect();
    Ok(CoveringInstance {
        f: f.clone(),
        i: *i,
        js,
        p,
        q,
        r,
        m,
    })
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub examined: usize,
    pub witness: Option<(CoveringInstance, CoveringReport)>,
}

/// Bounded search for an instance where the covering condition fails.
///
/// Candidates come block by block from the least `i` with `2^i > N`; only
/// +p-intervals with `a > N` count against `budget`. Candidates are
/// evaluated concurrently and the first failing one in candidate order is
/// returned. Finding none proves nothing beyond the budget.
pub fn search_violation(
    f: &SharedMap,
    p: Rat,
    q: Rat,
    r: Rat,
    m: Rat,
    n: u64,
    budget: usize,
) -> Result<SearchOutcome> {
    let p = p.require_gt_one("p")?;
    let q = q.require_unit_open("q")?;
    let r = r.require_unit_open("r")?;
    let m = m.require_gt_one("m")?;

    let mut candidates: Vec<Interval> = Vec::new();
    let mut block = 64 - n.leading_zeros();
    while candidates.len() < budget && block < 62 {
        for c in block_candidates(block, p) {
            if candidates.len() < budget
                && c.a() > n
                && c.is_plus_m(p)?
                && !candidates.contains(&c)
            {
                candidates.push(c);
            }
        }
        block += 1;
    }

    let results: Vec<Option<(CoveringInstance, CoveringReport)>> = candidates
        .par_iter()
        .map(|i| {
            let inst = canonical_covering(f, i, p, q, r, m)?;
            match evaluate_covering(&inst) {
                Ok(rep) if !rep.condition_holds => Ok(Some((inst, rep))),
                Ok(_) | Err(Error::NotCovered { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(SearchOutcome {
        examined: candidates.len(),
        witness: results.into_iter().flatten().next(),
    })
}

/// `p` used for the inverse-shuffle witnesses: the lower half block has
/// `μ` close to 3/2, comfortably above it.
pub const SHINV_P: Rat = Rat::from_parts(7, 5);

#[derive(Debug, Clone)]
pub struct ShinvWitness {
    pub instance: CoveringInstance,
    pub report: CoveringReport,
    /// False when `q ≤ 1/2`: every tile then lands in `C`.
    pub is_witness: bool,
}

/// A failing instance for `sh⁻¹` in block `i`.
///
/// `I = [2^i, (3/2)2^i − 1]` is the image of the even members of the block,
/// and the `J`s tile the block with m-intervals. Each `J` sends about half
/// of itself into `I`, so with `q > 1/2` every `J` lies in `T` and the
/// omission is 1.
pub fn witness_shinv(i: u32, m: Rat, q: Rat) -> Result<ShinvWitness> {
    m.require("m", m > Rat::ONE && m <= Rat::frac(9, 8), "must lie in (1, 9/8]")?;
    shinv_instance(i, m, q, Rat::frac(1, 2))
}

/// [`witness_shinv`] without the `m ≤ 9/8` cap and with a chosen `r`. Tiles
/// must still hold at least 4 elements.
pub fn shinv_instance(i: u32, m: Rat, q: Rat, r: Rat) -> Result<ShinvWitness> {
    let m = m.require_gt_one("m")?;
    let q = q.require_unit_open("q")?;
    let r = r.require_unit_open("r")?;
    if !(4..=61).contains(&i) {
        return Err(Error::Precondition(format!("block exponent {i} must lie in [4, 61]")));
    }
    let base = 1u64 << i;
    let target = Interval::new(base, base + base / 2 - 1)?;
    let js = tile_m_intervals(base, 2 * base - 1, m)?;
    // the first tile is the shortest
    if js[0].len() < 4 {
        return Err(Error::Precondition(format!(
            "tiles of block {i} are too short for m = {m} (first is {})",
            js[0]
        )));
    }
    let instance = CoveringInstance {
        f: maps::builtin("sh-inv").expect("builtin"),
        i: target,
        js,
        p: SHINV_P,
        q,
        r,
        m,
    };
    let report = evaluate_covering(&instance)?;
    let half = Rat::frac(1, 2);
    for (j, frac) in instance.js.iter().zip(&report.inclusion) {
        if j.b() >= 2 * base {
            continue;
        }
        let slack = Rat::new(2, j.len() as i128)?;
        if (*frac - half).abs() > slack {
            return Err(Error::Guarantee(format!(
                "inclusion {frac} of {j} strays more than 2/|J| from 1/2"
            )));
        }
    }
    Ok(ShinvWitness {
        is_witness: !report.condition_holds,
        instance,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::m_interval_at;

    fn iv(a: u64, b: u64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn map(name: &str) -> SharedMap {
        maps::builtin(name).unwrap()
    }

    fn identity_instance(i: Interval, js: Vec<Interval>) -> CoveringInstance {
        CoveringInstance {
            f: map("identity"),
            i,
            js,
            p: Rat::frac(11, 10),
            q: Rat::frac(9, 10),
            r: Rat::frac(1, 10),
            m: Rat::frac(3, 2),
        }
    }

    #[test]
    fn identity_partial_cover() {
        let rep = evaluate_covering(&identity_instance(iv(10, 19), vec![iv(10, 15), iv(16, 24)])).unwrap();
        assert_eq!(rep.inclusion, vec![Rat::ONE, Rat::frac(4, 9)]);
        assert_eq!(rep.c, vec![iv(10, 15)]);
        assert_eq!(rep.ft_in_i, 4);
        assert_eq!(rep.omission, Rat::frac(2, 5));
        assert!(!rep.condition_holds);
    }

    #[test]
    fn identity_exact_tiling() {
        let rep = evaluate_covering(&identity_instance(iv(10, 24), vec![iv(10, 15), iv(16, 24)])).unwrap();
        assert_eq!(rep.c.len(), 2);
        assert!(rep.t.is_empty() && rep.t_union.is_empty());
        assert_eq!(rep.omission, Rat::ZERO);
        assert!(rep.condition_holds);
    }

    #[test]
    fn validation_order_and_errors() {
        let e = evaluate_covering(&identity_instance(iv(10, 19), vec![iv(10, 15), iv(15, 22)])).unwrap_err();
        assert_eq!(e, Error::NotDisjoint(iv(10, 15), iv(15, 22)));
        assert!(e.to_string().contains("intervals not disjoint"));
        let e = evaluate_covering(&identity_instance(iv(10, 19), vec![iv(10, 14), iv(16, 24)])).unwrap_err();
        assert!(matches!(e, Error::NotMInterval { .. }));
        let e = evaluate_covering(&identity_instance(iv(10, 10), vec![iv(10, 15)])).unwrap_err();
        assert!(matches!(e, Error::NotPlusInterval { .. }));
        let e = evaluate_covering(&identity_instance(iv(10, 19), vec![iv(10, 15)])).unwrap_err();
        assert_eq!(e, Error::NotCovered { target: iv(10, 19), missing: 16 });
    }

    #[test]
    fn shinv_block_covering_fails() {
        let js = tile_m_intervals(1 << 10, (1 << 11) - 1, Rat::frac(21, 20)).unwrap();
        let inst = CoveringInstance {
            f: map("sh-inv"),
            i: iv(1 << 10, 1535),
            js,
            p: Rat::frac(11, 10),
            q: Rat::frac(3, 4),
            r: Rat::frac(1, 2),
            m: Rat::frac(21, 20),
        };
        let rep = evaluate_covering(&inst).unwrap();
        assert!(!rep.condition_holds);
        assert!(rep.c.is_empty());
        for (j, f) in inst.js.iter().zip(&rep.inclusion) {
            if j.b() < 1 << 11 {
                assert!((*f - Rat::frac(1, 2)).abs() <= Rat::new(1, j.len() as i128).unwrap());
            }
        }
    }

    #[test]
    fn scan_path_agrees_with_preimage_path() {
        let dsl = maps::DslMap::new("sh-dsl", crate::fndsl::parse(crate::fndsl::SH_DSL).unwrap());
        let f: SharedMap = std::sync::Arc::new(dsl);
        let i = iv(40, 100);
        let js = tile_m_intervals(32, 127, Rat::frac(5, 4)).unwrap();
        let mk = |f: SharedMap| CoveringInstance {
            f,
            i,
            js: js.clone(),
            p: Rat::int(2),
            q: Rat::frac(1, 2),
            r: Rat::frac(1, 3),
            m: Rat::frac(5, 4),
        };
        assert_eq!(evaluate_covering(&mk(f)).unwrap(), evaluate_covering(&mk(map("sh"))).unwrap());
    }

    #[test]
    fn boundary_loss_examples() {
        assert_eq!(boundary_loss_bound(&iv(10, 19), Rat::frac(3, 2)).unwrap(), Rat::frac(29, 2));
        assert_eq!(boundary_loss_bound(&iv(100, 250), Rat::frac(11, 10)).unwrap(), Rat::int(35));
        let tiny = boundary_loss_bound(&iv(100, 250), Rat::frac(1001, 1000)).unwrap();
        assert_eq!(tiny, Rat::frac(35, 100));
        assert!(boundary_loss_bound(&iv(1, 2), Rat::ONE).is_err());
    }

    #[test]
    fn boundary_loss_bounds_identity_tilings() {
        for (a, b, t) in [(10u64, 19u64, 2i128), (100, 250, 10), (37, 400, 7), (1000, 5000, 30)] {
            let m = Rat::ONE + Rat::frac(1, t);
            let i = iv(a, b);
            let inside: u64 = tile_m_intervals(a, b, m)
                .unwrap()
                .iter()
                .filter(|j| i.contains_interval(j))
                .map(Interval::len)
                .sum();
            assert!(Rat::from(i.len() - inside) <= boundary_loss_bound(&i, m).unwrap());
        }
    }

    #[test]
    fn sh_m_choice() {
        let pp = sh_threshold(Rat::int(2), Rat::frac(1, 10));
        assert_eq!(pp, Rat::frac(181, 180));
        let m = sh_covering_m(pp, Rat::frac(1, 10)).unwrap();
        let gap = (pp - Rat::ONE) / (pp + Rat::ONE) / Rat::int(30);
        assert!(m - Rat::ONE < gap);
        assert!(m * m * m <= pp);
        let t = (m - Rat::ONE).recip().unwrap();
        let coarser = Rat::ONE + Rat::ONE / (t - Rat::ONE);
        assert!(!(coarser - Rat::ONE < gap && coarser * coarser * coarser <= pp));
    }

    #[test]
    fn sh_construction_example() {
        let i = iv(1 << 12, (1 << 13) + 1000);
        let cov = construct_covering_sh(&i, Rat::int(2), Rat::frac(1, 10)).unwrap();
        let union = IntervalUnion::new(cov.js.clone());
        assert_eq!(union.len(), cov.js.iter().map(Interval::len).sum::<u64>());
        let pre: Vec<u64> = (1..1 << 15).filter(|&x| i.contains(maps::sh(x).unwrap())).collect();
        let left = pre.iter().filter(|&&x| !union.contains(x)).count() as u64;
        assert_eq!(left, cov.omitted);
        assert!(Rat::from(left) < Rat::frac(1, 10) * Rat::from(i.len()));
        for j in &cov.js {
            assert!(j.is_m_interval(cov.m).unwrap());
            assert!(j.iter().all(|x| i.contains(maps::sh(x).unwrap())));
        }
    }

    #[test]
    fn sh_construction_on_a_block() {
        let cov = construct_covering_sh(&iv(1 << 12, (1 << 13) - 1), Rat::frac(3, 2), Rat::frac(1, 10)).unwrap();
        assert_eq!(cov.components.len(), 1);
        assert!(cov.components.iter().all(|c| c.kept));
    }

    #[test]
    fn sh_construction_precondition() {
        // 6/((2 - 1)(1/10)) = 60
        assert!(matches!(
            construct_covering_sh(&iv(60, 200), Rat::int(2), Rat::frac(1, 10)),
            Err(Error::Precondition(_))
        ));
        assert!(construct_covering_sh(&iv(61, 200), Rat::int(2), Rat::frac(1, 10)).is_ok());
        assert!(construct_covering_sh(&iv(100, 300), Rat::ONE, Rat::frac(1, 10)).is_err());
        assert!(construct_covering_sh(&iv(100, 300), Rat::int(2), Rat::ONE).is_err());
    }

    #[test]
    fn witness_examples() {
        let w = witness_shinv(10, Rat::frac(21, 20), Rat::frac(3, 4)).unwrap();
        assert!(w.is_witness);
        assert_eq!(w.report.omission, Rat::ONE);
        assert_eq!(w.instance.i, iv(1024, 1535));

        let w = witness_shinv(10, Rat::frac(21, 20), Rat::frac(2, 5)).unwrap();
        assert!(!w.is_witness);
        assert!(w.report.t.is_empty() || w.report.t.iter().all(|j| j.b() >= 2048));

        assert!(witness_shinv(3, Rat::frac(21, 20), Rat::frac(3, 4)).is_err());
        assert!(witness_shinv(10, Rat::frac(5, 4), Rat::frac(3, 4)).is_err());
    }

    #[test]
    fn search_examples() {
        let out = search_violation(
            &map("sh-inv"),
            Rat::frac(7, 5),
            Rat::frac(3, 4),
            Rat::frac(1, 2),
            Rat::frac(21, 20),
            100,
            50,
        )
        .unwrap();
        let (inst, rep) = out.witness.expect("violation");
        assert_eq!(inst.i, iv(128, 191));
        assert!(!rep.condition_holds);

        let out = search_violation(
            &map("identity"),
            Rat::int(2),
            Rat::frac(99, 100),
            Rat::frac(1, 2),
            Rat::ONE + Rat::frac(1, 64),
            1000,
            50,
        )
        .unwrap();
        assert!(out.witness.is_none());
        assert_eq!(out.examined, 50);
    }

    #[test]
    fn canonical_tiles_start_at_preimage() {
        let inst = canonical_covering(
            &map("identity"),
            &iv(100, 300),
            Rat::int(2),
            Rat::frac(1, 2),
            Rat::frac(1, 2),
            Rat::frac(3, 2),
        )
        .unwrap();
        assert_eq!(inst.js[0], m_interval_at(100, Rat::frac(3, 2)).unwrap());
        assert!(inst.js.last().unwrap().b() >= 300);
    }

    #[test]
    fn instance_file_round_trip() {
        let w = witness_shinv(6, Rat::frac(9, 8), Rat::frac(3, 4)).unwrap();
        let text = serde_json::to_string(&w.instance.to_file()).unwrap();
        assert!(text.contains("\"I\":[64,95]"));
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        let inst = CoveringInstance::from_file(&back).unwrap();
        assert_eq!(evaluate_covering(&inst).unwrap(), w.report);
    }
}
