//! Sets built to expose density behaviour: a set with no density, the image
//! of the evens under the inverse shuffle, and the stage-wise construction of
//! a set with density `D = (1 − q)/2` whose image under a map violating the
//! covering condition is thin on chosen intervals.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::covering::{evaluate_covering, preimage, shinv_instance, CoveringInstance, InstanceFile};
use crate::density::{estimate_limits, prefix_density, DensityProfile};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::maps::{sh_inv, NatMap, SharedMap};
use crate::rat::Rat;
use crate::sets::{BitWindow, BitWindowSet, IntervalSequenceSet, NatSet, ResidueSet};

/// `⋃_{m ≥ 0} [4^m, 2·4^m − 1]`: density swings between 1/3 and 2/3.
pub fn no_density_example() -> IntervalSequenceSet {
    IntervalSequenceSet::new("nodensity", |m| {
        let lo = 1u64.checked_shl(2 * u32::try_from(m).ok()?)?;
        if lo == 0 || 2 * m >= 63 {
            return None;
        }
        Interval::new(lo, 2 * lo - 1).ok()
    })
}

/// `sh⁻¹(evens) = {2} ∪ ⋃_{i ≥ 2} [2^i, (3/2)2^i − 1]`.
pub fn sh_inv_evens_set() -> IntervalSequenceSet {
    IntervalSequenceSet::new("sh-inv(evens)", |t| {
        if t == 0 {
            return Interval::new(2, 2).ok();
        }
        if t >= 63 {
            return None;
        }
        let base = 1u64 << (t + 1);
        Interval::new(base, base + base / 2 - 1).ok()
    })
}

/// `x ∈ S` exactly when `⌊D(x − 1)⌋ < ⌊D·x⌋`, which keeps `‖S_x‖ = ⌊D·x⌋`.
pub fn default_include(d: Rat, x: u64) -> Result<bool> {
    let d = d.require("D", d >= Rat::ZERO && d <= Rat::ONE, "must lie in [0, 1]")?;
    if x == 0 {
        return Err(Error::Zero);
    }
    Ok(d.floor_mul(x - 1)? < d.floor_mul(x)?)
}

/// What a stage asks of a [`WitnessSource`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageRequest {
    pub k: u32,
    /// `1 + 1/k`
    pub m: Rat,
    /// Every `J` must start above this.
    pub m_k: u64,
    /// The target `I` must start above this.
    pub n_k: u64,
    pub q: Rat,
    pub r: Rat,
}

/// Supplies instances where the covering condition fails.
pub trait WitnessSource {
    fn describe(&self) -> String;

    fn witness(&self, f: &SharedMap, req: &StageRequest) -> Result<CoveringInstance>;
}

/// Witnesses for `sh⁻¹` from the smallest fitting dyadic block.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShInvWitnessSource;

impl WitnessSource for ShInvWitnessSource {
    fn describe(&self) -> String {
        "builtin sh-inv block witnesses".into()
    }

    fn witness(&self, f: &SharedMap, req: &StageRequest) -> Result<CoveringInstance> {
        if f.name() != "sh-inv" {
            return Err(Error::BadWitness(format!(
                "builtin witnesses exist only for sh-inv, not {}",
                f.name()
            )));
        }
        let floor = req.m_k.max(req.n_k);
        let mut i = (64 - floor.leading_zeros()).max(4);
        while i <= 61 {
            match shinv_instance(i, req.m, req.q, req.r) {
                Ok(w) if w.is_witness && has_room(&w.instance.js, req.q) => return Ok(w.instance),
                Ok(_) | Err(Error::Precondition(_)) => i += 1,
                Err(e) => return Err(e),
            }
        }
        Err(Error::BadWitness(format!("no block fits stage {}", req.k)))
    }
}

/// Witnesses read from instance files; the first one fitting the stage is
/// used. The file's `q` and `r` are replaced by the builder's.
#[derive(Debug, Clone)]
pub struct FileWitnessSource {
    instances: Vec<InstanceFile>,
}

impl FileWitnessSource {
    pub fn new(instances: Vec<InstanceFile>) -> Self {
        FileWitnessSource { instances }
    }

    /// Reads one instance object or a list of them.
    pub fn load(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum OneOrMany {
            One(InstanceFile),
            Many(Vec<InstanceFile>),
        }
        let io = |e: &dyn fmt::Display| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let text = std::fs::read_to_string(path).map_err(|e| io(&e))?;
        let instances = match serde_json::from_str(&text).map_err(|e| io(&e))? {
            OneOrMany::One(i) => vec![i],
            OneOrMany::Many(v) => v,
        };
        Ok(FileWitnessSource { instances })
    }
}

impl WitnessSource for FileWitnessSource {
    fn describe(&self) -> String {
        format!("{} instances from file", self.instances.len())
    }

    fn witness(&self, f: &SharedMap, req: &StageRequest) -> Result<CoveringInstance> {
        let fit = self.instances.iter().find(|w| {
            w.m == req.m && w.i.a() > req.n_k && w.js.iter().all(|j| j.a() > req.m_k)
        });
        let fit = fit.ok_or_else(|| {
            Error::BadWitness(format!(
                "no instance with m = {} above M = {} and N = {}",
                req.m, req.m_k, req.n_k
            ))
        })?;
        Ok(CoveringInstance {
            f: f.clone(),
            i: fit.i,
            js: fit.js.clone(),
            p: fit.p,
            q: req.q,
            r: req.r,
            m: fit.m,
        })
    }
}

/// `(1 − q)‖J‖ > 4` for every `J`.
fn has_room(js: &[Interval], q: Rat) -> bool {
    js.iter()
        .all(|j| (Rat::ONE - q) * Rat::from(j.len()) > Rat::int(4))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdversaryParams {
    pub q: Rat,
    pub r: Rat,
    pub stages: u32,
    /// The set is materialized on `[1, window_cap]`.
    pub window_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub k: u32,
    pub m: Rat,
    pub l_prev: u64,
    pub m_k: u64,
    pub n_k: u64,
    pub l_k: u64,
    pub witness_i: Interval,
    pub p: Rat,
    pub intervals: usize,
    /// `‖f(S) ∩ I_k‖`
    pub image_count: u64,
    pub image_density: Rat,
    /// `D − D·r/2`
    pub image_bound: Rat,
    /// Largest share of `J ∩ f⁻¹(I)` placed in `S`, over the stage's `J`s.
    pub max_fill_fraction: Rat,
    /// `max |‖S_n‖/n − D|` over `n ∈ [l_prev + 1, l_k]`.
    pub max_deviation: Rat,
    pub deviation_at: u64,
    /// `2/k`
    pub deviation_bound: Rat,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdversaryReport {
    pub map: String,
    pub witnesses: String,
    #[serde(rename = "D")]
    pub d: Rat,
    pub q: Rat,
    pub r: Rat,
    pub stages_requested: u32,
    pub stages: Vec<StageReport>,
    pub window: Interval,
    pub final_prefix_density: Rat,
    pub truncated: Option<String>,
    pub ok: bool,
}

/// Largest `|count/n − D|` seen, as an unreduced fraction.
struct DeviationTracker {
    dn: i128,
    dd: i128,
    num: u128,
    den: u128,
    at: u64,
}

impl DeviationTracker {
    fn new(d: Rat) -> Self {
        DeviationTracker {
            dn: d.numer(),
            dd: d.denom(),
            num: 0,
            den: 1,
            at: 0,
        }
    }

    fn observe(&mut self, n: u64, count: u64) {
        let num = (count as i128 * self.dd - self.dn * n as i128).unsigned_abs();
        let den = n as u128 * self.dd as u128;
        if self.at == 0 || num * self.den > self.num * den {
            self.num = num;
            self.den = den;
            self.at = n;
        }
    }

    fn value(&self) -> Rat {
        Rat::new(self.num as i128, self.den as i128).expect("nonzero")
    }
}

struct Builder<'a> {
    f: &'a dyn NatMap,
    d: Rat,
    bits: BitWindow,
    included: u64,
    cursor: u64,
}

impl Builder<'_> {
    /// Assigns `cursor + 1 ..= upto` by the default rule.
    fn default_run(&mut self, upto: u64, dev: &mut Option<&mut DeviationTracker>) -> Result<()> {
        while self.cursor < upto {
            self.cursor += 1;
            let x = self.cursor;
            if default_include(self.d, x)? {
                self.bits.insert(x);
                self.included += 1;
            }
            if let Some(t) = dev.as_deref_mut() {
                t.observe(x, self.included);
            }
        }
        Ok(())
    }

    /// Fills `J` up to `⌊D·d⌋` members, taking points whose image avoids `I`
    /// first and the smallest first within each group. Returns the share of
    /// `J ∩ f⁻¹(I)` that was used, if that set is nonempty.
    fn fill(&mut self, j: &Interval, target: &Interval, dev: &mut DeviationTracker) -> Result<Option<Rat>> {
        let goal = self.d.floor_mul(j.b())? as u64;
        let need = goal.saturating_sub(self.included);
        let mut outside = Vec::new();
        let mut inside = Vec::new();
        for x in j.iter() {
            if target.contains(self.f.apply(x)?) {
                inside.push(x);
            } else {
                outside.push(x);
            }
        }
        let take_inside = (need as usize).saturating_sub(outside.len());
        if take_inside > inside.len() {
            return Err(Error::BadWitness(format!("{j} has no room for {need} members")));
        }
        for &x in outside.iter().take(need as usize).chain(&inside[..take_inside]) {
            self.bits.insert(x);
        }
        let mut count = self.included;
        for x in j.iter() {
            count += self.bits.get(x) as u64;
            dev.observe(x, count);
        }
        self.included = count;
        self.cursor = j.b();
        if inside.is_empty() {
            Ok(None)
        } else {
            Ok(Some(Rat::new(take_inside as i128, inside.len() as i128)?))
        }
    }
}

/// Runs the stage-wise construction of a set of density `D = (1 − q)/2`.
///
/// At stage `k` the builder sets
/// `M_k = ⌈max((1 + 1/k)L_{k−1}, 4k(1 − r)/(r(1 − q)))⌉` and
/// `N_k = max{f(t) : t ≤ M_k} + 1`, asks `witnesses` for a failing covering
/// with `m = 1 + 1/k` above those bounds, and assigns points up to the end
/// `L_k` of its last interval. Outside the witness intervals membership
/// follows [`default_include`]; inside each `J` the builder tops the count up
/// to `⌊D·d⌋` using points whose image misses `I` first. After the last stage
/// the default rule runs to the window end. Hitting the window cap stops the
/// stages early with a note in the report.
pub fn build_adversarial_set(
    f: &SharedMap,
    params: &AdversaryParams,
    witnesses: &dyn WitnessSource,
) -> Result<(BitWindowSet, AdversaryReport)> {
    let q = params.q.require_unit_open("q")?;
    let r = params
        .r
        .require("r", params.r > Rat::ZERO && params.r < Rat::frac(1, 2), "must lie in (0, 1/2)")?;
    if params.stages == 0 {
        return Err(Error::Precondition("at least one stage is required".into()));
    }
    let window = Interval::new(1, params.window_cap)?;
    let d = (Rat::ONE - q) / Rat::int(2);
    let image_bound = d - d * r / Rat::int(2);
    let mut b = Builder {
        f: f.as_ref(),
        d,
        bits: BitWindow::new(window),
        included: 0,
        cursor: 0,
    };

    let mut max_image = 0u64;
    let mut scanned = 0u64;
    let mut stages = Vec::new();
    let mut targets = Vec::new();
    let mut truncated = None;
    let floor_m = Rat::int(4) * (Rat::ONE - r) / (r * (Rat::ONE - q));

    for k in 1..=params.stages {
        let kr = Rat::from(k as u64);
        let m = Rat::ONE + kr.recip()?;
        let l_prev = b.cursor;
        let m_k = u64::try_from(m.checked_mul(&Rat::from(l_prev))?.max(floor_m * kr).ceil())
            .map_err(|_| Error::Overflow("M_k"))?;
        if m_k >= params.window_cap {
            truncated = Some(format!("window cap {} reached at stage {k}", params.window_cap));
            break;
        }
        while scanned < m_k {
            scanned += 1;
            max_image = max_image.max(f.apply(scanned)?);
        }
        let n_k = max_image + 1;
        let req = StageRequest { k, m, m_k, n_k, q, r };
        let mut inst = witnesses.witness(f, &req)?;
        inst.js.sort();
        check_witness(&inst, &req)?;
        let l_k = inst.js.iter().map(Interval::b).max().expect("nonempty");
        if l_k > params.window_cap {
            truncated = Some(format!(
                "window cap {} reached at stage {k} (needs {l_k})",
                params.window_cap
            ));
            break;
        }

        let mut dev = DeviationTracker::new(d);
        let mut max_fill = Rat::ZERO;
        for j in &inst.js {
            b.default_run(j.a() - 1, &mut Some(&mut dev))?;
            if let Some(share) = b.fill(j, &inst.i, &mut dev)? {
                max_fill = max_fill.max(share);
            }
        }
        let deviation_bound = Rat::frac(2, k as i128);
        stages.push(StageReport {
            k,
            m,
            l_prev,
            m_k,
            n_k,
            l_k,
            witness_i: inst.i,
            p: inst.p,
            intervals: inst.js.len(),
            image_count: 0,
            image_density: Rat::ZERO,
            image_bound,
            max_fill_fraction: max_fill,
            max_deviation: dev.value(),
            deviation_at: dev.at,
            deviation_bound,
            ok: false,
        });
        targets.push(inst.i);
    }
    b.default_run(params.window_cap, &mut None)?;
    let set = b.bits.freeze();

    for (stage, target) in stages.iter_mut().zip(&targets) {
        let pre = preimage(f.as_ref(), target)?;
        if pre.max().is_some_and(|x| x > params.window_cap) {
            return Err(Error::Precondition(format!(
                "preimage of {target} reaches past the window cap {}",
                params.window_cap
            )));
        }
        stage.image_count = pre.parts().iter().map(|p| set.count_in(p)).sum();
        stage.image_density = Rat::new(stage.image_count as i128, target.len() as i128)?;
        stage.ok = stage.max_deviation < stage.deviation_bound && stage.image_density < image_bound;
    }

    let final_prefix_density = prefix_density(&set, params.window_cap)?;
    let ok = truncated.is_none() && stages.iter().all(|s| s.ok);
    let report = AdversaryReport {
        map: f.name().to_string(),
        witnesses: witnesses.describe(),
        d,
        q,
        r,
        stages_requested: params.stages,
        stages,
        window,
        final_prefix_density,
        truncated,
        ok,
    };
    Ok((set, report))
}

fn check_witness(inst: &CoveringInstance, req: &StageRequest) -> Result<()> {
    if inst.js.is_empty() {
        return Err(Error::BadWitness("no covering intervals".into()));
    }
    if inst.m != req.m {
        return Err(Error::BadWitness(format!("m = {} but stage {} needs {}", inst.m, req.k, req.m)));
    }
    if inst.i.a() <= req.n_k {
        return Err(Error::BadWitness(format!("{} does not start above N = {}", inst.i, req.n_k)));
    }
    if let Some(j) = inst.js.iter().find(|j| j.a() <= req.m_k) {
        return Err(Error::BadWitness(format!("{j} does not start above M = {}", req.m_k)));
    }
    if !has_room(&inst.js, req.q) {
        return Err(Error::BadWitness("an interval J has (1 - q)|J| <= 4".into()));
    }
    let rep = evaluate_covering(inst)?;
    if rep.condition_holds {
        return Err(Error::BadWitness(format!(
            "the covering condition holds on {} (omission {})",
            inst.i, rep.omission
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemoReport {
    pub n_max: u64,
    /// Prefix density of the evens at `n_max`.
    pub evens_density: Rat,
    pub profile: DensityProfile,
    /// Window on which the interval form was compared with `{sh⁻¹(2t)}`.
    pub brute_force_window: Interval,
    pub brute_force_agrees: bool,
}

/// The evens have density 1/2 but their image under `sh⁻¹` oscillates
/// between 1/2 and 2/3.
pub fn shinv_nonpreservation_demo(n_max: u64) -> Result<DemoReport> {
    if n_max < 1 << 10 {
        return Err(Error::Precondition(format!("n_max = {n_max} must be at least 2^10")));
    }
    let image = sh_inv_evens_set();
    let profile = estimate_limits(&image, n_max, Rat::frac(1, 4), 64)?;
    let window = Interval::new(1, n_max.min(1 << 16))?;
    let mut brute = BitWindow::new(window);
    for t in 1..=window.b() / 2 {
        let v = sh_inv(2 * t)?;
        if window.contains(v) {
            brute.insert(v);
        }
    }
    let brute_force_agrees = window.iter().all(|n| brute.get(n) == image.contains(n));
    Ok(DemoReport {
        n_max,
        evens_density: prefix_density(&ResidueSet::evens(), n_max)?,
        profile,
        brute_force_window: window,
        brute_force_agrees,
    })
}
