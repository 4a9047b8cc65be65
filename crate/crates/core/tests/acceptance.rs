//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Each check compares library output against closed forms or against
//! brute-force oracles written independently here.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use natdensity::adversary::{build_adversarial_set, no_density_example, AdversaryParams, ShInvWitnessSource};
use natdensity::covering::{
    construct_covering_sh, evaluate_covering, search_violation, witness_shinv, CoveringInstance,
};
use natdensity::density::{check_thm1, estimate_limits, prefix_density, ScanMode, Thm1Params};
use natdensity::fndsl::{self, SH_DSL};
use natdensity::interval::tile_m_intervals;
use natdensity::maps::{self, sh, sh_inv, sh_preimage_interval, verify_injective, Shuffle};
use natdensity::sets::ResidueSet;
use natdensity::{Error, Interval, NatSet, Rat, SharedMap};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn iv(a: u64, b: u64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn map(name: &str) -> SharedMap {
    maps::builtin(name).unwrap()
}

fn within(x: Rat, target: Rat, tol: Rat) -> bool {
    (x - target).abs() <= tol
}

fn criterion_1() -> Outcome {
    let s = no_density_example();
    for m in 0..=12u32 {
        let odd_end = (1u64 << (2 * m + 1)) - 1;
        let even_end = (1u64 << (2 * m + 2)) - 1;
        let count = s.count_leq(odd_end);
        ensure(count == ((1u64 << (2 * m + 2)) - 1) / 3, || format!("count at {odd_end} is {count}"))?;
        // (2/3)·(2^{2m+1} − 1/2)/(2^{2m+1} − 1) and (1/3)·(2^{2m+2} − 1)/(2^{2m+2} − 1)
        let top = Rat::from(1u64 << (2 * m + 1));
        let high = Rat::frac(2, 3) * (top - Rat::frac(1, 2)) / (top - Rat::ONE);
        let low = Rat::frac(1, 3) * Rat::from(even_end) / Rat::from(even_end);
        let got_high = prefix_density(&s, odd_end).map_err(|e| e.to_string())?;
        let got_low = prefix_density(&s, even_end).map_err(|e| e.to_string())?;
        ensure(got_high == high, || format!("m={m}: {got_high} != {high}"))?;
        ensure(got_low == low, || format!("m={m}: {got_low} != {low}"))?;
    }
    Ok("m = 0..=12 exact".into())
}

fn criterion_2() -> Outcome {
    let s = no_density_example();
    let p = estimate_limits(&s, 1 << 24, Rat::frac(1, 4), 64).map_err(|e| e.to_string())?;
    let tol = Rat::frac(1, 100);
    ensure(within(p.limsup_est, Rat::frac(2, 3), tol), || format!("limsup_est {}", p.limsup_est))?;
    ensure(within(p.liminf_est, Rat::frac(1, 3), tol), || format!("liminf_est {}", p.liminf_est))?;
    // the dyadic extrema are sampled and hit exactly
    for m in 0..=10u32 {
        for n in [(1u64 << (2 * m + 1)) - 1, (1u64 << (2 * m + 2)) - 1] {
            let sample = p.samples.iter().find(|x| x.n == n).ok_or(format!("{n} not sampled"))?;
            let exact = Rat::new(s.count_leq(n) as i128, n as i128).unwrap();
            ensure(sample.density == exact, || format!("sample at {n}"))?;
        }
    }
    Ok(format!(
        "limsup_est {:.6}, liminf_est {:.6}",
        p.limsup_est.to_f64(),
        p.liminf_est.to_f64()
    ))
}

fn criterion_3() -> Outcome {
    let top = 1u64 << 22;
    let rep = verify_injective(&Shuffle, &iv(1, top)).map_err(|e| e.to_string())?;
    ensure(rep.ok, || format!("collision {:?}", rep.collision))?;
    let bad = (1..=top).into_par_iter().find_first(|&k| {
        sh(sh_inv(k).unwrap()).unwrap() != k || sh_inv(sh(k).unwrap()).unwrap() != k
    });
    ensure(bad.is_none(), || format!("round trip fails at {bad:?}"))?;
    for i in 0..=21u32 {
        let (lo, hi) = (1u64 << i, (1u64 << (i + 1)) - 1);
        let mut seen = vec![false; (hi - lo + 1) as usize];
        for k in lo..=hi {
            let v = sh(k).unwrap();
            ensure((lo..=hi).contains(&v), || format!("sh({k}) = {v} leaves block {i}"))?;
            ensure(!seen[(v - lo) as usize], || format!("sh repeats {v} in block {i}"))?;
            seen[(v - lo) as usize] = true;
        }
    }
    Ok("injective, inverse both ways, blocks 0..=21 permuted".into())
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let limit = 1u64 << 16;
    let cases: Vec<(u64, u64)> = (0..10_000)
        .map(|_| {
            let a = rng.gen_range(1..=limit);
            let b = rng.gen_range(a..=limit);
            (a, b)
        })
        .collect();
    let bad = cases.par_iter().find_first(|&&(a, b)| {
        let pre = sh_preimage_interval(&iv(a, b));
        // sh keeps [1, 3] and every block fixed, so the preimage lies in [1, 2^17)
        let start = if a < 4 { 1 } else { 1u64 << (63 - a.leading_zeros()) };
        let end = if b < 4 { 3 } else { (1u64 << (64 - b.leading_zeros())) - 1 };
        let brute: Vec<u64> = (start..=end).filter(|&k| (a..=b).contains(&sh(k).unwrap())).collect();
        pre.iter().collect::<Vec<_>>() != brute || pre.component_count() > 3
    });
    ensure(bad.is_none(), || format!("mismatch on {bad:?}"))?;
    Ok("10^4 intervals match, at most 3 components".into())
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let (p, r) = (Rat::int(2), Rat::frac(1, 10));
    let mut done = 0;
    while done < 20 {
        let a = rng.gen_range((1u64 << 7) + 1..1 << 16);
        if Rat::from(a) * (p - Rat::ONE) * r <= Rat::int(6) {
            continue;
        }
        let b = rng.gen_range(2 * a + 1..=8 * a);
        let i = iv(a, b);
        let cov = construct_covering_sh(&i, p, r).map_err(|e| format!("{i}: {e}"))?;
        let mut js = cov.js.clone();
        js.sort();
        for w in js.windows(2) {
            ensure(w[0].b() < w[1].a(), || format!("{i}: {} meets {}", w[0], w[1]))?;
        }
        for j in &js {
            // exact m-interval: b == ⌊m·a⌋
            let fl = (cov.m.numer() * j.a() as i128).div_euclid(cov.m.denom());
            ensure(fl == j.b() as i128, || format!("{i}: {j} is not an m-interval"))?;
        }
        let start = 1u64 << (63 - a.leading_zeros());
        let end = (1u64 << (64 - b.leading_zeros())) - 1;
        let covered: HashSet<u64> = js.iter().flat_map(|j| j.iter()).collect();
        let mut outside = 0u64;
        for k in start..=end {
            let inside_pre = i.contains(sh(k).unwrap());
            if inside_pre && !covered.contains(&k) {
                outside += 1;
            }
            ensure(inside_pre || !covered.contains(&k), || format!("{i}: tile point {k} outside the preimage"))?;
        }
        ensure(Rat::from(outside) < r * Rat::from(i.len()), || {
            format!("{i}: {outside} uncovered, bound {}", r * Rat::from(i.len()))
        })?;
        done += 1;
    }
    Ok("20 intervals, omission strictly below r·|I|".into())
}

/// Which check an oracle or the evaluator tripped over first.
#[derive(Debug, PartialEq, Eq)]
enum Verdict {
    Overlap,
    NotM,
    NotPlus,
    NotCovered(u64),
    Report {
        inclusion: Vec<Rat>,
        c: Vec<Interval>,
        t: Vec<Interval>,
        ft: u64,
        omission: Rat,
        holds: bool,
    },
}

fn oracle(inst: &CoveringInstance) -> Verdict {
    let mut seen = HashSet::new();
    for j in &inst.js {
        for x in j.iter() {
            if !seen.insert(x) {
                return Verdict::Overlap;
            }
        }
    }
    let (mn, md) = (inst.m.numer(), inst.m.denom());
    for j in &inst.js {
        let (a, b) = (j.a() as i128, j.b() as i128);
        if !(mn * a - md < b * md && b * md <= mn * a) {
            return Verdict::NotM;
        }
    }
    let (pn, pd) = (inst.p.numer(), inst.p.denom());
    if inst.i.b() as i128 * pd <= pn * inst.i.a() as i128 {
        return Verdict::NotPlus;
    }
    let target: HashSet<u64> = inst.i.iter().collect();
    let images: Vec<HashSet<u64>> = inst
        .js
        .iter()
        .map(|j| j.iter().map(|x| inst.f.apply(x).unwrap()).collect())
        .collect();
    if let Some(y) = inst.i.iter().find(|y| !images.iter().any(|s| s.contains(y))) {
        return Verdict::NotCovered(y);
    }
    let mut inclusion = Vec::new();
    let (mut c, mut t, mut ft) = (Vec::new(), Vec::new(), 0u64);
    let mut t_image = HashSet::new();
    for (j, img) in inst.js.iter().zip(&images) {
        let hits = img.intersection(&target).count() as u64;
        let frac = Rat::new(hits as i128, j.len() as i128).unwrap();
        inclusion.push(frac);
        if frac >= inst.q {
            c.push(*j);
        } else {
            t.push(*j);
            t_image.extend(img.iter().copied());
        }
    }
    ft += t_image.intersection(&target).count() as u64;
    let size = inst.i.len() as i128;
    Verdict::Report {
        inclusion,
        c,
        t,
        ft,
        omission: Rat::new(ft as i128, size).unwrap(),
        holds: (ft as i128) * inst.r.denom() < inst.r.numer() * size,
    }
}

fn verdict(inst: &CoveringInstance) -> Result<Verdict, String> {
    match evaluate_covering(inst) {
        Ok(rep) => Ok(Verdict::Report {
            inclusion: rep.inclusion,
            c: rep.c,
            t: rep.t,
            ft: rep.ft_in_i,
            omission: rep.omission,
            holds: rep.condition_holds,
        }),
        Err(Error::NotDisjoint(..)) => Ok(Verdict::Overlap),
        Err(Error::NotMInterval { .. }) => Ok(Verdict::NotM),
        Err(Error::NotPlusInterval { .. }) => Ok(Verdict::NotPlus),
        Err(Error::NotCovered { missing, .. }) => Ok(Verdict::NotCovered(missing)),
        Err(e) => Err(e.to_string()),
    }
}

fn random_instance(rng: &mut StdRng) -> CoveringInstance {
    let limit = 1u64 << 12;
    let f = map(["identity", "sh", "sh-inv"][rng.gen_range(0..3)]);
    let m = Rat::ONE + Rat::frac(1, rng.gen_range(1..24));
    let p = Rat::ONE + Rat::frac(1, rng.gen_range(1..12));
    let a = rng.gen_range(1..limit / 3);
    // mostly +p targets, sometimes one too short
    let b = if rng.gen_range(0..10) == 0 {
        rng.gen_range(a..=p.floor_mul(a).unwrap() as u64)
    } else {
        (p.floor_mul(a).unwrap() as u64 + 1 + rng.gen_range(0..600)).min(limit - 1)
    };
    let i = iv(a, b);
    let frac = |rng: &mut StdRng| {
        let d = rng.gen_range(2..=20);
        Rat::frac(rng.gen_range(1..d), d)
    };
    let (q, r) = (frac(rng), frac(rng));
    // canonical tiling of the preimage span, then an occasional defect
    let pre: Vec<u64> = (1..1u64 << 13).filter(|&x| i.contains(f.apply(x).unwrap())).collect();
    let mut js: Vec<Interval> = tile_m_intervals(pre[0], *pre.last().unwrap(), m)
        .unwrap()
        .into_iter()
        .filter(|j| pre.iter().any(|x| j.contains(*x)))
        .collect();
    match rng.gen_range(0..8) {
        0 if js.len() > 1 => {
            let k = rng.gen_range(0..js.len());
            js.remove(k);
        }
        1 => {
            let k = rng.gen_range(0..js.len());
            let j = js[k];
            js[k] = iv(j.a(), j.b() + 1);
        }
        2 if js.len() > 1 => {
            let j = js[1];
            js.push(iv(j.a(), j.b()));
        }
        _ => {}
    }
    CoveringInstance { f, i, js, p, q, r, m }
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let instances: Vec<CoveringInstance> = (0..1000).map(|_| random_instance(&mut rng)).collect();
    let results: Vec<Result<(bool, bool), String>> = instances
        .par_iter()
        .map(|inst| {
            let got = verdict(inst)?;
            let want = oracle(inst);
            if got != want {
                return Err(format!("{inst:?}: evaluator {got:?}, oracle {want:?}"));
            }
            Ok((matches!(want, Verdict::Report { .. }), matches!(want, Verdict::Report { holds: false, .. })))
        })
        .collect();
    let mut reports = 0;
    let mut failing = 0;
    for r in results {
        let (rep, fail) = r?;
        reports += rep as u32;
        failing += fail as u32;
    }
    ensure(reports >= 500, || format!("only {reports} instances reached a report"))?;
    Ok(format!("1000 agree ({reports} evaluated, {failing} violate the condition)"))
}

fn criterion_7() -> Outcome {
    for i in 6..=16u32 {
        let w = witness_shinv(i, Rat::frac(21, 20), Rat::frac(3, 4)).map_err(|e| format!("i={i}: {e}"))?;
        ensure(!w.report.condition_holds && w.report.omission == Rat::ONE, || {
            format!("i={i}: omission {}", w.report.omission)
        })?;
    }
    let args = (Rat::frac(7, 5), Rat::frac(3, 4), Rat::frac(49, 100), Rat::frac(21, 20));
    let run = |name: &str| {
        search_violation(&map(name), args.0, args.1, args.2, args.3, 100, 50).map_err(|e| e.to_string())
    };
    let found = run("sh-inv")?;
    let (inst, rep) = found.witness.ok_or("no violation found for sh-inv")?;
    ensure(!rep.condition_holds, || "witness holds".into())?;
    let base = inst.i.a();
    ensure(base.is_power_of_two() && inst.i.b() == base + base / 2 - 1, || format!("witness I = {}", inst.i))?;
    for name in ["identity", "sh"] {
        let out = run(name)?;
        ensure(out.witness.is_none(), || format!("{name}: unexpected violation"))?;
    }
    Ok(format!("witnesses for i in 6..=16; search finds I = {}", inst.i))
}

fn criterion_8() -> Outcome {
    let f = map("sh-inv");
    let cap = 1u64 << 22;
    let params = AdversaryParams {
        q: Rat::frac(3, 4),
        r: Rat::frac(49, 100),
        stages: 8,
        window_cap: cap,
    };
    let (set, rep) = build_adversarial_set(&f, &params, &ShInvWitnessSource).map_err(|e| e.to_string())?;
    let d = Rat::frac(1, 8);
    ensure(rep.d == d, || format!("D = {}", rep.d))?;
    ensure(rep.stages.len() == 8 && rep.truncated.is_none(), || format!("{:?}", rep.truncated))?;

    // prefix counts from membership alone
    let mut prefix = vec![0u64; cap as usize + 1];
    for n in 1..=cap {
        prefix[n as usize] = prefix[n as usize - 1] + set.contains(n) as u64;
    }
    let bound_img = d - d * params.r / Rat::int(2);
    for s in &rep.stages {
        let k = s.k as i128;
        // |c/n − 1/8| < 2/k  ⟺  |8c − n|·k < 16n
        for n in s.l_prev + 1..=s.l_k {
            let c = prefix[n as usize] as i128;
            ensure((8 * c - n as i128).abs() * k < 16 * n as i128, || format!("stage {k}: deviation at {n}"))?;
        }
        let hits = (1..=cap)
            .into_par_iter()
            .filter(|&x| set.contains(x) && s.witness_i.contains(sh_inv(x).unwrap()))
            .count() as u64;
        let dens = Rat::new(hits as i128, s.witness_i.len() as i128).unwrap();
        ensure(dens <= bound_img, || format!("stage {k}: image density {dens}"))?;
    }
    let last = Rat::new(prefix[cap as usize] as i128, cap as i128).unwrap();
    ensure(within(last, d, Rat::frac(2, 100)), || format!("final density {last}"))?;
    Ok(format!(
        "L_8 = {}, final density {}",
        rep.stages.last().unwrap().l_k,
        last
    ))
}

fn criterion_9() -> Outcome {
    let params = |d: Rat, eps: Rat| Thm1Params {
        d,
        m: Rat::frac(3, 2),
        epsilon: eps,
        n: 1000,
        scan_limit: 100_000,
        mode: ScanMode::Auto,
    };
    let evens = ResidueSet::evens();
    let threes = ResidueSet::multiples(3).unwrap();
    for (name, set, d) in [("evens", &evens, Rat::frac(1, 2)), ("multiples:3", &threes, Rat::frac(1, 3))] {
        let r = check_thm1(set, &params(d, Rat::frac(1, 100))).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("{name}: worst {} at {}", r.worst_deviation, r.worst_interval))?;
    }
    let r = check_thm1(&no_density_example(), &params(Rat::frac(1, 2), Rat::frac(1, 10))).map_err(|e| e.to_string())?;
    ensure(!r.pass, || "nodensity passed".into())?;
    ensure(r.worst_density == Rat::ZERO || r.worst_density == Rat::ONE, || {
        format!("witness density {}", r.worst_density)
    })?;
    Ok(format!("nodensity witness {} with density {}", r.worst_interval, r.worst_density))
}

fn criterion_10() -> Outcome {
    let spec = fndsl::parse(SH_DSL).map_err(|e| e.to_string())?;
    let window = iv(1, 1 << 16);
    let rep = fndsl::check(&spec, &window).map_err(|e| e.to_string())?;
    ensure(rep.ok(), || format!("{rep:?}"))?;
    let bad = window.iter().find(|&k| spec.eval(k).ok() != Some(sh(k).unwrap()));
    ensure(bad.is_none(), || format!("differs at {bad:?}"))?;
    Ok("total, injective and equal to sh on [1, 2^16]".into())
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("nodensity closed forms", criterion_1, 1),
        ("nodensity limit estimates", criterion_2, 10),
        ("sh bijectivity", criterion_3, 30),
        ("sh preimage structure", criterion_4, 30),
        ("sh covering construction", criterion_5, 30),
        ("covering evaluator vs oracle", criterion_6, 60),
        ("sh-inv violations", criterion_7, 60),
        ("adversarial set end to end", criterion_8, 60),
        ("interval criterion checker", criterion_9, 30),
        ("DSL fidelity", criterion_10, 10),
    ];
    let mut failed = 0;
    for (idx, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took >= Duration::from_secs(*budget) => Err(format!("took longer than {budget}s")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} {:>2} {name} ({:.2}s): {detail}", idx + 1, took.as_secs_f64());
        failed += outcome.is_err() as u32;
    }
    println!("{} of {} criteria passed", criteria.len() as u32 - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
