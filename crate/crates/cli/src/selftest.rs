//! Seeded cross-check of the covering evaluator against explicit set
//! arithmetic.

use std::collections::HashSet;

use natdensity::covering::{evaluate_covering, CoveringInstance};
use natdensity::interval::tile_m_intervals;
use natdensity::{maps, Interval, Rat};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use crate::output::{self, Format};
use crate::Outcome;

const LIMIT: u64 = 1 << 12;

fn instance(rng: &mut StdRng) -> anyhow::Result<CoveringInstance> {
    let f = maps::builtin(["identity", "sh", "sh-inv"][rng.gen_range(0..3)]).expect("builtin");
    let p = Rat::ONE + Rat::frac(1, rng.gen_range(1..12));
    let m = Rat::ONE + Rat::frac(1, rng.gen_range(1..24));
    let a = rng.gen_range(1..LIMIT / 3);
    let b = (p.floor_mul(a)? as u64 + 1 + rng.gen_range(0..600)).min(LIMIT - 1);
    let i = Interval::new(a, b)?;
    let pre: Vec<u64> = (1..2 * LIMIT)
        .filter(|&x| f.apply(x).map(|y| i.contains(y)).unwrap_or(false))
        .collect();
    let (lo, hi) = (pre[0], *pre.last().expect("bijection"));
    let js = tile_m_intervals(lo, hi, m)?
        .into_iter()
        .filter(|j| pre.iter().any(|&x| j.contains(x)))
        .collect();
    let d = rng.gen_range(2..=20);
    let q = Rat::frac(rng.gen_range(1..d), d);
    let d = rng.gen_range(2..=20);
    let r = Rat::frac(rng.gen_range(1..d), d);
    Ok(CoveringInstance { f, i, js, p, q, r, m })
}

/// `(‖f(T) ∩ I‖, condition holds)` from explicit image sets.
fn oracle(inst: &CoveringInstance) -> anyhow::Result<(u64, bool)> {
    let target: HashSet<u64> = inst.i.iter().collect();
    let mut ft = HashSet::new();
    for j in &inst.js {
        let img: HashSet<u64> = j.iter().map(|x| inst.f.apply(x)).collect::<Result<_, _>>()?;
        let hits = img.intersection(&target).count() as u64;
        if Rat::from(hits) < inst.q * Rat::from(j.len()) {
            ft.extend(img.intersection(&target).copied());
        }
    }
    let ft = ft.len() as u64;
    Ok((ft, Rat::from(ft) < inst.r * Rat::from(inst.i.len())))
}

pub fn run(seed: u64, cases: usize, format: Format) -> anyhow::Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    for case in 0..cases {
        let inst = instance(&mut rng)?;
        let rep = evaluate_covering(&inst)?;
        let want = oracle(&inst)?;
        if (rep.ft_in_i, rep.condition_holds) != want {
            mismatches.push(json!({"case": case, "instance": inst.to_file()}));
        }
    }
    let body = json!({"seed": seed, "cases": cases, "mismatches": mismatches.len(), "examples": mismatches});
    Ok(Outcome {
        failed: !mismatches.is_empty(),
        text: output::render(format, "selftest", &body)?,
    })
}
