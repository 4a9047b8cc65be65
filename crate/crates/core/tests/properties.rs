use natdensity::adversary::{no_density_example, sh_inv_evens_set, shinv_nonpreservation_demo};
use natdensity::covering::{
    construct_covering_sh, evaluate_covering, search_violation, sh_covering_m, sh_threshold, witness_shinv,
    CoveringInstance,
};
use natdensity::density::{check_thm1, estimate_limits, prefix_density, ScanMode, Thm1Params};
use natdensity::fndsl;
use natdensity::interval::tile_m_intervals;
use natdensity::maps::{self, sh_inv};
use natdensity::sets::{BitWindowSet, IntervalUnionSet, PredicateSet, ResidueSet};
use natdensity::{Interval, IntervalUnion, NatSet, Rat};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn iv(a: u64, b: u64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn sample_sets() -> Vec<Box<dyn NatSet>> {
    vec![
        Box::new(ResidueSet::evens()),
        Box::new(ResidueSet::multiples(3).unwrap()),
        Box::new(no_density_example()),
        Box::new(sh_inv_evens_set()),
        Box::new(PredicateSet::new("squares", |n| {
            let r = (n as f64).sqrt() as u64;
            r * r == n
        })),
        Box::new(IntervalUnionSet::new(IntervalUnion::new(vec![iv(5, 9), iv(100, 2000)]))),
    ]
}

#[test]
fn count_in_matches_membership_on_every_interval() {
    const L: usize = 4096;
    for set in sample_sets() {
        let mut prefix = vec![0u64; L + 1];
        for n in 1..=L {
            prefix[n] = prefix[n - 1] + set.contains(n as u64) as u64;
            assert_eq!(set.count_leq(n as u64), prefix[n], "{} at {n}", set.describe());
        }
        for a in 1..=L {
            for b in a..=L {
                let want = prefix[b] - prefix[a - 1];
                assert_eq!(set.count_in(&iv(a as u64, b as u64)), want);
            }
        }
    }
}

#[test]
fn prefix_density_moves_by_at_most_one_over_n() {
    for set in sample_sets() {
        for n in 2..3000u64 {
            let step = (prefix_density(set.as_ref(), n).unwrap() - prefix_density(set.as_ref(), n - 1).unwrap()).abs();
            assert!(step <= Rat::new(1, n as i128 - 1).unwrap());
        }
    }
}

fn thm1(d: Rat, eps: Rat, n: u64, limit: u64, mode: ScanMode) -> Thm1Params {
    Thm1Params {
        d,
        m: Rat::frac(3, 2),
        epsilon: eps,
        n,
        scan_limit: limit,
        mode,
    }
}

#[test]
fn checker_passes_on_sets_with_known_density() {
    let limit = 100_000;
    let empty = BitWindowSet::from_members(iv(1, limit), []);
    let full = IntervalUnionSet::new(IntervalUnion::new(vec![iv(1, limit)]));
    let evens = ResidueSet::evens();
    let threes = ResidueSet::multiples(3).unwrap();
    let cases: [(&dyn NatSet, Rat); 4] = [
        (&empty, Rat::ZERO),
        (&full, Rat::ONE),
        (&evens, Rat::frac(1, 2)),
        (&threes, Rat::frac(1, 3)),
    ];
    for (set, d) in cases {
        let r = check_thm1(set, &thm1(d, Rat::frac(1, 100), 1000, limit, ScanMode::Auto)).unwrap();
        assert!(r.pass, "{}: {r:?}", set.describe());
        assert!(r.worst_interval.a() > 1000);
        assert!(r.worst_interval.is_plus_m(Rat::frac(3, 2)).unwrap());
    }
}

#[test]
fn sampled_and_exhaustive_agree_on_small_limits() {
    for set in sample_sets() {
        for (d, eps, n, limit) in [
            (Rat::frac(1, 2), Rat::frac(1, 10), 10, 400),
            (Rat::frac(1, 3), Rat::frac(1, 20), 100, 2000),
            (Rat::frac(1, 2), Rat::frac(1, 5), 200, 4096),
            (Rat::ZERO, Rat::frac(1, 100), 1000, 4096),
        ] {
            let ex = check_thm1(set.as_ref(), &thm1(d, eps, n, limit, ScanMode::Exhaustive)).unwrap();
            let sa = check_thm1(set.as_ref(), &thm1(d, eps, n, limit, ScanMode::Sampled)).unwrap();
            assert_eq!(ex.pass, sa.pass, "{} D={d} eps={eps} N={n}", set.describe());
            assert!(sa.worst_deviation <= ex.worst_deviation);
        }
    }
}

#[test]
fn inverse_shuffle_image_of_evens_oscillates() {
    let p = estimate_limits(&sh_inv_evens_set(), 1 << 24, Rat::frac(1, 4), 64).unwrap();
    let tol = Rat::frac(1, 100);
    assert!((p.limsup_est - Rat::frac(2, 3)).abs() <= tol, "{}", p.limsup_est);
    assert!((p.liminf_est - Rat::frac(1, 2)).abs() <= tol, "{}", p.liminf_est);

    let demo = shinv_nonpreservation_demo(1 << 24).unwrap();
    assert!(demo.brute_force_agrees);
    assert_eq!(demo.evens_density, Rat::frac(1, 2));
    assert_eq!(demo.profile, p);
    let n = 3 * (1u64 << 9) - 1;
    assert_eq!(
        prefix_density(&sh_inv_evens_set(), n).unwrap(),
        Rat::new((1 << 10) - 1, n as i128).unwrap()
    );
    for t in 1..(1u64 << 15) {
        assert!(sh_inv_evens_set().contains(sh_inv(2 * t).unwrap()));
    }
}

#[test]
fn witness_inclusions_stay_near_one_half() {
    for i in 6..=16u32 {
        let w = witness_shinv(i, Rat::frac(21, 20), Rat::frac(3, 4)).unwrap();
        let end = 1u64 << (i + 1);
        for (j, frac) in w.instance.js.iter().zip(&w.report.inclusion) {
            if j.b() < end {
                let slack = Rat::new(2, j.len() as i128).unwrap();
                assert!((*frac - Rat::frac(1, 2)).abs() <= slack, "i={i} {j}: {frac}");
            }
        }
        assert!(w.report.c.is_empty());
        assert_eq!(w.report.ft_in_i, w.instance.i.len());
    }
}

#[test]
fn lowering_q_or_r_is_monotone() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let f = maps::builtin(["identity", "sh", "sh-inv"][rng.gen_range(0..3)]).unwrap();
        let a = rng.gen_range(16..1500u64);
        let i = iv(a, 2 * a + rng.gen_range(1..300));
        let m = Rat::ONE + Rat::frac(1, rng.gen_range(2..16));
        let pre = natdensity::covering::preimage(f.as_ref(), &i).unwrap();
        let js = tile_m_intervals(pre.min().unwrap(), pre.max().unwrap(), m)
            .unwrap()
            .into_iter()
            .filter(|j| pre.count_in(j) > 0)
            .collect::<Vec<_>>();
        let inst = |q: Rat, r: Rat| CoveringInstance {
            f: f.clone(),
            i,
            js: js.clone(),
            p: Rat::int(2),
            q,
            r,
            m,
        };
        let (q, r) = (Rat::frac(rng.gen_range(2..20), 20), Rat::frac(rng.gen_range(2..20), 20));
        let base = evaluate_covering(&inst(q, r)).unwrap();
        let lower_q = evaluate_covering(&inst(q - Rat::frac(1, 20), r)).unwrap();
        assert!(base.c.iter().all(|j| lower_q.c.contains(j)));
        let lower_r = evaluate_covering(&inst(q, r - Rat::frac(1, 20))).unwrap();
        assert!(base.condition_holds || !lower_r.condition_holds);
    }
}

#[test]
fn shuffle_search_finds_nothing_with_the_construction_m() {
    let (p, r) = (Rat::int(2), Rat::frac(1, 10));
    let m = sh_covering_m(sh_threshold(p, r), r).unwrap();
    let f = maps::builtin("sh").unwrap();
    let out = search_violation(&f, p, Rat::frac(99, 100), r, m, 10_000, 50).unwrap();
    assert!(out.witness.is_none());
    assert_eq!(out.examined, 50);
}

#[test]
fn shuffle_construction_covers_random_targets() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..40 {
        let a = rng.gen_range(121..1u64 << 16);
        let i = iv(a, rng.gen_range(2 * a + 1..=6 * a));
        let cov = construct_covering_sh(&i, Rat::int(2), Rat::frac(1, 10)).unwrap();
        let union = IntervalUnion::new(cov.js.clone());
        assert_eq!(union.len(), cov.js.iter().map(Interval::len).sum::<u64>());
        assert!(union.minus(&cov.preimage).is_empty());
        assert_eq!(cov.preimage.minus(&union).len(), cov.omitted);
        assert!(cov.preimage.component_count() <= 3);
    }
}

#[test]
fn bundled_inverse_dsl_matches_builtin() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/dsl");
    let spec = fndsl::parse_file(std::path::Path::new(&format!("{dir}/sh_inv.dsl"))).unwrap();
    let rep = fndsl::check(&spec, &iv(1, 1 << 16)).unwrap();
    assert!(rep.ok());
    for k in 1..=1u64 << 16 {
        assert_eq!(spec.eval(k).unwrap(), sh_inv(k).unwrap());
    }
    let halve = fndsl::parse_file(std::path::Path::new(&format!("{dir}/halve.dsl"))).unwrap();
    let rep = fndsl::check(&halve, &iv(1, 100)).unwrap();
    let c = rep.injectivity.unwrap().collision.unwrap();
    assert_eq!((c.first, c.second, c.value), (2, 3, 1));
}
