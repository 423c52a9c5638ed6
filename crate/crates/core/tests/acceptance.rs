//! One pass/fail line per acceptance criterion. Exits non-zero if any fails.

use std::time::{Duration, Instant};

use chainlab::extremal::{onto_boundary_replacement, outward_replacement};
use chainlab::lym::lym_audit;
use chainlab::oracle::{exhaustive_min, verify_iff_characterization};
use chainlab::{
    all_chains_lower, canonical_family, conjectured_min, count_2chains_cross, count_k_chains,
    erdos_katona_lower, k_middle_levels_lower, middle_sum, minimize, perm_weight_set,
    random_family, stability_gains, stability_lower, ElementSet, SetFamily,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn int(v: BigUint) -> BigRational {
    BigRational::from_integer(v.into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn conjecture_small() -> Outcome {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(e)?;
    let mut checked = 0;
    pool.install(|| -> Result<(), String> {
        for n in 2..=4u32 {
            for k in 2..=4u32 {
                for s in 0..=(1u64 << n) {
                    let o = exhaustive_min(n, s, k).map_err(e)?;
                    let c = conjectured_min(n, s, k).map_err(e)?;
                    ensure(o.minimum == c, || format!("n={n} k={k} s={s}: oracle {} vs {c}", o.minimum))?;
                    checked += 1;
                }
            }
        }
        Ok(())
    })?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("{checked} (n,k,s) cases equal, single thread"))
}

fn erdos_katona_tight() -> Outcome {
    for (n, s, t, want) in [(4u32, 7u64, 1u64, 3u64), (3, 4, 1, 2)] {
        let o = exhaustive_min(n, s, 2).map_err(e)?;
        let b = erdos_katona_lower(n, t);
        ensure(o.minimum == big(want) && b == big(want), || {
            format!("n={n} s={s}: oracle {} bound {b}", o.minimum)
        })?;
    }
    Ok("c2(4,7)=3, c2(3,4)=2".into())
}

fn middle_levels_tight() -> Outcome {
    let o = exhaustive_min(4, 11, 3).map_err(e)?;
    let b = k_middle_levels_lower(4, 3, 1).map_err(e)?;
    ensure(o.minimum == big(6) && b == big(6), || format!("oracle {} bound {b}", o.minimum))?;
    Ok("c3(4,11)=6".into())
}

fn stability_sound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..1000 {
        let s = rng.gen_range(0..=256usize);
        let f = random_family(8, s, &mut rng).map_err(e)?;
        for k in [2u32, 3] {
            let c = int(count_k_chains(&f, k).map_err(e)?);
            let b = stability_lower(&f, k).map_err(e)?;
            ensure(c >= b, || format!("k={k} s={s}: count {c} < bound {b}"))?;
            checked += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("{checked} checks, 0 violations"))
}

fn stability_tight() -> Outcome {
    for (n, lo, hi, k, want) in [(5u32, 2u32, 3u32, 2u32, 30u64), (4, 1, 3, 3, 24)] {
        let f = SetFamily::levels(n, lo..=hi).map_err(e)?;
        let c = count_k_chains(&f, k).map_err(e)?;
        let b = stability_lower(&f, k).map_err(e)?;
        ensure(c == big(want) && b == int(big(want)), || {
            format!("n={n} levels {lo}..{hi} k={k}: count {c} bound {b}")
        })?;
    }
    Ok("30 = 30 and 24 = 24".into())
}

fn lym_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..100u32 {
        let n = rng.gen_range(1..=6u32);
        let s = rng.gen_range(0..=(1usize << n));
        let k = 2 + i % 3;
        let f = random_family(n, s, &mut rng).map_err(e)?;
        let direct: BigUint = f
            .iter()
            .map(|x| perm_weight_set(x, n).map(|w| w.0))
            .sum::<Result<BigUint, _>>()
            .map_err(e)?;
        let a = lym_audit(&f, k).map_err(e)?;
        let walk = a.enumeration.as_ref().ok_or("no enumeration")?;
        ensure(direct == walk.prefix_incidences, || {
            format!("family {i}: weights {direct} vs permutations {}", walk.prefix_incidences)
        })?;
        ensure(walk.matches_formula, || format!("family {i}: chain incidences differ"))?;
        for q in &a.inequalities {
            ensure(q.holds, || format!("family {i}: {} margin {}", q.name, q.margin))?;
        }
    }
    Ok("100 families, identity exact, all margins >= 0".into())
}

fn first_term_k_plus_one() -> Outcome {
    let start = Instant::now();
    let bound = all_chains_lower(15, 2, 0, 0).map_err(e)?;
    let both = SetFamily::levels(15, 7..=8).map_err(e)?;
    let counted = count_k_chains(&both, 2).map_err(e)?;
    let cross = count_2chains_cross(&SetFamily::level(15, 7).map_err(e)?, &SetFamily::level(15, 8).map_err(e)?)
        .map_err(e)?;
    let want = int(big(51480));
    ensure(bound == want && int(counted.clone()) == want && cross == 51480, || {
        format!("bound {bound}, counted {counted}, cross {cross}")
    })?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok("51480 = 51480".into())
}

fn iff_small() -> Outcome {
    let mut cases = 0;
    for n in 3..=4u32 {
        let sperner = chainlab::arith::binomial_u64(n, n / 2);
        for s in sperner..=(1u64 << n) {
            let r = verify_iff_characterization(n, s).map_err(e)?;
            ensure(r.holds, || {
                format!(
                    "n={n} s={s}: {} optimal not certified, {} certified not optimal",
                    r.optimal_not_certified.len(),
                    r.certified_not_optimal.len()
                )
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} sizes, both inclusions"))
}

fn shift_recovery() -> Outcome {
    let n = 8;
    let s = u64::try_from(middle_sum(n, 1).map_err(e)?).map_err(e)? + 10;
    let target = conjectured_min(n, s, 2).map_err(e)?;
    let base = canonical_family(n, s).map_err(e)?;
    let middle = ElementSet::from_elements([1, 2, 3, 4], n).map_err(e)?;
    let mut longest = 0;
    for drop in 1..=n {
        let top = ElementSet::full(n).without(drop);
        let start = base.with_replaced(&[middle], &[top]).map_err(e)?;
        let (end, trace) = minimize(&start, 2, 10).map_err(e)?;
        let got = count_k_chains(&end, 2).map_err(e)?;
        ensure(got == target, || format!("top {top}: ended at {got}, want {target}"))?;
        let mut prev = &trace.initial_count;
        for step in &trace.steps {
            ensure(&step.count_after < prev, || format!("top {top}: count did not drop"))?;
            prev = &step.count_after;
        }
        longest = longest.max(trace.steps.len());
    }
    Ok(format!("all 8 starts reach {target}, at most {longest} steps"))
}

fn stability_remarks() -> Outcome {
    let (n, k) = (8, 2);
    let mut shown = Vec::new();
    for ell in 1..=4u64 {
        let (first, second) = stability_gains(n, k, ell).map_err(e)?;
        for (label, built, want) in [
            ("outward", outward_replacement(n, k, ell as usize), first),
            ("onto boundary", onto_boundary_replacement(n, k, ell as usize), second),
        ] {
            let r = built.map_err(e)?;
            let before = int(count_k_chains(&r.before, k).map_err(e)?);
            let after = int(count_k_chains(&r.after, k).map_err(e)?);
            let gain = after - before;
            ensure(gain == want, || format!("{label} l={ell}: gain {gain}, predicted {want}"))?;
            if ell == 1 {
                shown.push(format!("{label} {gain}"));
            }
        }
    }
    Ok(format!("l=1..4 exact ({} per moved set)", shown.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("conjecture at n <= 4", conjecture_small),
        ("Erdos-Katona tightness", erdos_katona_tight),
        ("k middle levels tightness", middle_levels_tight),
        ("stability bound soundness at n = 8", stability_sound),
        ("stability bound tight cases", stability_tight),
        ("permutation identity and inequalities", lym_identity),
        ("first term of the k+1 levels bound", first_term_k_plus_one),
        ("2-chain characterization iff", iff_small),
        ("shift optimizer recovery", shift_recovery),
        ("stability remark gains", stability_remarks),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
