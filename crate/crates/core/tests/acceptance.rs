//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stableseg_core::constructions::{
    equal_revenue_levels, greedy_stable_segmentation, mer_segmentation,
};
use stableseg_core::cooperative::{
    build_rv_chain, check_chain, core_description, core_equals_stable_check, core_objection,
    harsanyi_blocks, in_core, strong_blocks_some_equivalent, ChainVariant, CoreResult,
};
use stableseg_core::fixtures;
use stableseg_core::oracle::{
    atom_blocks, enumerate_segmentations, lower_plan, two_value_triple, DEFAULT_ATOM_CAP,
};
use stableseg_core::plan::DeviationScenario;
use stableseg_core::rational::{int, rat};
use stableseg_core::stability::{
    diagnose, inefficiency_witness, is_efficient, is_saturated, is_stable, nonsaturation_witness,
    Diagnosis,
};
use stableseg_core::{Coalition, Market, Rational, Segmentation};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn split_sample_prices() -> Outcome {
    let s = fixtures::four_value_split_segmentation();
    let c1 = s.segments()[0].coalition();
    let c2 = s.segments()[1].coalition();
    ensure(
        c1.optimal_prices().unwrap() == vec![int(1), int(2)],
        "C1 optimal prices",
    )?;
    ensure(
        c2.optimal_prices().unwrap() == vec![int(1), int(3)],
        "C2 optimal prices",
    )?;
    ensure(is_saturated(&s), "raw segmentation should be saturated")?;
    ensure(
        !is_saturated(&s.canonicalize()),
        "canonical form should not be saturated",
    )?;
    ensure(!is_stable(&s), "segmentation should be unstable")?;
    Ok("opt(C1)={1,2}, opt(C2)={1,3}, saturated raw only, unstable".into())
}

fn equal_revenue_steps() -> Outcome {
    let (s, trace) = mer_segmentation(&fixtures::skewed_market());
    let step1 = &trace.steps[0];
    ensure(
        step1.coalition.mass() == [rat(3, 9), rat(1, 9), rat(2, 9)],
        "step-1 masses",
    )?;
    ensure(step1.lambda == rat(2, 3), "lambda_1")?;
    let step2 = &trace.steps[1];
    ensure(
        step2.coalition.mass()[1..] == [rat(1, 18), rat(2, 18)],
        "step-2 masses",
    )?;
    ensure(is_stable(&s), "equal-revenue segmentation should be stable")?;
    Ok("step 1 (3/9,1/9,2/9) lambda 2/3, step 2 (1/18,2/18), stable".into())
}

fn uniform_surplus() -> Outcome {
    let s = fixtures::uniform_pooled_segmentation();
    ensure(
        s.average_consumer_surplus() == rat(1, 3),
        "ACS of pooled segmentation",
    )?;
    let k = mer_segmentation(s.market()).0.canonicalize();
    ensure(
        k.average_consumer_surplus() == rat(2, 3),
        "ACS of canonical MER",
    )?;
    let price_two = &k.segments()[k.segment_with_price(&int(2)).ok_or("no price-2 segment")?];
    ensure(
        price_two.coalition().mass() == [int(0), rat(2, 9), rat(1, 9)],
        "price-2 coalition",
    )?;
    Ok("ACS 1/3 vs 2/3, price-2 coalition (0,2/9,1/9)".into())
}

fn max_surplus_unstable() -> Outcome {
    let s = fixtures::skewed_unsaturated_segmentation();
    ensure(is_efficient(&s), "should be efficient")?;
    ensure(!is_saturated(&s), "should not be saturated")?;
    ensure(!is_stable(&s), "should be unstable")?;
    Ok("efficient, unsaturated, unstable".into())
}

fn weak_blocking_layouts() -> Outcome {
    let (s, s_prime, s_split) = fixtures::twenty_one_layouts();
    let forward = DeviationScenario::new(s.plan_to(&s_prime).map_err(|e| e.to_string())?);
    let split = DeviationScenario::new(s_split.plan_to(&s_prime).map_err(|e| e.to_string())?);
    ensure(!forward.blocks(), "S should not block S'")?;
    ensure(forward.weakly_blocks(), "S should weakly block S'")?;
    ensure(split.blocks(), "S'' should block S'")?;
    Ok("S does not block S', S weakly blocks S', S'' blocks S'".into())
}

/// Lowest value optimal for the whole market, recomputed from scratch.
fn lowest_value_optimal(m: &Market) -> bool {
    let v = m.values();
    let f = m.masses();
    let revenue = |q: usize| {
        let above = f[q..].iter().fold(Rational::zero(), |a, x| a + x);
        &v[q] * above
    };
    let at_lowest = revenue(0);
    (1..v.len()).all(|q| revenue(q) <= at_lowest)
}

fn core_characterization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut empty, mut nonempty) = (0, 0);
    let mut k = 0;
    while k < 200 || empty < 30 || nonempty < 30 {
        k += 1;
        let m = common::random_market(&mut rng, 5, 12);
        let expected_nonempty = lowest_value_optimal(&m);
        let core = core_description(&m);
        ensure(
            (core == CoreResult::Empty) != expected_nonempty,
            format!("core description wrong for {m:?}"),
        )?;
        let (mer, _) = mer_segmentation(&m);
        let greedy = greedy_stable_segmentation(&m);
        if expected_nonempty {
            nonempty += 1;
            let trivial = Segmentation::trivial(&m, m.values()[0].clone()).unwrap();
            ensure(is_stable(&trivial), format!("trivial unstable on {m:?}"))?;
            ensure(
                mer.weak_surplus_equivalent(&trivial),
                format!("MER differs on {m:?}"),
            )?;
            ensure(
                greedy.weak_surplus_equivalent(&trivial),
                format!("greedy differs on {m:?}"),
            )?;
            ensure(
                core_equals_stable_check(&m) == Ok(true),
                "core/stable check",
            )?;
            ensure(in_core(&trivial), "trivial segmentation outside the core")?;
        } else {
            empty += 1;
            for s in [&mer, &greedy] {
                ensure(!in_core(s), format!("{s:?} in an empty core"))?;
                ensure(
                    s.segments().iter().any(|x| x.price() > &m.values()[0]),
                    "stable segmentation priced entirely at v1",
                )?;
                let objection = core_objection(s).ok_or("no objection built")?;
                ensure(
                    objection.objects(0).unwrap(),
                    format!("objection fails on {s:?}"),
                )?;
            }
        }
    }
    Ok(format!(
        "{k} random markets: {empty} empty cores, {nonempty} trivial cores"
    ))
}

fn oracle_directional() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut stable_pairs, mut witnesses, mut enumerated) = (0usize, 0usize, 0usize);
    let markets = 60;
    for _ in 0..markets {
        let am = common::random_atomized(&mut rng, 6, 4);
        let all = enumerate_segmentations(&am, DEFAULT_ATOM_CAP).map_err(|e| e.to_string())?;
        enumerated += all.len();
        let levels: Vec<Vec<u32>> = all.iter().map(|s| am.surpluses(s)).collect();
        for (k, s) in all.iter().enumerate() {
            let lifted = am.lift(s);
            if is_stable(&lifted) {
                for (t, other) in all.iter().enumerate() {
                    if levels[t] != levels[k] {
                        stable_pairs += 1;
                        ensure(
                            atom_blocks(&am, s, other),
                            format!("stable {lifted:?} fails to block {:?}", am.lift(other)),
                        )?;
                    }
                }
            } else {
                let (_, plan) = match diagnose(&lifted) {
                    Diagnosis::Inefficient => inefficiency_witness(&lifted).ok_or("no witness")?,
                    _ => nonsaturation_witness(&lifted).map_err(|e| e.to_string())?,
                };
                let (grid, low, witness) = lower_plan(&plan).map_err(|e| e.to_string())?;
                witnesses += 1;
                ensure(
                    !atom_blocks(&grid, &low, &witness),
                    format!("{lifted:?} blocks its own witness"),
                )?;
                ensure(
                    grid.surpluses(&low) != grid.surpluses(&witness),
                    "witness changes nothing",
                )?;
            }
        }
    }
    Ok(format!(
        "{markets} markets, {enumerated} segmentations: {stable_pairs} stable/alternative pairs blocked, {witnesses} witnesses unblocked"
    ))
}

fn two_value_triple_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut total, mut representable, mut grid_only_multiplicity) = (0, 0, 0);
    while total < 60 || representable < 50 {
        let am = common::random_two_value(&mut rng, 6);
        let report = two_value_triple(&am, DEFAULT_ATOM_CAP).map_err(|e| e.to_string())?;
        total += 1;
        ensure(
            report.sets_equal,
            format!("sets differ on {:?}: {report:?}", am.market()),
        )?;
        if report.continuum_representable {
            representable += 1;
            ensure(
                report.pairwise_equivalent,
                format!("members not equivalent on {:?}", am.market()),
            )?;
        } else if !report.pairwise_equivalent {
            grid_only_multiplicity += 1;
        }
    }
    Ok(format!(
        "{total} markets: stable = ACS-maximal = undominated on all; pairwise equivalent on all {representable} grids holding the continuum solution ({grid_only_multiplicity} coarser grids show grid-only multiplicity)"
    ))
}

fn total_surplus_by_hand(s: &Segmentation) -> Rational {
    let v = s.market().values();
    let mut total = Rational::zero();
    for seg in s.segments() {
        for (i, m) in seg.coalition().mass().iter().enumerate() {
            if &v[i] > seg.price() {
                total += m * (&v[i] - seg.price());
            }
        }
    }
    total
}

fn farsighted_chains() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut pairs, mut strong, mut null_blockers) = (0, 0, 0);
    while pairs < 100 {
        let m = common::random_market(&mut rng, 4, 10);
        let blocked = common::random_segmentation(&mut rng, &m, 3);
        let blocker = common::random_segmentation(&mut rng, &m, 3);
        let positive = total_surplus_by_hand(&blocker).is_positive();
        ensure(
            harsanyi_blocks(&blocker, &blocked) == positive,
            "farsighted blocking disagrees with the surplus criterion",
        )?;
        if !positive {
            null_blockers += 1;
            ensure(
                build_rv_chain(&blocked, &blocker, ChainVariant::Weak).is_err(),
                "chain built for a zero-surplus blocker",
            )?;
            continue;
        }
        pairs += 1;
        let chain =
            build_rv_chain(&blocked, &blocker, ChainVariant::Weak).map_err(|e| e.to_string())?;
        ensure(
            chain.terminal() == &blocker,
            "weak chain must end at the blocker",
        )?;
        ensure(
            check_chain(&chain, ChainVariant::Weak) == Ok(true),
            format!("weak chain rejected: {blocked:?} -> {blocker:?}"),
        )?;
        if strong_blocks_some_equivalent(&blocker, &blocked) {
            strong += 1;
            let chain = build_rv_chain(&blocked, &blocker, ChainVariant::Strong)
                .map_err(|e| e.to_string())?;
            ensure(
                check_chain(&chain, ChainVariant::Strong) == Ok(true),
                format!("strong chain rejected: {blocked:?} -> {blocker:?}"),
            )?;
        }
    }
    Ok(format!(
        "{pairs} pairs with positive-surplus blockers certified ({strong} strong chains); {null_blockers} zero-surplus blockers refused"
    ))
}

fn rational() -> impl Strategy<Value = Rational> {
    (1i64..=60, 1i64..=60).prop_map(|(a, b)| rat(a, b))
}

fn market() -> impl Strategy<Value = Market> {
    (1usize..=6).prop_flat_map(|n| {
        (
            proptest::collection::btree_set(
                (1i64..=360, 1i64..=60).prop_map(|(a, b)| rat(a, b)),
                n,
            ),
            proptest::collection::vec(rational(), n),
        )
            .prop_map(|(values, masses)| Market::new(values.into_iter().collect(), masses).unwrap())
    })
}

/// A market with two coalitions (entries zero with some probability), a
/// scale factor and a seed.
fn market_case() -> impl Strategy<Value = (Market, Vec<Rational>, Vec<Rational>, Rational, u64)> {
    market().prop_flat_map(|m| {
        let n = m.len();
        let entry = prop_oneof![1 => Just(Rational::zero()), 3 => rational()];
        (
            Just(m),
            proptest::collection::vec(entry.clone(), n),
            proptest::collection::vec(entry, n),
            rational(),
            any::<u64>(),
        )
    })
}

/// Equal-revenue coalition on `support` (ascending value indices) with level `lambda`.
fn equal_revenue_on(m: &Market, support: &[usize], lambda: &Rational) -> Coalition {
    let v = m.values();
    let mut mass = vec![Rational::zero(); m.len()];
    for (k, &i) in support.iter().enumerate() {
        let next = support
            .get(k + 1)
            .map(|&j| v[j].recip())
            .unwrap_or_else(Rational::zero);
        mass[i] = lambda * (v[i].recip() - next);
    }
    Coalition::new(m, mass).unwrap()
}

fn property_suite() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&market_case(), |(m, a, b, alpha, seed)| {
            let c = Coalition::new(&m, a).unwrap();
            let d = Coalition::new(&m, b).unwrap();
            let sum = c.add(&d).unwrap();
            for p in m.values() {
                prop_assert_eq!(sum.revenue(p), c.revenue(p) + d.revenue(p));
            }
            if !c.is_empty() {
                let opt = c.optimal_prices().unwrap();
                prop_assert_eq!(
                    c.scale(&alpha).unwrap().optimal_prices().unwrap(),
                    opt.clone()
                );
                // Any equal-revenue coalition on values from an optimal price
                // up shares that price; so does the union.
                let p = m.value_index(&opt[seed as usize % opt.len()]).unwrap();
                let support: Vec<usize> = (p..m.len())
                    .filter(|&i| i == p || (seed >> i) & 1 == 1)
                    .collect();
                let e = equal_revenue_on(&m, &support, &alpha);
                prop_assert!(e.is_optimal_price(&m.values()[p]).unwrap());
                prop_assert!(c.add(&e).unwrap().is_optimal_price(&m.values()[p]).unwrap());
                for q in c.optimal_price_indices().unwrap() {
                    prop_assert!(c.mass_at(q).is_positive());
                }
            }

            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = common::random_segmentation(&mut rng, &m, 4);
            let k = s.canonicalize();
            prop_assert_eq!(k.canonicalize(), k.clone());
            prop_assert!(k.weak_surplus_equivalent(&s));
            prop_assert_eq!(k.average_consumer_surplus(), s.average_consumer_surplus());
            prop_assert_eq!(k.seller_revenue(), s.seller_revenue());

            let (mer, trace) = mer_segmentation(&m);
            for step in &trace.steps {
                prop_assert!(!step.exhausted.is_empty());
                for level in equal_revenue_levels(&step.coalition) {
                    prop_assert_eq!(&level, &step.lambda);
                }
            }
            prop_assert!(is_stable(&mer));

            let greedy = greedy_stable_segmentation(&m);
            prop_assert!(is_stable(&greedy));
            prop_assert!(greedy.is_canonical());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 random markets: revenue additivity, optimal-price union, scale invariance, canonicalization, equal-revenue identity, greedy stability".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "split-sample prices and saturation",
            Duration::from_secs(1),
            split_sample_prices,
        ),
        (
            "equal-revenue recursion",
            Duration::from_secs(1),
            equal_revenue_steps,
        ),
        (
            "uniform market surplus",
            Duration::from_secs(1),
            uniform_surplus,
        ),
        (
            "surplus-maximizing but unstable",
            Duration::from_secs(1),
            max_surplus_unstable,
        ),
        (
            "weak blocking through interval plans",
            Duration::from_secs(1),
            weak_blocking_layouts,
        ),
        (
            "core characterization",
            Duration::from_secs(10),
            core_characterization,
        ),
        (
            "oracle directional agreement",
            Duration::from_secs(60),
            oracle_directional,
        ),
        (
            "two-value triple equivalence",
            Duration::from_secs(60),
            two_value_triple_equivalence,
        ),
        (
            "farsighted blocking chains",
            Duration::from_secs(30),
            farsighted_chains,
        ),
        ("property suite", Duration::from_secs(60), property_suite),
    ];
    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over time budget {budget:?}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2} [{status}] {name} ({elapsed:.2?}): {detail}",
            k + 1
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
