//! Seeded random markets and segmentations for integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use stableseg_core::oracle::AtomizedMarket;
use stableseg_core::rational::{int, rat};
use stableseg_core::{Coalition, Market, Rational, Segmentation};

pub fn random_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    rat(rng.random_range(1..=max_num), rng.random_range(1..=max_den))
}

/// `n` distinct positive values and positive masses, denominators at most `max_den`.
pub fn random_market(rng: &mut impl Rng, max_n: usize, max_den: i64) -> Market {
    let n = rng.random_range(1..=max_n);
    let mut values: Vec<Rational> = Vec::new();
    while values.len() < n {
        let v = random_rational(rng, 6 * max_den, max_den);
        if !values.contains(&v) {
            values.push(v);
        }
    }
    values.sort();
    let masses = (0..n)
        .map(|_| random_rational(rng, max_den, max_den))
        .collect();
    Market::new(values, masses).unwrap()
}

/// Distinct integer values in `1..=max_value`, ascending.
pub fn random_int_values(rng: &mut impl Rng, n: usize, max_value: i64) -> Vec<Rational> {
    let mut pool: Vec<i64> = (1..=max_value).collect();
    pool.shuffle(rng);
    let mut chosen: Vec<i64> = pool.into_iter().take(n).collect();
    chosen.sort();
    chosen.into_iter().map(int).collect()
}

/// A market of at most `max_atoms` unit atoms over up to `max_n` values.
pub fn random_atomized(rng: &mut impl Rng, max_atoms: usize, max_n: usize) -> AtomizedMarket {
    let atoms = rng.random_range(1..=max_atoms);
    let n = rng.random_range(1..=max_n.min(atoms));
    let mut counts = vec![1usize; n];
    for _ in n..atoms {
        let i = rng.random_range(0..n);
        counts[i] += 1;
    }
    let values = random_int_values(rng, n, 12);
    let unit = rat(1, atoms as i64);
    AtomizedMarket::from_counts(values, &counts, unit).unwrap()
}

/// A two-value market on at most `max_atoms` atoms.
pub fn random_two_value(rng: &mut impl Rng, max_atoms: usize) -> AtomizedMarket {
    let atoms = rng.random_range(2..=max_atoms);
    let low = rng.random_range(1..atoms);
    let values = random_int_values(rng, 2, 10);
    AtomizedMarket::from_counts(values, &[low, atoms - low], int(1)).unwrap()
}

/// Splits each value's mass among up to `max_segments` coalitions with
/// random rational weights and prices each coalition at a random optimal
/// price.
pub fn random_segmentation(rng: &mut impl Rng, m: &Market, max_segments: usize) -> Segmentation {
    let k = rng.random_range(1..=max_segments);
    let mut masses = vec![vec![Rational::from_integer(BigInt::from(0)); m.len()]; k];
    for (i, f) in m.masses().iter().enumerate() {
        let weights: Vec<i64> = (0..k)
            .map(|_| {
                if rng.random_bool(0.4) {
                    0
                } else {
                    rng.random_range(1..=4)
                }
            })
            .collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            let j = rng.random_range(0..k);
            masses[j][i] = f.clone();
            continue;
        }
        for j in 0..k {
            masses[j][i] = f * rat(weights[j], total);
        }
    }
    let parts: Vec<(Coalition, Rational)> = masses
        .into_iter()
        .map(|mass| Coalition::new(m, mass).unwrap())
        .filter(|c| !c.is_empty())
        .map(|c| {
            let prices = c.optimal_prices().unwrap();
            let p = prices[rng.random_range(0..prices.len())].clone();
            (c, p)
        })
        .collect();
    Segmentation::from_parts(m, parts).unwrap()
}
