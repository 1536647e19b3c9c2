//! Stable segmentations built directly from a market.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::market::{Coalition, Market};
use crate::segmentation::{Segment, Segmentation};
use crate::Rational;

/// One round of the equal-revenue recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerStep {
    /// Common revenue `v * F(v)` of every supported value `v`.
    pub lambda: Rational,
    /// Value indices whose residual mass this step used up.
    pub exhausted: Vec<usize>,
    pub coalition: Coalition,
    pub price: Rational,
    /// Residual market after the step.
    pub residual: Vec<Rational>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MerTrace {
    pub steps: Vec<MerStep>,
}

/// Repeatedly carves out the largest coalition over all remaining values on
/// which every value yields the same revenue.
///
/// With remaining values `w_1 < ... < w_m` and `1/w_{m+1} = 0`, the step takes
/// `lambda = min_j r(w_j) / (1/w_j - 1/w_{j+1})` and mass
/// `lambda (1/w_j - 1/w_{j+1})` of each `w_j`, priced at `w_1`.
pub fn mer_segmentation(m: &Market) -> (Segmentation, MerTrace) {
    let values = m.values();
    let mut residual: Vec<Rational> = m.masses().to_vec();
    let mut trace = MerTrace::default();
    let mut segments = Vec::new();
    loop {
        let support: Vec<usize> = (0..values.len())
            .filter(|&i| residual[i].is_positive())
            .collect();
        let Some(&first) = support.first() else { break };
        let gaps: Vec<Rational> = support
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let inv = values[i].recip();
                match support.get(k + 1) {
                    Some(&next) => inv - values[next].recip(),
                    None => inv,
                }
            })
            .collect();
        let lambda = support
            .iter()
            .zip(&gaps)
            .map(|(&i, g)| &residual[i] / g)
            .min()
            .expect("support is nonempty");
        let mut mass = alloc::vec![Rational::zero(); values.len()];
        let mut exhausted = Vec::new();
        for (&i, g) in support.iter().zip(&gaps) {
            let take = &lambda * g;
            residual[i] -= &take;
            if residual[i].is_zero() {
                exhausted.push(i);
            }
            mass[i] = take;
        }
        let coalition = Coalition::new(m, mass).expect("non-negative masses");
        let price = values[first].clone();
        segments.push(
            Segment::new(coalition.clone(), price.clone()).expect("all supported values tie"),
        );
        trace.steps.push(MerStep {
            lambda,
            exhausted,
            coalition,
            price,
            residual: residual.clone(),
        });
    }
    let s = Segmentation::new(m, segments).expect("steps exhaust the market");
    (s, trace)
}

/// Starting from the lowest remaining value, absorbs consumers of the next
/// values in ascending order until a second price ties with the lowest,
/// closes that segment, and repeats on what is left.
///
/// If adding everything that remains never produces a tie, the remainder
/// forms a final segment with a unique optimal price.
pub fn greedy_stable_segmentation(m: &Market) -> Segmentation {
    let values = m.values();
    let n = values.len();
    let mut residual: Vec<Rational> = m.masses().to_vec();
    let mut segments = Vec::new();
    while let Some(first) = (0..n).find(|&i| residual[i].is_positive()) {
        let mut mass = alloc::vec![Rational::zero(); n];
        mass[first] = core::mem::take(&mut residual[first]);
        for j in first + 1..n {
            if residual[j].is_zero() {
                continue;
            }
            // Revenue at q after adding t of value j is R_q + v_q t for q <= j.
            let current = Coalition::new(m, mass.clone()).expect("non-negative");
            let revenues = current.revenues();
            let tie = (first + 1..=j)
                .map(|q| (&revenues[first] - &revenues[q]) / (&values[q] - &values[first]))
                .min()
                .expect("j lies above the first value");
            if tie <= residual[j] {
                residual[j] -= &tie;
                mass[j] = tie;
                break;
            }
            mass[j] = core::mem::take(&mut residual[j]);
        }
        let coalition = Coalition::new(m, mass).expect("non-negative");
        segments.push(
            Segment::new(coalition, values[first].clone()).expect("lowest value stays optimal"),
        );
    }
    Segmentation::new(m, segments).expect("residual exhausted")
}

/// Closed-form stable segmentation of a two-value market.
///
/// If the low value is optimal for everyone, the trivial segmentation at the
/// low value. Otherwise the low segment holds every low-value consumer plus
/// `x = v_1 f(v_1) / (v_2 - v_1)` high-value consumers, making both prices
/// optimal, and the remaining high-value consumers pay `v_2`.
pub fn two_value_stable(m: &Market) -> Result<Segmentation> {
    if m.len() != 2 {
        return Err(Error::WrongArity {
            expected: 2,
            found: m.len(),
        });
    }
    if m.is_efficient() {
        return Segmentation::trivial(m, m.lowest_value().clone());
    }
    let (v, f) = (m.values(), m.masses());
    let x = &v[0] * &f[0] / (&v[1] - &v[0]);
    let low = Coalition::new(m, alloc::vec![f[0].clone(), x.clone()])?;
    let high = Coalition::new(m, alloc::vec![Rational::zero(), &f[1] - &x])?;
    Segmentation::from_parts(m, [(low, v[0].clone()), (high, v[1].clone())])
}

/// `v * (mass at or above v)` for every supported value of `c`.
pub fn equal_revenue_levels(c: &Coalition) -> Vec<Rational> {
    let values = c.market().values();
    c.support()
        .map(|i| &values[i] * c.mass_at_or_above(&values[i]))
        .collect()
}
