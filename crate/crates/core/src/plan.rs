//! Transport plans between two segmentations of one market, and the
//! consumer-level comparisons (objection, blocking, Pareto dominance) that
//! need them.
//!
//! `flow[a][b][i]` is the mass of value-`i` consumers sitting in segment `a`
//! of the source and segment `b` of the target.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::segmentation::{consumer_surplus, Segmentation};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportPlan {
    source: Segmentation,
    target: Segmentation,
    flow: Vec<Vec<Vec<Rational>>>,
}

impl TransportPlan {
    /// Validates shape, non-negativity and both marginals exactly.
    pub fn new(
        source: Segmentation,
        target: Segmentation,
        flow: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        if source.market() != target.market() {
            return Err(Error::MarketMismatch);
        }
        let n = source.market().len();
        if flow.len() != source.len()
            || flow
                .iter()
                .any(|row| row.len() != target.len() || row.iter().any(|c| c.len() != n))
        {
            return Err(Error::PlanShape);
        }
        for (a, row) in flow.iter().enumerate() {
            for cell in row {
                if let Some(i) = cell.iter().position(|x| x.is_negative()) {
                    return Err(Error::NegativeMass { index: i });
                }
            }
            for i in 0..n {
                let sum = row.iter().fold(Rational::zero(), |acc, c| acc + &c[i]);
                if &sum != source.segments()[a].coalition().mass_at(i) {
                    return Err(Error::PlanMarginal {
                        side: "source",
                        segment: a,
                        index: i,
                    });
                }
            }
        }
        for b in 0..target.len() {
            for i in 0..n {
                let sum = flow
                    .iter()
                    .fold(Rational::zero(), |acc, row| acc + &row[b][i]);
                if &sum != target.segments()[b].coalition().mass_at(i) {
                    return Err(Error::PlanMarginal {
                        side: "target",
                        segment: b,
                        index: i,
                    });
                }
            }
        }
        Ok(TransportPlan {
            source,
            target,
            flow,
        })
    }

    /// Every consumer stays in the segment with the same index.
    pub fn identity(s: &Segmentation) -> Self {
        let n = s.market().len();
        let flow = (0..s.len())
            .map(|a| {
                (0..s.len())
                    .map(|b| {
                        if a == b {
                            s.segments()[a].coalition().mass().to_vec()
                        } else {
                            vec![Rational::zero(); n]
                        }
                    })
                    .collect()
            })
            .collect();
        TransportPlan {
            source: s.clone(),
            target: s.clone(),
            flow,
        }
    }

    /// Within each value class, source and target segments are independent:
    /// `flow[a][b][i] = f^a(i) f^b(i) / f(i)`.
    pub fn proportional(source: &Segmentation, target: &Segmentation) -> Result<Self> {
        if source.market() != target.market() {
            return Err(Error::MarketMismatch);
        }
        let masses = source.market().masses();
        let flow = source
            .segments()
            .iter()
            .map(|sa| {
                target
                    .segments()
                    .iter()
                    .map(|tb| {
                        masses
                            .iter()
                            .enumerate()
                            .map(|(i, f)| sa.coalition().mass_at(i) * tb.coalition().mass_at(i) / f)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(TransportPlan {
            source: source.clone(),
            target: target.clone(),
            flow,
        })
    }

    /// The same coupling read in the opposite direction.
    pub fn reversed(&self) -> Self {
        let n = self.source.market().len();
        let mut flow = vec![vec![vec![Rational::zero(); n]; self.source.len()]; self.target.len()];
        for (a, row) in self.flow.iter().enumerate() {
            for (b, cell) in row.iter().enumerate() {
                flow[b][a] = cell.clone();
            }
        }
        TransportPlan {
            source: self.target.clone(),
            target: self.source.clone(),
            flow,
        }
    }

    /// Chains `self` (S -> T) with `next` (T -> U), splitting each
    /// (segment, value) cell of T proportionally.
    pub fn compose(&self, next: &TransportPlan) -> Result<TransportPlan> {
        if self.target != next.source {
            return Err(Error::PlanShape);
        }
        let n = self.source.market().len();
        let mut flow = vec![vec![vec![Rational::zero(); n]; next.target.len()]; self.source.len()];
        for (b, tb) in self.target.segments().iter().enumerate() {
            for i in 0..n {
                let mid = tb.coalition().mass_at(i);
                if mid.is_zero() {
                    continue;
                }
                for a in 0..self.source.len() {
                    let x = &self.flow[a][b][i];
                    if x.is_zero() {
                        continue;
                    }
                    for c in 0..next.target.len() {
                        let y = &next.flow[b][c][i];
                        if !y.is_zero() {
                            flow[a][c][i] += x * y / mid;
                        }
                    }
                }
            }
        }
        Ok(TransportPlan {
            source: self.source.clone(),
            target: next.target.clone(),
            flow,
        })
    }

    pub fn source(&self) -> &Segmentation {
        &self.source
    }

    pub fn target(&self) -> &Segmentation {
        &self.target
    }

    pub fn flow(&self, a: usize, b: usize, i: usize) -> &Rational {
        &self.flow[a][b][i]
    }

    pub fn flows(&self) -> &[Vec<Vec<Rational>>] {
        &self.flow
    }

    /// Positive cells `(b, i, mass)` in source row `a`.
    pub fn row_cells(&self, a: usize) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.flow[a].iter().enumerate().flat_map(|(b, cell)| {
            cell.iter()
                .enumerate()
                .filter(|(_, x)| x.is_positive())
                .map(move |(i, x)| (b, i, x))
        })
    }

    /// Positive cells `(a, b, i, mass)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> + '_ {
        (0..self.source.len())
            .flat_map(move |a| self.row_cells(a).map(move |(b, i, x)| (a, b, i, x)))
    }
}

/// An incumbent segmentation (plan source) facing a deviation (plan target).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationScenario {
    plan: TransportPlan,
}

impl DeviationScenario {
    pub fn new(plan: TransportPlan) -> Self {
        DeviationScenario { plan }
    }

    pub fn plan(&self) -> &TransportPlan {
        &self.plan
    }

    fn surplus_pair(&self, a: usize, b: usize, i: usize) -> (Rational, Rational) {
        let v = &self.plan.source.market().values()[i];
        (
            consumer_surplus(v, self.plan.source.segments()[a].price()),
            consumer_surplus(v, self.plan.target.segments()[b].price()),
        )
    }

    fn check_index(&self, a: usize) -> Result<()> {
        if a >= self.plan.source.len() {
            return Err(Error::IndexOutOfRange {
                index: a,
                len: self.plan.source.len(),
            });
        }
        Ok(())
    }

    /// Source segment `a` objects to the target: every member weakly
    /// prefers `a`'s price, some positive mass strictly.
    pub fn objects(&self, a: usize) -> Result<bool> {
        self.check_index(a)?;
        let mut strict = false;
        for (b, i, _) in self.plan.row_cells(a) {
            let (own, other) = self.surplus_pair(a, b, i);
            if own < other {
                return Ok(false);
            }
            strict |= own > other;
        }
        Ok(strict)
    }

    /// Some positive mass of `a` strictly prefers `a`'s price, and some
    /// positive mass of members whose value is optimal for `a` weakly does.
    pub fn weakly_objects(&self, a: usize) -> Result<bool> {
        self.check_index(a)?;
        let segment = &self.plan.source.segments()[a];
        let optimal = segment.coalition().optimal_price_indices()?;
        let mut strict = false;
        let mut weak_at_optimal = false;
        for (b, i, _) in self.plan.row_cells(a) {
            let (own, other) = self.surplus_pair(a, b, i);
            strict |= own > other;
            weak_at_optimal |= own >= other && optimal.contains(&i);
        }
        Ok(strict && weak_at_optimal)
    }

    /// Some source segment objects to the target.
    pub fn blocks(&self) -> bool {
        (0..self.plan.source.len()).any(|a| self.objects(a).expect("index in range"))
    }

    pub fn weakly_blocks(&self) -> bool {
        (0..self.plan.source.len()).any(|a| self.weakly_objects(a).expect("index in range"))
    }
}

pub fn objects_to(segment_index: usize, scenario: &DeviationScenario) -> Result<bool> {
    scenario.objects(segment_index)
}

pub fn blocks(scenario: &DeviationScenario) -> bool {
    scenario.blocks()
}

pub fn weakly_objects_to(segment_index: usize, scenario: &DeviationScenario) -> Result<bool> {
    scenario.weakly_objects(segment_index)
}

pub fn weakly_blocks(scenario: &DeviationScenario) -> bool {
    scenario.weakly_blocks()
}

/// Whether `s` Pareto dominates `s_prime`.
///
/// With a plan (source `s`, target `s_prime`) the comparison is consumer by
/// consumer through the plan. Without one, it asks whether some coupling
/// works, which within each value class is first-order stochastic dominance
/// of the surplus distributions, with the distributions differing somewhere.
pub fn pareto_dominates(
    s: &Segmentation,
    s_prime: &Segmentation,
    plan: Option<&TransportPlan>,
) -> Result<bool> {
    if s.market() != s_prime.market() {
        return Err(Error::MarketMismatch);
    }
    match plan {
        Some(plan) => {
            if plan.source() != s || plan.target() != s_prime {
                return Err(Error::PlanShape);
            }
            let scenario = DeviationScenario::new(plan.clone());
            let mut strict = false;
            for (a, b, i, _) in plan.cells() {
                let (here, there) = scenario.surplus_pair(a, b, i);
                if here < there {
                    return Ok(false);
                }
                strict |= here > there;
            }
            Ok(strict)
        }
        None => Ok(surplus_fosd(s, s_prime)),
    }
}

/// Per-value first-order dominance of `s` over `t`, strict in some class.
pub fn surplus_fosd(s: &Segmentation, t: &Segmentation) -> bool {
    let (ps, pt) = (s.surplus_profile(), t.surplus_profile());
    let mut differs = false;
    for i in 0..s.market().len() {
        let (ds, dt) = (ps.surplus_distribution(i), pt.surplus_distribution(i));
        if ds != dt {
            differs = true;
        }
        if !dominates_upper_tails(&ds, &dt) {
            return false;
        }
    }
    differs
}

/// For every threshold, `x` has at least as much mass strictly above it as `y`.
/// Both inputs are ascending `(level, mass)` lists of equal total.
pub(crate) fn dominates_upper_tails(
    x: &[(Rational, Rational)],
    y: &[(Rational, Rational)],
) -> bool {
    let tail = |d: &[(Rational, Rational)], t: &Rational| {
        d.iter()
            .filter(|(s, _)| s > t)
            .fold(Rational::zero(), |acc, (_, m)| acc + m)
    };
    x.iter().chain(y).all(|(t, _)| tail(x, t) >= tail(y, t))
}
