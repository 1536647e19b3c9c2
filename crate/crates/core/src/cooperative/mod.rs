//! Cooperative solution concepts: the core, stable sets under weak
//! blocking, and farsighted (chain) blocking.

mod chain;

pub use chain::{build_rv_chain, check_chain, BlockingChain, ChainStep, ChainVariant};

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::constructions::{greedy_stable_segmentation, mer_segmentation};
use crate::error::{Error, Result};
use crate::market::{Coalition, Market};
use crate::plan::{dominates_upper_tails, DeviationScenario, TransportPlan};
use crate::segmentation::{consumer_surplus, Segmentation};
use crate::stability::is_stable;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreResult {
    Empty,
    /// Every core member is equivalent to selling to everyone at this price.
    TrivialAt(Rational),
}

/// The core is nonempty exactly when the lowest value is an optimal price
/// for the whole market.
pub fn core_description(m: &Market) -> CoreResult {
    if m.is_efficient() {
        CoreResult::TrivialAt(m.lowest_value().clone())
    } else {
        CoreResult::Empty
    }
}

pub fn in_core(s: &Segmentation) -> bool {
    match core_description(s.market()) {
        CoreResult::Empty => false,
        CoreResult::TrivialAt(p) => {
            let trivial = Segmentation::trivial(s.market(), p).expect("lowest value is optimal");
            s.weak_surplus_equivalent(&trivial)
        }
    }
}

/// With a nonempty core, the trivial segmentation at the lowest value is
/// stable and both constructions reproduce it.
pub fn core_equals_stable_check(m: &Market) -> Result<bool> {
    let CoreResult::TrivialAt(p) = core_description(m) else {
        return Err(Error::EmptyCore);
    };
    let trivial = Segmentation::trivial(m, p)?;
    let (mer, _) = mer_segmentation(m);
    let greedy = greedy_stable_segmentation(m);
    Ok(is_stable(&trivial)
        && mer.weak_surplus_equivalent(&trivial)
        && greedy.weak_surplus_equivalent(&trivial))
}

/// For a segmentation outside the core, a deviation whose first segment
/// objects to `s` (the scenario's target).
///
/// With a nonempty core the objecting segment is the whole market at the
/// lowest value. Otherwise it is every lowest-value consumer together with
/// as many consumers as possible from the cheapest segment priced above the
/// lowest value, taken at that segment's price level, priced at the lowest
/// value; the rest of the market is split into single-value segments.
pub fn core_objection(s: &Segmentation) -> Option<DeviationScenario> {
    if in_core(s) {
        return None;
    }
    let m = s.market();
    let n = m.len();
    let v = m.values();
    let (objector, flows) = match core_description(m) {
        CoreResult::TrivialAt(p) => {
            let t = Segmentation::trivial(m, p).expect("lowest value is optimal");
            let row = s
                .segments()
                .iter()
                .map(|seg| seg.coalition().mass().to_vec())
                .collect();
            (t, vec![row])
        }
        CoreResult::Empty => {
            let (b, seg) = s
                .segments()
                .iter()
                .enumerate()
                .filter(|(_, seg)| seg.price_index() > 0)
                .min_by(|x, y| x.1.price().cmp(y.1.price()))
                .expect("an all-lowest-price segmentation would make the lowest value optimal");
            let p = seg.price_index();
            let bound = &v[0] * &m.masses()[0] / (&v[p] - &v[0]);
            let avail = seg.coalition().mass_at(p);
            let y = if &bound < avail { bound } else { avail.clone() };
            let mut mass = vec![Rational::zero(); n];
            mass[0] = m.masses()[0].clone();
            mass[p] = y.clone();
            let objecting = Coalition::new(m, mass.clone()).expect("non-negative");
            let mut parts = vec![(objecting, v[0].clone())];
            let mut owner = vec![None; n];
            for i in 0..n {
                let rest = &m.masses()[i] - &mass[i];
                if rest.is_positive() {
                    owner[i] = Some(parts.len());
                    parts.push((
                        Coalition::single(m, i, rest).expect("in range"),
                        v[i].clone(),
                    ));
                }
            }
            let objector =
                Segmentation::from_parts(m, parts).expect("partition with optimal prices");
            let mut flows = vec![vec![vec![Rational::zero(); n]; s.len()]; objector.len()];
            for (c, target) in s.segments().iter().enumerate() {
                for i in 0..n {
                    let here = target.coalition().mass_at(i).clone();
                    let into_objecting = if i == 0 {
                        here.clone()
                    } else if i == p && c == b {
                        y.clone()
                    } else {
                        Rational::zero()
                    };
                    let rest = &here - &into_objecting;
                    flows[0][c][i] = into_objecting;
                    if let Some(o) = owner[i] {
                        flows[o][c][i] = rest;
                    }
                }
            }
            (objector, flows)
        }
    };
    let plan = TransportPlan::new(objector, s.clone(), flows).expect("marginals match");
    Some(DeviationScenario::new(plan))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateOutcome {
    pub equivalent: bool,
    /// `None` for candidates equivalent to the incumbent.
    pub weakly_blocked: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSetReport {
    pub outcomes: Vec<CandidateOutcome>,
    pub all_blocked: bool,
}

/// Checks that `s` weakly blocks every supplied candidate that is not
/// weakly surplus-equivalent to it. Each plan must run from `s` to its
/// candidate.
pub fn stable_set_check(
    s: &Segmentation,
    candidates: &[(Segmentation, TransportPlan)],
) -> Result<StableSetReport> {
    let mut outcomes = Vec::with_capacity(candidates.len());
    for (candidate, plan) in candidates {
        if plan.source() != s || plan.target() != candidate {
            return Err(Error::PlanShape);
        }
        if s.weak_surplus_equivalent(candidate) {
            outcomes.push(CandidateOutcome {
                equivalent: true,
                weakly_blocked: None,
            });
        } else {
            let blocked = DeviationScenario::new(plan.clone()).weakly_blocks();
            outcomes.push(CandidateOutcome {
                equivalent: false,
                weakly_blocked: Some(blocked),
            });
        }
    }
    let all_blocked = outcomes.iter().all(|o| o.weakly_blocked != Some(false));
    Ok(StableSetReport {
        outcomes,
        all_blocked,
    })
}

/// Farsighted blocking of anything by `s` holds exactly when some consumer
/// gains under `s`; the second argument does not matter.
pub fn harsanyi_blocks(s: &Segmentation, _other: &Segmentation) -> bool {
    s.total_consumer_surplus().is_positive()
}

/// Whether a positive mass is strictly better off under `s` than under
/// `other` however consumers are matched within value classes.
///
/// That fails only when, for every value, the surplus distribution under
/// `other` first-order dominates the one under `s`.
pub fn strong_blocks_some_equivalent(s: &Segmentation, other: &Segmentation) -> bool {
    let (ps, po) = (s.surplus_profile(), other.surplus_profile());
    (0..s.market().len())
        .any(|i| !dominates_upper_tails(&po.surplus_distribution(i), &ps.surplus_distribution(i)))
}

/// `(segment of s, segment of other, value index)` where a consumer of that
/// value would gain moving from the `other` segment to the `s` segment.
pub(crate) fn strict_cell(s: &Segmentation, other: &Segmentation) -> Option<(usize, usize, usize)> {
    let v = s.market().values();
    for (b, sb) in s.segments().iter().enumerate() {
        for i in sb.coalition().support() {
            let here = consumer_surplus(&v[i], sb.price());
            for (a, oa) in other.segments().iter().enumerate() {
                if oa.coalition().mass_at(i).is_positive()
                    && consumer_surplus(&v[i], oa.price()) < here
                {
                    return Some((b, a, i));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};

    fn market(values: &[i64], masses: &[Rational]) -> Market {
        Market::new(values.iter().map(|&x| int(x)).collect(), masses.to_vec()).unwrap()
    }

    #[test]
    fn core_descriptions() {
        assert_eq!(
            core_description(&fixtures::skewed_market()),
            CoreResult::Empty
        );
        let m = market(&[1, 2], &[rat(3, 4), rat(1, 4)]);
        assert_eq!(core_description(&m), CoreResult::TrivialAt(int(1)));
        let single = market(&[7], &[int(1)]);
        assert_eq!(core_description(&single), CoreResult::TrivialAt(int(7)));
    }

    #[test]
    fn core_membership() {
        let m = market(&[1, 2], &[rat(3, 4), rat(1, 4)]);
        let t = Segmentation::trivial(&m, int(1)).unwrap();
        assert!(in_core(&t));
        assert!(core_objection(&t).is_none());
        let iso = Segmentation::isolated(&m);
        assert!(!in_core(&iso));
        let objection = core_objection(&iso).unwrap();
        assert!(objection.objects(0).unwrap());

        let s = fixtures::uniform_pooled_segmentation();
        assert!(!in_core(&s));
        let objection = core_objection(&s).unwrap();
        assert!(objection.objects(0).unwrap());
        let (mer, _) = mer_segmentation(&fixtures::skewed_market());
        assert!(!in_core(&mer));
        assert!(core_objection(&mer).unwrap().objects(0).unwrap());
    }

    #[test]
    fn core_equals_stable() {
        assert_eq!(
            core_equals_stable_check(&market(&[1, 2], &[rat(3, 4), rat(1, 4)])),
            Ok(true)
        );
        assert_eq!(
            core_equals_stable_check(&market(&[3], &[rat(1, 5)])),
            Ok(true)
        );
        assert_eq!(
            core_equals_stable_check(&market(&[1, 3], &[rat(1, 4), rat(3, 4)])),
            Err(Error::EmptyCore)
        );
    }

    #[test]
    fn weak_blocking_corpus() {
        let (s, s_prime, _) = fixtures::twenty_one_layouts();
        let seg = s.to_segmentation().unwrap();
        let plan = s.plan_to(&s_prime).unwrap();
        let same = seg.canonicalize();
        let same_plan = TransportPlan::proportional(&seg, &same).unwrap();
        let report = stable_set_check(
            &seg,
            &[
                (s_prime.to_segmentation().unwrap(), plan),
                (same, same_plan),
            ],
        )
        .unwrap();
        assert_eq!(report.outcomes[0].weakly_blocked, Some(true));
        assert!(report.outcomes[1].equivalent);
        assert!(report.all_blocked);
    }

    #[test]
    fn farsighted_blocking_criteria() {
        let s = fixtures::uniform_pooled_segmentation();
        let iso = Segmentation::isolated(s.market());
        let (mer, _) = mer_segmentation(s.market());
        assert!(harsanyi_blocks(&s, &iso));
        assert!(!harsanyi_blocks(&iso, &s));
        assert!(harsanyi_blocks(&mer, &s));
        assert!(strong_blocks_some_equivalent(&mer, &s));
        assert!(strong_blocks_some_equivalent(&s, &mer));
        assert!(!strong_blocks_some_equivalent(&s, &s));
    }
}
