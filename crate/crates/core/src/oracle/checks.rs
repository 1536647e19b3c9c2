//! Agreement checks between the exact decision procedures and the atom
//! model.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    atom_blocks, atom_objection, atom_pareto_dominates, atom_weakly_blocks, dominates_levels,
    enumerate_segmentations, lower_plan, objects, priced_blocks, stable_among_levels,
    AtomSegmentation, AtomizedMarket,
};
use crate::constructions::{greedy_stable_segmentation, mer_segmentation, two_value_stable};
use crate::cooperative::strong_blocks_some_equivalent;
use crate::error::Result;
use crate::fixtures;
use crate::market::Market;
use crate::plan::{pareto_dominates, TransportPlan};
use crate::segmentation::Segmentation;
use crate::stability::{
    diagnose, inefficiency_witness, is_efficient, nonsaturation_witness, Diagnosis,
};
use crate::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub atoms: usize,
    pub segmentations: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

/// Whether atoms can be matched within value classes so that every `x`
/// level is at least the matched `y` level (and, if `strict`, some level is
/// higher). Searches matchings exhaustively.
pub fn exists_coupling(am: &AtomizedMarket, x: &[u32], y: &[u32], strict: bool) -> bool {
    fn search(
        k: usize,
        am: &AtomizedMarket,
        x: &[u32],
        y: &[u32],
        used: &mut [bool],
        strict_needed: bool,
        gained: bool,
    ) -> bool {
        if k == x.len() {
            return gained || !strict_needed;
        }
        let value = am.atoms()[k];
        let mut tried: Vec<u32> = Vec::new();
        for j in 0..y.len() {
            if used[j] || am.atoms()[j] != value || x[k] < y[j] || tried.contains(&y[j]) {
                continue;
            }
            // Atoms with equal levels are interchangeable.
            tried.push(y[j]);
            used[j] = true;
            let found = search(k + 1, am, x, y, used, strict_needed, gained || x[k] > y[j]);
            used[j] = false;
            if found {
                return true;
            }
        }
        false
    }
    let mut used = vec![false; y.len()];
    search(0, am, x, y, &mut used, strict, false)
}

/// No coalition inside a single block has an objection, checked over every
/// subset of every block and every optimal price of the subset.
pub fn fragmentation_proof_by_definition(am: &AtomizedMarket, s: &AtomSegmentation) -> bool {
    let current = am.surpluses(s);
    s.blocks().iter().all(|block| {
        (1u32..1 << block.len()).all(|mask| {
            let members: Vec<usize> = (0..block.len())
                .filter(|&t| mask & (1 << t) != 0)
                .map(|t| block[t])
                .collect();
            am.optimal_prices_of(&members)
                .into_iter()
                .all(|p| !objects(am, &members, p, &current))
        })
    })
}

/// For an unstable segmentation: builds the matching witness, lowers the
/// pair onto the grid the plan needs, and confirms that the original does
/// not block the witness while some atom's surplus changes. `None` for a
/// stable segmentation.
pub fn witness_lowering_check(s: &Segmentation) -> Result<Option<bool>> {
    let (_, plan) = match diagnose(s) {
        Diagnosis::Stable => return Ok(None),
        Diagnosis::Inefficient => {
            inefficiency_witness(s).expect("an inefficient canonical form has an inefficient part")
        }
        Diagnosis::Unsaturated => nonsaturation_witness(s)?,
    };
    let (am, low, witness) = lower_plan(&plan)?;
    Ok(Some(
        !atom_blocks(&am, &low, &witness) && am.surpluses(&low) != am.surpluses(&witness),
    ))
}

/// For an inefficient segmentation: the split-off part of the inefficiency
/// witness, lowered to its exact grid, is drawn from a single segment and
/// objects to the original.
pub fn fragment_objects(s: &Segmentation) -> Result<bool> {
    let Some((_, plan)) = inefficiency_witness(s) else {
        return Ok(false);
    };
    let (am, low, witness) = lower_plan(&plan)?;
    let fragment = witness.prices().len() - 1;
    let members: Vec<usize> = (0..am.len())
        .filter(|&k| witness.assignment()[k] == fragment)
        .collect();
    let single_source = members
        .iter()
        .all(|&k| low.assignment()[k] == low.assignment()[members[0]]);
    Ok(single_source && atom_objection(&am, &members, witness.prices()[fragment], &low)?)
}

/// Total consumer surplus of a lifted segmentation, in atom units.
fn total_surplus(am: &AtomizedMarket, s: &AtomSegmentation) -> Rational {
    am.lift(s).total_consumer_surplus()
}

/// Runs every agreement property on all segmentations of `am`.
pub fn verify_market(am: &AtomizedMarket, cap: usize) -> Result<VerifyReport> {
    let all = enumerate_segmentations(am, cap)?;
    let mut report = VerifyReport {
        atoms: am.len(),
        segmentations: all.len(),
        ..VerifyReport::default()
    };
    let lifted: Vec<Segmentation> = all.iter().map(|s| am.lift(s)).collect();
    let levels: Vec<Vec<u32>> = all.iter().map(|s| am.surpluses(s)).collect();
    let best = mer_segmentation(am.market()).0.total_consumer_surplus();

    for (k, s) in all.iter().enumerate() {
        let stable = diagnose(&lifted[k]).stable();
        if stable {
            let blocks_all = stable_among_levels(am, &priced_blocks(s), &levels[k], &levels);
            report.record(blocks_all, || {
                format!("stable {:?} fails to block some alternative", lifted[k])
            });
            let undominated = levels
                .iter()
                .all(|other| !dominates_levels(other, &levels[k]));
            report.record(undominated, || {
                format!("stable {:?} is Pareto dominated", lifted[k])
            });
        } else {
            let ok = witness_lowering_check(&lifted[k])?.unwrap_or(false);
            report.record(ok, || format!("witness for {:?} is blocked", lifted[k]));
        }
        if is_efficient(&lifted[k]) {
            report.record(fragmentation_proof_by_definition(am, s), || {
                format!(
                    "efficient {:?} has an objection from inside a segment",
                    lifted[k]
                )
            });
        } else {
            report.record(fragment_objects(&lifted[k])?, || {
                format!("no objection from inside a segment of {:?}", lifted[k])
            });
        }
        report.record(lifted[k].total_consumer_surplus() <= best, || {
            format!("{:?} beats the equal-revenue construction", lifted[k])
        });
    }

    // Plan-free comparisons depend only on each value class's multiset of
    // levels; compare one representative per multiset.
    let mut reps: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for (k, lv) in levels.iter().enumerate() {
        reps.entry(sorted_by_class(am, lv)).or_insert(k);
    }
    let reps: Vec<usize> = reps.into_values().collect();
    for &x in &reps {
        for &y in &reps {
            let dominated = exists_coupling(am, &levels[x], &levels[y], true);
            report.record(
                dominated == pareto_dominates(&lifted[x], &lifted[y], None)?,
                || {
                    format!(
                        "dominance test disagrees on {:?} vs {:?}",
                        lifted[x], lifted[y]
                    )
                },
            );
            let never_worse = exists_coupling(am, &levels[y], &levels[x], false);
            report.record(
                !never_worse == strong_blocks_some_equivalent(&lifted[x], &lifted[y]),
                || {
                    format!(
                        "strict-gain test disagrees on {:?} vs {:?}",
                        lifted[x], lifted[y]
                    )
                },
            );
        }
    }

    if am.market().len() == 2 {
        let triple = triple_from(am, &all, &lifted, &levels)?;
        report.record(triple.sets_equal, || {
            format!("two-value sets differ: {:?}", triple)
        });
        if triple.continuum_representable {
            report.record(triple.pairwise_equivalent, || {
                format!("two-value members not equivalent: {:?}", triple)
            });
        }
    }
    Ok(report)
}

fn sorted_by_class(am: &AtomizedMarket, levels: &[u32]) -> Vec<u32> {
    let mut keyed: Vec<(usize, u32)> = am
        .atoms()
        .iter()
        .copied()
        .zip(levels.iter().copied())
        .collect();
    keyed.sort();
    keyed.into_iter().map(|(_, l)| l).collect()
}

/// The three candidate solution sets of a two-value market, as indices into
/// the enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleReport {
    pub segmentations: usize,
    pub stable: Vec<usize>,
    pub acs_maximal: Vec<usize>,
    pub undominated: Vec<usize>,
    pub sets_equal: bool,
    pub pairwise_equivalent: bool,
    /// Whether the closed-form stable segmentation fits on this grid.
    pub continuum_representable: bool,
}

pub fn two_value_triple(am: &AtomizedMarket, cap: usize) -> Result<TripleReport> {
    let all = enumerate_segmentations(am, cap)?;
    let lifted: Vec<Segmentation> = all.iter().map(|s| am.lift(s)).collect();
    let levels: Vec<Vec<u32>> = all.iter().map(|s| am.surpluses(s)).collect();
    triple_from(am, &all, &lifted, &levels)
}

fn triple_from(
    am: &AtomizedMarket,
    all: &[AtomSegmentation],
    lifted: &[Segmentation],
    levels: &[Vec<u32>],
) -> Result<TripleReport> {
    let stable: Vec<usize> = (0..all.len())
        .filter(|&k| stable_among_levels(am, &priced_blocks(&all[k]), &levels[k], levels))
        .collect();
    let surplus: Vec<Rational> = all.iter().map(|s| total_surplus(am, s)).collect();
    let top = surplus
        .iter()
        .max()
        .expect("enumeration is nonempty")
        .clone();
    let acs_maximal: Vec<usize> = (0..all.len()).filter(|&k| surplus[k] == top).collect();
    let undominated: Vec<usize> = (0..all.len())
        .filter(|&k| levels.iter().all(|t| !dominates_levels(t, &levels[k])))
        .collect();
    let pairwise_equivalent = stable
        .iter()
        .chain(&acs_maximal)
        .chain(&undominated)
        .all(|&a| lifted[a].weak_surplus_equivalent(&lifted[stable.first().copied().unwrap_or(a)]));
    let closed_form = two_value_stable(am.market())?;
    let continuum_representable = closed_form
        .segments()
        .iter()
        .flat_map(|s| s.coalition().mass())
        .all(|m| (m / am.unit()).is_integer());
    Ok(TripleReport {
        segmentations: all.len(),
        sets_equal: stable == acs_maximal && acs_maximal == undominated,
        stable,
        acs_maximal,
        undominated,
        pairwise_equivalent,
        continuum_representable,
    })
}

/// Checks that need no enumeration, for markets too large to enumerate:
/// constructed and simple segmentations, their witnesses, and the
/// hand-built layouts when the market is one of the fixtures.
pub fn targeted_checks(market: &Market) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let mut candidates = vec![Segmentation::isolated(market)];
    for p in market.full_coalition().optimal_prices()? {
        candidates.push(Segmentation::trivial(market, p)?);
    }
    let (mer, _) = mer_segmentation(market);
    candidates.push(mer.canonicalize());
    candidates.push(mer);
    candidates.push(greedy_stable_segmentation(market));
    if market.len() == 2 {
        candidates.push(two_value_stable(market)?);
    }
    report.segmentations = candidates.len();

    for (k, c) in candidates.iter().enumerate() {
        match witness_lowering_check(c)? {
            Some(ok) => report.record(ok, || format!("witness for {:?} is blocked", c)),
            None => {
                for d in &candidates[..] {
                    let plan = TransportPlan::proportional(c, d)?;
                    let (am, low, other) = lower_plan(&plan)?;
                    if am.surpluses(&low) != am.surpluses(&other) {
                        report.record(atom_blocks(&am, &low, &other), || {
                            format!("stable candidate {} fails to block {:?}", k, d)
                        });
                    }
                }
            }
        }
    }

    if market == &fixtures::twenty_one_market() {
        let (s, s_prime, s_split) = fixtures::twenty_one_layouts();
        let (am, base, prime) = lower_plan(&s.plan_to(&s_prime)?)?;
        report.record(!atom_blocks(&am, &base, &prime), || {
            String::from("layout pair is blocked")
        });
        report.record(atom_weakly_blocks(&am, &base, &prime), || {
            String::from("layout pair is not weakly blocked")
        });
        let (am, split, prime) = lower_plan(&s_split.plan_to(&s_prime)?)?;
        report.record(atom_blocks(&am, &split, &prime), || {
            String::from("three-segment layout does not block")
        });
    }
    if market == &fixtures::four_value_market() {
        let plan = fixtures::four_value_dominating_layout()
            .plan_to(&fixtures::four_value_split_layout())?;
        let (am, dom, split) = lower_plan(&plan)?;
        report.record(atom_pareto_dominates(&am, &dom, &split), || {
            String::from("dominating layout does not dominate")
        });
    }
    report.atoms = market.len();
    Ok(report)
}
