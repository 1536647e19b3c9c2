//! Farsighted blocking chains.
//!
//! A chain runs from a blocked segmentation to a blocker through
//! intermediate segmentations. At each step one segment of the new
//! segmentation is the moving coalition; its members must weakly prefer the
//! final segmentation to where they sat one step earlier. Segments the moving
//! coalition does not touch must carry over unchanged.
//!
//! Consumers are followed through the step plans; a consumer's position at
//! the end is obtained by composing the plans, splitting each
//! (segment, value) cell proportionally.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{strict_cell, strong_blocks_some_equivalent};
use crate::error::{Error, Result};
use crate::market::Coalition;
use crate::plan::TransportPlan;
use crate::rational::rat;
use crate::segmentation::{consumer_surplus, Segment, Segmentation};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainVariant {
    /// Some step has a moving coalition with a strict gain.
    Weak,
    /// Every step does.
    Strong,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub segmentation: Segmentation,
    /// Index of the moving segment in `segmentation`.
    pub moving: usize,
    /// From the previous segmentation to this one.
    pub plan: TransportPlan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockingChain {
    pub start: Segmentation,
    pub steps: Vec<ChainStep>,
}

impl BlockingChain {
    pub fn terminal(&self) -> &Segmentation {
        self.steps
            .last()
            .map(|s| &s.segmentation)
            .unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Verifies the payoff, strictness and persistence conditions.
pub fn check_chain(chain: &BlockingChain, variant: ChainVariant) -> Result<bool> {
    if chain.steps.is_empty() {
        return Err(Error::MalformedChain {
            step: 0,
            reason: "chain has no steps",
        });
    }
    let mut prev = &chain.start;
    for (k, step) in chain.steps.iter().enumerate() {
        if step.plan.source() != prev || step.plan.target() != &step.segmentation {
            return Err(Error::MalformedChain {
                step: k + 1,
                reason: "plan does not connect consecutive segmentations",
            });
        }
        if step.moving >= step.segmentation.len() {
            return Err(Error::MalformedChain {
                step: k + 1,
                reason: "moving segment index out of range",
            });
        }
        prev = &step.segmentation;
    }

    let terminal = chain.terminal();
    let values = terminal.market().values();
    // to_end[k]: plan from the segmentation after step k to the terminal.
    let mut to_end = vec![TransportPlan::identity(terminal)];
    for step in chain.steps.iter().skip(1).rev() {
        let next = step.plan.compose(to_end.last().expect("nonempty"))?;
        to_end.push(next);
    }
    to_end.reverse();

    let mut any_strict = false;
    let mut all_strict = true;
    let mut prev = &chain.start;
    for (k, step) in chain.steps.iter().enumerate() {
        let m = step.moving;
        let forward = &to_end[k];
        let mut strict = false;
        for a in 0..prev.len() {
            let before = prev.segments()[a].price();
            for i in 0..values.len() {
                if step.plan.flow(a, m, i).is_zero() {
                    continue;
                }
                for (c, seg) in terminal.segments().iter().enumerate() {
                    if forward.flow(m, c, i).is_zero() {
                        continue;
                    }
                    let (then, at_end) = (
                        consumer_surplus(&values[i], before),
                        consumer_surplus(&values[i], seg.price()),
                    );
                    if then > at_end {
                        return Ok(false);
                    }
                    strict |= then < at_end;
                }
            }
        }
        if !persists(prev, step) {
            return Ok(false);
        }
        any_strict |= strict;
        all_strict &= strict;
        prev = &step.segmentation;
    }
    Ok(match variant {
        ChainVariant::Weak => any_strict,
        ChainVariant::Strong => all_strict,
    })
}

/// Every segment untouched by the moving coalition reappears unchanged.
fn persists(prev: &Segmentation, step: &ChainStep) -> bool {
    let n = prev.market().len();
    (0..prev.len()).all(|a| {
        if (0..n).any(|i| !step.plan.flow(a, step.moving, i).is_zero()) {
            return true;
        }
        let seg = &prev.segments()[a];
        (0..step.segmentation.len()).any(|b| {
            let next = &step.segmentation.segments()[b];
            next.price() == seg.price()
                && next.coalition() == seg.coalition()
                && (0..n).all(|i| step.plan.flow(a, b, i) == seg.coalition().mass_at(i))
        })
    })
}

/// Builds a chain from `blocked` toward `blocker` that [`check_chain`]
/// accepts.
///
/// Weak: split every mixed segment into single-value segments, moving the
/// consumers valued at its price, then either jump straight to the blocker
/// or assemble it one segment at a time from single-value segments.
///
/// Strong: first form a small coalition holding some consumers who gain
/// under the blocker plus a sliver of the lowest-value consumers of every
/// blocked segment, with everyone else isolated by value; then let one
/// gaining blocker segment form, and then every other blocker segment with
/// positive surplus. The end point agrees with the blocker on every
/// consumer's surplus but may omit zero-surplus segments.
pub fn build_rv_chain(
    blocked: &Segmentation,
    blocker: &Segmentation,
    variant: ChainVariant,
) -> Result<BlockingChain> {
    if blocked.market() != blocker.market() {
        return Err(Error::MarketMismatch);
    }
    match variant {
        ChainVariant::Weak => {
            if !blocker.total_consumer_surplus().is_positive() {
                return Err(Error::NotBlocking(
                    "blocker gives no consumer positive surplus",
                ));
            }
            weak_chain(blocked, blocker)
        }
        ChainVariant::Strong => {
            if !strong_blocks_some_equivalent(blocker, blocked) {
                return Err(Error::NotBlocking(
                    "no consumer strictly gains under the blocker",
                ));
            }
            strong_chain(blocked, blocker)
        }
    }
}

/// A next segmentation given as priced parts, each assembled from pieces
/// `(previous segment index, mass vector)`.
type Part = (Rational, Vec<(usize, Vec<Rational>)>);

fn assemble(prev: &Segmentation, parts: Vec<Part>) -> Result<(Segmentation, TransportPlan)> {
    let m = prev.market();
    let n = m.len();
    let mut segments = Vec::with_capacity(parts.len());
    let mut flow = vec![vec![vec![Rational::zero(); n]; parts.len()]; prev.len()];
    for (b, (price, pieces)) in parts.iter().enumerate() {
        let mut mass = vec![Rational::zero(); n];
        for (a, piece) in pieces {
            for i in 0..n {
                mass[i] += &piece[i];
                flow[*a][b][i] += &piece[i];
            }
        }
        segments.push(Segment::new(Coalition::new(m, mass)?, price.clone())?);
    }
    let next = Segmentation::new(m, segments)?;
    let plan = TransportPlan::new(prev.clone(), next.clone(), flow)?;
    Ok((next, plan))
}

fn push_step(chain: &mut BlockingChain, parts: Vec<Part>, moving: usize) -> Result<()> {
    let (segmentation, plan) = assemble(chain.terminal(), parts)?;
    chain.steps.push(ChainStep {
        segmentation,
        moving,
        plan,
    });
    Ok(())
}

fn unit(n: usize, i: usize, x: Rational) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = x;
    v
}

fn is_single_value(seg: &Segment) -> bool {
    seg.coalition().support().nth(1).is_none()
}

fn keep(prev: &Segmentation, a: usize) -> Part {
    let seg = &prev.segments()[a];
    (
        seg.price().clone(),
        vec![(a, seg.coalition().mass().to_vec())],
    )
}

/// Splits each mixed segment into one segment per value, one step each.
fn atomize(chain: &mut BlockingChain) -> Result<()> {
    while let Some(a) = chain
        .terminal()
        .segments()
        .iter()
        .position(|s| !is_single_value(s))
    {
        let prev = chain.terminal().clone();
        let n = prev.market().len();
        let seg = &prev.segments()[a];
        let mut parts: Vec<Part> = (0..prev.len())
            .filter(|&x| x != a)
            .map(|x| keep(&prev, x))
            .collect();
        let mut moving = 0;
        for i in seg.coalition().support() {
            if i == seg.price_index() {
                moving = parts.len();
            }
            parts.push((
                prev.market().values()[i].clone(),
                vec![(a, unit(n, i, seg.coalition().mass_at(i).clone()))],
            ));
        }
        push_step(chain, parts, moving)?;
    }
    Ok(())
}

/// Forms `target` from the unplaced single-value segments of the current
/// end of the chain (taking them in order), keeping placed segments intact.
/// `drawn_first` lists earlier contributions `(segment, mass)` to use before
/// the single-value segments.
fn place(
    chain: &mut BlockingChain,
    placed: &mut Vec<bool>,
    target: &Segment,
    drawn_first: &[(usize, Vec<Rational>)],
    leftovers_separate: bool,
) -> Result<()> {
    let prev = chain.terminal().clone();
    let n = prev.market().len();
    let mut need: Vec<Rational> = target.coalition().mass().to_vec();
    let mut taken = vec![vec![Rational::zero(); n]; prev.len()];
    for (a, mass) in drawn_first {
        for i in 0..n {
            need[i] -= &mass[i];
            taken[*a][i] += &mass[i];
        }
    }
    for (a, seg) in prev.segments().iter().enumerate() {
        if placed[a] || !is_single_value(seg) {
            continue;
        }
        let i = seg.coalition().support().next().expect("nonempty");
        if !need[i].is_positive() {
            continue;
        }
        let avail = seg.coalition().mass_at(i) - &taken[a][i];
        let x = if avail < need[i] {
            avail
        } else {
            need[i].clone()
        };
        need[i] -= &x;
        taken[a][i] += x;
    }
    if need.iter().any(|x| !x.is_zero()) {
        return Err(Error::NotBlocking(
            "blocker segment cannot be drawn from single-value segments",
        ));
    }

    let mut parts = Vec::new();
    let mut next_placed = Vec::new();
    for (a, seg) in prev.segments().iter().enumerate() {
        let rest: Vec<Rational> = (0..n)
            .map(|i| seg.coalition().mass_at(i) - &taken[a][i])
            .collect();
        if rest.iter().all(|x| x.is_zero()) {
            continue;
        }
        if placed[a] || is_single_value(seg) || !leftovers_separate {
            parts.push((seg.price().clone(), vec![(a, rest)]));
            next_placed.push(placed[a]);
        } else {
            for i in (0..n).filter(|&i| rest[i].is_positive()) {
                parts.push((
                    prev.market().values()[i].clone(),
                    vec![(a, unit(n, i, rest[i].clone()))],
                ));
                next_placed.push(false);
            }
        }
    }
    let moving = parts.len();
    parts.push((
        target.price().clone(),
        taken
            .into_iter()
            .enumerate()
            .filter(|(_, m)| m.iter().any(|x| x.is_positive()))
            .collect(),
    ));
    next_placed.push(true);
    push_step(chain, parts, moving)?;
    *placed = next_placed;
    Ok(())
}

/// Orders placed segments to follow the blocker's segment order.
fn reorder_like(chain: &mut BlockingChain, blocker: &Segmentation) -> Result<()> {
    let end = chain.terminal().clone();
    if end.len() != blocker.len() || end == *blocker {
        return Ok(());
    }
    let mut used = vec![false; end.len()];
    let mut order = Vec::new();
    for seg in blocker.segments() {
        let Some(a) = (0..end.len()).find(|&a| !used[a] && &end.segments()[a] == seg) else {
            return Ok(());
        };
        used[a] = true;
        order.push(a);
    }
    let last = chain.steps.pop().expect("chain has steps");
    let prev = chain.terminal().clone();
    let n = prev.market().len();
    let mut parts = Vec::new();
    let mut moving = 0;
    for &b in &order {
        let seg = &last.segmentation.segments()[b];
        if b == last.moving {
            moving = parts.len();
        }
        let pieces = (0..prev.len())
            .map(|a| {
                (
                    a,
                    (0..n)
                        .map(|i| last.plan.flow(a, b, i).clone())
                        .collect::<Vec<_>>(),
                )
            })
            .filter(|(_, m)| m.iter().any(|x| x.is_positive()))
            .collect();
        parts.push((seg.price().clone(), pieces));
    }
    push_step(chain, parts, moving)
}

fn weak_chain(blocked: &Segmentation, blocker: &Segmentation) -> Result<BlockingChain> {
    let mut chain = BlockingChain {
        start: blocked.clone(),
        steps: Vec::new(),
    };
    atomize(&mut chain)?;
    if let Some(jump) = single_jump(chain.terminal(), blocker) {
        chain.steps.push(jump);
        return Ok(chain);
    }
    let mut placed = vec![false; chain.terminal().len()];
    for seg in blocker.segments() {
        place(&mut chain, &mut placed, seg, &[], false)?;
    }
    reorder_like(&mut chain, blocker)?;
    Ok(chain)
}

/// A direct move from an all-single-value segmentation to the blocker, if
/// one gaining blocker segment can absorb everything not already in place.
fn single_jump(start: &Segmentation, blocker: &Segmentation) -> Option<ChainStep> {
    let n = start.market().len();
    let mut matched: Vec<Option<usize>> = vec![None; blocker.len()];
    let mut used = vec![false; start.len()];
    for (b, seg) in blocker.segments().iter().enumerate() {
        if let Some(a) = (0..start.len()).find(|&a| !used[a] && &start.segments()[a] == seg) {
            used[a] = true;
            matched[b] = Some(a);
        }
    }
    let open: Vec<usize> = (0..blocker.len())
        .filter(|&b| matched[b].is_none())
        .collect();
    let [moving] = open[..] else { return None };
    if !blocker.segments()[moving].has_positive_surplus() {
        return None;
    }
    let mut flow = vec![vec![vec![Rational::zero(); n]; blocker.len()]; start.len()];
    for (b, a) in matched.iter().enumerate() {
        if let Some(a) = *a {
            flow[a][b] = start.segments()[a].coalition().mass().to_vec();
        }
    }
    for a in (0..start.len()).filter(|&a| !used[a]) {
        flow[a][moving] = start.segments()[a].coalition().mass().to_vec();
    }
    let plan = TransportPlan::new(start.clone(), blocker.clone(), flow).ok()?;
    Some(ChainStep {
        segmentation: blocker.clone(),
        moving,
        plan,
    })
}

fn strong_chain(blocked: &Segmentation, blocker: &Segmentation) -> Result<BlockingChain> {
    let m = blocked.market();
    let n = m.len();
    let values = m.values();
    let (b_star, a_gain, v) = strict_cell(blocker, blocked).expect("checked by caller");
    let gain_seg = &blocker.segments()[b_star];
    let p = gain_seg.price();
    let from_gainer = blocked.segments()[a_gain].coalition().mass_at(v);
    let in_blocker = gain_seg.coalition().mass_at(v);
    let half = rat(1, 2);
    let eps = if from_gainer < in_blocker {
        from_gainer
    } else {
        in_blocker
    } * &half;

    // Step 1: eps gaining consumers plus theta of each blocked segment's
    // lowest value, with theta small enough that the coalition's highest
    // optimal price is at least p and the gaining blocker segment keeps
    // some value-v consumers from outside the coalition.
    let lowest: Vec<usize> = blocked
        .segments()
        .iter()
        .map(|s| s.coalition().min_supported_index().expect("nonempty"))
        .collect();
    let mut theta = half.clone();
    let (pieces, coalition) = loop {
        let mut pieces: Vec<(usize, Vec<Rational>)> = Vec::new();
        let mut total = vec![Rational::zero(); n];
        for (a, seg) in blocked.segments().iter().enumerate() {
            let mut piece = unit(n, lowest[a], seg.coalition().mass_at(lowest[a]) * &theta);
            if a == a_gain {
                piece[v] += &eps;
            }
            for i in 0..n {
                total[i] += &piece[i];
            }
            pieces.push((a, piece));
        }
        let coalition = Coalition::new(m, total)?;
        let top = coalition.optimal_prices()?.pop().expect("nonempty");
        if &top >= p && coalition.mass_at(v) < in_blocker {
            break (pieces, coalition);
        }
        theta *= &half;
    };
    let p1 = coalition.optimal_prices()?.pop().expect("nonempty");
    let mut chain = BlockingChain {
        start: blocked.clone(),
        steps: Vec::new(),
    };
    let mut parts: Vec<Part> = vec![(p1, pieces.clone())];
    for i in 0..n {
        let rest: Vec<(usize, Vec<Rational>)> = blocked
            .segments()
            .iter()
            .enumerate()
            .map(|(a, seg)| (a, unit(n, i, seg.coalition().mass_at(i) - &pieces[a].1[i])))
            .filter(|(_, x)| x[i].is_positive())
            .collect();
        if !rest.is_empty() {
            parts.push((values[i].clone(), rest));
        }
    }
    push_step(&mut chain, parts, 0)?;

    // Step 2: the gaining blocker segment forms, taking every value-v member
    // of the coalition, then other coalition members as needed; the rest of
    // the coalition splits by value.
    let mut first = vec![Rational::zero(); n];
    let mut need: Vec<Rational> = gain_seg.coalition().mass().to_vec();
    first[v] = coalition.mass_at(v).clone();
    need[v] -= &first[v];
    let outside: Vec<Rational> = m
        .masses()
        .iter()
        .zip(coalition.mass())
        .map(|(f, c)| f - c)
        .collect();
    for i in (0..n).filter(|&i| i != v) {
        if need[i] > outside[i] {
            first[i] = &need[i] - &outside[i];
        }
    }
    let mut placed = vec![false; chain.terminal().len()];
    place(&mut chain, &mut placed, gain_seg, &[(0, first)], true)?;

    for (b, seg) in blocker.segments().iter().enumerate() {
        if b != b_star && seg.has_positive_surplus() {
            place(&mut chain, &mut placed, seg, &[], false)?;
        }
    }
    reorder_like(&mut chain, blocker)?;
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::mer_segmentation;
    use crate::fixtures;

    #[test]
    fn isolated_to_pooled_is_one_jump() {
        let s = fixtures::uniform_pooled_segmentation();
        let iso = Segmentation::isolated(s.market());
        let chain = build_rv_chain(&iso, &s, ChainVariant::Weak).unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain.terminal(), &s);
        assert_eq!(check_chain(&chain, ChainVariant::Weak), Ok(true));
    }

    #[test]
    fn pooled_to_equal_revenue_weak_chain() {
        let s = fixtures::uniform_pooled_segmentation();
        let (mer, _) = mer_segmentation(s.market());
        let chain = build_rv_chain(&s, &mer, ChainVariant::Weak).unwrap();
        assert_eq!(chain.terminal(), &mer);
        assert_eq!(check_chain(&chain, ChainVariant::Weak), Ok(true));
        assert_eq!(
            build_rv_chain(
                &mer,
                &Segmentation::isolated(s.market()),
                ChainVariant::Weak
            ),
            Err(Error::NotBlocking(
                "blocker gives no consumer positive surplus"
            ))
        );
    }

    #[test]
    fn strong_chains_in_both_directions() {
        let s = fixtures::uniform_pooled_segmentation();
        let (mer, _) = mer_segmentation(s.market());
        for (from, to) in [(&s, &mer), (&mer, &s)] {
            let chain = build_rv_chain(from, to, ChainVariant::Strong).unwrap();
            assert_eq!(check_chain(&chain, ChainVariant::Strong), Ok(true));
            assert_eq!(
                chain.terminal().surplus_profile().surplus_distribution(2),
                to.surplus_profile().surplus_distribution(2)
            );
        }
        assert!(matches!(
            build_rv_chain(&s, &s, ChainVariant::Strong),
            Err(Error::NotBlocking(_))
        ));
    }

    #[test]
    fn checker_rejects_broken_chains() {
        let s = fixtures::uniform_pooled_segmentation();
        let iso = Segmentation::isolated(s.market());
        // Moving from the pooled segmentation to isolation loses surplus.
        let plan = TransportPlan::proportional(&s, &iso).unwrap();
        let losing = BlockingChain {
            start: s.clone(),
            steps: vec![ChainStep {
                segmentation: iso.clone(),
                moving: 1,
                plan,
            }],
        };
        assert_eq!(check_chain(&losing, ChainVariant::Weak), Ok(false));

        // A jump whose moving segment is the value-3 segment, while the
        // untouched value-1 and value-2 segments are merged away.
        let jump = TransportPlan::new(
            iso.clone(),
            s.clone(),
            vec![
                vec![
                    iso.segments()[0].coalition().mass().to_vec(),
                    vec![Rational::zero(); 3],
                ],
                vec![
                    iso.segments()[1].coalition().mass().to_vec(),
                    vec![Rational::zero(); 3],
                ],
                vec![
                    vec![Rational::zero(); 3],
                    iso.segments()[2].coalition().mass().to_vec(),
                ],
            ],
        )
        .unwrap();
        let deleting = BlockingChain {
            start: iso.clone(),
            steps: vec![ChainStep {
                segmentation: s.clone(),
                moving: 1,
                plan: jump.clone(),
            }],
        };
        assert_eq!(check_chain(&deleting, ChainVariant::Weak), Ok(false));

        let disconnected = BlockingChain {
            start: s.clone(),
            steps: vec![ChainStep {
                segmentation: s.clone(),
                moving: 0,
                plan: jump,
            }],
        };
        assert!(matches!(
            check_chain(&disconnected, ChainVariant::Weak),
            Err(Error::MalformedChain { step: 1, .. })
        ));
        let empty = BlockingChain {
            start: s,
            steps: vec![],
        };
        assert!(matches!(
            check_chain(&empty, ChainVariant::Weak),
            Err(Error::MalformedChain { step: 0, .. })
        ));
    }
}
