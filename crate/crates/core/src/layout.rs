//! Segmentations drawn on a line.
//!
//! Consumers are laid out on `[0, total)` with each value occupying one
//! consecutive block, lowest value first. A segment is then a finite union of
//! intervals, which pins down consumer identity: two such segmentations
//! induce a transport plan by measuring interval overlaps.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::market::{Coalition, Market};
use crate::plan::TransportPlan;
use crate::segmentation::Segmentation;
use crate::Rational;

/// Half-open interval `[start, end)`.
pub type Interval = (Rational, Rational);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSegmentation {
    market: Market,
    parts: Vec<(Vec<Interval>, Rational)>,
}

fn overlap(a: &Interval, b: &Interval) -> Rational {
    let lo = if a.0 > b.0 { &a.0 } else { &b.0 };
    let hi = if a.1 < b.1 { &a.1 } else { &b.1 };
    if hi > lo {
        hi - lo
    } else {
        Rational::zero()
    }
}

impl IntervalSegmentation {
    /// Intervals must be nonempty, lie inside `[0, total)`, and together
    /// cover it without overlap.
    pub fn new(market: &Market, parts: Vec<(Vec<Interval>, Rational)>) -> Result<Self> {
        let total = market.total_mass();
        let all: Vec<&Interval> = parts.iter().flat_map(|(iv, _)| iv).collect();
        if all
            .iter()
            .any(|(a, b)| a >= b || a < &Rational::zero() || b > total)
        {
            return Err(Error::InvalidSegment);
        }
        let covered = all
            .iter()
            .fold(Rational::zero(), |acc, iv| acc + (&iv.1 - &iv.0));
        let overlapping = all
            .iter()
            .enumerate()
            .any(|(k, x)| all[k + 1..].iter().any(|y| !overlap(x, y).is_zero()));
        if overlapping || &covered != total {
            return Err(Error::InvalidSegment);
        }
        Ok(IntervalSegmentation {
            market: market.clone(),
            parts,
        })
    }

    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn parts(&self) -> &[(Vec<Interval>, Rational)] {
        &self.parts
    }

    fn value_blocks(&self) -> Vec<Interval> {
        let mut start = Rational::zero();
        self.market
            .masses()
            .iter()
            .map(|m| {
                let end = &start + m;
                let block = (start.clone(), end.clone());
                start = end;
                block
            })
            .collect()
    }

    fn coalition_of(&self, intervals: &[Interval], blocks: &[Interval]) -> Coalition {
        let mass = blocks
            .iter()
            .map(|block| {
                intervals
                    .iter()
                    .fold(Rational::zero(), |acc, iv| acc + overlap(iv, block))
            })
            .collect();
        Coalition::new(&self.market, mass).expect("overlaps are non-negative")
    }

    pub fn to_segmentation(&self) -> Result<Segmentation> {
        let blocks = self.value_blocks();
        Segmentation::from_parts(
            &self.market,
            self.parts
                .iter()
                .map(|(iv, p)| (self.coalition_of(iv, &blocks), p.clone())),
        )
    }

    /// The plan that keeps every point of the line in place.
    pub fn plan_to(&self, other: &IntervalSegmentation) -> Result<TransportPlan> {
        if self.market != other.market {
            return Err(Error::MarketMismatch);
        }
        let blocks = self.value_blocks();
        let flow = self
            .parts
            .iter()
            .map(|(ia, _)| {
                other
                    .parts
                    .iter()
                    .map(|(ib, _)| {
                        blocks
                            .iter()
                            .map(|block| {
                                let mut m = Rational::zero();
                                for x in ia {
                                    for y in ib {
                                        let lo = overlap(x, y);
                                        if lo.is_zero() {
                                            continue;
                                        }
                                        let both = (
                                            if x.0 > y.0 { x.0.clone() } else { y.0.clone() },
                                            if x.1 < y.1 { x.1.clone() } else { y.1.clone() },
                                        );
                                        m += overlap(&both, block);
                                    }
                                }
                                m
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        TransportPlan::new(self.to_segmentation()?, other.to_segmentation()?, flow)
    }
}
