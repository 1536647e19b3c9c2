//! Segments, segmentations, canonical forms and surplus accounting.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::market::{Coalition, Market};
use crate::Rational;

/// Surplus `max(value - price, 0)` of a unit-demand consumer.
pub fn consumer_surplus(value: &Rational, price: &Rational) -> Rational {
    if value > price {
        value - price
    } else {
        Rational::zero()
    }
}

/// A nonempty coalition together with a price that is optimal for it.
#[derive(Clone, PartialEq, Eq)]
pub struct Segment {
    coalition: Coalition,
    price: Rational,
    price_index: usize,
}

impl Segment {
    pub fn new(coalition: Coalition, price: Rational) -> Result<Self> {
        let optimal = coalition.optimal_price_indices()?;
        match coalition.market().value_index(&price) {
            Some(i) if optimal.contains(&i) => Ok(Segment {
                coalition,
                price,
                price_index: i,
            }),
            _ => Err(Error::PriceNotOptimal { price }),
        }
    }

    pub fn coalition(&self) -> &Coalition {
        &self.coalition
    }

    pub fn price(&self) -> &Rational {
        &self.price
    }

    /// Index of the price in the market's value list.
    pub fn price_index(&self) -> usize {
        self.price_index
    }

    /// Total consumer surplus (not averaged) generated inside this segment.
    pub fn consumer_surplus(&self) -> Rational {
        let values = self.coalition.market().values();
        self.coalition
            .support()
            .map(|i| self.coalition.mass_at(i) * consumer_surplus(&values[i], &self.price))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn revenue(&self) -> Rational {
        self.coalition.revenue(&self.price)
    }

    /// Whether any consumer in the segment has positive surplus.
    pub fn has_positive_surplus(&self) -> bool {
        let values = self.coalition.market().values();
        self.coalition.support().any(|i| values[i] > self.price)
    }
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} @ {})", self.coalition, self.price)
    }
}

/// Per value, the prices faced by consumers of that value and their masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurplusProfile {
    values: Vec<Rational>,
    faced: Vec<Vec<(Rational, Rational)>>,
}

impl SurplusProfile {
    /// `(price, mass)` pairs for value index `index`, ascending by price.
    pub fn prices_faced(&self, index: usize) -> &[(Rational, Rational)] {
        &self.faced[index]
    }

    /// `(surplus, mass)` pairs for value index `index`, ascending by surplus.
    pub fn surplus_distribution(&self, index: usize) -> Vec<(Rational, Rational)> {
        let mut by_surplus: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (price, mass) in &self.faced[index] {
            *by_surplus
                .entry(consumer_surplus(&self.values[index], price))
                .or_insert_with(Rational::zero) += mass;
        }
        by_surplus.into_iter().collect()
    }

    pub fn len(&self) -> usize {
        self.faced.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faced.is_empty()
    }
}

/// A partition of the market into segments.
#[derive(Clone, PartialEq, Eq)]
pub struct Segmentation {
    market: Market,
    segments: Vec<Segment>,
}

impl Segmentation {
    /// Validates the partition condition exactly.
    pub fn new(market: &Market, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptySegmentation);
        }
        if segments.iter().any(|s| s.coalition.market() != market) {
            return Err(Error::MarketMismatch);
        }
        for (i, target) in market.masses().iter().enumerate() {
            let sum = segments
                .iter()
                .fold(Rational::zero(), |acc, s| acc + s.coalition.mass_at(i));
            if &sum != target {
                return Err(Error::PartitionViolated { index: i });
            }
        }
        Ok(Segmentation {
            market: market.clone(),
            segments,
        })
    }

    /// Convenience constructor validating every `(coalition, price)` pair.
    pub fn from_parts(
        market: &Market,
        parts: impl IntoIterator<Item = (Coalition, Rational)>,
    ) -> Result<Self> {
        let segments = parts
            .into_iter()
            .map(|(c, p)| Segment::new(c, p))
            .collect::<Result<Vec<_>>>()?;
        Segmentation::new(market, segments)
    }

    /// The single-segment segmentation `{(market, price)}`.
    pub fn trivial(market: &Market, price: Rational) -> Result<Self> {
        Segmentation::from_parts(market, [(market.full_coalition(), price)])
    }

    /// Every value in its own segment, priced at that value.
    pub fn isolated(market: &Market) -> Self {
        let segments = market
            .masses()
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let c = Coalition::single(market, i, m.clone()).expect("index in range");
                Segment::new(c, market.values()[i].clone()).expect("single value is optimal")
            })
            .collect();
        Segmentation {
            market: market.clone(),
            segments,
        }
    }

    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn into_segments(self) -> Vec<Segment> {
        self.segments
    }

    /// Merges segments sharing a price; output is sorted by ascending price.
    pub fn canonicalize(&self) -> Segmentation {
        let mut merged: BTreeMap<Rational, Coalition> = BTreeMap::new();
        for s in &self.segments {
            match merged.get_mut(&s.price) {
                Some(c) => *c = c.add(&s.coalition).expect("same market"),
                None => {
                    merged.insert(s.price.clone(), s.coalition.clone());
                }
            }
        }
        let segments = merged
            .into_iter()
            .map(|(price, coalition)| {
                // A price optimal for each part is optimal for the union.
                Segment::new(coalition, price).expect("merged price stays optimal")
            })
            .collect();
        Segmentation {
            market: self.market.clone(),
            segments,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.segments.windows(2).all(|w| w[0].price < w[1].price)
    }

    /// Total consumer surplus (not averaged).
    pub fn total_consumer_surplus(&self) -> Rational {
        self.segments
            .iter()
            .fold(Rational::zero(), |acc, s| acc + s.consumer_surplus())
    }

    /// Consumer surplus averaged over the market's total mass.
    pub fn average_consumer_surplus(&self) -> Rational {
        self.total_consumer_surplus() / self.market.total_mass()
    }

    /// Total seller revenue across segments.
    pub fn seller_revenue(&self) -> Rational {
        self.segments
            .iter()
            .fold(Rational::zero(), |acc, s| acc + s.revenue())
    }

    pub fn average_seller_revenue(&self) -> Rational {
        self.seller_revenue() / self.market.total_mass()
    }

    /// Value created by trade: the summed values of all consumers who buy.
    pub fn total_trade_surplus(&self) -> Rational {
        let values = self.market.values();
        let mut total = Rational::zero();
        for s in &self.segments {
            for i in s.coalition.support() {
                if values[i] >= s.price {
                    total += &values[i] * s.coalition.mass_at(i);
                }
            }
        }
        total
    }

    pub fn surplus_profile(&self) -> SurplusProfile {
        let n = self.market.len();
        let mut faced: Vec<BTreeMap<Rational, Rational>> =
            (0..n).map(|_| BTreeMap::new()).collect();
        for s in &self.segments {
            for i in s.coalition.support() {
                *faced[i]
                    .entry(s.price.clone())
                    .or_insert_with(Rational::zero) += s.coalition.mass_at(i);
            }
        }
        SurplusProfile {
            values: self.market.values().to_vec(),
            faced: faced.into_iter().map(|m| m.into_iter().collect()).collect(),
        }
    }

    /// Same canonical (price -> mass vector) map.
    pub fn weak_surplus_equivalent(&self, other: &Segmentation) -> bool {
        if self.market != other.market {
            return false;
        }
        let a = self.canonicalize();
        let b = other.canonicalize();
        a.segments.len() == b.segments.len()
            && a.segments
                .iter()
                .zip(&b.segments)
                .all(|(x, y)| x.price == y.price && x.coalition.mass() == y.coalition.mass())
    }

    /// Whether every segment is priced at its lowest supported value.
    pub fn all_buy(&self) -> bool {
        self.segments.iter().all(|s| {
            s.coalition
                .min_supported_index()
                .map(|i| i == s.price_index)
                .unwrap_or(false)
        })
    }

    /// Index of the segment whose price equals `price`, if unique.
    pub fn segment_with_price(&self, price: &Rational) -> Option<usize> {
        let mut it = self
            .segments
            .iter()
            .enumerate()
            .filter(|(_, s)| &s.price == price);
        match (it.next(), it.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Debug for Segmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.segments).finish()
    }
}
