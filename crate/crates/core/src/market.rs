//! Markets, coalitions and monopoly pricing.
//!
//! A [`Market`] is a finite list of consumer values with positive masses. A
//! [`Coalition`] is a sub-population described only by how much mass it holds
//! at each value; consumer identity is deliberately not represented here (see
//! [`crate::plan`] for the places where it matters).
//!
//! Prices are always drawn from the market's value list: any other price is
//! weakly dominated by the next value at or above it.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

#[derive(Debug, PartialEq, Eq)]
struct MarketData {
    values: Vec<Rational>,
    masses: Vec<Rational>,
    total: Rational,
}

/// Consumer values `v_1 < ... < v_n` with masses `f(v_i) > 0`.
///
/// Cheap to clone; coalitions keep a handle to the market they live in.
#[derive(Clone, PartialEq, Eq)]
pub struct Market {
    inner: Arc<MarketData>,
}

impl Market {
    /// Builds a market from index-aligned values and masses.
    ///
    /// Values must be positive and strictly increasing; masses must be
    /// positive. The total mass need not be one.
    pub fn new(values: Vec<Rational>, masses: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidMarket("no values"));
        }
        if values.len() != masses.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                found: masses.len(),
            });
        }
        if !values[0].is_positive() {
            return Err(Error::InvalidMarket("values must be positive"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMarket("values must be strictly increasing"));
        }
        if masses.iter().any(|m| !m.is_positive()) {
            return Err(Error::InvalidMarket("masses must be positive"));
        }
        let total = masses.iter().fold(Rational::zero(), |acc, m| acc + m);
        Ok(Market {
            inner: Arc::new(MarketData {
                values,
                masses,
                total,
            }),
        })
    }

    /// Builds a market from unsorted `(value, mass)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMarket("duplicate value"));
        }
        let (values, masses) = pairs.into_iter().unzip();
        Market::new(values, masses)
    }

    pub fn values(&self) -> &[Rational] {
        &self.inner.values
    }

    pub fn masses(&self) -> &[Rational] {
        &self.inner.masses
    }

    /// Number of distinct values.
    pub fn len(&self) -> usize {
        self.inner.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.values.is_empty()
    }

    pub fn total_mass(&self) -> &Rational {
        &self.inner.total
    }

    /// The lowest value `v_1`.
    pub fn lowest_value(&self) -> &Rational {
        &self.inner.values[0]
    }

    pub fn value_index(&self, value: &Rational) -> Option<usize> {
        self.inner.values.binary_search(value).ok()
    }

    /// The coalition of all consumers.
    pub fn full_coalition(&self) -> Coalition {
        Coalition {
            market: self.clone(),
            mass: self.inner.masses.clone(),
        }
    }

    pub fn empty_coalition(&self) -> Coalition {
        Coalition {
            market: self.clone(),
            mass: alloc::vec![Rational::zero(); self.len()],
        }
    }

    /// Whether `v_1` is an optimal price for the whole market.
    pub fn is_efficient(&self) -> bool {
        let full = self.full_coalition();
        full.optimal_price_indices()
            .map(|idx| idx.first() == Some(&0))
            .unwrap_or(false)
    }
}

impl fmt::Debug for Market {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.values()
                    .iter()
                    .zip(self.masses())
                    .map(|(v, m)| (alloc::format!("{v}"), alloc::format!("{m}"))),
            )
            .finish()
    }
}

/// Per-value mass vector `f^C` over a market.
#[derive(Clone, PartialEq, Eq)]
pub struct Coalition {
    market: Market,
    mass: Vec<Rational>,
}

impl Coalition {
    pub fn new(market: &Market, mass: Vec<Rational>) -> Result<Self> {
        if mass.len() != market.len() {
            return Err(Error::LengthMismatch {
                expected: market.len(),
                found: mass.len(),
            });
        }
        if let Some(index) = mass.iter().position(|m| m.is_negative()) {
            return Err(Error::NegativeMass { index });
        }
        Ok(Coalition {
            market: market.clone(),
            mass,
        })
    }

    /// Builds a coalition from `(value, mass)` entries; unlisted values get zero.
    pub fn from_entries(
        market: &Market,
        entries: impl IntoIterator<Item = (Rational, Rational)>,
    ) -> Result<Self> {
        let mut mass = alloc::vec![Rational::zero(); market.len()];
        for (value, m) in entries {
            let i = market
                .value_index(&value)
                .ok_or(Error::UnknownValue { value })?;
            mass[i] += m;
        }
        Coalition::new(market, mass)
    }

    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn mass(&self) -> &[Rational] {
        &self.mass
    }

    pub fn mass_at(&self, index: usize) -> &Rational {
        &self.mass[index]
    }

    pub fn total_mass(&self) -> Rational {
        self.mass.iter().fold(Rational::zero(), |acc, m| acc + m)
    }

    pub fn is_empty(&self) -> bool {
        self.mass.iter().all(Zero::is_zero)
    }

    /// Indices of values held with positive mass, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_positive())
            .map(|(i, _)| i)
    }

    /// Whether every entry is at most the market's mass at that value.
    pub fn fits_market(&self) -> bool {
        self.mass
            .iter()
            .zip(self.market.masses())
            .all(|(m, cap)| m <= cap)
    }

    /// Mass at values `>= price`.
    pub fn mass_at_or_above(&self, price: &Rational) -> Rational {
        self.market
            .values()
            .iter()
            .zip(&self.mass)
            .filter(|(v, _)| *v >= price)
            .fold(Rational::zero(), |acc, (_, m)| acc + m)
    }

    /// Seller revenue `p * sum_{v_i >= p} f^C(v_i)`.
    pub fn revenue(&self, price: &Rational) -> Rational {
        price * self.mass_at_or_above(price)
    }

    /// Revenue at every market value, index-aligned with `market.values()`.
    pub fn revenues(&self) -> Vec<Rational> {
        let values = self.market.values();
        let mut out = alloc::vec![Rational::zero(); values.len()];
        let mut upper = Rational::zero();
        for i in (0..values.len()).rev() {
            upper += &self.mass[i];
            out[i] = &values[i] * &upper;
        }
        out
    }

    /// Indices of the revenue-maximizing values, ascending.
    pub fn optimal_price_indices(&self) -> Result<Vec<usize>> {
        if self.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        let revenues = self.revenues();
        let best = revenues.iter().max().expect("market is nonempty");
        Ok(revenues
            .iter()
            .enumerate()
            .filter(|(_, r)| *r == best)
            .map(|(i, _)| i)
            .collect())
    }

    /// The revenue-maximizing prices, ascending.
    pub fn optimal_prices(&self) -> Result<Vec<Rational>> {
        let values = self.market.values();
        Ok(self
            .optimal_price_indices()?
            .into_iter()
            .map(|i| values[i].clone())
            .collect())
    }

    pub fn is_optimal_price(&self, price: &Rational) -> Result<bool> {
        let Some(i) = self.market.value_index(price) else {
            if self.is_empty() {
                return Err(Error::EmptyCoalition);
            }
            return Ok(false);
        };
        Ok(self.optimal_price_indices()?.contains(&i))
    }

    /// Index of the lowest value held with positive mass.
    pub fn min_supported_index(&self) -> Result<usize> {
        self.support().next().ok_or(Error::EmptyCoalition)
    }

    /// The lowest value held with positive mass.
    pub fn min_supported_value(&self) -> Result<Rational> {
        Ok(self.market.values()[self.min_supported_index()?].clone())
    }

    fn check_same_market(&self, other: &Coalition) -> Result<()> {
        if self.market == other.market {
            Ok(())
        } else {
            Err(Error::MarketMismatch)
        }
    }

    pub fn add(&self, other: &Coalition) -> Result<Coalition> {
        self.check_same_market(other)?;
        Ok(Coalition {
            market: self.market.clone(),
            mass: self
                .mass
                .iter()
                .zip(&other.mass)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `self - other`; fails if any entry would go negative.
    pub fn subtract(&self, other: &Coalition) -> Result<Coalition> {
        self.check_same_market(other)?;
        if let Some(index) = self.mass.iter().zip(&other.mass).position(|(a, b)| b > a) {
            return Err(Error::NegativeMass { index });
        }
        Ok(Coalition {
            market: self.market.clone(),
            mass: self
                .mass
                .iter()
                .zip(&other.mass)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, alpha: &Rational) -> Result<Coalition> {
        if alpha.is_negative() {
            return Err(Error::NegativeScale);
        }
        Ok(Coalition {
            market: self.market.clone(),
            mass: self.mass.iter().map(|m| m * alpha).collect(),
        })
    }

    /// The coalition holding only value index `index`, with mass `mass`.
    pub fn single(market: &Market, index: usize, mass: Rational) -> Result<Coalition> {
        if index >= market.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: market.len(),
            });
        }
        let mut v = alloc::vec![Rational::zero(); market.len()];
        v[index] = mass;
        Coalition::new(market, v)
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for i in self.support() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}:{}", self.market.values()[i], self.mass[i])?;
        }
        f.write_str("}")
    }
}
