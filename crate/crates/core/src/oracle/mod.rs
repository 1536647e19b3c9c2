//! Brute-force ground truth on finitely many equal-mass consumers ("atoms").
//!
//! Every definition is applied literally: atoms carry identity, a positive
//! measure means at least one atom, and stability quantifies over every
//! segmentation of the atoms.

mod checks;

pub use checks::{
    exists_coupling, fragment_objects, fragmentation_proof_by_definition, targeted_checks,
    two_value_triple, verify_market, witness_lowering_check, TripleReport, VerifyReport,
};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::market::{Coalition, Market};
use crate::plan::TransportPlan;
use crate::rational::gcd;
use crate::segmentation::{consumer_surplus, Segment, Segmentation};
use crate::Rational;

/// Enumeration refuses markets with more atoms than this unless told otherwise.
pub const DEFAULT_ATOM_CAP: usize = 8;

/// Largest grid a plan may be lowered onto. Lowered grids are only scanned
/// linearly, never enumerated.
pub const LOWERING_ATOM_LIMIT: usize = 1_000_000;

/// A market split into atoms of equal mass `unit`, sorted by value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomizedMarket {
    market: Market,
    unit: Rational,
    atoms: Vec<usize>,
    /// `rank[i][j]`: position of `CS(v_i, v_j)` among all distinct surpluses.
    rank: Vec<Vec<u32>>,
}

impl AtomizedMarket {
    /// Fails with `NotAtomizable` unless every mass is a multiple of `unit`.
    pub fn new(market: &Market, unit: Rational) -> Result<Self> {
        if unit <= Rational::zero() {
            return Err(Error::NotAtomizable);
        }
        let mut atoms = Vec::new();
        for (i, m) in market.masses().iter().enumerate() {
            let count = m / &unit;
            if !count.is_integer() {
                return Err(Error::NotAtomizable);
            }
            let count = count.to_integer().to_usize().ok_or(Error::NotAtomizable)?;
            atoms.extend(core::iter::repeat_n(i, count));
        }
        let values = market.values();
        let mut levels: Vec<Rational> = values
            .iter()
            .flat_map(|v| values.iter().map(move |p| consumer_surplus(v, p)))
            .collect();
        levels.sort();
        levels.dedup();
        let rank = values
            .iter()
            .map(|v| {
                values
                    .iter()
                    .map(|p| {
                        levels
                            .binary_search(&consumer_surplus(v, p))
                            .expect("listed") as u32
                    })
                    .collect()
            })
            .collect();
        Ok(AtomizedMarket {
            market: market.clone(),
            unit,
            atoms,
            rank,
        })
    }

    /// The coarsest grid: the unit is the rational gcd of all masses.
    pub fn finest(market: &Market) -> Self {
        let unit = market
            .masses()
            .iter()
            .fold(Rational::zero(), |g, m| gcd(&g, m));
        AtomizedMarket::new(market, unit).expect("gcd divides every mass")
    }

    /// `counts[i]` atoms of mass `unit` at `values[i]`.
    pub fn from_counts(values: Vec<Rational>, counts: &[usize], unit: Rational) -> Result<Self> {
        let masses = counts
            .iter()
            .map(|&c| Rational::from_integer(BigInt::from(c)) * &unit)
            .collect();
        AtomizedMarket::new(&Market::new(values, masses)?, unit)
    }

    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn unit(&self) -> &Rational {
        &self.unit
    }

    /// Value index of each atom.
    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Comparable surplus level of a value-`i` atom facing price index `j`.
    pub fn surplus_rank(&self, i: usize, j: usize) -> u32 {
        self.rank[i][j]
    }

    /// Per-value atom counts of a set of atoms.
    fn counts(&self, members: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut c = vec![0; self.market.len()];
        for k in members {
            c[self.atoms[k]] += 1;
        }
        c
    }

    /// Optimal price indices for a multiset of atoms given by counts.
    pub fn optimal_prices_of_counts(&self, counts: &[usize]) -> Vec<usize> {
        let values = self.market.values();
        let mut above = 0usize;
        let mut revenues = vec![Rational::zero(); counts.len()];
        for q in (0..counts.len()).rev() {
            above += counts[q];
            revenues[q] = &values[q] * Rational::from_integer(BigInt::from(above));
        }
        if above == 0 {
            return Vec::new();
        }
        let best = revenues.iter().max().expect("nonempty").clone();
        (0..counts.len()).filter(|&q| revenues[q] == best).collect()
    }

    pub fn optimal_prices_of(&self, members: &[usize]) -> Vec<usize> {
        self.optimal_prices_of_counts(&self.counts(members.iter().copied()))
    }

    /// The continuum segmentation with each block's atoms as mass.
    pub fn lift(&self, s: &AtomSegmentation) -> Segmentation {
        let n = self.market.len();
        let segments = s
            .blocks()
            .into_iter()
            .zip(&s.prices)
            .map(|(members, &p)| {
                let mass = self
                    .counts(members)
                    .into_iter()
                    .map(|c| Rational::from_integer(BigInt::from(c)) * &self.unit)
                    .collect::<Vec<_>>();
                debug_assert_eq!(mass.len(), n);
                Segment::new(
                    Coalition::new(&self.market, mass).expect("non-negative"),
                    self.market.values()[p].clone(),
                )
                .expect("block prices are optimal")
            })
            .collect();
        Segmentation::new(&self.market, segments).expect("blocks partition the atoms")
    }

    /// Per-atom surplus levels under `s`.
    pub fn surpluses(&self, s: &AtomSegmentation) -> Vec<u32> {
        self.atoms
            .iter()
            .zip(&s.assignment)
            .map(|(&i, &b)| self.rank[i][s.prices[b]])
            .collect()
    }
}

/// Block id for every atom and a price (value index) for every block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomSegmentation {
    assignment: Vec<usize>,
    prices: Vec<usize>,
}

impl AtomSegmentation {
    /// Block ids must be `0..prices.len()`, each used, each price optimal.
    pub fn new(am: &AtomizedMarket, assignment: Vec<usize>, prices: Vec<usize>) -> Result<Self> {
        if assignment.len() != am.len() {
            return Err(Error::LengthMismatch {
                expected: am.len(),
                found: assignment.len(),
            });
        }
        let s = AtomSegmentation { assignment, prices };
        if s.assignment.iter().any(|&b| b >= s.prices.len()) {
            return Err(Error::InvalidSegment);
        }
        for (members, &p) in s.blocks().iter().zip(&s.prices) {
            if !am.optimal_prices_of(members).contains(&p) {
                return Err(Error::InvalidSegment);
            }
        }
        Ok(s)
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Price (value index) of each block.
    pub fn prices(&self) -> &[usize] {
        &self.prices
    }

    pub fn price(&self, am: &AtomizedMarket, block: usize) -> Rational {
        am.market().values()[self.prices[block]].clone()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.prices.len()];
        for (k, &b) in self.assignment.iter().enumerate() {
            blocks[b].push(k);
        }
        blocks
    }
}

/// All segmentations of the atoms: every set partition, crossed with every
/// choice of optimal price per block. Partitions come in restricted-growth
/// order; price choices vary fastest in the last block.
pub fn enumerate_segmentations(am: &AtomizedMarket, cap: usize) -> Result<Vec<AtomSegmentation>> {
    if am.len() > cap {
        return Err(Error::CapExceeded {
            atoms: am.len(),
            cap,
        });
    }
    let mut out = Vec::new();
    if am.is_empty() {
        return Ok(out);
    }
    let mut cache: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut rgs = vec![0usize; am.len()];
    loop {
        let blocks = 1 + *rgs.iter().max().expect("nonempty");
        let mut counts = vec![vec![0usize; am.market().len()]; blocks];
        for (k, &b) in rgs.iter().enumerate() {
            counts[b][am.atoms()[k]] += 1;
        }
        let options: Vec<Vec<usize>> = counts
            .into_iter()
            .map(|c| {
                cache
                    .entry(c)
                    .or_insert_with_key(|c| am.optimal_prices_of_counts(c))
                    .clone()
            })
            .collect();
        let mut choice = vec![0usize; blocks];
        loop {
            out.push(AtomSegmentation {
                assignment: rgs.clone(),
                prices: choice.iter().zip(&options).map(|(&c, o)| o[c]).collect(),
            });
            let Some(pos) = (0..blocks)
                .rev()
                .find(|&b| choice[b] + 1 < options[b].len())
            else {
                break;
            };
            choice[pos] += 1;
            choice[pos + 1..].iter_mut().for_each(|c| *c = 0);
        }
        if !next_rgs(&mut rgs) {
            break;
        }
    }
    Ok(out)
}

/// Advances a restricted growth string; false after the last one.
fn next_rgs(rgs: &mut [usize]) -> bool {
    for k in (1..rgs.len()).rev() {
        let bound = rgs[..k].iter().max().copied().unwrap_or(0) + 1;
        if rgs[k] < bound {
            rgs[k] += 1;
            rgs[k + 1..].iter_mut().for_each(|x| *x = 0);
            return true;
        }
    }
    false
}

/// Atoms `members` priced at value index `price` object to `s`: each weakly
/// gains, one strictly.
pub fn atom_objection(
    am: &AtomizedMarket,
    members: &[usize],
    price: usize,
    s: &AtomSegmentation,
) -> Result<bool> {
    if members.is_empty() || !am.optimal_prices_of(members).contains(&price) {
        return Err(Error::InvalidSegment);
    }
    Ok(objects(am, members, price, &am.surpluses(s)))
}

fn objects(am: &AtomizedMarket, members: &[usize], price: usize, current: &[u32]) -> bool {
    let mut strict = false;
    for &k in members {
        let own = am.rank[am.atoms[k]][price];
        if own < current[k] {
            return false;
        }
        strict |= own > current[k];
    }
    strict
}

/// Some block of `s_prime` objects to `s`.
pub fn atom_blocks(am: &AtomizedMarket, s_prime: &AtomSegmentation, s: &AtomSegmentation) -> bool {
    let current = am.surpluses(s);
    s_prime
        .blocks()
        .iter()
        .zip(&s_prime.prices)
        .any(|(members, &p)| objects(am, members, p, &current))
}

/// Some block of `s_prime` has an atom strictly gaining and an atom, valued
/// at one of the block's optimal prices, weakly gaining.
pub fn atom_weakly_blocks(
    am: &AtomizedMarket,
    s_prime: &AtomSegmentation,
    s: &AtomSegmentation,
) -> bool {
    let current = am.surpluses(s);
    s_prime
        .blocks()
        .iter()
        .zip(&s_prime.prices)
        .any(|(members, &p)| {
            let optimal = am.optimal_prices_of(members);
            let own = |k: usize| am.rank[am.atoms[k]][p];
            members.iter().any(|&k| own(k) > current[k])
                && members
                    .iter()
                    .any(|&k| own(k) >= current[k] && optimal.contains(&am.atoms[k]))
        })
}

/// Every atom weakly better off under `s_prime`, one strictly.
pub fn atom_pareto_dominates(
    am: &AtomizedMarket,
    s_prime: &AtomSegmentation,
    s: &AtomSegmentation,
) -> bool {
    dominates_levels(&am.surpluses(s_prime), &am.surpluses(s))
}

/// `s` blocks every enumerated segmentation that changes some atom's surplus.
pub fn atom_stable(am: &AtomizedMarket, s: &AtomSegmentation, cap: usize) -> Result<bool> {
    let all = enumerate_segmentations(am, cap)?;
    Ok(atom_stable_among(am, s, &all))
}

pub(crate) fn atom_stable_among(
    am: &AtomizedMarket,
    s: &AtomSegmentation,
    all: &[AtomSegmentation],
) -> bool {
    let levels: Vec<Vec<u32>> = all.iter().map(|t| am.surpluses(t)).collect();
    stable_among_levels(am, &priced_blocks(s), &am.surpluses(s), &levels)
}

/// Blocks of `s` paired with their prices.
pub(crate) fn priced_blocks(s: &AtomSegmentation) -> Vec<(Vec<usize>, usize)> {
    s.blocks()
        .into_iter()
        .zip(s.prices.iter().copied())
        .collect()
}

/// Some priced block objects to the surplus levels `current`.
pub(crate) fn blocks_levels(
    am: &AtomizedMarket,
    blocks: &[(Vec<usize>, usize)],
    current: &[u32],
) -> bool {
    blocks
        .iter()
        .any(|(members, p)| objects(am, members, *p, current))
}

pub(crate) fn stable_among_levels(
    am: &AtomizedMarket,
    blocks: &[(Vec<usize>, usize)],
    own: &[u32],
    levels: &[Vec<u32>],
) -> bool {
    levels
        .iter()
        .all(|theirs| theirs.as_slice() == own || blocks_levels(am, blocks, theirs))
}

/// Every level in `x` at least the matching level in `y`, and `x != y`.
pub(crate) fn dominates_levels(x: &[u32], y: &[u32]) -> bool {
    x.iter().zip(y).all(|(a, b)| a >= b) && x != y
}

/// Exact grid for a plan: atoms of mass `gcd` of all cells, each atom
/// remembering its source and target segment.
pub fn lower_plan(
    plan: &TransportPlan,
) -> Result<(AtomizedMarket, AtomSegmentation, AtomSegmentation)> {
    let market = plan.source().market();
    let unit = plan
        .cells()
        .fold(Rational::zero(), |g, (_, _, _, x)| gcd(&g, x));
    let atoms = (market.total_mass() / &unit).to_integer();
    if atoms > BigInt::from(LOWERING_ATOM_LIMIT) {
        return Err(Error::CapExceeded {
            atoms: atoms.to_usize().unwrap_or(usize::MAX),
            cap: LOWERING_ATOM_LIMIT,
        });
    }
    let am = AtomizedMarket::new(market, unit.clone())?;
    let mut source = Vec::with_capacity(am.len());
    let mut target = Vec::with_capacity(am.len());
    for i in 0..market.len() {
        for a in 0..plan.source().len() {
            for b in 0..plan.target().len() {
                let count = (plan.flow(a, b, i) / &unit).to_integer();
                let count = count.to_usize().ok_or(Error::NotAtomizable)?;
                source.extend(core::iter::repeat_n(a, count));
                target.extend(core::iter::repeat_n(b, count));
            }
        }
    }
    let prices = |s: &Segmentation| s.segments().iter().map(|x| x.price_index()).collect();
    let s = AtomSegmentation::new(&am, source, prices(plan.source()))?;
    let t = AtomSegmentation::new(&am, target, prices(plan.target()))?;
    Ok((am, s, t))
}

/// A segmentation on the coarsest grid that represents it exactly.
pub fn lower(s: &Segmentation) -> Result<(AtomizedMarket, AtomSegmentation)> {
    let (am, low, _) = lower_plan(&TransportPlan::identity(s))?;
    Ok((am, low))
}
