//! Efficiency, saturation and stability, plus witnesses that exhibit why an
//! unstable segmentation fails.
//!
//! A segmentation is stable exactly when its canonical form is efficient
//! (every segment is priced at its lowest value) and saturated (for every
//! pair of prices `p < p'`, the price-`p` coalition has an optimal price in
//! `(p, lowest value of the price-p' coalition]`).

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::market::Coalition;
use crate::plan::TransportPlan;
use crate::rational::int;
use crate::segmentation::{Segment, Segmentation};
use crate::Rational;

/// Every segment is priced at its lowest supported value, so everyone buys.
pub fn is_efficient(s: &Segmentation) -> bool {
    s.all_buy()
}

/// Pairwise saturation test over all segments with `p < p'`.
pub fn is_saturated(s: &Segmentation) -> bool {
    unsaturated_pair(s).is_none()
}

/// First pair `(a, b)` with `price(a) < price(b)` and no optimal price of
/// `a` in `(price(a), lowest value of b]`, scanning by ascending `price(a)`
/// then ascending `price(b)`, ties by index.
pub fn unsaturated_pair(s: &Segmentation) -> Option<(usize, usize)> {
    let segments = s.segments();
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&x, &y| segments[x].price().cmp(segments[y].price()).then(x.cmp(&y)));
    for &a in &order {
        let low = &segments[a];
        let optimal = low
            .coalition()
            .optimal_prices()
            .expect("segments are nonempty");
        for &b in &order {
            let high = &segments[b];
            if low.price() >= high.price() {
                continue;
            }
            let ceiling = high
                .coalition()
                .min_supported_value()
                .expect("segments are nonempty");
            if !optimal.iter().any(|q| q > low.price() && q <= &ceiling) {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn is_stable(s: &Segmentation) -> bool {
    diagnose(s).stable()
}

/// Stability is decided on the canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diagnosis {
    Stable,
    /// Some canonical segment is priced above its lowest value.
    Inefficient,
    /// Efficient, but some lower-priced canonical segment could absorb
    /// consumers from a higher-priced one without changing its price.
    Unsaturated,
}

impl Diagnosis {
    pub fn stable(self) -> bool {
        self == Diagnosis::Stable
    }
}

pub fn diagnose(s: &Segmentation) -> Diagnosis {
    let k = s.canonicalize();
    if !is_efficient(&k) {
        Diagnosis::Inefficient
    } else if !is_saturated(&k) {
        Diagnosis::Unsaturated
    } else {
        Diagnosis::Stable
    }
}

/// No coalition inside a single segment can object; equivalent to efficiency.
pub fn is_fragmentation_proof(s: &Segmentation) -> bool {
    is_efficient(s)
}

/// A witness segmentation together with the plan from the original to it.
pub type Witness = (Segmentation, TransportPlan);

/// For an inefficient segmentation, splits off a lower-priced sub-segment
/// from the first segment priced above its lowest value, such that every
/// consumer is weakly better off and the split-off high-value consumers
/// strictly so.
///
/// The split-off coalition holds every member valued below the segment's
/// price plus `eps` of its highest-value members, where `eps` is half of the
/// largest amount that still pulls the optimal price below the segment's
/// price (capped by the available mass).
pub fn inefficiency_witness(s: &Segmentation) -> Option<Witness> {
    let segments = s.segments();
    let anchor = (0..segments.len())
        .filter(|&a| {
            let seg = &segments[a];
            seg.coalition().min_supported_index().expect("nonempty") != seg.price_index()
        })
        .min_by(|&x, &y| segments[x].price().cmp(segments[y].price()).then(x.cmp(&y)))?;
    let market = s.market();
    let values = market.values();
    let seg = &segments[anchor];
    let c = seg.coalition();
    let p = seg.price_index();
    let top = c.support().last().expect("nonempty");

    let low = Coalition::new(
        market,
        c.mass()
            .iter()
            .enumerate()
            .map(|(i, m)| if i < p { m.clone() } else { Rational::zero() })
            .collect(),
    )
    .expect("sub-vector of a coalition");
    let low_revenues = low.revenues();
    let threshold = (0..p)
        .map(|q| &low_revenues[q] / (&values[top] - &values[q]))
        .max()
        .expect("some value lies below the price");
    let cap = c.mass_at(top);
    let eps = if &threshold < cap {
        threshold
    } else {
        cap.clone()
    } / int(2);

    let split = low
        .add(&Coalition::single(market, top, eps).expect("index in range"))
        .expect("same market");
    let rest = c.subtract(&split).expect("split is part of the coalition");
    let split_price = split.optimal_prices().expect("nonempty")[0].clone();
    debug_assert!(&split_price < seg.price());

    let mut new_segments: Vec<Segment> = segments.to_vec();
    new_segments[anchor] =
        Segment::new(rest.clone(), seg.price().clone()).expect("price stays optimal");
    new_segments.push(Segment::new(split.clone(), split_price).expect("lowest optimal price"));
    let target = Segmentation::new(market, new_segments).expect("still a partition");

    let mut plan = TransportPlan::identity(s).flows().to_vec();
    for row in plan.iter_mut() {
        row.push(vec![Rational::zero(); market.len()]);
    }
    plan[anchor][anchor] = rest.mass().to_vec();
    plan[anchor][segments.len()] = split.mass().to_vec();
    let plan = TransportPlan::new(s.clone(), target.clone(), plan).expect("marginals match");
    Some((target, plan))
}

/// For an efficient segmentation whose canonical form is not saturated,
/// moves some consumers valued `w` from the price-`w` segment into a
/// lower-priced segment `p` whose price stays optimal. The movers gain, so
/// the original segmentation cannot block the result.
///
/// The moved mass is half of the exact threshold keeping `p` optimal
/// (capped by the available value-`w` mass); it is drawn proportionally
/// from every original segment priced `w`.
pub fn nonsaturation_witness(s: &Segmentation) -> Result<Witness> {
    let k = s.canonicalize();
    if !is_efficient(&k) {
        return Err(Error::NotApplicable("segmentation is not efficient"));
    }
    let (a, b) = unsaturated_pair(&k).ok_or(Error::NotApplicable("segmentation is saturated"))?;
    let market = s.market();
    let values = market.values();
    let low = &k.segments()[a];
    let high = &k.segments()[b];
    let (p, w) = (low.price_index(), high.price_index());

    let revenues = low.coalition().revenues();
    let threshold = (p + 1..=w)
        .map(|q| (&revenues[p] - &revenues[q]) / (&values[q] - &values[p]))
        .min()
        .expect("w lies above p");
    debug_assert!(threshold.is_positive());
    let available = high.coalition().mass_at(w);
    let delta = if &threshold < available {
        threshold
    } else {
        available.clone()
    } / int(2);
    let moved = Coalition::single(market, w, delta.clone()).expect("index in range");

    let grown = low.coalition().add(&moved).expect("same market");
    let shrunk = high
        .coalition()
        .subtract(&moved)
        .expect("moved mass is available");
    let shrunk_price = shrunk.optimal_prices().expect("nonempty")[0].clone();
    let mut target_segments: Vec<Segment> = k.segments().to_vec();
    target_segments[a] = Segment::new(grown, low.price().clone()).expect("price kept optimal");
    target_segments[b] = Segment::new(shrunk, shrunk_price).expect("optimal price");
    let target = Segmentation::new(market, target_segments).expect("still a partition");

    let n = market.len();
    let share = &delta / available;
    let flow = s
        .segments()
        .iter()
        .map(|seg| {
            let dest = k
                .segment_with_price(seg.price())
                .expect("canonical prices are distinct");
            let mut row = vec![vec![Rational::zero(); n]; k.len()];
            row[dest] = seg.coalition().mass().to_vec();
            if dest == b {
                let m = seg.coalition().mass_at(w) * &share;
                row[b][w] -= &m;
                row[a][w] += m;
            }
            row
        })
        .collect();
    let plan = TransportPlan::new(s.clone(), target.clone(), flow).expect("marginals match");
    Ok((target, plan))
}
