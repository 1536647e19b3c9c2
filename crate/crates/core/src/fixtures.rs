//! Small hand-checked markets and segmentations used by tests, examples and
//! the command-line tool.

use alloc::vec;

use crate::layout::IntervalSegmentation;
use crate::market::{Coalition, Market};
use crate::rational::{int, rat};
use crate::segmentation::Segmentation;
use crate::Rational;

fn market(values: &[i64], masses: &[Rational]) -> Market {
    Market::new(values.iter().map(|&v| int(v)).collect(), masses.to_vec())
        .expect("fixture market is valid")
}

fn coalition(m: &Market, mass: &[Rational]) -> Coalition {
    Coalition::new(m, mass.to_vec()).expect("fixture coalition is valid")
}

/// Values 1..4 with masses 1/2, 1/4, 1/8, 1/8.
pub fn four_value_market() -> Market {
    market(&[1, 2, 3, 4], &[rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 8)])
}

/// Two price-1 segments, each with a second optimal price, and a value-4
/// segment. Efficient and saturated as listed, but not once merged.
pub fn four_value_split_layout() -> IntervalSegmentation {
    let m = four_value_market();
    IntervalSegmentation::new(
        &m,
        vec![
            (vec![(rat(1, 4), rat(3, 4))], int(1)),
            (vec![(int(0), rat(1, 4)), (rat(3, 4), rat(7, 8))], int(1)),
            (vec![(rat(7, 8), int(1))], int(4)),
        ],
    )
    .expect("valid layout")
}

pub fn four_value_split_segmentation() -> Segmentation {
    four_value_split_layout()
        .to_segmentation()
        .expect("valid segmentation")
}

/// Moves half of the value-4 consumers into the price-1 segment; every
/// consumer is weakly better off.
pub fn four_value_dominating_layout() -> IntervalSegmentation {
    let m = four_value_market();
    IntervalSegmentation::new(
        &m,
        vec![
            (vec![(int(0), rat(15, 16))], int(1)),
            (vec![(rat(15, 16), int(1))], int(4)),
        ],
    )
    .expect("valid layout")
}

/// Values 1, 2, 3 with masses 1/3, 1/6, 1/2.
pub fn skewed_market() -> Market {
    market(&[1, 2, 3], &[rat(1, 3), rat(1, 6), rat(1, 2)])
}

/// Efficient segmentation of [`skewed_market`] maximizing consumer surplus
/// that is not saturated.
pub fn skewed_unsaturated_segmentation() -> Segmentation {
    let m = skewed_market();
    Segmentation::from_parts(
        &m,
        [
            (coalition(&m, &[rat(1, 3), int(0), rat(1, 6)]), int(1)),
            (coalition(&m, &[int(0), rat(1, 6), rat(1, 3)]), int(2)),
        ],
    )
    .expect("valid segmentation")
}

/// Values 1, 2, 3 with mass 1/3 each.
pub fn uniform_market() -> Market {
    market(&[1, 2, 3], &[rat(1, 3), rat(1, 3), rat(1, 3)])
}

/// Values 1 and 2 pooled at price 1, value 3 alone: stable with surplus 1/3.
pub fn uniform_pooled_segmentation() -> Segmentation {
    let m = uniform_market();
    Segmentation::from_parts(
        &m,
        [
            (coalition(&m, &[rat(1, 3), rat(1, 3), int(0)]), int(1)),
            (coalition(&m, &[int(0), int(0), rat(1, 3)]), int(3)),
        ],
    )
    .expect("valid segmentation")
}

/// Values 1, 2, 3 with masses 6/21, 4/21, 11/21.
pub fn twenty_one_market() -> Market {
    market(&[1, 2, 3], &[rat(6, 21), rat(4, 21), rat(11, 21)])
}

/// Three layouts on [`twenty_one_market`]:
///
/// * an unsaturated segmentation with segments priced 1 and 2;
/// * a segmentation it weakly blocks without blocking, where one value-2
///   consumer slice joins the price-1 segment and the rest face price 3;
/// * a three-segment segmentation that blocks the second.
pub fn twenty_one_layouts() -> (
    IntervalSegmentation,
    IntervalSegmentation,
    IntervalSegmentation,
) {
    let m = twenty_one_market();
    let r = |n| rat(n, 21);
    let s = IntervalSegmentation::new(
        &m,
        vec![
            (vec![(r(0), r(6)), (r(18), r(21))], int(1)),
            (vec![(r(6), r(18))], int(2)),
        ],
    )
    .expect("valid layout");
    let s_prime = IntervalSegmentation::new(
        &m,
        vec![
            (vec![(r(0), r(7)), (r(18), r(21))], int(1)),
            (vec![(r(7), r(18))], int(3)),
        ],
    )
    .expect("valid layout");
    let s_split = IntervalSegmentation::new(
        &m,
        vec![
            (vec![(r(0), r(6)), (r(18), r(21))], int(1)),
            (vec![(r(6), r(7)), (r(16), r(18))], int(2)),
            (vec![(r(7), r(16))], int(2)),
        ],
    )
    .expect("valid layout");
    (s, s_prime, s_split)
}
