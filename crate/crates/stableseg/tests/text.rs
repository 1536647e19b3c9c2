use proptest::prelude::*;
use stableseg::text::{parse_market, parse_segmentation, write_market, write_segmentation};
use stableseg_core::constructions::{greedy_stable_segmentation, mer_segmentation};
use stableseg_core::rational::rat;
use stableseg_core::{fixtures, Market, Rational, Segmentation};

fn market(text: &str) -> Market {
    parse_market(text).unwrap().unwrap().market
}

#[test]
fn market_values_are_sorted_and_comments_skipped() {
    let m = market("# header\n\n3 1/3  # top\n1 2/6\n   2 1/3\n");
    assert_eq!(m, fixtures::uniform_market());
}

#[test]
fn fractions_are_reduced_and_signs_accepted() {
    let m = market("+2 4/8\n1 -3/-6\n");
    assert_eq!(m.masses(), [rat(1, 2), rat(1, 2)]);
}

#[test]
fn parse_errors_locate_the_token() {
    let e = parse_market("1 1/2\n2  x\n").err().unwrap();
    assert_eq!((e.line, e.column), (2, 4));
    let e = parse_market("1 1/2 7\n").err().unwrap();
    assert_eq!((e.line, e.column), (1, 7));
    let e = parse_market("1\n").err().unwrap();
    assert_eq!((e.line, e.column), (1, 1));
    let e = parse_market("1 1/0\n").err().unwrap();
    assert!(e.message.contains("zero denominator"));
    let e = parse_market("0.5 1\n").err().unwrap();
    assert_eq!(e.column, 1);
}

#[test]
fn invalid_markets_are_validation_failures() {
    assert!(parse_market("").unwrap().is_err());
    assert!(parse_market("1 -1\n").unwrap().is_err());
    assert!(parse_market("-1 1\n").unwrap().is_err());
    assert!(parse_market("2 0\n").unwrap().is_err());
}

#[test]
fn segmentation_parse_errors() {
    let m = fixtures::uniform_market();
    let e = parse_segmentation("1 1/3\n", &m).err().unwrap();
    assert_eq!(e.line, 1);
    let e = parse_segmentation("segment 1\n1 1/3\n1 1/3\n", &m)
        .err()
        .unwrap();
    assert_eq!(e.line, 3);
    let e = parse_segmentation("segment\n", &m).err().unwrap();
    assert_eq!(e.line, 1);
    assert!(parse_segmentation("segment 1\n4 1/3\n", &m)
        .unwrap()
        .is_err());
    assert!(parse_segmentation("segment 1\n1 1/3\n2 1/3\n3 1/3\n", &m)
        .unwrap()
        .is_err());
    assert!(
        parse_segmentation("segment 3\n1 1/3\n2 1/3\nsegment 3\n3 1/3\n", &m)
            .unwrap()
            .is_err()
    );
    assert!(parse_segmentation("", &m).unwrap().is_err());
}

#[test]
fn fixtures_round_trip() {
    let s = fixtures::four_value_split_segmentation();
    let m = market(&write_market(s.market()));
    assert_eq!(&m, s.market());
    assert_eq!(
        parse_segmentation(&write_segmentation(&s), &m)
            .unwrap()
            .unwrap(),
        s
    );
}

fn arb_market() -> impl Strategy<Value = Market> {
    proptest::collection::btree_map(
        (1i64..=500, 1i64..=40).prop_map(|(a, b)| rat(a, b)),
        (1i64..=40, 1i64..=40),
        1..=6,
    )
    .prop_map(|pairs| {
        Market::from_pairs(pairs.into_iter().map(|(v, (a, b))| (v, rat(a, b)))).unwrap()
    })
}

fn round_trip(s: &Segmentation) -> Segmentation {
    let m = market(&write_market(s.market()));
    parse_segmentation(&write_segmentation(s), &m)
        .unwrap()
        .unwrap()
}

proptest! {
    #[test]
    fn constructed_segmentations_round_trip(m in arb_market()) {
        let (mer, _) = mer_segmentation(&m);
        prop_assert_eq!(&round_trip(&mer), &mer);
        let greedy = greedy_stable_segmentation(&m);
        prop_assert_eq!(&round_trip(&greedy), &greedy);
    }

    #[test]
    fn rationals_round_trip(a in -1000i64..1000, b in 1i64..1000) {
        let x = rat(a, b);
        prop_assert_eq!(stableseg::text::parse_rational(&x.to_string(), 1, 1).unwrap(), x.clone());
        let _: &Rational = &x;
    }
}
