use num_bigint::BigInt;
use proptest::prelude::*;

use gordon_core::lattice_paths::{forward_construct, is_s_admissible, reverse_deconstruct, ConstructionData, LatticePath, Step};
use gordon_core::partitions::{count_naive, in_family, Family, GordonParams, Partition};
use gordon_core::qseries::{int, ratio, Series};

fn series(denom: u32, len: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(-20i64..=20, len).prop_map(move |c| Series::from_i64s(denom, &c))
}

fn params() -> impl Strategy<Value = GordonParams> {
    (1u32..=5).prop_flat_map(|k| (Just(k), 1..=k)).prop_map(|(k, a)| GordonParams::new(k, a).unwrap())
}

proptest! {
    #[test]
    fn inverse_is_two_sided(mut c in prop::collection::vec(-9i64..=9, 1..25), neg in any::<bool>()) {
        c[0] = if neg { -1 } else { 1 };
        let s = Series::from_i64s(2, &c);
        let one = Series::one(2, c.len());
        prop_assert_eq!(&s * &s.inverse().unwrap(), one);
    }

    #[test]
    fn mixed_grids_agree(x in series(2, 20), y in series(3, 30)) {
        // sums and products land on the lcm grid at the smaller order
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!((&x + &y).order(), int(10));
        prop_assert_eq!((&x * &y).denom(), 6);
    }

    #[test]
    fn rescale_is_multiplicative(x in series(1, 15), y in series(1, 15)) {
        let f = ratio(3, 2);
        prop_assert_eq!((&x * &y).rescale(f).unwrap(), &x.rescale(f).unwrap() * &y.rescale(f).unwrap());
    }

    #[test]
    fn shift_then_coeff(x in series(1, 12), e in 0i64..6) {
        let s = x.shift(int(e)).unwrap();
        for (i, c) in x.coeffs().iter().enumerate() {
            prop_assert_eq!(s.coeff(int(i as i64 + e)).unwrap(), c.clone());
        }
        prop_assert_eq!(s.order(), x.order() + int(e));
    }

    #[test]
    fn wire_round_trip(x in series(2, 16)) {
        let j = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<Series>(&j).unwrap(), x);
    }

    #[test]
    fn pruned_count_matches_naive(gp in params(), n in 0u32..14) {
        for fam in [Family::A, Family::B, Family::W, Family::Wbar] {
            let fast = gordon_core::partitions::count(fam, gp, n);
            prop_assert_eq!(fast, count_naive(fam, gp, n));
        }
    }

    #[test]
    fn family_inclusions(parts in prop::collection::vec(1u32..9, 0..8), gp in params()) {
        let p = Partition::from_parts(&parts);
        if in_family(&p, Family::W, gp) || in_family(&p, Family::Wbar, gp) {
            prop_assert!(in_family(&p, Family::B, gp));
        }
        prop_assert_eq!(p.weight(), parts.iter().map(|&x| x as u64).sum::<u64>());
    }

    #[test]
    fn compact_form_round_trips(raw in prop::collection::vec(0u8..3, 0..30), start in 0u32..4) {
        // build a valid path greedily from the random choices
        let mut h = start;
        let mut steps = Vec::new();
        for r in raw {
            let s = match r {
                0 => Step::NorthEast,
                1 if h > 0 => Step::SouthEast,
                2 if h == 0 => Step::East,
                _ => Step::NorthEast,
            };
            h = match s { Step::NorthEast => h + 1, Step::SouthEast => h - 1, Step::East => h };
            steps.push(s);
        }
        while h > 0 {
            steps.push(Step::SouthEast);
            h -= 1;
        }
        if steps.last() == Some(&Step::East) {
            steps.extend([Step::NorthEast, Step::SouthEast]);
        }
        let p = LatticePath::new(start, steps).unwrap();
        prop_assert_eq!(p.to_compact().parse::<LatticePath>().unwrap(), p.clone());
        let mi: u64 = p.peaks().iter().map(|pk| pk.weight as u64).sum();
        prop_assert_eq!(p.major_index(), mi);
    }

    #[test]
    fn plain_data_round_trips(n in prop::collection::vec(0u32..4, 4)) {
        let gp = GordonParams::new(5, 2).unwrap();
        let cd = ConstructionData::plain(gp, n);
        let p = forward_construct(&cd).unwrap();
        prop_assert!(is_s_admissible(&p, gp));
        prop_assert_eq!(p.major_index(), cd.weight());
        prop_assert_eq!(reverse_deconstruct(&p, gp).unwrap(), cd);
    }
}

#[test]
fn big_coefficients_stay_exact() {
    // 1/(1-q)^40 has coefficients binomial(n+39, 39), past u64 at n = 60
    let mut c = vec![0i64; 61];
    c[..2].copy_from_slice(&[1, -1]);
    let one_minus_q = Series::from_i64s(1, &c);
    let mut s = Series::one(1, 61);
    let inv = one_minus_q.inverse().unwrap();
    for _ in 0..40 {
        s = &s * &inv;
    }
    let mut want = BigInt::from(1);
    for i in 1..=60u32 {
        want = want * BigInt::from(i + 39) / BigInt::from(i);
    }
    assert_eq!(s.coeffs()[60], want);
}
