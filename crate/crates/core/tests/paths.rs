use std::collections::HashSet;

use gordon_core::identities::eval_multisum_main;
use gordon_core::lattice_paths::{
    all_construction_data, count_s_table, enumerate_s, forward_construct, is_s_admissible, reverse_deconstruct, EStepRule,
};
use gordon_core::partitions::GordonParams;

const PAIRS: [(u32, u32); 5] = [(2, 1), (3, 2), (4, 1), (4, 3), (5, 2)];

fn multisum_counts(gp: GordonParams, n_max: u32) -> Vec<u64> {
    let s = eval_multisum_main(gp, n_max + 1).unwrap();
    s.to_i64_vec().unwrap().into_iter().map(|c| c as u64).collect()
}

#[test]
fn forward_images_are_distinct_admissible_and_weighted() {
    for (k, a) in PAIRS {
        let gp = GordonParams::new(k, a).unwrap();
        let n_max = 14;
        let mut seen = HashSet::new();
        let mut hist = vec![0u64; n_max + 1];
        for cd in all_construction_data(gp, n_max as u64) {
            let p = forward_construct(&cd).unwrap();
            assert_eq!(p.major_index(), cd.weight());
            assert!(is_s_admissible(&p, gp), "{} from {:?}", p, cd);
            assert!(seen.insert(p));
            hist[cd.weight() as usize] += 1;
        }
        assert_eq!(hist, multisum_counts(gp, n_max as u32), "{}", gp);
    }
}

#[test]
fn reverse_inverts_forward() {
    for (k, a) in PAIRS {
        let gp = GordonParams::new(k, a).unwrap();
        for p in enumerate_s(gp, 14, EStepRule::default()) {
            let cd = reverse_deconstruct(&p, gp).unwrap();
            assert_eq!(forward_construct(&cd).unwrap(), p);
        }
    }
}

#[test]
fn only_the_default_rule_matches() {
    // The two alternative readings of the E-step condition both miss somewhere on this grid.
    for rule in [EStepRule::BetweenPairs, EStepRule::Ignore] {
        let differs = PAIRS.iter().any(|&(k, a)| {
            let gp = GordonParams::new(k, a).unwrap();
            count_s_table(gp, 16, rule) != multisum_counts(gp, 16)
        });
        assert!(differs, "{:?}", rule);
    }
}

#[test]
fn non_images_are_rejected() {
    // a path starting at the wrong height is not in S for (3,2)
    let gp = GordonParams::new(3, 2).unwrap();
    let other = GordonParams::new(3, 1).unwrap();
    let p = enumerate_s(other, 6, EStepRule::default()).into_iter().find(|p| p.major_index() > 0).unwrap();
    assert!(reverse_deconstruct(&p, gp).is_err());
}
