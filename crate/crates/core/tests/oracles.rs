mod common;

use common::*;
use rand::Rng;
use sigmalab::lab::{boylan_distance, boylan_inf};
use sigmalab::{best_approx, cond_exp, indicator, indicator_seminorm_ratio, lp_dist, seminorm, Norm, Rat};

const CASES: u64 = 200;

#[test]
fn meet_matches_enumeration() {
    let mut r = rng(11);
    for case in 0..CASES {
        let level = r.gen_range(2..=4);
        let p = random_labels(&mut r, level, 8);
        let q = random_labels(&mut r, level, 8);
        let got = partition_of(&p, level).meet(&partition_of(&q, level));
        let mut cells: Vec<Vec<bool>> = got.atoms().iter().map(|a| cells_of(a, level)).collect();
        cells.sort();
        assert_eq!(cells, meet_atoms(&p, &q), "case {case}");
    }
}

#[test]
fn boylan_inf_matches_enumeration() {
    let mut r = rng(12);
    for case in 0..CASES {
        let level = r.gen_range(2..=5);
        let a = random_cells(&mut r, level);
        let q = random_labels(&mut r, level, 10);
        let got = boylan_inf(&set_of(&a, level), &partition_of(&q, level));
        assert_eq!(got, min_symdiff(&a, &q, level), "case {case}");
    }
}

#[test]
fn boylan_distance_matches_enumeration() {
    let mut r = rng(13);
    for case in 0..CASES {
        let level = r.gen_range(2..=4);
        let p = random_labels(&mut r, level, 6);
        let q = random_labels(&mut r, level, 6);
        let got = boylan_distance(&partition_of(&p, level), &partition_of(&q, level)).unwrap();
        assert_eq!(got, common::boylan_distance(&p, &q, level), "case {case}");
    }
}

#[test]
fn best_approx_attains_the_minimum() {
    let mut r = rng(14);
    for case in 0..CASES {
        let level = r.gen_range(2..=5);
        let a = random_cells(&mut r, level);
        let p = random_labels(&mut r, level, 10);
        let part = partition_of(&p, level);
        let set = set_of(&a, level);
        let b = best_approx(&set, &part);
        assert!(part.contains(&b), "case {case}");
        assert_eq!(set.sym_diff(&b).measure(), min_symdiff(&a, &p, level), "case {case}");
    }
}

#[test]
fn seminorm_matches_union_sup() {
    let mut r = rng(15);
    for case in 0..CASES {
        let level = r.gen_range(2..=5);
        let a = random_cells(&mut r, level);
        let b = random_labels(&mut r, level, 8);
        let (set, part) = (set_of(&a, level), partition_of(&b, level));
        let brute = seminorm_sup(&a, &b, level);
        assert_eq!(indicator_seminorm_ratio(&set, &part), brute, "case {case}");
        assert_eq!(seminorm(&indicator(&set), &part), brute, "case {case}");
    }
}

#[test]
fn cond_exp_and_l1_match_cells() {
    let mut r = rng(16);
    for case in 0..CASES {
        let level = r.gen_range(1..=5);
        let f = random_values(&mut r, 1 << level);
        let labels = random_labels(&mut r, level, 1usize << level);
        let g = cond_exp(&step_of(&f, level), &partition_of(&labels, level));
        let expected = common::cond_exp(&f, &labels);
        assert_eq!(values_of(&g, level), expected, "case {case}");
        assert_eq!(lp_dist(&g, &step_of(&f, level), Norm::L1), l1(&expected, &f, level));
    }
}

#[test]
fn cells_round_trip() {
    let mut r = rng(17);
    for _ in 0..50 {
        let labels = random_labels(&mut r, 4, 5);
        let p = partition_of(&labels, 4);
        let back = partition_of(&labels_of(&p, 4), 4);
        assert_eq!(p, back);
    }
    assert_eq!(measure(&[true, false, true, true], 2), Rat::frac(3, 4));
}
