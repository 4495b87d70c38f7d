use std::collections::BTreeMap;

use num_traits::One;

use super::*;
use crate::compositions::{comp_distribution, ArithClass, Composition, WeightPair};
use crate::rational::{int, ratio, Q};
use crate::sampling::{ExactCategorical, Seed};
use crate::treespace::{is_right_leaning_leaf_addition, PlaneTree, VertexSet};

fn ints(xs: &[i64]) -> Vec<Q> {
    xs.iter().map(|&x| int(x)).collect()
}

#[test]
fn plane_tree_counts() {
    let catalan = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
    for n in 1..=9 {
        let trees = enumerate_plane_trees(n, 1).unwrap();
        assert_eq!(trees.len(), catalan[n - 1]);
        assert!(trees.windows(2).all(|p| p[0] < p[1]));
        assert!(trees.iter().all(|t| t.len() == n));
    }
    assert!(enumerate_plane_trees(PLANE_TREE_CAP + 1, 1).is_err());
}

#[test]
fn arithmetic_tree_counts() {
    // Out-degrees in {0, 2, 4, …}: C(3k, k) / (2k + 1) trees with 2k + 1 vertices.
    let counts: Vec<usize> = [1, 3, 5, 7, 9].iter().map(|&n| enumerate_plane_trees(n, 2).unwrap().len()).collect();
    assert_eq!(counts, [1, 1, 3, 12, 55]);
    assert!(enumerate_plane_trees(4, 2).unwrap().is_empty());
    for t in enumerate_plane_trees(7, 3).unwrap() {
        assert!(t.out_degrees().values().all(|k| k % 3 == 0));
    }
}

#[test]
fn subtree_counts() {
    let counts: Vec<usize> = (1..=6).map(|n| enumerate_subtrees(n, 2).unwrap().len()).collect();
    assert_eq!(counts, [1, 2, 5, 14, 42, 132]);
    // Ternary: C(3n, n) / (2n + 1).
    let counts: Vec<usize> = (1..=5).map(|n| enumerate_subtrees(n, 3).unwrap().len()).collect();
    assert_eq!(counts, [1, 3, 12, 55, 273]);
    assert!(enumerate_subtrees(SUBTREE_CAP + 1, 2).is_err());
}

#[test]
fn exact_law_examples() {
    let law = exact_law(&ModelSpec::Sg { w: ints(&[1, 1, 1]), d: 1, n: 3 }).unwrap();
    assert_eq!(law.len(), 2);
    assert!(law.masses().values().all(|p| *p == ratio(1, 2)));
    let law = exact_law(&ModelSpec::St { theta: ints(&[1, 1]), n: 3 }).unwrap();
    assert_eq!(law.len(), 5);
    assert!(law.masses().values().all(|p| *p == ratio(1, 5)));
    let law = exact_subset_law(&ints(&[2, 1]), 1).unwrap();
    let masses: Vec<Q> = law.masses().values().cloned().collect();
    assert_eq!(masses, [ratio(2, 3), ratio(1, 3)]);
    assert!(matches!(
        exact_law(&ModelSpec::Sg { w: ints(&[1, 0, 1]), d: 2, n: 2 }),
        Err(crate::Error::ZeroMass(_))
    ));
}

#[test]
fn composition_law_matches_tables() {
    let a = ints(&[1, 2, 3, 1]);
    let b = ints(&[1, 1, 2, 5, 14, 42, 132]);
    let wp = WeightPair::plain(a.clone(), b.clone()).unwrap();
    for n in 1..=7 {
        let brute = exact_comp_law(&a, &b, ArithClass::plain(), n).unwrap();
        assert_eq!(brute.masses(), &comp_distribution(&wp, n).unwrap());
    }
}

#[test]
fn janson_values() {
    let (e3, e4) = janson_expectations(&ratio(1, 5)).unwrap();
    assert_eq!((e3.clone(), e4.clone()), (ratio(9, 5), ratio(21, 13)));
    assert!(e3 > e4);
    let (e3, e4) = janson_expectations(&ratio(1, 3)).unwrap();
    assert!(e3 <= e4);
    let (e3, e4) = janson_expectations(&ratio(1, 2)).unwrap();
    assert!(e3 <= e4);
    for k in 1..30 {
        let eps = ratio(k, 30);
        let (e3, e4) = janson_expectations(&eps).unwrap();
        assert_eq!(e3 > e4, eps < ratio(1, 3), "eps = {k}/30");
    }
}

#[test]
fn interchange_negative_control() {
    let sg = |n| exact_sg_law(&ints(&[1; 6]), 1, n).unwrap().into_masses();
    let (law3, law4) = (sg(3), sg(4));
    // Uniform over right-leaning leaf additions is not the coupling.
    let naive = |t: &PlaneTree| -> crate::Result<BTreeMap<PlaneTree, Q>> {
        let next: Vec<PlaneTree> = law4.keys().filter(|t2| is_right_leaning_leaf_addition(t, t2)).cloned().collect();
        let p = Q::one() / int(next.len() as i64);
        Ok(next.into_iter().map(|t2| (t2, p.clone())).collect())
    };
    let report = kernel_interchange_check(&law3, naive, &law4).unwrap();
    assert!(!report.passed());
    let d = report.discrepancy.unwrap();
    assert!(law4.keys().any(|t| t.to_string() == d.state));
    assert_ne!(d.pushed, d.expected);
}

#[test]
fn gof_examples() {
    let uniform = ExactLaw::from_weights((0..5).map(|i| (i, Q::one())), "uniform").unwrap();
    let report = goodness_of_fit(&BTreeMap::from([(0, 100u64)]), &uniform);
    assert_eq!(report.tv, ratio(4, 5));
    let report = goodness_of_fit(&BTreeMap::from([(7, 100u64)]), &uniform);
    assert_eq!(report.tv, Q::one());
    assert_eq!(report.p_value, Some(0.0));
    let report = goodness_of_fit(&BTreeMap::from([(0, 3u64)]), &uniform);
    assert!(report.undersampled && report.p_value.is_none());
}

#[test]
fn gof_calibration_battery() {
    let law = exact_sg_law(&ints(&[1; 5]), 1, 5).unwrap();
    assert_eq!(law.len(), 14);
    let sampler = ExactCategorical::new(law.masses().iter().map(|(t, p)| (t.clone(), p.clone()))).unwrap();
    let master = Seed::master(2024);
    let mut passes = 0;
    for s in 0..100 {
        let mut rng = master.derive_index("calibration", s).rng();
        let counts = count((0..100_000).map(|_| sampler.sample_index(&mut rng)));
        let counts: BTreeMap<PlaneTree, u64> =
            counts.into_iter().map(|(i, c)| (sampler.outcomes()[i].clone(), c)).collect();
        let report = goodness_of_fit(&counts, &law);
        if report.p_value.unwrap() > 0.001 {
            passes += 1;
        }
    }
    assert!(passes >= 99, "{passes}");
}

#[test]
fn composition_outcomes_display() {
    let c: Composition = "2 1".parse().unwrap();
    assert_eq!(Outcome::Composition(c).to_string(), "2 1");
    assert_eq!(Outcome::Subset([1, 3].into()).to_string(), "{1,3}");
}
