use std::collections::BTreeMap;

use treegrow::oracle::{exact_sg_law, exact_st_law};
use treegrow::rational::{int, ratio};
use treegrow::sampling::Seed;
use treegrow::sgtrees::{grow_chain, growth_kernel, sg_distribution, WeightSequence};
use treegrow::subtree_model::{coupling_law, SubtreeGrowth, Theta};
use treegrow::treespace::{PlaneTree, VertexSet};
use treegrow::Q;

/// Pushes the root through `steps` kernel rows and returns the law reached.
fn pushed_forward(w: &WeightSequence, d: u32, steps: usize) -> BTreeMap<PlaneTree, Q> {
    let size = 1 + steps * d as usize;
    let kernel = growth_kernel(w, d, size).unwrap();
    let mut law = BTreeMap::from([(PlaneTree::root_only(), int(1))]);
    for _ in 0..steps {
        let mut next: BTreeMap<PlaneTree, Q> = BTreeMap::new();
        for (t, p) in &law {
            for (t2, q) in kernel.row(t).unwrap() {
                *next.entry(t2).or_insert_with(|| int(0)) += p * q;
            }
        }
        law = next;
    }
    law
}

#[test]
fn growth_from_the_root_reaches_the_exact_law() {
    let cases = [
        (WeightSequence::new(vec![int(1), int(1), ratio(1, 2), ratio(1, 6), ratio(1, 24), ratio(1, 120)]).unwrap(), 1, 5),
        (WeightSequence::new(vec![int(1), int(3), int(3), int(1)]).unwrap(), 1, 6),
        (WeightSequence::new(vec![int(1), int(0), int(4), int(0), int(2)]).unwrap(), 2, 3),
    ];
    for (w, d, steps) in cases {
        let n = 1 + steps * d as usize;
        let exact = exact_sg_law(w.values(), d, n).unwrap();
        let reached = pushed_forward(&w, d, steps);
        assert_eq!(&reached, exact.masses(), "d = {d}, n = {n}");
        assert_eq!(reached, sg_distribution(&w, d, n).unwrap());
    }
}

#[test]
fn sampled_chains_are_nested_and_reproducible() {
    let w = WeightSequence::from_fn(|_| int(1), 30).unwrap();
    let seed = Seed::master(11);
    let a = grow_chain(&w, 1, 30, &mut seed.derive("tree").rng()).unwrap();
    let b = grow_chain(&w, 1, 30, &mut seed.derive("tree").rng()).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.tree, y.tree);
    }
    for pair in a.windows(2) {
        assert!(pair[0].tree.vertices().is_subset(pair[1].tree.vertices()));
        assert_eq!(pair[1].tree.len(), pair[0].tree.len() + 1);
    }
    assert_eq!(a.last().unwrap().tree.len(), 30);
}

#[test]
fn subtree_coupling_has_the_exact_marginals() {
    for theta in [vec![int(1), int(1)], vec![ratio(1, 2), ratio(1, 3), ratio(1, 4)]] {
        let th = Theta::new(theta.clone()).unwrap();
        for n in 1..=5 {
            let law = coupling_law(&th, n).unwrap();
            assert_eq!(&law, exact_st_law(&theta, n).unwrap().masses(), "n = {n}");
        }
    }
}

#[test]
fn subtree_chain_is_nested() {
    let th = Theta::new(vec![int(2), int(1), int(1)]).unwrap();
    let growth = SubtreeGrowth::new(&th, 25).unwrap();
    let steps: Vec<_> = growth.chain(&Seed::master(5), 25).unwrap().map(Result::unwrap).collect();
    assert_eq!(steps.len(), 24);
    for pair in steps.windows(2) {
        let added: Vec<_> = pair[1].subtree.vertices().difference(pair[0].subtree.vertices()).collect();
        assert_eq!(added, vec![&pair[1].new_vertex]);
    }
}
