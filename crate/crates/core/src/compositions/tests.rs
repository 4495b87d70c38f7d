use std::collections::BTreeMap;

use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::rational::{int, ratio, Q};

fn ones(k: usize) -> Vec<Q> {
    vec![Q::one(); k]
}

fn comp(s: &str) -> Composition {
    s.parse().unwrap()
}

/// `b^w` from `b_{n+1} = Z^{w,b}_n`, using only the composition tables.
fn tree_b(w: &[Q], cls: ArithClass, h: usize) -> Vec<Q> {
    let mut b = vec![w[0].clone()];
    for n in 1..h {
        let wp = WeightPair::new(w.to_vec(), b.clone(), cls).unwrap();
        b.push(partition_function(&wp, n).unwrap().value());
    }
    b
}

fn ones_pair(h: usize) -> WeightPair {
    let w = ones(h + 1);
    WeightPair::plain(w.clone(), tree_b(&w, ArithClass::plain(), h + 1)).unwrap()
}

fn arith_pair(w: &[i64], d: u32, h: usize) -> WeightPair {
    let w: Vec<Q> = w.iter().map(|&x| int(x)).collect();
    let cls = ArithClass::new(d, 0).unwrap();
    WeightPair::new(w.clone(), tree_b(&w, cls, h + 1), cls).unwrap()
}

#[test]
fn covering_examples() {
    let succ: Vec<String> = covering_successors(&comp("2 1"), 1).iter().map(|c| c.to_string()).collect();
    assert_eq!(succ, ["2 1 1", "2 2", "3 1"]);
    let succ: Vec<String> = covering_successors(&Composition::empty(), 1).iter().map(|c| c.to_string()).collect();
    assert_eq!(succ, ["1"]);
    let succ: Vec<String> = covering_successors(&comp("1"), 2).iter().map(|c| c.to_string()).collect();
    assert_eq!(succ, ["1 1 1", "3"]);
}

#[test]
fn arithmetic_condition() {
    assert!(satisfies_arith(&comp("1 1 1"), ArithClass::new(3, 0).unwrap()));
    assert!(satisfies_arith(&comp("4"), ArithClass::new(3, 1).unwrap()));
    assert!(!satisfies_arith(&comp("2 1"), ArithClass::new(3, 2).unwrap()));
    assert!(satisfies_arith(&comp("2 1"), ArithClass::plain()));
    assert!(ArithClass::new(2, 2).is_err());
    assert_eq!(ArithClass::new(3, 0).unwrap().shifted(1).s, 2);
}

#[test]
fn text_format() {
    assert_eq!(comp("-"), Composition::empty());
    assert_eq!(Composition::empty().to_string(), "-");
    assert_eq!(comp("3 1 2").to_string(), "3 1 2");
    assert!("1 0".parse::<Composition>().is_err());
}

#[test]
fn partition_examples() {
    let wp = WeightPair::plain(ones(5), ones(5)).unwrap();
    assert_eq!(partition_function(&wp, 0).unwrap(), PartitionValue::Positive(Q::one()));
    let catalan: Vec<Q> = [1, 1, 2, 5].iter().map(|&x| int(x)).collect();
    let wp = WeightPair::plain(ones(5), catalan).unwrap();
    assert_eq!(partition_function(&wp, 3).unwrap(), PartitionValue::Positive(int(5)));
    let odd_b = vec![int(1), int(0), int(1), int(0), int(2)];
    let wp = WeightPair::new(vec![int(0), int(1)], odd_b, ArithClass::new(2, 1).unwrap()).unwrap();
    assert_eq!(partition_function(&wp, 2).unwrap(), PartitionValue::ZeroMass);
    assert_eq!(partition_function(&wp, 3).unwrap(), PartitionValue::Positive(int(1)));
}

#[test]
fn distribution_examples() {
    let wp = WeightPair::plain(ones(5), ones(5)).unwrap();
    let law = comp_distribution(&wp, 2).unwrap();
    assert_eq!(law, BTreeMap::from([(comp("2"), ratio(1, 2)), (comp("1 1"), ratio(1, 2))]));
    assert_eq!(comp_distribution(&wp, 0).unwrap(), BTreeMap::from([(Composition::empty(), Q::one())]));
    let wp = WeightPair::plain(vec![int(1), int(1)], vec![int(3), int(1), int(4), int(1), int(5)]).unwrap();
    assert_eq!(comp_distribution(&wp, 5).unwrap(), BTreeMap::from([(comp("5"), Q::one())]));
    let wp = WeightPair::new(vec![int(0), int(1)], vec![int(1), int(0), int(1)], ArithClass::new(2, 1).unwrap()).unwrap();
    assert!(matches!(comp_distribution(&wp, 2), Err(crate::Error::ZeroMass(_))));
}

#[test]
fn first_part_examples() {
    let wp = ones_pair(6);
    let mu3 = first_part_law(&wp, 3).unwrap();
    assert_eq!(mu3.by_part(), BTreeMap::from([(1, ratio(2, 5)), (2, ratio(1, 5)), (3, ratio(2, 5))]));
    let mu4 = first_part_law(&wp, 4).unwrap();
    assert_eq!(
        mu4.by_part(),
        BTreeMap::from([(1, ratio(5, 14)), (2, ratio(1, 7)), (3, ratio(1, 7)), (4, ratio(5, 14))])
    );
    let wp = WeightPair::plain(vec![int(1), int(1)], ones(8)).unwrap();
    assert_eq!(first_part_law(&wp, 7).unwrap().by_part(), BTreeMap::from([(7, Q::one())]));
}

#[test]
fn step_kernel_examples() {
    let wp = ones_pair(6);
    let k = monotone_step_kernel(&first_part_law(&wp, 3).unwrap(), &first_part_law(&wp, 4).unwrap()).unwrap();
    assert_eq!(k.rows()[&1].1, ratio(3, 28));

    let one = |p: u32, total: usize| StepLaw::from_parts(1, total, &BTreeMap::from([(p, Q::one())])).unwrap();
    let k = monotone_step_kernel(&one(1, 1), &one(2, 2)).unwrap();
    assert_eq!(k.rows()[&1], (Q::zero(), Q::one()));
    let k = monotone_step_kernel(&one(1, 1), &one(1, 2)).unwrap();
    assert_eq!(k.rows()[&1], (Q::one(), Q::zero()));

    let split = StepLaw::from_parts(1, 2, &BTreeMap::from([(1, ratio(1, 2)), (2, ratio(1, 2))])).unwrap();
    assert!(monotone_step_kernel(&one(1, 1), &split).is_ok());
    let bad = StepLaw::from_parts(1, 3, &BTreeMap::from([(1, ratio(3, 4)), (3, ratio(1, 4))])).unwrap();
    assert!(matches!(monotone_step_kernel(&split, &bad), Err(crate::Error::NotCoupleable { .. })));
}

#[test]
fn kernel_examples() {
    let wp = ones_pair(4);
    let row = composition_kernel(&wp, ArithClass::plain(), 0, &Composition::empty()).unwrap();
    assert_eq!(row, BTreeMap::from([(comp("1"), Q::one())]));

    let row = composition_kernel(&wp, ArithClass::plain(), 1, &comp("1")).unwrap();
    let k = monotone_step_kernel(&first_part_law(&wp, 1).unwrap(), &first_part_law(&wp, 2).unwrap()).unwrap();
    let q = k.rows()[&1].1.clone();
    assert_eq!(row, BTreeMap::from([(comp("2"), q.clone()), (comp("1 1"), Q::one() - q)]));

    let wp = arith_pair(&[1, 0, 1], 2, 6);
    let row = composition_kernel(&wp, wp.class(), 2, &comp("1 1")).unwrap();
    let support: Vec<String> = row.keys().map(|c| c.to_string()).collect();
    // Four parts would need a_4 > 0.
    assert_eq!(support, ["1 3", "3 1"]);
    assert_eq!(row.values().sum::<Q>(), Q::one());
}

#[test]
fn shifts() {
    let wp = WeightPair::plain(vec![int(1), int(2), int(3)], ones(3)).unwrap();
    assert_eq!(wp.shift(1).unwrap().a(), &[int(2), int(3)]);
    assert_eq!(wp.shift(0).unwrap(), wp);
    let wp = WeightPair::plain(vec![int(1), int(1)], ones(3)).unwrap();
    assert!(wp.shift(1).is_err());
    let wp = arith_pair(&[1, 0, 1], 2, 4);
    let shifted = wp.shift(1).unwrap();
    assert_eq!(shifted.class(), ArithClass::new(2, 1).unwrap());
}

#[test]
fn degenerate_pairs_are_rejected() {
    assert!(WeightPair::plain(vec![int(1), int(0), int(1)], ones(3)).is_err());
    assert!(WeightPair::plain(vec![int(0), int(1)], ones(3)).is_err());
    assert!(WeightPair::plain(vec![int(1)], ones(3)).is_err());
    assert!(WeightPair::plain(ones(3), vec![int(1), int(0)]).is_err());
    assert!(WeightPair::new(vec![int(1), int(1)], ones(3), ArithClass::new(2, 0).unwrap()).is_err());
}

#[test]
fn admissibility_examples() {
    let report = check_admissibility_inequalities(&ones_pair(14), ArithClass::plain(), 10).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!(report.checked > 0);

    let w = vec![ratio(2, 5), ratio(1, 5), ratio(2, 5)];
    let wp = WeightPair::plain(w.clone(), tree_b(&w, ArithClass::plain(), 14)).unwrap();
    let report = check_admissibility_inequalities(&wp, ArithClass::plain(), 10).unwrap();
    assert!(!report.passed());
    assert!(report.failures.iter().any(|f| f.n == 0 && f.at == "l=1"));

    let wp = WeightPair::plain(vec![int(1), int(1)], vec![int(3), int(1), int(4), int(1), int(5)]).unwrap();
    let report = check_admissibility_inequalities(&wp, ArithClass::plain(), 2).unwrap();
    assert!(report.passed() && report.checked == 0);

    let wp = arith_pair(&[1, 0, 1], 2, 24);
    assert!(check_admissibility_inequalities(&wp, wp.class(), 10).unwrap().passed());
    let wp = arith_pair(&[2, 0, 0, 1], 3, 40);
    assert!(check_admissibility_inequalities(&wp, wp.class(), 10).unwrap().passed());
    assert!(check_step_inequalities(&wp, 30).unwrap().passed());
}

#[test]
fn janson_fails_step_conditions() {
    let w = vec![ratio(2, 5), ratio(1, 5), ratio(2, 5)];
    let wp = WeightPair::plain(w.clone(), tree_b(&w, ArithClass::plain(), 8)).unwrap();
    assert!(!check_step_inequalities(&wp, 6).unwrap().passed());
    let tables = CompositionTables::new(&wp, 6).unwrap();
    let coupling = CompositionCoupling::new(tables);
    let mut failed = false;
    for n in 1..5 {
        for c in comp_distribution(&wp, n).unwrap().keys() {
            failed |= matches!(coupling.kernel_row(c), Err(crate::Error::NotCoupleable { .. }));
        }
    }
    assert!(failed);
}

/// `P_n(c) = μ_n(proj_1 c) · P^{a⁺}_{n − proj_1 c}(proj_{>1} c)`.
fn check_split(wp: &WeightPair, totals: impl Iterator<Item = usize>) {
    let shifted = wp.shift(1).unwrap();
    for n in totals {
        if n == 0 {
            continue;
        }
        let law = comp_distribution(wp, n).unwrap();
        let mu = first_part_law(wp, n).unwrap().by_part();
        for (c, p) in &law {
            let m = c.first().unwrap();
            let rest = comp_distribution(&shifted, n - m as usize).unwrap();
            let rhs = &mu[&m] * rest.get(&c.rest()).cloned().unwrap_or_default();
            assert_eq!(p, &rhs, "{c}");
        }
    }
}

#[test]
fn first_part_split() {
    check_split(&ones_pair(10), 1..=8);
    let wp = WeightPair::plain(vec![int(1), int(3), int(3), int(1)], ones(10)).unwrap();
    check_split(&wp, 1..=8);
    let wp = arith_pair(&[1, 0, 1], 2, 10);
    check_split(&wp, (1..=4).map(|k| 2 * k));
    let wp = arith_pair(&[2, 0, 0, 1], 3, 10);
    check_split(&wp, (1..=3).map(|k| 3 * k));
}

fn push(law: &BTreeMap<Composition, Q>, coupling: &CompositionCoupling<CompositionTables>) -> BTreeMap<Composition, Q> {
    let mut out: BTreeMap<Composition, Q> = BTreeMap::new();
    for (c, p) in law {
        let row = coupling.kernel_row(c).unwrap();
        assert_eq!(row.values().sum::<Q>(), Q::one());
        let succ = covering_successors(c, coupling.d());
        for (c2, q) in row {
            assert!(succ.contains(&c2));
            *out.entry(c2).or_default() += p * q;
        }
    }
    out
}

fn check_interchange(wp: &WeightPair, max_total: usize) {
    let d = wp.class().d as usize;
    let coupling = CompositionCoupling::new(CompositionTables::new(wp, max_total + d).unwrap());
    let mut n = wp.class().s as usize;
    while n <= max_total {
        let here = comp_distribution(wp, n).unwrap();
        let there = comp_distribution(wp, n + d).unwrap();
        assert_eq!(push(&here, &coupling), there, "total {n}");
        n += d;
    }
}

#[test]
fn composition_interchange() {
    check_interchange(&ones_pair(10), 8);
    check_interchange(&WeightPair::plain(vec![int(1), int(3), int(3), int(1)], tree_b(&[int(1), int(3), int(3), int(1)], ArithClass::plain(), 10)).unwrap(), 8);
    check_interchange(&arith_pair(&[1, 0, 1], 2, 12), 9);
    check_interchange(&arith_pair(&[2, 0, 0, 1], 3, 13), 9);
    check_interchange(&arith_pair(&[1, 0, 0, 3, 0, 0, 1], 3, 13), 9);
}

#[test]
fn arithmetic_shifted_class_interchange() {
    let wp = arith_pair(&[1, 0, 2, 0, 1], 2, 14).shift(1).unwrap();
    assert_eq!(wp.class().s, 1);
    check_interchange(&wp, 9);
}

#[test]
fn order_equivalence() {
    // c ⪯ c' iff proj_1(c) ≤ proj_1(c') and proj_{>1}(c) ⪯ proj_{>1}(c'), for nonempty c.
    let all: Vec<Composition> = (0..=6).flat_map(all_compositions).collect();
    for c in &all {
        for c2 in &all {
            let direct = precedes(c, c2, 1);
            if let (Some(a), Some(b)) = (c.first(), c2.first()) {
                assert_eq!(direct, a <= b && precedes(&c.rest(), &c2.rest(), 1), "{c} / {c2}");
            }
            // Reachability by covering steps.
            let mut frontier = vec![c.clone()];
            let mut reach = false;
            while let Some(x) = frontier.pop() {
                if &x == c2 {
                    reach = true;
                    break;
                }
                if x.total() < c2.total() {
                    frontier.extend(covering_successors(&x, 1));
                }
            }
            assert_eq!(direct, reach, "{c} / {c2}");
        }
    }
}

#[test]
fn chain_starts_are_forced() {
    let mut rng = crate::sampling::Seed::master(3).rng();
    let chain = sample_composition_chain(&ones_pair(6), 3, &mut rng).unwrap();
    assert_eq!(chain[0], Composition::empty());
    assert_eq!(chain[1], comp("1"));
    assert_eq!(chain.len(), 4);
    let chain = sample_composition_chain(&arith_pair(&[1, 0, 1], 2, 8), 6, &mut rng).unwrap();
    assert_eq!(chain[1], comp("1 1"));
    for pair in chain.windows(2) {
        assert!(covering_successors(&pair[0], 2).contains(&pair[1]));
    }
}

#[test]
fn chain_marginal() {
    let wp = ones_pair(6);
    let exact = comp_distribution(&wp, 4).unwrap();
    let coupling = CompositionCoupling::new(CompositionTables::new(&wp, 4).unwrap());
    let mut rng = crate::sampling::Seed::master(11).rng();
    let runs = 100_000u32;
    let mut counts: BTreeMap<Composition, u32> = BTreeMap::new();
    for _ in 0..runs {
        let chain = coupling.sample_chain(4, &mut rng).unwrap();
        *counts.entry(chain.last().unwrap().clone()).or_default() += 1;
    }
    let tv: f64 = exact
        .iter()
        .map(|(c, p)| {
            let emp = *counts.get(c).unwrap_or(&0) as f64 / runs as f64;
            (emp - crate::rational::to_f64(p)).abs()
        })
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.01, "{tv}");
}

proptest! {
    #[test]
    fn step_kernel_pushes_forward(n in 1usize..9) {
        let wp = ones_pair(12);
        let mu = first_part_law(&wp, n).unwrap();
        let next = first_part_law(&wp, n + 1).unwrap();
        let k = monotone_step_kernel(&mu, &next).unwrap();
        let mut pushed = vec![Q::zero(); next.masses().len()];
        for (j, p) in mu.masses().iter().enumerate() {
            let (stay, adv) = k.rows()[&(j as u32 + 1)].clone();
            pushed[j] += p * stay;
            pushed[j + 1] += p * adv;
        }
        prop_assert_eq!(pushed.as_slice(), next.masses());
    }

    #[test]
    fn distributions_sum_to_one(a in proptest::collection::vec(1i64..5, 2..5), b in proptest::collection::vec(1i64..5, 7), n in 0usize..7) {
        let wp = WeightPair::plain(a.iter().map(|&x| int(x)).collect(), b.iter().map(|&x| int(x)).collect()).unwrap();
        let law = comp_distribution(&wp, n).unwrap();
        prop_assert_eq!(law.values().sum::<Q>(), Q::one());
    }

    #[test]
    fn successors_grow_by_d(parts in proptest::collection::vec(1u32..5, 0..5), d in 1u32..4) {
        let c = Composition::new(parts).unwrap();
        for s in covering_successors(&c, d) {
            prop_assert_eq!(s.total(), c.total() + d as usize);
            prop_assert!(precedes(&c, &s, d));
        }
    }
}
