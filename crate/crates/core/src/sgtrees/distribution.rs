use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::compositions::{all_compositions, satisfies_arith, PartitionSource};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::treespace::{compose_root, decompose_root, PlaneTree, VertexSet};

use super::tables::{compute_tables, PartitionTables};
use super::weights::WeightSequence;

/// `SG_n(T)` by the root recursion `P_{n−1}(c(T)) ∏_j SG_{n_j}(T^[j])`.
pub fn sg_probability(tables: &PartitionTables, t: &PlaneTree) -> Result<Q> {
    let n = t.len();
    if n == 1 {
        return Ok(Q::one());
    }
    let total = tables.z_value(0, n - 1)?;
    if total.is_zero() {
        return Err(Error::ZeroMass(format!("no tree has {n} vertices for d = {}", tables.d())));
    }
    let (subtrees, c) = decompose_root(t);
    let mut p = tables.weights().get(c.len());
    if p.is_zero() {
        return Ok(p);
    }
    for &m in c.parts() {
        p *= tables.b_value(m as usize)?;
    }
    p /= total;
    for s in &subtrees {
        if p.is_zero() {
            break;
        }
        p *= sg_probability(tables, s)?;
    }
    Ok(p)
}

/// The law `SG_n` on trees with `n` vertices, built from the root recursion.
pub fn sg_law(tables: &PartitionTables, n: usize) -> Result<BTreeMap<PlaneTree, Q>> {
    let d = tables.d() as usize;
    if n == 0 || !(n - 1).is_multiple_of(d) {
        return Err(Error::ZeroMass(format!("tree sizes are 1 mod {d}, not {n}")));
    }
    let mut memo = HashMap::new();
    Ok(law_rec(tables, n, &mut memo)?.into_iter().collect())
}

fn law_rec(
    tables: &PartitionTables,
    n: usize,
    memo: &mut HashMap<usize, Vec<(PlaneTree, Q)>>,
) -> Result<Vec<(PlaneTree, Q)>> {
    if let Some(v) = memo.get(&n) {
        return Ok(v.clone());
    }
    let out = if n == 1 {
        vec![(PlaneTree::root_only(), Q::one())]
    } else {
        let total = tables.z_value(0, n - 1)?.clone();
        let cls = PartitionSource::class(tables);
        let mut out = Vec::new();
        for c in all_compositions(n - 1) {
            let a = tables.weights().get(c.len());
            if a.is_zero() || !satisfies_arith(&c, cls) {
                continue;
            }
            let mut pc = a / &total;
            for &m in c.parts() {
                pc *= tables.b_value(m as usize)?;
            }
            // Product over the subtrees, one part at a time.
            let mut partial: Vec<(Vec<PlaneTree>, Q)> = vec![(Vec::new(), pc)];
            for &m in c.parts() {
                let sub = law_rec(tables, m as usize, memo)?;
                let mut next = Vec::with_capacity(partial.len() * sub.len());
                for (prefix, p) in &partial {
                    for (s, q) in &sub {
                        let mut v = prefix.clone();
                        v.push(s.clone());
                        next.push((v, p * q));
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|(subs, p)| (compose_root(&subs), p)));
        }
        out
    };
    memo.insert(n, out.clone());
    Ok(out)
}

/// `SG^w_n` for a `d`-arithmetic weight sequence.
pub fn sg_distribution(w: &WeightSequence, d: u32, n: usize) -> Result<BTreeMap<PlaneTree, Q>> {
    let tables = compute_tables(w, d, n.max(1))?;
    sg_law(&tables, n)
}
