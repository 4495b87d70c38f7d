use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::oracle::{enumerate_plane_trees, exact_sg_law};
use crate::rational::Q;
use crate::sgtrees::WeightSequence;
use crate::treespace::{PlaneTree, VertexSet, Word};

use super::shuffle::{apply_shuffle, inverse_shuffle, push_forward, push_forward_shuffle, Injection, Shuffle};
use super::subsets::{sigma_rule, Xseq};

/// A per-vertex permutation chosen from the decorated tree: `ψ(T, x, u) ∈ 𝔖_{k_u(T)}`.
pub type ShufflingRule<'a, X> = dyn Fn(&PlaneTree, &BTreeMap<Word, X>, &Word) -> Injection + 'a;

/// A decorated plane tree `(T, x)` with one decoration per vertex.
pub type Decorated<X> = (PlaneTree, BTreeMap<Word, X>);

/// `σ^ψ_{T,x} = (ψ(T, x, u))_{u ∈ T}`, checking sizes.
pub fn sigma_field<X>(rule: &ShufflingRule<'_, X>, t: &PlaneTree, x: &BTreeMap<Word, X>) -> Result<Shuffle> {
    let mut maps = BTreeMap::new();
    for (u, k) in t.out_degrees() {
        let p = rule(t, x, &u);
        if !p.is_permutation_of(k) {
            return domain(format!("the rule returned {p} at {u}, which has {k} children"));
        }
        maps.insert(u, p);
    }
    Ok(Shuffle::new(maps))
}

fn permutations(k: u32) -> Vec<Injection> {
    fn go(rest: &mut Vec<u32>, acc: &mut Vec<u32>, out: &mut Vec<Injection>) {
        if rest.is_empty() {
            out.push(Injection::permutation(acc).expect("a permutation"));
            return;
        }
        for j in 0..rest.len() {
            let v = rest.remove(j);
            acc.push(v);
            go(rest, acc, out);
            acc.pop();
            rest.insert(j, v);
        }
    }
    let mut out = Vec::new();
    go(&mut (1..=k).collect(), &mut Vec::new(), &mut out);
    out
}

/// Every element of `𝔖_T`.
pub fn permutation_fields(t: &PlaneTree) -> Vec<Shuffle> {
    let mut fields = vec![BTreeMap::new()];
    for (u, k) in t.out_degrees() {
        let perms = permutations(k as u32);
        let mut next = Vec::with_capacity(fields.len() * perms.len());
        for f in &fields {
            for p in &perms {
                let mut g = f.clone();
                g.insert(u.clone(), p.clone());
                next.push(g);
            }
        }
        fields = next;
    }
    fields.into_iter().map(Shuffle::new).collect()
}

fn plane_image(t: &PlaneTree, g: &Shuffle) -> Result<PlaneTree> {
    apply_shuffle(t, g)?.to_plane_tree()
}

/// Outcome of an exhaustive check with the first counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub property: String,
    pub checked: usize,
    pub violation: Option<String>,
}

impl CheckReport {
    fn new(property: &str) -> Self {
        CheckReport {
            property: property.to_string(),
            checked: 0,
            violation: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// `σ^ψ_{π·T, π_*x} = π_*(σ^ψ_{T,x})` for every instance and every `π ∈ 𝔖_T`.
pub fn check_equivariance<X: Clone + Debug>(
    rule: &ShufflingRule<'_, X>,
    instances: &[Decorated<X>],
) -> Result<CheckReport> {
    let mut report = CheckReport::new("equivariance");
    for (t, x) in instances {
        let sigma = sigma_field(rule, t, x)?;
        for pi in permutation_fields(t) {
            report.checked += 1;
            let t2 = plane_image(t, &pi)?;
            let x2 = push_forward(&pi, t, x)?;
            let left = sigma_field(rule, &t2, &x2)?;
            let right = push_forward_shuffle(&pi, t, &sigma)?;
            if left != right {
                report.violation = Some(format!(
                    "T = {t}, x = {x:?}, pi = {:?}: rule on the shuffled tree gives {:?}, pushed rule gives {:?}",
                    pi.maps(),
                    left.maps(),
                    right.maps()
                ));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Both directions of the unshuffling equivalence, and
/// `σ^ψ_{T',x'} = overline((σ^ψ_{T,x})⁻¹)` when `(T', x') = F^ψ(T, x)`.
pub fn check_unshuffling<X: Clone + Debug + PartialEq>(
    rule: &ShufflingRule<'_, X>,
    instances: &[Decorated<X>],
) -> Result<CheckReport> {
    let mut report = CheckReport::new("unshuffling");
    for (t, x) in instances {
        report.checked += 1;
        let sigma = sigma_field(rule, t, x)?;
        let t2 = plane_image(t, &sigma)?;
        let x2 = push_forward(&sigma, t, x)?;
        let sigma2 = sigma_field(rule, &t2, &x2)?;
        let back = sigma2.overline();
        let fail = |what: &str| Some(format!("T = {t}, x = {x:?}: {what}"));
        if plane_image(&t2, &back)? != *t || push_forward(&back, &t2, &x2)? != *x {
            report.violation = fail("unshuffling the image does not return (T, x)");
            return Ok(report);
        }
        if sigma2 != inverse_shuffle(&sigma, t)?.overline() {
            report.violation = fail("the rule at the image is not the overline of the inverse");
            return Ok(report);
        }
        // Reverse direction: start from (T', x') and unshuffle.
        let t1 = plane_image(&t2, &back)?;
        let x1 = push_forward(&back, &t2, &x2)?;
        let forward = sigma_field(rule, &t1, &x1)?;
        if plane_image(&t1, &forward)? != t2 || push_forward(&forward, &t1, &x1)? != x2 {
            report.violation = fail("shuffling the unshuffled pair does not return (T', x')");
            return Ok(report);
        }
    }
    Ok(report)
}

/// Every plane tree with `n` vertices, decorated in every way from `alphabet`.
pub fn decorated_trees<X: Clone>(n: usize, alphabet: &[X]) -> Result<Vec<Decorated<X>>> {
    let mut out = Vec::new();
    for t in enumerate_plane_trees(n, 1)? {
        let words: Vec<Word> = t.vertices().iter().cloned().collect();
        let mut idx = vec![0usize; words.len()];
        loop {
            let x = words.iter().cloned().zip(idx.iter().map(|&i| alphabet[i].clone())).collect();
            out.push((t.clone(), x));
            let Some(j) = idx.iter().rposition(|&i| i + 1 < alphabet.len()) else { break };
            idx[j] += 1;
            idx[j + 1..].iter_mut().for_each(|i| *i = 0);
        }
    }
    Ok(out)
}

/// Exact comparison of `SG_n^w(dT) ν^{⊗T}(dx)` with its image under `F^ψ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub n: usize,
    pub alphabet: usize,
    /// Decorated trees carrying mass.
    pub states: usize,
    pub mismatch: Option<String>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Largest number of decorated trees summed over.
const INVARIANCE_CAP: usize = 1 << 20;

/// Sums the measure over every decorated tree with `n` vertices and checks
/// that pushing it through `(T, x) ↦ (σ·T, σ_*x)` leaves it unchanged.
pub fn shuffle_invariance_check<X: Clone + Debug + Ord>(
    w: &WeightSequence,
    decoration_law: &[(X, Q)],
    rule: &ShufflingRule<'_, X>,
    n: usize,
) -> Result<InvarianceReport> {
    if decoration_law.is_empty() || decoration_law.iter().map(|(_, q)| q).sum::<Q>() != Q::from_integer(1.into()) {
        return domain("the decoration law must have masses summing to 1");
    }
    let trees = exact_sg_law(w.values(), 1, n)?;
    let size = trees.len().saturating_mul(decoration_law.len().saturating_pow(n as u32));
    if size > INVARIANCE_CAP {
        return domain(format!("{size} decorated trees exceed the cap {INVARIANCE_CAP}"));
    }
    let alphabet: Vec<X> = decoration_law.iter().map(|(x, _)| x.clone()).collect();
    let nu: BTreeMap<X, Q> = decoration_law.iter().cloned().collect();
    let mut before: BTreeMap<(PlaneTree, Vec<(Word, X)>), Q> = BTreeMap::new();
    let mut after = before.clone();
    for (t, x) in decorated_trees(n, &alphabet)? {
        let p = trees.get(&t);
        if p.is_zero() {
            continue;
        }
        let mass = x.values().fold(p, |acc, xi| acc * &nu[xi]);
        if mass.is_zero() {
            continue;
        }
        let sigma = sigma_field(rule, &t, &x)?;
        let t2 = plane_image(&t, &sigma)?;
        let x2 = push_forward(&sigma, &t, &x)?;
        *after.entry((t2, x2.into_iter().collect())).or_insert_with(Q::zero) += &mass;
        *before.entry((t, x.into_iter().collect())).or_insert_with(Q::zero) += mass;
    }
    let mismatch = before
        .iter()
        .chain(after.iter())
        .find(|(k, _)| before.get(*k) != after.get(*k))
        .map(|((t, x), _)| {
            format!(
                "T = {t}, x = {x:?}: measure {:?}, image measure {:?}",
                before.get(&(t.clone(), x.clone())).map(|q| q.to_string()),
                after.get(&(t.clone(), x.clone())).map(|q| q.to_string())
            )
        });
    Ok(InvarianceReport {
        n,
        alphabet: alphabet.len(),
        states: before.len(),
        mismatch,
    })
}

/// `ψ(T, x, u) = σ_{k_u(T), x_u}`.
pub fn sigma_shuffling_rule(t: &PlaneTree, x: &BTreeMap<Word, Xseq>, u: &Word) -> Injection {
    let k = t.children_positions(u).len();
    sigma_rule(k, &x[u]).expect("decorations are long enough for every vertex")
}

/// The identity permutation at every vertex.
pub fn identity_rule<X>(t: &PlaneTree, _x: &BTreeMap<Word, X>, u: &Word) -> Injection {
    Injection::identity(1..=t.children_positions(u).len() as u32)
}

/// Reverses the children of `u` when its first child carries `alpha`.
///
/// Looking at a child by absolute position breaks equivariance.
pub fn first_child_reversal<X: PartialEq + Clone>(alpha: X) -> impl Fn(&PlaneTree, &BTreeMap<Word, X>, &Word) -> Injection {
    move |t, x, u| {
        let k = t.children_positions(u).len() as u32;
        if k > 0 && x.get(&u.child(1)) == Some(&alpha) {
            Injection::reversal(k)
        } else {
            Injection::identity(1..=k)
        }
    }
}
