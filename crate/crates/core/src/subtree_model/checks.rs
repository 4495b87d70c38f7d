use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::oracle::enumerate_subtrees;
use crate::sampling::{uniform_index, Seed};
use crate::treespace::{RootedSubtree, VertexSet, Word};

use super::bijection::{bij_p, bij_p_inv};
use super::invariance::CheckReport;
use super::shuffle::{
    apply_shuffle, children_position_sets, inverse_shuffle, push_forward, push_forward_shuffle, random_shuffle,
    Shuffle,
};

/// `𝔓⁻¹ ∘ 𝔓 = id` on `𝔱^{(dmax)}_n` for every `n ≤ n_max`, and `𝔓 ∘ 𝔓⁻¹ = id` on the images.
pub fn check_bijection(dmax: u32, n_max: usize) -> Result<CheckReport> {
    let mut report = CheckReport {
        property: format!("packing bijection on subtrees with letters <= {dmax}"),
        checked: 0,
        violation: None,
    };
    for n in 1..=n_max {
        for tau in enumerate_subtrees(n, dmax)? {
            report.checked += 1;
            let dt = bij_p(&tau);
            let back = bij_p_inv(&dt)?;
            if back != tau || bij_p(&back) != dt || dt.tree().len() != n {
                report.violation = Some(format!("round trip fails at {tau}"));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// The first shuffle identity that fails for `(τ, g)`, with `h` a second
/// collection of injections on `τ`.
fn first_failure(tau: &RootedSubtree, g: &Shuffle, h: &Shuffle) -> Result<Option<&'static str>> {
    let image = apply_shuffle(tau, g)?;
    if image.len() != tau.len() {
        return Ok(Some("g·τ has the size of τ"));
    }
    let inv = inverse_shuffle(g, tau)?;
    if apply_shuffle(&image, &inv)? != *tau {
        return Ok(Some("g⁻¹·(g·τ) = τ"));
    }
    if push_forward_shuffle(g, tau, &g.overline())? != inv {
        return Ok(Some("g⁻¹ = g_* ḡ"));
    }
    let before = children_position_sets(tau);
    let after = children_position_sets(&image);
    for u in tau.vertices() {
        let gu = &g.maps()[u];
        let mapped: Option<BTreeSet<u32>> = before[u].iter().map(|&i| gu.get(i)).collect();
        if mapped.as_ref() != after.get(&g.act(u)?) {
            return Ok(Some("C_{g·u}(g·τ) = g_u(C_u(τ))"));
        }
    }
    let x: BTreeMap<Word, String> = tau.vertices().iter().map(|u| (u.clone(), u.to_string())).collect();
    let y = push_forward(g, tau, &x)?;
    if push_forward(&inv, &image, &y)? != x {
        return Ok(Some("g⁻¹_* g_* x = x"));
    }
    let fx: BTreeMap<Word, usize> = x.iter().map(|(u, s)| (u.clone(), s.len())).collect();
    let fy: BTreeMap<Word, usize> = y.iter().map(|(u, s)| (u.clone(), s.len())).collect();
    if push_forward(g, tau, &fx)? != fy {
        return Ok(Some("g_* f(x) = f(g_* x)"));
    }
    if push_forward_shuffle(g, tau, h)?.overline() != push_forward_shuffle(g, tau, &h.overline())? {
        return Ok(Some("overline(g_* h) = g_* h̄"));
    }
    Ok(None)
}

/// The shuffle identities on `count` random `(τ, g, h)` with `τ ∈ 𝔱^{(3)}_n`, `n ≤ 4`,
/// and images in `1..=8`.
pub fn check_groupoid(count: usize, seed: &Seed) -> Result<CheckReport> {
    let pool: Vec<RootedSubtree> = (1..=4)
        .map(|n| enumerate_subtrees(n, 3))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let mut rng = seed.derive("groupoid").rng();
    let mut report = CheckReport {
        property: "shuffle groupoid identities".to_string(),
        checked: 0,
        violation: None,
    };
    for _ in 0..count {
        let tau = &pool[uniform_index(pool.len(), &mut rng)];
        let g = random_shuffle(tau, 8, &mut rng)?;
        let h = random_shuffle(tau, 8, &mut rng)?;
        report.checked += 1;
        if let Some(what) = first_failure(tau, &g, &h)? {
            report.violation = Some(format!("{what} fails at τ = {tau}, g = {:?}", g.maps()));
            break;
        }
    }
    Ok(report)
}
