use std::collections::BTreeMap;
use std::fmt::Display;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::rational::{serde_q, Q};

/// The first target state where `Σ_x L_n(x) K(x, y) ≠ L_{n+d}(y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub state: String,
    #[serde(with = "serde_q")]
    pub pushed: Q,
    #[serde(with = "serde_q")]
    pub expected: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterchangeReport {
    pub sources: usize,
    pub targets: usize,
    /// Source states whose row does not sum to one.
    pub bad_rows: Vec<String>,
    pub discrepancy: Option<Discrepancy>,
}

impl InterchangeReport {
    pub fn passed(&self) -> bool {
        self.bad_rows.is_empty() && self.discrepancy.is_none()
    }
}

/// Pushes `law_n` through `kernel` and compares with `law_next`, exactly.
pub fn kernel_interchange_check<X, F>(
    law_n: &BTreeMap<X, Q>,
    kernel: F,
    law_next: &BTreeMap<X, Q>,
) -> Result<InterchangeReport>
where
    X: Ord + Clone + Display,
    F: Fn(&X) -> Result<BTreeMap<X, Q>>,
{
    let mut pushed: BTreeMap<X, Q> = BTreeMap::new();
    let mut bad_rows = Vec::new();
    for (x, p) in law_n {
        if p.is_zero() {
            continue;
        }
        let row = kernel(x)?;
        if row.values().sum::<Q>() != Q::one() {
            bad_rows.push(x.to_string());
        }
        for (y, q) in row {
            *pushed.entry(y).or_insert_with(Q::zero) += p * q;
        }
    }
    let zero = Q::zero();
    let mut discrepancy = None;
    let targets: std::collections::BTreeSet<&X> = pushed.keys().chain(law_next.keys()).collect();
    for y in &targets {
        let a = pushed.get(*y).unwrap_or(&zero);
        let b = law_next.get(*y).unwrap_or(&zero);
        if a != b {
            discrepancy = Some(Discrepancy {
                state: y.to_string(),
                pushed: a.clone(),
                expected: b.clone(),
            });
            break;
        }
    }
    Ok(InterchangeReport {
        sources: law_n.len(),
        targets: targets.len(),
        bad_rows,
        discrepancy,
    })
}
