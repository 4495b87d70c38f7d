use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::rational::{serde_q, to_f64, Q};

use super::laws::ExactLaw;

/// Chi-square and total-variation comparison of counts against an exact law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GofReport {
    pub samples: u64,
    pub categories: usize,
    /// `None` when undersampled.
    pub chi_square: Option<f64>,
    pub degrees_of_freedom: usize,
    pub p_value: Option<f64>,
    /// Exact `½ Σ |count/N − p|`.
    #[serde(with = "serde_q")]
    pub tv: Q,
    /// Fewer than five samples per category: only TV is reported.
    pub undersampled: bool,
}

impl GofReport {
    pub fn tv_f64(&self) -> f64 {
        to_f64(&self.tv)
    }
}

/// Compares empirical counts with `law`; outcomes outside the support count
/// fully towards TV and make the chi-square statistic infinite.
pub fn goodness_of_fit<T: Ord + Clone>(counts: &BTreeMap<T, u64>, law: &ExactLaw<T>) -> GofReport {
    let samples: u64 = counts.values().sum();
    let categories = law.len();
    let undersampled = samples < 5 * categories as u64;
    let n = Q::from_integer(samples.into());

    let mut tv = Q::zero();
    if samples == 0 {
        tv = Q::from_integer(1.into());
    } else {
        for (x, p) in law.masses() {
            let c = Q::from_integer(counts.get(x).copied().unwrap_or(0).into());
            tv += (c / &n - p).abs();
        }
        for (x, &c) in counts {
            if law.get(x).is_zero() {
                tv += Q::from_integer(c.into()) / &n;
            }
        }
        tv /= Q::from_integer(2.into());
    }

    let degrees_of_freedom = categories.saturating_sub(1);
    let (chi_square, p_value) = if undersampled || samples == 0 {
        (None, None)
    } else {
        let outside = counts.iter().any(|(x, &c)| c > 0 && law.get(x).is_zero());
        if outside {
            (Some(f64::INFINITY), Some(0.0))
        } else {
            let total = samples as f64;
            let stat: f64 = law
                .masses()
                .iter()
                .map(|(x, p)| {
                    let expected = total * to_f64(p);
                    let observed = counts.get(x).copied().unwrap_or(0) as f64;
                    (observed - expected).powi(2) / expected
                })
                .sum();
            let p = if degrees_of_freedom == 0 {
                1.0
            } else {
                let dist = ChiSquared::new(degrees_of_freedom as f64).expect("positive degrees of freedom");
                1.0 - dist.cdf(stat)
            };
            (Some(stat), Some(p))
        }
    };
    GofReport {
        samples,
        categories,
        chi_square,
        degrees_of_freedom,
        p_value,
        tv,
        undersampled,
    }
}

/// Tallies samples.
pub fn count<T: Ord + Clone>(samples: impl IntoIterator<Item = T>) -> BTreeMap<T, u64> {
    let mut counts = BTreeMap::new();
    for x in samples {
        *counts.entry(x).or_insert(0) += 1;
    }
    counts
}
