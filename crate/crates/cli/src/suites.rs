//! Verification suites. Exact suites compare rationals; the statistical one
//! compares sampled chains with exact laws.

use std::collections::BTreeMap;

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::{json, Value};
use treegrow::oracle::{count, enumerate_plane_trees, exact_sg_law, exact_st_law, goodness_of_fit, kernel_interchange_check, GofReport, ExactLaw, PLANE_TREE_CAP};
use treegrow::rational::{format_rational, format_rational_list, ratio};
use treegrow::sampling::Seed;
use treegrow::sgtrees::{
    check_ratio_chain, check_tp2_array, compute_tables, is_log_concave, GrowthChain, GrowthKernel, PartitionTables,
    WeightSequence,
};
use treegrow::subtree_model::{
    check_bijection, check_equivariance, check_groupoid, check_nested_coupling, check_unshuffling, decorated_trees,
    first_child_reversal, shuffle_invariance_check, sigma_shuffling_rule, ShufflingRule, SubtreeGrowth, Theta, Xseq,
};
use treegrow::treespace::{
    is_bouquet_addition, is_leaf_addition, is_right_leaning_leaf_addition, PlaneTree, RootedSubtree, VertexSet,
};
use treegrow::Q;

use crate::config::{parse_theta, Model, Suite, WeightSpec};
use crate::trace::tree_kernel;

/// Inputs shared by the suites; each suite uses the ones it needs and fills
/// the rest from its own defaults.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub model: Model,
    pub weights: Option<WeightSpec>,
    pub theta: Option<Theta>,
    pub d: Option<u32>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: u64,
    pub samples: Option<u64>,
    pub seeds: Option<u64>,
    pub chains: Option<u64>,
    pub horizon: Option<usize>,
    pub thresholds: StatThresholds,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            model: Model::Sg,
            weights: None,
            theta: None,
            d: None,
            n_min: None,
            n_max: None,
            seed: 0,
            samples: None,
            seeds: None,
            chains: None,
            horizon: None,
            thresholds: StatThresholds::default(),
        }
    }
}

/// Pass thresholds of the statistical suite.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StatThresholds {
    /// A seed passes when its chi-square p-value exceeds this.
    pub p_min: f64,
    /// Fraction of seeds that must pass.
    pub seed_fraction: f64,
    /// Bound on the TV distance of the first seed's sample.
    pub tv_max: f64,
}

impl Default for StatThresholds {
    fn default() -> Self {
        StatThresholds {
            p_min: 0.001,
            seed_fraction: 0.95,
            tv_max: 0.01,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub details: Value,
}

pub fn run_suite(suite: Suite, p: &SuiteParams) -> anyhow::Result<SuiteReport> {
    let (passed, details) = match suite {
        Suite::Tables => tables_suite(p)?,
        Suite::Tp2 => tp2_suite(p)?,
        Suite::RatioChain => ratio_chain_suite(p)?,
        Suite::KernelInterchange => interchange_suite(p)?,
        Suite::Bijection => bijection_suite(p)?,
        Suite::SubsetCoupling => subset_coupling_suite(p)?,
        Suite::ShuffleInvariance => shuffle_invariance_suite(p)?,
        Suite::Stats => stats_suite(p)?,
    };
    Ok(SuiteReport { suite, passed, details })
}

fn weights(p: &SuiteParams, size: usize) -> anyhow::Result<WeightSequence> {
    p.weights.clone().unwrap_or(WeightSpec::Ones).resolve(size)
}

fn tree_d(p: &SuiteParams) -> u32 {
    p.d.unwrap_or(match p.model {
        Model::SgArith => 2,
        _ => 1,
    })
}

/// The route for tree suites: the direct one only at `d = 1` unless asked otherwise.
fn tree_model(p: &SuiteParams, d: u32) -> Model {
    if d == 1 && p.model != Model::SgArith {
        Model::Sg
    } else {
        Model::SgArith
    }
}

fn sizes(d: u32, max: usize) -> impl Iterator<Item = usize> {
    (1..=max).step_by(d as usize)
}

/// `b_n` against brute-force sums of `ω(T)`, the edge identity, and for
/// `d = 1` the residue-indexed route against the direct one.
fn tables_suite(p: &SuiteParams) -> anyhow::Result<(bool, Value)> {
    let d = tree_d(p);
    let size = p.n_max.unwrap_or(8);
    let w = weights(p, size)?;
    w.validate(d)?;
    let tables = compute_tables(&w, d, size)?;
    let mut passed = true;

    let mut brute = Vec::new();
    for n in sizes(d, size.min(10)) {
        let sum: Q = enumerate_plane_trees(n, d)?.iter().map(|t| w.weight(t)).sum();
        let ok = &sum == tables.b_value(n)?;
        passed &= ok;
        brute.push(json!({"n": n, "b": format_rational(tables.b_value(n)?), "enumerated": format_rational(&sum), "match": ok}));
    }
    let edge = tables.check_edge_identity()?;
    passed &= edge.passed();

    let reduction = if d == 1 {
        let r = route_reduction(&w, size)?;
        passed &= r.passed();
        json!(r)
    } else {
        Value::Null
    };
    Ok((
        passed,
        json!({
            "d": d,
            "weights": format_rational_list(w.values()),
            "b": tables.b_values().iter().skip(1).map(format_rational).collect::<Vec<_>>(),
            "brute_force": brute,
            "edge_identity": edge,
            "route_reduction": reduction,
        }),
    ))
}

/// The residue-indexed tables at `d = 1` against the direct recursion.
#[derive(Clone, Debug, Serialize)]
pub struct RouteReduction {
    pub size: usize,
    pub b_equal: bool,
    pub forest_equal: bool,
    /// Kernel rows compared, or `None` when the weights are not log-concave.
    pub rows_compared: Option<usize>,
    pub rows_equal: bool,
}

impl RouteReduction {
    pub fn passed(&self) -> bool {
        self.b_equal && self.forest_equal && self.rows_equal
    }
}

pub fn route_reduction(w: &WeightSequence, size: usize) -> anyhow::Result<RouteReduction> {
    let direct = PartitionTables::direct(w, size)?;
    let arith = PartitionTables::arithmetic(w, 1, size)?;
    let b_equal = direct.b_values() == arith.b_values();
    let mut forest_equal = true;
    for n in 0..size {
        for k in 0..=n {
            forest_equal &= direct.forest(n, k)? == arith.forest(n, k)?;
        }
    }
    let mut rows_compared = None;
    let mut rows_equal = true;
    if is_log_concave(w.values()).holds {
        let kd = GrowthKernel::new(direct)?;
        let ka = GrowthKernel::new(arith)?;
        let mut rows = 0;
        for n in 1..size.min(PLANE_TREE_CAP) {
            // Rows exist only for trees of positive weight.
            for t in enumerate_plane_trees(n, 1)?.into_iter().filter(|t| w.weight(t) != Q::from_integer(0.into())) {
                rows += 1;
                rows_equal &= kd.row(&t)? == ka.row(&t)?;
            }
        }
        rows_compared = Some(rows);
    }
    Ok(RouteReduction {
        size,
        b_equal,
        forest_equal,
        rows_compared,
        rows_equal,
    })
}

fn inequality_tables(p: &SuiteParams, default_n: usize) -> anyhow::Result<(PartitionTables, usize)> {
    let d = tree_d(p);
    let n_max = p.n_max.unwrap_or(default_n);
    let size = (n_max + 1) * d as usize + 1;
    let w = weights(p, size)?;
    w.validate(d)?;
    Ok((compute_tables(&w, d, size)?, n_max))
}

fn tp2_suite(p: &SuiteParams) -> anyhow::Result<(bool, Value)> {
    let (tables, n_max) = inequality_tables(p, 12)?;
    let report = check_tp2_array(&tables, n_max)?;
    let lc = is_log_concave(&tables.weights().progression(tables.d()));
    Ok((report.passed(), json!({"n_max": n_max, "log_concave": lc, "report": report})))
}

fn ratio_chain_suite(p: &SuiteParams) -> anyhow::Result<(bool, Value)> {
    let (tables, n_max) = inequality_tables(p, 20)?;
    let report = check_ratio_chain(&tables, n_max)?;
    let lc = is_log_concave(&tables.weights().progression(tables.d()));
    Ok((report.passed(), json!({"n_max": n_max, "log_concave": lc, "report": report})))
}

/// One interchange comparison `SG_n K = SG_{n+d}`.
#[derive(Clone, Debug, Serialize)]
pub struct InterchangeLevel {
    pub n: usize,
    pub sources: usize,
    pub targets: usize,
    pub passed: bool,
    pub detail: Value,
}

/// Pushes the brute-force law of `T_n` through the kernel for every size
/// `n ≤ n_max` in `1 + dℕ` and compares with the law of `T_{n+d}`.
pub fn interchange_levels(model: Model, w: &WeightSequence, d: u32, n_max: usize) -> anyhow::Result<Vec<InterchangeLevel>> {
    let kernel = tree_kernel(model, w, d, n_max + d as usize)?;
    let mut out = Vec::new();
    for n in sizes(d, n_max) {
        let law = exact_sg_law(w.values(), d, n)?;
        let next = exact_sg_law(w.values(), d, n + d as usize)?;
        let report = kernel_interchange_check(law.masses(), |t: &PlaneTree| kernel.row(t), next.masses())?;
        out.push(InterchangeLevel {
            n,
            sources: law.len(),
            targets: next.len(),
            passed: report.passed(),
            detail: json!(report),
        });
    }
    Ok(out)
}

fn interchange_suite(p: &SuiteParams) -> anyhow::Result<(bool, Value)> {
    let d = tree_d(p);
    let n_max = p.n_max.unwrap_or(6);
    let w = weights(p, n_max + d as usize)?;
    let levels = interchange_levels(tree_model(p, d), &w, d, n_max)?;
    let passed = levels.iter().all(|l| l.passed);
    Ok((passed, json!({"d": d, "weights": format_rational_list(w.values()), "levels": levels})))
}

fn bijection_suite(p: &SuiteParams) -> anyhow::Result<(bool, Value)> {
    let dmax = p.d.unwrap_or(3);
    let n_max = p.n_max.unwrap_or(5);
    let bijection = check_bijection(dmax, n_max)?;
    let groupoid = check_groupoid(p.samples.unwrap_or(1000) as usize, &Seed::master(p.seed))?;
    Ok((
        bijection.passed() && groupoid.passed(),
        json!({"bijection": bijection, "groupoid": groupoid}),
    ))
}

fn default_thetas() -> Vec<Theta> {
    let q = |xs: &[(i64, i64)]| Theta::new(xs.iter().map(|&(a, b)| ratio(a, b)).collect()).expect("valid theta");
    vec![
        q(&[(2, 1), (1, 1)]),
        q(&[(1, 1), (1, 1), (1, 1)]),
        q(&[(1, 2), (1, 3), (1, 4), (1, 5)]),
    ]
}

fn subset_coupling_suite(p: &SuiteParams) -> anyhow::Result<(bool, Value)> {
    let thetas = match &p.theta {
        Some(t) => vec![t.clone()],
        None => default_thetas(),
    };
    let mut passed = true;
    let mut reports = Vec::new();
    for theta in thetas {
        let report = check_nested_coupling(&theta)?;
        passed &= report.passed();
        reports.push(json!({"theta": format_rational_list(theta.values()), "report": report}));
    }
    Ok((passed, json!(reports)))
}

/// The two-symbol decoration law: `(1, …, m)` with mass `1/3` and its
/// rotation `(m, 1, …, m−1)` with mass `2/3`, long enough for trees with
/// `n` vertices.
pub fn two_symbol_law(n: usize) -> Vec<(Xseq, Q)> {
    let m = n.saturating_sub(1).max(3) as u32;
    let identity: Vec<u32> = (1..=m).collect();
    let mut rotated = vec![m];
    rotated.extend(1..m);
    vec![(Xseq::of(&identity), ratio(1, 3)), (Xseq::of(&rotated), ratio(2, 3))]
}

/// Equivariance, unshuffling and exact invariance of the shuffling rule
/// `σ_{k,x}`, with a planted rule that must be caught.
#[derive(Clone, Debug, Serialize)]
pub struct InvarianceSummary {
    pub equivariance: treegrow::subtree_model::CheckReport,
    pub unshuffling: treegrow::subtree_model::CheckReport,
    pub invariance: Vec<treegrow::subtree_model::InvarianceReport>,
    pub planted: treegrow::subtree_model::CheckReport,
}

impl InvarianceSummary {
    pub fn passed(&self) -> bool {
        self.equivariance.passed()
            && self.unshuffling.passed()
            && self.invariance.iter().all(|r| r.passed())
            && !self.planted.passed()
    }
}

pub fn invariance_summary(w: &WeightSequence, n_max: usize) -> anyhow::Result<InvarianceSummary> {
    let law = two_symbol_law(n_max);
    let alphabet: Vec<Xseq> = law.iter().map(|(x, _)| x.clone()).collect();
    let rule: &ShufflingRule<'_, Xseq> = &sigma_shuffling_rule;
    let mut instances = Vec::new();
    for n in 1..=n_max {
        instances.extend(decorated_trees(n, &alphabet)?);
    }
    let equivariance = check_equivariance(rule, &instances)?;
    let unshuffling = check_unshuffling(rule, &instances)?;
    let invariance = (1..=n_max)
        .map(|n| shuffle_invariance_check(w, &law, rule, n))
        .collect::<treegrow::Result<Vec<_>>>()?;
    let planted_rule = first_child_reversal(alphabet[0].clone());
    let planted_rule: &ShufflingRule<'_, Xseq> = &planted_rule;
    let planted = check_equivariance(planted_rule, &decorated_trees(3, &alphabet)?)?;
    Ok(InvarianceSummary {
        equivariance,
        unshuffling,
        invariance,
        planted,
    })
}

fn shuffle_invariance_suite(p: &SuiteParams) -> anyhow::Result<(bool, Value)> {
    let n_max = p.n_max.unwrap_or(4);
    let w = weights(p, n_max)?;
    w.validate(1)?;
    let summary = invariance_summary(&w, n_max)?;
    Ok((summary.passed(), json!({"weights": format_rational_list(w.values()), "summary": summary})))
}

/// Stepwise checks over many independent chains.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeBattery {
    pub chains: u64,
    pub steps: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl ShapeBattery {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.steps += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }
}

/// Runs `chains` tree chains to `horizon` vertices and checks every step
/// with the right-leaning (`d = 1`) or bouquet (`d ≥ 2`) predicate.
pub fn tree_shape_battery(kernel: &GrowthKernel, chains: u64, horizon: usize, seed: &Seed) -> anyhow::Result<ShapeBattery> {
    let d = kernel.d() as usize;
    let mut battery = ShapeBattery {
        chains,
        steps: 0,
        failures: 0,
        first_failure: None,
    };
    for c in 0..chains {
        let rng = seed.derive_index("shape", c).rng();
        let mut prev = PlaneTree::root_only();
        for step in GrowthChain::new(kernel, horizon, rng)? {
            let t = step?.tree;
            let ok = if d == 1 {
                is_right_leaning_leaf_addition(&prev, &t)
            } else {
                is_bouquet_addition(&prev, &t, d)
            };
            battery.record(ok, || format!("chain {c}: {prev} -> {t}"));
            prev = t;
        }
    }
    Ok(battery)
}

/// Runs `chains` subtree chains to `horizon` vertices and checks that every
/// step adds one leaf to the previous subtree.
pub fn subtree_inclusion_battery(
    growth: &SubtreeGrowth,
    chains: u64,
    horizon: usize,
    seed: &Seed,
) -> anyhow::Result<ShapeBattery> {
    let mut battery = ShapeBattery {
        chains,
        steps: 0,
        failures: 0,
        first_failure: None,
    };
    for c in 0..chains {
        let mut prev = RootedSubtree::root_only();
        for step in growth.chain(&seed.derive_index("inclusion", c), horizon)? {
            let t = step?.subtree;
            let ok = is_leaf_addition(&prev, &t) && prev.vertices().is_subset(t.vertices());
            battery.record(ok, || format!("chain {c}: {prev} -> {t}"));
            prev = t;
        }
    }
    Ok(battery)
}

/// Goodness of fit of the sampled `T_n` (or `𝒯_n`) across a seed battery.
#[derive(Clone, Debug, Serialize)]
pub struct SizeStats {
    pub n: usize,
    pub categories: usize,
    pub samples: u64,
    pub seeds: u64,
    pub seeds_passing: u64,
    pub first_seed: GofReport,
    /// Median over seeds, for context.
    pub median_tv: f64,
    pub passed_seeds: bool,
    pub passed_tv: bool,
}

impl SizeStats {
    pub fn passed(&self) -> bool {
        self.passed_seeds && self.passed_tv
    }
}

fn summarize<T: Ord + Clone>(
    n: usize,
    per_seed: &[BTreeMap<T, u64>],
    law: &ExactLaw<T>,
    samples: u64,
    th: &StatThresholds,
) -> SizeStats {
    let reports: Vec<GofReport> = per_seed.iter().map(|c| goodness_of_fit(c, law)).collect();
    let seeds = reports.len() as u64;
    let seeds_passing = reports.iter().filter(|r| r.p_value.is_some_and(|p| p > th.p_min)).count() as u64;
    let mut tvs: Vec<f64> = reports.iter().map(GofReport::tv_f64).collect();
    tvs.sort_by(f64::total_cmp);
    let first = reports[0].clone();
    let passed_seeds = seeds_passing as f64 >= (th.seed_fraction * seeds as f64).ceil();
    let passed_tv = first.tv_f64() < th.tv_max;
    SizeStats {
        n,
        categories: law.len(),
        samples,
        seeds,
        seeds_passing,
        median_tv: tvs[tvs.len() / 2],
        first_seed: first,
        passed_seeds,
        passed_tv,
    }
}

/// Samples `samples` chains for each of `seeds` seeds and compares the law
/// of the tree at each size in `n_min..=n_max` with the exact law.
pub fn tree_stats(
    model: Model,
    w: &WeightSequence,
    d: u32,
    n_min: usize,
    n_max: usize,
    samples: u64,
    seeds: u64,
    seed: &Seed,
    th: &StatThresholds,
) -> anyhow::Result<Vec<SizeStats>> {
    let kernel = tree_kernel(model, w, d, n_max)?;
    let compiled = kernel.compile(n_max)?;
    let levels: Vec<usize> = sizes(d, n_max).filter(|&n| n >= n_min).collect();
    let mut counts: Vec<Vec<BTreeMap<PlaneTree, u64>>> = vec![Vec::new(); levels.len()];
    for s in 0..seeds {
        let mut rng = seed.derive_index("battery", s).derive("tree").rng();
        let mut per_level: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); levels.len()];
        for _ in 0..samples {
            let path = compiled.sample_path(n_max, &mut rng);
            for (i, &n) in levels.iter().enumerate() {
                *per_level[i].entry(path[(n - 1) / d as usize]).or_insert(0) += 1;
            }
        }
        for (i, c) in per_level.into_iter().enumerate() {
            counts[i].push(c.into_iter().map(|(id, k)| (compiled.state(id).clone(), k)).collect());
        }
    }
    levels
        .iter()
        .zip(counts)
        .map(|(&n, c)| Ok(summarize(n, &c, &exact_sg_law(w.values(), d, n)?, samples, th)))
        .collect()
}

/// As [`tree_stats`] for the subtree chain and `ST_n^θ`.
pub fn subtree_stats(
    theta: &Theta,
    n_min: usize,
    n_max: usize,
    samples: u64,
    seeds: u64,
    seed: &Seed,
    th: &StatThresholds,
) -> anyhow::Result<Vec<SizeStats>> {
    let growth = SubtreeGrowth::new(theta, n_max)?;
    let compiled = growth.compile(n_max)?;
    let levels: Vec<usize> = (n_min.max(1)..=n_max).collect();
    let mut counts: Vec<Vec<BTreeMap<RootedSubtree, u64>>> = vec![Vec::new(); levels.len()];
    for s in 0..seeds {
        let battery = seed.derive_index("battery", s);
        let mut per_level: Vec<Vec<RootedSubtree>> = vec![Vec::with_capacity(samples as usize); levels.len()];
        for c in 0..samples {
            let path = compiled.sample_path(&battery.derive_index("chain", c), n_max)?;
            for (i, &n) in levels.iter().enumerate() {
                per_level[i].push(path[n - 1].clone());
            }
        }
        for (i, trees) in per_level.into_iter().enumerate() {
            counts[i].push(count(trees));
        }
    }
    levels
        .iter()
        .zip(counts)
        .map(|(&n, c)| Ok(summarize(n, &c, &exact_st_law(theta.values(), n)?, samples, th)))
        .collect()
}

fn stats_suite(p: &SuiteParams) -> anyhow::Result<(bool, Value)> {
    let samples = p.samples.unwrap_or(100_000);
    let seeds = p.seeds.unwrap_or(1).max(1);
    let chains = p.chains.unwrap_or(10_000);
    let horizon = p.horizon.unwrap_or(20);
    let seed = Seed::master(p.seed);
    match p.model {
        Model::Subtree => {
            let theta = match &p.theta {
                Some(t) => t.clone(),
                None => parse_theta("1,1")?,
            };
            let n_max = p.n_max.unwrap_or(5);
            let n_min = p.n_min.unwrap_or(n_max);
            let growth = SubtreeGrowth::new(&theta, horizon.max(n_max))?;
            let inclusion = subtree_inclusion_battery(&growth, chains, horizon, &seed)?;
            let levels = subtree_stats(&theta, n_min, n_max, samples, seeds, &seed, &p.thresholds)?;
            let passed = inclusion.passed() && levels.iter().all(SizeStats::passed);
            Ok((
                passed,
                json!({"theta": format_rational_list(theta.values()), "thresholds": p.thresholds, "inclusion": inclusion, "levels": levels}),
            ))
        }
        _ => {
            let d = tree_d(p);
            let model = tree_model(p, d);
            let n_max = p.n_max.unwrap_or(8);
            let n_min = p.n_min.unwrap_or(n_max);
            if !(n_max - 1).is_multiple_of(d as usize) {
                bail!("n-max = {n_max} is not 1 plus a multiple of d = {d}");
            }
            let w = weights(p, horizon.max(n_max))?;
            let kernel = tree_kernel(model, &w, d, horizon.max(n_max)).context("building the growth kernel")?;
            let shape = tree_shape_battery(&kernel, chains, horizon - (horizon - 1) % d as usize, &seed)?;
            let levels = tree_stats(model, &w, d, n_min, n_max, samples, seeds, &seed, &p.thresholds)?;
            let passed = shape.passed() && levels.iter().all(SizeStats::passed);
            Ok((
                passed,
                json!({"d": d, "thresholds": p.thresholds, "shape": shape, "levels": levels}),
            ))
        }
    }
}
