//! JSON-lines traces: a header line, then one line per step starting with
//! the root alone. Every trace is re-validated when it is read back.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};
use treegrow::rational::serde_q_vec;
use treegrow::sampling::Seed;
use treegrow::sgtrees::{GrowthChain, GrowthKernel, GrowthStep, PartitionTables, WeightSequence};
use treegrow::subtree_model::{SubtreeGrowth, SubtreeStep, Theta};
use treegrow::treespace::{
    is_bouquet_addition, is_leaf_addition, is_right_leaning_leaf_addition, parse_plane_tree, PlaneTree,
    RootedSubtree, VertexSet, Word,
};
use treegrow::Q;

use crate::config::{Model, RunConfig};

pub const FORMAT: &str = "treegrow-trace";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub model: Model,
    /// `w` for the tree models, `θ` for the subtree model.
    #[serde(with = "serde_q_vec")]
    pub weights: Vec<Q>,
    pub d: u32,
    pub n: usize,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeLine {
    step: usize,
    n: usize,
    new_vertices: Vec<Word>,
    tree: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubtreeLine {
    step: usize,
    n: usize,
    new_vertex: Word,
    subtree: Vec<Word>,
}

/// One step in a form both models share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub n: usize,
    pub new_vertices: Vec<Word>,
    pub vertices: BTreeSet<Word>,
}

/// Tree-model kernel on the route the model names: the direct recursion for
/// `sg`, the residue-indexed one for `sg-arith` (also at `d = 1`).
pub fn tree_kernel(model: Model, w: &WeightSequence, d: u32, n: usize) -> treegrow::Result<GrowthKernel> {
    w.validate(d)?;
    w.require_log_concave(d)?;
    let tables = match model {
        Model::Sg => PartitionTables::direct(w, n)?,
        _ => PartitionTables::arithmetic(w, d, n)?,
    };
    GrowthKernel::new(tables)
}

/// Runs the configured chain, writing the trace to `sink` and calling
/// `on_step` for every step after the first. Returns the final vertex set.
pub fn write_trace<W: Write>(
    cfg: &RunConfig,
    sink: &mut W,
    mut on_step: impl FnMut(&StepRecord),
) -> anyhow::Result<BTreeSet<Word>> {
    let seed = Seed::master(cfg.seed);
    let mut emit = |line: String| -> anyhow::Result<()> { writeln!(sink, "{line}").context("cannot write the trace") };
    match cfg.model {
        Model::Sg | Model::SgArith => {
            let w = cfg.weights.as_ref().expect("validated").resolve(cfg.n)?;
            let kernel = tree_kernel(cfg.model, &w, cfg.d, cfg.n)?;
            emit(serde_json::to_string(&header(cfg, w.values().to_vec()))?)?;
            let first = GrowthStep {
                step: 0,
                n: 1,
                new_vertices: vec![Word::root()],
                tree: PlaneTree::root_only(),
            };
            emit(serde_json::to_string(&first)?)?;
            let mut last = first.tree.vertices().clone();
            for step in GrowthChain::new(&kernel, cfg.n, seed.derive("tree").rng())? {
                let step = step?;
                emit(serde_json::to_string(&step)?)?;
                last = step.tree.vertices().clone();
                on_step(&StepRecord {
                    step: step.step,
                    n: step.n,
                    new_vertices: step.new_vertices,
                    vertices: last.clone(),
                });
            }
            Ok(last)
        }
        Model::Subtree => {
            let theta = cfg.theta.as_ref().expect("validated");
            let growth = SubtreeGrowth::new(theta, cfg.n)?;
            emit(serde_json::to_string(&header(cfg, theta.values().to_vec()))?)?;
            let first = SubtreeStep {
                step: 0,
                n: 1,
                new_vertex: Word::root(),
                subtree: RootedSubtree::root_only(),
            };
            emit(serde_json::to_string(&first)?)?;
            let mut last = first.subtree.vertices().clone();
            for step in growth.chain(&seed, cfg.n)? {
                let step = step?;
                emit(serde_json::to_string(&step)?)?;
                last = step.subtree.vertices().clone();
                on_step(&StepRecord {
                    step: step.step,
                    n: step.n,
                    new_vertices: vec![step.new_vertex],
                    vertices: last.clone(),
                });
            }
            Ok(last)
        }
    }
}

fn header(cfg: &RunConfig, weights: Vec<Q>) -> TraceHeader {
    TraceHeader {
        format: FORMAT.to_string(),
        model: cfg.model,
        weights,
        d: cfg.d,
        n: cfg.n,
        seed: cfg.seed,
    }
}

/// A trace that passed validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceSummary {
    pub model: Model,
    pub d: u32,
    pub steps: usize,
    pub final_size: usize,
}

/// Reads a trace and checks it: consecutive step numbers, sizes, nesting,
/// and the growth shape of the model (right-leaning leaf or bouquet for the
/// tree models, a plain leaf inside the support of `θ` for subtrees).
pub fn load_trace<R: BufRead>(reader: R) -> anyhow::Result<TraceSummary> {
    let mut lines = reader.lines();
    let first = lines.next().context("empty trace")??;
    let header: TraceHeader = serde_json::from_str(&first).context("bad header line")?;
    ensure!(header.format == FORMAT, "unknown trace format `{}`", header.format);

    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = match header.model {
            Model::Sg | Model::SgArith => {
                let l: TreeLine = serde_json::from_str(&line).with_context(|| format!("bad step line {}", i + 2))?;
                let tree = parse_plane_tree(&l.tree)?;
                StepRecord {
                    step: l.step,
                    n: l.n,
                    new_vertices: l.new_vertices,
                    vertices: tree.into_vertices(),
                }
            }
            Model::Subtree => {
                let l: SubtreeLine =
                    serde_json::from_str(&line).with_context(|| format!("bad step line {}", i + 2))?;
                let tree = RootedSubtree::from_words(l.subtree)?;
                StepRecord {
                    step: l.step,
                    n: l.n,
                    new_vertices: vec![l.new_vertex],
                    vertices: tree.into_vertices(),
                }
            }
        };
        records.push(record);
    }
    validate_records(&header, &records)?;
    Ok(TraceSummary {
        model: header.model,
        d: header.d,
        steps: records.len().saturating_sub(1),
        final_size: records.last().map_or(0, |r| r.vertices.len()),
    })
}

fn show(words: &BTreeSet<Word>) -> String {
    let items: Vec<String> = words.iter().map(Word::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn validate_records(header: &TraceHeader, records: &[StepRecord]) -> anyhow::Result<()> {
    let d = header.d;
    let mut support = BTreeSet::new();
    match header.model {
        Model::Sg | Model::SgArith => {
            ensure!(header.model != Model::Sg || d == 1, "model sg with d = {d}");
            WeightSequence::new(header.weights.clone())?.validate(d)?;
        }
        Model::Subtree => {
            support = Theta::new(header.weights.clone())?.support().into_iter().collect();
        }
    }
    let w = match header.model {
        Model::Subtree => None,
        _ => Some(WeightSequence::new(header.weights.clone())?),
    };

    let Some(root) = records.first() else {
        bail!("the trace has no steps");
    };
    ensure!(
        root.step == 0 && root.n == 1 && root.vertices == BTreeSet::from([Word::root()]),
        "the first step must be the root alone"
    );
    for (k, pair) in records.windows(2).enumerate() {
        let (prev, cur) = (&pair[0], &pair[1]);
        let at = k + 1;
        ensure!(cur.step == at, "step {at} is numbered {}", cur.step);
        ensure!(cur.n == cur.vertices.len(), "step {at} claims {} vertices but has {}", cur.n, cur.vertices.len());
        ensure!(cur.n <= header.n, "step {at} exceeds the horizon {}", header.n);
        let added: BTreeSet<Word> = cur.vertices.difference(&prev.vertices).cloned().collect();
        let claimed: BTreeSet<Word> = cur.new_vertices.iter().cloned().collect();
        ensure!(
            added == claimed,
            "step {at}: new vertices {} but the tree gained {}",
            show(&claimed),
            show(&added)
        );
        match &w {
            Some(w) => {
                let t = PlaneTree::new(prev.vertices.clone())?;
                let t2 = PlaneTree::new(cur.vertices.clone())?;
                let shape = if d == 1 {
                    is_right_leaning_leaf_addition(&t, &t2)
                } else {
                    is_bouquet_addition(&t, &t2, d as usize)
                };
                ensure!(shape, "step {at} is not a valid growth step for d = {d}");
                ensure!(w.weight(&t2) != Q::from_integer(0.into()), "step {at} reaches a tree of weight zero");
            }
            None => {
                let t = RootedSubtree::new(prev.vertices.clone())?;
                let t2 = RootedSubtree::new(cur.vertices.clone())?;
                ensure!(is_leaf_addition(&t, &t2), "step {at} is not a leaf addition");
                let outside = added.iter().find(|v| v.last().is_some_and(|i| !support.contains(&i)));
                ensure!(outside.is_none(), "step {at} adds {} outside the support of theta", outside.unwrap());
            }
        }
    }
    Ok(())
}
