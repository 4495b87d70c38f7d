use std::collections::{BTreeMap, HashMap};

use rand_chacha::rand_core::RngCore;
use serde::Serialize;

use crate::compositions::{CompositionCoupling, Move, PartitionSource};
use crate::error::{domain, Result};
use crate::rational::Q;
use crate::sampling::ExactCategorical;
use crate::treespace::{decompose_root, PlaneTree, VertexSet, Word};

use super::tables::{compute_tables, PartitionTables};
use super::weights::WeightSequence;

/// The increasing Markov kernel on trees: the root composition moves by the
/// composition coupling, and an incremented part recurses into its subtree.
pub struct GrowthKernel<S = PartitionTables> {
    coupling: CompositionCoupling<S>,
}

impl<S: PartitionSource> GrowthKernel<S> {
    pub fn new(source: S) -> Result<Self> {
        if source.class().s != 0 {
            return domain("tree kernels need an unshifted class");
        }
        Ok(GrowthKernel {
            coupling: CompositionCoupling::new(source),
        })
    }

    pub fn d(&self) -> u32 {
        self.coupling.d()
    }

    pub fn source(&self) -> &S {
        self.coupling.source()
    }

    pub fn coupling(&self) -> &CompositionCoupling<S> {
        &self.coupling
    }

    /// Largest tree size the kernel can grow into.
    pub fn max_size(&self) -> usize {
        self.coupling.source().horizon() + 1
    }

    /// Law of the vertex receiving the next bouquet.
    pub fn moves(&self, t: &PlaneTree) -> Result<Vec<(Word, Q)>> {
        let (subtrees, c) = decompose_root(t);
        let mut out = Vec::new();
        for (mv, p) in self.coupling.move_law(&c)? {
            match mv {
                Move::Append => out.push((Word::root(), p)),
                Move::Increment(j) => {
                    for (v, q) in self.moves(&subtrees[j])? {
                        out.push((v.prepend(j as u32 + 1), &p * q));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `p(T, ·)`: the exact law of the next tree.
    pub fn row(&self, t: &PlaneTree) -> Result<BTreeMap<PlaneTree, Q>> {
        let d = self.d() as usize;
        let mut row = BTreeMap::new();
        for (v, p) in self.moves(t)? {
            let (t2, _) = t.with_bouquet(&v, d)?;
            let prev = row.insert(t2, p);
            assert!(prev.is_none(), "distinct bouquet positions gave the same tree");
        }
        Ok(row)
    }

    /// Draws the next tree by walking down from the root, one composition move per level.
    pub fn sample_step<R: RngCore>(&self, t: &PlaneTree, rng: &mut R) -> Result<(PlaneTree, Vec<Word>)> {
        let sizes = t.subtree_sizes();
        let mut v = Word::root();
        loop {
            let k = t.children_count(&v)? as u32;
            let parts: Vec<u32> = (1..=k).map(|j| sizes[&v.child(j)] as u32).collect();
            let c = crate::compositions::Composition::new(parts)?;
            match self.coupling.sample_move(&c, rng)? {
                Move::Append => return t.with_bouquet(&v, self.d() as usize),
                Move::Increment(j) => v = v.child(j as u32 + 1),
            }
        }
    }

    /// Interns every tree reachable from the root up to `size` vertices with its exact row.
    pub fn compile(&self, size: usize) -> Result<CompiledGrowth> {
        if size > self.max_size() {
            return Err(crate::Error::HorizonExceeded {
                requested: size,
                horizon: self.max_size(),
            });
        }
        let d = self.d() as usize;
        let mut states = vec![PlaneTree::root_only()];
        let mut index = HashMap::from([(PlaneTree::root_only(), 0usize)]);
        let mut rows = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let t = states[i].clone();
            if t.len() + d > size {
                rows.push(Vec::new());
            } else {
                let mut row = Vec::new();
                for (t2, p) in self.row(&t)? {
                    let id = *index.entry(t2.clone()).or_insert_with(|| {
                        states.push(t2);
                        states.len() - 1
                    });
                    row.push((id, p));
                }
                rows.push(row);
            }
            i += 1;
        }
        let samplers = rows
            .iter()
            .map(|row| {
                if row.is_empty() {
                    Ok(None)
                } else {
                    ExactCategorical::new(row.iter().cloned()).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        Ok(CompiledGrowth {
            d,
            states,
            index,
            rows,
            samplers,
        })
    }
}

/// The growth chain on the finite graph of reachable trees, for fast batteries.
pub struct CompiledGrowth {
    d: usize,
    states: Vec<PlaneTree>,
    index: HashMap<PlaneTree, usize>,
    rows: Vec<Vec<(usize, Q)>>,
    samplers: Vec<Option<ExactCategorical<usize>>>,
}

impl CompiledGrowth {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: usize) -> &PlaneTree {
        &self.states[id]
    }

    pub fn id(&self, t: &PlaneTree) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn row(&self, id: usize) -> &[(usize, Q)] {
        &self.rows[id]
    }

    /// Ids of `T_1, T_{1+d}, …` up to `size` vertices.
    pub fn sample_path<R: RngCore>(&self, size: usize, rng: &mut R) -> Vec<usize> {
        let mut path = vec![0];
        let mut cur = 0;
        let mut n = 1;
        while n + self.d <= size {
            let sampler = self.samplers[cur].as_ref().expect("path stays within the compiled sizes");
            cur = sampler.sample(rng);
            path.push(cur);
            n += self.d;
        }
        path
    }
}

/// One step of a growth trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthStep {
    pub step: usize,
    pub n: usize,
    pub new_vertices: Vec<Word>,
    #[serde(serialize_with = "serialize_tree")]
    pub tree: PlaneTree,
}

fn serialize_tree<S: serde::Serializer>(t: &PlaneTree, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

/// A growth chain `T_1 ⊂ T_{1+d} ⊂ …` driven by its own random stream.
pub struct GrowthChain<'k, R> {
    kernel: &'k GrowthKernel,
    tree: PlaneTree,
    step: usize,
    horizon: usize,
    rng: R,
}

impl<'k, R: RngCore> GrowthChain<'k, R> {
    pub fn new(kernel: &'k GrowthKernel, horizon: usize, rng: R) -> Result<Self> {
        if horizon > kernel.max_size() {
            return Err(crate::Error::HorizonExceeded {
                requested: horizon,
                horizon: kernel.max_size(),
            });
        }
        Ok(GrowthChain {
            kernel,
            tree: PlaneTree::root_only(),
            step: 0,
            horizon,
            rng,
        })
    }

    pub fn tree(&self) -> &PlaneTree {
        &self.tree
    }
}

impl<R: RngCore> Iterator for GrowthChain<'_, R> {
    type Item = Result<GrowthStep>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.tree.len() + self.kernel.d() as usize > self.horizon {
            return None;
        }
        Some(self.kernel.sample_step(&self.tree, &mut self.rng).map(|(t, new)| {
            self.tree = t;
            self.step += 1;
            GrowthStep {
                step: self.step,
                n: self.tree.len(),
                new_vertices: new,
                tree: self.tree.clone(),
            }
        }))
    }
}

/// Builds the kernel for `w`, refusing when `(w_0, w_d, …)` is not log-concave.
pub fn growth_kernel(w: &WeightSequence, d: u32, size: usize) -> Result<GrowthKernel> {
    w.validate(d)?;
    w.require_log_concave(d)?;
    GrowthKernel::new(compute_tables(w, d, size)?)
}

/// `p(T, ·)` for the weights `w`.
pub fn growth_kernel_row(w: &WeightSequence, d: u32, t: &PlaneTree) -> Result<BTreeMap<PlaneTree, Q>> {
    growth_kernel(w, d, t.len() + d as usize)?.row(t)
}

/// The trace `T_1, T_{1+d}, …` up to `size` vertices, the first entry being the root alone.
pub fn grow_chain<R: RngCore>(w: &WeightSequence, d: u32, size: usize, rng: &mut R) -> Result<Vec<GrowthStep>> {
    let kernel = growth_kernel(w, d, size.max(1))?;
    let mut trace = vec![GrowthStep {
        step: 0,
        n: 1,
        new_vertices: vec![Word::root()],
        tree: PlaneTree::root_only(),
    }];
    for step in GrowthChain::new(&kernel, size.max(1), rng)? {
        trace.push(step?);
    }
    Ok(trace)
}
