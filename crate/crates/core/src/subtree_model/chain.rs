use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use rand_chacha::ChaCha20Rng;
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::rational::Q;
use crate::sampling::Seed;
use crate::sgtrees::{growth_kernel, sg_distribution, CompiledGrowth, GrowthKernel};
use crate::treespace::{PlaneTree, RootedSubtree, VertexSet, Word};

use super::bijection::{bij_p_inv, DecoratedTree};
use super::shuffle::{apply_shuffle, push_forward, Injection, Shuffle};
use super::subsets::{prefix_map, sigma_rule, NestedSubsetCoupling, Xseq};
use super::theta::Theta;

fn word_key(u: &Word) -> Vec<u8> {
    u.letters().iter().flat_map(|l| l.to_le_bytes()).collect()
}

/// The subtree growth: a simply generated chain for `e(θ)` whose `j`-th child
/// of `u` is placed at position `X_u(j)`, with independent sequences `X_u`.
pub struct SubtreeGrowth {
    theta: Theta,
    subsets: NestedSubsetCoupling,
    kernel: GrowthKernel,
}

impl SubtreeGrowth {
    /// Prepares chains up to `size` vertices.
    pub fn new(theta: &Theta, size: usize) -> Result<Self> {
        // e(θ) is always log-concave; growth_kernel checks it anyway.
        let kernel = growth_kernel(&theta.offspring_weights(), 1, size.max(1))?;
        Ok(SubtreeGrowth {
            theta: theta.clone(),
            subsets: NestedSubsetCoupling::new(theta)?,
            kernel,
        })
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn kernel(&self) -> &GrowthKernel {
        &self.kernel
    }

    pub fn subsets(&self) -> &NestedSubsetCoupling {
        &self.subsets
    }

    pub fn max_size(&self) -> usize {
        self.kernel.max_size()
    }

    /// `X_u` for the chain keyed by `seed`; the same vertex always gets the same sequence.
    pub fn decoration(&self, seed: &Seed, u: &Word) -> Xseq {
        self.subsets.sample(&mut seed.derive_bytes("decoration", &word_key(u)).rng())
    }

    /// A chain `𝒯_1 ⊂ 𝒯_2 ⊂ …` up to `horizon` vertices, all randomness derived from `seed`.
    pub fn chain(&self, seed: &Seed, horizon: usize) -> Result<SubtreeChain<'_>> {
        if horizon > self.max_size() {
            return Err(crate::Error::HorizonExceeded {
                requested: horizon,
                horizon: self.max_size(),
            });
        }
        Ok(SubtreeChain {
            growth: self,
            seed: *seed,
            rng: seed.derive("tree").rng(),
            plane: PlaneTree::root_only(),
            images: BTreeMap::from([(Word::root(), Word::root())]),
            subtree: BTreeSet::from([Word::root()]),
            decorations: BTreeMap::new(),
            step: 0,
            horizon,
        })
    }

    /// Precomputes the plane-tree graph up to `size` vertices for fast batteries.
    pub fn compile(&self, size: usize) -> Result<CompiledSubtreeGrowth<'_>> {
        let plane = self.kernel.compile(size)?;
        let mut added = HashMap::new();
        for id in 0..plane.len() {
            let from = plane.state(id).vertices();
            for &(to, _) in plane.row(id) {
                let new = plane.state(to).vertices().difference(from).next().cloned();
                added.insert((id, to), new.expect("each step adds a vertex"));
            }
        }
        Ok(CompiledSubtreeGrowth {
            growth: self,
            plane,
            added,
        })
    }
}

/// The subtree growth on a compiled plane-tree graph. Per seed the decorations
/// agree with [`SubtreeGrowth::chain`]; the plane path is drawn from the same
/// kernel through a different sampler, so only the law of the trace is shared.
pub struct CompiledSubtreeGrowth<'g> {
    growth: &'g SubtreeGrowth,
    plane: CompiledGrowth,
    /// The vertex added along each edge of the graph.
    added: HashMap<(usize, usize), Word>,
}

impl CompiledSubtreeGrowth<'_> {
    /// `𝒯_1, …, 𝒯_size`.
    pub fn sample_path(&self, seed: &Seed, size: usize) -> Result<Vec<RootedSubtree>> {
        let path = self.plane.sample_path(size, &mut seed.derive("tree").rng());
        let mut images = BTreeMap::from([(Word::root(), Word::root())]);
        let mut decorations: BTreeMap<Word, Xseq> = BTreeMap::new();
        let mut subtree = BTreeSet::from([Word::root()]);
        let mut out = vec![RootedSubtree::root_only()];
        for pair in path.windows(2) {
            let v = &self.added[&(pair[0], pair[1])];
            let parent = v.parent().expect("non-root");
            let j = v.last().expect("non-root") as usize;
            let x = decorations
                .entry(parent.clone())
                .or_insert_with(|| self.growth.decoration(seed, &parent));
            let Some(&position) = x.entries().get(j - 1) else {
                return domain(format!("vertex {parent} has more children than theta has support points"));
            };
            let image = images[&parent].child(position);
            images.insert(v.clone(), image.clone());
            subtree.insert(image);
            out.push(RootedSubtree::from_set_unchecked(subtree.clone()));
        }
        Ok(out)
    }
}

/// One step of a subtree trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubtreeStep {
    pub step: usize,
    pub n: usize,
    pub new_vertex: Word,
    #[serde(serialize_with = "serialize_words")]
    pub subtree: RootedSubtree,
}

fn serialize_words<S: Serializer>(t: &RootedSubtree, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(t.vertices().iter().map(|w| w.to_string()))
}

pub struct SubtreeChain<'g> {
    growth: &'g SubtreeGrowth,
    seed: Seed,
    rng: ChaCha20Rng,
    plane: PlaneTree,
    /// Plane vertex to its image in the subtree.
    images: BTreeMap<Word, Word>,
    subtree: BTreeSet<Word>,
    decorations: BTreeMap<Word, Xseq>,
    step: usize,
    horizon: usize,
}

impl SubtreeChain<'_> {
    /// The underlying plane tree `T_n`.
    pub fn plane(&self) -> &PlaneTree {
        &self.plane
    }

    pub fn subtree(&self) -> RootedSubtree {
        RootedSubtree::from_set_unchecked(self.subtree.clone())
    }

    /// The sequences `X_u` drawn so far (one per vertex that has children).
    pub fn decorations(&self) -> &BTreeMap<Word, Xseq> {
        &self.decorations
    }

    fn advance(&mut self) -> Result<SubtreeStep> {
        let (t2, new) = self.growth.kernel.sample_step(&self.plane, &mut self.rng)?;
        let v = new[0].parent().expect("a new vertex has a parent");
        let j = new[0].last().expect("non-root") as usize;
        let growth = self.growth;
        let seed = self.seed;
        let x = self
            .decorations
            .entry(v.clone())
            .or_insert_with(|| growth.decoration(&seed, &v));
        let Some(&position) = x.entries().get(j - 1) else {
            return domain(format!("vertex {v} has more children than theta has support points"));
        };
        let image = self.images[&v].child(position);
        self.images.insert(new[0].clone(), image.clone());
        self.subtree.insert(image.clone());
        self.plane = t2;
        self.step += 1;
        Ok(SubtreeStep {
            step: self.step,
            n: self.subtree.len(),
            new_vertex: image,
            subtree: self.subtree(),
        })
    }
}

impl Iterator for SubtreeChain<'_> {
    type Item = Result<SubtreeStep>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.plane.len() >= self.horizon {
            return None;
        }
        Some(self.advance())
    }
}

/// The trace `𝒯_1 ⊂ … ⊂ 𝒯_size`, the first entry being the root alone.
pub fn subtree_grow_chain(theta: &Theta, size: usize, seed: &Seed) -> Result<Vec<SubtreeStep>> {
    let growth = SubtreeGrowth::new(theta, size)?;
    let mut trace = vec![SubtreeStep {
        step: 0,
        n: 1,
        new_vertex: Word::root(),
        subtree: RootedSubtree::root_only(),
    }];
    for step in growth.chain(seed, size.max(1))? {
        trace.push(step?);
    }
    Ok(trace)
}

/// `(g_T, σ_T, S_T)` at every vertex; vertices without children need no sequence.
fn fields(t: &PlaneTree, xs: &BTreeMap<Word, Xseq>) -> Result<(Shuffle, Shuffle, BTreeMap<Word, BTreeSet<u32>>)> {
    let mut g = BTreeMap::new();
    let mut sigma = BTreeMap::new();
    let mut sets = BTreeMap::new();
    for (u, k) in t.out_degrees() {
        if k == 0 {
            g.insert(u.clone(), Injection::default());
            sigma.insert(u.clone(), Injection::default());
            sets.insert(u, BTreeSet::new());
            continue;
        }
        let Some(x) = xs.get(&u) else {
            return domain(format!("no sequence at vertex {u}, which has children"));
        };
        g.insert(u.clone(), prefix_map(k, x)?);
        sigma.insert(u.clone(), sigma_rule(k, x)?);
        sets.insert(u, x.prefix_set(k)?);
    }
    Ok((Shuffle::new(g), Shuffle::new(sigma), sets))
}

/// `g_T · T`: the `j`-th child of `u` placed at position `x_u(j)`.
pub fn embedded_image(t: &PlaneTree, xs: &BTreeMap<Word, Xseq>) -> Result<RootedSubtree> {
    let (g, _, _) = fields(t, xs)?;
    apply_shuffle(t, &g)
}

/// `𝔓⁻¹(σ_T · T, (σ_T)_* S_T)`, computed literally.
pub fn shuffled_image(t: &PlaneTree, xs: &BTreeMap<Word, Xseq>) -> Result<RootedSubtree> {
    let (_, sigma, sets) = fields(t, xs)?;
    let shuffled = apply_shuffle(t, &sigma)?.to_plane_tree()?;
    let moved = push_forward(&sigma, t, &sets)?;
    bij_p_inv(&DecoratedTree::new(shuffled, moved)?)
}

/// `𝔓⁻¹(T, S_T)` without shuffling: correct marginals, but not increasing.
pub fn naive_image(t: &PlaneTree, xs: &BTreeMap<Word, Xseq>) -> Result<RootedSubtree> {
    let (_, _, sets) = fields(t, xs)?;
    bij_p_inv(&DecoratedTree::new(t.clone(), sets)?)
}

/// The exact law of `𝒯_n` under the chain: the law of `T_n` for `e(θ)` mixed
/// over independent sequences at its internal vertices.
pub fn coupling_law(theta: &Theta, n: usize) -> Result<BTreeMap<RootedSubtree, Q>> {
    let trees = sg_distribution(&theta.offspring_weights(), 1, n)?;
    let xlaw: Vec<(Xseq, Q)> = NestedSubsetCoupling::new(theta)?.joint_law().into_iter().collect();
    let mut law = BTreeMap::new();
    for (t, p) in trees {
        let internal: Vec<Word> = t.out_degrees().into_iter().filter(|(_, k)| *k > 0).map(|(u, _)| u).collect();
        let mut xs = BTreeMap::new();
        mix(&t, &internal, &xlaw, p, &mut xs, &mut law)?;
    }
    Ok(law)
}

fn mix(
    t: &PlaneTree,
    todo: &[Word],
    xlaw: &[(Xseq, Q)],
    mass: Q,
    xs: &mut BTreeMap<Word, Xseq>,
    law: &mut BTreeMap<RootedSubtree, Q>,
) -> Result<()> {
    let Some((u, rest)) = todo.split_first() else {
        *law.entry(embedded_image(t, xs)?).or_insert_with(Q::zero) += mass;
        return Ok(());
    };
    for (x, q) in xlaw {
        xs.insert(u.clone(), x.clone());
        mix(t, rest, xlaw, &mass * q, xs, law)?;
    }
    xs.remove(u);
    Ok(())
}
