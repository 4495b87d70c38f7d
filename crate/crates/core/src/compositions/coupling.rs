use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand_chacha::rand_core::RngCore;

use crate::error::{domain, Error, Result};
use crate::rational::Q;
use crate::sampling::{bernoulli, Threshold};

use super::composition::{satisfies_arith, ArithClass, Composition, Move};
use super::partition::{check_horizon, first_part_law_at, CompositionTables, PartitionSource, StepLaw};
use super::weights::WeightPair;

/// Transition of the shared-uniform monotone coupling between two first-part laws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepKernel {
    pub d: u32,
    /// `advance[j]`: probability that part `jd + 1` grows by `d`; `None` off the support.
    advance: Vec<Option<Q>>,
}

impl StepKernel {
    pub fn advance(&self, j: usize) -> Option<&Q> {
        self.advance.get(j).and_then(|q| q.as_ref())
    }

    /// `part ↦ (stay, advance)` on the support.
    pub fn rows(&self) -> BTreeMap<u32, (Q, Q)> {
        self.advance
            .iter()
            .enumerate()
            .filter_map(|(j, q)| {
                q.as_ref()
                    .map(|q| (j as u32 * self.d + 1, (Q::one() - q, q.clone())))
            })
            .collect()
    }
}

fn max(a: Q, b: Q) -> Q {
    if a >= b {
        a
    } else {
        b
    }
}

/// `q(j → j+1) = (F_n(j) − max(F_n(j−1), F_{n+1}(j)))⁺ / μ_n(j)` after checking
/// `μ_{n+1}(j) ≤ μ_n(j) ≥ μ_{n+1}(j+1)`.
pub fn monotone_step_kernel(mu_n: &StepLaw, mu_n1: &StepLaw) -> Result<StepKernel> {
    if mu_n.d != mu_n1.d {
        return domain("step laws use different d");
    }
    let d = mu_n.d;
    let fail = |j: usize, detail: String| Error::NotCoupleable {
        shift: 0,
        total: mu_n.total,
        index: j * d as usize + 1,
        detail,
    };
    let len = mu_n.masses().len();
    for (j, q) in mu_n1.masses().iter().enumerate().skip(len + 1) {
        if !q.is_zero() {
            return Err(fail(j, format!("the larger law puts mass {q} beyond the reachable parts")));
        }
    }
    for j in 0..len {
        let here = mu_n.at(j);
        if mu_n1.at(j) > here {
            return Err(fail(j, format!("mu_next({}) = {} exceeds mu({}) = {}", j, mu_n1.at(j), j, here)));
        }
        if here < mu_n1.at(j + 1) {
            return Err(fail(j, format!("mu({}) = {} is below mu_next({}) = {}", j, here, j + 1, mu_n1.at(j + 1))));
        }
    }
    let mut advance = Vec::with_capacity(len);
    let mut f_prev = Q::zero();
    let mut f_next = Q::zero();
    for j in 0..len {
        let mass = mu_n.at(j);
        let f_here = &f_prev + &mass;
        f_next += mu_n1.at(j);
        if mass.is_zero() {
            advance.push(None);
        } else {
            let gap = &f_here - max(f_prev.clone(), f_next.clone());
            let q = if gap > Q::zero() { gap / &mass } else { Q::zero() };
            advance.push(Some(q));
        }
        f_prev = f_here;
    }
    Ok(StepKernel { d, advance })
}

/// Step kernels for every shift and total of a partition source, and the
/// recursive composition coupling built on them.
pub struct CompositionCoupling<S> {
    source: S,
    kernels: HashMap<(usize, usize), std::result::Result<(StepKernel, Vec<Option<Threshold>>), Error>>,
}

impl<S: PartitionSource> CompositionCoupling<S> {
    pub fn new(source: S) -> Self {
        let cls = source.class();
        let d = cls.d as usize;
        let mut kernels = HashMap::new();
        for shift in 0..=source.top_shift() {
            let c = cls.shifted(shift);
            let mut total = c.s as usize;
            while total + d <= source.horizon() {
                if total > 0 {
                    let entry = Self::build(&source, shift, total);
                    kernels.insert((shift, total), entry);
                }
                total += d;
            }
        }
        CompositionCoupling { source, kernels }
    }

    fn build(source: &S, shift: usize, total: usize) -> Result<(StepKernel, Vec<Option<Threshold>>)> {
        let mu = first_part_law_at(source, shift, total)?;
        let mu_next = first_part_law_at(source, shift, total + source.class().d as usize)?;
        let k = monotone_step_kernel(&mu, &mu_next).map_err(|e| match e {
            Error::NotCoupleable { index, detail, .. } => Error::NotCoupleable {
                shift,
                total,
                index,
                detail,
            },
            other => other,
        })?;
        let thresholds = k
            .advance
            .iter()
            .map(|q| q.as_ref().map(|q| Threshold::new(q.clone())).transpose())
            .collect::<Result<_>>()?;
        Ok((k, thresholds))
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn d(&self) -> u32 {
        self.source.class().d
    }

    fn kernel(&self, shift: usize, total: usize) -> Result<&(StepKernel, Vec<Option<Threshold>>)> {
        check_horizon(total + self.d() as usize, self.source.horizon())?;
        match self.kernels.get(&(shift, total)) {
            Some(Ok(k)) => Ok(k),
            Some(Err(e)) => Err(e.clone()),
            None => Err(Error::ZeroMass(format!("no mass at shift {shift}, total {total}"))),
        }
    }

    /// The step kernel at a given shift and total.
    pub fn step_kernel(&self, shift: usize, total: usize) -> Result<&StepKernel> {
        self.kernel(shift, total).map(|(k, _)| k)
    }

    fn check_state(&self, c: &Composition) -> Result<()> {
        if !satisfies_arith(c, self.source.class()) {
            return domain(format!("{c} violates the class {}", self.source.class()));
        }
        Ok(())
    }

    /// Law of the covering move taken from `c`.
    pub fn move_law(&self, c: &Composition) -> Result<Vec<(Move, Q)>> {
        self.check_state(c)?;
        self.moves_from(0, c.total(), c.parts())
    }

    fn moves_from(&self, shift: usize, total: usize, parts: &[u32]) -> Result<Vec<(Move, Q)>> {
        let Some(&m) = parts.first() else {
            debug_assert_eq!(total, 0);
            return Ok(vec![(Move::Append, Q::one())]);
        };
        let (k, _) = self.kernel(shift, total)?;
        let j = ((m - 1) / self.d()) as usize;
        let adv = k.advance(j).cloned().ok_or_else(|| {
            Error::ZeroMass(format!("first part {m} has no mass at shift {shift}, total {total}"))
        })?;
        let stay = Q::one() - &adv;
        let mut out = Vec::new();
        if !adv.is_zero() {
            out.push((Move::Increment(0), adv));
        }
        if !stay.is_zero() {
            for (mv, p) in self.moves_from(shift + 1, total - m as usize, &parts[1..])? {
                let mv = match mv {
                    Move::Increment(i) => Move::Increment(i + 1),
                    Move::Append => Move::Append,
                };
                out.push((mv, &stay * p));
            }
        }
        Ok(out)
    }

    /// `K(c, ·)` as a law on compositions.
    pub fn kernel_row(&self, c: &Composition) -> Result<BTreeMap<Composition, Q>> {
        let d = self.d();
        let mut row = BTreeMap::new();
        for (mv, p) in self.move_law(c)? {
            let prev = row.insert(c.apply(mv, d), p);
            assert!(prev.is_none(), "distinct covering moves gave the same composition");
        }
        Ok(row)
    }

    /// Draws one covering move from `c`, deciding level by level.
    pub fn sample_move<R: RngCore>(&self, c: &Composition, rng: &mut R) -> Result<Move> {
        let d = self.d();
        let mut total = c.total();
        for (i, &m) in c.parts().iter().enumerate() {
            let (_, thresholds) = self.kernel(i, total)?;
            let j = ((m - 1) / d) as usize;
            let t = thresholds.get(j).and_then(|t| t.as_ref()).ok_or_else(|| {
                Error::ZeroMass(format!("first part {m} has no mass at shift {i}, total {total}"))
            })?;
            if bernoulli(t, rng) {
                return Ok(Move::Increment(i));
            }
            total -= m as usize;
        }
        Ok(Move::Append)
    }

    /// A realization `C_s ≺^d C_{s+d} ≺^d …` up to total at most `horizon`.
    pub fn sample_chain<R: RngCore>(&self, horizon: usize, rng: &mut R) -> Result<Vec<Composition>> {
        let cls = self.source.class();
        let mut c = Composition::ones(cls.s as usize);
        let mut chain = vec![c.clone()];
        while c.total() + cls.d as usize <= horizon {
            let mv = self.sample_move(&c, rng)?;
            c = c.apply(mv, cls.d);
            chain.push(c.clone());
        }
        Ok(chain)
    }
}

/// Exact law of `C_{n+d}` given `C_n = c` under the recursive coupling.
pub fn composition_kernel(
    wp: &WeightPair,
    cls: ArithClass,
    n: usize,
    c: &Composition,
) -> Result<BTreeMap<Composition, Q>> {
    if cls != wp.class() {
        return domain(format!("weight pair has class {}, not {cls}", wp.class()));
    }
    if c.total() != n {
        return domain(format!("{c} is not a composition of {n}"));
    }
    let coupling = CompositionCoupling::new(CompositionTables::new(wp, n + cls.d as usize)?);
    coupling.kernel_row(c)
}

/// `C_s ≺^d C_{d+s} ≺^d …` up to total `horizon`.
pub fn sample_composition_chain<R: RngCore>(
    wp: &WeightPair,
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<Composition>> {
    let coupling = CompositionCoupling::new(CompositionTables::new(wp, horizon)?);
    coupling.sample_chain(horizon, rng)
}
