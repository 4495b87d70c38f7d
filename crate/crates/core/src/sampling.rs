//! Seed derivation and exact sampling against rational thresholds.
//!
//! A uniform variate is represented by its binary expansion, drawn 64 bits at
//! a time and only as far as needed to decide a comparison with an exact
//! rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{domain, Result};
use crate::rational::Q;

/// A 256-bit key from which independent streams are derived by purpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed([u8; 32]);

impl Seed {
    pub fn master(seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"treegrow/master");
        h.update(seed.to_le_bytes());
        Seed(h.finalize().into())
    }

    pub fn derive(&self, purpose: &str) -> Self {
        self.derive_bytes(purpose, &[])
    }

    pub fn derive_index(&self, purpose: &str, index: u64) -> Self {
        self.derive_bytes(purpose, &index.to_le_bytes())
    }

    pub fn derive_bytes(&self, purpose: &str, key: &[u8]) -> Self {
        let mut h = Sha256::new();
        h.update(self.0);
        h.update((purpose.len() as u64).to_le_bytes());
        h.update(purpose.as_bytes());
        h.update((key.len() as u64).to_le_bytes());
        h.update(key);
        Seed(h.finalize().into())
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::from_seed(self.0)
    }
}

/// A rational in [0, 1] together with `floor(t * 2^64)` for the fast path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    exact: Q,
    floor64: u128,
}

impl Threshold {
    pub fn new(t: Q) -> Result<Self> {
        if t.is_negative() || t > Q::one() {
            return domain(format!("threshold {t} outside [0, 1]"));
        }
        let scaled: BigInt = (t.numer() << 64usize).div_floor(t.denom());
        let floor64 = scaled.to_u128().expect("threshold fits in 65 bits");
        Ok(Threshold { exact: t, floor64 })
    }

    pub fn value(&self) -> &Q {
        &self.exact
    }
}

/// One uniform variate on [0, 1), revealed lazily.
pub struct LazyUniform<'a, R: RngCore> {
    rng: &'a mut R,
    words: Vec<u64>,
}

impl<'a, R: RngCore> LazyUniform<'a, R> {
    pub fn new(rng: &'a mut R) -> Self {
        LazyUniform {
            rng,
            words: Vec::new(),
        }
    }

    fn word(&mut self, i: usize) -> u64 {
        while self.words.len() <= i {
            self.words.push(self.rng.next_u64());
        }
        self.words[i]
    }

    /// Decides `U < t`.
    pub fn less_than(&mut self, t: &Threshold) -> bool {
        let w0 = self.word(0) as u128;
        if w0 < t.floor64 {
            return true;
        }
        if w0 > t.floor64 {
            return false;
        }
        self.less_than_slow(&t.exact)
    }

    fn less_than_slow(&mut self, t: &Q) -> bool {
        let mut prefix = BigInt::zero();
        let mut k = 0usize;
        loop {
            prefix = (prefix << 64usize) + BigInt::from(self.word(k));
            k += 1;
            let scale = BigInt::one() << (64 * k);
            let target = t.numer() * &scale;
            if (&prefix + 1u32) * t.denom() <= target {
                return true;
            }
            if &prefix * t.denom() >= target {
                return false;
            }
        }
    }
}

/// A finite law sampled exactly by inverting the cumulative distribution.
#[derive(Clone, Debug)]
pub struct ExactCategorical<T> {
    outcomes: Vec<T>,
    cumulative: Vec<Threshold>,
}

impl<T: Clone> ExactCategorical<T> {
    /// Masses must be nonnegative and sum to one; zero masses are dropped.
    pub fn new(masses: impl IntoIterator<Item = (T, Q)>) -> Result<Self> {
        let mut outcomes = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = Q::zero();
        for (x, p) in masses {
            if p.is_negative() {
                return domain("negative mass");
            }
            if p.is_zero() {
                continue;
            }
            acc += p;
            outcomes.push(x);
            cumulative.push(Threshold::new(acc.clone())?);
        }
        if !acc.is_one() {
            return domain(format!("masses sum to {acc}, not 1"));
        }
        Ok(ExactCategorical {
            outcomes,
            cumulative,
        })
    }

    pub fn outcomes(&self) -> &[T] {
        &self.outcomes
    }

    pub fn sample_index<R: RngCore>(&self, rng: &mut R) -> usize {
        if self.outcomes.len() == 1 {
            return 0;
        }
        let mut u = LazyUniform::new(rng);
        let last = self.outcomes.len() - 1;
        self.cumulative[..last].partition_point(|f| !u.less_than(f))
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> T {
        self.outcomes[self.sample_index(rng)].clone()
    }
}

/// Uniform on `0..n` by rejection, `n > 0`.
pub fn uniform_index<R: RngCore>(n: usize, rng: &mut R) -> usize {
    assert!(n > 0, "empty range");
    let n = n as u64;
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return (x % n) as usize;
        }
    }
}

/// Draws `true` with exact probability `p`.
pub fn bernoulli<R: RngCore>(p: &Threshold, rng: &mut R) -> bool {
    if p.exact.is_zero() {
        return false;
    }
    if p.exact.is_one() {
        return true;
    }
    LazyUniform::new(rng).less_than(p)
}
