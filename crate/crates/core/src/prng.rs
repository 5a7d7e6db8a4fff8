//! Chaotic-iteration generators driven by an inner random source.
//!
//! Both variants walk `b` steps in the iteration graph of `f` per output.
//! `Chi14` applies `F_f` at every step; `Chi16` first draws a gate bit and
//! only moves when it is set, which matches the lazy Markov chain.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ncube::{BooleanMap, Configuration};

/// Seedable stream of uniform indices and fair bits.
pub trait RandomSource {
    /// Uniform in `1..=n`.
    fn uniform_index(&mut self, n: usize) -> usize;
    fn uniform_bit(&mut self) -> bool;
}

/// Reference source: ChaCha8 keyed by a 64-bit seed, optionally on a
/// numbered stream so that independent sources can be derived from one seed.
#[derive(Clone, Debug)]
pub struct SeededSource(ChaCha8Rng);

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    pub fn uniform_word(&mut self, n_bits: usize) -> u64 {
        self.0.gen_range(0..1u64 << n_bits)
    }
}

impl RandomSource for SeededSource {
    fn uniform_index(&mut self, n: usize) -> usize {
        self.0.gen_range(1..=n)
    }

    fn uniform_bit(&mut self) -> bool {
        self.0.gen()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Draw {
    Index(usize),
    Bit(bool),
}

/// Replays a fixed list of draws. Panics when the consumer asks for a draw of
/// the wrong kind or runs past the end, which makes draw order testable.
#[derive(Clone, Debug, Default)]
pub struct ScriptedSource {
    script: VecDeque<Draw>,
}

impl ScriptedSource {
    pub fn new(script: impl IntoIterator<Item = Draw>) -> Self {
        Self {
            script: script.into_iter().collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.script.len()
    }
}

impl RandomSource for ScriptedSource {
    fn uniform_index(&mut self, n: usize) -> usize {
        match self.script.pop_front() {
            Some(Draw::Index(i)) => {
                assert!((1..=n).contains(&i), "scripted index {i} outside 1..={n}");
                i
            }
            other => panic!("expected an index draw, script has {other:?}"),
        }
    }

    fn uniform_bit(&mut self) -> bool {
        match self.script.pop_front() {
            Some(Draw::Bit(b)) => b,
            other => panic!("expected a bit draw, script has {other:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Chi14,
    Chi16,
}

pub struct GeneratorState<R> {
    f: BooleanMap,
    b: usize,
    x: u64,
    src: R,
    variant: Variant,
}

impl<R: RandomSource> GeneratorState<R> {
    pub fn new(
        f: BooleanMap,
        b: usize,
        x0: Configuration,
        src: R,
        variant: Variant,
    ) -> Result<Self> {
        if b == 0 {
            return Err(Error::Domain("walk length b must be at least 1".into()));
        }
        if x0.n_bits() != f.n_bits() {
            return Err(Error::DimensionMismatch {
                left: x0.n_bits(),
                right: f.n_bits(),
            });
        }
        Ok(Self {
            f,
            b,
            x: x0.word(),
            src,
            variant,
        })
    }

    pub fn n_bits(&self) -> usize {
        self.f.n_bits()
    }

    pub fn walk_length(&self) -> usize {
        self.b
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn current(&self) -> Configuration {
        Configuration::new(self.f.n_bits(), self.x).expect("state stays in range")
    }

    pub fn source(&self) -> &R {
        &self.src
    }

    /// Runs `b` steps of the configured variant and returns the final state.
    pub fn next_output(&mut self) -> Configuration {
        match self.variant {
            Variant::Chi14 => self.chi14_next(),
            Variant::Chi16 => self.chi16_next(),
        }
    }

    /// `b` times: `s <- uniform_index(N)`, `x <- F_f(x, s)`.
    pub fn chi14_next(&mut self) -> Configuration {
        let n = self.f.n_bits();
        for _ in 0..self.b {
            let s = self.src.uniform_index(n);
            self.x = self.f.step(self.x, s);
        }
        self.current()
    }

    /// `b` times: if `uniform_bit()` then `s <- uniform_index(N)`,
    /// `x <- F_f(x, s)`.
    pub fn chi16_next(&mut self) -> Configuration {
        let n = self.f.n_bits();
        for _ in 0..self.b {
            if self.src.uniform_bit() {
                let s = self.src.uniform_index(n);
                self.x = self.f.step(self.x, s);
            }
        }
        self.current()
    }

    /// Next `count` output bits, each output contributing its `N` bits
    /// MSB-first. A trailing partial output is truncated.
    pub fn stream_bits(&mut self, count: usize) -> Vec<bool> {
        let n = self.f.n_bits();
        let mut bits = Vec::with_capacity(count);
        while bits.len() < count {
            let word = self.next_output().word();
            let take = n.min(count - bits.len());
            bits.extend((0..take).map(|k| (word >> (n - 1 - k)) & 1 == 1));
        }
        bits
    }

    pub fn outputs(&mut self, count: usize) -> Vec<u64> {
        (0..count).map(|_| self.next_output().word()).collect()
    }
}

impl GeneratorState<SeededSource> {
    /// Generator whose start state is the first draw of its own source.
    pub fn seeded(f: BooleanMap, b: usize, seed: u64, variant: Variant) -> Result<Self> {
        let mut src = SeededSource::new(seed);
        let x0 = Configuration::new(f.n_bits(), src.uniform_word(f.n_bits()))?;
        Self::new(f, b, x0, src, variant)
    }
}
