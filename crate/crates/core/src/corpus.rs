//! Seeded random transducers for property tests: complete, finally
//! connected and finally aperiodic, with small rational labels.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{final_component, period, StateId, Transducer, Transition};
use crate::rational::{self, Rational};

/// How transition outputs are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputShape {
    /// Independent small rationals.
    Free,
    /// `k + p(to) - p(from)`: bounded output variance.
    Coboundary,
    /// `a + b * input + p(to) - p(from)`: rank-one covariance.
    Affine,
    /// Independent draws from `{0, 1}`.
    ZeroOne,
    /// At each state the outputs are a permutation of the input alphabet,
    /// so swapping input and output labels stays deterministic.
    Permutation,
    /// Cycle through the shapes above by seed.
    Mixed,
}

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub max_states: usize,
    pub max_alphabet: usize,
    /// Numerators are drawn from `-max_numerator..=max_numerator`.
    pub max_numerator: i64,
    pub max_denominator: i64,
    /// Require the whole machine to be strongly connected.
    pub strongly_connected: bool,
    pub outputs: OutputShape,
    /// Random final outputs instead of zeros.
    pub final_outputs: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_states: 5,
            max_alphabet: 3,
            max_numerator: 3,
            max_denominator: 2,
            strongly_connected: false,
            outputs: OutputShape::Mixed,
            final_outputs: true,
        }
    }
}

fn small(rng: &mut ChaCha8Rng, config: &CorpusConfig) -> Rational {
    let p = rng.random_range(-config.max_numerator..=config.max_numerator);
    let q = rng.random_range(1..=config.max_denominator.max(1));
    rational::frac(p, q)
}

fn alphabet(rng: &mut ChaCha8Rng, k: usize, config: &CorpusConfig) -> Vec<Rational> {
    if rng.random_bool(0.5) {
        return (0..k as i64).map(rational::int).collect();
    }
    let mut letters: Vec<Rational> = Vec::with_capacity(k);
    while letters.len() < k {
        let e = small(rng, config);
        if !letters.contains(&e) {
            letters.push(e);
        }
    }
    letters
}

fn candidate(rng: &mut ChaCha8Rng, config: &CorpusConfig, shape: OutputShape) -> Option<Transducer> {
    let n = rng.random_range(1..=config.max_states.max(1));
    let k = rng.random_range(2..=config.max_alphabet.max(2));
    let letters = alphabet(rng, k, config);
    let potential: Vec<Rational> = (0..=n).map(|_| small(rng, config)).collect();
    let (a, b) = (small(rng, config), small(rng, config));

    let mut transitions = Vec::with_capacity(n * k);
    for from in 1..=n {
        let mut permuted = letters.clone();
        permuted.shuffle(rng);
        for (j, input) in letters.iter().enumerate() {
            let to: StateId = rng.random_range(1..=n);
            let drift = &potential[to] - &potential[from];
            let output = match shape {
                OutputShape::Free | OutputShape::Mixed => small(rng, config),
                OutputShape::Coboundary => &a + drift,
                OutputShape::Affine => &a + &b * input + drift,
                OutputShape::ZeroOne => rational::int(rng.random_range(0..=1)),
                OutputShape::Permutation => permuted[j].clone(),
            };
            transitions.push(Transition::new(from, to, input.clone(), output));
        }
    }
    let finals: BTreeMap<StateId, Rational> = if config.final_outputs {
        (1..=n).map(|s| (s, small(rng, config))).collect()
    } else {
        BTreeMap::new()
    };
    let t = Transducer::new(n, transitions, finals, Some(letters)).ok()?;
    let fc = final_component(&t).ok()?;
    if period(&fc) != 1 || (config.strongly_connected && fc.n() != n) {
        return None;
    }
    Some(t)
}

fn shape_for(seed: u64, shape: OutputShape) -> OutputShape {
    const CYCLE: [OutputShape; 5] = [
        OutputShape::Free,
        OutputShape::Coboundary,
        OutputShape::Free,
        OutputShape::Affine,
        OutputShape::ZeroOne,
    ];
    match shape {
        OutputShape::Mixed => CYCLE[(seed % CYCLE.len() as u64) as usize],
        other => other,
    }
}

/// A valid transducer determined by `seed`; candidates are drawn until one
/// is finally connected and finally aperiodic.
pub fn random_transducer(seed: u64, config: &CorpusConfig) -> Transducer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = shape_for(seed, config.outputs);
    loop {
        if let Some(t) = candidate(&mut rng, config, shape) {
            return t;
        }
    }
}

/// `count` transducers for seeds `first..first + count`.
pub fn corpus(first: u64, count: usize, config: &CorpusConfig) -> Vec<Transducer> {
    (first..first + count as u64)
        .map(|seed| random_transducer(seed, config))
        .collect()
}
