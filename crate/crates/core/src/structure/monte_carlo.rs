//! Crude Monte Carlo estimate of system availability.
//!
//! Every component draws from its own ChaCha8 stream, selected by a hash of
//! the component id, at word position given by the sample index. Two
//! topologies sampled with the same seed therefore see the same up/down state
//! for every component they share (common random numbers), and samples can be
//! processed in any chunking without changing the result.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AvailabilityMap, EvalMode, StructureError, SystemGraph};
use crate::topology::Topology;

/// Samples per chunk; chunks are the unit of (parallel) work.
pub const MC_CHUNK: u64 = 1 << 16;
/// Two-sided normal quantiles.
pub const Z_95: f64 = 1.959_963_984_540_054;
pub const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub estimate: f64,
    pub std_error: f64,
    /// 95% normal-approximation interval, clipped to [0, 1].
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: u64,
    pub successes: u64,
}

impl EstimateWithCI {
    pub fn from_counts(successes: u64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let estimate = successes as f64 / n;
        let std_error = libm::sqrt(estimate * (1.0 - estimate) / n);
        let (ci_low, ci_high) = interval(estimate, std_error, Z_95);
        EstimateWithCI { estimate, std_error, ci_low, ci_high, samples, seed, successes }
    }

    /// Normal-approximation interval `estimate +- z * std_error`, clipped.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        interval(self.estimate, self.std_error, z)
    }

    /// Same estimate expressed for the complementary event (unavailability).
    pub fn complement(&self) -> Self {
        EstimateWithCI::from_counts(self.samples - self.successes, self.samples, self.seed)
    }
}

fn interval(estimate: f64, se: f64, z: f64) -> (f64, f64) {
    ((estimate - z * se).max(0.0), (estimate + z * se).min(1.0))
}

/// 64-bit FNV-1a.
fn stream_key(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// A topology and availability map ready for sampling.
#[derive(Debug, Clone)]
pub struct MonteCarloPlan {
    graph: SystemGraph,
    probs: Vec<f64>,
    keys: Vec<u64>,
}

impl MonteCarloPlan {
    pub fn new(t: &Topology, a: &AvailabilityMap, mode: EvalMode) -> Result<Self, StructureError> {
        let graph = SystemGraph::new(t, mode)?;
        let probs = a.to_vector(&graph)?;
        let keys = graph.component_ids().iter().map(|id| stream_key(id)).collect();
        Ok(MonteCarloPlan { graph, probs, keys })
    }

    pub fn chunk_count(samples: u64) -> u64 {
        samples.div_ceil(MC_CHUNK)
    }

    /// Number of operational samples in chunk `chunk` of a run of `samples`.
    pub fn run_chunk(&self, seed: u64, chunk: u64, samples: u64) -> u64 {
        let start = chunk * MC_CHUNK;
        let len = samples.saturating_sub(start).min(MC_CHUNK);
        let mut streams: Vec<Option<ChaCha8Rng>> = self
            .probs
            .iter()
            .zip(&self.keys)
            .map(|(&p, &key)| {
                // Degenerate components need no draws: u < 1 always, u < 0 never.
                (p > 0.0 && p < 1.0).then(|| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(key);
                    // One f64 consumes one u64, i.e. two 32-bit words.
                    rng.set_word_pos(2 * start as u128);
                    rng
                })
            })
            .collect();
        let mut up: Vec<bool> = self.probs.iter().map(|&p| p >= 1.0).collect();
        let mut scratch = self.graph.scratch();
        let mut ok = 0;
        for _ in 0..len {
            for (c, rng) in streams.iter_mut().enumerate() {
                if let Some(rng) = rng {
                    up[c] = rng.gen::<f64>() < self.probs[c];
                }
            }
            if self.graph.is_up(&up, &mut scratch) {
                ok += 1;
            }
        }
        ok
    }

    pub fn run(&self, samples: u64, seed: u64) -> Result<EstimateWithCI, StructureError> {
        if samples == 0 {
            return Err(StructureError::NoSamples);
        }
        let ok = (0..Self::chunk_count(samples)).map(|c| self.run_chunk(seed, c, samples)).sum();
        Ok(EstimateWithCI::from_counts(ok, samples, seed))
    }
}

/// Monte Carlo availability estimate with a 95% confidence interval.
/// Identical inputs give bit-identical output.
pub fn evaluate_monte_carlo(
    t: &Topology,
    a: &AvailabilityMap,
    mode: EvalMode,
    samples: u64,
    seed: u64,
) -> Result<EstimateWithCI, StructureError> {
    MonteCarloPlan::new(t, a, mode)?.run(samples, seed)
}
