//! Multi-threaded Monte Carlo. Chunks are summed as integers, so the result is
//! bit-identical to the sequential run for any thread count.

use rayon::prelude::*;
use sdnavail_core::structure::{EstimateWithCI, MonteCarloPlan, StructureError};

pub fn run_monte_carlo(plan: &MonteCarloPlan, samples: u64, seed: u64) -> Result<EstimateWithCI, StructureError> {
    if samples == 0 {
        return Err(StructureError::NoSamples);
    }
    let ok = (0..MonteCarloPlan::chunk_count(samples))
        .into_par_iter()
        .map(|c| plan.run_chunk(seed, c, samples))
        .sum();
    Ok(EstimateWithCI::from_counts(ok, samples, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sdnavail_core::structure::{AvailabilityMap, EvalMode, MC_CHUNK};
    use sdnavail_core::topology::build_reference_backbone;

    #[test]
    fn matches_sequential() {
        let t = build_reference_backbone();
        let plan = MonteCarloPlan::new(&t, &AvailabilityMap::uniform(&t, 0.9), EvalMode::Sdn).unwrap();
        let samples = 3 * MC_CHUNK + 17;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let par = pool.install(|| run_monte_carlo(&plan, samples, 21)).unwrap();
        assert_eq!(par, plan.run(samples, 21).unwrap());
    }
}
