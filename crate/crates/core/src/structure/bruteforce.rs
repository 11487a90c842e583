use alloc::vec::Vec;

use super::{AvailabilityMap, CompensatedSum, EvalMode, StructureError, SystemGraph};
use crate::topology::Topology;

/// Maximum number of free components [`evaluate_bruteforce`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// System availability as the sum over every up/down assignment of the
/// predicate times the assignment probability.
///
/// Components with availability exactly 0 or 1 are held at that state: their
/// opposite state has weight zero, so leaving them out of the enumeration does
/// not change the sum. Only the remaining "free" components count against
/// [`BRUTE_FORCE_LIMIT`].
pub fn evaluate_bruteforce(t: &Topology, a: &AvailabilityMap, mode: EvalMode) -> Result<f64, StructureError> {
    let g = SystemGraph::new(t, mode)?;
    let probs = a.to_vector(&g)?;
    let free: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0 && probs[i] < 1.0).collect();
    if free.len() > BRUTE_FORCE_LIMIT {
        return Err(StructureError::TooLarge { free: free.len(), limit: BRUTE_FORCE_LIMIT });
    }
    let mut up: Vec<bool> = probs.iter().map(|&p| p >= 1.0).collect();
    let mut scratch = g.scratch();
    let mut total = CompensatedSum::default();

    for mask in 0u64..(1u64 << free.len()) {
        let mut weight = 1.0;
        for (bit, &c) in free.iter().enumerate() {
            let is_up = mask >> bit & 1 == 1;
            up[c] = is_up;
            weight *= if is_up { probs[c] } else { 1.0 - probs[c] };
        }
        if g.is_up(&up, &mut scratch) {
            total.add(weight);
        }
    }
    Ok(total.value().clamp(0.0, 1.0))
}
