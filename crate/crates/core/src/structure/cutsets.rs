use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{EvalMode, StructureError, SystemGraph};
use crate::topology::Topology;

/// All minimal cut sets with at most `max_order` components, each sorted by
/// id, ordered by size and then lexicographically.
///
/// Subsets are enumerated by increasing size; any superset of a cut already
/// found is skipped, so every reported set has no cutting proper subset.
pub fn minimal_cut_sets(t: &Topology, mode: EvalMode, max_order: usize) -> Result<Vec<Vec<String>>, StructureError> {
    let g = SystemGraph::new(t, mode)?;
    let n = g.component_count();
    let candidates: Vec<usize> = (0..n).filter(|&c| !g.is_ignored(c)).collect();
    let mut scratch = g.scratch();
    let mut up = vec![true; n];
    let mut found: Vec<Vec<usize>> = Vec::new();

    if !g.is_up(&up, &mut scratch) {
        // Already down with everything up: the empty set is the only minimal cut.
        return Ok(vec![Vec::new()]);
    }

    for order in 1..=max_order.min(candidates.len()) {
        let mut picks: Vec<usize> = (0..order).collect();
        loop {
            let set: Vec<usize> = picks.iter().map(|&i| candidates[i]).collect();
            let contains_cut = found.iter().any(|cut| cut.iter().all(|c| set.contains(c)));
            if !contains_cut {
                for &c in &set {
                    up[c] = false;
                }
                if !g.is_up(&up, &mut scratch) {
                    found.push(set.clone());
                }
                for &c in &set {
                    up[c] = true;
                }
            }
            // Next combination in lexicographic order.
            let k = candidates.len();
            let Some(i) = (0..order).rev().find(|&i| picks[i] < k - order + i) else {
                break;
            };
            picks[i] += 1;
            for j in i + 1..order {
                picks[j] = picks[j - 1] + 1;
            }
        }
    }

    let ids = g.component_ids();
    let mut out: Vec<Vec<String>> = found
        .into_iter()
        .map(|set| {
            let mut names: Vec<String> = set.into_iter().map(|c| ids[c].clone()).collect();
            names.sort();
            names
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{is_operational, StatusAssignment};
    use crate::topology::{apply_case, build_reference_backbone, CaseId};
    use alloc::string::ToString;

    fn case(c: i64) -> Topology {
        apply_case(&build_reference_backbone(), CaseId::new(c).unwrap()).unwrap()
    }

    #[test]
    fn single_controller_is_a_cut() {
        let cuts = minimal_cut_sets(&case(8), EvalMode::Sdn, 1).unwrap();
        assert!(cuts.contains(&vec!["SC1".to_string()]));
    }

    #[test]
    fn redundant_controllers_are_not_cuts() {
        let cuts = minimal_cut_sets(&case(3), EvalMode::Sdn, 1).unwrap();
        assert!(!cuts.iter().any(|c| c.iter().any(|id| id.starts_with("SC"))));
        let cuts = minimal_cut_sets(&case(3), EvalMode::Sdn, 2).unwrap();
        assert!(cuts.contains(&vec!["SC1".to_string(), "SC2".to_string()]));
    }

    #[test]
    fn traditional_ignores_controllers() {
        let cuts = minimal_cut_sets(&case(8), EvalMode::Traditional, 2).unwrap();
        assert!(!cuts.iter().flatten().any(|id| id.starts_with("SC")));
        assert!(cuts.contains(&vec!["BRG_1".to_string(), "BRG_2".to_string()]));
    }

    #[test]
    fn cuts_are_minimal_and_sorted() {
        let t = case(1);
        let cuts = minimal_cut_sets(&t, EvalMode::Sdn, 2).unwrap();
        for cut in &cuts {
            let ids: Vec<&str> = cut.iter().map(String::as_str).collect();
            assert!(!is_operational(&t, &StatusAssignment::with_down(&t, &ids), EvalMode::Sdn).unwrap());
            for skip in 0..ids.len() {
                let mut rest = ids.clone();
                rest.remove(skip);
                assert!(is_operational(&t, &StatusAssignment::with_down(&t, &rest), EvalMode::Sdn).unwrap());
            }
        }
        for w in cuts.windows(2) {
            assert!((w[0].len(), &w[0]) < (w[1].len(), &w[1]));
        }
        assert_eq!(cuts[0].len(), 1);
    }
}
