use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdnavail_core::structure::*;
use sdnavail_core::topology::*;

fn case(c: i64) -> Topology {
    apply_case(&build_reference_backbone(), CaseId::new(c).unwrap()).unwrap()
}

fn sdn_diagram(c: i64) -> &'static FactoringDiagram {
    static DIAGRAMS: OnceLock<Vec<FactoringDiagram>> = OnceLock::new();
    let all = DIAGRAMS.get_or_init(|| (1..=8).map(|c| FactoringDiagram::compile(&case(c), EvalMode::Sdn).unwrap()).collect());
    &all[c as usize - 1]
}

fn modes() -> [EvalMode; 2] {
    [EvalMode::Sdn, EvalMode::Traditional]
}

/// Operational predicate straight from the definition, by transitive closure.
fn oracle_operational(t: &Topology, s: &StatusAssignment, mode: EvalMode) -> bool {
    let nodes = t.nodes();
    let n = nodes.len();
    let pos: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, x)| (x.id.as_str(), i)).collect();
    let up = |id: &str| s.get(id).unwrap_or(true);
    let closure = |keep: &dyn Fn(usize) -> bool| {
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = keep(i);
        }
        for l in t.links() {
            let (a, b) = (pos[l.a.as_str()], pos[l.b.as_str()]);
            if keep(a) && keep(b) && (l.perfect || up(&l.id)) {
                r[a][b] = true;
                r[b][a] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        r[i][j] |= r[k][j];
                    }
                }
            }
        }
        r
    };
    let node_up = |i: usize| !nodes[i].is_failable() || up(&nodes[i].id);
    let usable: Vec<bool> = match mode {
        EvalMode::Traditional => (0..n)
            .map(|i| nodes[i].kind != NodeKind::Controller && node_up(i))
            .collect(),
        EvalMode::Sdn => {
            let r = closure(&node_up);
            (0..n)
                .map(|i| match nodes[i].kind {
                    NodeKind::AccessTerminal => true,
                    NodeKind::Controller => false,
                    NodeKind::Forwarding => (0..n).any(|c| nodes[c].kind == NodeKind::Controller && r[i][c]),
                })
                .collect()
        }
    };
    let r = closure(&|i| usable[i]);
    let terms: Vec<usize> = (0..n).filter(|&i| nodes[i].kind == NodeKind::AccessTerminal).collect();
    terms.iter().all(|&a| terms.iter().all(|&b| r[a][b]))
}

fn random_status(t: &Topology, rng: &mut impl Rng, p_up: f64) -> StatusAssignment {
    let mut s = StatusAssignment::all_up(t);
    for id in t.failable_ids() {
        s.set(id, rng.gen_bool(p_up));
    }
    s
}

/// Random map with at most `max_free` components strictly inside (0, 1).
fn pinned_map(t: &Topology, rng: &mut impl Rng, max_free: usize) -> AvailabilityMap {
    let mut ids = t.failable_ids();
    for i in (1..ids.len()).rev() {
        ids.swap(i, rng.gen_range(0..=i));
    }
    let mut m = AvailabilityMap::new();
    for (k, id) in ids.into_iter().enumerate() {
        let v = if k < max_free {
            rng.gen_range(0.0..1.0)
        } else if rng.gen_bool(0.85) {
            1.0
        } else {
            0.0
        };
        m.insert(id, v);
    }
    m
}

/// s, a, b, t forwarding nodes in a bridge, terminals on s and t, one
/// controller homed to s and t: 12 failable components.
fn bridge() -> Topology {
    let f = NodeKind::Forwarding;
    Topology::new(
        vec![
            Node::new("X", "P", NodeKind::AccessTerminal),
            Node::new("Y", "Q", NodeKind::AccessTerminal),
            Node::new("S", "P", f),
            Node::new("A", "P", f),
            Node::new("B", "Q", f),
            Node::new("T", "Q", f),
            Node::new("C", "P", NodeKind::Controller),
        ],
        vec![
            Link::new("X-S", "X", "S", true),
            Link::new("Y-T", "Y", "T", true),
            Link::new("S-A", "S", "A", false),
            Link::new("S-B", "S", "B", false),
            Link::new("A-B", "A", "B", false),
            Link::new("A-T", "A", "T", false),
            Link::new("B-T", "B", "T", false),
            Link::new("C-S", "C", "S", false),
            Link::new("C-T", "C", "T", false),
        ],
    )
}

#[test]
fn predicate_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for c in 1..=8 {
        let t = case(c);
        for mode in modes() {
            for i in 0..400 {
                let s = random_status(&t, &mut rng, if i % 2 == 0 { 0.9 } else { 0.6 });
                assert_eq!(is_operational(&t, &s, mode).unwrap(), oracle_operational(&t, &s, mode), "case {c} {mode:?} {s:?}");
            }
        }
    }
}

#[test]
fn bridge_closed_form() {
    let t = bridge();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let p: BTreeMap<&str, f64> = ["S-A", "S-B", "A-B", "A-T", "B-T"].into_iter().map(|id| (id, rng.gen())).collect();
        let m = AvailabilityMap::from_fn(&t, |id| p.get(id).copied().unwrap_or(1.0));
        let q = |id: &str| 1.0 - p[id];
        let expected = p["A-B"] * (1.0 - q("S-A") * q("S-B")) * (1.0 - q("A-T") * q("B-T"))
            + q("A-B") * (1.0 - (1.0 - p["S-A"] * p["A-T"]) * (1.0 - p["S-B"] * p["B-T"]));
        for mode in modes() {
            let v = evaluate_exact(&t, &m, mode).unwrap();
            assert!((v - expected).abs() < 1e-12, "{v} vs {expected}");
        }
    }
}

#[test]
fn bridge_exact_equals_bruteforce() {
    let t = bridge();
    assert_eq!(t.failable_ids().len(), 12);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..60 {
        let m = AvailabilityMap::from_fn(&t, |_| rng.gen());
        for mode in modes() {
            let (e, b) = (evaluate_exact(&t, &m, mode).unwrap(), evaluate_bruteforce(&t, &m, mode).unwrap());
            assert!((e - b).abs() < 1e-12);
        }
    }
}

#[test]
fn counterexample_for_non_nested_cases() {
    // Case 8's homing links unreliable, case 1's lone homing link reliable.
    let m = |t: &Topology| {
        AvailabilityMap::from_fn(t, |id| if id == "SC1-TRD_1" || id == "SC1-OSL1_1" { 0.01 } else { 0.99 })
    };
    let u = |c| 1.0 - evaluate_exact(&case(c), &m(&case(c)), EvalMode::Sdn).unwrap();
    assert!(u(8) > u(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_equals_bruteforce_on_pinned_maps(c in 1i64..=8, seed in any::<u64>()) {
        let t = case(c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = pinned_map(&t, &mut rng, 14);
        for mode in modes() {
            let d = FactoringDiagram::compile(&t, mode).unwrap();
            let (a, u) = d.evaluate(&m).unwrap();
            let b = evaluate_bruteforce(&t, &m, mode).unwrap();
            prop_assert!((a - b).abs() <= 1e-12, "case {} {:?}: {} vs {}", c, mode, a, b);
            prop_assert!((a + u - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn coherent_under_up_flips(c in 1i64..=8, seed in any::<u64>()) {
        let t = case(c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids = t.failable_ids();
        for mode in modes() {
            for _ in 0..50 {
                let mut s = random_status(&t, &mut rng, 0.8);
                let before = is_operational(&t, &s, mode).unwrap();
                s.set(ids[rng.gen_range(0..ids.len())], true);
                prop_assert!(!before || is_operational(&t, &s, mode).unwrap());
            }
        }
    }

    #[test]
    fn sdn_up_implies_traditional_up(c in 1i64..=8, seed in any::<u64>()) {
        let t = case(c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let s = random_status(&t, &mut rng, 0.7);
            if is_operational(&t, &s, EvalMode::Sdn).unwrap() {
                prop_assert!(is_operational(&t, &s, EvalMode::Traditional).unwrap());
            }
        }
    }

    #[test]
    fn nested_cases_ordered_on_any_map(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = BTreeMap::new();
        let u = |c: i64, values: &mut BTreeMap<String, f64>, rng: &mut ChaCha8Rng| {
            let t = case(c);
            let m = AvailabilityMap::from_fn(&t, |id| *values.entry(id.to_string()).or_insert_with(|| rng.gen()));
            sdn_diagram(c).evaluate(&m).unwrap().1
        };
        let us: Vec<f64> = (1..=8).map(|c| u(c, &mut values, &mut rng)).collect();
        let geq = |x: usize, y: usize| us[x - 1] >= us[y - 1] - 1e-12;
        prop_assert!(geq(3, 4) && geq(4, 5) && geq(3, 6) && geq(6, 7) && geq(8, 3), "{:?}", us);
    }

    #[test]
    fn all_cases_ordered_on_class_maps(link in 0.0f64..1.0, node in 0.0f64..1.0, ctrl in 0.0f64..1.0) {
        let us: Vec<f64> = (1..=8)
            .map(|c| {
                let t = case(c);
                let m = AvailabilityMap::from_fn(&t, |id| match t.node(id).map(|n| n.kind) {
                    Some(NodeKind::Controller) => ctrl,
                    Some(_) => node,
                    None => link,
                });
                sdn_diagram(c).evaluate(&m).unwrap().1
            })
            .collect();
        let geq = |x: usize, y: usize| us[x - 1] >= us[y - 1] - 1e-12;
        prop_assert!(geq(1, 8) && geq(2, 3) && geq(3, 4) && geq(4, 5) && geq(3, 6) && geq(6, 7), "{:?}", us);
    }
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let t = case(3);
    let m = AvailabilityMap::uniform(&t, 0.9);
    let exact = evaluate_exact(&t, &m, EvalMode::Sdn).unwrap();
    let e = evaluate_monte_carlo(&t, &m, EvalMode::Sdn, 200_000, 1).unwrap();
    let (lo, hi) = e.interval(4.0);
    assert!(lo <= exact && exact <= hi, "{exact} outside [{lo}, {hi}]");
}

#[test]
fn common_random_numbers_preserve_nesting() {
    let (t3, t7) = (case(3), case(7));
    let m7 = AvailabilityMap::uniform(&t7, 0.8);
    let m3 = AvailabilityMap::from_fn(&t3, |id| m7.get(id).unwrap());
    for seed in 0..5 {
        let a3 = evaluate_monte_carlo(&t3, &m3, EvalMode::Sdn, 50_000, seed).unwrap();
        let a7 = evaluate_monte_carlo(&t7, &m7, EvalMode::Sdn, 50_000, seed).unwrap();
        assert!(a7.successes >= a3.successes);
    }
}
