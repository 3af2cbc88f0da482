//! Property tests against independent oracles: naive fixpoints for behavioural
//! relations, renaming for isomorphism, algebraic laws for composition and minor
//! removal, and round trips through process trees.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tjn::bisim::{strong_bisim, validate_partition, validate_weak_simulation, weak_bisim, weak_sim};
use tjn::discovery::{inductive_miner, tree_of_bordered_net, tree_to_term, tree_to_wfnet, ProcessTree};
use tjn::eventlog::{EventLog, Trace};
use tjn::iso::{invariant_key, net_isomorphic};
use tjn::lts::{Label, Lts};
use tjn::projection::{compose, is_minor, minor_pairs, project, reconstruct, remove_minors, type_subsets};
use tjn::rules::{generate_random_tjn, GenParams};
use tjn::wfnet::{language_dfg, strip, Dfg};
use tjn::Net;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: Some(Box::new(FileFailurePersistence::Off)), ..ProptestConfig::default() }
}

fn lts_strategy() -> impl Strategy<Value = Lts> {
    (1usize..6).prop_flat_map(|n| {
        prop::collection::vec((0..n, prop::sample::select(vec!["a", "b", "tau"]), 0..n), 0..10)
            .prop_map(move |edges| Lts::from_triples(n, 0, &edges))
    })
}

/// Moves of `l` from `s`: τ* a τ* for visible a, τ* for τ; or single steps when not weak.
fn moves(l: &Lts, weak: bool) -> Vec<BTreeSet<(Label, usize)>> {
    let single: Vec<BTreeSet<(Label, usize)>> =
        (0..l.len()).map(|s| l.edges.iter().filter(|e| e.src == s).map(|e| (e.label.clone(), e.tgt)).collect()).collect();
    if !weak {
        return single;
    }
    let taus = |s: usize| {
        let mut seen = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for (lab, v) in &single[u] {
                if lab.is_tau() && seen.insert(*v) {
                    stack.push(*v);
                }
            }
        }
        seen
    };
    (0..l.len())
        .map(|s| {
            let mut out = BTreeSet::new();
            for u in taus(s) {
                out.insert((Label::Tau, u));
                for (lab, v) in &single[u] {
                    if !lab.is_tau() {
                        for w in taus(*v) {
                            out.insert((lab.clone(), w));
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// Greatest fixpoint of the (bi)simulation condition over all state pairs.
fn naive_related(l1: &Lts, l2: &Lts, weak: bool, symmetric: bool) -> bool {
    let (m1, m2) = (moves(l1, weak && symmetric), moves(l2, weak));
    let step1: Vec<BTreeSet<(Label, usize)>> = if weak && !symmetric {
        (0..l1.len()).map(|s| l1.edges.iter().filter(|e| e.src == s).map(|e| (e.label.clone(), e.tgt)).collect()).collect()
    } else {
        m1.clone()
    };
    let mut rel: BTreeSet<(usize, usize)> = (0..l1.len()).flat_map(|p| (0..l2.len()).map(move |q| (p, q))).collect();
    loop {
        let keep: BTreeSet<(usize, usize)> = rel
            .iter()
            .copied()
            .filter(|&(p, q)| {
                let fwd = step1[p].iter().all(|(a, p2)| m2[q].iter().any(|(b, q2)| a == b && rel.contains(&(*p2, *q2))));
                let back = !symmetric || m2[q].iter().all(|(b, q2)| m1[p].iter().any(|(a, p2)| a == b && rel.contains(&(*p2, *q2))));
                fwd && back
            })
            .collect();
        if keep == rel {
            return rel.contains(&(l1.initial, l2.initial));
        }
        rel = keep;
    }
}

fn corpus_net(seed: u64) -> Net {
    generate_random_tjn(seed, &GenParams::default()).0
}

/// Renames every place to an opaque name in a seeded random order.
fn shuffle_place_names(net: &Net, seed: u64) -> Net {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut old: Vec<String> = net.places.keys().cloned().collect();
    old.shuffle(&mut rng);
    let map: BTreeMap<String, String> = old.iter().enumerate().map(|(i, p)| (p.clone(), format!("q{i}"))).collect();
    let rn = |x: &String| map.get(x).cloned().unwrap_or_else(|| x.clone());
    let mut out = net.clone();
    out.places = net.places.iter().map(|(p, t)| (rn(p), t.clone())).collect();
    out.arcs = net.arcs.iter().map(|((a, b), i)| ((rn(a), rn(b)), i.clone())).collect();
    out
}

fn tree_strategy() -> impl Strategy<Value = ProcessTree> {
    let leaf = Just(ProcessTree::Activity(String::new()));
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(ProcessTree::Seq),
            prop::collection::vec(inner.clone(), 2..4).prop_map(ProcessTree::Xor),
            prop::collection::vec(inner.clone(), 2..3).prop_map(ProcessTree::And),
            prop::collection::vec(inner, 2..3).prop_map(ProcessTree::Loop),
        ]
    })
    .prop_map(|t| name_leaves(&t, &mut 0))
}

fn name_leaves(t: &ProcessTree, next: &mut usize) -> ProcessTree {
    let kids = |v: &[ProcessTree], next: &mut usize| v.iter().map(|k| name_leaves(k, next)).collect::<Vec<_>>();
    match t {
        ProcessTree::Activity(_) => {
            *next += 1;
            ProcessTree::Activity(format!("a{next}"))
        }
        ProcessTree::Seq(v) => ProcessTree::Seq(kids(v, next)),
        ProcessTree::Xor(v) => ProcessTree::Xor(kids(v, next)),
        ProcessTree::And(v) => ProcessTree::And(kids(v, next)),
        ProcessTree::Loop(v) => ProcessTree::Loop(kids(v, next)),
    }
}

fn log_of(traces: &BTreeSet<Vec<String>>) -> EventLog {
    EventLog {
        types: vec!["l".into()],
        traces: traces.iter().enumerate().map(|(i, t)| Trace { case: vec![format!("c{i}")], trace: t.clone() }).collect(),
    }
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn strong_bisimulation_matches_naive_fixpoint(l1 in lts_strategy(), l2 in lts_strategy()) {
        let r = strong_bisim(&l1, &l2, true);
        prop_assert_eq!(r.holds, naive_related(&l1, &l2, false, true));
        prop_assert!(validate_partition(&l1, &l2, r.partition.as_ref().unwrap()));
        prop_assert!(strong_bisim(&l1, &l1, true).holds);
    }

    #[test]
    fn weak_bisimulation_matches_naive_fixpoint(l1 in lts_strategy(), l2 in lts_strategy()) {
        prop_assert_eq!(weak_bisim(&l1, &l2, true).holds, naive_related(&l1, &l2, true, true));
    }

    #[test]
    fn weak_simulation_matches_naive_fixpoint(l1 in lts_strategy(), l2 in lts_strategy()) {
        let r = weak_sim(&l1, &l2, true);
        prop_assert_eq!(r.holds, naive_related(&l1, &l2, true, false));
        prop_assert!(validate_weak_simulation(&l1, &l2, r.relation.as_ref().unwrap()));
    }

    #[test]
    fn dfg_grows_with_the_log(a in prop::collection::vec(prop::collection::vec(prop::sample::select(vec!["a", "b", "c"]), 1..5), 0..5),
                              b in prop::collection::vec(prop::collection::vec(prop::sample::select(vec!["a", "b", "c"]), 1..5), 0..5)) {
        let own = |v: &Vec<Vec<&str>>| -> Vec<Vec<String>> { v.iter().map(|t| t.iter().map(|s| s.to_string()).collect()).collect() };
        let (a, b) = (own(&a), own(&b));
        let both: Vec<Vec<String>> = a.iter().chain(&b).cloned().collect();
        let (da, db) = (Dfg::of_traces(&a), Dfg::of_traces(&both));
        prop_assert!(da.edges.is_subset(&db.edges));
        prop_assert!(da.starts.is_subset(&db.starts) && da.ends.is_subset(&db.ends));
        prop_assert!(da.activities.is_subset(&db.activities));
    }
}

proptest! {
    #![proptest_config(config(60))]

    #[test]
    fn isomorphism_is_invariant_under_place_renaming(seed in 0u64..5000, perm in any::<u64>()) {
        let n = corpus_net(seed);
        let m = shuffle_place_names(&n, perm);
        prop_assert!(net_isomorphic(&n, &m).is_some());
        prop_assert_eq!(invariant_key(&n), invariant_key(&m));
    }

    #[test]
    fn removing_an_arc_breaks_isomorphism(seed in 0u64..5000, pick in any::<prop::sample::Index>()) {
        let n = corpus_net(seed);
        prop_assume!(!n.arcs.is_empty());
        let mut m = n.clone();
        let key = m.arcs.keys().nth(pick.index(n.arcs.len())).unwrap().clone();
        m.arcs.remove(&key);
        prop_assert!(net_isomorphic(&n, &m).is_none());
    }

    #[test]
    fn composition_is_commutative_and_associative(seed in 0u64..5000) {
        let n = corpus_net(seed);
        let parts: Vec<Net> = type_subsets(&n).iter().take(3).map(|u| project(&n, u).unwrap()).collect();
        prop_assume!(parts.len() == 3);
        let (a, b, c) = (&parts[0], &parts[1], &parts[2]);
        let ab = compose(a, b).unwrap();
        let mut ba = compose(b, a).unwrap();
        ba.types = ab.types.clone();
        prop_assert_eq!(&ab, &ba);
        let left = compose(&ab, c).unwrap();
        let right = compose(a, &compose(b, c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn minor_removal_order_does_not_matter(seed in 0u64..5000, order in any::<u64>()) {
        let full = reconstruct(&corpus_net(seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(order);
        let mut cur = full.clone();
        loop {
            let mut pairs: Vec<(String, String)> = minor_pairs(&cur).into_iter().collect();
            if pairs.is_empty() {
                break;
            }
            pairs.shuffle(&mut rng);
            let (p, q) = pairs[0].clone();
            prop_assert!(is_minor(&cur, &p, &q));
            cur.remove_node(&p);
        }
        prop_assert!(net_isomorphic(&cur, &remove_minors(&full)).is_some());
    }
}

proptest! {
    #![proptest_config(config(400))]

    #[test]
    fn trees_survive_translation_and_mining(tree in tree_strategy()) {
        prop_assume!(tree.is_valid() && tree_to_term(&tree).is_ok());
        let w = tree_to_wfnet(&tree).unwrap();
        prop_assert!(w.is_wf_net());
        let norm = tree.normalize();
        prop_assert_eq!(tree_of_bordered_net(&strip(&w).unwrap()).unwrap(), norm.clone());
        let lang = tree.language(1);
        let model = language_dfg(&w, 100_000).unwrap();
        prop_assert_eq!(&Dfg::of_traces(&lang), &model, "{}", tree);
        let mined = inductive_miner(&log_of(&lang)).unwrap();
        prop_assert_eq!(mined.normalize(), norm, "{}", tree);
    }
}
