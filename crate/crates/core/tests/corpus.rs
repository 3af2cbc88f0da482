//! Properties of projection, log induction and rediscovery over seeded random typed
//! Jackson nets, plus the instances where a property is known not to hold.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tjn::bisim::weak_sim;
use tjn::discovery::{alpha_miner, covering_sequence, rediscover, rediscovery_premises, tree_of_bordered_net, verify_rediscovery, Miner};
use tjn::eventlog::{generated_by, induced_log, project_sequence};
use tjn::fixtures;
use tjn::jackson::classical_isomorphic;
use tjn::projection::{parse_type_set, project, projected_transitions, type_subsets};
use tjn::rules::{generate_random_tjn, is_tjn, GenParams, TjnVerdict};
use tjn::semantics::{run, ExplorationBound};
use tjn::statespace::state_space;
use tjn::wfnet::{initial_marking, strip, underlying};
use tjn::{Marking, Net};

fn corpus(seeds: std::ops::Range<u64>) -> impl Iterator<Item = (u64, Net)> {
    seeds.map(|s| (s, generate_random_tjn(s, &GenParams::default()).0))
}

#[test]
fn projections_with_places_are_atomic() {
    let mut placeless = 0;
    for (seed, net) in corpus(0..60) {
        for u in type_subsets(&net) {
            let p = project(&net, &u).unwrap();
            let v = is_tjn(&p).verdict;
            if p.places.is_empty() {
                // isolated transitions: several start transitions are flagged, never atomic
                match p.transitions.len() {
                    0 => {}
                    1 => assert_eq!(v, TjnVerdict::Atomic, "seed {seed} {u:?}"),
                    n => {
                        assert_eq!(v, TjnVerdict::Tjn { transitions: n }, "seed {seed} {u:?}");
                        placeless += 1;
                    }
                }
            } else {
                assert_eq!(v, TjnVerdict::Atomic, "seed {seed} {u:?}");
            }
        }
    }
    assert!(placeless > 0, "the corpus exercises placeless projections");
}

#[test]
fn running_example_placeless_projection() {
    let n = fixtures::running_example();
    let p = project(&n, &parse_type_set("x,y")).unwrap();
    assert!(p.places.is_empty());
    assert_eq!(p.transitions, BTreeSet::from(["E".to_string()]));
    assert_eq!(is_tjn(&p).verdict, TjnVerdict::Atomic);
}

#[test]
fn projection_weakly_simulates_the_hidden_net() {
    let bound = ExplorationBound::new(1, 50_000);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (seed, net) in corpus(0..25) {
        let subsets = type_subsets(&net);
        let u = subsets.choose(&mut rng).unwrap();
        let keep = projected_transitions(&net, u);
        let hidden: BTreeSet<String> = net.transitions.difference(&keep).cloned().collect();
        let full = state_space(&net, &Marking::new(), &bound).hide(&hidden);
        let proj = state_space(&project(&net, u).unwrap(), &Marking::new(), &bound);
        assert!(!full.truncated && !proj.truncated, "seed {seed}");
        assert!(weak_sim(&full, &proj, true).holds, "seed {seed} {u:?}");
        let eta = run(&net, &Marking::new(), 40, seed, &bound);
        assert_eq!(induced_log(&eta, u), induced_log(&project_sequence(&net, &eta, u), u), "seed {seed}");
    }
}

#[test]
fn induced_logs_replay_on_atomic_projections_with_places() {
    let bound = ExplorationBound::new(1, 20_000);
    for (seed, net) in corpus(0..40) {
        let eta = run(&net, &Marking::new(), 60, seed, &bound);
        for u in type_subsets(&net) {
            let p = project(&net, &u).unwrap();
            if p.places.is_empty() || is_tjn(&p).verdict != TjnVerdict::Atomic {
                continue;
            }
            let w = tjn::wfnet::closure(&underlying(&p)).unwrap();
            let log = induced_log(&eta, &u);
            assert!(generated_by(&log, &w, &initial_marking(&w).unwrap()).unwrap().holds, "seed {seed} {u:?}");
        }
    }
}

/// A transition bound to two identifiers that share no place can fire twice for the
/// same pair; its placeless projection's closure accepts only one firing.
#[test]
fn placeless_projection_can_reject_its_induced_log() {
    let (net, _) = generate_random_tjn(51, &GenParams::default());
    let u = parse_type_set("l1,l3");
    let p = project(&net, &u).unwrap();
    assert!(p.places.is_empty());
    assert_eq!(p.transitions, BTreeSet::from(["t8".to_string()]));
    assert_eq!(is_tjn(&p).verdict, TjnVerdict::Atomic);
    let seq = covering_sequence(&net, &ExplorationBound::new(1, 20_000)).unwrap();
    let pre = rediscovery_premises(&net, &seq, 20_000);
    assert!(pre.structural.is_empty());
    assert_eq!(pre.replay.len(), 1);
    assert_eq!(pre.replay[0].types, vec!["l1".to_string(), "l3".to_string()]);
    assert!(pre.replay[0].reason.contains("[\"t8\", \"t8\"]"));
    assert!(!pre.in_class());
}

#[test]
fn figure_net_has_an_implicit_place_outside_the_tree_class() {
    let n = fixtures::fig5a();
    let seq = covering_sequence(&n, &ExplorationBound::k(1)).unwrap();
    let pre = rediscovery_premises(&n, &seq, 10_000);
    let types: Vec<Vec<String>> = pre.structural.iter().map(|e| e.types.clone()).collect();
    assert_eq!(types, vec![vec!["l1".to_string()], vec!["l2".to_string()]]);
    // the miner drops the place that runs parallel to the other branch
    let r = rediscover(&seq, &n.types, Miner::Inductive, Some(&n), true).unwrap();
    assert!(r.succeeded());
    let v = verify_rediscovery(&n, r.net.as_ref().unwrap(), &ExplorationBound::k(1));
    assert!(!v.iso_modulo_minors.holds);
    assert!(v.bisimulation.holds);
}

fn in_class(seeds: std::ops::Range<u64>) -> Vec<(u64, Net, tjn::semantics::FiringSequence)> {
    let bound = ExplorationBound::new(1, 20_000);
    corpus(seeds)
        .filter_map(|(s, n)| {
            let seq = covering_sequence(&n, &bound).ok()?;
            rediscovery_premises(&n, &seq, 20_000).in_class().then_some((s, n, seq))
        })
        .collect()
}

#[test]
fn rediscovery_is_bisimilar_at_two_identifiers() {
    let nets = in_class(0..150);
    assert!(nets.len() >= 10);
    for (seed, net, seq) in nets {
        let r = rediscover(&seq, &net.types, Miner::Inductive, Some(&net), false).unwrap();
        let found = r.net.expect("in-class rediscovery succeeds");
        let v = verify_rediscovery(&net, &found, &ExplorationBound::new(2, 200_000));
        assert!(v.holds(), "seed {seed}");
        assert!(!v.bisimulation.truncated, "seed {seed}");
    }
}

#[test]
fn miners_replay_their_logs() {
    for (seed, net, seq) in in_class(0..150) {
        for u in type_subsets(&net) {
            let log = induced_log(&seq, &u);
            if log.is_empty() {
                continue;
            }
            let (w, tree) = tjn::discovery::discover(&log, Miner::Inductive).unwrap();
            assert!(generated_by(&log, &w, &initial_marking(&w).unwrap()).unwrap().holds, "seed {seed} {u:?}");
            assert_eq!(tree_of_bordered_net(&strip(&w).unwrap()).unwrap(), tree.unwrap().normalize());
            // the alpha algorithm cannot tell a loop of length one or two from concurrency
            let short_loop =
                log.traces.iter().any(|t| t.trace.windows(2).any(|x| x[0] == x[1]) || t.trace.windows(3).any(|x| x[0] == x[2]));
            let a = alpha_miner(&log).unwrap();
            let fits = generated_by(&log, &a, &initial_marking(&a).unwrap()).unwrap().holds;
            if !short_loop {
                assert!(fits, "seed {seed} {u:?}");
                let p = underlying(&project(&net, &u).unwrap());
                assert!(classical_isomorphic(&strip(&a).unwrap(), &p, true), "seed {seed} {u:?}");
            }
        }
    }
}
