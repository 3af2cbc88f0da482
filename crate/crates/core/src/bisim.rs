//! Strong and weak bisimulation by partition refinement, and weak simulation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::lts::{Label, Lts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Strong,
    Weak,
    WeakSimulation,
}

/// Block assignment for the states of both systems; a bisimulation witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BisimReport {
    pub kind: Kind,
    pub rooted: bool,
    pub holds: bool,
    /// Equivalence classes over both state sets (bisimulation checks).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Partition>,
    /// Related pairs (simulation checks), left state first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Vec<(usize, usize)>>,
    /// Labels along which the two roots are told apart.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguishing_trace: Option<Vec<String>>,
    /// True if either system was truncated by its exploration bound.
    pub truncated: bool,
}

struct Union {
    succ: Vec<Vec<(usize, usize)>>,
    labels: Vec<Label>,
}

fn union(l1: &Lts, l2: &Lts) -> Union {
    let mut labels: Vec<Label> = l1.labels().union(&l2.labels()).cloned().collect();
    labels.sort();
    let idx: HashMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let n1 = l1.len();
    let mut succ = vec![Vec::new(); n1 + l2.len()];
    for e in &l1.edges {
        succ[e.src].push((idx[&e.label], e.tgt));
    }
    for e in &l2.edges {
        succ[n1 + e.src].push((idx[&e.label], n1 + e.tgt));
    }
    let labels = labels.clone();
    Union { succ, labels }
}

/// Coarsest stable partition; returns the block history, last entry final.
fn refine(succ: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut history = vec![vec![0usize; n]];
    loop {
        let cur = history.last().expect("nonempty");
        let sigs: Vec<(usize, BTreeSet<(usize, usize)>)> =
            (0..n).map(|s| (cur[s], succ[s].iter().map(|(l, t)| (*l, cur[*t])).collect())).collect();
        let mut table: HashMap<&(usize, BTreeSet<(usize, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| {
                let k = table.len();
                *table.entry(s).or_insert(k)
            })
            .collect();
        let before = cur.iter().collect::<BTreeSet<_>>().len();
        let done = table.len() == before;
        history.push(next);
        if done {
            return history;
        }
    }
}

/// Rooted or unrooted strong bisimilarity.
pub fn strong_bisim(l1: &Lts, l2: &Lts, rooted: bool) -> BisimReport {
    bisim_on(l1, l2, rooted, Kind::Strong)
}

/// Weak bisimilarity: strong bisimilarity of the τ-saturated systems.
pub fn weak_bisim(l1: &Lts, l2: &Lts, rooted: bool) -> BisimReport {
    bisim_on(&l1.saturate(), &l2.saturate(), rooted, Kind::Weak)
}

fn bisim_on(l1: &Lts, l2: &Lts, rooted: bool, kind: Kind) -> BisimReport {
    let u = union(l1, l2);
    let n1 = l1.len();
    let history = refine(&u.succ);
    let fin = history.last().expect("nonempty").clone();
    let left: BTreeSet<usize> = fin[..n1].iter().copied().collect();
    let right: BTreeSet<usize> = fin[n1..].iter().copied().collect();
    let holds = if rooted { !l1.is_empty() && !l2.is_empty() && fin[l1.initial] == fin[n1 + l2.initial] } else { left == right };
    let distinguishing_trace =
        if !holds && !l1.is_empty() && !l2.is_empty() { Some(distinguish(&u, &history, l1.initial, n1 + l2.initial)) } else { None };
    BisimReport {
        kind,
        rooted,
        holds,
        partition: Some(Partition { left: fin[..n1].to_vec(), right: fin[n1..].to_vec() }),
        relation: None,
        distinguishing_trace,
        truncated: l1.truncated || l2.truncated,
    }
}

fn distinguish(u: &Union, history: &[Vec<usize>], mut p: usize, mut q: usize) -> Vec<String> {
    let mut trace = Vec::new();
    let split = |a: usize, b: usize| history.iter().position(|h| h[a] != h[b]);
    while let Some(r) = split(p, q) {
        if r == 0 {
            break;
        }
        let prev = &history[r - 1];
        let sig = |s: usize| -> BTreeSet<(usize, usize)> { u.succ[s].iter().map(|(l, t)| (*l, prev[*t])).collect() };
        let (sp, sq) = (sig(p), sig(q));
        let (a, b, flip) = match sp.difference(&sq).next() {
            Some(x) => (p, q, Some(*x)),
            None => (q, p, sq.difference(&sp).next().copied()),
        };
        let Some((label, block)) = flip else { break };
        let a2 = u.succ[a].iter().find(|(l, t)| *l == label && prev[*t] == block).expect("move").1;
        trace.push(u.labels[label].to_string());
        let b_moves: Vec<usize> = u.succ[b].iter().filter(|(l, _)| *l == label).map(|(_, t)| *t).collect();
        let Some(b2) = b_moves.into_iter().max_by_key(|t| split(a2, *t).unwrap_or(usize::MAX)) else {
            break;
        };
        p = a2;
        q = b2;
    }
    trace
}

/// Checks that a partition is a bisimulation: all members of a block offer the same (label, block) moves.
pub fn validate_partition(l1: &Lts, l2: &Lts, part: &Partition) -> bool {
    let block: Vec<usize> = part.left.iter().chain(&part.right).copied().collect();
    let u = union(l1, l2);
    if block.len() != u.succ.len() {
        return false;
    }
    let mut seen: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for s in 0..block.len() {
        let sig: BTreeSet<(usize, usize)> = u.succ[s].iter().map(|(l, t)| (*l, block[*t])).collect();
        match seen.get(&block[s]) {
            Some(x) if *x != sig => return false,
            Some(_) => {}
            None => {
                seen.insert(block[s], sig);
            }
        }
    }
    true
}

/// Weak simulation of `l1` by `l2`: every step of `l1` is matched by a weak step of `l2`.
pub fn weak_sim(l1: &Lts, l2: &Lts, rooted: bool) -> BisimReport {
    let sat = l2.saturate();
    let (n1, n2) = (l1.len(), l2.len());
    let mut moves2: Vec<HashMap<&Label, Vec<usize>>> = vec![HashMap::new(); n2];
    for e in &sat.edges {
        moves2[e.src].entry(&e.label).or_default().push(e.tgt);
    }
    let succ1 = l1.successors();
    // removed[p*n2+q] = round in which the pair left the relation (0 = still related)
    let mut removed = vec![0usize; n1 * n2];
    let mut round = 0;
    loop {
        round += 1;
        let mut changed = false;
        for p in 0..n1 {
            for q in 0..n2 {
                if removed[p * n2 + q] != 0 {
                    continue;
                }
                let ok = succ1[p].iter().all(|(l, p2)| moves2[q].get(l).is_some_and(|ts| ts.iter().any(|q2| removed[p2 * n2 + q2] == 0)));
                if !ok {
                    removed[p * n2 + q] = round;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let related = |p: usize, q: usize| removed[p * n2 + q] == 0;
    let holds = if rooted { n1 > 0 && n2 > 0 && related(l1.initial, l2.initial) } else { (0..n1).all(|p| (0..n2).any(|q| related(p, q))) };
    let relation: Vec<(usize, usize)> = (0..n1).flat_map(|p| (0..n2).map(move |q| (p, q))).filter(|(p, q)| related(*p, *q)).collect();
    let distinguishing_trace = if !holds && n1 > 0 && n2 > 0 {
        let (mut p, mut q) = (l1.initial, l2.initial);
        let mut trace = Vec::new();
        while removed[p * n2 + q] != 0 {
            let r = removed[p * n2 + q];
            let bad = succ1[p].iter().find(|(l, p2)| {
                !moves2[q].get(l).is_some_and(|ts| ts.iter().any(|q2| removed[p2 * n2 + q2] == 0 || removed[p2 * n2 + q2] >= r))
            });
            let Some((l, p2)) = bad else { break };
            trace.push(l.to_string());
            let next = moves2[q].get(l).and_then(|ts| ts.iter().copied().max_by_key(|q2| removed[p2 * n2 + q2]));
            match next {
                Some(q2) if removed[p2 * n2 + q2] != 0 => {
                    p = *p2;
                    q = q2;
                }
                _ => break,
            }
        }
        Some(trace)
    } else {
        None
    };
    BisimReport {
        kind: Kind::WeakSimulation,
        rooted,
        holds,
        partition: None,
        relation: Some(relation),
        distinguishing_trace,
        truncated: l1.truncated || l2.truncated,
    }
}

/// Checks the simulation condition for every pair of a claimed relation.
pub fn validate_weak_simulation(l1: &Lts, l2: &Lts, relation: &[(usize, usize)]) -> bool {
    let sat = l2.saturate();
    let rel: BTreeSet<(usize, usize)> = relation.iter().copied().collect();
    let succ1 = l1.successors();
    let succ2 = sat.successors();
    rel.iter().all(|(p, q)| succ1[*p].iter().all(|(l, p2)| succ2[*q].iter().any(|(l2, q2)| l2 == l && rel.contains(&(*p2, *q2)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lts_is_bisimilar_to_itself() {
        let l = Lts::from_triples(3, 0, &[(0, "a", 1), (1, "b", 2), (2, "c", 0), (1, "a", 1)]);
        let r = strong_bisim(&l, &l, true);
        assert!(r.holds);
        assert!(validate_partition(&l, &l, r.partition.as_ref().unwrap()));
    }

    #[test]
    fn self_loop_matches_two_cycle() {
        let a = Lts::from_triples(1, 0, &[(0, "a", 0)]);
        let b = Lts::from_triples(2, 0, &[(0, "a", 1), (1, "a", 0)]);
        assert!(strong_bisim(&a, &b, true).holds);
    }

    #[test]
    fn choice_timing_is_distinguished() {
        // a.(b + c) vs a.b + a.c
        let a = Lts::from_triples(4, 0, &[(0, "a", 1), (1, "b", 2), (1, "c", 3)]);
        let b = Lts::from_triples(5, 0, &[(0, "a", 1), (0, "a", 2), (1, "b", 3), (2, "c", 4)]);
        let r = strong_bisim(&a, &b, true);
        assert!(!r.holds);
        let t = r.distinguishing_trace.unwrap();
        assert_eq!(t.first().map(String::as_str), Some("a"));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn hidden_everything_matches_tau_loop() {
        let l = Lts::from_triples(3, 0, &[(0, "a", 1), (1, "b", 2), (2, "c", 0)]);
        let h = l.hide(&["a", "b", "c"].iter().map(|s| s.to_string()).collect());
        let tau = Lts::from_triples(1, 0, &[(0, "tau", 0)]);
        assert!(weak_bisim(&h, &tau, true).holds);
    }

    #[test]
    fn tau_prefix_is_weakly_invisible() {
        let a = Lts::from_triples(2, 0, &[(0, "a", 1)]);
        let b = Lts::from_triples(3, 0, &[(0, "tau", 1), (1, "a", 2)]);
        assert!(weak_bisim(&a, &b, true).holds);
        assert!(!strong_bisim(&a, &b, true).holds);
    }

    #[test]
    fn weak_simulation_is_one_directional() {
        let small = Lts::from_triples(2, 0, &[(0, "a", 1)]);
        let big = Lts::from_triples(3, 0, &[(0, "a", 1), (0, "b", 2)]);
        let r = weak_sim(&small, &big, true);
        assert!(r.holds);
        assert!(validate_weak_simulation(&small, &big, r.relation.as_ref().unwrap()));
        let back = weak_sim(&big, &small, true);
        assert!(!back.holds);
        assert_eq!(back.distinguishing_trace.unwrap(), vec!["b".to_string()]);
    }
}
