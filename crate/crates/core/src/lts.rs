//! Labelled transition systems with hiding and renaming.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    Tau,
    Act(String),
}

impl Label {
    pub fn act(s: &str) -> Self {
        Label::Act(s.to_string())
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => write!(f, "τ"),
            Label::Act(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub src: usize,
    pub label: Label,
    pub tgt: usize,
}

/// States are indices; `names` gives a printable description of each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lts {
    pub names: Vec<String>,
    pub initial: usize,
    pub edges: Vec<Edge>,
    pub truncated: bool,
}

impl Lts {
    /// Builds an LTS with anonymous state names; duplicate edges are merged.
    pub fn from_edges(n: usize, initial: usize, edges: impl IntoIterator<Item = (usize, Label, usize)>) -> Lts {
        let set: BTreeSet<Edge> = edges.into_iter().map(|(src, label, tgt)| Edge { src, label, tgt }).collect();
        Lts { names: (0..n).map(|i| format!("s{i}")).collect(), initial, edges: set.into_iter().collect(), truncated: false }
    }

    /// Shorthand for tests: edges given as (src, label, tgt) with "tau" for τ.
    pub fn from_triples(n: usize, initial: usize, edges: &[(usize, &str, usize)]) -> Lts {
        Lts::from_edges(n, initial, edges.iter().map(|(s, l, t)| (*s, if *l == "tau" { Label::Tau } else { Label::act(l) }, *t)))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    pub fn successors(&self) -> Vec<Vec<(Label, usize)>> {
        let mut out = vec![Vec::new(); self.len()];
        for e in &self.edges {
            out[e.src].push((e.label.clone(), e.tgt));
        }
        out
    }

    /// Labels in `hidden` become τ.
    pub fn hide(&self, hidden: &BTreeSet<String>) -> Lts {
        let edges = self.edges.iter().map(|e| {
            let label = match &e.label {
                Label::Act(a) if hidden.contains(a) => Label::Tau,
                l => l.clone(),
            };
            (e.src, label, e.tgt)
        });
        let mut out = Lts::from_edges(self.len(), self.initial, edges);
        out.names = self.names.clone();
        out.truncated = self.truncated;
        out
    }

    /// Applies a label map; unmapped labels are kept.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Lts {
        let edges = self.edges.iter().map(|e| {
            let label = match &e.label {
                Label::Act(a) => Label::Act(map.get(a).cloned().unwrap_or_else(|| a.clone())),
                Label::Tau => Label::Tau,
            };
            (e.src, label, e.tgt)
        });
        let mut out = Lts::from_edges(self.len(), self.initial, edges);
        out.names = self.names.clone();
        out.truncated = self.truncated;
        out
    }

    /// States reachable from `s` by zero or more τ steps, for every `s`.
    pub fn tau_closure(&self) -> Vec<BTreeSet<usize>> {
        let succ = self.successors();
        (0..self.len())
            .map(|s| {
                let mut seen = BTreeSet::from([s]);
                let mut q = VecDeque::from([s]);
                while let Some(u) = q.pop_front() {
                    for (l, v) in &succ[u] {
                        if l.is_tau() && seen.insert(*v) {
                            q.push_back(*v);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    /// Weak transition relation: τ* a τ* for visible a, τ* for τ.
    pub fn saturate(&self) -> Lts {
        let closure = self.tau_closure();
        let mut reverse = vec![Vec::new(); self.len()];
        let mut edges = BTreeSet::new();
        for (s, reach) in closure.iter().enumerate() {
            for &u in reach {
                edges.insert((s, Label::Tau, u));
                reverse[u].push(s);
            }
        }
        for e in &self.edges {
            if let Label::Act(_) = e.label {
                for &s in &reverse[e.src] {
                    for &v in &closure[e.tgt] {
                        edges.insert((s, e.label.clone(), v));
                    }
                }
            }
        }
        let mut out = Lts::from_edges(self.len(), self.initial, edges);
        out.names = self.names.clone();
        out.truncated = self.truncated;
        out
    }

    /// Shortest label path from the initial state to every state.
    pub fn paths_from_initial(&self) -> Vec<Option<Vec<Label>>> {
        let succ = self.successors();
        let mut parent: Vec<Option<(usize, Label)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        if self.is_empty() {
            return Vec::new();
        }
        seen[self.initial] = true;
        let mut q = VecDeque::from([self.initial]);
        while let Some(u) = q.pop_front() {
            for (l, v) in &succ[u] {
                if !seen[*v] {
                    seen[*v] = true;
                    parent[*v] = Some((u, l.clone()));
                    q.push_back(*v);
                }
            }
        }
        (0..self.len())
            .map(|s| {
                if !seen[s] {
                    return None;
                }
                let mut path = Vec::new();
                let mut cur = s;
                while let Some((p, l)) = &parent[cur] {
                    path.push(l.clone());
                    cur = *p;
                }
                path.reverse();
                Some(path)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hiding_nothing_is_identity() {
        let l = Lts::from_triples(2, 0, &[(0, "a", 1), (1, "b", 0)]);
        assert_eq!(l.hide(&BTreeSet::new()), l);
    }

    #[test]
    fn hiding_everything_keeps_shape() {
        let l = Lts::from_triples(3, 0, &[(0, "a", 1), (1, "b", 2), (2, "c", 0)]);
        let all: BTreeSet<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let h = l.hide(&all);
        assert_eq!(h.len(), 3);
        assert_eq!(h.edges.len(), 3);
        assert!(h.edges.iter().all(|e| e.label.is_tau()));
    }

    #[test]
    fn rename_maps_labels() {
        let l = Lts::from_triples(2, 0, &[(0, "a", 1)]);
        let r = l.rename(&BTreeMap::from([("a".to_string(), "z".to_string())]));
        assert_eq!(r.edges[0].label, Label::act("z"));
    }

    #[test]
    fn saturation_adds_weak_edges() {
        let l = Lts::from_triples(3, 0, &[(0, "tau", 1), (1, "a", 2)]);
        let s = l.saturate();
        assert!(s.edges.contains(&Edge { src: 0, label: Label::act("a"), tgt: 2 }));
        assert!(s.edges.contains(&Edge { src: 0, label: Label::Tau, tgt: 0 }));
    }
}
