//! Classical (untyped) nets: token game, closure and stripping of transition-bordered
//! nets, reachability graphs and directly-follows relations of their languages.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jackson::ClassicalNet;
use crate::lts::Lts;
use crate::model::Net;

/// Name of the source place added by `closure`.
pub const SOURCE: &str = "i";
/// Name of the sink place added by `closure`.
pub const SINK: &str = "f";

/// Token counts per place; places with no tokens are absent.
pub type ClassicalMarking = BTreeMap<String, usize>;

/// Underlying graph of a typed net.
pub fn underlying(net: &Net) -> ClassicalNet {
    ClassicalNet {
        places: net.places.keys().cloned().collect(),
        transitions: net.transitions.clone(),
        arcs: net.arcs.keys().cloned().collect(),
        source: None,
        sink: None,
    }
}

/// Transitions with an empty preset.
pub fn start_transitions(n: &ClassicalNet) -> BTreeSet<String> {
    n.transitions.iter().filter(|t| n.preset(t).is_empty()).cloned().collect()
}

/// Transitions with an empty postset.
pub fn finish_transitions(n: &ClassicalNet) -> BTreeSet<String> {
    n.transitions.iter().filter(|t| n.postset(t).is_empty()).cloned().collect()
}

fn fresh(n: &ClassicalNet, base: &str) -> String {
    let mut name = base.to_string();
    while n.places.contains(&name) || n.transitions.contains(&name) {
        name.push('\'');
    }
    name
}

/// Adds a source place feeding every start transition and a sink place fed by every finish transition.
pub fn closure(tb: &ClassicalNet) -> Result<ClassicalNet> {
    let (starts, finishes) = (start_transitions(tb), finish_transitions(tb));
    if starts.is_empty() || finishes.is_empty() {
        return Err(Error::Invalid("a transition-bordered net needs a start and a finish transition".into()));
    }
    let mut w = tb.clone();
    let (i, f) = (fresh(tb, SOURCE), fresh(tb, SINK));
    w.places.insert(i.clone());
    w.places.insert(f.clone());
    for t in starts {
        w.arcs.insert((i.clone(), t));
    }
    for t in finishes {
        w.arcs.insert((t, f.clone()));
    }
    w.source = Some(i);
    w.sink = Some(f);
    Ok(w)
}

/// Source and sink places of a WF-net: the declared border, else the unique places with empty pre/postset.
pub fn border(w: &ClassicalNet) -> Result<(String, String)> {
    if let (Some(i), Some(f)) = (&w.source, &w.sink) {
        return Ok((i.clone(), f.clone()));
    }
    let sources: Vec<&String> = w.places.iter().filter(|p| w.preset(p).is_empty()).collect();
    let sinks: Vec<&String> = w.places.iter().filter(|p| w.postset(p).is_empty()).collect();
    match (sources.as_slice(), sinks.as_slice()) {
        ([i], [f]) => Ok(((*i).clone(), (*f).clone())),
        _ => Err(Error::Invalid("net has no unique source and sink place".into())),
    }
}

/// Removes the source and sink places of a WF-net.
pub fn strip(w: &ClassicalNet) -> Result<ClassicalNet> {
    let (i, f) = border(w)?;
    let mut tb = w.clone();
    tb.places.remove(&i);
    tb.places.remove(&f);
    tb.arcs.retain(|(a, b)| a != &i && b != &f);
    tb.source = None;
    tb.sink = None;
    Ok(tb)
}

/// One token in the source place.
pub fn initial_marking(w: &ClassicalNet) -> Result<ClassicalMarking> {
    Ok(BTreeMap::from([(border(w)?.0, 1)]))
}

pub fn enabled(n: &ClassicalNet, m: &ClassicalMarking, t: &str) -> bool {
    n.preset(t).iter().all(|p| m.get(p).copied().unwrap_or(0) > 0)
}

pub fn fire(n: &ClassicalNet, m: &ClassicalMarking, t: &str) -> ClassicalMarking {
    let mut out = m.clone();
    for p in n.preset(t) {
        let c = out.get_mut(&p).expect("enabled");
        *c -= 1;
        if *c == 0 {
            out.remove(&p);
        }
    }
    for p in n.postset(t) {
        *out.entry(p).or_insert(0) += 1;
    }
    out
}

/// Replays a trace; on failure returns the index of the first event that is not enabled.
pub fn replay(n: &ClassicalNet, m0: &ClassicalMarking, trace: &[String]) -> std::result::Result<ClassicalMarking, usize> {
    let mut m = m0.clone();
    for (i, t) in trace.iter().enumerate() {
        if !n.transitions.contains(t) || !enabled(n, &m, t) {
            return Err(i);
        }
        m = fire(n, &m, t);
    }
    Ok(m)
}

/// Reachability graph with transition labels.
#[derive(Clone, Debug)]
pub struct ReachabilityGraph {
    pub markings: Vec<ClassicalMarking>,
    pub edges: Vec<(usize, String, usize)>,
    pub truncated: bool,
}

impl ReachabilityGraph {
    pub fn lts(&self) -> Lts {
        let triples: Vec<(usize, &str, usize)> = self.edges.iter().map(|(a, t, b)| (*a, t.as_str(), *b)).collect();
        let mut l = Lts::from_triples(self.markings.len(), 0, &triples);
        l.truncated = self.truncated;
        l
    }
}

/// Breadth-first reachability graph from `m0`, capped at `max_states` markings.
pub fn reachability(n: &ClassicalNet, m0: &ClassicalMarking, max_states: usize) -> ReachabilityGraph {
    let mut index: HashMap<ClassicalMarking, usize> = HashMap::from([(m0.clone(), 0)]);
    let mut g = ReachabilityGraph { markings: vec![m0.clone()], edges: Vec::new(), truncated: false };
    let mut q = VecDeque::from([0usize]);
    while let Some(s) = q.pop_front() {
        let m = g.markings[s].clone();
        for t in &n.transitions {
            if !enabled(n, &m, t) {
                continue;
            }
            let m2 = fire(n, &m, t);
            let tgt = match index.get(&m2) {
                Some(&i) => i,
                None => {
                    if g.markings.len() >= max_states {
                        g.truncated = true;
                        continue;
                    }
                    g.markings.push(m2.clone());
                    index.insert(m2, g.markings.len() - 1);
                    q.push_back(g.markings.len() - 1);
                    g.markings.len() - 1
                }
            };
            g.edges.push((s, t.clone(), tgt));
        }
    }
    g
}

/// Directly-follows graph: activities, start and end activities, and adjacent pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Dfg {
    pub activities: BTreeSet<String>,
    pub starts: BTreeSet<String>,
    pub ends: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
}

impl Dfg {
    /// Directly-follows graph of a set of traces.
    pub fn of_traces<'a>(traces: impl IntoIterator<Item = &'a Vec<String>>) -> Dfg {
        let mut d = Dfg::default();
        for tr in traces {
            d.activities.extend(tr.iter().cloned());
            if let (Some(a), Some(b)) = (tr.first(), tr.last()) {
                d.starts.insert(a.clone());
                d.ends.insert(b.clone());
            }
            for w in tr.windows(2) {
                d.edges.insert((w[0].clone(), w[1].clone()));
            }
        }
        d
    }

    pub fn successors(&self, a: &str) -> BTreeSet<String> {
        self.edges.iter().filter(|(x, _)| x == a).map(|(_, y)| y.clone()).collect()
    }
}

/// Directly-follows graph of the complete traces of a WF-net from one source token:
/// only markings that can still reach the final marking contribute.
pub fn language_dfg(w: &ClassicalNet, max_states: usize) -> Result<Dfg> {
    let (i, f) = border(w)?;
    let g = reachability(w, &BTreeMap::from([(i, 1)]), max_states);
    if g.truncated {
        return Err(Error::Invalid(format!("reachability graph truncated at {max_states} markings")));
    }
    let final_marking: ClassicalMarking = BTreeMap::from([(f, 1)]);
    let mut live = vec![false; g.markings.len()];
    let mut q: VecDeque<usize> = (0..g.markings.len()).filter(|s| g.markings[*s] == final_marking).collect();
    for &s in &q {
        live[s] = true;
    }
    while let Some(s) = q.pop_front() {
        for (a, _, b) in &g.edges {
            if *b == s && !live[*a] {
                live[*a] = true;
                q.push_back(*a);
            }
        }
    }
    let mut d = Dfg::default();
    let good: Vec<&(usize, String, usize)> = g.edges.iter().filter(|(a, _, b)| live[*a] && live[*b]).collect();
    for (a, t, b) in &good {
        d.activities.insert(t.clone());
        if *a == 0 {
            d.starts.insert(t.clone());
        }
        if g.markings[*b] == final_marking {
            d.ends.insert(t.clone());
        }
        for (_, u, _) in good.iter().filter(|(c, _, _)| c == b) {
            d.edges.insert((t.clone(), u.clone()));
        }
    }
    Ok(d)
}
