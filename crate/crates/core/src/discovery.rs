//! Per-projection process discovery and the rediscovery pipeline: process trees,
//! an inductive miner on directly-follows graphs, an alpha miner, translation of
//! trees into Jackson blocks, retyping of discovered nets and their composition.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::bisim::{strong_bisim, BisimReport};
use crate::error::{Error, Result};
use crate::eventlog::{df_complete, generated_by, induced_log, EventLog};
use crate::iso::{iso_modulo_minors, net_isomorphic, MinorIsoReport};
use crate::jackson::{block_net, classical_isomorphic, normalize, reduce_to_term, ClassicalNet, Sort, Term};
use crate::model::{Inscription, Marking, Net, PlaceType};
use crate::projection::{compose_all, project, projected_transitions, remove_minors, type_subsets, TypeSet};
use crate::rules::{is_tjn, TjnVerdict};
use crate::semantics::{ExplorationBound, FiringRecord, FiringSequence};
use crate::statespace::{explore, state_space, StateSpace};
use crate::wfnet::{closure, initial_marking, strip, underlying, Dfg};

// ---------- process trees ----------

/// Process tree without silent steps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcessTree {
    Activity(String),
    Seq(Vec<ProcessTree>),
    Xor(Vec<ProcessTree>),
    And(Vec<ProcessTree>),
    /// Body followed by its redo alternatives.
    Loop(Vec<ProcessTree>),
}

impl fmt::Display for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, kids) = match self {
            ProcessTree::Activity(a) => return write!(f, "{a}"),
            ProcessTree::Seq(v) => ("→", v),
            ProcessTree::Xor(v) => ("×", v),
            ProcessTree::And(v) => ("∧", v),
            ProcessTree::Loop(v) => ("⟲", v),
        };
        let parts: Vec<String> = kids.iter().map(|k| k.to_string()).collect();
        write!(f, "{op}({})", parts.join(", "))
    }
}

impl ProcessTree {
    pub fn activities(&self) -> Vec<String> {
        match self {
            ProcessTree::Activity(a) => vec![a.clone()],
            ProcessTree::Seq(v) | ProcessTree::Xor(v) | ProcessTree::And(v) | ProcessTree::Loop(v) => {
                v.iter().flat_map(|k| k.activities()).collect()
            }
        }
    }

    /// Every operator has at least two children and no activity occurs twice.
    pub fn is_valid(&self) -> bool {
        let acts = self.activities();
        let distinct: BTreeSet<&String> = acts.iter().collect();
        distinct.len() == acts.len() && self.arity_ok()
    }

    fn arity_ok(&self) -> bool {
        match self {
            ProcessTree::Activity(_) => true,
            ProcessTree::Seq(v) | ProcessTree::Xor(v) | ProcessTree::And(v) | ProcessTree::Loop(v) => {
                v.len() >= 2 && v.iter().all(|k| k.arity_ok())
            }
        }
    }

    /// Flattens nested operators of the same kind and orders the operands of × and ∧
    /// and the redo alternatives of ⟲.
    pub fn normalize(&self) -> ProcessTree {
        fn flat(v: &[ProcessTree], same: fn(&ProcessTree) -> Option<&Vec<ProcessTree>>) -> Vec<ProcessTree> {
            let mut out = Vec::new();
            for k in v.iter().map(|k| k.normalize()) {
                match same(&k) {
                    Some(inner) => out.extend(inner.iter().cloned()),
                    None => out.push(k),
                }
            }
            out
        }
        match self {
            ProcessTree::Activity(_) => self.clone(),
            ProcessTree::Seq(v) => ProcessTree::Seq(flat(v, |k| if let ProcessTree::Seq(x) = k { Some(x) } else { None })),
            ProcessTree::Xor(v) => {
                let mut out = flat(v, |k| if let ProcessTree::Xor(x) = k { Some(x) } else { None });
                out.sort();
                ProcessTree::Xor(out)
            }
            ProcessTree::And(v) => {
                let mut out = flat(v, |k| if let ProcessTree::And(x) = k { Some(x) } else { None });
                out.sort();
                ProcessTree::And(out)
            }
            ProcessTree::Loop(v) => {
                let body = v[0].normalize();
                let mut redos = flat(&v[1..], |k| if let ProcessTree::Xor(x) = k { Some(x) } else { None });
                redos.sort();
                let mut out = vec![body];
                out.extend(redos);
                ProcessTree::Loop(out)
            }
        }
    }

    /// Traces of the tree in which every loop body runs at most `max_loops + 1` times.
    pub fn language(&self, max_loops: usize) -> BTreeSet<Vec<String>> {
        match self {
            ProcessTree::Activity(a) => BTreeSet::from([vec![a.clone()]]),
            ProcessTree::Seq(v) => v.iter().fold(BTreeSet::from([Vec::new()]), |acc, k| {
                let next = k.language(max_loops);
                acc.iter()
                    .flat_map(|x| {
                        next.iter().map(move |y| {
                            let mut z = x.clone();
                            z.extend(y.iter().cloned());
                            z
                        })
                    })
                    .collect()
            }),
            ProcessTree::Xor(v) => v.iter().flat_map(|k| k.language(max_loops)).collect(),
            ProcessTree::And(v) => v.iter().fold(BTreeSet::from([Vec::new()]), |acc, k| {
                let next = k.language(max_loops);
                let mut out = BTreeSet::new();
                for x in &acc {
                    for y in &next {
                        shuffle(x, y, &mut Vec::new(), &mut out);
                    }
                }
                out
            }),
            ProcessTree::Loop(v) => {
                let body = v[0].language(max_loops);
                let redo: BTreeSet<Vec<String>> = v[1..].iter().flat_map(|k| k.language(max_loops)).collect();
                let mut out = body.clone();
                let mut frontier = body.clone();
                for _ in 0..max_loops {
                    let mut next = BTreeSet::new();
                    for x in &frontier {
                        for r in &redo {
                            for b in &body {
                                let mut z = x.clone();
                                z.extend(r.iter().cloned());
                                z.extend(b.iter().cloned());
                                next.insert(z);
                            }
                        }
                    }
                    out.extend(next.iter().cloned());
                    frontier = next;
                }
                out
            }
        }
    }
}

fn shuffle(x: &[String], y: &[String], prefix: &mut Vec<String>, out: &mut BTreeSet<Vec<String>>) {
    if x.is_empty() || y.is_empty() {
        let mut z = prefix.clone();
        z.extend(x.iter().chain(y).cloned());
        out.insert(z);
        return;
    }
    prefix.push(x[0].clone());
    shuffle(&x[1..], y, prefix, out);
    prefix.pop();
    prefix.push(y[0].clone());
    shuffle(x, &y[1..], prefix, out);
    prefix.pop();
}

// ---------- inductive miner ----------

/// Basic inductive miner: exclusive-choice, sequence, parallel and loop cuts on the
/// directly-follows graph, recursively. Fails when no cut applies or a sublog would
/// need a silent step.
pub fn inductive_miner(log: &EventLog) -> Result<ProcessTree> {
    let traces = log.language();
    if traces.is_empty() {
        return Err(Error::Miner("empty log".into()));
    }
    im(&traces)
}

fn describe(d: &Dfg) -> String {
    let edges: Vec<String> = d.edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
    format!("activities {:?}, starts {:?}, ends {:?}, edges [{}]", d.activities, d.starts, d.ends, edges.join(", "))
}

fn im(traces: &BTreeSet<Vec<String>>) -> Result<ProcessTree> {
    if traces.iter().any(|t| t.is_empty()) {
        return Err(Error::Miner("a sublog contains the empty trace; a silent step would be needed".into()));
    }
    let d = Dfg::of_traces(traces);
    if d.activities.len() == 1 {
        let a = d.activities.iter().next().expect("one activity").clone();
        if traces.iter().all(|t| t.len() == 1) {
            return Ok(ProcessTree::Activity(a));
        }
        return Err(Error::Miner(format!("activity {a} repeats within a trace (self-loop)")));
    }
    if let Some(parts) = xor_cut(&d) {
        let kids = parts.iter().map(|p| im(&traces.iter().filter(|t| p.contains(&t[0])).cloned().collect())).collect::<Result<Vec<_>>>()?;
        return Ok(ProcessTree::Xor(kids));
    }
    if let Some(parts) = seq_cut(&d) {
        let mut subs = vec![BTreeSet::new(); parts.len()];
        for t in traces {
            let mut segs = vec![Vec::new(); parts.len()];
            let mut last = 0;
            for a in t {
                let g = parts.iter().position(|p| p.contains(a)).expect("partition");
                if g < last {
                    return Err(Error::Miner(format!("trace {t:?} leaves the sequence order")));
                }
                last = g;
                segs[g].push(a.clone());
            }
            for (g, s) in segs.into_iter().enumerate() {
                subs[g].insert(s);
            }
        }
        let kids = subs.iter().map(im).collect::<Result<Vec<_>>>()?;
        return Ok(ProcessTree::Seq(kids));
    }
    if let Some(parts) = and_cut(&d) {
        let kids = parts
            .iter()
            .map(|p| im(&traces.iter().map(|t| t.iter().filter(|a| p.contains(*a)).cloned().collect()).collect()))
            .collect::<Result<Vec<_>>>()?;
        return Ok(ProcessTree::And(kids));
    }
    if let Some(parts) = loop_cut(&d) {
        let mut subs = vec![BTreeSet::new(); parts.len()];
        for t in traces {
            let mut cur: Option<(usize, Vec<String>)> = None;
            for a in t {
                let g = parts.iter().position(|p| p.contains(a)).expect("partition");
                match &mut cur {
                    Some((h, seg)) if *h == g => seg.push(a.clone()),
                    _ => {
                        if let Some((h, seg)) = cur.take() {
                            subs[h].insert(seg);
                        }
                        cur = Some((g, vec![a.clone()]));
                    }
                }
            }
            if let Some((h, seg)) = cur {
                subs[h].insert(seg);
            }
        }
        if subs.iter().any(|s| s.is_empty()) {
            return Err(Error::Miner(format!("loop cut with an unused part: {}", describe(&d))));
        }
        let kids = subs.iter().map(im).collect::<Result<Vec<_>>>()?;
        return Ok(ProcessTree::Loop(kids));
    }
    Err(Error::Miner(format!("no cut found: {}", describe(&d))))
}

/// Connected components of an undirected graph over `nodes`.
fn components(nodes: &BTreeSet<String>, linked: impl Fn(&str, &str) -> bool) -> Vec<BTreeSet<String>> {
    let mut left: BTreeSet<String> = nodes.clone();
    let mut out = Vec::new();
    while let Some(start) = left.iter().next().cloned() {
        left.remove(&start);
        let mut comp = BTreeSet::from([start.clone()]);
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            let next: Vec<String> = left.iter().filter(|b| linked(&a, b)).cloned().collect();
            for b in next {
                left.remove(&b);
                comp.insert(b.clone());
                stack.push(b);
            }
        }
        out.push(comp);
    }
    out
}

fn xor_cut(d: &Dfg) -> Option<Vec<BTreeSet<String>>> {
    let edge = |a: &str, b: &str| d.edges.contains(&(a.to_string(), b.to_string()));
    let comps = components(&d.activities, |a, b| edge(a, b) || edge(b, a));
    (comps.len() > 1).then_some(comps)
}

fn reachability(d: &Dfg) -> BTreeMap<String, BTreeSet<String>> {
    d.activities
        .iter()
        .map(|a| {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<String> = d.successors(a).into_iter().collect();
            while let Some(b) = stack.pop() {
                if seen.insert(b.clone()) {
                    stack.extend(d.successors(&b));
                }
            }
            (a.clone(), seen)
        })
        .collect()
}

fn seq_cut(d: &Dfg) -> Option<Vec<BTreeSet<String>>> {
    let reach = reachability(d);
    let r = |a: &str, b: &str| reach[a].contains(b);
    // strongly connected or mutually unreachable activities share a part
    let groups = components(&d.activities, |a, b| r(a, b) == r(b, a));
    if groups.len() < 2 {
        return None;
    }
    let mut groups = groups;
    let reaches = |g: &BTreeSet<String>, h: &BTreeSet<String>| g.iter().any(|a| h.iter().any(|b| r(a, b)));
    let rank: Vec<usize> =
        groups.iter().enumerate().map(|(i, g)| groups.iter().enumerate().filter(|(j, h)| i != *j && reaches(g, h)).count()).collect();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|i| std::cmp::Reverse(rank[*i]));
    groups = order.into_iter().map(|i| groups[i].clone()).collect();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            for a in &groups[i] {
                for b in &groups[j] {
                    if !r(a, b) || r(b, a) {
                        return None;
                    }
                }
            }
        }
    }
    Some(groups)
}

fn and_cut(d: &Dfg) -> Option<Vec<BTreeSet<String>>> {
    let edge = |a: &str, b: &str| d.edges.contains(&(a.to_string(), b.to_string()));
    let comps = components(&d.activities, |a, b| !(edge(a, b) && edge(b, a)));
    if comps.len() < 2 {
        return None;
    }
    let ok = comps.iter().all(|c| c.iter().any(|a| d.starts.contains(a)) && c.iter().any(|a| d.ends.contains(a)));
    ok.then_some(comps)
}

fn loop_cut(d: &Dfg) -> Option<Vec<BTreeSet<String>>> {
    let border: BTreeSet<String> = d.starts.union(&d.ends).cloned().collect();
    let edge = |a: &str, b: &str| d.edges.contains(&(a.to_string(), b.to_string()));
    let inner: BTreeSet<String> = d.activities.difference(&border).cloned().collect();
    let mut body = border.clone();
    let mut redos = Vec::new();
    for c in components(&inner, |a, b| edge(a, b) || edge(b, a)) {
        let ins: Vec<(&String, &String)> = border.iter().flat_map(|x| c.iter().map(move |y| (x, y))).filter(|(x, y)| edge(x, y)).collect();
        let outs: Vec<(&String, &String)> = c.iter().flat_map(|y| border.iter().map(move |x| (y, x))).filter(|(y, x)| edge(y, x)).collect();
        let is_redo = !ins.is_empty()
            && !outs.is_empty()
            && ins.iter().all(|(x, _)| d.ends.contains(*x))
            && outs.iter().all(|(_, x)| d.starts.contains(*x))
            && ins.iter().all(|(_, y)| d.ends.iter().all(|e| edge(e, y)))
            && outs.iter().all(|(y, _)| d.starts.iter().all(|s| edge(y, s)));
        if is_redo {
            redos.push(c);
        } else {
            body.extend(c);
        }
    }
    if redos.is_empty() {
        return None;
    }
    let mut out = vec![body];
    out.extend(redos);
    Some(out)
}

// ---------- trees as Jackson blocks ----------

struct Fresh<'a> {
    taken: &'a BTreeSet<String>,
    next: usize,
}

impl Fresh<'_> {
    fn place(&mut self) -> Term {
        loop {
            self.next += 1;
            let name = format!("p{}", self.next);
            if !self.taken.contains(&name) {
                return Term::Atom(name, Sort::Place);
            }
        }
    }
}

fn as_term(mut els: Vec<Term>) -> Term {
    if els.len() == 1 {
        els.pop().expect("one element")
    } else {
        Term::Seq(els)
    }
}

fn t_bordered(els: &[Term]) -> bool {
    els.first().is_some_and(|t| t.sort() == Sort::Transition) && els.last().is_some_and(|t| t.sort() == Sort::Transition)
}

fn place_bordered(mut els: Vec<Term>, fresh: &mut Fresh) -> Term {
    if els[0].sort() == Sort::Transition {
        els.insert(0, fresh.place());
    }
    if els[els.len() - 1].sort() == Sort::Transition {
        els.push(fresh.place());
    }
    as_term(els)
}

fn elements(tree: &ProcessTree, fresh: &mut Fresh) -> Result<Vec<Term>> {
    let unsupported = |what: &str| Err(Error::Miner(format!("{what} in {tree} needs a silent step")));
    match tree {
        ProcessTree::Activity(a) => Ok(vec![Term::Atom(a.clone(), Sort::Transition)]),
        ProcessTree::Seq(v) => {
            let mut out: Vec<Term> = Vec::new();
            for k in v {
                let els = elements(k, fresh)?;
                if let Some(last) = out.last() {
                    match (last.sort(), els[0].sort()) {
                        (Sort::Transition, Sort::Transition) => out.push(fresh.place()),
                        (Sort::Place, Sort::Place) => return unsupported("two adjacent place-bordered blocks"),
                        _ => {}
                    }
                }
                out.extend(els);
            }
            Ok(out)
        }
        ProcessTree::Xor(v) => {
            let mut alts = Vec::new();
            for k in v {
                let els = elements(k, fresh)?;
                if !t_bordered(&els) {
                    return unsupported("a choice between place-bordered blocks");
                }
                alts.push(as_term(els));
            }
            Ok(vec![Term::Choice(alts)])
        }
        ProcessTree::And(v) => {
            let kids = v.iter().map(|k| Ok(place_bordered(elements(k, fresh)?, fresh))).collect::<Result<Vec<_>>>()?;
            Ok(vec![Term::Par(kids)])
        }
        ProcessTree::Loop(v) => {
            let body = place_bordered(elements(&v[0], fresh)?, fresh);
            let mut redos = Vec::new();
            for k in &v[1..] {
                let els = elements(k, fresh)?;
                if !t_bordered(&els) {
                    return unsupported("a place-bordered redo");
                }
                redos.push(as_term(els));
            }
            Ok(vec![Term::Loop(Box::new(body), redos)])
        }
    }
}

/// Jackson term of a tree whose block starts and ends with transitions.
pub fn tree_to_term(tree: &ProcessTree) -> Result<Term> {
    let taken: BTreeSet<String> = tree.activities().into_iter().collect();
    let els = elements(tree, &mut Fresh { taken: &taken, next: 0 })?;
    if !t_bordered(&els) {
        return Err(Error::Miner(format!("{tree} does not start and end with an activity")));
    }
    Ok(as_term(els))
}

/// Block translation of a tree closed with a source and a sink place.
/// Parallel branches get their own places instead of silent split and join steps.
pub fn tree_to_wfnet(tree: &ProcessTree) -> Result<ClassicalNet> {
    let (tb, _, _) = block_net(&tree_to_term(tree)?);
    closure(&tb)
}

fn tree_of_elements(els: &[Term]) -> Result<ProcessTree> {
    let mut kids = Vec::new();
    for (i, e) in els.iter().enumerate() {
        match e {
            Term::Atom(_, Sort::Place) => {
                if i == 0 || i == els.len() - 1 {
                    continue;
                }
            }
            _ if e.sort() == Sort::Transition => kids.push(tree_of_t(e)?),
            _ => kids.push(tree_of_p(e)?),
        }
    }
    match kids.len() {
        0 => Err(Error::Miner("a block without activities needs a silent step".into())),
        1 => Ok(kids.pop().expect("one")),
        _ => Ok(ProcessTree::Seq(kids)),
    }
}

fn tree_of_t(t: &Term) -> Result<ProcessTree> {
    match t {
        Term::Atom(a, Sort::Transition) => Ok(ProcessTree::Activity(a.clone())),
        Term::Choice(v) => Ok(ProcessTree::Xor(v.iter().map(tree_of_t).collect::<Result<_>>()?)),
        Term::Seq(v) => tree_of_elements(v),
        _ => tree_of_p(t),
    }
}

fn tree_of_p(t: &Term) -> Result<ProcessTree> {
    match t {
        Term::Atom(p, Sort::Place) => Err(Error::Miner(format!("place {p} parallel to or looping on nothing needs a silent step"))),
        Term::Seq(v) => tree_of_elements(v),
        Term::Par(v) => Ok(ProcessTree::And(v.iter().map(tree_of_p).collect::<Result<_>>()?)),
        Term::Loop(body, redos) => {
            let mut kids = vec![tree_of_p(body)?];
            for r in redos {
                kids.push(tree_of_t(r)?);
            }
            Ok(ProcessTree::Loop(kids))
        }
        _ => tree_of_t(t),
    }
}

/// The process tree whose block translation is isomorphic to a transition-bordered net,
/// if there is one. Decides membership in the class the inductive miner rediscovers.
pub fn tree_of_bordered_net(tb: &ClassicalNet) -> Result<ProcessTree> {
    let w = closure(tb)?;
    let term = reduce_to_term(&w).ok_or_else(|| Error::Miner("the closure is not a Jackson net".into()))?;
    let els = match normalize(&term) {
        Term::Seq(v) if v.len() >= 3 => v,
        _ => return Err(Error::Miner("closure does not reduce to source; block; sink".into())),
    };
    let tree = tree_of_elements(&els)?.normalize();
    if !tree.is_valid() {
        return Err(Error::Miner(format!("{tree} is not a valid tree")));
    }
    let back = strip(&tree_to_wfnet(&tree)?)?;
    if !classical_isomorphic(&back, tb, true) {
        return Err(Error::Miner(format!("the translation of {tree} differs from the net")));
    }
    Ok(tree)
}

// ---------- alpha miner ----------

/// Classical alpha algorithm with source place `i` and sink place `f`.
pub fn alpha_miner(log: &EventLog) -> Result<ClassicalNet> {
    let traces = log.language();
    if traces.is_empty() {
        return Err(Error::Miner("empty log".into()));
    }
    let d = Dfg::of_traces(&traces);
    let follows = |a: &str, b: &str| d.edges.contains(&(a.to_string(), b.to_string()));
    let causal = |a: &str, b: &str| follows(a, b) && !follows(b, a);
    let unrelated = |a: &str, b: &str| !follows(a, b) && !follows(b, a);
    let acts: Vec<String> = d.activities.iter().cloned().collect();
    let valid = |a: &BTreeSet<String>, b: &BTreeSet<String>| {
        a.iter().all(|x| b.iter().all(|y| causal(x, y)))
            && a.iter().all(|x| a.iter().all(|y| unrelated(x, y)))
            && b.iter().all(|x| b.iter().all(|y| unrelated(x, y)))
    };
    let mut seen: BTreeSet<(BTreeSet<String>, BTreeSet<String>)> = BTreeSet::new();
    let mut queue: VecDeque<(BTreeSet<String>, BTreeSet<String>)> = VecDeque::new();
    for a in &acts {
        for b in &acts {
            if causal(a, b) {
                let pair = (BTreeSet::from([a.clone()]), BTreeSet::from([b.clone()]));
                if valid(&pair.0, &pair.1) && seen.insert(pair.clone()) {
                    queue.push_back(pair);
                }
            }
        }
    }
    while let Some((a, b)) = queue.pop_front() {
        for x in &acts {
            for grow_left in [true, false] {
                let (mut a2, mut b2) = (a.clone(), b.clone());
                let fresh = if grow_left { a2.insert(x.clone()) } else { b2.insert(x.clone()) };
                if fresh && valid(&a2, &b2) && seen.insert((a2.clone(), b2.clone())) {
                    queue.push_back((a2, b2));
                }
            }
        }
    }
    let maximal: Vec<&(BTreeSet<String>, BTreeSet<String>)> =
        seen.iter().filter(|(a, b)| !seen.iter().any(|(c, e)| (c, e) != (a, b) && a.is_subset(c) && b.is_subset(e))).collect();
    let mut net = ClassicalNet { transitions: d.activities.clone(), ..ClassicalNet::default() };
    let taken: BTreeSet<String> = d.activities.clone();
    let mut fresh = Fresh { taken: &taken, next: 0 };
    let mut name = || match fresh.place() {
        Term::Atom(n, _) => n,
        _ => unreachable!("fresh places are atoms"),
    };
    for (a, b) in maximal {
        let p = name();
        net.places.insert(p.clone());
        for x in a {
            net.arcs.insert((x.clone(), p.clone()));
        }
        for y in b {
            net.arcs.insert((p.clone(), y.clone()));
        }
    }
    let tb = net;
    let mut w = closure(&ClassicalNet { ..tb.clone() }).unwrap_or(tb.clone());
    // the border is defined by the log, not by empty presets
    w.arcs.retain(|(x, y)| !(w.source.as_ref() == Some(x) || w.sink.as_ref() == Some(y)));
    let (i, f) = (w.source.clone().unwrap_or_else(|| "i".into()), w.sink.clone().unwrap_or_else(|| "f".into()));
    w.places.insert(i.clone());
    w.places.insert(f.clone());
    for s in &d.starts {
        w.arcs.insert((i.clone(), s.clone()));
    }
    for e in &d.ends {
        w.arcs.insert((e.clone(), f.clone()));
    }
    w.source = Some(i);
    w.sink = Some(f);
    Ok(w)
}

// ---------- retyping and the pipeline ----------

/// Typed fragment of a transition-bordered net: every place typed `ups`, every arc
/// inscribed with the variables of `ups`, places renamed as projections rename them.
pub fn retype(tb: &ClassicalNet, ups: &TypeSet, var_of: &BTreeMap<String, String>) -> Net {
    let vars: Vec<String> = ups.iter().map(|l| var_of.get(l).cloned().unwrap_or_else(|| l.clone())).collect();
    let sig: String = vars.concat();
    let mut n = Net::new();
    for (l, v) in ups.iter().zip(&vars) {
        n = n.with_var(v, l);
    }
    let rename = |p: &str| format!("{p}_{sig}");
    for p in &tb.places {
        n.places.insert(rename(p), PlaceType::of(ups.iter().cloned()));
    }
    n.transitions = tb.transitions.clone();
    for (a, b) in &tb.arcs {
        let key = if tb.places.contains(a) { (rename(a), b.clone()) } else { (a.clone(), rename(b)) };
        n.arcs.insert(key, Inscription::single(vars.clone()));
    }
    n
}

/// Discovery backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Miner {
    Inductive,
    Alpha,
}

/// Discovered WF-net for one log; the inductive miner also returns its tree.
pub fn discover(log: &EventLog, miner: Miner) -> Result<(ClassicalNet, Option<ProcessTree>)> {
    match miner {
        Miner::Inductive => {
            let tree = inductive_miner(log)?;
            Ok((tree_to_wfnet(&tree)?, Some(tree)))
        }
        Miner::Alpha => Ok((alpha_miner(log)?, None)),
    }
}

/// Per type set outcome of the rediscovery pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct TypeSetReport {
    pub types: Vec<String>,
    pub traces: usize,
    pub tree: Option<String>,
    pub error: Option<String>,
    /// Whether the stripped discovered net is isomorphic to the reference projection.
    pub matches_projection: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rediscovery {
    pub per_type_set: Vec<TypeSetReport>,
    #[serde(skip)]
    pub net: Option<Net>,
}

impl Rediscovery {
    pub fn succeeded(&self) -> bool {
        self.net.is_some()
    }
}

/// Induces a log for every nonempty subset of `types`, discovers and retypes a fragment
/// for each, and composes the fragments. Empty logs contribute no fragment.
pub fn rediscover(seq: &FiringSequence, types: &[String], miner: Miner, reference: Option<&Net>, drop_minors: bool) -> Result<Rediscovery> {
    if types.is_empty() {
        return Err(Error::Invalid("no types to rediscover".into()));
    }
    if types.len() > crate::projection::MAX_RECONSTRUCT_TYPES {
        return Err(Error::Invalid(format!("{} types exceed the subset guard", types.len())));
    }
    let mut var_of: BTreeMap<String, String> = BTreeMap::new();
    for (v, l) in &seq.variables {
        if var_of.insert(l.clone(), v.clone()).is_some() {
            return Err(Error::Invalid(format!("type `{l}` has several variables")));
        }
    }
    let mut shell = Net::new();
    for l in types {
        shell = shell.with_type(l);
    }
    let mut fragments = Vec::new();
    let mut reports = Vec::new();
    let mut failed = false;
    for ups in type_subsets(&shell) {
        let log = induced_log(seq, &ups);
        let mut rep = TypeSetReport {
            types: ups.iter().cloned().collect(),
            traces: log.traces.len(),
            tree: None,
            error: None,
            matches_projection: None,
        };
        if log.is_empty() {
            rep.matches_projection = reference.map(|r| project(r, &ups).map(|p| p.transitions.is_empty()).unwrap_or(false));
            reports.push(rep);
            continue;
        }
        match discover(&log, miner).and_then(|(w, tree)| Ok((strip(&w)?, tree))) {
            Ok((tb, tree)) => {
                rep.tree = tree.map(|t| t.to_string());
                if let Some(r) = reference {
                    rep.matches_projection = Some(project(r, &ups).is_ok_and(|p| classical_isomorphic(&underlying(&p), &tb, true)));
                }
                fragments.push(retype(&tb, &ups, &var_of));
            }
            Err(e) => {
                failed = true;
                rep.error = Some(e.to_string());
            }
        }
        reports.push(rep);
    }
    let net = if failed {
        None
    } else {
        let n = compose_all(&fragments)?;
        Some(if drop_minors { remove_minors(&n) } else { n })
    };
    Ok(Rediscovery { per_type_set: reports, net })
}

/// Structural and behavioural comparison of an original net and its rediscovery.
#[derive(Clone, Debug, Serialize)]
pub struct RediscoveryCheck {
    pub iso_modulo_minors: MinorIsoReport,
    pub bisimulation: BisimReport,
    /// Per type set: whether both nets, minors removed, have isomorphic projections.
    pub projections: Vec<(Vec<String>, bool)>,
}

impl RediscoveryCheck {
    pub fn holds(&self) -> bool {
        self.iso_modulo_minors.holds && self.bisimulation.holds && self.projections.iter().all(|(_, ok)| *ok)
    }
}

pub fn verify_rediscovery(original: &Net, rediscovered: &Net, bound: &ExplorationBound) -> RediscoveryCheck {
    let m0 = Marking::new();
    let bisimulation = strong_bisim(&state_space(original, &m0, bound), &state_space(rediscovered, &m0, bound), true);
    let (a, b) = (remove_minors(original), remove_minors(rediscovered));
    let projections = type_subsets(original)
        .into_iter()
        .map(|u| {
            let same = match (project(&a, &u), project(&b, &u)) {
                (Ok(a), Ok(b)) => net_isomorphic(&a, &b).is_some(),
                _ => false,
            };
            (u.into_iter().collect(), same)
        })
        .collect();
    RediscoveryCheck { iso_modulo_minors: iso_modulo_minors(original, rediscovered), bisimulation, projections }
}

// ---------- logs covering the directly-follows relations ----------

/// Shortest edge paths from the initial state, and from every state back to it.
fn routes(ss: &StateSpace) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n = ss.len();
    let mut to = vec![None; n];
    let mut seen = vec![false; n];
    seen[ss.initial] = true;
    let mut q = VecDeque::from([ss.initial]);
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut inn: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in ss.edges.iter().enumerate() {
        out[e.src].push(i);
        inn[e.tgt].push(i);
    }
    while let Some(s) = q.pop_front() {
        for &i in &out[s] {
            let t = ss.edges[i].tgt;
            if !seen[t] {
                seen[t] = true;
                to[t] = Some(i);
                q.push_back(t);
            }
        }
    }
    let mut home = vec![None; n];
    let mut seen = vec![false; n];
    seen[ss.initial] = true;
    let mut q = VecDeque::from([ss.initial]);
    while let Some(s) = q.pop_front() {
        for &i in &inn[s] {
            let src = ss.edges[i].src;
            if !seen[src] {
                seen[src] = true;
                home[src] = Some(i);
                q.push_back(src);
            }
        }
    }
    (to, home)
}

fn path_from_initial(ss: &StateSpace, to: &[Option<usize>], s: usize) -> Vec<usize> {
    let mut path = Vec::new();
    let mut cur = s;
    while let Some(e) = to[cur] {
        path.push(e);
        cur = ss.edges[e].src;
    }
    path.reverse();
    path
}

fn path_home(ss: &StateSpace, home: &[Option<usize>], s: usize) -> Result<Vec<usize>> {
    let mut path = Vec::new();
    let mut cur = s;
    while cur != ss.initial {
        let e = home[cur].ok_or_else(|| Error::Invalid("a state cannot return to the initial marking".into()))?;
        path.push(e);
        cur = ss.edges[e].tgt;
    }
    Ok(path)
}

/// Identifiers a step binds to variables of the given types, in target-state names;
/// None when one of them is consumed by the step.
fn tracked_after(ss: &StateSpace, e: usize, types: &BTreeSet<usize>) -> Option<Vec<u32>> {
    let c = &ss.compiled;
    let edge = &ss.edges[e];
    let emitted: &Vec<usize> = &c.emitting[edge.transition];
    let mut out = Vec::new();
    for &(v, id) in &edge.binding {
        if !types.contains(&c.var_type[v]) {
            continue;
        }
        if emitted.contains(&v) {
            out.push(id);
        } else {
            out.push(edge.id_map.iter().find(|(a, _)| *a == id)?.1?);
        }
    }
    out.sort();
    Some(out)
}

fn binds_all(ss: &StateSpace, e: usize, ids: &[u32]) -> bool {
    let edge = &ss.edges[e];
    let emitted = &ss.compiled.emitting[edge.transition];
    ids.iter().all(|id| edge.binding.iter().any(|(v, b)| b == id && !emitted.contains(v)))
}

fn follow(ss: &StateSpace, e: usize, ids: &[u32]) -> Option<Vec<u32>> {
    let map = &ss.edges[e].id_map;
    let mut out = ids.iter().map(|id| map.iter().find(|(a, _)| a == id).and_then(|(_, b)| *b)).collect::<Option<Vec<_>>>()?;
    out.sort();
    Some(out)
}

/// Episodes over the bounded state space: one per edge, from the initial marking and back,
/// plus one per pair of consecutive events of a case of every type set, so that every
/// induced log shows every directly-follows pair the bounded behaviour allows.
pub fn covering_sequence(net: &Net, bound: &ExplorationBound) -> Result<FiringSequence> {
    let ss = explore(net, &Marking::new(), bound);
    if ss.truncated {
        return Err(Error::Invalid(format!("state space truncated at {} states", ss.len())));
    }
    let (to, home) = routes(&ss);
    let mut episodes: Vec<Vec<usize>> = Vec::new();
    let mut covered = vec![false; ss.edges.len()];
    for e in 0..ss.edges.len() {
        if covered[e] {
            continue;
        }
        let mut ep = path_from_initial(&ss, &to, ss.edges[e].src);
        ep.push(e);
        ep.extend(path_home(&ss, &home, ss.edges[e].tgt)?);
        for &x in &ep {
            covered[x] = true;
        }
        episodes.push(ep);
    }
    let c = &ss.compiled;
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); ss.len()];
    for (i, e) in ss.edges.iter().enumerate() {
        out[e.src].push(i);
    }
    for ups in type_subsets(net) {
        let tys: BTreeSet<usize> = ups.iter().filter_map(|l| c.types.iter().position(|t| t == l)).collect();
        let keep = projected_transitions(net, &ups);
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for ea in 0..ss.edges.len() {
            if !keep.contains(&c.transitions[ss.edges[ea].transition]) {
                continue;
            }
            let Some(ids) = tracked_after(&ss, ea, &tys) else { continue };
            let start = (ss.edges[ea].tgt, ids);
            let mut parent: HashMap<(usize, Vec<u32>), (usize, Option<(usize, Vec<u32>)>)> = HashMap::new();
            parent.insert(start.clone(), (ea, None));
            let mut q = VecDeque::from([start]);
            while let Some((s, ids)) = q.pop_front() {
                for &eb in &out[s] {
                    let tb = ss.edges[eb].transition;
                    if keep.contains(&c.transitions[tb]) && binds_all(&ss, eb, &ids) {
                        let pair = (ss.edges[ea].transition, tb);
                        if pairs.insert(pair) {
                            let mut mid = vec![eb];
                            let mut cur = (s, ids.clone());
                            while let Some((edge, prev)) = parent.get(&cur).cloned() {
                                match prev {
                                    Some(p) => {
                                        mid.push(edge);
                                        cur = p;
                                    }
                                    None => break,
                                }
                            }
                            mid.reverse();
                            let mut ep = path_from_initial(&ss, &to, ss.edges[ea].src);
                            ep.push(ea);
                            ep.extend(mid);
                            ep.extend(path_home(&ss, &home, ss.edges[eb].tgt)?);
                            episodes.push(ep);
                        }
                        continue;
                    }
                    if let Some(next) = follow(&ss, eb, &ids) {
                        let key = (ss.edges[eb].tgt, next);
                        if !parent.contains_key(&key) {
                            parent.insert(key.clone(), (eb, Some((s, ids.clone()))));
                            q.push_back(key);
                        }
                    }
                }
            }
        }
    }
    Ok(concretize(&ss, net, &episodes))
}

/// Turns edge paths that start and end in the initial state into one firing sequence
/// with globally fresh identifier names.
fn concretize(ss: &StateSpace, net: &Net, episodes: &[Vec<usize>]) -> FiringSequence {
    let c = &ss.compiled;
    let mut seq = FiringSequence::new(net.variables.clone());
    let mut counters: BTreeMap<usize, usize> = BTreeMap::new();
    for ep in episodes {
        let mut names: HashMap<u32, String> = HashMap::new();
        for &e in ep {
            let edge = &ss.edges[e];
            let emitted = &c.emitting[edge.transition];
            let mut binding = BTreeMap::new();
            let mut fresh: HashMap<u32, String> = HashMap::new();
            for &(v, id) in &edge.binding {
                let name = if emitted.contains(&v) {
                    let ty = c.var_type[v];
                    let n = counters.entry(ty).or_insert(0);
                    *n += 1;
                    let name = format!("{}{}", c.types[ty], n);
                    fresh.insert(id, name.clone());
                    name
                } else {
                    names[&id].clone()
                };
                binding.insert(c.vars[v].clone(), name);
            }
            let mut next: HashMap<u32, String> = fresh;
            for (a, b) in &edge.id_map {
                if let Some(b) = b {
                    next.insert(*b, names[a].clone());
                }
            }
            names = next;
            seq.records.push(FiringRecord { transition: c.transitions[edge.transition].clone(), binding });
        }
    }
    seq
}

// ---------- class membership for rediscovery ----------

/// A type set for which a rediscovery premise or outcome fails.
#[derive(Clone, Debug, Serialize)]
pub struct Exclusion {
    pub types: Vec<String>,
    pub reason: String,
}

/// Per type set checks of a net and a firing sequence against the rediscovery premises.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PremiseReport {
    /// Projections that are not atomic or not the block translation of a process tree.
    pub structural: Vec<Exclusion>,
    /// Structurally in-class projections whose closure does not replay the induced log.
    pub replay: Vec<Exclusion>,
    /// Structurally in-class projections whose induced log is not directly-follows complete.
    pub df_incomplete: Vec<Exclusion>,
}

impl PremiseReport {
    /// Projections are in the miner's class and every induced log is directly-follows complete.
    pub fn in_class(&self) -> bool {
        self.structural.is_empty() && self.df_incomplete.is_empty()
    }
}

/// Checks every type set: the projection is atomic and a block translation of a process
/// tree; its closure replays the log induced by `seq`; that log is directly-follows complete.
/// Projections without transitions pass.
pub fn rediscovery_premises(net: &Net, seq: &FiringSequence, max_states: usize) -> PremiseReport {
    let mut rep = PremiseReport::default();
    for ups in type_subsets(net) {
        let types: Vec<String> = ups.iter().cloned().collect();
        let ex = |reason: String| Exclusion { types: types.clone(), reason };
        let p = match project(net, &ups) {
            Ok(p) => p,
            Err(e) => {
                rep.structural.push(ex(e.to_string()));
                continue;
            }
        };
        if p.transitions.is_empty() {
            continue;
        }
        if !matches!(is_tjn(&p).verdict, TjnVerdict::Atomic) {
            rep.structural.push(ex("projection is not atomic".into()));
            continue;
        }
        let tb = underlying(&p);
        if let Err(e) = tree_of_bordered_net(&tb) {
            rep.structural.push(ex(format!("projection is not a block translation of a process tree: {e}")));
            continue;
        }
        let w = closure(&tb).expect("a tree translation has a border");
        let log = induced_log(seq, &ups);
        let m0 = initial_marking(&w).expect("closure has a border");
        match generated_by(&log, &w, &m0) {
            Ok(g) if g.holds => {}
            Ok(g) => {
                let (t, i) = g.failing.expect("failing trace");
                rep.replay.push(ex(format!("case {:?} trace {:?} rejected at event {i}", t.case, t.trace)));
            }
            Err(e) => rep.replay.push(ex(e.to_string())),
        }
        match df_complete(&log, &w, max_states) {
            Ok(d) if d.holds => {}
            Ok(d) => {
                let missing: Vec<String> = d.model.edges.difference(&d.log.edges).map(|(a, b)| format!("{a}->{b}")).collect();
                let extra: Vec<String> = d.log.edges.difference(&d.model.edges).map(|(a, b)| format!("{a}->{b}")).collect();
                rep.df_incomplete.push(ex(format!(
                    "directly-follows graph differs; missing [{}], extra [{}]",
                    missing.join(", "),
                    extra.join(", ")
                )));
            }
            Err(e) => rep.df_incomplete.push(ex(e.to_string())),
        }
    }
    rep
}
