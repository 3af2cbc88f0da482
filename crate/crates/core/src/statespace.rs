//! Bounded canonical state spaces, identifier soundness and liveness.
//!
//! Markings are explored up to a type-preserving renaming of identifiers.
//! Identifiers are packed as `type << 20 | n`; the canonical form numbers
//! the identifiers of each type by colour refinement plus individualisation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::lts::{Label, Lts};
use crate::model::{Marking, Net};
use crate::semantics::ExplorationBound;

const SHIFT: u32 = 20;

fn pack(ty: usize, n: u32) -> u32 {
    ((ty as u32) << SHIFT) | n
}

fn ty_of(id: u32) -> usize {
    (id >> SHIFT) as usize
}

fn num_of(id: u32) -> u32 {
    id & ((1 << SHIFT) - 1)
}

/// Index-based view of a net for fast exploration.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub types: Vec<String>,
    pub places: Vec<String>,
    pub place_types: Vec<Vec<usize>>,
    pub vars: Vec<String>,
    pub var_type: Vec<usize>,
    pub transitions: Vec<String>,
    pub inputs: Vec<Vec<(usize, Vec<usize>)>>,
    pub outputs: Vec<Vec<(usize, Vec<usize>)>>,
    pub emitting: Vec<Vec<usize>>,
    pub collecting: Vec<Vec<usize>>,
}

impl Compiled {
    pub fn new(net: &Net) -> Compiled {
        let mut types: BTreeSet<String> = net.types.iter().cloned().collect();
        types.extend(net.variables.values().cloned());
        types.extend(net.used_types());
        let types: Vec<String> = types.into_iter().collect();
        let tix = |t: &str| types.iter().position(|x| x == t).expect("collected type");
        let places: Vec<String> = net.places.keys().cloned().collect();
        let place_types = net.places.values().map(|pt| pt.0.iter().map(|l| tix(l)).collect()).collect();
        let vars: Vec<String> = net.variables.keys().cloned().collect();
        let var_type = net.variables.values().map(|t| tix(t)).collect();
        let vix = |v: &str| vars.iter().position(|x| x == v).expect("declared variable");
        let pix = |p: &str| places.iter().position(|x| x == p).expect("known place");
        let transitions: Vec<String> = net.transitions.iter().cloned().collect();
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut emitting = Vec::new();
        let mut collecting = Vec::new();
        for t in &transitions {
            let arcs = |list: Vec<(&String, &crate::model::Inscription)>| {
                let mut out = Vec::new();
                for (p, ins) in list {
                    for vec in ins.vectors() {
                        out.push((pix(p), vec.iter().map(|v| vix(v)).collect()));
                    }
                }
                out
            };
            inputs.push(arcs(net.input_arcs(t)));
            outputs.push(arcs(net.output_arcs(t)));
            let vs = net.variable_sets(t).expect("known transition");
            emitting.push(vs.emitting.iter().map(|v| vix(v)).collect());
            collecting.push(vs.collecting.iter().map(|v| vix(v)).collect());
        }
        Compiled { types, places, place_types, vars, var_type, transitions, inputs, outputs, emitting, collecting }
    }

    pub fn id_name(&self, id: u32) -> String {
        format!("{}{}", self.types[ty_of(id)], num_of(id) + 1)
    }

    pub fn marking_name(&self, m: &CMarking) -> String {
        let mut parts = Vec::new();
        for (p, toks) in m.iter().enumerate() {
            if toks.is_empty() {
                continue;
            }
            let ts: Vec<String> =
                toks.iter().map(|t| format!("<{}>", t.iter().map(|i| self.id_name(*i)).collect::<Vec<_>>().join(","))).collect();
            parts.push(format!("{}:{}", self.places[p], ts.join("")));
        }
        format!("[{}]", parts.join(" "))
    }

    /// Converts a marking, numbering identifiers per type in name order.
    pub fn compile_marking(&self, m: &Marking) -> CMarking {
        let mut numbering: HashMap<(usize, String), u32> = HashMap::new();
        let mut next = vec![0u32; self.types.len()];
        let mut out = vec![Vec::new(); self.places.len()];
        for (p, bag) in &m.0 {
            let Some(pi) = self.places.iter().position(|x| x == p) else { continue };
            for (vec, n) in bag {
                let tok: Vec<u32> = vec
                    .iter()
                    .zip(&self.place_types[pi])
                    .map(|(name, &ty)| {
                        *numbering.entry((ty, name.clone())).or_insert_with(|| {
                            next[ty] += 1;
                            pack(ty, next[ty] - 1)
                        })
                    })
                    .collect();
                for _ in 0..*n {
                    out[pi].push(tok.clone());
                }
            }
        }
        for toks in &mut out {
            toks.sort();
        }
        out
    }

    pub fn to_marking(&self, m: &CMarking) -> Marking {
        let mut out = Marking::new();
        for (p, toks) in m.iter().enumerate() {
            for t in toks {
                out.add(&self.places[p], t.iter().map(|i| self.id_name(*i)).collect(), 1);
            }
        }
        out
    }
}

/// Per-place sorted token lists.
pub type CMarking = Vec<Vec<Vec<u32>>>;

fn ids_of(m: &CMarking) -> BTreeSet<u32> {
    m.iter().flatten().flatten().copied().collect()
}

/// Canonical representative of a marking under type-preserving renaming, plus the renaming used.
pub fn canonicalize(m: &CMarking) -> (CMarking, HashMap<u32, u32>) {
    let ids: Vec<u32> = ids_of(m).into_iter().collect();
    if ids.is_empty() {
        return (m.clone(), HashMap::new());
    }
    let index: HashMap<u32, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    // occurrences: (place, position, token index) with tokens deduplicated with counts
    let mut tokens: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for (p, toks) in m.iter().enumerate() {
        let mut i = 0;
        while i < toks.len() {
            let mut j = i;
            while j < toks.len() && toks[j] == toks[i] {
                j += 1;
            }
            tokens.push((p, toks[i].iter().map(|id| index[id]).collect(), j - i));
            i = j;
        }
    }
    let mut occ: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); ids.len()];
    for (ti, (p, tok, _)) in tokens.iter().enumerate() {
        for (pos, &i) in tok.iter().enumerate() {
            occ[i].push((*p, pos, ti));
        }
    }
    let colors: Vec<u64> = ids.iter().map(|id| ty_of(*id) as u64).collect();
    let ctx = Ctx { ids: &ids, tokens: &tokens, occ: &occ, places: m.len() };
    let (best, mapping) = ctx.search(colors);
    (best, mapping)
}

struct Ctx<'a> {
    ids: &'a [u32],
    tokens: &'a [(usize, Vec<usize>, usize)],
    occ: &'a [Vec<(usize, usize, usize)>],
    places: usize,
}

impl Ctx<'_> {
    fn refine(&self, mut colors: Vec<u64>) -> Vec<u64> {
        let mut classes = distinct(&colors);
        loop {
            let sigs: Vec<(u64, Vec<(usize, usize, Vec<u64>, usize)>)> = (0..self.ids.len())
                .map(|i| {
                    let mut s: Vec<(usize, usize, Vec<u64>, usize)> = self.occ[i]
                        .iter()
                        .map(|(p, pos, ti)| {
                            let (_, tok, n) = &self.tokens[*ti];
                            (*p, *pos, tok.iter().map(|j| colors[*j]).collect(), *n)
                        })
                        .collect();
                    s.sort();
                    (colors[i], s)
                })
                .collect();
            let mut sorted: Vec<&(u64, Vec<(usize, usize, Vec<u64>, usize)>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            let next: Vec<u64> = sigs.iter().map(|s| sorted.binary_search(&s).expect("present") as u64).collect();
            let n = distinct(&next);
            colors = next;
            if n == classes {
                return colors;
            }
            classes = n;
        }
    }

    fn search(&self, colors: Vec<u64>) -> (CMarking, HashMap<u32, u32>) {
        let colors = self.refine(colors);
        let mut count: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, c) in colors.iter().enumerate() {
            count.entry(*c).or_default().push(i);
        }
        if let Some((_, class)) = count.iter().find(|(_, v)| v.len() > 1) {
            let mut best: Option<(CMarking, HashMap<u32, u32>)> = None;
            for &i in class {
                let mut c2: Vec<u64> = colors.iter().map(|c| 2 * c + 1).collect();
                c2[i] = 2 * colors[i];
                let cand = self.search(c2);
                if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                    best = Some(cand);
                }
            }
            return best.expect("nonempty class");
        }
        // discrete: number each type's identifiers by colour order
        let mut order: Vec<usize> = (0..self.ids.len()).collect();
        order.sort_by_key(|&i| (ty_of(self.ids[i]), colors[i]));
        let mut mapping = HashMap::new();
        let mut next: BTreeMap<usize, u32> = BTreeMap::new();
        for i in order {
            let ty = ty_of(self.ids[i]);
            let n = next.entry(ty).or_insert(0);
            mapping.insert(self.ids[i], pack(ty, *n));
            *n += 1;
        }
        let mut out: CMarking = vec![Vec::new(); self.places];
        for (p, tok, n) in self.tokens {
            let t: Vec<u32> = tok.iter().map(|j| mapping[&self.ids[*j]]).collect();
            for _ in 0..*n {
                out[*p].push(t.clone());
            }
        }
        for toks in &mut out {
            toks.sort();
        }
        (out, mapping)
    }
}

fn distinct(c: &[u64]) -> usize {
    c.iter().collect::<BTreeSet<_>>().len()
}

/// Enabled bindings (per variable an identifier, fresh ones included), and whether
/// the bound suppressed bindings that would otherwise be enabled.
fn bindings(c: &Compiled, m: &CMarking, t: usize, k: usize) -> (Vec<Vec<Option<u32>>>, bool) {
    let ids = ids_of(m);
    let mut live = vec![0usize; c.types.len()];
    for id in &ids {
        live[ty_of(*id)] += 1;
    }
    let mut emit = vec![0usize; c.types.len()];
    for &v in &c.emitting[t] {
        emit[c.var_type[v]] += 1;
    }
    let suppressed = (0..c.types.len()).any(|ty| emit[ty] > 0 && live[ty] + emit[ty] > k);
    let mut found = BTreeSet::new();
    let mut assign = vec![None; c.vars.len()];
    match_inputs(m, &c.inputs[t], 0, &mut assign, &mut found);
    let mut out = Vec::new();
    for mut a in found {
        // multiset containment
        let mut need: BTreeMap<(usize, Vec<u32>), usize> = BTreeMap::new();
        for (p, vec) in &c.inputs[t] {
            let tok: Vec<u32> = vec.iter().map(|v| a[*v].expect("bound")).collect();
            *need.entry((*p, tok)).or_insert(0) += 1;
        }
        if need.iter().any(|((p, tok), n)| m[*p].iter().filter(|x| *x == tok).count() < *n) {
            continue;
        }
        let mut used: BTreeSet<u32> = ids.clone();
        for &v in &c.emitting[t] {
            let ty = c.var_type[v];
            let n = (0..).find(|n| !used.contains(&pack(ty, *n))).expect("unbounded");
            used.insert(pack(ty, n));
            a[v] = Some(pack(ty, n));
        }
        if suppressed {
            return (Vec::new(), true);
        }
        out.push(a);
    }
    (out, false)
}

fn match_inputs(
    m: &CMarking,
    slots: &[(usize, Vec<usize>)],
    i: usize,
    assign: &mut Vec<Option<u32>>,
    found: &mut BTreeSet<Vec<Option<u32>>>,
) {
    if i == slots.len() {
        found.insert(assign.clone());
        return;
    }
    let (p, vec) = &slots[i];
    let mut prev: Option<&Vec<u32>> = None;
    for tok in &m[*p] {
        if prev == Some(tok) {
            continue;
        }
        prev = Some(tok);
        let mut added = Vec::new();
        let mut ok = true;
        for (v, id) in vec.iter().zip(tok) {
            match assign[*v] {
                Some(b) if b != *id => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    if assign.contains(&Some(*id)) {
                        ok = false;
                        break;
                    }
                    assign[*v] = Some(*id);
                    added.push(*v);
                }
            }
        }
        if ok {
            match_inputs(m, slots, i + 1, assign, found);
        }
        for v in added {
            assign[v] = None;
        }
    }
}

fn fire_compiled(c: &Compiled, m: &CMarking, t: usize, a: &[Option<u32>]) -> CMarking {
    let mut next = m.clone();
    for (p, vec) in &c.inputs[t] {
        let tok: Vec<u32> = vec.iter().map(|v| a[*v].expect("bound")).collect();
        let pos = next[*p].iter().position(|x| *x == tok).expect("enabled");
        next[*p].remove(pos);
    }
    for (p, vec) in &c.outputs[t] {
        next[*p].push(vec.iter().map(|v| a[*v].expect("bound")).collect());
    }
    for toks in &mut next {
        toks.sort();
    }
    next
}

#[derive(Clone, Debug)]
pub struct StateEdge {
    pub src: usize,
    pub tgt: usize,
    pub transition: usize,
    /// Binding in source-state names; emitted identifiers in target-state names.
    pub binding: Vec<(usize, u32)>,
    /// Every identifier of the source and its name in the target, if still present.
    pub id_map: Vec<(u32, Option<u32>)>,
    /// Types of collecting variables whose identifier is still present after firing.
    pub improper: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct StateSpace {
    pub compiled: Compiled,
    pub states: Vec<CMarking>,
    pub initial: usize,
    pub edges: Vec<StateEdge>,
    pub truncated: bool,
    /// States where the identifier bound suppressed an otherwise enabled binding.
    pub bound_blocked: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    Transition,
    Binding,
}

/// Breadth-first exploration over canonical markings.
pub fn explore(net: &Net, m0: &Marking, bound: &ExplorationBound) -> StateSpace {
    let c = Compiled::new(net);
    let (init, _) = canonicalize(&c.compile_marking(m0));
    let mut index: HashMap<CMarking, usize> = HashMap::new();
    let mut states = vec![init.clone()];
    index.insert(init, 0);
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut bound_blocked = vec![false];
    let mut q = VecDeque::from([0usize]);
    while let Some(s) = q.pop_front() {
        let m = states[s].clone();
        for t in 0..c.transitions.len() {
            let (found, suppressed) = bindings(&c, &m, t, bound.max_ids_per_type);
            bound_blocked[s] |= suppressed;
            for a in found {
                let raw = fire_compiled(&c, &m, t, &a);
                let (canon, mapping) = canonicalize(&raw);
                let improper: Vec<usize> = c.collecting[t]
                    .iter()
                    .filter(|v| {
                        let id = a[**v].expect("bound");
                        raw.iter().flatten().any(|tok| tok.contains(&id))
                    })
                    .map(|v| c.var_type[*v])
                    .collect();
                let tgt = match index.get(&canon) {
                    Some(&i) => i,
                    None => {
                        if states.len() >= bound.max_states {
                            truncated = true;
                            continue;
                        }
                        states.push(canon.clone());
                        bound_blocked.push(false);
                        index.insert(canon, states.len() - 1);
                        q.push_back(states.len() - 1);
                        states.len() - 1
                    }
                };
                let emitted: BTreeSet<usize> = c.emitting[t].iter().copied().collect();
                let binding = a
                    .iter()
                    .enumerate()
                    .filter_map(|(v, id)| id.map(|id| (v, if emitted.contains(&v) { mapping.get(&id).copied().unwrap_or(id) } else { id })))
                    .collect();
                let id_map = ids_of(&m).into_iter().map(|id| (id, mapping.get(&id).copied())).collect();
                edges.push(StateEdge { src: s, tgt, transition: t, binding, id_map, improper });
            }
        }
    }
    StateSpace { compiled: c, states, initial: 0, edges, truncated, bound_blocked }
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn edge_label(&self, e: &StateEdge, mode: LabelMode) -> Label {
        let t = &self.compiled.transitions[e.transition];
        match mode {
            LabelMode::Transition => Label::Act(t.clone()),
            LabelMode::Binding => {
                let parts: Vec<String> =
                    e.binding.iter().map(|(v, id)| format!("{}={}", self.compiled.vars[*v], self.compiled.id_name(*id))).collect();
                Label::Act(format!("{t}({})", parts.join(",")))
            }
        }
    }

    pub fn lts(&self, mode: LabelMode) -> Lts {
        let mut l = Lts::from_edges(self.len(), self.initial, self.edges.iter().map(|e| (e.src, self.edge_label(e, mode), e.tgt)));
        l.names = self.states.iter().map(|m| self.compiled.marking_name(m)).collect();
        l.truncated = self.truncated;
        l
    }

    /// States from which some bound-blocked state is reachable.
    pub fn reaches_blocked(&self) -> Vec<bool> {
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for e in &self.edges {
            pred[e.tgt].push(e.src);
        }
        let mut out = self.bound_blocked.clone();
        let mut q: VecDeque<usize> = (0..self.len()).filter(|s| out[*s]).collect();
        while let Some(s) = q.pop_front() {
            for &p in &pred[s] {
                if !out[p] {
                    out[p] = true;
                    q.push_back(p);
                }
            }
        }
        out
    }

    fn path_to(&self, target: usize) -> Vec<String> {
        let l = self.lts(LabelMode::Transition);
        l.paths_from_initial()[target].clone().unwrap_or_default().iter().map(|x| x.to_string()).collect()
    }
}

/// Bounded LTS of a marked net with transition-id labels.
pub fn state_space(net: &Net, m0: &Marking, bound: &ExplorationBound) -> Lts {
    explore(net, m0, bound).lts(LabelMode::Transition)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    HoldsUpToBound,
    Fails { path: Vec<String>, detail: String },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::HoldsUpToBound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeSoundness {
    #[serde(rename = "type")]
    pub ty: String,
    pub proper_completion: Verdict,
    pub weak_termination: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub states: usize,
    pub per_type: Vec<TypeSoundness>,
}

impl SoundnessReport {
    pub fn holds(&self) -> bool {
        self.per_type.iter().all(|t| t.proper_completion.holds() && t.weak_termination.holds())
    }
}

/// Identifier soundness on the bounded state space from the empty marking.
pub fn check_identifier_soundness(net: &Net, bound: &ExplorationBound) -> SoundnessReport {
    soundness_of(&explore(net, &Marking::new(), bound))
}

impl Compiled {
    /// Structural over-approximation: whether some transition could ever consume
    /// `id` without reproducing it, following the arcs its variable can travel along.
    pub fn may_remove(&self, m: &CMarking, id: u32) -> bool {
        let ty = ty_of(id);
        let mut seen: Vec<bool> = m.iter().map(|toks| toks.iter().any(|tok| tok.contains(&id))).collect();
        let mut stack: Vec<usize> = (0..self.places.len()).filter(|p| seen[*p]).collect();
        while let Some(p) = stack.pop() {
            for t in 0..self.transitions.len() {
                for (_, vars) in self.inputs[t].iter().filter(|(q, _)| *q == p) {
                    for &v in vars.iter().filter(|v| self.var_type[**v] == ty) {
                        let outs: Vec<usize> = self.outputs[t].iter().filter(|(_, ws)| ws.contains(&v)).map(|(q, _)| *q).collect();
                        if outs.is_empty() {
                            return true;
                        }
                        for q in outs {
                            if !seen[q] {
                                seen[q] = true;
                                stack.push(q);
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

pub fn soundness_of(ss: &StateSpace) -> SoundnessReport {
    let c = &ss.compiled;
    let inconclusive = || Verdict::Inconclusive { reason: format!("exploration truncated at {} states", ss.len()) };
    // weak termination: (state, id) pairs that can reach a state without the id
    let mut node: HashMap<(usize, u32), usize> = HashMap::new();
    let mut nodes = Vec::new();
    for (s, m) in ss.states.iter().enumerate() {
        for id in ids_of(m) {
            node.insert((s, id), nodes.len());
            nodes.push((s, id));
        }
    }
    let mut good = vec![false; nodes.len()];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut q = VecDeque::new();
    for e in &ss.edges {
        for (id, to) in &e.id_map {
            let from = node[&(e.src, *id)];
            match to {
                None => {
                    if !good[from] {
                        good[from] = true;
                        q.push_back(from);
                    }
                }
                Some(j) => {
                    if let Some(&tn) = node.get(&(e.tgt, *j)) {
                        rev[tn].push(from);
                    }
                }
            }
        }
    }
    while let Some(n) = q.pop_front() {
        for &p in &rev[n] {
            if !good[p] {
                good[p] = true;
                q.push_back(p);
            }
        }
    }
    let blocked = ss.reaches_blocked();
    let mut per_type = Vec::new();
    for (ti, ty) in c.types.iter().enumerate() {
        let proper = if let Some(e) = ss.edges.iter().find(|e| e.improper.contains(&ti)) {
            let mut path = ss.path_to(e.src);
            path.push(c.transitions[e.transition].clone());
            Verdict::Fails { path, detail: format!("collected {ty} identifier still present after firing") }
        } else if ss.truncated {
            inconclusive()
        } else {
            Verdict::HoldsUpToBound
        };
        let stuck: Vec<(usize, u32)> =
            nodes.iter().enumerate().filter(|(i, (_, id))| ty_of(*id) == ti && !good[*i]).map(|(_, n)| *n).collect();
        let genuine = stuck.iter().find(|(s, id)| !blocked[*s] || !c.may_remove(&ss.states[*s], *id));
        let weak = if let Some(&(s, id)) = genuine {
            Verdict::Fails {
                path: ss.path_to(s),
                detail: format!("identifier {} can never be removed from {}", c.id_name(id), c.marking_name(&ss.states[s])),
            }
        } else if let Some(&(s, id)) = stuck.first() {
            Verdict::Inconclusive {
                reason: format!(
                    "identifier {} is not removed within the bound from {}; the bound suppressed enabled bindings",
                    c.id_name(id),
                    c.marking_name(&ss.states[s])
                ),
            }
        } else if ss.truncated {
            inconclusive()
        } else {
            Verdict::HoldsUpToBound
        };
        per_type.push(TypeSoundness { ty: ty.clone(), proper_completion: proper, weak_termination: weak });
    }
    SoundnessReport { states: ss.len(), per_type }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LivenessReport {
    pub states: usize,
    pub quasi_live: Verdict,
    pub live: Verdict,
    pub dead: Vec<String>,
}

impl LivenessReport {
    pub fn holds(&self) -> bool {
        self.quasi_live.holds() && self.live.holds()
    }
}

/// Quasi-liveness and bounded liveness from the empty marking.
pub fn check_liveness(net: &Net, bound: &ExplorationBound) -> LivenessReport {
    liveness_of(&explore(net, &Marking::new(), bound))
}

pub fn liveness_of(ss: &StateSpace) -> LivenessReport {
    let c = &ss.compiled;
    let fired: BTreeSet<usize> = ss.edges.iter().map(|e| e.transition).collect();
    let dead: Vec<String> = (0..c.transitions.len()).filter(|t| !fired.contains(t)).map(|t| c.transitions[t].clone()).collect();
    let blocked = ss.reaches_blocked();
    let any_blocked = ss.bound_blocked.iter().any(|b| *b);
    let quasi_live = if !dead.is_empty() && !any_blocked {
        Verdict::Fails { path: Vec::new(), detail: format!("never enabled: {}", dead.join(", ")) }
    } else if !dead.is_empty() {
        Verdict::Inconclusive { reason: format!("not enabled within the bound: {}", dead.join(", ")) }
    } else if ss.truncated {
        Verdict::Inconclusive { reason: "exploration truncated".into() }
    } else {
        Verdict::HoldsUpToBound
    };
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); ss.len()];
    for e in &ss.edges {
        pred[e.tgt].push(e.src);
    }
    let mut live = if ss.truncated { Verdict::Inconclusive { reason: "exploration truncated".into() } } else { Verdict::HoldsUpToBound };
    for t in 0..c.transitions.len() {
        let mut can = vec![false; ss.len()];
        let mut q = VecDeque::new();
        for e in ss.edges.iter().filter(|e| e.transition == t) {
            if !can[e.src] {
                can[e.src] = true;
                q.push_back(e.src);
            }
        }
        while let Some(s) = q.pop_front() {
            for &p in &pred[s] {
                if !can[p] {
                    can[p] = true;
                    q.push_back(p);
                }
            }
        }
        if let Some(s) = (0..ss.len()).find(|s| !can[*s] && !blocked[*s]) {
            live = Verdict::Fails {
                path: ss.path_to(s),
                detail: format!("{} cannot fire again from {}", c.transitions[t], c.marking_name(&ss.states[s])),
            };
            break;
        }
        if let Some(s) = (0..ss.len()).find(|s| !can[*s]) {
            if live.holds() {
                live = Verdict::Inconclusive {
                    reason: format!(
                        "{} does not fire again within the bound from {}; the bound suppressed enabled bindings",
                        c.transitions[t],
                        c.marking_name(&ss.states[s])
                    ),
                };
            }
        }
    }
    LivenessReport { states: ss.len(), quasi_live, live, dead }
}
