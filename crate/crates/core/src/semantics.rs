//! Bindings, firing, random runs, replay and firing-sequence formats.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ids_in, Marking, Net};

/// Variable to identifier name.
pub type Binding = BTreeMap<String, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationBound {
    /// Maximum number of live identifiers per type.
    pub max_ids_per_type: usize,
    pub max_states: usize,
}

impl ExplorationBound {
    pub fn new(k: usize, max_states: usize) -> Self {
        assert!(k >= 1 && max_states >= 1, "bounds must be positive");
        ExplorationBound { max_ids_per_type: k, max_states }
    }

    pub fn k(k: usize) -> Self {
        ExplorationBound::new(k, 200_000)
    }
}

impl Default for ExplorationBound {
    fn default() -> Self {
        ExplorationBound::k(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiringRecord {
    pub transition: String,
    pub binding: Binding,
}

/// Ordered firings plus the variable typing needed to read the bindings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiringSequence {
    pub variables: BTreeMap<String, String>,
    pub records: Vec<FiringRecord>,
}

impl FiringSequence {
    pub fn new(variables: BTreeMap<String, String>) -> Self {
        FiringSequence { variables, records: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Types mentioned by the variable typing, in Gödel order.
    pub fn types(&self) -> Vec<String> {
        let set: BTreeSet<String> = self.variables.values().cloned().collect();
        set.into_iter().collect()
    }

    /// Typed identifiers bound by one record.
    pub fn record_ids(&self, r: &FiringRecord) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (v, id) in &r.binding {
            if let Some(ty) = self.variables.get(v) {
                out.entry(ty.clone()).or_default().insert(id.clone());
            }
        }
        out
    }

    /// Writes the firing table: one column per type, one row per firing.
    pub fn to_csv(&self) -> Result<String> {
        let types = self.types();
        let mut var_of: BTreeMap<&String, &String> = BTreeMap::new();
        for (v, t) in &self.variables {
            if var_of.insert(t, v).is_some() {
                return Err(Error::Invalid(format!("type `{t}` has several variables; use the JSON format")));
            }
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header = vec!["transition".to_string()];
        header.extend(types.iter().cloned());
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.transition.clone()];
            for t in &types {
                row.push(r.binding.get(var_of[t]).cloned().unwrap_or_default());
            }
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Reads a firing table. Columns name types; with a net, each type maps to its unique variable,
    /// otherwise the variable is named after the type.
    pub fn from_csv(text: &str, net: Option<&Net>) -> Result<FiringSequence> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("transition") {
            return Err(Error::Parse("first column must be `transition`".into()));
        }
        let mut cols = Vec::new();
        let mut variables = BTreeMap::new();
        for ty in header.iter().skip(1) {
            let var = match net {
                Some(n) => n
                    .type_var(ty)
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse(format!("type `{ty}` has no unique variable in the net")))?,
                None => ty.to_string(),
            };
            variables.insert(var.clone(), ty.to_string());
            cols.push(var);
        }
        let mut seq = FiringSequence::new(variables);
        for row in rdr.records() {
            let row = row?;
            let transition = row.get(0).unwrap_or_default().to_string();
            let mut binding = Binding::new();
            for (i, var) in cols.iter().enumerate() {
                let cell = row.get(i + 1).unwrap_or_default().trim();
                if !cell.is_empty() {
                    binding.insert(var.clone(), cell.to_string());
                }
            }
            seq.records.push(FiringRecord { transition, binding });
        }
        Ok(seq)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sequence serialization") + "\n"
    }

    pub fn from_json(text: &str) -> Result<FiringSequence> {
        Ok(serde_json::from_str(text)?)
    }
}

fn check_binding(net: &Net, m: &Marking, t: &str, psi: &Binding) -> Result<crate::model::VariableSets> {
    let vs = net.variable_sets(t)?;
    let dom: BTreeSet<String> = psi.keys().cloned().collect();
    if dom != vs.all {
        return Err(Error::IllTypedBinding(format!("domain {:?} differs from var({t}) = {:?}", dom, vs.all)));
    }
    let range: BTreeSet<&String> = psi.values().collect();
    if range.len() != psi.len() {
        return Err(Error::IllTypedBinding("binding is not injective".into()));
    }
    let typing: BTreeMap<String, String> = ids_in(net, m).into_iter().map(|i| (i.name, i.ty)).collect();
    for (v, id) in psi {
        let vt = net.var_type(v).ok_or_else(|| Error::UnknownVariable(v.clone()))?;
        if let Some(it) = typing.get(id) {
            if it != vt {
                return Err(Error::IllTypedBinding(format!("{v}:{vt} bound to {id}:{it}")));
            }
        }
    }
    Ok(vs)
}

fn instantiate(vec: &[String], psi: &Binding) -> Vec<String> {
    vec.iter().map(|v| psi[v].clone()).collect()
}

/// Whether `t` may fire in `m` under `psi`.
pub fn enabled(net: &Net, m: &Marking, t: &str, psi: &Binding) -> Result<bool> {
    let vs = check_binding(net, m, t, psi)?;
    let present = m.id_names();
    for v in &vs.emitting {
        if present.contains(&psi[v]) {
            return Ok(false);
        }
    }
    for (p, ins) in net.input_arcs(t) {
        let mut need: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        for vec in ins.vectors() {
            *need.entry(instantiate(vec, psi)).or_insert(0) += 1;
        }
        if need.iter().any(|(tok, n)| m.count(p, tok) < *n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fires `t` under `psi`, returning the successor marking.
pub fn fire(net: &Net, m: &Marking, t: &str, psi: &Binding) -> Result<Marking> {
    if !enabled(net, m, t, psi)? {
        return Err(Error::NotEnabled(t.to_string()));
    }
    let mut next = m.clone();
    for (p, ins) in net.input_arcs(t) {
        for vec in ins.vectors() {
            let ok = next.remove(p, &instantiate(vec, psi), 1);
            debug_assert!(ok);
        }
    }
    for (p, ins) in net.output_arcs(t) {
        for vec in ins.vectors() {
            next.add(p, instantiate(vec, psi), 1);
        }
    }
    Ok(next)
}

/// All enabled bindings of `t`, with one canonical fresh identifier per emitting variable.
/// Bindings that would push a type past the live-identifier bound are dropped.
pub fn enabled_bindings(net: &Net, m: &Marking, t: &str, bound: &ExplorationBound) -> Vec<Binding> {
    let Ok(vs) = net.variable_sets(t) else { return Vec::new() };
    let ids = ids_in(net, m);
    let mut live: BTreeMap<&str, usize> = BTreeMap::new();
    for i in &ids {
        *live.entry(i.ty.as_str()).or_insert(0) += 1;
    }
    let mut emitted: BTreeMap<&str, usize> = BTreeMap::new();
    for v in &vs.emitting {
        *emitted.entry(net.var_type(v).unwrap_or_default()).or_insert(0) += 1;
    }
    if emitted.iter().any(|(ty, n)| live.get(ty).copied().unwrap_or(0) + n > bound.max_ids_per_type) {
        return Vec::new();
    }
    let names: BTreeSet<String> = ids.iter().map(|i| i.name.clone()).collect();
    let mut fresh = Binding::new();
    let mut taken = names.clone();
    for v in &vs.emitting {
        let ty = net.var_type(v).unwrap_or_default();
        let name = (1..).map(|n| format!("{ty}{n}")).find(|c| !taken.contains(c)).expect("unbounded counter");
        taken.insert(name.clone());
        fresh.insert(v.clone(), name);
    }

    let mut slots: Vec<(&String, &Vec<String>)> = Vec::new();
    for (p, ins) in net.input_arcs(t) {
        for vec in ins.vectors() {
            slots.push((p, vec));
        }
    }
    let mut found = BTreeSet::new();
    let mut partial = Binding::new();
    match_slots(m, &slots, 0, &mut partial, &mut found);
    let mut out = Vec::new();
    for mut b in found {
        b.extend(fresh.clone());
        if enabled(net, m, t, &b).unwrap_or(false) {
            out.push(b);
        }
    }
    out
}

fn match_slots(m: &Marking, slots: &[(&String, &Vec<String>)], i: usize, partial: &mut Binding, found: &mut BTreeSet<Binding>) {
    if i == slots.len() {
        found.insert(partial.clone());
        return;
    }
    let (p, vec) = slots[i];
    for (tok, _) in m.tokens(p) {
        let mut added = Vec::new();
        let mut ok = true;
        for (v, id) in vec.iter().zip(tok) {
            match partial.get(v) {
                Some(b) if b != id => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    if partial.values().any(|x| x == id) {
                        ok = false;
                        break;
                    }
                    partial.insert(v.clone(), id.clone());
                    added.push(v.clone());
                }
            }
        }
        if ok {
            match_slots(m, slots, i + 1, partial, found);
        }
        for v in added {
            partial.remove(&v);
        }
    }
}

/// Seeded random walk. Fresh identifiers are named `{type}{n}` from a per-type counter and never reused.
pub fn run(net: &Net, m0: &Marking, steps: usize, seed: u64, bound: &ExplorationBound) -> FiringSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seq = FiringSequence::new(net.variables.clone());
    let mut m = m0.clone();
    let mut seen: BTreeSet<String> = m.id_names();
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..steps {
        let mut options = Vec::new();
        for t in &net.transitions {
            for b in enabled_bindings(net, &m, t, bound) {
                options.push((t.clone(), b));
            }
        }
        let Some((t, mut b)) = options.choose(&mut rng).cloned() else { break };
        let vs = net.variable_sets(&t).expect("known transition");
        for v in &vs.emitting {
            let ty = net.var_type(v).unwrap_or_default().to_string();
            let c = counters.entry(ty.clone()).or_insert(0);
            let name = loop {
                *c += 1;
                let cand = format!("{ty}{c}");
                if !seen.contains(&cand) {
                    break cand;
                }
            };
            seen.insert(name.clone());
            b.insert(v.clone(), name);
        }
        m = fire(net, &m, &t, &b).expect("enumerated binding is enabled");
        seq.records.push(FiringRecord { transition: t, binding: b });
    }
    seq
}

/// Replays a sequence, reporting the first record (0-based) that is not enabled.
pub fn replay(net: &Net, m0: &Marking, seq: &FiringSequence) -> Result<Marking> {
    let mut m = m0.clone();
    for (index, r) in seq.records.iter().enumerate() {
        let reject = || Error::ReplayRejected { index, transition: r.transition.clone() };
        if !net.is_transition(&r.transition) {
            return Err(reject());
        }
        match enabled(net, &m, &r.transition, &r.binding) {
            Ok(true) => m = fire(net, &m, &r.transition, &r.binding)?,
            _ => return Err(reject()),
        }
    }
    Ok(m)
}
