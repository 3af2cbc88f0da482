//! Nets, place types, inscriptions and markings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered vector of type labels carried by the tokens of a place.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlaceType(pub Vec<String>);

impl PlaceType {
    /// Builds a place type sorted by the Gödel order and without duplicates.
    pub fn of<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        PlaceType(set.into_iter().collect())
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.iter().any(|l| l == label)
    }

    pub fn is_subset(&self, other: &PlaceType) -> bool {
        self.0.iter().all(|l| other.contains(l))
    }

    pub fn as_set(&self) -> BTreeSet<String> {
        self.0.iter().cloned().collect()
    }
}

impl fmt::Display for PlaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0.join(","))
    }
}

/// Multiset of variable vectors, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Inscription(pub Vec<Vec<String>>);

impl Inscription {
    pub fn new(mut vectors: Vec<Vec<String>>) -> Self {
        vectors.sort();
        Inscription(vectors)
    }

    pub fn single<I, S>(vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Inscription(vec![vars.into_iter().map(Into::into).collect()])
    }

    pub fn vectors(&self) -> &[Vec<String>] {
        &self.0
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.0.iter().flatten().cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Identifier {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

impl Identifier {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        Identifier { name: name.into(), ty: ty.into() }
    }
}

/// A t-PNID. Node identity is the string id; arcs are keyed by (source, target).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Net {
    pub types: Vec<String>,
    pub variables: BTreeMap<String, String>,
    pub places: BTreeMap<String, PlaceType>,
    pub transitions: BTreeSet<String>,
    pub arcs: BTreeMap<(String, String), Inscription>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableSets {
    pub input: BTreeSet<String>,
    pub output: BTreeSet<String>,
    pub all: BTreeSet<String>,
    pub emitting: BTreeSet<String>,
    pub collecting: BTreeSet<String>,
}

impl Net {
    pub fn new() -> Self {
        Net::default()
    }

    pub fn with_type(mut self, ty: &str) -> Self {
        if !self.types.iter().any(|t| t == ty) {
            self.types.push(ty.to_string());
        }
        self
    }

    pub fn with_var(mut self, var: &str, ty: &str) -> Self {
        self = self.with_type(ty);
        self.variables.insert(var.to_string(), ty.to_string());
        self
    }

    pub fn with_place(mut self, id: &str, labels: &[&str]) -> Self {
        self.places.insert(id.to_string(), PlaceType::of(labels.iter().copied()));
        self
    }

    pub fn with_transition(mut self, id: &str) -> Self {
        self.transitions.insert(id.to_string());
        self
    }

    /// Adds an arc carrying one variable vector.
    pub fn with_arc(mut self, from: &str, to: &str, vars: &[&str]) -> Self {
        self.arcs.insert((from.to_string(), to.to_string()), Inscription::single(vars.iter().copied()));
        self
    }

    /// Adds an arc inscribed with the canonical vector of the adjacent place.
    /// Panics if the place is unknown or a type has no unique variable.
    pub fn with_tarc(mut self, from: &str, to: &str) -> Self {
        let place = if self.places.contains_key(from) { from } else { to };
        let ty = self.places.get(place).unwrap_or_else(|| panic!("unknown place {place}")).clone();
        let vec = self.canonical_vector(&ty).unwrap_or_else(|| panic!("no canonical vector for {ty}"));
        self.arcs.insert((from.to_string(), to.to_string()), Inscription(vec![vec]));
        self
    }

    pub fn is_place(&self, id: &str) -> bool {
        self.places.contains_key(id)
    }

    pub fn is_transition(&self, id: &str) -> bool {
        self.transitions.contains(id)
    }

    pub fn place_type(&self, p: &str) -> Option<&PlaceType> {
        self.places.get(p)
    }

    pub fn var_type(&self, v: &str) -> Option<&str> {
        self.variables.get(v).map(String::as_str)
    }

    /// Rank of a type label: position among the declared types sorted lexicographically, from 1.
    pub fn godel_rank(&self, label: &str) -> Option<usize> {
        let mut sorted: Vec<&String> = self.types.iter().collect();
        sorted.sort();
        sorted.dedup();
        sorted.iter().position(|t| *t == label).map(|i| i + 1)
    }

    /// Declared types in Gödel order.
    pub fn sorted_types(&self) -> Vec<String> {
        let set: BTreeSet<String> = self.types.iter().cloned().collect();
        set.into_iter().collect()
    }

    /// The only variable of a type, if exactly one exists.
    pub fn type_var(&self, ty: &str) -> Option<&str> {
        let mut it = self.variables.iter().filter(|(_, t)| *t == ty);
        let first = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some(first.0.as_str())
    }

    pub fn canonical_vector(&self, ty: &PlaceType) -> Option<Vec<String>> {
        ty.0.iter().map(|l| self.type_var(l).map(str::to_string)).collect()
    }

    /// Variables and declared types are in bijection.
    pub fn has_var_type_bijection(&self) -> bool {
        let declared: BTreeSet<&String> = self.types.iter().collect();
        let used: BTreeSet<&String> = self.variables.values().collect();
        declared == used && self.variables.len() == declared.len() && self.variables.values().all(|t| declared.contains(t))
    }

    pub fn arc(&self, from: &str, to: &str) -> Option<&Inscription> {
        self.arcs.get(&(from.to_string(), to.to_string()))
    }

    pub fn preset(&self, node: &str) -> BTreeSet<String> {
        self.arcs.keys().filter(|(_, t)| t == node).map(|(s, _)| s.clone()).collect()
    }

    pub fn postset(&self, node: &str) -> BTreeSet<String> {
        self.arcs.keys().filter(|(s, _)| s == node).map(|(_, t)| t.clone()).collect()
    }

    pub fn input_arcs(&self, node: &str) -> Vec<(&String, &Inscription)> {
        self.arcs.iter().filter(|((_, t), _)| t == node).map(|((s, _), i)| (s, i)).collect()
    }

    pub fn output_arcs(&self, node: &str) -> Vec<(&String, &Inscription)> {
        self.arcs.iter().filter(|((s, _), _)| s == node).map(|((_, t), i)| (t, i)).collect()
    }

    pub fn remove_node(&mut self, id: &str) {
        self.places.remove(id);
        self.transitions.remove(id);
        self.arcs.retain(|(s, t), _| s != id && t != id);
    }

    /// Types actually used by places.
    pub fn used_types(&self) -> BTreeSet<String> {
        self.places.values().flat_map(|t| t.0.iter().cloned()).collect()
    }

    pub fn node_count(&self) -> usize {
        self.places.len() + self.transitions.len()
    }

    pub fn variable_sets(&self, t: &str) -> Result<VariableSets> {
        if !self.is_transition(t) {
            return Err(Error::UnknownTransition(t.to_string()));
        }
        let input: BTreeSet<String> = self.input_arcs(t).into_iter().flat_map(|(_, i)| i.variables()).collect();
        let output: BTreeSet<String> = self.output_arcs(t).into_iter().flat_map(|(_, i)| i.variables()).collect();
        let all = input.union(&output).cloned().collect();
        let emitting = output.difference(&input).cloned().collect();
        let collecting = input.difference(&output).cloned().collect();
        Ok(VariableSets { input, output, all, emitting, collecting })
    }

    /// Transitions with an emitting variable of type `ty`.
    pub fn emitting_transitions(&self, ty: &str) -> Result<BTreeSet<String>> {
        self.transitions_by(ty, |vs| &vs.emitting)
    }

    /// Transitions with a collecting variable of type `ty`.
    pub fn collecting_transitions(&self, ty: &str) -> Result<BTreeSet<String>> {
        self.transitions_by(ty, |vs| &vs.collecting)
    }

    fn transitions_by(&self, ty: &str, pick: fn(&VariableSets) -> &BTreeSet<String>) -> Result<BTreeSet<String>> {
        if !self.types.iter().any(|t| t == ty) {
            return Err(Error::UnknownType(ty.to_string()));
        }
        let mut out = BTreeSet::new();
        for t in &self.transitions {
            let vs = self.variable_sets(t)?;
            if pick(&vs).iter().any(|v| self.var_type(v) == Some(ty)) {
                out.insert(t.clone());
            }
        }
        Ok(out)
    }

    /// Types of the variables of a transition.
    pub fn transition_types(&self, t: &str) -> BTreeSet<String> {
        self.variable_sets(t).map(|vs| vs.all.iter().filter_map(|v| self.var_type(v).map(str::to_string)).collect()).unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub subject: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, subject: impl Into<String>, reason: impl Into<String>) {
        self.issues.push(Issue { subject: subject.into(), reason: reason.into() });
    }
}

/// Checks the structural and typing invariants of a net.
pub fn validate(net: &Net) -> ValidationReport {
    let mut r = ValidationReport::default();
    let mut seen = BTreeSet::new();
    for t in &net.types {
        if t.is_empty() {
            r.push("types", "empty type label");
        }
        if !seen.insert(t) {
            r.push("types", format!("duplicate type label `{t}`"));
        }
    }
    for (v, t) in &net.variables {
        if v.is_empty() {
            r.push("variables", "empty variable name");
        }
        if !seen.contains(t) {
            r.push(format!("variable {v}"), format!("undeclared type `{t}`"));
        }
    }
    for (p, ty) in &net.places {
        if ty.0.is_empty() {
            r.push(format!("place {p}"), "empty place type");
        }
        for l in &ty.0 {
            if !seen.contains(l) {
                r.push(format!("place {p}"), format!("undeclared type `{l}`"));
            }
        }
        if ty.0.windows(2).any(|w| w[0] == w[1]) || ty.0.iter().collect::<BTreeSet<_>>().len() != ty.0.len() {
            r.push(format!("place {p}"), "duplicate label in place type");
        } else if ty.0.windows(2).any(|w| w[0] > w[1]) {
            r.push(format!("place {p}"), "place type not sorted by Gödel order");
        }
        if net.transitions.contains(p) {
            r.push(format!("place {p}"), "id shared with a transition");
        }
    }
    for ((s, t), ins) in &net.arcs {
        let subject = format!("arc ({s},{t})");
        let place = match (net.is_place(s), net.is_transition(s), net.is_place(t), net.is_transition(t)) {
            (true, _, _, true) => s,
            (_, true, true, _) => t,
            _ => {
                r.push(subject, "arc must connect a place and a transition");
                continue;
            }
        };
        if ins.0.is_empty() {
            r.push(subject.clone(), "empty inscription");
        }
        let want = &net.places[place].0;
        for vec in &ins.0 {
            let mut types = Vec::new();
            for v in vec {
                match net.var_type(v) {
                    Some(ty) => types.push(ty.to_string()),
                    None => r.push(subject.clone(), format!("undeclared variable `{v}`")),
                }
            }
            if types.len() == vec.len() && &types != want {
                r.push(
                    subject.clone(),
                    format!(
                        "typing violation: vector <{}> has types <{}>, place {place} has <{}>",
                        vec.join(","),
                        types.join(","),
                        want.join(",")
                    ),
                );
            }
            let distinct: BTreeSet<&String> = vec.iter().collect();
            if distinct.len() != vec.len() {
                r.push(subject.clone(), "variable repeated inside a vector");
            }
        }
    }
    r
}

/// Additional checks for typed Jackson net mode: variable/type bijection and set-valued inscriptions.
pub fn validate_tjn_mode(net: &Net) -> ValidationReport {
    let mut r = validate(net);
    if !net.has_var_type_bijection() {
        r.push("variables", "variables and types are not in bijection");
    }
    for ((s, t), ins) in &net.arcs {
        if ins.0.windows(2).any(|w| w[0] == w[1]) {
            r.push(format!("arc ({s},{t})"), "inscription multiplicity above one");
        }
    }
    r
}

/// Place to multiset of identifier vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(pub BTreeMap<String, BTreeMap<Vec<String>, usize>>);

impl Marking {
    pub fn new() -> Self {
        Marking::default()
    }

    pub fn with(mut self, place: &str, ids: &[&str]) -> Self {
        self.add(place, ids.iter().map(|s| s.to_string()).collect(), 1);
        self
    }

    pub fn add(&mut self, place: &str, vec: Vec<String>, n: usize) {
        if n == 0 {
            return;
        }
        *self.0.entry(place.to_string()).or_default().entry(vec).or_insert(0) += n;
    }

    /// Removes `n` copies; returns false (and changes nothing) if not enough are present.
    pub fn remove(&mut self, place: &str, vec: &[String], n: usize) -> bool {
        let Some(bag) = self.0.get_mut(place) else { return n == 0 };
        let Some(c) = bag.get_mut(vec) else { return n == 0 };
        if *c < n {
            return false;
        }
        *c -= n;
        if *c == 0 {
            bag.remove(vec);
        }
        if bag.is_empty() {
            self.0.remove(place);
        }
        true
    }

    pub fn count(&self, place: &str, vec: &[String]) -> usize {
        self.0.get(place).and_then(|b| b.get(vec)).copied().unwrap_or(0)
    }

    pub fn tokens(&self, place: &str) -> impl Iterator<Item = (&Vec<String>, &usize)> {
        self.0.get(place).into_iter().flat_map(|b| b.iter())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Names of all identifiers occurring in the marking.
    pub fn id_names(&self) -> BTreeSet<String> {
        self.0.values().flat_map(|b| b.keys().flatten().cloned()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (p, bag) in &self.0 {
            let mut list = Vec::new();
            for (vec, n) in bag {
                for _ in 0..*n {
                    list.push(serde_json::json!(vec));
                }
            }
            map.insert(p.clone(), serde_json::Value::Array(list));
        }
        serde_json::Value::Object(map)
    }

    pub fn from_json(text: &str) -> Result<Marking> {
        let raw: BTreeMap<String, Vec<Vec<String>>> = serde_json::from_str(text)?;
        let mut m = Marking::new();
        for (p, vecs) in raw {
            for v in vecs {
                m.add(&p, v, 1);
            }
        }
        Ok(m)
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (p, bag) in &self.0 {
            let mut toks = Vec::new();
            for (v, n) in bag {
                for _ in 0..*n {
                    toks.push(format!("<{}>", v.join(",")));
                }
            }
            parts.push(format!("{p}:{}", toks.join("")));
        }
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Identifiers of a marking, typed through the positions they occupy.
pub fn ids_in(net: &Net, m: &Marking) -> BTreeSet<Identifier> {
    let mut out = BTreeSet::new();
    for (p, bag) in &m.0 {
        let ty = net.place_type(p);
        for vec in bag.keys() {
            for (i, name) in vec.iter().enumerate() {
                let t = ty.and_then(|t| t.0.get(i)).cloned().unwrap_or_default();
                out.insert(Identifier::new(name.clone(), t));
            }
        }
    }
    out
}

/// Checks that a marking fits the place types of a net and types every identifier consistently.
pub fn validate_marking(net: &Net, m: &Marking) -> ValidationReport {
    let mut r = ValidationReport::default();
    let mut typing: BTreeMap<&String, &String> = BTreeMap::new();
    for (p, bag) in &m.0 {
        let Some(ty) = net.place_type(p) else {
            r.push(format!("place {p}"), "unknown place in marking");
            continue;
        };
        for vec in bag.keys() {
            if vec.len() != ty.0.len() {
                r.push(format!("place {p}"), format!("token <{}> does not match place type {ty}", vec.join(",")));
                continue;
            }
            for (name, t) in vec.iter().zip(&ty.0) {
                if let Some(prev) = typing.insert(name, t) {
                    if prev != t {
                        r.push(format!("identifier {name}"), format!("used with types {prev} and {t}"));
                    }
                }
            }
        }
    }
    r
}

#[derive(Serialize, Deserialize)]
struct PlaceFile {
    id: String,
    #[serde(rename = "type")]
    ty: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TransitionFile {
    id: String,
}

#[derive(Serialize, Deserialize)]
struct ArcFile {
    from: String,
    to: String,
    inscription: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct NetFile {
    types: Vec<String>,
    variables: BTreeMap<String, String>,
    places: Vec<PlaceFile>,
    transitions: Vec<TransitionFile>,
    arcs: Vec<ArcFile>,
}

impl Net {
    pub fn to_json(&self) -> String {
        let file = NetFile {
            types: self.types.clone(),
            variables: self.variables.clone(),
            places: self.places.iter().map(|(id, t)| PlaceFile { id: id.clone(), ty: t.0.clone() }).collect(),
            transitions: self.transitions.iter().map(|id| TransitionFile { id: id.clone() }).collect(),
            arcs: self.arcs.iter().map(|((f, t), i)| ArcFile { from: f.clone(), to: t.clone(), inscription: i.0.clone() }).collect(),
        };
        serde_json::to_string_pretty(&file).expect("net serialization") + "\n"
    }

    /// Parses the JSON net format. Duplicate ids are rejected here; typing problems are left to `validate`.
    pub fn from_json(text: &str) -> Result<Net> {
        let file: NetFile = serde_json::from_str(text)?;
        let mut net = Net { types: file.types, variables: file.variables, ..Net::default() };
        for p in file.places {
            if net.places.insert(p.id.clone(), PlaceType(p.ty)).is_some() {
                return Err(Error::Parse(format!("duplicate place id `{}`", p.id)));
            }
        }
        for t in file.transitions {
            if !net.transitions.insert(t.id.clone()) {
                return Err(Error::Parse(format!("duplicate transition id `{}`", t.id)));
            }
        }
        for a in file.arcs {
            if net.arcs.insert((a.from.clone(), a.to.clone()), Inscription::new(a.inscription)).is_some() {
                return Err(Error::Parse(format!("duplicate arc ({},{})", a.from, a.to)));
            }
        }
        Ok(net)
    }
}
