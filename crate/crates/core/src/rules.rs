//! Generation rules of typed Jackson nets, their inverses, membership and a random generator.
//!
//! Nets handled here use canonical inscriptions: one variable per type and
//! every arc inscribed with the variable vector of its place's type.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iso::{invariant_key, isomorphism};
use crate::model::{Net, PlaceType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A rule instance. `site` holds existing nodes; `new_nodes` the nodes the forward rule adds.
///
/// * R1: site `[p]`, new `[t, p2]`; p keeps its inputs, p2 takes its outputs.
/// * R2: site `[t]`, new `[p, t2]`, `types` = type of p; t keeps its inputs, t2 takes its outputs.
/// * R3: site `[p]`, new `[p']`, `types` = type of p'.
/// * R4: site `[t]`, new `[t']`.
/// * R5: site `[p]`, new `[t]`.
/// * R6: site `[t]`, new `[p, emitter, collector]`, `types` = type of p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleApplication {
    pub rule: Rule,
    pub site: Vec<String>,
    pub new_nodes: Vec<String>,
    pub types: Vec<String>,
}

impl fmt::Display for RuleApplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} with {}", self.rule, self.site.join(","), self.new_nodes.join(","))?;
        if !self.types.is_empty() {
            write!(f, " typed <{}>", self.types.join(","))?;
        }
        Ok(())
    }
}

fn declare(net: &mut Net, ty: &PlaceType) {
    for l in ty.labels() {
        if !net.types.contains(l) {
            net.types.push(l.clone());
            net.types.sort();
        }
        if net.type_var(l).is_none() {
            net.variables.insert(l.clone(), l.clone());
        }
    }
}

fn fresh(net: &Net, id: &str) -> Result<()> {
    if net.is_place(id) || net.is_transition(id) {
        return Err(Error::SideCondition(format!("node id {id} already in use")));
    }
    Ok(())
}

fn arity(app: &RuleApplication, site: usize, new: usize) -> Result<()> {
    if app.site.len() != site || app.new_nodes.len() != new {
        return Err(Error::SideCondition(format!("{} expects {site} site node(s) and {new} new node(s)", app.rule)));
    }
    Ok(())
}

/// Types of the variables on a transition's arcs.
fn var_types(net: &Net, t: &str) -> BTreeSet<String> {
    net.transition_types(t)
}

fn emitting_types(net: &Net, t: &str) -> BTreeSet<String> {
    net.variable_sets(t).map(|v| v.emitting.iter().filter_map(|x| net.var_type(x).map(str::to_string)).collect()).unwrap_or_default()
}

/// Applies a rule left to right.
pub fn expand(net: &Net, app: &RuleApplication) -> Result<Net> {
    let mut n = net.clone();
    let site = app.site.first().ok_or_else(|| Error::SideCondition("empty site".into()))?;
    match app.rule {
        Rule::R1 => {
            arity(app, 1, 2)?;
            let ty = n.place_type(site).cloned().ok_or_else(|| Error::UnknownPlace(site.clone()))?;
            let (t, p2) = (&app.new_nodes[0], &app.new_nodes[1]);
            fresh(&n, t)?;
            fresh(&n, p2)?;
            n.places.insert(p2.clone(), ty);
            n.transitions.insert(t.clone());
            for out in net.postset(site) {
                let ins = n.arcs.remove(&(site.clone(), out.clone())).expect("arc");
                n.arcs.insert((p2.clone(), out), ins);
            }
            n = n.with_tarc(site, t).with_tarc(t, p2);
        }
        Rule::R2 => {
            arity(app, 1, 2)?;
            if !n.is_transition(site) {
                return Err(Error::UnknownTransition(site.clone()));
            }
            let ty = PlaceType::of(app.types.iter().cloned());
            if ty.0.is_empty() {
                return Err(Error::SideCondition("R2 needs a nonempty place type".into()));
            }
            if !var_types(&n, site).iter().all(|l| ty.contains(l)) {
                return Err(Error::SideCondition(format!("R2 requires var({site}) to be contained in {ty}")));
            }
            let (p, t2) = (&app.new_nodes[0], &app.new_nodes[1]);
            fresh(&n, p)?;
            fresh(&n, t2)?;
            declare(&mut n, &ty);
            n.places.insert(p.clone(), ty);
            n.transitions.insert(t2.clone());
            for out in net.postset(site) {
                let ins = n.arcs.remove(&(site.clone(), out.clone())).expect("arc");
                n.arcs.insert((t2.clone(), out), ins);
            }
            n = n.with_tarc(site, p).with_tarc(p, t2);
        }
        Rule::R3 => {
            arity(app, 1, 1)?;
            let ty = n.place_type(site).cloned().ok_or_else(|| Error::UnknownPlace(site.clone()))?;
            let (pre, post) = (n.preset(site), n.postset(site));
            if pre.len() != 1 || post.len() != 1 || pre == post {
                return Err(Error::SideCondition(format!("R3 needs {site} between two distinct transitions")));
            }
            let dup = PlaceType::of(app.types.iter().cloned());
            if dup.0.is_empty() || !dup.is_subset(&ty) {
                return Err(Error::SideCondition(format!("R3 requires the duplicate type {dup} within {ty}")));
            }
            let t2 = post.iter().next().expect("one");
            if dup.labels().iter().any(|l| emitting_types(&n, t2).contains(l)) {
                return Err(Error::SideCondition(format!("R3 requires {dup} disjoint from the types {t2} emits")));
            }
            let p2 = &app.new_nodes[0];
            fresh(&n, p2)?;
            n.places.insert(p2.clone(), dup);
            let t1 = pre.iter().next().expect("one");
            n = n.with_tarc(t1, p2).with_tarc(p2, t2);
        }
        Rule::R4 => {
            arity(app, 1, 1)?;
            if !n.is_transition(site) {
                return Err(Error::UnknownTransition(site.clone()));
            }
            let t2 = &app.new_nodes[0];
            fresh(&n, t2)?;
            n.transitions.insert(t2.clone());
            for ((a, b), ins) in &net.arcs {
                if a == site {
                    n.arcs.insert((t2.clone(), b.clone()), ins.clone());
                }
                if b == site {
                    n.arcs.insert((a.clone(), t2.clone()), ins.clone());
                }
            }
        }
        Rule::R5 => {
            arity(app, 1, 1)?;
            if !n.is_place(site) {
                return Err(Error::UnknownPlace(site.clone()));
            }
            let t = &app.new_nodes[0];
            fresh(&n, t)?;
            n.transitions.insert(t.clone());
            n = n.with_tarc(site, t).with_tarc(t, site);
        }
        Rule::R6 => {
            arity(app, 1, 3)?;
            if !n.is_transition(site) {
                return Err(Error::UnknownTransition(site.clone()));
            }
            let ty = PlaceType::of(app.types.iter().cloned());
            if ty.0.is_empty() {
                return Err(Error::SideCondition("R6 needs a nonempty place type".into()));
            }
            if var_types(&n, site).iter().any(|l| ty.contains(l)) {
                return Err(Error::SideCondition(format!("R6 requires {ty} disjoint from var({site})")));
            }
            let (p, t1, t2) = (&app.new_nodes[0], &app.new_nodes[1], &app.new_nodes[2]);
            for x in [p, t1, t2] {
                fresh(&n, x)?;
            }
            declare(&mut n, &ty);
            n.places.insert(p.clone(), ty);
            n.transitions.insert(t1.clone());
            n.transitions.insert(t2.clone());
            n = n.with_tarc(site, p).with_tarc(p, site).with_tarc(t1, p).with_tarc(p, t2);
        }
    }
    Ok(n)
}

fn single(s: &BTreeSet<String>) -> Option<String> {
    if s.len() == 1 {
        s.iter().next().cloned()
    } else {
        None
    }
}

fn reduced(net: &Net, app: &RuleApplication) -> Net {
    let mut n = net.clone();
    let site = &app.site[0];
    match app.rule {
        Rule::R1 => {
            let p2 = &app.new_nodes[1];
            for out in net.postset(p2) {
                let ins = net.arc(p2, &out).expect("arc").clone();
                n.arcs.insert((site.clone(), out), ins);
            }
        }
        Rule::R2 => {
            let t2 = &app.new_nodes[1];
            for out in net.postset(t2) {
                let ins = net.arc(t2, &out).expect("arc").clone();
                n.arcs.insert((site.clone(), out), ins);
            }
        }
        _ => {}
    }
    for x in &app.new_nodes {
        n.remove_node(x);
    }
    n
}

fn app(rule: Rule, site: &str, new_nodes: &[&String], mut types: Vec<String>) -> RuleApplication {
    types.sort();
    RuleApplication { rule, site: vec![site.to_string()], new_nodes: new_nodes.iter().map(|s| s.to_string()).collect(), types }
}

/// Every inverse rule instance together with the net it produces, in search order.
pub fn reduce_candidates(net: &Net) -> Vec<(RuleApplication, Net)> {
    let mut apps = Vec::new();
    let ts: Vec<&String> = net.transitions.iter().collect();
    let ps: Vec<&String> = net.places.keys().collect();
    // R4: duplicated transitions with equal, nonempty surroundings
    for (i, a) in ts.iter().enumerate() {
        let (pa, qa) = (net.preset(a), net.postset(a));
        if pa.is_empty() && qa.is_empty() {
            continue;
        }
        for b in &ts[i + 1..] {
            if net.preset(b) == pa && net.postset(b) == qa {
                apps.push(app(Rule::R4, a, &[b], vec![]));
            }
        }
    }
    // R5: self-loop transitions
    for t in &ts {
        let (pre, post) = (net.preset(t), net.postset(t));
        if let Some(p) = single(&pre) {
            if pre == post {
                apps.push(app(Rule::R5, &p, &[t], vec![]));
            }
        }
    }
    // R1: p1 -> t -> p2 with equal types
    for t in &ts {
        let (Some(p1), Some(p2)) = (single(&net.preset(t)), single(&net.postset(t))) else { continue };
        if p1 != p2 && net.place_type(&p1) == net.place_type(&p2) && net.postset(&p1).len() == 1 && net.preset(&p2).len() == 1 {
            apps.push(app(Rule::R1, &p1, &[t, &p2], vec![]));
        }
    }
    // R2: t1 -> p -> t2 with the merged transition's variables inside type(p)
    for p in &ps {
        let (Some(t1), Some(t2)) = (single(&net.preset(p)), single(&net.postset(p))) else { continue };
        if t1 == t2 || net.postset(&t1).len() != 1 || net.preset(&t2).len() != 1 {
            continue;
        }
        let ty = net.place_type(p).expect("place");
        let merged: BTreeSet<String> =
            net.preset(&t1).iter().chain(net.postset(&t2).iter()).flat_map(|q| net.place_type(q).expect("place").0.clone()).collect();
        if merged.iter().all(|l| ty.contains(l)) {
            apps.push(app(Rule::R2, &t1, &[p, &t2], ty.0.clone()));
        }
    }
    // R3: p' parallel to p with a type inside type(p)
    for p in &ps {
        let (pre, post) = (net.preset(p), net.postset(p));
        let (Some(_), Some(t2)) = (single(&pre), single(&post)) else { continue };
        if pre == post {
            continue;
        }
        let ty = net.place_type(p).expect("place");
        for q in &ps {
            if q == p || net.preset(q) != pre || net.postset(q) != post {
                continue;
            }
            let dup = net.place_type(q).expect("place");
            if !dup.is_subset(ty) {
                continue;
            }
            let mut without = net.clone();
            without.remove_node(q);
            if dup.labels().iter().any(|l| emitting_types(&without, &t2).contains(l)) {
                continue;
            }
            apps.push(app(Rule::R3, p, &[q], dup.0.clone()));
        }
    }
    // R6: self-loop place with a private emitter and collector
    for t in &ts {
        for p in net.preset(t).intersection(&net.postset(t)) {
            let (pre, post) = (net.preset(p), net.postset(p));
            if pre.len() != 2 || post.len() != 2 {
                continue;
            }
            let (Some(t1), Some(t2)) = (pre.iter().find(|x| x != t), post.iter().find(|x| x != t)) else { continue };
            if t1 == t2
                || !net.preset(t1).is_empty()
                || net.postset(t1) != BTreeSet::from([p.clone()])
                || net.preset(t2) != BTreeSet::from([p.clone()])
                || !net.postset(t2).is_empty()
            {
                continue;
            }
            let ty = net.place_type(p).expect("place");
            let rest: BTreeSet<String> = net
                .preset(t)
                .iter()
                .chain(net.postset(t).iter())
                .filter(|q| *q != p)
                .flat_map(|q| net.place_type(q).expect("place").0.clone())
                .collect();
            if ty.labels().iter().any(|l| rest.contains(l)) {
                continue;
            }
            apps.push(app(Rule::R6, t, &[p, t1, t2], ty.0.clone()));
        }
    }
    apps.into_iter()
        .map(|a| {
            let n = reduced(net, &a);
            (a, n)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TjnVerdict {
    Atomic,
    /// Reducible to this many isolated transitions.
    Tjn {
        transitions: usize,
    },
    NotTjn {
        reason: String,
    },
    Inconclusive {
        explored: usize,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct TjnReport {
    #[serde(flatten)]
    pub verdict: TjnVerdict,
    pub trace: Vec<RuleApplication>,
    pub explored: usize,
}

/// Largest number of distinct reduced nets visited before giving up.
pub const SEARCH_CAP: usize = 200_000;

/// Nets that use one variable per type and canonical inscriptions on every arc.
pub fn canonical_inscriptions(net: &Net) -> std::result::Result<(), String> {
    if !net.has_var_type_bijection() {
        return Err("variables and types are not in bijection".into());
    }
    for ((a, b), ins) in &net.arcs {
        let p = if net.is_place(a) { a } else { b };
        let want = net.canonical_vector(net.place_type(p).expect("place"));
        if want.as_ref().map(|w| vec![w.clone()]) != Some(ins.vectors().to_vec()) {
            return Err(format!("arc ({a},{b}) is not inscribed with the variables of type {}", net.place_type(p).expect("place")));
        }
    }
    Ok(())
}

struct Memo {
    buckets: HashMap<String, Vec<Net>>,
    count: usize,
}

impl Memo {
    /// Records a net; false if an isomorphic one was recorded before.
    fn insert(&mut self, net: &Net) -> bool {
        let bucket = self.buckets.entry(invariant_key(net)).or_default();
        if bucket.iter().any(|m| isomorphism(m, net, false).is_some()) {
            return false;
        }
        bucket.push(net.clone());
        self.count += 1;
        true
    }
}

/// Decides membership by exhaustive inverse-rule search.
pub fn is_tjn(net: &Net) -> TjnReport {
    is_tjn_capped(net, SEARCH_CAP)
}

pub fn is_tjn_capped(net: &Net, cap: usize) -> TjnReport {
    if let Err(reason) = canonical_inscriptions(net) {
        return TjnReport { verdict: TjnVerdict::NotTjn { reason }, trace: Vec::new(), explored: 0 };
    }
    let mut memo = Memo { buckets: HashMap::new(), count: 0 };
    let mut trace = Vec::new();
    let mut capped = false;
    let found = dfs(net, &mut memo, &mut trace, cap, &mut capped);
    let explored = memo.count;
    let verdict = match found {
        Some(1) => TjnVerdict::Atomic,
        Some(k) => TjnVerdict::Tjn { transitions: k },
        None if capped => TjnVerdict::Inconclusive { explored },
        None => TjnVerdict::NotTjn { reason: format!("no inverse rule sequence removes all places ({explored} nets explored)") },
    };
    TjnReport { verdict, trace, explored }
}

fn dfs(net: &Net, memo: &mut Memo, trace: &mut Vec<RuleApplication>, cap: usize, capped: &mut bool) -> Option<usize> {
    if net.places.is_empty() {
        return if net.transitions.is_empty() { None } else { Some(net.transitions.len()) };
    }
    if memo.count >= cap {
        *capped = true;
        return None;
    }
    if !memo.insert(net) {
        return None;
    }
    for (a, next) in reduce_candidates(net) {
        trace.push(a);
        if let Some(k) = dfs(&next, memo, trace, cap, capped) {
            return Some(k);
        }
        trace.pop();
    }
    None
}

/// Parameters of the random generator.
#[derive(Clone, Debug)]
pub struct GenParams {
    pub max_types: usize,
    pub max_nodes: usize,
    /// Relative weights of R1..R6.
    pub weights: [u32; 6],
    /// Let R2 and R6 introduce types already used elsewhere in the net. Such nets
    /// can need two identifiers of one type at once, which k-bounded exploration
    /// cannot certify.
    pub reuse_types: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { max_types: 4, max_nodes: 25, weights: [3, 4, 2, 2, 1, 2], reuse_types: false }
    }
}

/// Type names used by the generator.
pub fn type_name(i: usize) -> String {
    format!("l{}", i + 1)
}

/// Seeded random atomic t-JN together with the forward rule applications that built it.
pub fn generate_random_tjn(seed: u64, params: &GenParams) -> (Net, Vec<RuleApplication>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Net::new().with_transition("t0");
    let mut trace = Vec::new();
    if params.max_nodes <= 1 {
        return (net, trace);
    }
    let target = rng.gen_range(params.max_nodes.div_ceil(3).max(2)..=params.max_nodes);
    let all_types: Vec<String> = (0..params.max_types.max(1)).map(type_name).collect();
    let (mut np, mut nt) = (0usize, 1usize);
    let mut failures = 0;
    while failures < 60 {
        let rule = *[Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::R5, Rule::R6]
            .iter()
            .zip(params.weights)
            .collect::<Vec<_>>()
            .choose_weighted(&mut rng, |(_, w)| *w)
            .expect("positive weights")
            .0;
        let added = match rule {
            Rule::R1 | Rule::R2 => 2,
            Rule::R3 | Rule::R4 | Rule::R5 => 1,
            Rule::R6 => 3,
        };
        if net.node_count() + added > target {
            failures += 1;
            continue;
        }
        let used = net.used_types();
        let pool: Vec<String> = all_types.iter().filter(|l| params.reuse_types || !used.contains(*l)).cloned().collect();
        let Some(a) = random_site(&net, rule, &pool, &mut rng, &mut np, &mut nt) else {
            failures += 1;
            continue;
        };
        match expand(&net, &a) {
            Ok(n) => {
                net = n;
                trace.push(a);
            }
            Err(_) => failures += 1,
        }
    }
    (net, trace)
}

fn random_site(
    net: &Net,
    rule: Rule,
    new_types: &[String],
    rng: &mut ChaCha8Rng,
    np: &mut usize,
    nt: &mut usize,
) -> Option<RuleApplication> {
    let mut new_place = || {
        *np += 1;
        format!("p{np}")
    };
    let places: Vec<&String> = net.places.keys().collect();
    let transitions: Vec<&String> = net.transitions.iter().collect();
    let a = match rule {
        Rule::R1 => {
            let p = places.choose(rng)?;
            let p2 = new_place();
            *nt += 1;
            app(Rule::R1, p, &[&format!("t{nt}"), &p2], vec![])
        }
        Rule::R2 => {
            let t = transitions.choose(rng)?;
            let mut ty = var_types(net, t);
            if ty.is_empty() || rng.gen_bool(0.2) {
                ty.insert(new_types.choose(rng)?.clone());
            }
            let p = new_place();
            *nt += 1;
            app(Rule::R2, t, &[&p, &format!("t{nt}")], ty.into_iter().collect())
        }
        Rule::R3 => {
            let cands: Vec<&&String> = places
                .iter()
                .filter(|p| {
                    let (pre, post) = (net.preset(p), net.postset(p));
                    pre.len() == 1 && post.len() == 1 && pre != post
                })
                .collect();
            let p = cands.choose(rng)?;
            let ty = net.place_type(p)?;
            let mut dup: Vec<String> = ty.0.clone();
            dup.shuffle(rng);
            dup.truncate(rng.gen_range(1..=dup.len()));
            let q = new_place();
            app(Rule::R3, p, &[&q], dup)
        }
        Rule::R4 => {
            let cands: Vec<&&String> = transitions.iter().filter(|t| !(net.preset(t).is_empty() && net.postset(t).is_empty())).collect();
            let t = cands.choose(rng)?;
            *nt += 1;
            app(Rule::R4, t, &[&format!("t{nt}")], vec![])
        }
        Rule::R5 => {
            let p = places.choose(rng)?;
            *nt += 1;
            app(Rule::R5, p, &[&format!("t{nt}")], vec![])
        }
        Rule::R6 => {
            let t = transitions.choose(rng)?;
            let used = var_types(net, t);
            let free: Vec<&String> = new_types.iter().filter(|l| !used.contains(*l)).collect();
            let k = if free.len() > 1 && rng.gen_bool(0.2) { 2 } else { 1 };
            let ty: Vec<String> = free.choose_multiple(rng, k).map(|s| s.to_string()).collect();
            if ty.is_empty() {
                return None;
            }
            let p = new_place();
            *nt += 2;
            app(Rule::R6, t, &[&p, &format!("t{}", *nt - 1), &format!("t{nt}")], ty)
        }
    };
    Some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn verdict(n: &Net) -> TjnVerdict {
        is_tjn(n).verdict
    }

    #[test]
    fn fixtures_are_atomic() {
        assert_eq!(verdict(&fixtures::fig3a()), TjnVerdict::Atomic);
        assert_eq!(verdict(&fixtures::fig3b()), TjnVerdict::Atomic);
        assert_eq!(verdict(&fixtures::fig5a()), TjnVerdict::Atomic);
        assert_eq!(verdict(&fixtures::fig4()), TjnVerdict::Atomic);
        assert_eq!(verdict(&fixtures::running_example()), TjnVerdict::Atomic);
    }

    #[test]
    fn single_transition_has_no_candidates() {
        let n = Net::new().with_transition("t");
        assert!(reduce_candidates(&n).is_empty());
        assert_eq!(verdict(&n), TjnVerdict::Atomic);
    }

    #[test]
    fn two_isolated_transitions_are_flagged() {
        let n = Net::new().with_transition("a").with_transition("b");
        assert_eq!(verdict(&n), TjnVerdict::Tjn { transitions: 2 });
    }

    #[test]
    fn fig3a_chain_reduces_by_r2() {
        let cands = reduce_candidates(&fixtures::fig3a());
        let r2: Vec<&RuleApplication> = cands.iter().map(|(a, _)| a).filter(|a| a.rule == Rule::R2).collect();
        assert!(r2.iter().any(|a| a.site == ["c"] && a.new_nodes == ["q", "b"]));
        assert!(r2.iter().any(|a| a.site == ["a"] && a.new_nodes == ["p", "c"]));
    }

    #[test]
    fn forward_examples() {
        let n = Net::new()
            .with_var("x", "l1")
            .with_place("p", &["l1"])
            .with_transition("a")
            .with_transition("b")
            .with_tarc("a", "p")
            .with_tarc("p", "b");
        let r1 = expand(&n, &app(Rule::R1, "p", &[&"t".to_string(), &"p2".to_string()], vec![])).unwrap();
        assert!(r1.arc("p", "t").is_some() && r1.arc("t", "p2").is_some() && r1.arc("p2", "b").is_some() && r1.arc("p", "b").is_none());
        let r6 = expand(&n, &app(Rule::R6, "a", &[&"q".into(), &"e".into(), &"c".into()], vec!["l2".into()])).unwrap();
        assert_eq!(r6.place_type("q").unwrap(), &PlaceType::of(["l2"]));
        assert!(r6.arc("a", "q").is_some() && r6.arc("q", "a").is_some() && r6.arc("e", "q").is_some() && r6.arc("q", "c").is_some());
        let bad = expand(&r6, &app(Rule::R2, "a", &[&"z".into(), &"t9".into()], vec!["l1".into()]));
        assert!(matches!(bad, Err(Error::SideCondition(m)) if m.contains("R2")));
    }

    #[test]
    fn inverse_undoes_forward() {
        for seed in 0..30 {
            let (net, trace) = generate_random_tjn(seed, &GenParams::default());
            let mut cur = Net::new().with_transition("t0");
            for a in &trace {
                let next = expand(&cur, a).unwrap();
                let mirrored = |b: &RuleApplication| b.rule == Rule::R4 && b.site == a.new_nodes && b.new_nodes == a.site;
                let back = reduce_candidates(&next).into_iter().find(|(b, _)| b == a || mirrored(b));
                let (b, prev) = back.unwrap_or_else(|| panic!("inverse of {a} not offered"));
                if &b == a {
                    assert_eq!(prev.places, cur.places);
                    assert_eq!(prev.transitions, cur.transitions);
                    assert_eq!(prev.arcs, cur.arcs);
                } else {
                    assert!(isomorphism(&prev, &cur, false).is_some());
                }
                cur = next;
            }
            assert_eq!(cur, net);
        }
    }

    #[test]
    fn generated_nets_are_atomic() {
        for seed in 0..40 {
            let (net, _) = generate_random_tjn(seed, &GenParams::default());
            assert!(net.node_count() <= 25);
            assert!(crate::model::validate_tjn_mode(&net).is_valid());
            assert_eq!(verdict(&net), TjnVerdict::Atomic, "seed {seed}");
        }
    }

    #[test]
    fn tiny_generator_output_is_single_transition() {
        let (net, trace) = generate_random_tjn(7, &GenParams { max_nodes: 1, ..GenParams::default() });
        assert_eq!(net.node_count(), 1);
        assert!(trace.is_empty());
    }
}
