//! Structural isomorphism of labelled graphs and of t-PNIDs.
//!
//! Nets are compared without regard to node names: places must agree on
//! type, arcs on their inscription read through the variable typing.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::model::Net;
use crate::projection::remove_minors;

/// Directed graph with node and edge labels; at most one edge per ordered pair.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    pub labels: Vec<String>,
    pub edges: BTreeMap<(usize, usize), String>,
}

impl Graph {
    fn adjacency(&self) -> (Vec<Vec<(usize, &str)>>, Vec<Vec<(usize, &str)>>) {
        let mut out = vec![Vec::new(); self.labels.len()];
        let mut inc = vec![Vec::new(); self.labels.len()];
        for ((a, b), l) in &self.edges {
            out[*a].push((*b, l.as_str()));
            inc[*b].push((*a, l.as_str()));
        }
        (out, inc)
    }
}

/// Stable colour refinement run on both graphs jointly so colours are comparable.
pub fn joint_colors(g1: &Graph, g2: &Graph) -> (Vec<usize>, Vec<usize>) {
    let n1 = g1.labels.len();
    let (o1, i1) = g1.adjacency();
    let (o2, i2) = g2.adjacency();
    let nodes: Vec<(&Vec<(usize, &str)>, &Vec<(usize, &str)>, usize)> =
        (0..n1).map(|i| (&o1[i], &i1[i], 0)).chain((0..g2.labels.len()).map(|i| (&o2[i], &i2[i], n1))).collect();
    let all_labels: Vec<&String> = g1.labels.iter().chain(&g2.labels).collect();
    let mut distinct: Vec<&String> = all_labels.clone();
    distinct.sort();
    distinct.dedup();
    let mut colors: Vec<usize> = all_labels.iter().map(|l| distinct.binary_search(l).expect("present")).collect();
    let mut classes = distinct.len();
    loop {
        let mut table: HashMap<(usize, Vec<(u8, &str, usize)>), usize> = HashMap::new();
        let mut sigs = Vec::with_capacity(colors.len());
        for (i, (out, inc, off)) in nodes.iter().enumerate() {
            let mut s: Vec<(u8, &str, usize)> =
                out.iter().map(|(j, l)| (0u8, *l, colors[j + off])).chain(inc.iter().map(|(j, l)| (1u8, *l, colors[j + off]))).collect();
            s.sort();
            sigs.push((colors[i], s));
        }
        let mut sorted: Vec<&(usize, Vec<(u8, &str, usize)>)> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        for (k, s) in sorted.into_iter().enumerate() {
            table.insert(s.clone(), k);
        }
        let next: Vec<usize> = sigs.iter().map(|s| table[s]).collect();
        let n = table.len();
        colors = next;
        if n == classes {
            break;
        }
        classes = n;
    }
    let c2 = colors.split_off(n1);
    (colors, c2)
}

/// Node map from `g1` to `g2` preserving node labels and labelled edges, if one exists.
pub fn graph_isomorphism(g1: &Graph, g2: &Graph) -> Option<Vec<usize>> {
    let n = g1.labels.len();
    if n != g2.labels.len() || g1.edges.len() != g2.edges.len() {
        return None;
    }
    let (c1, c2) = joint_colors(g1, g2);
    let mut m1 = c1.clone();
    let mut m2 = c2.clone();
    m1.sort();
    m2.sort();
    if m1 != m2 {
        return None;
    }
    let mut class_size: HashMap<usize, usize> = HashMap::new();
    for c in &c1 {
        *class_size.entry(*c).or_insert(0) += 1;
    }
    let (o1, i1) = g1.adjacency();
    // order: most constrained first, then neighbours of mapped nodes
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    for _ in 0..n {
        let next =
            (0..n).filter(|v| !placed[*v]).min_by_key(|v| (std::cmp::Reverse(links[*v]), class_size[&c1[*v]], *v)).expect("unplaced node");
        placed[next] = true;
        order.push(next);
        for (u, _) in o1[next].iter().chain(&i1[next]) {
            links[*u] += 1;
        }
    }
    let mut by_color: HashMap<usize, Vec<usize>> = HashMap::new();
    for (v, c) in c2.iter().enumerate() {
        by_color.entry(*c).or_default().push(v);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let ctx = Search { g2, c1: &c1, by_color: &by_color, o1: &o1, i1: &i1, order: &order };
    if ctx.extend(0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

struct Search<'a> {
    g2: &'a Graph,
    c1: &'a [usize],
    by_color: &'a HashMap<usize, Vec<usize>>,
    o1: &'a [Vec<(usize, &'a str)>],
    i1: &'a [Vec<(usize, &'a str)>],
    order: &'a [usize],
}

impl Search<'_> {
    fn extend(&self, depth: usize, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        let Some(cands) = self.by_color.get(&self.c1[v]) else { return false };
        for &c in cands {
            if used[c] || !self.consistent(v, c, map) {
                continue;
            }
            map[v] = c;
            used[c] = true;
            if self.extend(depth + 1, map, used) {
                return true;
            }
            map[v] = usize::MAX;
            used[c] = false;
        }
        false
    }

    fn consistent(&self, v: usize, c: usize, map: &[usize]) -> bool {
        let mut count = 0;
        for (u, l) in &self.o1[v] {
            let img = if *u == v { c } else { map[*u] };
            if img == usize::MAX {
                continue;
            }
            count += 1;
            if self.g2.edges.get(&(c, img)).map(String::as_str) != Some(*l) {
                return false;
            }
        }
        for (u, l) in &self.i1[v] {
            if *u == v {
                continue;
            }
            let img = map[*u];
            if img == usize::MAX {
                continue;
            }
            count += 1;
            if self.g2.edges.get(&(img, c)).map(String::as_str) != Some(*l) {
                return false;
            }
        }
        // the image must not have extra edges to already mapped nodes
        let mapped: BTreeSet<usize> = map.iter().copied().filter(|x| *x != usize::MAX).chain([c]).collect();
        let extra =
            self.g2.edges.keys().filter(|(a, b)| (*a == c && mapped.contains(b)) || (*b == c && *a != c && mapped.contains(a))).count();
        extra == count
    }
}

/// Place and transition correspondences between two nets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeBijection {
    pub places: BTreeMap<String, String>,
    pub transitions: BTreeMap<String, String>,
}

/// Arc label with variables replaced by their types.
pub fn typed_inscription(net: &Net, from: &str, to: &str) -> String {
    let ins = net.arc(from, to).expect("arc present");
    let mut vecs: Vec<String> =
        ins.vectors().iter().map(|v| v.iter().map(|x| net.var_type(x).unwrap_or(x)).collect::<Vec<_>>().join(",")).collect();
    vecs.sort();
    format!("[{}]", vecs.join("|"))
}

fn net_graph(net: &Net, match_transition_ids: bool) -> (Graph, Vec<String>) {
    let mut names: Vec<String> = net.places.keys().cloned().collect();
    let mut labels: Vec<String> = net.places.values().map(|t| format!("P{t}")).collect();
    for t in &net.transitions {
        names.push(t.clone());
        labels.push(if match_transition_ids { format!("T:{t}") } else { "T".to_string() });
    }
    let index: HashMap<&String, usize> = names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let edges = net.arcs.keys().map(|(a, b)| ((index[a], index[b]), typed_inscription(net, a, b))).collect();
    (Graph { labels, edges }, names)
}

/// Type- and inscription-preserving isomorphism; places may be renamed, transitions keep their ids.
pub fn net_isomorphic(n1: &Net, n2: &Net) -> Option<NodeBijection> {
    isomorphism(n1, n2, true)
}

/// Isomorphism with places always name-free and transitions optionally so.
pub fn isomorphism(n1: &Net, n2: &Net, match_transition_ids: bool) -> Option<NodeBijection> {
    let (g1, names1) = net_graph(n1, match_transition_ids);
    let (g2, names2) = net_graph(n2, match_transition_ids);
    let map = graph_isomorphism(&g1, &g2)?;
    let mut b = NodeBijection { places: BTreeMap::new(), transitions: BTreeMap::new() };
    for (i, j) in map.iter().enumerate() {
        if n1.is_place(&names1[i]) {
            b.places.insert(names1[i].clone(), names2[*j].clone());
        } else {
            b.transitions.insert(names1[i].clone(), names2[*j].clone());
        }
    }
    debug_assert!(validate_bijection(n1, n2, &b));
    Some(b)
}

/// Outcome of comparing two nets after removing their minor places.
#[derive(Clone, Debug, Serialize)]
pub struct MinorIsoReport {
    pub holds: bool,
    pub bijection: Option<NodeBijection>,
    pub removed_left: Vec<String>,
    pub removed_right: Vec<String>,
}

/// Isomorphism after removing minor places from both nets.
pub fn iso_modulo_minors(n1: &Net, n2: &Net) -> MinorIsoReport {
    let (r1, r2) = (remove_minors(n1), remove_minors(n2));
    let removed = |a: &Net, b: &Net| a.places.keys().filter(|p| !b.places.contains_key(*p)).cloned().collect();
    let bijection = net_isomorphic(&r1, &r2);
    MinorIsoReport { holds: bijection.is_some(), bijection, removed_left: removed(n1, &r1), removed_right: removed(n2, &r2) }
}

/// Independent edge-by-edge check of a claimed isomorphism.
pub fn validate_bijection(n1: &Net, n2: &Net, b: &NodeBijection) -> bool {
    let bij = |m: &BTreeMap<String, String>, a: usize, b: usize| {
        m.len() == a && m.len() == b && m.values().collect::<BTreeSet<_>>().len() == m.len()
    };
    if !bij(&b.places, n1.places.len(), n2.places.len()) || !bij(&b.transitions, n1.transitions.len(), n2.transitions.len()) {
        return false;
    }
    for (p, q) in &b.places {
        if n1.place_type(p) != n2.place_type(q) {
            return false;
        }
    }
    if n1.arcs.len() != n2.arcs.len() {
        return false;
    }
    let img = |x: &String| b.places.get(x).or_else(|| b.transitions.get(x));
    for (a, c) in n1.arcs.keys() {
        let (Some(a2), Some(c2)) = (img(a), img(c)) else { return false };
        if n2.arc(a2, c2).is_none() || typed_inscription(n1, a, c) != typed_inscription(n2, a2, c2) {
            return false;
        }
    }
    true
}

/// Isomorphism-invariant fingerprint; equal for isomorphic nets.
pub fn invariant_key(net: &Net) -> String {
    let (g, _) = net_graph(net, false);
    let (c, _) = joint_colors(&g, &Graph::default());
    // colours are interned in a canonical order, so the sorted multiset is invariant
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for x in c {
        *counts.entry(x).or_insert(0) += 1;
    }
    let mut labels: Vec<&String> = g.labels.iter().collect();
    labels.sort();
    format!("{}|{}|{:?}", g.labels.len(), g.edges.len(), counts.values().collect::<Vec<_>>()) + &format!("{labels:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn every_fixture_is_isomorphic_to_itself() {
        for (_, n) in fixtures::all_nets() {
            let b = net_isomorphic(&n, &n).expect("self isomorphism");
            assert!(validate_bijection(&n, &n, &b));
        }
    }

    #[test]
    fn fig3_nets_are_not_isomorphic() {
        assert!(net_isomorphic(&fixtures::fig3a(), &fixtures::fig3b()).is_none());
    }

    #[test]
    fn renaming_places_keeps_isomorphism() {
        let a = fixtures::fig3a();
        let b = crate::fixtures::fig3b();
        // fig3a with q renamed is still fig3a
        let mut c = a.clone();
        c.places.remove("q");
        c.places.insert("zz".into(), crate::PlaceType::of(["l1"]));
        let arcs: Vec<_> = c.arcs.clone().into_iter().collect();
        c.arcs.clear();
        for ((f, t), i) in arcs {
            let r = |s: String| if s == "q" { "zz".to_string() } else { s };
            c.arcs.insert((r(f), r(t)), i);
        }
        assert!(net_isomorphic(&a, &c).is_some());
        assert!(net_isomorphic(&b, &c).is_none());
        assert!(isomorphism(&b, &c, false).is_some());
    }

    #[test]
    fn inscriptions_matter() {
        let a = Net::new().with_var("x", "l1").with_var("y", "l2").with_place("p", &["l1"]).with_transition("t").with_arc("t", "p", &["x"]);
        let b = Net::new().with_var("x", "l1").with_var("y", "l2").with_place("p", &["l1"]).with_transition("t").with_arc("p", "t", &["x"]);
        assert!(net_isomorphic(&a, &b).is_none());
    }

    #[test]
    fn transition_ids_can_be_required() {
        let a = Net::new().with_transition("a").with_transition("b");
        let b = Net::new().with_transition("a").with_transition("c");
        assert!(isomorphism(&a, &b, false).is_some());
        assert!(isomorphism(&a, &b, true).is_none());
    }
}
