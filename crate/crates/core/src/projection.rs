//! Type projection, composition, minor places and reconstruction.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Inscription, Net, PlaceType};

/// Nonempty set of type labels; iteration order is the Gödel order.
pub type TypeSet = BTreeSet<String>;

/// Default guard on the number of types `reconstruct` enumerates subsets of.
pub const MAX_RECONSTRUCT_TYPES: usize = 8;

/// Parses a comma-separated list of type labels.
pub fn parse_type_set(text: &str) -> TypeSet {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn check_types(net: &Net, ups: &TypeSet) -> Result<()> {
    if ups.is_empty() {
        return Err(Error::Invalid("empty type set".into()));
    }
    match ups.iter().find(|l| !net.types.contains(l)) {
        Some(l) => Err(Error::UnknownType(l.clone())),
        None => Ok(()),
    }
}

/// Suffix appended to projected place ids: the variables of the types, in Gödel order.
pub fn signature(net: &Net, ups: &TypeSet) -> String {
    ups.iter().map(|l| net.type_var(l).unwrap_or(l)).collect()
}

/// Places whose type covers `ups`.
pub fn projected_places(net: &Net, ups: &TypeSet) -> BTreeSet<String> {
    net.places.iter().filter(|(_, ty)| ups.iter().all(|l| ty.contains(l))).map(|(p, _)| p.clone()).collect()
}

/// Transitions whose variables cover every type of `ups`.
pub fn projected_transitions(net: &Net, ups: &TypeSet) -> BTreeSet<String> {
    net.transitions.iter().filter(|t| ups.is_subset(&net.transition_types(t))).cloned().collect()
}

fn restrict(net: &Net, ins: &Inscription, ups: &TypeSet) -> Inscription {
    Inscription::new(
        ins.vectors().iter().map(|v| v.iter().filter(|x| net.var_type(x).is_some_and(|l| ups.contains(l))).cloned().collect()).collect(),
    )
}

/// Type projection on `ups`: covering places retyped to `ups` and renamed `p_sig`,
/// the transitions covering `ups`, and inscriptions restricted to variables of `ups`.
pub fn project(net: &Net, ups: &TypeSet) -> Result<Net> {
    check_types(net, ups)?;
    let sig = signature(net, ups);
    let places = projected_places(net, ups);
    let transitions = projected_transitions(net, ups);
    let rename = |p: &str| format!("{p}_{sig}");
    let mut out = Net::new();
    for l in ups {
        out.types.push(l.clone());
    }
    out.variables = net.variables.iter().filter(|(_, l)| ups.contains(*l)).map(|(v, l)| (v.clone(), l.clone())).collect();
    for p in &places {
        out.places.insert(rename(p), PlaceType::of(ups.iter().cloned()));
    }
    out.transitions = transitions.clone();
    for ((from, to), ins) in &net.arcs {
        let key = if places.contains(from) && transitions.contains(to) {
            (rename(from), to.clone())
        } else if transitions.contains(from) && places.contains(to) {
            (from.clone(), rename(to))
        } else {
            continue;
        };
        out.arcs.insert(key, restrict(net, ins, ups));
    }
    Ok(out)
}

/// Union of two nets keyed by place (id, type), transition id and arc endpoints.
pub fn compose(n1: &Net, n2: &Net) -> Result<Net> {
    let mut out = n1.clone();
    for l in &n2.types {
        if !out.types.contains(l) {
            out.types.push(l.clone());
        }
    }
    for (v, l) in &n2.variables {
        match out.variables.get(v) {
            Some(l1) if l1 != l => return Err(Error::Conflict(format!("variable `{v}` typed {l1} and {l}"))),
            _ => {
                out.variables.insert(v.clone(), l.clone());
            }
        }
    }
    for (p, ty) in &n2.places {
        if out.transitions.contains(p) {
            return Err(Error::Conflict(format!("`{p}` is a transition and a place")));
        }
        match out.places.get(p) {
            Some(ty1) if ty1 != ty => return Err(Error::Conflict(format!("place `{p}` typed {ty1} and {ty}"))),
            _ => {
                out.places.insert(p.clone(), ty.clone());
            }
        }
    }
    for t in &n2.transitions {
        if out.places.contains_key(t) {
            return Err(Error::Conflict(format!("`{t}` is a place and a transition")));
        }
        out.transitions.insert(t.clone());
    }
    for (k, ins) in &n2.arcs {
        match out.arcs.get(k) {
            Some(i1) if i1 != ins => {
                return Err(Error::Conflict(format!("arc {}->{} inscribed differently", k.0, k.1)));
            }
            _ => {
                out.arcs.insert(k.clone(), ins.clone());
            }
        }
    }
    Ok(out)
}

/// Left fold of `compose` over `nets`, starting from the empty net.
pub fn compose_all<'a>(nets: impl IntoIterator<Item = &'a Net>) -> Result<Net> {
    nets.into_iter().try_fold(Net::new(), |acc, n| compose(&acc, n))
}

/// Whether `p` is minor to `q`: same pre- and postsets, strictly smaller type, and
/// every arc of `p` carries the restriction of the corresponding arc of `q`.
pub fn is_minor(net: &Net, p: &str, q: &str) -> bool {
    let (Some(tp), Some(tq)) = (net.place_type(p), net.place_type(q)) else {
        return false;
    };
    if p == q || tp == tq || !tp.is_subset(tq) {
        return false;
    }
    if net.preset(p) != net.preset(q) || net.postset(p) != net.postset(q) {
        return false;
    }
    let ups = tp.as_set();
    let arc_pairs = net
        .preset(p)
        .into_iter()
        .map(|t| ((t.clone(), p.to_string()), (t, q.to_string())))
        .chain(net.postset(p).into_iter().map(|t| ((p.to_string(), t.clone()), (q.to_string(), t))));
    arc_pairs.into_iter().all(|(kp, kq)| net.arcs[&kp] == restrict(net, &net.arcs[&kq], &ups))
}

/// All pairs (p, q) with p minor to q.
pub fn minor_pairs(net: &Net) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for p in net.places.keys() {
        for q in net.places.keys() {
            if is_minor(net, p, q) {
                out.insert((p.clone(), q.clone()));
            }
        }
    }
    out
}

/// Removes minor places one at a time, least type (Gödel order) then id first, until none remain.
pub fn remove_minors(net: &Net) -> Net {
    let mut out = net.clone();
    loop {
        let next = minor_pairs(&out).into_iter().map(|(p, _)| (out.places[&p].clone(), p)).min();
        match next {
            Some((_, p)) => out.remove_node(&p),
            None => return out,
        }
    }
}

/// Nonempty subsets of the net's types, by size then Gödel order.
pub fn type_subsets(net: &Net) -> Vec<TypeSet> {
    let types = net.sorted_types();
    let mut subsets: Vec<TypeSet> = (1u64..(1u64 << types.len()))
        .map(|mask| types.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| l.clone()).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// Composition of the projections on every nonempty subset of the net's types.
pub fn reconstruct(net: &Net) -> Result<Net> {
    reconstruct_guarded(net, MAX_RECONSTRUCT_TYPES)
}

pub fn reconstruct_guarded(net: &Net, max_types: usize) -> Result<Net> {
    if net.types.len() > max_types {
        return Err(Error::Invalid(format!("{} types exceed the subset guard of {max_types}", net.types.len())));
    }
    let parts = type_subsets(net).iter().map(|u| project(net, u)).collect::<Result<Vec<_>>>()?;
    compose_all(&parts)
}

/// Projections keyed by their type set, for reporting.
pub fn all_projections(net: &Net) -> Result<BTreeMap<Vec<String>, Net>> {
    type_subsets(net).into_iter().map(|u| Ok((u.iter().cloned().collect(), project(net, &u)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::iso::net_isomorphic;

    fn ts(labels: &[&str]) -> TypeSet {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fig5a_projections_match_the_drawn_nets() {
        let n = fixtures::fig5a();
        let cases = [(ts(&["l1"]), fixtures::fig5b()), (ts(&["l2"]), fixtures::fig5c()), (ts(&["l1", "l2"]), fixtures::fig6a())];
        for (u, expected) in cases {
            let p = project(&n, &u).unwrap();
            assert!(net_isomorphic(&p, &expected).is_some(), "{u:?}");
        }
        let p = project(&n, &ts(&["l1"])).unwrap();
        assert!(!p.transitions.contains("e"));
        assert_eq!(p.place_type("p3_x"), Some(&PlaceType::of(["l1"])));
    }

    #[test]
    fn projection_errors() {
        let n = fixtures::fig5a();
        assert!(matches!(project(&n, &TypeSet::new()), Err(Error::Invalid(_))));
        assert!(matches!(project(&n, &ts(&["zz"])), Err(Error::UnknownType(_))));
    }

    #[test]
    fn composition_of_figure_projections() {
        let n = fixtures::fig5a();
        let b = project(&n, &ts(&["l1"])).unwrap();
        let c = project(&n, &ts(&["l2"])).unwrap();
        let d = compose(&b, &c).unwrap();
        assert!(net_isomorphic(&d, &fixtures::fig5d()).is_some());
        assert!(minor_pairs(&d).is_empty());
        let full = reconstruct(&n).unwrap();
        assert!(net_isomorphic(&full, &fixtures::fig6b()).is_some());
        let expected: BTreeSet<(String, String)> =
            [("p3_x", "p3_xy"), ("p3_y", "p3_xy")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        assert_eq!(minor_pairs(&full), expected);
        assert!(net_isomorphic(&remove_minors(&full), &n).is_some());
    }

    #[test]
    fn compose_is_idempotent_and_detects_conflicts() {
        let n = fixtures::running_example();
        assert_eq!(compose(&n, &n).unwrap(), n);
        let mut m = n.clone();
        let key = m.arcs.keys().next().unwrap().clone();
        m.arcs.insert(key, Inscription::single(["zz"]));
        assert!(matches!(compose(&n, &m), Err(Error::Conflict(_))));
        let mut q = n.clone();
        let p = q.places.keys().next().unwrap().clone();
        q.places.insert(p, PlaceType::of(["x", "y", "z"]));
        assert!(matches!(compose(&n, &q), Err(Error::Conflict(_))));
    }

    #[test]
    fn fig4_composition_minor_pairs() {
        let full = reconstruct(&fixtures::fig4()).unwrap();
        let expected: BTreeSet<(String, String)> = [("p_x", "p_xy"), ("p_y", "p_xy"), ("q_x", "q_xy"), ("q_y", "q_xy")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(minor_pairs(&full), expected);
    }

    #[test]
    fn single_type_reconstruction_is_the_net() {
        let n = fixtures::fig3a();
        assert!(net_isomorphic(&reconstruct(&n).unwrap(), &n).is_some());
        assert!(minor_pairs(&n).is_empty());
        assert_eq!(remove_minors(&n), n);
    }

    #[test]
    fn subset_guard() {
        let mut n = Net::new();
        for i in 0..9 {
            n = n.with_var(&format!("v{i}"), &format!("t{i}"));
        }
        assert!(reconstruct(&n).is_err());
        assert_eq!(type_subsets(&fixtures::running_example()).len(), 7);
    }
}
