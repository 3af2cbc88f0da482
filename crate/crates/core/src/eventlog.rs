//! Event logs induced by firing sequences, sequence projection, replay and
//! directly-follows completeness.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jackson::ClassicalNet;
use crate::model::Net;
use crate::projection::{projected_transitions, TypeSet};
use crate::semantics::{FiringRecord, FiringSequence};
use crate::wfnet::{language_dfg, replay, ClassicalMarking, Dfg};

/// Events of one case; the case holds one identifier per type, in Gödel order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Trace {
    pub case: Vec<String>,
    pub trace: Vec<String>,
}

/// Traces induced for one type set, ordered by case.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventLog {
    pub types: Vec<String>,
    pub traces: Vec<Trace>,
}

#[derive(Serialize, Deserialize)]
struct LogLine {
    types: Vec<String>,
    case: Vec<String>,
    trace: Vec<String>,
}

impl EventLog {
    /// The log as a set of activity sequences.
    pub fn language(&self) -> BTreeSet<Vec<String>> {
        self.traces.iter().map(|t| t.trace.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn activities(&self) -> BTreeSet<String> {
        self.traces.iter().flat_map(|t| t.trace.iter().cloned()).collect()
    }

    /// One JSON record per trace, newline-delimited.
    pub fn to_jsonl(&self) -> String {
        self.traces
            .iter()
            .map(|t| {
                let line = LogLine { types: self.types.clone(), case: t.case.clone(), trace: t.trace.clone() };
                serde_json::to_string(&line).expect("log serialization") + "\n"
            })
            .collect()
    }

    pub fn from_jsonl(text: &str) -> Result<EventLog> {
        let mut log = EventLog::default();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let rec: LogLine = serde_json::from_str(line)?;
            if i > 0 && rec.types != log.types {
                return Err(Error::Parse(format!("line {}: type set differs from the first line", i + 1)));
            }
            log.types = rec.types;
            if rec.case.len() != log.types.len() {
                return Err(Error::Parse(format!("line {}: case has {} identifiers for {} types", i + 1, rec.case.len(), log.types.len())));
            }
            log.traces.push(Trace { case: rec.case, trace: rec.trace });
        }
        log.traces.sort();
        Ok(log)
    }
}

fn cartesian(per_type: &[Vec<String>]) -> Vec<Vec<String>> {
    per_type.iter().fold(vec![Vec::new()], |acc, ids| {
        acc.iter()
            .flat_map(|prefix| {
                ids.iter().map(move |id| {
                    let mut v = prefix.clone();
                    v.push(id.clone());
                    v
                })
            })
            .collect()
    })
}

/// Log induced on `ups`: for every case vector (one identifier per type), the firings whose
/// binding contains every identifier of the case. Empty traces are dropped.
pub fn induced_log(seq: &FiringSequence, ups: &TypeSet) -> EventLog {
    let types: Vec<String> = ups.iter().cloned().collect();
    let ids: Vec<BTreeMap<String, BTreeSet<String>>> = seq.records.iter().map(|r| seq.record_ids(r)).collect();
    let mut cases: BTreeSet<Vec<String>> = BTreeSet::new();
    for rid in &ids {
        let per_type: Option<Vec<Vec<String>>> = types.iter().map(|ty| rid.get(ty).map(|s| s.iter().cloned().collect())).collect();
        if let Some(per_type) = per_type {
            cases.extend(cartesian(&per_type));
        }
    }
    let traces = cases
        .into_iter()
        .map(|case| {
            let trace = seq
                .records
                .iter()
                .zip(&ids)
                .filter(|(_, rid)| types.iter().zip(&case).all(|(ty, id)| rid.get(ty).is_some_and(|s| s.contains(id))))
                .map(|(r, _)| r.transition.clone())
                .collect();
            Trace { case, trace }
        })
        .collect();
    EventLog { types, traces }
}

/// Firings of transitions kept by the projection on `ups`, with bindings restricted to `ups`.
pub fn project_sequence(net: &Net, seq: &FiringSequence, ups: &TypeSet) -> FiringSequence {
    let keep = projected_transitions(net, ups);
    let vars: BTreeMap<String, String> =
        seq.variables.iter().filter(|(_, ty)| ups.contains(*ty)).map(|(v, ty)| (v.clone(), ty.clone())).collect();
    let records = seq
        .records
        .iter()
        .filter(|r| keep.contains(&r.transition))
        .map(|r| FiringRecord {
            transition: r.transition.clone(),
            binding: r.binding.iter().filter(|(v, _)| vars.contains_key(*v)).map(|(v, i)| (v.clone(), i.clone())).collect(),
        })
        .collect();
    FiringSequence { variables: vars, records }
}

/// Outcome of replaying a log on a marked net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generation {
    pub holds: bool,
    /// First trace that does not replay, with the index of its first disabled event.
    pub failing: Option<(Trace, usize)>,
}

/// Whether every trace of the log is a firing sequence of the net from `m0`.
pub fn generated_by(log: &EventLog, net: &ClassicalNet, m0: &ClassicalMarking) -> Result<Generation> {
    if let Some(a) = log.activities().into_iter().find(|a| !net.transitions.contains(a)) {
        return Err(Error::UnknownTransition(a));
    }
    for t in &log.traces {
        if let Err(i) = replay(net, m0, &t.trace) {
            return Ok(Generation { holds: false, failing: Some((t.clone(), i)) });
        }
    }
    Ok(Generation { holds: true, failing: None })
}

pub fn dfg(log: &EventLog) -> Dfg {
    let traces: Vec<Vec<String>> = log.traces.iter().map(|t| t.trace.clone()).collect();
    Dfg::of_traces(&traces)
}

/// Comparison of a log's directly-follows graph with that of a WF-net's language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DfCompleteness {
    pub holds: bool,
    pub log: Dfg,
    pub model: Dfg,
}

/// Whether the log's directly-follows graph equals the one of the net's complete traces.
/// Errors when the reachability graph exceeds `max_states`.
pub fn df_complete(log: &EventLog, wfnet: &ClassicalNet, max_states: usize) -> Result<DfCompleteness> {
    let model = language_dfg(wfnet, max_states)?;
    let log = dfg(log);
    Ok(DfCompleteness { holds: log == model, log, model })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::projection::{parse_type_set, project};
    use crate::wfnet::{closure, initial_marking, underlying};

    fn table1() -> (Net, FiringSequence) {
        let net = fixtures::running_example();
        let seq = FiringSequence::from_csv(fixtures::TABLE1_CSV, Some(&net)).unwrap();
        (net, seq)
    }

    fn lang(traces: &[&[&str]]) -> BTreeSet<Vec<String>> {
        traces.iter().map(|t| t.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn table1_induced_logs() {
        let (_, seq) = table1();
        let x = induced_log(&seq, &parse_type_set("x"));
        assert_eq!(x.language(), lang(&[&["A", "E", "B"], &["A", "C", "D", "B"]]));
        assert_eq!(x.traces[0].case, vec!["p1".to_string()]);
        assert_eq!(induced_log(&seq, &parse_type_set("z")).language(), lang(&[&["T", "G", "Z", "V"], &["T", "V"]]));
        assert_eq!(induced_log(&seq, &parse_type_set("y,z")).language(), lang(&[&["G", "Z"]]));
        assert_eq!(induced_log(&seq, &parse_type_set("x,y")).language(), lang(&[&["E"]]));
        assert_eq!(induced_log(&seq, &parse_type_set("y")).language(), lang(&[&["G", "E", "H", "L", "J", "O", "K", "Z"]]));
        assert!(induced_log(&seq, &parse_type_set("x,z")).is_empty());
    }

    #[test]
    fn projected_sequence_keeps_the_induced_log() {
        let (net, seq) = table1();
        let z = parse_type_set("z");
        let pz = project_sequence(&net, &seq, &z);
        assert_eq!(pz.len(), 6);
        assert!(pz.records.iter().all(|r| r.binding.keys().all(|v| v == "z")));
        for u in crate::projection::type_subsets(&net) {
            assert_eq!(induced_log(&seq, &u), induced_log(&project_sequence(&net, &seq, &u), &u));
        }
        let empty = FiringSequence::new(net.variables.clone());
        assert!(project_sequence(&net, &empty, &z).is_empty());
    }

    #[test]
    fn induced_log_replays_on_the_projection_closure() {
        let (net, seq) = table1();
        let x = parse_type_set("x");
        let w = closure(&underlying(&project(&net, &x).unwrap())).unwrap();
        let m0 = initial_marking(&w).unwrap();
        assert!(generated_by(&induced_log(&seq, &x), &w, &m0).unwrap().holds);
        let bad =
            EventLog { types: vec!["x".into()], traces: vec![Trace { case: vec!["p9".into()], trace: vec!["B".into(), "A".into()] }] };
        let g = generated_by(&bad, &w, &m0).unwrap();
        assert!(!g.holds);
        assert_eq!(g.failing.unwrap().1, 0);
        assert!(generated_by(&EventLog::default(), &w, &m0).unwrap().holds);
        let unknown = EventLog { types: vec!["x".into()], traces: vec![Trace { case: vec!["p9".into()], trace: vec!["Q".into()] }] };
        assert!(generated_by(&unknown, &w, &m0).is_err());
    }

    #[test]
    fn dfg_by_definition() {
        let log = |ts: &[&[&str]]| EventLog {
            types: vec!["l".into()],
            traces: ts
                .iter()
                .enumerate()
                .map(|(i, t)| Trace { case: vec![format!("c{i}")], trace: t.iter().map(|s| s.to_string()).collect() })
                .collect(),
        };
        let d = dfg(&log(&[&["a"]]));
        assert_eq!(d.starts, BTreeSet::from(["a".to_string()]));
        assert_eq!(d.ends, BTreeSet::from(["a".to_string()]));
        assert!(d.edges.is_empty());
        let d = dfg(&log(&[&["a", "b", "c"], &["a", "c", "b"]]));
        let e: BTreeSet<(String, String)> =
            [("a", "b"), ("a", "c"), ("b", "c"), ("c", "b")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        assert_eq!(d.edges, e);
        assert_eq!(d.ends, BTreeSet::from(["b".to_string(), "c".to_string()]));
    }

    #[test]
    fn jsonl_round_trip() {
        let (_, seq) = table1();
        let log = induced_log(&seq, &parse_type_set("y,z"));
        let text = log.to_jsonl();
        assert_eq!(text, "{\"types\":[\"y\",\"z\"],\"case\":[\"o1\",\"c1\"],\"trace\":[\"G\",\"Z\"]}\n");
        assert_eq!(EventLog::from_jsonl(&text).unwrap(), log);
    }
}
