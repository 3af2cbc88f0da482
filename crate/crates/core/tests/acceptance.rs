//! Acceptance suite: one PASS/FAIL line per criterion with its runtime.
//! Exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use tjn::bisim::{strong_bisim, weak_sim};
use tjn::discovery::{covering_sequence, rediscover, rediscovery_premises, verify_rediscovery, Miner};
use tjn::eventlog::{induced_log, project_sequence};
use tjn::fixtures;
use tjn::iso::{iso_modulo_minors, net_isomorphic};
use tjn::jackson::{alg_equiv, named_isomorphic, net_from_type, parse, random_print, random_term, swap_atoms};
use tjn::projection::{
    compose, compose_all, minor_pairs, parse_type_set, project, projected_transitions, reconstruct, remove_minors, type_subsets,
};
use tjn::rules::{generate_random_tjn, is_tjn, reduce_candidates, GenParams, Rule, TjnVerdict};
use tjn::semantics::{replay, run, ExplorationBound, FiringSequence};
use tjn::statespace::{check_identifier_soundness, check_liveness, state_space};
use tjn::{Marking, Net};

type Outcome = Result<String, String>;

/// Seeds of the random corpus used by the property criteria.
const CORPUS: std::ops::Range<u64> = 0..100;
/// Seeds scanned for the in-class rediscovery sub-corpus.
const REDISCOVERY_CORPUS: std::ops::Range<u64> = 0..500;
const REDISCOVERY_STATES: usize = 20_000;

fn corpus() -> Vec<(u64, Net)> {
    CORPUS.map(|s| (s, generate_random_tjn(s, &GenParams::default()).0)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lang(traces: &[&[&str]]) -> BTreeSet<Vec<String>> {
    traces.iter().map(|t| t.iter().map(|s| s.to_string()).collect()).collect()
}

fn table1() -> Outcome {
    let net = fixtures::running_example();
    let seq = FiringSequence::from_csv(fixtures::TABLE1_CSV, Some(&net)).map_err(|e| e.to_string())?;
    ensure(seq.len() == 18, || format!("{} firings", seq.len()))?;
    replay(&net, &Marking::new(), &seq).map_err(|e| e.to_string())?;
    let expected = [
        ("x", lang(&[&["A", "E", "B"], &["A", "C", "D", "B"]])),
        ("z", lang(&[&["T", "G", "Z", "V"], &["T", "V"]])),
        ("y,z", lang(&[&["G", "Z"]])),
        ("x,y", lang(&[&["E"]])),
    ];
    for (u, want) in &expected {
        let got = induced_log(&seq, &parse_type_set(u)).language();
        ensure(&got == want, || format!("Log_{{{u}}} = {got:?}"))?;
    }
    Ok("18 firings replayed; four induced logs exact".into())
}

fn figures_5_6() -> Outcome {
    let n = fixtures::fig5a();
    let parts: Vec<Net> = ["l1", "l2", "l1,l2"].iter().map(|u| project(&n, &parse_type_set(u)).unwrap()).collect();
    let drawn = [fixtures::fig5b(), fixtures::fig5c(), fixtures::fig6a()];
    for (i, (p, d)) in parts.iter().zip(&drawn).enumerate() {
        ensure(net_isomorphic(p, d).is_some(), || format!("projection {i} differs from its figure"))?;
    }
    let full = compose_all(&parts).map_err(|e| e.to_string())?;
    ensure(net_isomorphic(&full, &fixtures::fig6b()).is_some(), || "composition differs from the figure".into())?;
    let pairs = minor_pairs(&full);
    let want: BTreeSet<(String, String)> =
        [("p3_x", "p3_xy"), ("p3_y", "p3_xy")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure(pairs == want, || format!("minor pairs {pairs:?}"))?;
    ensure(net_isomorphic(&remove_minors(&full), &n).is_some(), || "minor removal does not give back the net".into())?;
    Ok("three projections, composition, minor pairs and removal match".into())
}

fn figures_3_4() -> Outcome {
    let v = |n: &Net| is_tjn(n).verdict;
    ensure(v(&fixtures::fig3a()) == TjnVerdict::Atomic, || "fig 3(a) not atomic".into())?;
    ensure(v(&fixtures::fig3b()) == TjnVerdict::Atomic, || "fig 3(b) not atomic".into())?;
    let union = compose(&fixtures::fig3a(), &fixtures::fig3b()).map_err(|e| e.to_string())?;
    ensure(matches!(v(&union), TjnVerdict::NotTjn { .. }), || format!("union: {:?}", v(&union)))?;
    let f4 = fixtures::fig4();
    let singles = compose(&project(&f4, &parse_type_set("l1")).unwrap(), &project(&f4, &parse_type_set("l2")).unwrap()).unwrap();
    let r6 = reduce_candidates(&singles).iter().filter(|(a, _)| a.rule == Rule::R6).count();
    ensure(r6 == 0, || format!("{r6} inverse R6 sites"))?;
    ensure(matches!(v(&singles), TjnVerdict::NotTjn { .. }), || format!("fig 4 singletons: {:?}", v(&singles)))?;
    Ok("atomic, atomic, not_tjn; fig 4 singletons: no inverse R6, not_tjn".into())
}

fn theorem2() -> Outcome {
    let mut checks = 0;
    for (seed, net) in corpus() {
        for k in [1, 2] {
            let b = ExplorationBound::k(k);
            let s = check_identifier_soundness(&net, &b);
            ensure(s.holds(), || format!("seed {seed} k={k}: soundness {:?}", s.per_type))?;
            let l = check_liveness(&net, &b);
            ensure(l.holds(), || format!("seed {seed} k={k}: liveness dead {:?}", l.dead))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} (net, k) pairs sound and live, 0 failures"))
}

fn theorem3() -> Outcome {
    let m0 = Marking::new();
    for (seed, net) in corpus() {
        let r = reconstruct(&net).map_err(|e| e.to_string())?;
        for k in [1, 2] {
            let b = ExplorationBound::k(k);
            let rep = strong_bisim(&state_space(&net, &m0, &b), &state_space(&r, &m0, &b), true);
            ensure(rep.holds && !rep.truncated, || format!("seed {seed} k={k}: {:?}", rep.distinguishing_trace))?;
        }
        ensure(iso_modulo_minors(&net, &r).holds, || format!("seed {seed}: not isomorphic modulo minors"))?;
    }
    Ok(format!("{} nets bisimilar at k=1,2 and isomorphic modulo minors", CORPUS.count()))
}

fn lemma2() -> Outcome {
    let (m0, b) = (Marking::new(), ExplorationBound::k(1));
    let mut with_minors = 0;
    for (seed, net) in corpus() {
        let composed = reconstruct(&net).map_err(|e| e.to_string())?;
        let reduced = remove_minors(&composed);
        with_minors += usize::from(reduced.places.len() < composed.places.len());
        let rep = strong_bisim(&state_space(&composed, &m0, &b), &state_space(&reduced, &m0, &b), true);
        ensure(rep.holds && !rep.truncated, || format!("seed {seed}: {:?}", rep.distinguishing_trace))?;
    }
    Ok(format!("{} composed nets ({with_minors} with minors) bisimilar after removal", CORPUS.count()))
}

fn lemma3() -> Outcome {
    let b = ExplorationBound::k(1);
    let m0 = Marking::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (seed, net) in corpus() {
        let subsets = type_subsets(&net);
        let u = subsets.choose(&mut rng).expect("nets have types");
        let keep = projected_transitions(&net, u);
        let hidden: BTreeSet<String> = net.transitions.difference(&keep).cloned().collect();
        let full = state_space(&net, &m0, &b).hide(&hidden);
        let proj = state_space(&project(&net, u).unwrap(), &m0, &b);
        let rep = weak_sim(&full, &proj, true);
        ensure(rep.holds && !rep.truncated, || format!("seed {seed} {u:?}: {:?}", rep.distinguishing_trace))?;
        let eta = run(&net, &m0, 60, seed, &b);
        let (a, c) = (induced_log(&eta, u), induced_log(&project_sequence(&net, &eta, u), u));
        ensure(a == c, || format!("seed {seed} {u:?}: induced logs differ"))?;
    }
    Ok(format!("{} nets with a random η and Υ each, 0 failures", CORPUS.count()))
}

/// Runs the rediscovery pipeline over the scan corpus; returns the summary and the full report.
fn rediscovery_report() -> (Outcome, String) {
    let bound = ExplorationBound::new(1, REDISCOVERY_STATES);
    let mut rows = Vec::new();
    let (mut included, mut rediscovered) = (0, 0);
    let mut failures = Vec::new();
    let mut counterexamples = Vec::new();
    let mut reasons: BTreeMap<&str, usize> = BTreeMap::new();
    let mut named: Vec<(String, Net)> = vec![("fig5a".into(), fixtures::fig5a())];
    named.extend(REDISCOVERY_CORPUS.map(|s| (format!("seed {s}"), generate_random_tjn(s, &GenParams::default()).0)));
    for (name, net) in named {
        let seq = match covering_sequence(&net, &bound) {
            Ok(s) => s,
            Err(e) => {
                *reasons.entry("state space exceeds the bound").or_default() += 1;
                rows.push(json!({ "net": name, "status": "excluded", "reason": e.to_string() }));
                continue;
            }
        };
        let pre = rediscovery_premises(&net, &seq, REDISCOVERY_STATES);
        if pre.structural.is_empty() && !pre.replay.is_empty() {
            counterexamples.push(name.clone());
        }
        if !pre.in_class() {
            let key = if pre.structural.iter().any(|e| e.reason.contains("not atomic")) {
                "a projection is not atomic"
            } else if !pre.structural.is_empty() {
                "a projection needs a silent step (not a process tree translation)"
            } else {
                "an induced log is not directly-follows complete"
            };
            *reasons.entry(key).or_default() += 1;
            rows.push(json!({ "net": name, "status": "excluded", "premises": pre }));
            continue;
        }
        included += 1;
        let r = rediscover(&seq, &net.types, Miner::Inductive, Some(&net), false).expect("types within the guard");
        let check = r.net.as_ref().map(|found| verify_rediscovery(&net, found, &bound));
        let per = r.per_type_set.iter().all(|p| p.matches_projection != Some(false));
        let ok = pre.replay.is_empty() && per && check.as_ref().is_some_and(|c| c.holds());
        if ok {
            rediscovered += 1;
        } else {
            failures.push(name.clone());
        }
        let check = check.map(
            |c| json!({ "iso_modulo_minors": c.iso_modulo_minors.holds, "bisimilar": c.bisimulation.holds, "projections": c.projections }),
        );
        rows.push(json!({ "net": name, "status": if ok { "rediscovered" } else { "failed" }, "per_type_set": r.per_type_set, "verification": check }));
    }
    let report =
        serde_json::to_string_pretty(&json!({ "bound_k": 1, "max_states": REDISCOVERY_STATES, "nets": rows })).expect("report") + "\n";
    let excluded: usize = reasons.values().sum();
    let summary = format!(
        "{rediscovered}/{included} in-class nets rediscovered; {excluded} excluded ({}); replay counterexamples outside the class: {}",
        reasons.iter().map(|(r, n)| format!("{n}: {r}")).collect::<Vec<_>>().join(", "),
        if counterexamples.is_empty() { "none".to_string() } else { counterexamples.join(", ") },
    );
    let outcome =
        if failures.is_empty() && included > 0 { Ok(summary) } else { Err(format!("{summary}; failed: {}", failures.join(", "))) };
    (outcome, report)
}

fn report_path() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join("rediscovery.json")
}

fn theorem4() -> Outcome {
    let (outcome, report) = rediscovery_report();
    let path = report_path();
    std::fs::create_dir_all(path.parent().expect("parent")).map_err(|e| e.to_string())?;
    std::fs::write(&path, report).map_err(|e| e.to_string())?;
    outcome.map(|s| format!("{s}; report {}", path.display()))
}

fn theorem1() -> Outcome {
    let mut equal = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = rng.gen_range(1..=15);
        let t = random_term(&mut rng, atoms);
        let a = random_print(&mut rng, &t);
        let other = if seed % 2 == 0 { t.clone() } else { swap_atoms(&mut rng, &t) };
        let b = random_print(&mut rng, &other);
        let iso = named_isomorphic(&net_from_type(&a).unwrap(), &net_from_type(&b).unwrap());
        let eq = alg_equiv(&a, &b).unwrap();
        ensure(iso == eq, || format!("seed {seed}: isomorphic {iso}, equivalent {eq}"))?;
        equal += usize::from(eq);
    }
    let (x, y) = (parse(fixtures::FIG2_EXPR_A).unwrap(), parse(fixtures::FIG2_EXPR_B).unwrap());
    ensure(alg_equiv(&x, &y).unwrap(), || "figure 2 expressions not equivalent".into())?;
    for e in [&x, &y] {
        ensure(named_isomorphic(&net_from_type(e).unwrap(), &fixtures::fig2()), || "figure 2 net differs".into())?;
    }
    Ok(format!("200 pairs agree ({equal} equivalent); figure 2 expressions equivalent and isomorphic"))
}

/// Every artifact the other criteria produce, serialized.
fn artifacts() -> Vec<(String, String)> {
    let mut out = Vec::new();
    let b = ExplorationBound::k(1);
    for (seed, net) in corpus() {
        out.push((format!("corpus {seed}"), net.to_json()));
        out.push((format!("reconstruct {seed}"), reconstruct(&net).unwrap().to_json()));
        let eta = run(&net, &Marking::new(), 60, seed, &b);
        out.push((format!("run {seed}"), eta.to_json()));
        for u in type_subsets(&net) {
            out.push((format!("log {seed} {u:?}"), induced_log(&eta, &u).to_jsonl()));
        }
        if seed < 20 {
            out.push((format!("soundness {seed}"), serde_json::to_string(&check_identifier_soundness(&net, &b)).unwrap()));
            out.push((
                format!("bisim {seed}"),
                serde_json::to_string(&strong_bisim(
                    &state_space(&net, &Marking::new(), &b),
                    &state_space(&reconstruct(&net).unwrap(), &Marking::new(), &b),
                    true,
                ))
                .unwrap(),
            ));
        }
    }
    out.push(("rediscovery".into(), rediscovery_report().1));
    out
}

fn cli_outputs(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let bin = env!("CARGO_BIN_EXE_tjn");
    let fx = |f: &str| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(f).to_string_lossy().into_owned();
    let seq = dir.join("seq.json").to_string_lossy().into_owned();
    let corpus_dir = dir.join("corpus").to_string_lossy().into_owned();
    let commands: Vec<Vec<String>> = [
        vec!["simulate", "--net", &fx("running_example.json"), "--steps", "40", "--seed", "11"],
        vec!["simulate", "--net", &fx("fig3a.json"), "--exhaustive", "--out", &seq],
        vec!["rediscover", "--firing", &seq, "--types", "l1", "--reference", &fx("fig3a.json")],
        vec!["induce-log", "--firing", &fx("table1.csv"), "--types", "x", "--net", &fx("running_example.json")],
        vec!["reconstruct", "--net", &fx("fig5a.json")],
        vec!["gen-corpus", "--seed", "0", "--count", "10", "--out", &corpus_dir],
        vec!["check", "soundness", "--net", &fx("running_example.json"), "--bound-k", "2"],
    ]
    .iter()
    .map(|c| c.iter().map(|s| s.to_string()).collect())
    .collect();
    let mut out = Vec::new();
    for c in commands {
        let o = Command::new(bin).args(&c).output().expect("binary runs");
        out.push((c.join(" "), o.stdout));
    }
    out.push(("seq file".into(), std::fs::read(&seq).unwrap_or_default()));
    out.push(("corpus manifest".into(), std::fs::read(dir.join("corpus").join("manifest.json")).unwrap_or_default()));
    out
}

fn determinism() -> Outcome {
    let (a, b) = (artifacts(), artifacts());
    ensure(a.len() == b.len(), || "artifact counts differ".into())?;
    for ((name, x), (_, y)) in a.iter().zip(&b) {
        ensure(x == y, || format!("{name} differs between runs"))?;
    }
    let base = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let (d1, d2) = (base.join("run1"), base.join("run2"));
    for d in [&d1, &d2] {
        let _ = std::fs::remove_dir_all(d);
        std::fs::create_dir_all(d).map_err(|e| e.to_string())?;
    }
    let (c1, c2) = (cli_outputs(&d1), cli_outputs(&d2));
    for ((name, x), (_, y)) in c1.iter().zip(&c2) {
        ensure(!x.is_empty() || name.contains("--out"), || format!("`{name}` produced nothing"))?;
        ensure(x == y, || format!("`{name}` differs between runs"))?;
    }
    Ok(format!("{} library artifacts and {} CLI outputs byte-identical across two runs", a.len(), c1.len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "log induction on the firing table", limit: Duration::from_secs(1), run: table1 },
        Criterion { id: 2, name: "projection, composition and minors on the figure net", limit: Duration::from_secs(1), run: figures_5_6 },
        Criterion { id: 3, name: "typed Jackson net membership controls", limit: Duration::from_secs(5), run: figures_3_4 },
        Criterion { id: 4, name: "soundness and liveness of random typed Jackson nets", limit: Duration::from_secs(300), run: theorem2 },
        Criterion { id: 5, name: "reconstruction from projections", limit: Duration::from_secs(600), run: theorem3 },
        Criterion { id: 6, name: "minor place removal preserves behaviour", limit: Duration::from_secs(600), run: lemma2 },
        Criterion { id: 7, name: "projection simulates the hidden net; induced logs", limit: Duration::from_secs(600), run: lemma3 },
        Criterion { id: 8, name: "end-to-end rediscovery", limit: Duration::from_secs(900), run: theorem4 },
        Criterion { id: 9, name: "Jackson type isomorphism versus algebraic equivalence", limit: Duration::from_secs(600), run: theorem1 },
        Criterion { id: 10, name: "determinism of artifacts", limit: Duration::from_secs(1800), run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > c.limit => Err(format!("{d}; exceeded the {}s limit", c.limit.as_secs())),
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {} [{:.2}s]: {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
