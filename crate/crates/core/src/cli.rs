//! Command-line front end. Every command exits 0 on success, 1 on a negative verdict
//! and 2 on usage, input or output errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bisim::{strong_bisim, weak_bisim};
use crate::discovery::{covering_sequence, discover, rediscover, verify_rediscovery, Miner};
use crate::dot::{lts_to_dot, net_to_dot};
use crate::error::{Error, Result};
use crate::eventlog::{induced_log, EventLog};
use crate::iso::{iso_modulo_minors, net_isomorphic};
use crate::jackson::{alg_equiv, normal_form, parse, print};
use crate::model::{validate, validate_tjn_mode, Marking, Net};
use crate::projection::{compose_all, parse_type_set, project, reconstruct, remove_minors};
use crate::rules::{generate_random_tjn, is_tjn, GenParams, TjnVerdict};
use crate::semantics::{run, ExplorationBound, FiringSequence};
use crate::statespace::{check_identifier_soundness, check_liveness, state_space};

#[derive(Debug, Parser)]
#[command(name = "tjn", version, about = "Typed Petri nets with identifiers and typed Jackson nets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Bounds {
    /// Maximum number of live identifiers per type during exploration.
    #[arg(long, default_value_t = 1)]
    pub bound_k: usize,
    /// Maximum number of explored states.
    #[arg(long, default_value_t = 200_000)]
    pub max_states: usize,
}

impl Bounds {
    fn get(&self) -> Result<ExplorationBound> {
        if self.bound_k == 0 || self.max_states == 0 {
            return Err(Error::Invalid("--bound-k and --max-states must be positive".into()));
        }
        Ok(ExplorationBound::new(self.bound_k, self.max_states))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Property {
    Tjn,
    Soundness,
    Liveness,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SeqFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMode {
    Iso,
    IsoModuloMinors,
    StrongBisim,
    WeakBisim,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a net file for well-formedness.
    Validate {
        #[arg(long)]
        net: PathBuf,
        /// Also require the typed Jackson net conventions.
        #[arg(long)]
        tjn: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random run from a marking (empty by default), or with --exhaustive a
    /// sequence covering every directly-follows pair of the bounded behaviour.
    Simulate {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        marking: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, conflicts_with_all = ["marking", "steps", "seed"])]
        exhaustive: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: SeqFormat,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Type projection on a comma-separated type set.
    Project {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        types: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Union of several nets.
    Compose {
        #[arg(long = "net", required = true, num_args = 1..)]
        nets: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Composition of the projections on all nonempty type subsets.
    Reconstruct {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        remove_minors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide membership (tjn) or check bounded identifier soundness or liveness.
    Check {
        #[arg(value_enum)]
        property: Property,
        #[arg(long)]
        net: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Event log induced by a firing sequence on a type set, as JSON lines.
    InduceLog {
        /// Firing sequence, CSV (one column per type) or JSON.
        #[arg(long)]
        firing: PathBuf,
        #[arg(long)]
        types: String,
        /// Net used to map CSV type columns to variables.
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discover a WF-net from a JSON-lines log.
    Discover {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, value_enum, default_value = "inductive")]
        miner: Miner,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discover, retype and compose a fragment per type subset.
    Rediscover {
        #[arg(long)]
        firing: PathBuf,
        #[arg(long)]
        types: String,
        #[arg(long, value_enum, default_value = "inductive")]
        miner: Miner,
        /// Original net: enables per-projection and end-to-end verification.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        remove_minors: bool,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two nets structurally or behaviourally; prints a JSON report.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum)]
        mode: CompareMode,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normal form of a Jackson type expression; optionally test equivalence with another.
    NormalForm {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        equiv: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random typed Jackson nets written into a directory.
    GenCorpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 4)]
        max_types: usize,
        #[arg(long, default_value_t = 25)]
        max_nodes: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Graphviz rendering of a net, or of its bounded state space with --lts.
    ExportDot {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        lts: bool,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command, writing results that have no
/// `--out` path to `stdout`. Returns the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return 2;
            }
            let _ = write!(stdout, "{text}");
            return 0;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn read_net(path: &Path) -> Result<Net> {
    Net::from_json(&read(path)?)
}

fn read_firing(path: &Path, net: Option<&Net>) -> Result<FiringSequence> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        FiringSequence::from_csv(&text, net)
    } else {
        FiringSequence::from_json(&text)
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialization") + "\n"
}

/// Runs one command; `Ok(false)` is a negative verdict.
pub fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<bool> {
    match cmd {
        Command::Validate { net, tjn, out } => {
            let n = read_net(net)?;
            let r = if *tjn { validate_tjn_mode(&n) } else { validate(&n) };
            emit(out, &pretty(&r), stdout)?;
            Ok(r.is_valid())
        }
        Command::Simulate { net, marking, steps, seed, exhaustive, format, bounds, out } => {
            let n = read_net(net)?;
            let m0 = match marking {
                Some(p) => Marking::from_json(&read(p)?)?,
                None => Marking::new(),
            };
            let seq = if *exhaustive { covering_sequence(&n, &bounds.get()?)? } else { run(&n, &m0, *steps, *seed, &bounds.get()?) };
            let text = match format {
                SeqFormat::Csv => seq.to_csv()?,
                SeqFormat::Json => seq.to_json(),
            };
            emit(out, &text, stdout)?;
            Ok(true)
        }
        Command::Project { net, types, out } => {
            let p = project(&read_net(net)?, &parse_type_set(types))?;
            emit(out, &p.to_json(), stdout)?;
            Ok(true)
        }
        Command::Compose { nets, out } => {
            let parts = nets.iter().map(|p| read_net(p)).collect::<Result<Vec<_>>>()?;
            emit(out, &compose_all(&parts)?.to_json(), stdout)?;
            Ok(true)
        }
        Command::Reconstruct { net, remove_minors: drop, out } => {
            let r = reconstruct(&read_net(net)?)?;
            let r = if *drop { remove_minors(&r) } else { r };
            emit(out, &r.to_json(), stdout)?;
            Ok(true)
        }
        Command::Check { property, net, bounds, out } => {
            let n = read_net(net)?;
            let bound = bounds.get()?;
            let (text, holds) = match property {
                Property::Tjn => {
                    let r = is_tjn(&n);
                    let ok = matches!(r.verdict, TjnVerdict::Atomic | TjnVerdict::Tjn { .. });
                    (pretty(&r), ok)
                }
                Property::Soundness => {
                    let r = check_identifier_soundness(&n, &bound);
                    (pretty(&r), r.holds())
                }
                Property::Liveness => {
                    let r = check_liveness(&n, &bound);
                    (pretty(&r), r.holds())
                }
            };
            emit(out, &text, stdout)?;
            Ok(holds)
        }
        Command::InduceLog { firing, types, net, out } => {
            let n = net.as_ref().map(|p| read_net(p)).transpose()?;
            let seq = read_firing(firing, n.as_ref())?;
            emit(out, &induced_log(&seq, &parse_type_set(types)).to_jsonl(), stdout)?;
            Ok(true)
        }
        Command::Discover { log, miner, out } => {
            let l = EventLog::from_jsonl(&read(log)?)?;
            let (w, tree) = discover(&l, *miner)?;
            let report = json!({ "tree": tree.map(|t| t.to_string()), "net": w });
            emit(out, &pretty(&report), stdout)?;
            Ok(true)
        }
        Command::Rediscover { firing, types, miner, reference, remove_minors: drop, bounds, report, out } => {
            let bound = bounds.get()?;
            let refnet = reference.as_ref().map(|p| read_net(p)).transpose()?;
            let seq = read_firing(firing, refnet.as_ref())?;
            let types: Vec<String> = parse_type_set(types).into_iter().collect();
            let r = rediscover(&seq, &types, *miner, refnet.as_ref(), *drop)?;
            let check = match (&r.net, &refnet) {
                (Some(found), Some(orig)) => Some(verify_rediscovery(orig, found, &bound)),
                _ => None,
            };
            let holds = r.succeeded()
                && check.as_ref().is_none_or(|c| c.holds())
                && r.per_type_set.iter().all(|p| p.matches_projection != Some(false));
            let doc = json!({ "succeeded": r.succeeded(), "per_type_set": r.per_type_set, "verification": check });
            match report {
                Some(p) => emit(&Some(p.clone()), &pretty(&doc), stdout)?,
                None if out.is_some() || r.net.is_none() => emit(&None, &pretty(&doc), stdout)?,
                None => {}
            }
            if let Some(n) = &r.net {
                emit(out, &n.to_json(), stdout)?;
            }
            Ok(holds)
        }
        Command::Compare { a, b, mode, bounds, out } => {
            let (na, nb) = (read_net(a)?, read_net(b)?);
            let report = compare(&na, &nb, *mode, &bounds.get()?);
            let holds = report["holds"].as_bool().unwrap_or(false);
            emit(out, &pretty(&report), stdout)?;
            Ok(holds)
        }
        Command::NormalForm { expr, equiv, out } => {
            let e = parse(expr)?;
            let mut text = print(&normal_form(&e)?) + "\n";
            let mut holds = true;
            if let Some(other) = equiv {
                holds = alg_equiv(&e, &parse(other)?)?;
                text.push_str(if holds { "equivalent\n" } else { "not equivalent\n" });
            }
            emit(out, &text, stdout)?;
            Ok(holds)
        }
        Command::GenCorpus { seed, count, max_types, max_nodes, out } => {
            fs::create_dir_all(out)?;
            let params = GenParams { max_types: *max_types, max_nodes: *max_nodes, ..GenParams::default() };
            let mut manifest = Vec::new();
            for s in *seed..seed + count {
                let (net, trace) = generate_random_tjn(s, &params);
                let file = format!("tjn-{s:06}.json");
                fs::write(out.join(&file), net.to_json())?;
                manifest.push(json!({ "file": file, "seed": s, "nodes": net.node_count(), "types": net.types, "rules": trace.len() }));
            }
            fs::write(out.join("manifest.json"), pretty(&manifest))?;
            Ok(true)
        }
        Command::ExportDot { net, lts, bounds, out } => {
            let n = read_net(net)?;
            let text = if *lts { lts_to_dot(&state_space(&n, &Marking::new(), &bounds.get()?)) } else { net_to_dot(&n) };
            emit(out, &text, stdout)?;
            Ok(true)
        }
    }
}

/// JSON report `{mode, holds, witness | counterexample}` for two nets.
pub fn compare(a: &Net, b: &Net, mode: CompareMode, bound: &ExplorationBound) -> Value {
    let (holds, detail) = match mode {
        CompareMode::Iso => match net_isomorphic(a, b) {
            Some(bij) => (true, json!(bij)),
            None => (false, json!("no type-preserving bijection with matching transition ids")),
        },
        CompareMode::IsoModuloMinors => {
            let r = iso_modulo_minors(a, b);
            let detail = if r.holds {
                json!({ "bijection": r.bijection, "removed_left": r.removed_left, "removed_right": r.removed_right })
            } else {
                json!({ "removed_left": r.removed_left, "removed_right": r.removed_right, "reason": "nets differ after removing minor places" })
            };
            (r.holds, detail)
        }
        CompareMode::StrongBisim | CompareMode::WeakBisim => {
            let m0 = Marking::new();
            let (la, lb) = (state_space(a, &m0, bound), state_space(b, &m0, bound));
            let r = if matches!(mode, CompareMode::StrongBisim) { strong_bisim(&la, &lb, true) } else { weak_bisim(&la, &lb, true) };
            let detail = if r.holds {
                json!({ "partition": r.partition, "truncated": r.truncated })
            } else {
                json!({ "distinguishing_trace": r.distinguishing_trace, "truncated": r.truncated })
            };
            (r.holds, detail)
        }
    };
    let key = if holds { "witness" } else { "counterexample" };
    json!({ "mode": mode, "holds": holds, key: detail })
}
