//! Jackson type expressions and classical (untyped) Jackson nets.
//!
//! Concrete syntax: atoms are identifiers; `;` sequence, `||` parallel,
//! `+` choice, `#` loop (infix `X#t`, or the prefix form `(#X);t`).
//! A binary operator needs parentheses around composite operands.
//! Atoms named `p<digits>` are place-sort and `t<digits>` transition-sort;
//! other atoms take their sort from context.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::iso::{graph_isomorphism, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Seq,
    Par,
    Choice,
    Loop,
}

impl Op {
    fn symbol(self) -> &'static str {
        match self {
            Op::Seq => ";",
            Op::Par => "||",
            Op::Choice => "+",
            Op::Loop => "#",
        }
    }
}

/// Concrete syntax tree; `Group` records explicit parentheses.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Atom(String),
    Bin(Op, Box<Expr>, Box<Expr>),
    PreLoop(Box<Expr>),
    Group(Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Bin(op, l, r) => write!(f, "{l}{}{r}", op.symbol()),
            Expr::PreLoop(e) => write!(f, "#{e}"),
            Expr::Group(e) => write!(f, "({e})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Place,
    Transition,
}

impl Sort {
    fn flip(self) -> Sort {
        match self {
            Sort::Place => Sort::Transition,
            Sort::Transition => Sort::Place,
        }
    }
}

/// Sort-checked abstract term; sequences are flat and alternate sorts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Atom(String, Sort),
    Seq(Vec<Term>),
    Par(Vec<Term>),
    Choice(Vec<Term>),
    /// Body and its redo transitions.
    Loop(Box<Term>, Vec<Term>),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Atom(_, s) => *s,
            Term::Seq(v) => v[0].sort(),
            Term::Par(_) | Term::Loop(..) => Sort::Place,
            Term::Choice(_) => Sort::Transition,
        }
    }

    pub fn atoms(&self) -> Vec<(String, Sort)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<(String, Sort)>) {
        match self {
            Term::Atom(a, s) => out.push((a.clone(), *s)),
            Term::Seq(v) | Term::Par(v) | Term::Choice(v) => v.iter().for_each(|t| t.collect_atoms(out)),
            Term::Loop(b, r) => {
                b.collect_atoms(out);
                r.iter().for_each(|t| t.collect_atoms(out));
            }
        }
    }
}

// ---------- parsing ----------

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {}", self.pos))
    }

    fn expr(&mut self) -> Result<Expr> {
        let l = self.unary()?;
        self.ws();
        let Some(op) = self.op() else { return Ok(l) };
        let r = self.unary()?;
        self.ws();
        if self.peek_op() {
            return Err(self.err("operators need explicit parentheses"));
        }
        Ok(Expr::Bin(op, Box::new(l), Box::new(r)))
    }

    fn peek_op(&self) -> bool {
        matches!(self.s.get(self.pos), Some(b';' | b'+' | b'#')) || self.s[self.pos..].starts_with(b"||")
    }

    fn op(&mut self) -> Option<Op> {
        let op = match self.s.get(self.pos)? {
            b';' => Op::Seq,
            b'+' => Op::Choice,
            b'#' => Op::Loop,
            b'|' if self.s.get(self.pos + 1) == Some(&b'|') => Op::Par,
            _ => return None,
        };
        self.pos += if op == Op::Par { 2 } else { 1 };
        Some(op)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.ws();
        match self.s.get(self.pos) {
            Some(b'#') => {
                self.pos += 1;
                Ok(Expr::PreLoop(Box::new(self.unary()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.ws();
                if self.s.get(self.pos) != Some(&b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(Expr::Group(Box::new(e)))
            }
            Some(c) if c.is_ascii_alphanumeric() || *c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || b"_.".contains(&self.s[self.pos])) {
                    self.pos += 1;
                }
                Ok(Expr::Atom(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses an expression and checks that it is sort-correct.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.ws();
    if p.pos != text.len() {
        return Err(p.err("trailing input"));
    }
    to_term(&e)?;
    Ok(e)
}

pub fn print(e: &Expr) -> String {
    e.to_string()
}

fn fixed_sort(name: &str) -> Option<Sort> {
    let rest = &name[1..];
    let digits = rest.chars().all(|c| c.is_ascii_digit());
    match name.as_bytes()[0] {
        b'p' if digits => Some(Sort::Place),
        b't' if digits => Some(Sort::Transition),
        _ => None,
    }
}

fn strip(e: &Expr) -> &Expr {
    match e {
        Expr::Group(x) => strip(x),
        x => x,
    }
}

fn chain<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match strip(e) {
        Expr::Bin(Op::Seq, l, r) => {
            chain(l, out);
            chain(r, out);
        }
        x => out.push(x),
    }
}

fn operands<'a>(e: &'a Expr, op: Op, out: &mut Vec<&'a Expr>) {
    match strip(e) {
        Expr::Bin(o, l, r) if *o == op => {
            operands(l, op, out);
            operands(r, op, out);
        }
        x => out.push(x),
    }
}

/// Sort-checks a syntax tree and converts it to a term.
pub fn to_term(e: &Expr) -> Result<Term> {
    let t = check(e, Sort::Place).or_else(|first| check(e, Sort::Transition).map_err(|_| first))?;
    let mut seen = HashSet::new();
    for (a, _) in t.atoms() {
        if !seen.insert(a.clone()) {
            return Err(Error::Parse(format!("duplicate atom {a}")));
        }
    }
    Ok(t)
}

fn sort_err(e: &Expr, want: Sort) -> Error {
    Error::Parse(format!("sort error: {e} is not {}-sort", if want == Sort::Place { "place" } else { "transition" }))
}

fn check(e: &Expr, want: Sort) -> Result<Term> {
    match strip(e) {
        Expr::Atom(a) => match fixed_sort(a) {
            Some(s) if s != want => Err(sort_err(e, want)),
            _ => Ok(Term::Atom(a.clone(), want)),
        },
        Expr::Bin(Op::Seq, ..) => {
            let mut raw = Vec::new();
            chain(e, &mut raw);
            let mut items: Vec<(&Expr, Option<&Expr>)> = Vec::new();
            let mut i = 0;
            while i < raw.len() {
                if let Expr::PreLoop(body) = raw[i] {
                    let redo = raw.get(i + 1).ok_or_else(|| Error::Parse(format!("loop marker without redo in {e}")))?;
                    items.push((body, Some(redo)));
                    i += 2;
                } else {
                    items.push((raw[i], None));
                    i += 1;
                }
            }
            if items.len().is_multiple_of(2) {
                return Err(Error::Parse(format!("sort error: sequence {e} has an even number of blocks")));
            }
            let mut sort = want;
            let mut terms = Vec::new();
            for (x, redo) in items {
                let t = match redo {
                    None => check(x, sort)?,
                    Some(r) => {
                        if sort != Sort::Place {
                            return Err(sort_err(x, sort));
                        }
                        loop_term(check(x, Sort::Place)?, check(r, Sort::Transition)?)
                    }
                };
                terms.push(t);
                sort = sort.flip();
            }
            Ok(Term::Seq(terms))
        }
        Expr::Bin(op @ (Op::Par | Op::Choice), ..) => {
            let s = if *op == Op::Par { Sort::Place } else { Sort::Transition };
            if want != s {
                return Err(sort_err(e, want));
            }
            let mut ops = Vec::new();
            operands(e, *op, &mut ops);
            let ts = ops.into_iter().map(|x| check(x, s)).collect::<Result<Vec<_>>>()?;
            Ok(if *op == Op::Par { Term::Par(ts) } else { Term::Choice(ts) })
        }
        Expr::Bin(Op::Loop, l, r) => {
            if want != Sort::Place {
                return Err(sort_err(e, want));
            }
            Ok(loop_term(check(l, Sort::Place)?, check(r, Sort::Transition)?))
        }
        Expr::PreLoop(_) => Err(Error::Parse(format!("loop marker {e} must be followed by ';' and a redo"))),
        Expr::Group(_) => unreachable!("stripped"),
    }
}

fn loop_term(body: Term, redo: Term) -> Term {
    Term::Loop(Box::new(body), vec![redo])
}

// ---------- normal form ----------

/// Flattens associative operators, merges nested loops and sorts commutative operands.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::Atom(..) => t.clone(),
        Term::Seq(v) => {
            let mut out = Vec::new();
            for x in v {
                match normalize(x) {
                    Term::Seq(inner) => out.extend(inner),
                    y => out.push(y),
                }
            }
            Term::Seq(out)
        }
        Term::Par(v) | Term::Choice(v) => {
            let is_par = matches!(t, Term::Par(_));
            let mut out = Vec::new();
            for x in v {
                match normalize(x) {
                    Term::Par(inner) if is_par => out.extend(inner),
                    Term::Choice(inner) if !is_par => out.extend(inner),
                    y => out.push(y),
                }
            }
            out.sort_by_key(term_key);
            if is_par {
                Term::Par(out)
            } else {
                Term::Choice(out)
            }
        }
        Term::Loop(b, r) => {
            let mut redos = Vec::new();
            let mut body = normalize(b);
            if let Term::Loop(inner, rs) = body {
                redos.extend(rs);
                body = *inner;
            }
            for x in r {
                match normalize(x) {
                    Term::Choice(inner) => redos.extend(inner),
                    y => redos.push(y),
                }
            }
            redos.sort_by_key(term_key);
            Term::Loop(Box::new(body), redos)
        }
    }
}

fn term_key(t: &Term) -> String {
    print(&term_to_expr(t))
}

fn wrap(t: &Term) -> Expr {
    let e = term_to_expr(t);
    match e {
        Expr::Atom(_) => e,
        _ => Expr::Group(Box::new(e)),
    }
}

fn right_assoc(op: Op, items: &[Term]) -> Expr {
    if items.len() == 1 {
        return term_to_expr(&items[0]);
    }
    let rest = if items.len() == 2 { wrap(&items[1]) } else { Expr::Group(Box::new(right_assoc(op, &items[1..]))) };
    Expr::Bin(op, Box::new(wrap(&items[0])), Box::new(rest))
}

/// Right-associated concrete syntax for a term.
pub fn term_to_expr(t: &Term) -> Expr {
    match t {
        Term::Atom(a, _) => Expr::Atom(a.clone()),
        Term::Seq(v) => right_assoc(Op::Seq, v),
        Term::Par(v) => right_assoc(Op::Par, v),
        Term::Choice(v) => right_assoc(Op::Choice, v),
        Term::Loop(b, r) => {
            let redo = if r.len() == 1 { wrap(&r[0]) } else { Expr::Group(Box::new(right_assoc(Op::Choice, r))) };
            Expr::Bin(Op::Loop, Box::new(wrap(b)), Box::new(redo))
        }
    }
}

/// Normal form of a sort-correct expression.
pub fn normal_form(e: &Expr) -> Result<Expr> {
    Ok(term_to_expr(&normalize(&to_term(e)?)))
}

/// Algebraic equivalence: equal normal forms.
pub fn alg_equiv(a: &Expr, b: &Expr) -> Result<bool> {
    Ok(normal_form(a)? == normal_form(b)?)
}

// ---------- classical nets ----------

/// Place/transition net without types; optional source and sink places.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ClassicalNet {
    pub places: BTreeSet<String>,
    pub transitions: BTreeSet<String>,
    pub arcs: BTreeSet<(String, String)>,
    pub source: Option<String>,
    pub sink: Option<String>,
}

impl ClassicalNet {
    pub fn from_arcs(places: &[&str], transitions: &[&str], arcs: &[(&str, &str)]) -> Self {
        ClassicalNet {
            places: places.iter().map(|s| s.to_string()).collect(),
            transitions: transitions.iter().map(|s| s.to_string()).collect(),
            arcs: arcs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            source: None,
            sink: None,
        }
    }

    pub fn with_border(mut self, source: &str, sink: &str) -> Self {
        self.source = Some(source.to_string());
        self.sink = Some(sink.to_string());
        self
    }

    pub fn preset(&self, n: &str) -> BTreeSet<String> {
        self.arcs.iter().filter(|(_, b)| b == n).map(|(a, _)| a.clone()).collect()
    }

    pub fn postset(&self, n: &str) -> BTreeSet<String> {
        self.arcs.iter().filter(|(a, _)| a == n).map(|(_, b)| b.clone()).collect()
    }

    /// Structural WF-net check: unique source and sink, every node on a source-sink path.
    pub fn is_wf_net(&self) -> bool {
        let sources: Vec<&String> = self.places.iter().filter(|p| self.preset(p).is_empty()).collect();
        let sinks: Vec<&String> = self.places.iter().filter(|p| self.postset(p).is_empty()).collect();
        if sources.len() != 1 || sinks.len() != 1 {
            return false;
        }
        let reach = |start: &String, fwd: bool| {
            let mut seen = BTreeSet::from([start.clone()]);
            let mut stack = vec![start.clone()];
            while let Some(n) = stack.pop() {
                let next = if fwd { self.postset(&n) } else { self.preset(&n) };
                for m in next {
                    if seen.insert(m.clone()) {
                        stack.push(m);
                    }
                }
            }
            seen
        };
        let f = reach(sources[0], true);
        let b = reach(sinks[0], false);
        self.places.iter().chain(&self.transitions).all(|n| f.contains(n) && b.contains(n))
    }

    fn graph(&self, match_transition_names: bool, match_place_names: bool) -> Graph {
        let names: Vec<&String> = self.places.iter().chain(&self.transitions).collect();
        let labels = names
            .iter()
            .map(|n| {
                let is_place = self.places.contains(*n);
                match (is_place, is_place && match_place_names || !is_place && match_transition_names) {
                    (true, true) => format!("P:{n}"),
                    (true, false) => "P".to_string(),
                    (false, true) => format!("T:{n}"),
                    (false, false) => "T".to_string(),
                }
            })
            .collect();
        let idx: BTreeMap<&String, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let edges = self.arcs.iter().map(|(a, b)| ((idx[a], idx[b]), String::new())).collect();
        Graph { labels, edges }
    }
}

/// Node-name-free isomorphism of classical nets, optionally keeping transition names.
pub fn classical_isomorphic(a: &ClassicalNet, b: &ClassicalNet, match_transition_names: bool) -> bool {
    graph_isomorphism(&a.graph(match_transition_names, false), &b.graph(match_transition_names, false)).is_some()
}

/// Isomorphism that keeps every node name, i.e. equality of node and arc sets.
pub fn named_isomorphic(a: &ClassicalNet, b: &ClassicalNet) -> bool {
    a.places == b.places && a.transitions == b.transitions && a.arcs == b.arcs
}

struct Block {
    entries: Vec<String>,
    exits: Vec<String>,
}

fn build(t: &Term, net: &mut ClassicalNet) -> Block {
    match t {
        Term::Atom(a, s) => {
            if *s == Sort::Place {
                net.places.insert(a.clone());
            } else {
                net.transitions.insert(a.clone());
            }
            Block { entries: vec![a.clone()], exits: vec![a.clone()] }
        }
        Term::Seq(v) => {
            let blocks: Vec<Block> = v.iter().map(|x| build(x, net)).collect();
            for w in blocks.windows(2) {
                connect(net, &w[0].exits, &w[1].entries);
            }
            Block { entries: blocks[0].entries.clone(), exits: blocks[blocks.len() - 1].exits.clone() }
        }
        Term::Par(v) | Term::Choice(v) => {
            let mut b = Block { entries: Vec::new(), exits: Vec::new() };
            for x in v {
                let y = build(x, net);
                b.entries.extend(y.entries);
                b.exits.extend(y.exits);
            }
            b
        }
        Term::Loop(body, redos) => {
            let b = build(body, net);
            for r in redos {
                let y = build(r, net);
                connect(net, &b.exits, &y.entries);
                connect(net, &y.exits, &b.entries);
            }
            b
        }
    }
}

fn connect(net: &mut ClassicalNet, from: &[String], to: &[String]) {
    for a in from {
        for b in to {
            net.arcs.insert((a.clone(), b.clone()));
        }
    }
}

/// Net of a term of either sort, with the nodes its block is entered and left through.
pub fn block_net(t: &Term) -> (ClassicalNet, Vec<String>, Vec<String>) {
    let mut net = ClassicalNet::default();
    let b = build(t, &mut net);
    (net, b.entries, b.exits)
}

/// Builds the Jackson net of a place-sort expression; nodes are named by atoms.
pub fn net_from_type(e: &Expr) -> Result<ClassicalNet> {
    let t = to_term(e)?;
    net_from_term(&t)
}

pub fn net_from_term(t: &Term) -> Result<ClassicalNet> {
    if t.sort() != Sort::Place {
        return Err(Error::Invalid("a Jackson net is generated by a place-sort type".into()));
    }
    let mut net = ClassicalNet::default();
    let b = build(t, &mut net);
    if b.entries.len() == 1 && b.exits.len() == 1 {
        net.source = Some(b.entries[0].clone());
        net.sink = Some(b.exits[0].clone());
    }
    Ok(net)
}

// ---------- reduction ----------

#[derive(Clone)]
struct Labeled {
    places: BTreeMap<usize, Term>,
    transitions: BTreeMap<usize, Term>,
    arcs: BTreeSet<(usize, usize)>,
    next: usize,
}

impl Labeled {
    fn pre(&self, n: usize) -> BTreeSet<usize> {
        self.arcs.iter().filter(|(_, b)| *b == n).map(|(a, _)| *a).collect()
    }

    fn post(&self, n: usize) -> BTreeSet<usize> {
        self.arcs.iter().filter(|(a, _)| *a == n).map(|(_, b)| *b).collect()
    }

    fn key(&self) -> String {
        let name = |n: &usize| self.places.get(n).or_else(|| self.transitions.get(n)).map(|t| term_key(&normalize(t))).unwrap_or_default();
        let mut arcs: Vec<(String, String)> = self.arcs.iter().map(|(a, b)| (name(a), name(b))).collect();
        arcs.sort();
        let mut ps: Vec<String> = self.places.keys().map(name).collect();
        ps.sort();
        let mut ts: Vec<String> = self.transitions.keys().map(name).collect();
        ts.sort();
        format!("{ps:?}{ts:?}{arcs:?}")
    }

    /// Replaces nodes `old` by one fresh node with the given presets and postsets.
    fn merge(&self, old: &[usize], term: Term, is_place: bool, pre: BTreeSet<usize>, post: BTreeSet<usize>) -> Labeled {
        let mut n = self.clone();
        let id = n.next;
        n.next += 1;
        for o in old {
            n.places.remove(o);
            n.transitions.remove(o);
        }
        n.arcs.retain(|(a, b)| !old.contains(a) && !old.contains(b));
        for p in pre {
            n.arcs.insert((if old.contains(&p) { id } else { p }, id));
        }
        for q in post {
            n.arcs.insert((id, if old.contains(&q) { id } else { q }));
        }
        if is_place {
            n.places.insert(id, term);
        } else {
            n.transitions.insert(id, term);
        }
        n
    }

    fn candidates(&self) -> Vec<Labeled> {
        let mut out = Vec::new();
        // loops
        for (&t, tt) in &self.transitions {
            let (pre, post) = (self.pre(t), self.post(t));
            if pre.len() == 1 && pre == post {
                let p = *pre.iter().next().expect("one");
                let body = self.places[&p].clone();
                let mut n = self.clone();
                n.transitions.remove(&t);
                n.arcs.retain(|(a, b)| *a != t && *b != t);
                n.places.insert(p, loop_term(body, tt.clone()));
                out.push(n);
            }
        }
        // parallel places and alternative transitions
        for (set, is_place) in [(&self.places, true), (&self.transitions, false)] {
            let keys: Vec<usize> = set.keys().copied().collect();
            for (i, &a) in keys.iter().enumerate() {
                for &b in &keys[i + 1..] {
                    let (pa, qa) = (self.pre(a), self.post(a));
                    if pa == self.pre(b) && qa == self.post(b) && !(pa.is_empty() && qa.is_empty() && !is_place) {
                        let items = vec![set[&a].clone(), set[&b].clone()];
                        let term = if is_place { Term::Par(items) } else { Term::Choice(items) };
                        out.push(self.merge(&[a, b], term, is_place, pa, qa));
                    }
                }
            }
        }
        // place chains p1;t;p2
        for (&t, tt) in &self.transitions {
            let (pre, post) = (self.pre(t), self.post(t));
            if pre.len() == 1 && post.len() == 1 && pre != post {
                let p1 = *pre.iter().next().expect("one");
                let p2 = *post.iter().next().expect("one");
                if self.post(p1).len() == 1 && self.pre(p2).len() == 1 {
                    let term = Term::Seq(vec![self.places[&p1].clone(), tt.clone(), self.places[&p2].clone()]);
                    out.push(self.merge(&[p1, t, p2], term, true, self.pre(p1), self.post(p2)));
                }
            }
        }
        // transition chains t1;p;t2
        for (&p, pt) in &self.places {
            let (pre, post) = (self.pre(p), self.post(p));
            if pre.len() == 1 && post.len() == 1 && pre != post {
                let t1 = *pre.iter().next().expect("one");
                let t2 = *post.iter().next().expect("one");
                if self.post(t1).len() == 1 && self.pre(t2).len() == 1 {
                    let term = Term::Seq(vec![self.transitions[&t1].clone(), pt.clone(), self.transitions[&t2].clone()]);
                    out.push(self.merge(&[t1, p, t2], term, false, self.pre(t1), self.post(t2)));
                }
            }
        }
        out
    }
}

/// Recovers a Jackson type by inverse generation rules; `None` if the net is not a Jackson net.
pub fn reduce_to_type(net: &ClassicalNet) -> Option<Expr> {
    reduce_to_term(net).map(|t| term_to_expr(&normalize(&t)))
}

pub fn reduce_to_term(net: &ClassicalNet) -> Option<Term> {
    let names: Vec<&String> = net.places.iter().chain(&net.transitions).collect();
    let idx: BTreeMap<&String, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let start = Labeled {
        places: net.places.iter().map(|p| (idx[p], Term::Atom(p.clone(), Sort::Place))).collect(),
        transitions: net.transitions.iter().map(|t| (idx[t], Term::Atom(t.clone(), Sort::Transition))).collect(),
        arcs: net.arcs.iter().map(|(a, b)| (idx[a], idx[b])).collect(),
        next: names.len(),
    };
    let mut seen = HashSet::new();
    search(start, &mut seen)
}

fn search(n: Labeled, seen: &mut HashSet<String>) -> Option<Term> {
    if n.places.len() == 1 && n.transitions.is_empty() {
        return n.places.into_values().next();
    }
    if !seen.insert(n.key()) {
        return None;
    }
    for c in n.candidates() {
        if let Some(t) = search(c, seen) {
            return Some(t);
        }
    }
    None
}

// ---------- random generation ----------

/// Random top-level type: a single place, or `p;(J;p)` with atomic border places.
/// Uses `atoms` atoms when `atoms` is 1 or at least 3.
pub fn random_term<R: Rng>(rng: &mut R, atoms: usize) -> Term {
    let mut counters = (0, 0);
    if atoms < 3 {
        return gen(rng, Sort::Place, 1, &mut counters);
    }
    let first = gen(rng, Sort::Place, 1, &mut counters);
    let middle = gen(rng, Sort::Transition, atoms - 2, &mut counters);
    let last = gen(rng, Sort::Place, 1, &mut counters);
    Term::Seq(vec![first, middle, last])
}

fn split<R: Rng>(rng: &mut R, n: usize, parts: usize) -> Vec<usize> {
    let mut cuts: Vec<usize> = (1..n).collect::<Vec<_>>().choose_multiple(rng, parts - 1).copied().collect();
    cuts.sort();
    let mut out = Vec::new();
    let mut prev = 0;
    for c in cuts.into_iter().chain([n]) {
        out.push(c - prev);
        prev = c;
    }
    out
}

fn gen<R: Rng>(rng: &mut R, sort: Sort, n: usize, counters: &mut (usize, usize)) -> Term {
    if n == 1 {
        return match sort {
            Sort::Place => {
                counters.0 += 1;
                Term::Atom(format!("p{}", counters.0), Sort::Place)
            }
            Sort::Transition => {
                counters.1 += 1;
                Term::Atom(format!("t{}", counters.1), Sort::Transition)
            }
        };
    }
    let choice = if n >= 3 { rng.gen_range(0..3) } else { rng.gen_range(1..3) };
    match (sort, choice) {
        (s, 0) => {
            let parts = split(rng, n, 3);
            Term::Seq(vec![gen(rng, s, parts[0], counters), gen(rng, s.flip(), parts[1], counters), gen(rng, s, parts[2], counters)])
        }
        (Sort::Place, 1) => {
            let parts = split(rng, n, 2);
            Term::Par(vec![gen(rng, Sort::Place, parts[0], counters), gen(rng, Sort::Place, parts[1], counters)])
        }
        (Sort::Place, _) => {
            let parts = split(rng, n, 2);
            loop_term(gen(rng, Sort::Place, parts[0], counters), gen(rng, Sort::Transition, parts[1], counters))
        }
        (Sort::Transition, _) => {
            let parts = split(rng, n, 2);
            Term::Choice(vec![gen(rng, Sort::Transition, parts[0], counters), gen(rng, Sort::Transition, parts[1], counters)])
        }
    }
}

/// Random concrete syntax for a term: random bracketing and operand order, same equivalence class.
pub fn random_print<R: Rng>(rng: &mut R, t: &Term) -> Expr {
    match t {
        Term::Atom(a, _) => Expr::Atom(a.clone()),
        Term::Seq(v) => random_tree(rng, Op::Seq, v),
        Term::Par(v) | Term::Choice(v) => {
            let mut v = v.clone();
            v.shuffle(rng);
            random_tree(rng, if matches!(t, Term::Par(_)) { Op::Par } else { Op::Choice }, &v)
        }
        Term::Loop(b, r) => {
            let mut r = r.clone();
            r.shuffle(rng);
            // split the redos into nested loops, each a choice group
            let mut e = group(rng, b);
            let mut i = 0;
            while i < r.len() {
                let k = rng.gen_range(1..=r.len() - i);
                let redo = if k == 1 { r[i].clone() } else { Term::Choice(r[i..i + k].to_vec()) };
                e = Expr::Bin(Op::Loop, Box::new(paren(e)), Box::new(group(rng, &redo)));
                i += k;
            }
            e
        }
    }
}

fn paren(e: Expr) -> Expr {
    match e {
        Expr::Atom(_) => e,
        _ => Expr::Group(Box::new(e)),
    }
}

fn group<R: Rng>(rng: &mut R, t: &Term) -> Expr {
    paren(random_print(rng, t))
}

fn random_tree<R: Rng>(rng: &mut R, op: Op, items: &[Term]) -> Expr {
    if items.len() == 1 {
        return random_print(rng, &items[0]);
    }
    let k = rng.gen_range(1..items.len());
    let l = paren(random_tree(rng, op, &items[..k]));
    let r = paren(random_tree(rng, op, &items[k..]));
    Expr::Bin(op, Box::new(l), Box::new(r))
}

/// Swaps the names of two same-sort atoms; usually changes the equivalence class.
pub fn swap_atoms<R: Rng>(rng: &mut R, t: &Term) -> Term {
    let atoms = t.atoms();
    let sort = if rng.gen_bool(0.5) { Sort::Place } else { Sort::Transition };
    let pool: Vec<&String> = atoms.iter().filter(|(_, s)| *s == sort).map(|(a, _)| a).collect();
    if pool.len() < 2 {
        return t.clone();
    }
    let pick: Vec<&&String> = pool.choose_multiple(rng, 2).collect();
    let (a, b) = ((*pick[0]).clone(), (*pick[1]).clone());
    rename(t, &a, &b)
}

fn rename(t: &Term, a: &str, b: &str) -> Term {
    let r = |x: &Term| rename(x, a, b);
    match t {
        Term::Atom(x, s) => Term::Atom(
            if x == a {
                b.to_string()
            } else if x == b {
                a.to_string()
            } else {
                x.clone()
            },
            *s,
        ),
        Term::Seq(v) => Term::Seq(v.iter().map(r).collect()),
        Term::Par(v) => Term::Par(v.iter().map(r).collect()),
        Term::Choice(v) => Term::Choice(v.iter().map(r).collect()),
        Term::Loop(x, v) => Term::Loop(Box::new(r(x)), v.iter().map(r).collect()),
    }
}
