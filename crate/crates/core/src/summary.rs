//! Summary functions `s_d`, `s*` and `s`, and the summary graph `Gr`.
//!
//! `s_{i+1}` is computed per top symbol `γ` on the two-level step graph:
//! level-1 vertices `(⊥γ, q)` and level-2 vertices `(⊥γz, q)`, where
//! level-2 moves are summarized by `s_i`. Longest nonempty paths come from
//! Bellman-Ford on a virtual start vertex carrying copies of the source's
//! out-edges; vertices reachable from a still-relaxable edge or from an
//! `ω`-edge get `ω`.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::gain::{ExtWeight, Gain};
use crate::model::{Edge, StackCommand, State, Symbol, Wps};
use crate::reachability::{pre_star_automaton, ConfigAutomaton};

pub type Triple = (State, Symbol, State);

/// A total map `Q × Γ × Q → {−∞} ∪ ℤ ∪ {ω}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryFn<W = BigInt> {
    nq: usize,
    ng: usize,
    table: Vec<ExtWeight<W>>,
}

impl<W: Clone> SummaryFn<W> {
    pub fn neg_infinity(nq: usize, ng: usize) -> SummaryFn<W> {
        SummaryFn { nq, ng, table: alloc::vec![ExtWeight::NegInfinity; nq * ng * nq] }
    }

    pub fn num_states(&self) -> usize {
        self.nq
    }

    pub fn num_symbols(&self) -> usize {
        self.ng
    }

    fn idx(&self, q1: State, g: Symbol, q2: State) -> usize {
        (q1 * self.ng + g) * self.nq + q2
    }

    pub fn get(&self, q1: State, g: Symbol, q2: State) -> &ExtWeight<W> {
        &self.table[self.idx(q1, g, q2)]
    }

    pub fn set(&mut self, q1: State, g: Symbol, q2: State, v: ExtWeight<W>) {
        let i = self.idx(q1, g, q2);
        self.table[i] = v;
    }

    /// Triples in `(q1, γ, q2)` lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Triple, &ExtWeight<W>)> + '_ {
        let (nq, ng) = (self.nq, self.ng);
        self.table.iter().enumerate().map(move |(i, v)| ((i / (ng * nq), (i / nq) % ng, i % nq), v))
    }

    pub fn map<V>(&self, f: impl Fn(&W) -> V) -> SummaryFn<V> {
        SummaryFn { nq: self.nq, ng: self.ng, table: self.table.iter().map(|v| v.map(&f)).collect() }
    }

    pub fn has_omega(&self) -> bool {
        self.table.iter().any(ExtWeight::is_omega)
    }
}

impl<W: Ord> SummaryFn<W> {
    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &SummaryFn<W>) -> bool {
        self.table.iter().zip(&other.table).all(|(a, b)| a <= b)
    }
}

impl SummaryFn<BigInt> {
    /// One row per triple: `q1 γ q2 value`, using system names.
    pub fn dump(&self, wps: &Wps) -> String {
        let mut out = String::new();
        for ((q1, g, q2), v) in self.iter() {
            out.push_str(&alloc::format!("{} {} {} {}\n", wps.states[q1], wps.alphabet[g], wps.states[q2], v));
        }
        out
    }
}

/// One step of a summary witness. `Sub` stands for a summary edge of the
/// previous level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Step {
    Edge(usize),
    Sub(Triple),
}

#[derive(Clone, Debug)]
pub(crate) enum Proof {
    Path(Vec<Step>),
    /// `to · cycle^k · from` with a positive `cycle`.
    Cycle { to: Vec<Step>, cycle: Vec<Step>, from: Vec<Step> },
    /// `to · via · from` where `via` is `ω` at the previous level.
    ThroughOmega { to: Vec<Step>, via: Triple, from: Vec<Step> },
    Missing,
}

#[derive(Clone, Debug)]
pub(crate) struct Version<W> {
    pub level: u32,
    pub proof: Proof,
    _w: core::marker::PhantomData<W>,
}

struct LocalEdge<W> {
    from: usize,
    to: usize,
    weight: Option<W>,
    step: Step,
}

/// Iterates `s_0, s_1, …` keeping per-triple value histories when asked to.
pub(crate) struct Engine<'a, W: Gain> {
    pub wps: &'a Wps,
    weights: Vec<W>,
    heads: Vec<Vec<usize>>,
    rows: Vec<bool>,
    keep: bool,
    pub hist: Vec<Vec<Version<W>>>,
    pub cur: SummaryFn<W>,
    pub level: u32,
    pub stable: bool,
}

impl<'a, W: Gain> Engine<'a, W> {
    /// Computes `s_0`. `rows` restricts the computed `(q, γ)` rows; it must
    /// be closed under push successors and summary successors.
    pub fn new(wps: &'a Wps, weights: Vec<W>, rows: Option<Vec<bool>>, keep: bool) -> Engine<'a, W> {
        let (nq, ng) = (wps.num_states(), wps.num_symbols());
        let mut eng = Engine {
            wps,
            weights,
            heads: wps.edges_by_head(),
            rows: rows.unwrap_or_else(|| alloc::vec![true; nq * ng]),
            keep,
            hist: if keep { (0..nq * ng * nq).map(|_| Vec::new()).collect() } else { Vec::new() },
            cur: SummaryFn::neg_infinity(nq, ng),
            level: 0,
            stable: false,
        };
        let empty = SummaryFn::neg_infinity(nq, ng);
        let s0 = eng.compute_level(&empty, true, 0);
        eng.cur = s0;
        eng
    }

    /// Computes the next level; returns whether anything changed.
    pub fn advance(&mut self) -> bool {
        if self.stable {
            return false;
        }
        let prev = core::mem::replace(&mut self.cur, SummaryFn::neg_infinity(0, 0));
        let next = self.compute_level(&prev, false, self.level + 1);
        let changed = next != prev;
        self.cur = next;
        self.level += 1;
        if !changed {
            self.stable = true;
        }
        changed
    }

    /// Advances until level `d` (or a fixpoint, after which all levels agree).
    pub fn run_to(&mut self, d: u32) {
        while self.level < d && !self.stable {
            self.advance();
        }
    }

    /// Value of `t` at `level`, from the history.
    pub fn value_at(&self, t: Triple, level: u32) -> Option<&Version<W>> {
        let i = self.cur.idx(t.0, t.1, t.2);
        self.hist[i].iter().rev().find(|v| v.level <= level)
    }

    fn compute_level(&mut self, prev: &SummaryFn<W>, base: bool, level: u32) -> SummaryFn<W> {
        let (nq, ng) = (self.wps.num_states(), self.wps.num_symbols());
        let mut next = SummaryFn::neg_infinity(nq, ng);
        let mut local = alloc::vec![usize::MAX; nq * (1 + ng)];
        for g in 0..ng {
            for q1 in 0..nq {
                if !self.rows[q1 * ng + g] {
                    continue;
                }
                let results = self.solve_source(g, q1, base, prev, &mut local);
                for (q2, (value, proof)) in results.into_iter().enumerate() {
                    let i = next.idx(q1, g, q2);
                    if self.keep && (base || value != prev.table[i]) && !value.is_neg_infinity() {
                        self.hist[i].push(Version { level, proof, _w: core::marker::PhantomData });
                    }
                    next.table[i] = value;
                }
            }
        }
        next
    }

    fn for_each_out(&self, v: usize, g: Symbol, base: bool, prev: &SummaryFn<W>, mut f: impl FnMut(usize, Option<W>, Step)) {
        let (nq, ng) = (self.wps.num_states(), self.wps.num_symbols());
        if v < nq {
            for &e in &self.heads[v * ng + g] {
                let edge: &Edge = &self.wps.edges[e];
                match edge.command {
                    StackCommand::Skip => f(edge.to, Some(self.weights[e].clone()), Step::Edge(e)),
                    StackCommand::Push(z) if !base => {
                        f(nq + z * nq + edge.to, Some(self.weights[e].clone()), Step::Edge(e))
                    }
                    _ => {}
                }
            }
        } else {
            let z = (v - nq) / nq;
            let q = (v - nq) % nq;
            for q2 in 0..nq {
                match prev.get(q, z, q2) {
                    ExtWeight::NegInfinity => {}
                    ExtWeight::Finite(w) => f(nq + z * nq + q2, Some(w.clone()), Step::Sub((q, z, q2))),
                    ExtWeight::Omega => f(nq + z * nq + q2, None, Step::Sub((q, z, q2))),
                }
            }
            for &e in &self.heads[q * ng + z] {
                let edge = &self.wps.edges[e];
                if edge.command == StackCommand::Pop {
                    f(edge.to, Some(self.weights[e].clone()), Step::Edge(e));
                }
            }
        }
    }

    /// Longest nonempty paths from `(⊥γ, q1)` to every `(⊥γ, q2)`.
    fn solve_source(
        &self,
        g: Symbol,
        q1: State,
        base: bool,
        prev: &SummaryFn<W>,
        local: &mut [usize],
    ) -> Vec<(ExtWeight<W>, Proof)> {
        let nq = self.wps.num_states();
        // Local vertex 0 is the virtual start.
        let mut globals: Vec<usize> = alloc::vec![usize::MAX];
        let mut edges: Vec<LocalEdge<W>> = Vec::new();
        let mut queue = VecDeque::new();
        let intern = |v: usize, local: &mut [usize], globals: &mut Vec<usize>, queue: &mut VecDeque<usize>| -> usize {
            if local[v] == usize::MAX {
                local[v] = globals.len();
                globals.push(v);
                queue.push_back(v);
            }
            local[v]
        };
        let mut start_out = Vec::new();
        self.for_each_out(q1, g, base, prev, |to, w, s| start_out.push((to, w, s)));
        for (to, w, s) in start_out {
            let t = intern(to, local, &mut globals, &mut queue);
            edges.push(LocalEdge { from: 0, to: t, weight: w, step: s });
        }
        while let Some(v) = queue.pop_front() {
            let from = local[v];
            let mut outs = Vec::new();
            self.for_each_out(v, g, base, prev, |to, w, s| outs.push((to, w, s)));
            for (to, w, s) in outs {
                let t = intern(to, local, &mut globals, &mut queue);
                edges.push(LocalEdge { from, to: t, weight: w, step: s });
            }
        }
        for &v in &globals[1..] {
            local[v] = usize::MAX;
        }
        let n = globals.len();
        let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.from].push(i);
        }

        let mut dist: Vec<Option<W>> = alloc::vec![None; n];
        let mut parent: Vec<usize> = alloc::vec![usize::MAX; n];
        let relax = |i: usize, dist: &mut Vec<Option<W>>, parent: &mut Vec<usize>| -> bool {
            let e = &edges[i];
            let Some(w) = &e.weight else { return false };
            let cand = if e.from == 0 {
                w.clone()
            } else {
                match &dist[e.from] {
                    Some(d) => d.add(w),
                    None => return false,
                }
            };
            if dist[e.to].as_ref().is_none_or(|d| cand > *d) {
                dist[e.to] = Some(cand);
                parent[e.to] = i;
                true
            } else {
                false
            }
        };
        for i in 0..edges.len() {
            if edges[i].from == 0 {
                relax(i, &mut dist, &mut parent);
            }
        }
        let mut settled = false;
        for _ in 0..n {
            let mut changed = false;
            for i in 0..edges.len() {
                if edges[i].from != 0 && relax(i, &mut dist, &mut parent) {
                    changed = true;
                }
            }
            if !changed {
                settled = true;
                break;
            }
        }
        // One more pass: heads relaxed now lie on or after a positive cycle.
        let mut relaxed_heads = Vec::new();
        if !settled {
            for i in 0..edges.len() {
                if edges[i].from != 0 && relax(i, &mut dist, &mut parent) {
                    relaxed_heads.push(edges[i].to);
                }
            }
        }
        let mut seeds = relaxed_heads.clone();
        for e in &edges {
            if e.weight.is_none() {
                seeds.push(e.to);
            }
        }
        let omega = closure(&adj, &edges, &seeds, n);

        let mut out = Vec::with_capacity(nq);
        for q2 in 0..nq {
            let target = globals.iter().position(|&v| v == q2);
            let Some(t) = target else {
                out.push((ExtWeight::NegInfinity, Proof::Missing));
                continue;
            };
            if omega[t] {
                let proof = if self.keep {
                    self.omega_proof(&edges, &adj, &mut dist, &mut parent, &relaxed_heads, t, n)
                } else {
                    Proof::Missing
                };
                out.push((ExtWeight::Omega, proof));
            } else {
                let d = dist[t].clone().expect("non-omega reachable vertex has a distance");
                let proof = if self.keep {
                    let mut steps = Vec::new();
                    let mut v = t;
                    let mut guard = 0;
                    loop {
                        let i = parent[v];
                        steps.push(edges[i].step.clone());
                        v = edges[i].from;
                        guard += 1;
                        if v == 0 || guard > n {
                            break;
                        }
                    }
                    steps.reverse();
                    Proof::Path(steps)
                } else {
                    Proof::Missing
                };
                out.push((ExtWeight::Finite(d), proof));
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn omega_proof(
        &self,
        edges: &[LocalEdge<W>],
        adj: &[Vec<usize>],
        dist: &mut [Option<W>],
        parent: &mut [usize],
        relaxed: &[usize],
        target: usize,
        n: usize,
    ) -> Proof {
        let steps = |path: &[usize]| -> Vec<Step> { path.iter().map(|&i| edges[i].step.clone()).collect() };
        for e in edges {
            if e.weight.is_some() {
                continue;
            }
            if let Some(from) = bfs_path(adj, edges, e.to, target, false) {
                let to = bfs_path(adj, edges, 0, e.from, false).expect("local vertices are reachable");
                let Step::Sub(via) = e.step else { unreachable!("omega edges are summary edges") };
                return Proof::ThroughOmega { to: steps(&to), via, from: steps(&from) };
            }
        }
        for &x in relaxed {
            if bfs_path(adj, edges, x, target, false).is_none() {
                continue;
            }
            // Walking parents from a vertex relaxed in round n enters a cycle
            // of the parent graph, and such cycles are positive. Extra
            // relaxation rounds repair the rare chains that end at the start.
            for _ in 0..=n {
                if let Some(y) = walk_back(parent, edges, x, n) {
                    let mut cycle = Vec::new();
                    let mut v = y;
                    loop {
                        let i = parent[v];
                        cycle.push(i);
                        v = edges[i].from;
                        if v == y {
                            break;
                        }
                    }
                    cycle.reverse();
                    let to = bfs_path(adj, edges, 0, y, true).expect("cycle vertex has a finite distance");
                    let from = bfs_path(adj, edges, y, target, false).expect("cycle reaches its relaxed head");
                    return Proof::Cycle { to: steps(&to), cycle: steps(&cycle), from: steps(&from) };
                }
                for i in 0..edges.len() {
                    let e = &edges[i];
                    let (Some(w), false) = (&e.weight, e.from == 0) else { continue };
                    let Some(d) = &dist[e.from] else { continue };
                    let cand = d.add(w);
                    if dist[e.to].as_ref().is_none_or(|old| cand > *old) {
                        dist[e.to] = Some(cand);
                        parent[e.to] = i;
                    }
                }
            }
        }
        Proof::Missing
    }
}

fn walk_back<W>(parent: &[usize], edges: &[LocalEdge<W>], x: usize, n: usize) -> Option<usize> {
    let mut v = x;
    for _ in 0..n {
        let i = parent[v];
        if i == usize::MAX {
            return None;
        }
        v = edges[i].from;
        if v == 0 {
            return None;
        }
    }
    Some(v)
}

fn closure<W>(adj: &[Vec<usize>], edges: &[LocalEdge<W>], seeds: &[usize], n: usize) -> Vec<bool> {
    let mut mark = alloc::vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    for &s in seeds {
        if !mark[s] {
            mark[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &i in &adj[v] {
            let t = edges[i].to;
            if !mark[t] {
                mark[t] = true;
                stack.push(t);
            }
        }
    }
    mark
}

/// Shortest (by edge count) path from `s` to `t`; `s == t` gives the empty path.
fn bfs_path<W>(adj: &[Vec<usize>], edges: &[LocalEdge<W>], s: usize, t: usize, finite_only: bool) -> Option<Vec<usize>> {
    if s == t {
        return Some(Vec::new());
    }
    let n = adj.len();
    let mut via = alloc::vec![usize::MAX; n];
    let mut seen = alloc::vec![false; n];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &i in &adj[v] {
            let e = &edges[i];
            if finite_only && e.weight.is_none() {
                continue;
            }
            if !seen[e.to] {
                seen[e.to] = true;
                via[e.to] = i;
                if e.to == t {
                    let mut path = Vec::new();
                    let mut u = t;
                    while u != s {
                        path.push(via[u]);
                        u = edges[via[u]].from;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(e.to);
            }
        }
    }
    None
}

/// How a triple of the full summary came to be `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum OmegaSource {
    Finite,
    /// `ω` in `s_d` or `s_{d+1}` through a positive cycle or an `ω`-edge.
    Level,
    /// `s_d < s_{d+1}`, both finite.
    Growth,
    /// Only through the `ω`-closure.
    Closure,
}

/// Everything computed on the way to the full summary `s`.
pub(crate) struct Analysis<'a, W: Gain> {
    pub engine: Engine<'a, W>,
    pub d: u32,
    pub star: SummaryFn<W>,
    pub s: SummaryFn<W>,
    pub source: Vec<OmegaSource>,
    pub rows: Vec<bool>,
}

/// `d = (|Q|·|Γ|)²`.
pub fn summary_depth(wps: &Wps) -> u64 {
    wps.ell() * wps.ell()
}

impl<'a, W: Gain> Analysis<'a, W> {
    pub fn run(wps: &'a Wps, weights: Vec<W>, rows: Option<Vec<bool>>, keep: bool) -> Analysis<'a, W> {
        let d = u32::try_from(summary_depth(wps)).unwrap_or(u32::MAX - 1);
        let mut engine = Engine::new(wps, weights, rows, keep);
        engine.run_to(d);
        let s_d = engine.cur.clone();
        engine.advance();
        let s_d1 = engine.cur.clone();
        let mut star = s_d.clone();
        let mut source = alloc::vec![OmegaSource::Finite; s_d.table.len()];
        for i in 0..s_d.table.len() {
            if s_d.table[i].is_omega() || s_d1.table[i].is_omega() {
                star.table[i] = ExtWeight::Omega;
                source[i] = OmegaSource::Level;
            } else if s_d.table[i] < s_d1.table[i] {
                star.table[i] = ExtWeight::Omega;
                source[i] = OmegaSource::Growth;
            }
        }
        let rows = engine.rows.clone();
        let s = omega_closure_rows(wps, &star, &rows);
        for (i, v) in s.table.iter().enumerate() {
            if v.is_omega() && !star.table[i].is_omega() {
                source[i] = OmegaSource::Closure;
            }
        }
        Analysis { engine, d, star, s, source, rows }
    }

    pub fn source_of(&self, t: Triple) -> OmegaSource {
        self.source[self.s.idx(t.0, t.1, t.2)]
    }
}

/// The doubled system used by the `ω`-closure: states `q` and `q^ω`
/// (`q + |Q|`), symbols `Γ` plus a blocked bottom `⊥′` (`|Γ|`).
pub(crate) struct Doubled {
    pub wps: Wps,
    /// Per doubled edge: original edge index or the `ω` triple it stands for.
    pub tags: Vec<Result<usize, Triple>>,
}

pub(crate) fn doubled_system<W: Clone>(wps: &Wps, star: &SummaryFn<W>) -> Doubled {
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    let mut edges = Vec::new();
    let mut tags = Vec::new();
    for (i, e) in wps.edges.iter().enumerate() {
        for shift in [0, nq] {
            edges.push(Edge { from: e.from + shift, top: e.top, to: e.to + shift, command: e.command, weight: e.weight.clone() });
            tags.push(Ok(i));
        }
    }
    for ((q1, g, q2), v) in star.iter() {
        if v.is_omega() {
            for shift in [0, nq] {
                edges.push(Edge { from: q1 + shift, top: g, to: q2 + nq, command: StackCommand::Skip, weight: BigInt::default() });
                tags.push(Err((q1, g, q2)));
            }
        }
    }
    let mut states: Vec<String> = wps.states.clone();
    states.extend(wps.states.iter().map(|s| alloc::format!("{s}^ω")));
    let mut alphabet = wps.alphabet.clone();
    alphabet.push(String::from("⊥′"));
    Doubled { wps: Wps { states, alphabet, bottom: ng, initial: wps.initial, edges }, tags }
}

/// Marks `t` as `ω` when the doubled system reaches `(⊥′γ, q2^ω)` from `(⊥′γ, q1)`.
pub(crate) fn omega_closure_rows<W: Clone>(wps: &Wps, star: &SummaryFn<W>, rows: &[bool]) -> SummaryFn<W> {
    let mut s = star.clone();
    if !star.has_omega() {
        return s;
    }
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    let dbl = doubled_system(wps, star);
    for g in 0..ng {
        if !(0..nq).any(|q1| rows[q1 * ng + g]) {
            continue;
        }
        for q2 in 0..nq {
            let target = crate::model::Configuration::new(alloc::vec![ng, g], q2 + nq);
            let a = pre_star_automaton(&dbl.wps, &ConfigAutomaton::single(&dbl.wps, &target));
            for q1 in 0..nq {
                if rows[q1 * ng + g] && a.accepts(&crate::model::Configuration::new(alloc::vec![ng, g], q1)) {
                    s.set(q1, g, q2, ExtWeight::Omega);
                }
            }
        }
    }
    s
}

fn edge_weights(wps: &Wps) -> Vec<BigInt> {
    wps.edges.iter().map(|e| e.weight.clone()).collect()
}

/// `s_0`: longest nonempty skip-only paths at a fixed top.
pub fn base_summary(wps: &Wps) -> SummaryFn {
    Engine::new(wps, edge_weights(wps), None, false).cur
}

/// `s_{i+1}` from `s_i`.
pub fn next_bounded_summary(wps: &Wps, s_i: &SummaryFn) -> SummaryFn {
    let mut eng: Engine<'_, BigInt> = Engine::new(wps, edge_weights(wps), None, false);
    eng.cur = s_i.clone();
    eng.level = 1;
    eng.stable = false;
    eng.advance();
    eng.cur
}

/// `s_d`.
pub fn bounded_summary(wps: &Wps, d: u32) -> SummaryFn {
    let mut eng = Engine::new(wps, edge_weights(wps), None, false);
    eng.run_to(d);
    eng.cur
}

/// The full summary function `s`.
pub fn full_summary(wps: &Wps) -> SummaryFn {
    Analysis::run(wps, edge_weights(wps), None, false).s
}

/// `s*` (before the `ω`-closure).
pub fn thresholded_summary(wps: &Wps) -> SummaryFn {
    Analysis::run(wps, edge_weights(wps), None, false).star
}

/// Re-applies the `ω`-closure to `s`: triples stay unless the doubled
/// system built from `s`'s `ω` entries makes them `ω`.
pub fn omega_closure(wps: &Wps, s: &SummaryFn) -> SummaryFn {
    let rows = alloc::vec![true; wps.num_states() * wps.num_symbols()];
    omega_closure_rows(wps, s, &rows)
}

/// Vertex of the step graph: `(⊥γ, q)` or `(⊥γ₁γ₂, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StepVertex {
    Low { top: Symbol, state: State },
    High { lower: Symbol, top: Symbol, state: State },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepGraphEdge {
    pub from: usize,
    pub to: usize,
    pub edge: usize,
}

/// The explicit height-one/height-two graph of raw system edges.
#[derive(Clone, Debug)]
pub struct StepGraph {
    pub vertices: Vec<StepVertex>,
    pub edges: Vec<StepGraphEdge>,
}

impl StepGraph {
    pub fn index(&self, v: StepVertex) -> Option<usize> {
        self.vertices.iter().position(|&u| u == v)
    }
}

pub fn build_step_graph(wps: &Wps) -> StepGraph {
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    let low = |g: Symbol, q: State| g * nq + q;
    let high = |g1: Symbol, g2: Symbol, q: State| ng * nq + (g1 * ng + g2) * nq + q;
    let mut vertices = Vec::with_capacity(nq * (ng + ng * ng));
    for g in 0..ng {
        for q in 0..nq {
            vertices.push(StepVertex::Low { top: g, state: q });
        }
    }
    for g1 in 0..ng {
        for g2 in 0..ng {
            for q in 0..nq {
                vertices.push(StepVertex::High { lower: g1, top: g2, state: q });
            }
        }
    }
    let mut edges = Vec::new();
    for (i, e) in wps.edges.iter().enumerate() {
        match e.command {
            StackCommand::Skip => {
                edges.push(StepGraphEdge { from: low(e.top, e.from), to: low(e.top, e.to), edge: i });
                for g1 in 0..ng {
                    edges.push(StepGraphEdge { from: high(g1, e.top, e.from), to: high(g1, e.top, e.to), edge: i });
                }
            }
            StackCommand::Push(z) => {
                edges.push(StepGraphEdge { from: low(e.top, e.from), to: high(e.top, z, e.to), edge: i });
            }
            StackCommand::Pop => {
                for g1 in 0..ng {
                    edges.push(StepGraphEdge { from: high(g1, e.top, e.from), to: low(g1, e.to), edge: i });
                }
            }
        }
    }
    StepGraph { vertices, edges }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkipEdge<W = BigInt> {
    pub from: (State, Symbol),
    pub to: (State, Symbol),
    pub weight: ExtWeight<W>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushEdge {
    pub from: (State, Symbol),
    pub to: (State, Symbol),
    pub edge: usize,
}

/// `Gr(A)` over `Q × Γ`, with reachability from `(q0, ⊥)`.
#[derive(Clone, Debug)]
pub struct SummaryGraph<W = BigInt> {
    pub num_states: usize,
    pub num_symbols: usize,
    pub skip_edges: Vec<SkipEdge<W>>,
    pub push_edges: Vec<PushEdge>,
    pub reachable: Vec<bool>,
}

impl<W> SummaryGraph<W> {
    pub fn vertex(&self, v: (State, Symbol)) -> usize {
        v.0 * self.num_symbols + v.1
    }

    pub fn is_reachable(&self, v: (State, Symbol)) -> bool {
        self.reachable[self.vertex(v)]
    }
}

pub fn build_summary_graph<W: Gain>(wps: &Wps, s: &SummaryFn<W>) -> SummaryGraph<W> {
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    let mut skip_edges = Vec::new();
    for ((q1, g, q2), v) in s.iter() {
        if !v.is_neg_infinity() {
            skip_edges.push(SkipEdge { from: (q1, g), to: (q2, g), weight: v.clone() });
        }
    }
    let mut push_edges = Vec::new();
    for (i, e) in wps.edges.iter().enumerate() {
        if let StackCommand::Push(z) = e.command {
            push_edges.push(PushEdge { from: (e.from, e.top), to: (e.to, z), edge: i });
        }
    }
    let mut g = SummaryGraph { num_states: nq, num_symbols: ng, skip_edges, push_edges, reachable: alloc::vec![false; nq * ng] };
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); nq * ng];
    for e in &g.skip_edges {
        adj[g.vertex(e.from)].push(g.vertex(e.to));
    }
    for e in &g.push_edges {
        adj[g.vertex(e.from)].push(g.vertex(e.to));
    }
    if wps.initial < nq && wps.bottom < ng {
        let start = g.vertex((wps.initial, wps.bottom));
        g.reachable[start] = true;
        let mut stack = alloc::vec![start];
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !g.reachable[u] {
                    g.reachable[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    g
}

/// Over-approximation of the `(state, top)` pairs reachable from `(q0, ⊥)`:
/// closure under skip edges, push edges, and push/pop-matched returns.
pub(crate) fn relevant_rows(wps: &Wps) -> Vec<bool> {
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    let mut pops_by_top: Vec<Vec<State>> = alloc::vec![Vec::new(); ng];
    for e in &wps.edges {
        if e.command == StackCommand::Pop {
            pops_by_top[e.top].push(e.to);
        }
    }
    let heads = wps.edges_by_head();
    let mut mark = alloc::vec![false; nq * ng];
    let start = wps.initial * ng + wps.bottom;
    mark[start] = true;
    let mut stack = alloc::vec![start];
    while let Some(v) = stack.pop() {
        let (q, g) = (v / ng, v % ng);
        let mut visit = |w: usize, stack: &mut Vec<usize>| {
            if !mark[w] {
                mark[w] = true;
                stack.push(w);
            }
        };
        for &i in &heads[q * ng + g] {
            let e = &wps.edges[i];
            match e.command {
                StackCommand::Skip => visit(e.to * ng + g, &mut stack),
                StackCommand::Push(z) => {
                    visit(e.to * ng + z, &mut stack);
                    for &r in &pops_by_top[z] {
                        visit(r * ng + g, &mut stack);
                    }
                }
                StackCommand::Pop => {}
            }
        }
    }
    mark
}
