//! Mean-payoff threshold decisions on weighted pushdown systems.

use alloc::collections::VecDeque;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::gain::{ExtWeight, Gain, Scale, Scaled};
use crate::model::{ModelError, Path, Wps};
use crate::summary::{build_summary_graph, relevant_rows, summary_depth, Analysis, SummaryFn, SummaryGraph, Triple};
use crate::witness::{Expander, WitnessError, WITNESS_EDGE_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    LimInfAvg,
    LimSupAvg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `>`
    Strict,
    /// `≥`
    NonStrict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    pub flavor: Flavor,
    pub relation: Relation,
    pub threshold: BigRational,
    pub stack_bounded: bool,
}

impl Objective {
    pub fn new(flavor: Flavor, relation: Relation) -> Objective {
        Objective { flavor, relation, threshold: BigRational::zero(), stack_bounded: false }
    }

    pub fn with_threshold(mut self, r: BigRational) -> Objective {
        self.threshold = r;
        self
    }

    pub fn stack_bounded(mut self) -> Objective {
        self.stack_bounded = true;
        self
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flavor = match self.flavor {
            Flavor::LimInfAvg => "LimInfAvg",
            Flavor::LimSupAvg => "LimSupAvg",
        };
        let rel = match self.relation {
            Relation::Strict => ">",
            Relation::NonStrict => ">=",
        };
        write!(f, "{flavor} {rel} {}", self.threshold)?;
        if self.stack_bounded {
            f.write_str(" (stack-bounded)")?;
        }
        Ok(())
    }
}

/// An ultimately periodic path: `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Path,
    pub cycle: Path,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LassoError {
    #[error("prefix does not start at the initial configuration")]
    WrongStart,
    #[error(transparent)]
    Replay(#[from] ModelError),
    #[error("cycle does not start where the prefix ends")]
    Disconnected,
    #[error("cycle is empty")]
    EmptyCycle,
    #[error("cycle start is not a local minimum of the cycle")]
    NotLocalMinimum,
    #[error("cycle does not return to its starting state and top symbol")]
    NotClosed,
}

impl Lasso {
    pub fn cycle_weight(&self, wps: &Wps) -> BigInt {
        self.cycle.weight(wps)
    }

    /// Replays the lasso and checks that the cycle can be repeated forever.
    pub fn check(&self, wps: &Wps) -> Result<(), LassoError> {
        if self.prefix.start != wps.initial_config() {
            return Err(LassoError::WrongStart);
        }
        let end = self.prefix.end(wps)?;
        if end != self.cycle.start {
            return Err(LassoError::Disconnected);
        }
        if self.cycle.is_empty() {
            return Err(LassoError::EmptyCycle);
        }
        let configs = self.cycle.configs(wps)?;
        let h0 = configs[0].height();
        if configs.iter().any(|c| c.height() < h0) {
            return Err(LassoError::NotLocalMinimum);
        }
        let last = configs.last().expect("nonempty");
        if last.state != configs[0].state || last.top() != configs[0].top() {
            return Err(LassoError::NotClosed);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecideStats {
    /// `ℓ = |Q|·|Γ|`.
    pub ell: u64,
    /// Nominal summary depth `ℓ²`.
    pub depth: u64,
    /// Bit length of the scale factor, when the ε-scaled system was used.
    pub scale_bits: Option<u64>,
    /// Summary levels actually computed before the fixpoint.
    pub levels: u32,
    /// `(state, top)` rows the summary was computed for.
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    pub witness: Option<Lasso>,
    pub stats: DecideStats,
}

/// `w ↦ w·b − a` for `r = a/b`.
pub fn normalize_threshold(wps: &Wps, r: &BigRational) -> Wps {
    let (a, b) = (r.numer(), r.denom());
    if a.is_zero() && b.is_one() {
        return wps.clone();
    }
    wps.map_weights(|w| w * b - a)
}

/// `w ↦ w·D + 1` with `D = 2·ℓ·ℓ^{(ℓ+1)²}`.
pub fn scale_for_epsilon(wps: &Wps) -> Wps {
    let d = crate::gain::scale_factor(wps.ell());
    wps.map_weights(|w| w * &d + 1)
}

/// A directed edge of `Gr`, restricted to reachable vertices.
#[derive(Clone, Debug)]
struct GrEdge<W> {
    from: usize,
    to: usize,
    weight: Option<W>,
    kind: GrKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GrKind {
    Skip(Triple),
    Push(usize),
}

fn gr_edges<W: Gain>(g: &SummaryGraph<W>, push_weight: impl Fn(usize) -> W) -> Vec<GrEdge<W>> {
    let mut out = Vec::new();
    for e in &g.skip_edges {
        if !g.is_reachable(e.from) {
            continue;
        }
        let weight = match &e.weight {
            ExtWeight::Finite(w) => Some(w.clone()),
            ExtWeight::Omega => None,
            ExtWeight::NegInfinity => continue,
        };
        out.push(GrEdge {
            from: g.vertex(e.from),
            to: g.vertex(e.to),
            weight,
            kind: GrKind::Skip((e.from.0, e.from.1, e.to.0)),
        });
    }
    for e in &g.push_edges {
        if g.is_reachable(e.from) {
            out.push(GrEdge { from: g.vertex(e.from), to: g.vertex(e.to), weight: Some(push_weight(e.edge)), kind: GrKind::Push(e.edge) });
        }
    }
    out
}

fn bfs<W>(n: usize, edges: &[GrEdge<W>], s: usize, t: usize) -> Option<Vec<usize>> {
    if s == t {
        return Some(Vec::new());
    }
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        adj[e.from].push(i);
    }
    let mut via = alloc::vec![usize::MAX; n];
    let mut seen = alloc::vec![false; n];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &i in &adj[v] {
            let u = edges[i].to;
            if !seen[u] {
                seen[u] = true;
                via[u] = i;
                if u == t {
                    let mut path = Vec::new();
                    let mut x = t;
                    while x != s {
                        path.push(via[x]);
                        x = edges[via[x]].from;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(u);
            }
        }
    }
    None
}

/// A good cycle of `Gr` as a list of edge indices: through an `ω`-edge, or
/// positive by Bellman-Ford from the initial vertex.
fn find_good_cycle<W: Gain>(n: usize, start: usize, edges: &[GrEdge<W>], zero: W) -> Option<Vec<usize>> {
    for (i, e) in edges.iter().enumerate() {
        if e.weight.is_none() {
            if let Some(back) = bfs(n, edges, e.to, e.from) {
                let mut cycle = alloc::vec![i];
                cycle.extend(back);
                return Some(cycle);
            }
        }
    }
    let mut dist: Vec<Option<W>> = alloc::vec![None; n];
    let mut parent = alloc::vec![usize::MAX; n];
    dist[start] = Some(zero);
    let relax_all = |dist: &mut Vec<Option<W>>, parent: &mut Vec<usize>| -> Option<usize> {
        let mut last = None;
        for (i, e) in edges.iter().enumerate() {
            let (Some(w), Some(d)) = (&e.weight, &dist[e.from]) else { continue };
            let cand = d.add(w);
            if dist[e.to].as_ref().is_none_or(|x| cand > *x) {
                dist[e.to] = Some(cand);
                parent[e.to] = i;
                last = Some(e.to);
            }
        }
        last
    };
    for _ in 1..n {
        relax_all(&mut dist, &mut parent)?;
    }
    // Keep relaxing: a vertex relaxed in round n or later leads back, via
    // parents, into a positive cycle of the parent graph.
    for _ in 0..=n {
        let x = relax_all(&mut dist, &mut parent)?;
        let mut y = x;
        let mut ok = true;
        for _ in 0..n {
            if parent[y] == usize::MAX {
                ok = false;
                break;
            }
            y = edges[parent[y]].from;
        }
        if !ok {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = y;
        loop {
            let i = parent[v];
            cycle.push(i);
            v = edges[i].from;
            if v == y || cycle.len() > n {
                break;
            }
        }
        if v == y {
            cycle.reverse();
            return Some(cycle);
        }
    }
    None
}

fn scaled_weights(wps: &Wps, scale: &Arc<Scale>) -> Vec<Scaled> {
    wps.edges.iter().map(|e| Scaled::edge(&e.weight, scale)).collect()
}

fn stats_of<W: Gain>(wps: &Wps, an: &Analysis<'_, W>, scale: Option<&Scale>) -> DecideStats {
    DecideStats {
        ell: wps.ell(),
        depth: summary_depth(wps),
        scale_bits: scale.map(|s| s.factor().bits()),
        levels: an.engine.level,
        rows: an.rows.iter().filter(|&&b| b).count(),
    }
}

/// Expands a `Gr` path or cycle into concrete edges.
fn expand(x: &Expander<'_, '_>, edges: &[GrEdge<BigInt>], path: &[usize], omega_target: Option<BigInt>) -> Result<Vec<usize>, WitnessError> {
    let wps = x.an.engine.wps;
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for &i in path {
        match edges[i].kind {
            GrKind::Push(e) => parts.push(alloc::vec![e]),
            GrKind::Skip(t) => {
                let mut p = Vec::new();
                x.summary(t, &BigInt::zero(), &mut p)?;
                parts.push(p);
            }
        }
    }
    if let Some(m) = omega_target {
        let total: BigInt = parts.iter().flatten().map(|&e| &wps.edges[e].weight).sum();
        if total < m {
            let k = path.iter().position(|&i| edges[i].weight.is_none()).ok_or(WitnessError::Unavailable)?;
            let GrKind::Skip(t) = edges[path[k]].kind else { unreachable!("ω edges are skip edges") };
            let own: BigInt = parts[k].iter().map(|&e| &wps.edges[e].weight).sum();
            let mut p = Vec::new();
            x.summary(t, &(m - (total - own)), &mut p)?;
            parts[k] = p;
        }
    }
    let out: Vec<usize> = parts.concat();
    if out.len() > WITNESS_EDGE_LIMIT {
        return Err(WitnessError::TooLong);
    }
    Ok(out)
}

fn lasso_from(x: &Expander<'_, '_>, g: &SummaryGraph<BigInt>, edges: &[GrEdge<BigInt>], cycle: &[usize], min_weight: BigInt) -> Result<Lasso, WitnessError> {
    let wps = x.an.engine.wps;
    let n = g.num_states * g.num_symbols;
    let start = g.vertex((wps.initial, wps.bottom));
    let entry = edges[cycle[0]].from;
    let to = bfs(n, edges, start, entry).ok_or(WitnessError::Unavailable)?;
    let prefix_edges = expand(x, edges, &to, None)?;
    let prefix = Path::new(wps.initial_config(), prefix_edges);
    let at = prefix.end(wps).map_err(|_| WitnessError::Unavailable)?;
    let needs_omega = cycle.iter().any(|&i| edges[i].weight.is_none());
    let cycle_edges = expand(x, edges, cycle, needs_omega.then_some(min_weight))?;
    Ok(Lasso { prefix, cycle: Path::new(at, cycle_edges) })
}

fn analysis(wps: &Wps, keep: bool) -> Analysis<'_, BigInt> {
    let weights = wps.edges.iter().map(|e| e.weight.clone()).collect();
    Analysis::run(wps, weights, Some(relevant_rows(wps)), keep)
}

fn strict_unbounded(wps: &Wps, keep: bool) -> (Verdict, Result<Lasso, WitnessError>) {
    let an = analysis(wps, keep);
    let g = build_summary_graph(wps, &an.s);
    let edges = gr_edges(&g, |e| wps.edges[e].weight.clone());
    let n = g.num_states * g.num_symbols;
    let start = g.vertex((wps.initial, wps.bottom));
    let cycle = find_good_cycle(n, start, &edges, BigInt::zero());
    let stats = stats_of(wps, &an, None);
    let witness = match (&cycle, keep) {
        (None, _) => Err(WitnessError::NoWitness),
        (Some(_), false) => Err(WitnessError::Unavailable),
        (Some(c), true) => lasso_from(&Expander { an: &an }, &g, &edges, c, BigInt::one()),
    };
    (Verdict { answer: cycle.is_some(), witness: witness.clone().ok(), stats }, witness)
}

fn nonstrict_unbounded(wps: &Wps) -> Verdict {
    let scale = Scale::new(wps.ell());
    let an = Analysis::run(wps, scaled_weights(wps, &scale), Some(relevant_rows(wps)), false);
    let g = build_summary_graph(wps, &an.s);
    let edges = gr_edges(&g, |e| Scaled::edge(&wps.edges[e].weight, &scale));
    let n = g.num_states * g.num_symbols;
    let start = g.vertex((wps.initial, wps.bottom));
    let zero = Scaled::new(BigInt::zero(), BigInt::zero(), &scale);
    let answer = find_good_cycle(n, start, &edges, zero).is_some();
    Verdict { answer, witness: None, stats: stats_of(wps, &an, Some(&scale)) }
}

/// Reachable `(q, γ)` with the best skip self-loop `s(q, γ, q)` accepted by `good`.
fn self_loop<W: Gain>(g: &SummaryGraph<W>, s: &SummaryFn<W>, good: impl Fn(&ExtWeight<W>) -> bool) -> Option<(usize, usize)> {
    for q in 0..g.num_states {
        for z in 0..g.num_symbols {
            if g.is_reachable((q, z)) && good(s.get(q, z, q)) {
                return Some((q, z));
            }
        }
    }
    None
}

fn stack_bounded(wps: &Wps, strict: bool, keep: bool) -> (Verdict, Result<Lasso, WitnessError>) {
    let an = analysis(wps, keep);
    let g = build_summary_graph(wps, &an.s);
    let found = self_loop(&g, &an.s, |v| match v {
        ExtWeight::Omega => true,
        ExtWeight::Finite(w) => w.is_positive() || (!strict && w.is_zero()),
        ExtWeight::NegInfinity => false,
    });
    let stats = stats_of(wps, &an, None);
    let witness = match (found, keep) {
        (None, _) => Err(WitnessError::NoWitness),
        (Some(_), false) => Err(WitnessError::Unavailable),
        (Some((q, z)), true) => {
            let edges = gr_edges(&g, |e| wps.edges[e].weight.clone());
            let looped = edges
                .iter()
                .position(|e| e.kind == GrKind::Skip((q, z, q)))
                .expect("self-loop edge is present");
            let min = if strict { BigInt::one() } else { BigInt::zero() };
            lasso_from(&Expander { an: &an }, &g, &edges, &[looped], min)
        }
    };
    (Verdict { answer: found.is_some(), witness: witness.clone().ok(), stats }, witness)
}

/// Decides whether some infinite path from the initial configuration
/// satisfies `obj`. Strict and stack-bounded positive answers carry a lasso.
pub fn decide(wps: &Wps, obj: &Objective) -> Verdict {
    decide_with(wps, obj, true)
}

/// As [`decide`], optionally skipping witness bookkeeping.
pub fn decide_with(wps: &Wps, obj: &Objective, witnesses: bool) -> Verdict {
    let norm = normalize_threshold(wps, &obj.threshold);
    match (obj.relation, obj.stack_bounded) {
        (Relation::Strict, false) => strict_unbounded(&norm, witnesses).0,
        (Relation::NonStrict, false) => nonstrict_unbounded(&norm),
        (Relation::Strict, true) => stack_bounded(&norm, true, witnesses).0,
        (Relation::NonStrict, true) => stack_bounded(&norm, false, witnesses).0,
    }
}

/// Some path contains a good cycle (equivalently, `LimInfAvg > 0` is achievable).
pub fn has_good_cycle(wps: &Wps) -> Verdict {
    strict_unbounded(wps, true).0
}

/// The lasso behind a positive strict or stack-bounded answer.
pub fn extract_witness(wps: &Wps, obj: &Objective) -> Result<Lasso, WitnessError> {
    let norm = normalize_threshold(wps, &obj.threshold);
    match (obj.relation, obj.stack_bounded) {
        (Relation::Strict, false) => strict_unbounded(&norm, true).1,
        (Relation::NonStrict, false) => Err(WitnessError::Unavailable),
        (Relation::Strict, true) => stack_bounded(&norm, true, true).1,
        (Relation::NonStrict, true) => stack_bounded(&norm, false, true).1,
    }
}

/// `sup` of `LimInfAvg` over stack-bounded paths is at least 0.
pub fn sup_stack_bounded_geq0(wps: &Wps) -> bool {
    let scale = Scale::new(wps.ell());
    let an = Analysis::run(wps, scaled_weights(wps, &scale), Some(relevant_rows(wps)), false);
    let g = build_summary_graph(wps, &an.s);
    self_loop(&g, &an.s, |v| match v {
        ExtWeight::Omega => true,
        ExtWeight::Finite(w) => w.sign() == core::cmp::Ordering::Greater,
        ExtWeight::NegInfinity => false,
    })
    .is_some()
}

/// Whether the system has an infinite path from its initial configuration.
pub fn has_infinite_path(wps: &Wps) -> bool {
    // Every infinite path visits some (q, γ) at a local minimum twice, which
    // is a Gr cycle; any weights work, so test with all-positive weights.
    let lifted = wps.map_weights(|_| BigInt::one());
    strict_unbounded(&lifted, false).0.answer
}
