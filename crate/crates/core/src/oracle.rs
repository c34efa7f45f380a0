//! Brute-force reference implementations over explicit, height-truncated
//! configuration graphs, and the pumpable-pair construction.
//!
//! Nothing here shares code with the summary engine: graphs are explicit,
//! weights are `i128`, longest paths come from a length-bounded DP and
//! positive cycles from Karp's maximum cycle mean per strongly connected
//! component.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::gain::ExtWeight;
use crate::model::{step, Configuration, ModelError, Path, StackCommand, State, Symbol, Wps};
use crate::summary::SummaryFn;

/// Vertex budget of every explicit graph built here.
pub const ORACLE_VERTEX_LIMIT: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("explicit graph would exceed {ORACLE_VERTEX_LIMIT} vertices")]
    TooLarge,
    #[error("weight does not fit the oracle's 128-bit arithmetic")]
    WeightOverflow,
    #[error("path has additional stack height {ash}, below the required {need}")]
    PreconditionFailed { ash: usize, need: usize },
    #[error("perturbed answers did not stabilize")]
    Unstable,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedEdge {
    pub from: usize,
    pub to: usize,
    pub weight: i128,
    pub edge: usize,
}

/// All configurations `(base·u, q)` with height at most the cap.
#[derive(Clone, Debug)]
pub struct TruncatedGraph {
    pub vertices: Vec<Configuration>,
    pub edges: Vec<TruncatedEdge>,
    index: BTreeMap<Configuration, usize>,
}

impl TruncatedGraph {
    pub fn vertex(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c).copied()
    }
}

fn small_weight(w: &BigInt) -> Result<i128, OracleError> {
    w.to_i128().filter(|x| x.unsigned_abs() < 1u128 << 100).ok_or(OracleError::WeightOverflow)
}

pub fn truncated_graph(wps: &Wps, base: &Configuration, height_cap: usize) -> Result<TruncatedGraph, OracleError> {
    let nq = wps.num_states();
    let letters: Vec<Symbol> = (0..wps.num_symbols()).filter(|&z| z != wps.bottom).collect();
    let mut count: usize = 0;
    let mut layer: usize = 1;
    for _ in base.stack.len()..=height_cap {
        count = count.saturating_add(layer.saturating_mul(nq));
        layer = layer.saturating_mul(letters.len());
        if count > ORACLE_VERTEX_LIMIT {
            return Err(OracleError::TooLarge);
        }
    }
    let mut stacks: Vec<Vec<Symbol>> = alloc::vec![base.stack.clone()];
    let mut frontier = stacks.clone();
    while frontier.first().is_some_and(|s| s.len() < height_cap) {
        let mut next = Vec::new();
        for s in &frontier {
            for &z in &letters {
                let mut t = s.clone();
                t.push(z);
                next.push(t);
            }
        }
        stacks.extend(next.iter().cloned());
        frontier = next;
    }
    let mut vertices = Vec::new();
    let mut index = BTreeMap::new();
    for s in &stacks {
        for q in 0..nq {
            let c = Configuration::new(s.clone(), q);
            index.insert(c.clone(), vertices.len());
            vertices.push(c);
        }
    }
    let mut edges = Vec::new();
    for (i, c) in vertices.iter().enumerate() {
        for (k, e) in wps.edges.iter().enumerate() {
            if e.from != c.state || c.top() != Some(e.top) {
                continue;
            }
            match e.command {
                StackCommand::Pop if c.height() <= base.height() => continue,
                StackCommand::Push(_) if c.height() >= height_cap => continue,
                _ => {}
            }
            let next = step(wps, c, k)?;
            if let Some(&j) = index.get(&next) {
                edges.push(TruncatedEdge { from: i, to: j, weight: small_weight(&e.weight)?, edge: k });
            }
        }
    }
    Ok(TruncatedGraph { vertices, edges, index })
}

fn context(wps: &Wps, g: Symbol) -> Vec<Symbol> {
    if g == wps.bottom {
        alloc::vec![g]
    } else {
        alloc::vec![wps.bottom, g]
    }
}

/// Tarjan's algorithm; returns the component id of every vertex.
fn scc(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    struct St<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<usize>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next: usize,
        ncomp: usize,
    }
    // Iterative DFS: (vertex, next child position).
    let mut st = St {
        adj,
        index: alloc::vec![usize::MAX; n],
        low: alloc::vec![0; n],
        on: alloc::vec![false; n],
        stack: Vec::new(),
        comp: alloc::vec![usize::MAX; n],
        next: 0,
        ncomp: 0,
    };
    for root in 0..n {
        if st.index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = alloc::vec![(root, 0)];
        st.index[root] = st.next;
        st.low[root] = st.next;
        st.next += 1;
        st.stack.push(root);
        st.on[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < st.adj[v].len() {
                let w = st.adj[v][*pos];
                *pos += 1;
                if st.index[w] == usize::MAX {
                    st.index[w] = st.next;
                    st.low[w] = st.next;
                    st.next += 1;
                    st.stack.push(w);
                    st.on[w] = true;
                    call.push((w, 0));
                } else if st.on[w] {
                    st.low[v] = st.low[v].min(st.index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    st.low[u] = st.low[u].min(st.low[v]);
                }
                if st.low[v] == st.index[v] {
                    loop {
                        let w = st.stack.pop().expect("tarjan stack");
                        st.on[w] = false;
                        st.comp[w] = st.ncomp;
                        if w == v {
                            break;
                        }
                    }
                    st.ncomp += 1;
                }
            }
        }
    }
    st.comp
}

/// Karp: does the strongly connected vertex set `members` carry a cycle of
/// positive mean? `edges` are restricted to the component.
fn karp_positive(members: &[usize], edges: &[(usize, usize, i128)]) -> bool {
    let n = members.len();
    let mut local = BTreeMap::new();
    for (i, &v) in members.iter().enumerate() {
        local.insert(v, i);
    }
    let es: Vec<(usize, usize, i128)> = edges.iter().map(|&(u, v, w)| (local[&u], local[&v], w)).collect();
    if es.is_empty() {
        return false;
    }
    // D_k(v): maximum weight of a walk with exactly k edges from vertex 0.
    // Two rolling passes: the first finds D_n, the second compares every
    // D_k against it.
    let advance = |cur: &[Option<i128>]| -> Vec<Option<i128>> {
        let mut next = alloc::vec![None; n];
        for &(u, v, w) in &es {
            if let Some(x) = cur[u] {
                if next[v].is_none_or(|y: i128| x + w > y) {
                    next[v] = Some(x + w);
                }
            }
        }
        next
    };
    let mut start = alloc::vec![None; n];
    start[0] = Some(0);
    let mut dn = start.clone();
    for _ in 0..n {
        dn = advance(&dn);
    }
    // λ* = max_v min_k (D_n(v) − D_k(v)) / (n − k) is positive iff some v
    // has D_n(v) − D_k(v) > 0 for every k < n with D_k(v) defined.
    let mut ok: Vec<bool> = dn.iter().map(Option::is_some).collect();
    let mut dk = start;
    for _ in 0..n {
        for v in 0..n {
            if let (Some(x), Some(y)) = (dk[v], dn[v]) {
                if y - x <= 0 {
                    ok[v] = false;
                }
            }
        }
        dk = advance(&dk);
    }
    ok.iter().any(|&b| b)
}

/// Positive-cycle components and reachability helpers over an explicit graph.
struct Explicit {
    n: usize,
    adj: Vec<Vec<usize>>,
    radj: Vec<Vec<usize>>,
    hot: Vec<bool>,
}

impl Explicit {
    fn new(n: usize, edges: &[(usize, usize, i128)]) -> Explicit {
        let mut adj = alloc::vec![Vec::new(); n];
        let mut radj = alloc::vec![Vec::new(); n];
        for &(u, v, _) in edges {
            adj[u].push(v);
            radj[v].push(u);
        }
        let comp = scc(n, &adj);
        let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut members: Vec<Vec<usize>> = alloc::vec![Vec::new(); ncomp];
        for v in 0..n {
            members[comp[v]].push(v);
        }
        let mut inner: Vec<Vec<(usize, usize, i128)>> = alloc::vec![Vec::new(); ncomp];
        for &(u, v, w) in edges {
            if comp[u] == comp[v] {
                inner[comp[u]].push((u, v, w));
            }
        }
        let mut hot = alloc::vec![false; n];
        for c in 0..ncomp {
            if karp_positive(&members[c], &inner[c]) {
                for &v in &members[c] {
                    hot[v] = true;
                }
            }
        }
        Explicit { n, adj, radj, hot }
    }

    fn closure(&self, from: &[usize], back: bool) -> Vec<bool> {
        let g = if back { &self.radj } else { &self.adj };
        let mut seen = alloc::vec![false; self.n];
        let mut stack = Vec::new();
        for &s in from {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for &u in &g[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

/// Longest nonempty walk values from `src`: `best_k[v]` is the maximum over
/// walks of at most `k` edges avoiding `blocked`, iterated until it settles
/// (at most `n` rounds when no positive cycle is left).
fn longest_from(n: usize, edges: &[(usize, usize, i128)], src: usize, blocked: &[bool]) -> Vec<Option<i128>> {
    let mut best: Vec<Option<i128>> = alloc::vec![None; n];
    for &(u, v, w) in edges {
        if u == src && !blocked[v] && best[v].is_none_or(|y| w > y) {
            best[v] = Some(w);
        }
    }
    for _ in 1..n {
        let mut next = best.clone();
        for &(u, v, w) in edges {
            if blocked[u] || blocked[v] {
                continue;
            }
            if let Some(x) = best[u] {
                if next[v].is_none_or(|y| x + w > y) {
                    next[v] = Some(x + w);
                }
            }
        }
        if next == best {
            break;
        }
        best = next;
    }
    best
}

/// `s_d` by brute force over the explicit graphs with cap `|⊥γ| + d`.
pub fn oracle_bounded_summary(wps: &Wps, d: usize) -> Result<SummaryFn, OracleError> {
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    let mut s = SummaryFn::neg_infinity(nq, ng);
    for g in 0..ng {
        let ctx = context(wps, g);
        let cap = ctx.len() + d;
        let tg = truncated_graph(wps, &Configuration::new(ctx.clone(), 0), cap)?;
        let n = tg.vertices.len();
        let edges: Vec<(usize, usize, i128)> = tg.edges.iter().map(|e| (e.from, e.to, e.weight)).collect();
        let ex = Explicit::new(n, &edges);
        for q1 in 0..nq {
            let src = tg.vertex(&Configuration::new(ctx.clone(), q1)).expect("base vertex");
            // Nonempty walks: start from the source's successors.
            let succ: Vec<usize> = ex.adj[src].clone();
            let reach = ex.closure(&succ, false);
            let hot_seeds: Vec<usize> = (0..n).filter(|&v| reach[v] && ex.hot[v]).collect();
            let omega = ex.closure(&hot_seeds, false);
            let best = longest_from(n, &edges, src, &omega);
            for q2 in 0..nq {
                let t = tg.vertex(&Configuration::new(ctx.clone(), q2)).expect("base vertex");
                let v = if omega[t] {
                    ExtWeight::Omega
                } else {
                    match best[t] {
                        Some(x) => ExtWeight::Finite(BigInt::from(x)),
                        None => ExtWeight::NegInfinity,
                    }
                };
                s.set(q1, g, q2, v);
            }
        }
    }
    Ok(s)
}

/// Triple relations of the `ω`-augmented system, saturated by rules:
/// skip edges, `ω` edges, push·(inner)·pop, and concatenation.
fn omega_triples(wps: &Wps, star: &SummaryFn) -> Vec<bool> {
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    let id = |a: State, g: Symbol, b: State| (a * ng + g) * nq + b;
    let mut reach = alloc::vec![false; nq * ng * nq];
    let mut om = alloc::vec![false; nq * ng * nq];
    for e in &wps.edges {
        if e.command == StackCommand::Skip {
            reach[id(e.from, e.top, e.to)] = true;
        }
    }
    for ((a, g, b), v) in star.iter() {
        if v.is_omega() {
            reach[id(a, g, b)] = true;
            om[id(a, g, b)] = true;
        }
    }
    loop {
        let mut changed = false;
        let mut set = |i: usize, o: bool, reach: &mut Vec<bool>, om: &mut Vec<bool>| {
            if !reach[i] {
                reach[i] = true;
                changed = true;
            }
            if o && !om[i] {
                om[i] = true;
                changed = true;
            }
        };
        for push in &wps.edges {
            let StackCommand::Push(z) = push.command else { continue };
            for pop in &wps.edges {
                if pop.command != StackCommand::Pop || pop.top != z {
                    continue;
                }
                let i = id(push.from, push.top, pop.to);
                if push.to == pop.from {
                    set(i, false, &mut reach, &mut om);
                }
                let inner = id(push.to, z, pop.from);
                if reach[inner] {
                    set(i, om[inner], &mut reach, &mut om);
                }
            }
        }
        for g in 0..ng {
            for a in 0..nq {
                for b in 0..nq {
                    if !reach[id(a, g, b)] {
                        continue;
                    }
                    for c in 0..nq {
                        if reach[id(b, g, c)] {
                            let o = om[id(a, g, b)] || om[id(b, g, c)];
                            set(id(a, g, c), o, &mut reach, &mut om);
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    om
}

/// The full summary by brute force: oracle `s_d`, `s_{d+1}` and the
/// relational `ω`-closure.
pub fn oracle_full_summary(wps: &Wps) -> Result<SummaryFn, OracleError> {
    let d = usize::try_from(wps.ell() * wps.ell()).map_err(|_| OracleError::TooLarge)?;
    let sd = oracle_bounded_summary(wps, d)?;
    let sd1 = oracle_bounded_summary(wps, d + 1)?;
    let mut star = sd.clone();
    for ((a, g, b), v) in sd.iter() {
        if v.is_omega() || v < sd1.get(a, g, b) {
            star.set(a, g, b, ExtWeight::Omega);
        }
    }
    let om = omega_triples(wps, &star);
    let mut s = sd;
    for (i, o) in om.iter().enumerate() {
        if *o {
            let nq = wps.num_states();
            let ng = wps.num_symbols();
            s.set(i / (ng * nq), (i / nq) % ng, i % nq, ExtWeight::Omega);
        }
    }
    Ok(s)
}

/// Strict decision by enumerating the simple cycles of the summary graph.
pub fn oracle_decide_strict(wps: &Wps) -> Result<bool, OracleError> {
    let s = oracle_full_summary(wps)?;
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    let n = nq * ng;
    // Best parallel edge per ordered vertex pair; None = ω.
    let mut best: BTreeMap<(usize, usize), Option<i128>> = BTreeMap::new();
    let mut put = |u: usize, v: usize, w: Option<i128>| {
        let e = best.entry((u, v)).or_insert(w);
        *e = match (*e, w) {
            (None, _) | (_, None) => None,
            (Some(a), Some(b)) => Some(a.max(b)),
        };
    };
    for ((a, g, b), v) in s.iter() {
        match v {
            ExtWeight::NegInfinity => {}
            ExtWeight::Omega => put(a * ng + g, b * ng + g, None),
            ExtWeight::Finite(x) => put(a * ng + g, b * ng + g, Some(small_weight(x)?)),
        }
    }
    for e in &wps.edges {
        if let StackCommand::Push(z) = e.command {
            put(e.from * ng + e.top, e.to * ng + z, Some(small_weight(&e.weight)?));
        }
    }
    let mut adj: Vec<Vec<(usize, Option<i128>)>> = alloc::vec![Vec::new(); n];
    for (&(u, v), &w) in &best {
        adj[u].push((v, w));
    }
    let mut reach = alloc::vec![false; n];
    let start = wps.initial * ng + wps.bottom;
    reach[start] = true;
    let mut stack = alloc::vec![start];
    while let Some(v) = stack.pop() {
        for &(u, _) in &adj[v] {
            if !reach[u] {
                reach[u] = true;
                stack.push(u);
            }
        }
    }
    // Simple cycles with least vertex `root`, by DFS over vertices > root.
    fn dfs(
        v: usize,
        root: usize,
        weight: i128,
        omega: bool,
        on: &mut Vec<bool>,
        adj: &[Vec<(usize, Option<i128>)>],
        reach: &[bool],
    ) -> bool {
        for &(u, w) in &adj[v] {
            let (nw, no) = match w {
                None => (weight, true),
                Some(x) => (weight + x, omega),
            };
            if u == root {
                if no || nw > 0 {
                    return true;
                }
            } else if u > root && reach[u] && !on[u] {
                on[u] = true;
                let found = dfs(u, root, nw, no, on, adj, reach);
                on[u] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    let mut on = alloc::vec![false; n];
    for root in 0..n {
        if reach[root] {
            on[root] = true;
            if dfs(root, root, 0, false, &mut on, &adj, &reach) {
                return Ok(true);
            }
            on[root] = false;
        }
    }
    Ok(false)
}

/// Non-strict decision by perturbation: weights `w·10^k + 1` for
/// `k = 1..=6`, answer taken once `k = 4, 5, 6` agree.
pub fn oracle_decide_nonstrict_sweep(wps: &Wps) -> Result<bool, OracleError> {
    let mut answers = Vec::new();
    for k in 1..=6u32 {
        let f = BigInt::from(10u32.pow(k));
        let perturbed = wps.map_weights(|w| w * &f + 1);
        answers.push(oracle_decide_strict(&perturbed)?);
    }
    if answers[3] == answers[4] && answers[4] == answers[5] {
        Ok(answers[5])
    } else {
        Err(OracleError::Unstable)
    }
}

/// Two edge-index ranges of a path that can be repeated in lockstep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpablePair {
    pub p1: Range<usize>,
    pub p2: Range<usize>,
}

/// Finds a pumpable pair in a path whose additional stack height is at
/// least `(|Q|·|Γ|)²`.
pub fn find_pumpable_pair(wps: &Wps, p: &Path) -> Result<PumpablePair, OracleError> {
    let need = usize::try_from(wps.ell() * wps.ell()).unwrap_or(usize::MAX);
    let configs = p.configs(wps)?;
    let h: Vec<usize> = configs.iter().map(Configuration::height).collect();
    let top = *h.iter().max().expect("paths have a configuration");
    let i_max = h.iter().position(|&x| x == top).expect("maximum exists");
    let lo = h[0].max(h[h.len() - 1]);
    let ash = top - lo;
    if ash < need {
        return Err(OracleError::PreconditionFailed { ash, need });
    }
    // Frontier configurations at each height k between lo and top: the last
    // one before the peak and the first one after it.
    let mut seen: BTreeMap<(State, Symbol, State), (usize, usize)> = BTreeMap::new();
    for k in lo..=top {
        let a = (0..=i_max).rev().find(|&i| h[i] == k).expect("heights change by at most one");
        let b = (i_max..h.len()).find(|&i| h[i] == k).expect("heights change by at most one");
        let class = (configs[a].state, configs[a].top().expect("nonempty"), configs[b].state);
        if let Some(&(a1, b1)) = seen.get(&class) {
            return Ok(PumpablePair { p1: a1..a, p2: b..b1 });
        }
        seen.insert(class, (a, b));
    }
    unreachable!("pigeonhole guarantees a repeated frontier class")
}

/// `prefix · p1^j · middle · p2^j · suffix`.
pub fn pump(p: &Path, pair: &PumpablePair, j: usize) -> Path {
    let e = &p.edges;
    let mut out = Vec::with_capacity(e.len() + (j.saturating_sub(1)) * (pair.p1.len() + pair.p2.len()));
    out.extend_from_slice(&e[..pair.p1.start]);
    for _ in 0..j {
        out.extend_from_slice(&e[pair.p1.clone()]);
    }
    out.extend_from_slice(&e[pair.p1.end..pair.p2.start]);
    for _ in 0..j {
        out.extend_from_slice(&e[pair.p2.clone()]);
    }
    out.extend_from_slice(&e[pair.p2.end..]);
    Path::new(p.start.clone(), out)
}

/// All configurations reachable from `from` with stack height at most
/// `cap`, by breadth-first search.
pub fn bounded_reachable(wps: &Wps, from: &Configuration, cap: usize) -> alloc::collections::BTreeSet<Configuration> {
    let mut seen = alloc::collections::BTreeSet::new();
    let mut queue = alloc::collections::VecDeque::new();
    seen.insert(from.clone());
    queue.push_back(from.clone());
    while let Some(c) = queue.pop_front() {
        for k in 0..wps.edges.len() {
            if let Ok(n) = step(wps, &c, k) {
                if n.height() <= cap && seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WpsBuilder;

    #[test]
    fn karp_sign() {
        assert!(karp_positive(&[0, 1], &[(0, 1, 2), (1, 0, -1)]));
        assert!(!karp_positive(&[0, 1], &[(0, 1, 1), (1, 0, -1)]));
        assert!(karp_positive(&[5], &[(5, 5, 1)]));
    }

    #[test]
    fn skip_loop_is_omega() {
        let mut b = WpsBuilder::new("⊥", "q");
        b.skip("q", "⊥", "q", 1);
        let s = oracle_bounded_summary(&b.build(), 0).unwrap();
        assert_eq!(s.get(0, 0, 0), &ExtWeight::Omega);
    }

    #[test]
    fn scc_of_two_cycles() {
        let adj = alloc::vec![alloc::vec![1], alloc::vec![0, 2], alloc::vec![3], alloc::vec![2]];
        let c = scc(4, &adj);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[2], c[3]);
        assert_ne!(c[0], c[2]);
    }
}
