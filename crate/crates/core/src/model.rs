//! Weighted pushdown systems, configurations and paths.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::reachability::{pre_star_automaton, ConfigAutomaton};

pub type State = usize;
pub type Symbol = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackCommand {
    Skip,
    Pop,
    Push(Symbol),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: State,
    pub top: Symbol,
    pub to: State,
    pub command: StackCommand,
    pub weight: BigInt,
}

/// A weighted pushdown system. States and symbols are dense indices; the
/// name tables are only used for printing and file formats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wps {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub bottom: Symbol,
    pub initial: State,
    pub edges: Vec<Edge>,
}

impl Wps {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    /// `W`, the largest absolute edge weight.
    pub fn max_abs_weight(&self) -> BigInt {
        self.edges.iter().map(|e| e.weight.abs()).max().unwrap_or_default()
    }

    /// `ℓ = |Q|·|Γ|`.
    pub fn ell(&self) -> u64 {
        (self.num_states() * self.num_symbols()) as u64
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration { stack: alloc::vec![self.bottom], state: self.initial }
    }

    pub fn state_id(&self, name: &str) -> Option<State> {
        self.states.iter().position(|s| s == name)
    }

    pub fn symbol_id(&self, name: &str) -> Option<Symbol> {
        self.alphabet.iter().position(|s| s == name)
    }

    /// Edge indices grouped by `(from, top)`.
    pub fn edges_by_head(&self) -> Vec<Vec<usize>> {
        let g = self.num_symbols();
        let mut out = alloc::vec![Vec::new(); self.num_states() * g];
        for (i, e) in self.edges.iter().enumerate() {
            if e.from < self.num_states() && e.top < g {
                out[e.from * g + e.top].push(i);
            }
        }
        out
    }

    /// Same system with every weight replaced by `f(weight)`.
    pub fn map_weights(&self, mut f: impl FnMut(&BigInt) -> BigInt) -> Wps {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.weight = f(&e.weight);
        }
        out
    }

    pub fn negated(&self) -> Wps {
        self.map_weights(|w| -w)
    }

    pub fn display_edge(&self, i: usize) -> String {
        let e = &self.edges[i];
        let cmd = match e.command {
            StackCommand::Skip => "skip".to_string(),
            StackCommand::Pop => "pop".to_string(),
            StackCommand::Push(z) => alloc::format!("push({})", self.alphabet[z]),
        };
        alloc::format!(
            "({},{},{},{},{})",
            self.states[e.from],
            self.alphabet[e.top],
            self.states[e.to],
            cmd,
            e.weight
        )
    }
}

/// Builds a [`Wps`] from names, interning states and symbols on first use.
#[derive(Clone, Debug)]
pub struct WpsBuilder {
    wps: Wps,
}

impl WpsBuilder {
    /// Starts a system whose bottom symbol is `bottom` and whose initial
    /// state is `initial`.
    pub fn new(bottom: &str, initial: &str) -> WpsBuilder {
        let mut b = WpsBuilder {
            wps: Wps {
                states: Vec::new(),
                alphabet: Vec::new(),
                bottom: 0,
                initial: 0,
                edges: Vec::new(),
            },
        };
        b.wps.bottom = b.symbol(bottom);
        b.wps.initial = b.state(initial);
        b
    }

    pub fn state(&mut self, name: &str) -> State {
        match self.wps.state_id(name) {
            Some(q) => q,
            None => {
                self.wps.states.push(name.to_string());
                self.wps.states.len() - 1
            }
        }
    }

    pub fn symbol(&mut self, name: &str) -> Symbol {
        match self.wps.symbol_id(name) {
            Some(z) => z,
            None => {
                self.wps.alphabet.push(name.to_string());
                self.wps.alphabet.len() - 1
            }
        }
    }

    pub fn skip(&mut self, from: &str, top: &str, to: &str, w: i64) -> usize {
        self.edge(from, top, to, Cmd::Skip, w)
    }

    pub fn pop(&mut self, from: &str, top: &str, to: &str, w: i64) -> usize {
        self.edge(from, top, to, Cmd::Pop, w)
    }

    pub fn push(&mut self, from: &str, top: &str, to: &str, z: &str, w: i64) -> usize {
        self.edge(from, top, to, Cmd::Push(z), w)
    }

    pub fn edge(&mut self, from: &str, top: &str, to: &str, cmd: Cmd<'_>, w: impl Into<BigInt>) -> usize {
        let from = self.state(from);
        let top = self.symbol(top);
        let to = self.state(to);
        let command = match cmd {
            Cmd::Skip => StackCommand::Skip,
            Cmd::Pop => StackCommand::Pop,
            Cmd::Push(z) => StackCommand::Push(self.symbol(z)),
        };
        self.wps.edges.push(Edge { from, top, to, command, weight: w.into() });
        self.wps.edges.len() - 1
    }

    pub fn build(self) -> Wps {
        self.wps
    }
}

/// Named stack command for [`WpsBuilder::edge`].
#[derive(Clone, Copy, Debug)]
pub enum Cmd<'a> {
    Skip,
    Pop,
    Push(&'a str),
}

/// `(α, q)` with `α` stored bottom-first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub stack: Vec<Symbol>,
    pub state: State,
}

impl Configuration {
    pub fn new(stack: Vec<Symbol>, state: State) -> Configuration {
        Configuration { stack, state }
    }

    pub fn top(&self) -> Option<Symbol> {
        self.stack.last().copied()
    }

    pub fn height(&self) -> usize {
        self.stack.len()
    }

    /// Whether this is a valid configuration of `wps` (bottom exactly at the base).
    pub fn is_valid_in(&self, wps: &Wps) -> bool {
        self.state < wps.num_states()
            && self.stack.first() == Some(&wps.bottom)
            && self.stack.iter().skip(1).all(|&z| z != wps.bottom && z < wps.num_symbols())
    }

    pub fn display(&self, wps: &Wps) -> String {
        let mut s = String::from("(");
        for &z in &self.stack {
            s.push_str(&wps.alphabet[z]);
        }
        s.push(',');
        s.push_str(&wps.states[self.state]);
        s.push(')');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("edge {edge} is not applicable at configuration index {at}")]
    NotApplicable { edge: usize, at: usize },
    #[error("edge index {0} out of range")]
    UnknownEdge(usize),
    #[error("path has no edges")]
    EmptyPath,
}

/// Applies edge `e` to `c`.
pub fn step(wps: &Wps, c: &Configuration, e: usize) -> Result<Configuration, ModelError> {
    let mut next = c.clone();
    apply_in_place(wps, &mut next, e, 0)?;
    Ok(next)
}

/// [`step`] without copying the stack; `at` is reported on failure.
pub fn apply_in_place(wps: &Wps, c: &mut Configuration, e: usize, at: usize) -> Result<(), ModelError> {
    let edge = wps.edges.get(e).ok_or(ModelError::UnknownEdge(e))?;
    if edge.from != c.state || c.top() != Some(edge.top) {
        return Err(ModelError::NotApplicable { edge: e, at });
    }
    match edge.command {
        StackCommand::Skip => {}
        StackCommand::Pop => {
            if c.stack.len() < 2 {
                return Err(ModelError::NotApplicable { edge: e, at });
            }
            c.stack.pop();
        }
        StackCommand::Push(z) => c.stack.push(z),
    }
    c.state = edge.to;
    Ok(())
}

/// A finite path: a start configuration and the edges fired from it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub start: Configuration,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn new(start: Configuration, edges: Vec<usize>) -> Path {
        Path { start, edges }
    }

    pub fn empty(start: Configuration) -> Path {
        Path { start, edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// All `|edges| + 1` configurations, or the first inapplicable edge.
    pub fn configs(&self, wps: &Wps) -> Result<Vec<Configuration>, ModelError> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        let mut c = self.start.clone();
        out.push(c.clone());
        for (i, &e) in self.edges.iter().enumerate() {
            apply_in_place(wps, &mut c, e, i)?;
            out.push(c.clone());
        }
        Ok(out)
    }

    /// Final configuration without materializing intermediate ones.
    pub fn end(&self, wps: &Wps) -> Result<Configuration, ModelError> {
        let mut c = self.start.clone();
        for (i, &e) in self.edges.iter().enumerate() {
            apply_in_place(wps, &mut c, e, i)?;
        }
        Ok(c)
    }

    /// Stack heights of all configurations.
    pub fn heights(&self, wps: &Wps) -> Result<Vec<usize>, ModelError> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        let mut c = self.start.clone();
        out.push(c.height());
        for (i, &e) in self.edges.iter().enumerate() {
            apply_in_place(wps, &mut c, e, i)?;
            out.push(c.height());
        }
        Ok(out)
    }

    pub fn weight(&self, wps: &Wps) -> BigInt {
        self.edges.iter().map(|&e| &wps.edges[e].weight).sum()
    }

    /// Concatenates `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &Path) {
        self.edges.extend_from_slice(&other.edges);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathMeasures {
    pub weight: BigInt,
    pub avg: BigRational,
    pub sh: usize,
    pub ash: usize,
}

pub fn path_measures(wps: &Wps, p: &Path) -> Result<PathMeasures, ModelError> {
    if p.is_empty() {
        return Err(ModelError::EmptyPath);
    }
    let heights = p.heights(wps)?;
    let weight = p.weight(wps);
    let sh = heights.iter().copied().max().unwrap_or(0);
    let ends = heights[0].max(heights[heights.len() - 1]);
    let avg = BigRational::new(weight.clone(), BigInt::from(p.len()));
    Ok(PathMeasures { weight, avg, sh, ash: sh - ends })
}

/// Indices `i` (0-based) such that the stack at `i` is a prefix of every
/// later stack in the path.
pub fn local_minima(wps: &Wps, p: &Path) -> Result<Vec<usize>, ModelError> {
    let heights = p.heights(wps)?;
    // stack(i) prefixes stack(j) for all j ≥ i iff no later height drops
    // below height(i): a stack can only lose its top by popping.
    let mut out = Vec::new();
    let mut suffix_min = usize::MAX;
    for i in (0..heights.len()).rev() {
        if heights[i] <= suffix_min {
            out.push(i);
        }
        suffix_min = suffix_min.min(heights[i]);
    }
    out.reverse();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadBottom,
    BadInitial,
    DanglingState { edge: usize },
    DanglingSymbol { edge: usize },
    PushOfBottom { edge: usize },
    PopOfBottom { edge: usize },
    DuplicateEdge { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadBottom => f.write_str("bottom symbol not in alphabet"),
            Violation::BadInitial => f.write_str("initial state not declared"),
            Violation::DanglingState { edge } => write!(f, "edge {edge}: undeclared state"),
            Violation::DanglingSymbol { edge } => write!(f, "edge {edge}: undeclared symbol"),
            Violation::PushOfBottom { edge } => write!(f, "edge {edge}: push of bottom"),
            Violation::PopOfBottom { edge } => write!(f, "edge {edge}: pop of bottom"),
            Violation::DuplicateEdge { first, second } => {
                write!(f, "edges {first} and {second} are identical")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// `(state, top)` pairs without outgoing edges that occur in some
    /// configuration reachable from the initial one.
    pub reachable_dead_ends: Vec<(State, Symbol)>,
}

impl ValidationReport {
    pub fn is_well_formed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_wps(wps: &Wps) -> ValidationReport {
    let mut report = ValidationReport::default();
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    if wps.bottom >= ng {
        report.violations.push(Violation::BadBottom);
    }
    if wps.initial >= nq {
        report.violations.push(Violation::BadInitial);
    }
    let mut seen: BTreeMap<(State, Symbol, State, StackCommand, &BigInt), usize> = BTreeMap::new();
    for (i, e) in wps.edges.iter().enumerate() {
        if e.from >= nq || e.to >= nq {
            report.violations.push(Violation::DanglingState { edge: i });
        }
        let pushed = match e.command {
            StackCommand::Push(z) => Some(z),
            _ => None,
        };
        if e.top >= ng || pushed.is_some_and(|z| z >= ng) {
            report.violations.push(Violation::DanglingSymbol { edge: i });
        }
        if pushed == Some(wps.bottom) {
            report.violations.push(Violation::PushOfBottom { edge: i });
        }
        if e.command == StackCommand::Pop && e.top == wps.bottom {
            report.violations.push(Violation::PopOfBottom { edge: i });
        }
        if let Some(&first) = seen.get(&(e.from, e.top, e.to, e.command, &e.weight)) {
            report.violations.push(Violation::DuplicateEdge { first, second: i });
        } else {
            seen.insert((e.from, e.top, e.to, e.command, &e.weight), i);
        }
    }
    if report.is_well_formed() {
        report.reachable_dead_ends = reachable_dead_ends(wps);
    }
    report
}

/// Dead-end `(state, top)` pairs that some reachable configuration exhibits.
pub fn reachable_dead_ends(wps: &Wps) -> Vec<(State, Symbol)> {
    let heads = wps.edges_by_head();
    let ng = wps.num_symbols();
    let mut out = Vec::new();
    for q in 0..wps.num_states() {
        for z in 0..ng {
            if !heads[q * ng + z].is_empty() {
                continue;
            }
            let target = ConfigAutomaton::top_is(wps, q, z);
            if pre_star_automaton(wps, &target).accepts(&wps.initial_config()) {
                out.push((q, z));
            }
        }
    }
    out
}
