//! Weighted recursive game graphs (modules, boxes, entries, exits) and their
//! translation to weighted pushdown systems.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::model::{Configuration, Edge, Path, StackCommand, State, Symbol, Wps};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub module: usize,
    pub owner: Player,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsmBox {
    pub name: String,
    pub module: usize,
    pub callee: usize,
    pub owner: Player,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsmModule {
    pub name: String,
    pub nodes: Vec<usize>,
    pub boxes: Vec<usize>,
    pub entries: Vec<usize>,
    pub exits: Vec<usize>,
}

/// Where a transition leaves from: a node, or a return `(b, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Position {
    Node(usize),
    Return { boxed: usize, exit: usize },
}

/// Where a transition leads: a node, or a call `(b, e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Node(usize),
    Call { boxed: usize, entry: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub module: usize,
    pub source: Position,
    pub target: Target,
    pub weight: BigInt,
}

/// Nodes and boxes are global (disjoint across modules); each records its module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wrg {
    pub nodes: Vec<Node>,
    pub boxes: Vec<RsmBox>,
    pub modules: Vec<RsmModule>,
    pub transitions: Vec<Transition>,
    pub initial_module: usize,
    pub initial_entry: usize,
}

/// Per player-1 position, the index of the chosen transition among the
/// position's outgoing transitions (in transition order).
pub type ModularStrategy = BTreeMap<Position, usize>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RsmError {
    #[error("strategy is invalid at {0}")]
    InvalidStrategy(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("duplicate {kind} name `{name}`")]
    Duplicate { kind: &'static str, name: String },
}

impl Wrg {
    pub fn owner(&self, p: Position) -> Player {
        match p {
            Position::Node(n) => self.nodes[n].owner,
            Position::Return { boxed, .. } => self.boxes[boxed].owner,
        }
    }

    pub fn module_of(&self, p: Position) -> usize {
        match p {
            Position::Node(n) => self.nodes[n].module,
            Position::Return { boxed, .. } => self.boxes[boxed].module,
        }
    }

    /// Outgoing transitions of every position, in transition order.
    pub fn outgoing(&self) -> BTreeMap<Position, Vec<usize>> {
        let mut out: BTreeMap<Position, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            out.entry(t.source).or_default().push(i);
        }
        out
    }

    /// All positions in canonical order: by module, then the module's nodes,
    /// then its returns (box order, then exit order).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        for m in &self.modules {
            out.extend(m.nodes.iter().map(|&n| Position::Node(n)));
            for &b in &m.boxes {
                for &x in &self.modules[self.boxes[b].callee].exits {
                    out.push(Position::Return { boxed: b, exit: x });
                }
            }
        }
        out
    }

    /// Player-1 positions that have at least one outgoing transition, in
    /// canonical order, with their outgoing transitions.
    pub fn choice_points(&self) -> Vec<(Position, Vec<usize>)> {
        let out = self.outgoing();
        self.positions()
            .into_iter()
            .filter(|&p| self.owner(p) == Player::One)
            .filter_map(|p| out.get(&p).map(|ts| (p, ts.clone())))
            .collect()
    }

    pub fn position_name(&self, p: Position) -> String {
        match p {
            Position::Node(n) => self.nodes[n].name.clone(),
            Position::Return { boxed, exit } => {
                alloc::format!("({},{})", self.boxes[boxed].name, self.nodes[exit].name)
            }
        }
    }

    pub fn node_id(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn box_id(&self, name: &str) -> Option<usize> {
        self.boxes.iter().position(|b| b.name == name)
    }

    pub fn module_id(&self, name: &str) -> Option<usize> {
        self.modules.iter().position(|m| m.name == name)
    }

    pub fn is_single_entry(&self) -> Result<(), usize> {
        match self.modules.iter().position(|m| m.entries.len() != 1) {
            Some(i) => Err(i),
            None => Ok(()),
        }
    }

    /// Number of memoryless modular strategies (saturating).
    pub fn strategy_space_size(&self) -> u128 {
        self.choice_points().iter().fold(1u128, |acc, (_, ts)| acc.saturating_mul(ts.len() as u128))
    }
}

/// Incremental construction by name.
#[derive(Clone, Debug)]
pub struct WrgBuilder {
    wrg: Wrg,
}

impl Default for WrgBuilder {
    fn default() -> Self {
        WrgBuilder::new()
    }
}

impl WrgBuilder {
    pub fn new() -> WrgBuilder {
        WrgBuilder {
            wrg: Wrg {
                nodes: Vec::new(),
                boxes: Vec::new(),
                modules: Vec::new(),
                transitions: Vec::new(),
                initial_module: 0,
                initial_entry: 0,
            },
        }
    }

    pub fn module(&mut self, name: &str) -> usize {
        self.wrg.modules.push(RsmModule {
            name: name.to_string(),
            nodes: Vec::new(),
            boxes: Vec::new(),
            entries: Vec::new(),
            exits: Vec::new(),
        });
        self.wrg.modules.len() - 1
    }

    pub fn node(&mut self, module: usize, name: &str, owner: Player) -> usize {
        self.wrg.nodes.push(Node { name: name.to_string(), module, owner });
        let id = self.wrg.nodes.len() - 1;
        self.wrg.modules[module].nodes.push(id);
        id
    }

    pub fn entry(&mut self, module: usize, name: &str, owner: Player) -> usize {
        let n = self.node(module, name, owner);
        self.wrg.modules[module].entries.push(n);
        n
    }

    pub fn exit(&mut self, module: usize, name: &str, owner: Player) -> usize {
        let n = self.node(module, name, owner);
        self.wrg.modules[module].exits.push(n);
        n
    }

    pub fn boxed(&mut self, module: usize, name: &str, callee: usize, owner: Player) -> usize {
        self.wrg.boxes.push(RsmBox { name: name.to_string(), module, callee, owner });
        let id = self.wrg.boxes.len() - 1;
        self.wrg.modules[module].boxes.push(id);
        id
    }

    pub fn transition(&mut self, source: Position, target: Target, weight: impl Into<BigInt>) -> usize {
        let module = match source {
            Position::Node(n) => self.wrg.nodes[n].module,
            Position::Return { boxed, .. } => self.wrg.boxes[boxed].module,
        };
        self.wrg.transitions.push(Transition { module, source, target, weight: weight.into() });
        self.wrg.transitions.len() - 1
    }

    pub fn initial(&mut self, module: usize, entry: usize) {
        self.wrg.initial_module = module;
        self.wrg.initial_entry = entry;
    }

    pub fn build(self) -> Wrg {
        self.wrg
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WrgViolation {
    NoEntries { module: String },
    NoExits { module: String },
    ForeignEntryOrExit { module: String, node: String },
    BadCallee { boxed: String },
    BadSource { transition: usize },
    BadTarget { transition: usize },
    CrossModule { transition: usize },
    BadInitial,
    DuplicateName { name: String },
}

impl fmt::Display for WrgViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WrgViolation::NoEntries { module } => write!(f, "module {module} has no entry nodes"),
            WrgViolation::NoExits { module } => write!(f, "module {module} has no exit nodes"),
            WrgViolation::ForeignEntryOrExit { module, node } => {
                write!(f, "entry/exit {node} does not belong to module {module}")
            }
            WrgViolation::BadCallee { boxed } => write!(f, "box {boxed} is labeled with a missing module"),
            WrgViolation::BadSource { transition } => {
                write!(f, "transition {transition} leaves from a missing node or a non-exit return")
            }
            WrgViolation::BadTarget { transition } => {
                write!(f, "transition {transition} leads to a missing node or a call to a non-entry")
            }
            WrgViolation::CrossModule { transition } => write!(f, "transition {transition} crosses modules"),
            WrgViolation::BadInitial => f.write_str("initial node is not an entry of the initial module"),
            WrgViolation::DuplicateName { name } => write!(f, "name {name} is used twice"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WrgReport {
    pub violations: Vec<WrgViolation>,
    /// Reachable positions without successors (finite plays end there).
    pub dead_ends: Vec<Position>,
}

impl WrgReport {
    pub fn is_well_formed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_wrg(wrg: &Wrg) -> WrgReport {
    let mut v = Vec::new();
    let mut names = BTreeSet::new();
    for n in wrg.nodes.iter().map(|n| &n.name).chain(wrg.boxes.iter().map(|b| &b.name)) {
        if !names.insert(n.clone()) || n == BOTTOM {
            v.push(WrgViolation::DuplicateName { name: n.clone() });
        }
    }
    for (mi, m) in wrg.modules.iter().enumerate() {
        if m.entries.is_empty() {
            v.push(WrgViolation::NoEntries { module: m.name.clone() });
        }
        if m.exits.is_empty() {
            v.push(WrgViolation::NoExits { module: m.name.clone() });
        }
        for &n in m.entries.iter().chain(&m.exits) {
            if wrg.nodes.get(n).is_none_or(|x| x.module != mi) {
                v.push(WrgViolation::ForeignEntryOrExit { module: m.name.clone(), node: alloc::format!("#{n}") });
            }
        }
    }
    for b in &wrg.boxes {
        if b.callee >= wrg.modules.len() {
            v.push(WrgViolation::BadCallee { boxed: b.name.clone() });
        }
    }
    let callee = |b: usize| wrg.boxes.get(b).and_then(|x| wrg.modules.get(x.callee));
    for (i, t) in wrg.transitions.iter().enumerate() {
        let src_module = match t.source {
            Position::Node(n) => wrg.nodes.get(n).map(|x| x.module),
            Position::Return { boxed, exit } => match callee(boxed) {
                Some(m) if m.exits.contains(&exit) => Some(wrg.boxes[boxed].module),
                _ => None,
            },
        };
        let dst_module = match t.target {
            Target::Node(n) => wrg.nodes.get(n).map(|x| x.module),
            Target::Call { boxed, entry } => match callee(boxed) {
                Some(m) if m.entries.contains(&entry) => Some(wrg.boxes[boxed].module),
                _ => None,
            },
        };
        match (src_module, dst_module) {
            (None, _) => v.push(WrgViolation::BadSource { transition: i }),
            (_, None) => v.push(WrgViolation::BadTarget { transition: i }),
            (Some(a), Some(b)) if a != b || a != t.module => v.push(WrgViolation::CrossModule { transition: i }),
            _ => {}
        }
    }
    if wrg.modules.get(wrg.initial_module).is_none_or(|m| !m.entries.contains(&wrg.initial_entry)) {
        v.push(WrgViolation::BadInitial);
    }
    let dead_ends = if v.is_empty() { reachable_dead_positions(wrg) } else { Vec::new() };
    WrgReport { violations: v, dead_ends }
}

/// Reachable positions without successors.
fn reachable_dead_positions(wrg: &Wrg) -> Vec<Position> {
    let t = PositionTable::new(wrg);
    let seen = t.reachable_in(wrg, |_| None);
    (0..t.len()).filter(|&i| seen[i] && t.out[i].is_empty()).map(|i| t.positions[i]).collect()
}

/// Positions reachable from the initial entry. `pick(p)` restricts `p` to
/// its `k`-th outgoing transition when it returns `Some(k)`.
pub fn reachable_positions(wrg: &Wrg, pick: impl Fn(Position) -> Option<usize>) -> BTreeSet<Position> {
    let t = PositionTable::new(wrg);
    let seen = t.reachable_in(wrg, |i| pick(t.positions[i]));
    (0..t.len()).filter(|&i| seen[i]).map(|i| t.positions[i]).collect()
}

/// Dense ids for positions: nodes first (id = node id), then returns.
#[derive(Clone, Debug)]
pub struct PositionTable {
    pub positions: Vec<Position>,
    /// Outgoing transitions per id, in transition order.
    pub out: Vec<Vec<usize>>,
    ret_base: Vec<usize>,
    callers: Vec<Vec<usize>>,
    exit_of: Vec<Option<usize>>,
    initial: usize,
}

impl PositionTable {
    pub fn new(wrg: &Wrg) -> PositionTable {
        let mut positions: Vec<Position> = (0..wrg.nodes.len()).map(Position::Node).collect();
        let mut ret_base = Vec::with_capacity(wrg.boxes.len());
        let mut callers = alloc::vec![Vec::new(); wrg.modules.len()];
        for (b, bx) in wrg.boxes.iter().enumerate() {
            ret_base.push(positions.len());
            callers[bx.callee].push(b);
            positions.extend(wrg.modules[bx.callee].exits.iter().map(|&x| Position::Return { boxed: b, exit: x }));
        }
        let mut exit_of = alloc::vec![None; wrg.nodes.len()];
        for m in &wrg.modules {
            for (k, &x) in m.exits.iter().enumerate() {
                exit_of[x] = Some(k);
            }
        }
        let mut t = PositionTable { positions, out: Vec::new(), ret_base, callers, exit_of, initial: wrg.initial_entry };
        t.out = alloc::vec![Vec::new(); t.positions.len()];
        for (i, tr) in wrg.transitions.iter().enumerate() {
            let id = t.id(tr.source);
            t.out[id].push(i);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn id(&self, p: Position) -> usize {
        match p {
            Position::Node(n) => n,
            Position::Return { boxed, exit } => {
                self.ret_base[boxed] + self.exit_of[exit].expect("returns name exits")
            }
        }
    }

    /// Index of `x` among its module's exits, if it is an exit.
    pub fn exit_index(&self, x: usize) -> Option<usize> {
        self.exit_of[x]
    }

    pub fn return_id(&self, boxed: usize, exit_index: usize) -> usize {
        self.ret_base[boxed] + exit_index
    }

    /// Reachable ids (module-level fixpoint, exact for single-entry
    /// modules). `pick(id) = Some(k)` allows only the `k`-th transition.
    pub fn reachable_in(&self, wrg: &Wrg, pick: impl Fn(usize) -> Option<usize>) -> Vec<bool> {
        let mut seen = alloc::vec![false; self.len()];
        let mut exits_reached: Vec<Vec<usize>> = alloc::vec![Vec::new(); wrg.modules.len()];
        let mut called = alloc::vec![false; wrg.boxes.len()];
        let mut work = alloc::vec![self.initial];
        seen[self.initial] = true;
        let mut visit = |i: usize, work: &mut Vec<usize>| {
            if !seen[i] {
                seen[i] = true;
                work.push(i);
            }
        };
        while let Some(i) = work.pop() {
            if i < wrg.nodes.len() {
                if let Some(k) = self.exit_of[i] {
                    let m = wrg.nodes[i].module;
                    exits_reached[m].push(k);
                    for &b in &self.callers[m] {
                        if called[b] {
                            visit(self.ret_base[b] + k, &mut work);
                        }
                    }
                }
            }
            let ts = &self.out[i];
            let chosen = match pick(i) {
                Some(k) => &ts[k..=k],
                None => &ts[..],
            };
            for &t in chosen {
                match wrg.transitions[t].target {
                    Target::Node(v) => visit(v, &mut work),
                    Target::Call { boxed, entry } => {
                        visit(entry, &mut work);
                        if !called[boxed] {
                            called[boxed] = true;
                            for &k in &exits_reached[wrg.boxes[boxed].callee] {
                                visit(self.ret_base[boxed] + k, &mut work);
                            }
                        }
                    }
                }
            }
        }
        seen
    }
}

/// Restricts every player-1 position to its chosen transition; the result
/// has only player-2 places.
pub fn apply_strategy(wrg: &Wrg, sigma: &ModularStrategy) -> Result<Wrg, RsmError> {
    let out = wrg.outgoing();
    for (&p, &c) in sigma {
        let ok = wrg.owner(p) == Player::One && out.get(&p).is_some_and(|ts| c < ts.len());
        if !ok {
            return Err(RsmError::InvalidStrategy(wrg.position_name(p)));
        }
    }
    let mut keep = alloc::vec![true; wrg.transitions.len()];
    for (p, ts) in &out {
        if wrg.owner(*p) != Player::One {
            continue;
        }
        let c = *sigma.get(p).ok_or_else(|| RsmError::InvalidStrategy(wrg.position_name(*p)))?;
        for (k, &t) in ts.iter().enumerate() {
            keep[t] = k == c;
        }
    }
    let mut res = wrg.clone();
    res.transitions = wrg.transitions.iter().zip(&keep).filter(|(_, &k)| k).map(|(t, _)| t.clone()).collect();
    for n in &mut res.nodes {
        n.owner = Player::Two;
    }
    for b in &mut res.boxes {
        b.owner = Player::Two;
    }
    Ok(res)
}

pub const BOTTOM: &str = "⊥";

/// How the pushdown system relates to the graph it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WpsMap {
    /// Control state of each node.
    pub node_state: Vec<State>,
    /// Stack symbol of each box.
    pub box_symbol: Vec<Symbol>,
    /// Graph transition behind each system edge.
    pub edge_transition: Vec<usize>,
    /// Node behind each control state; `None` for bridge states.
    pub state_node: Vec<Option<usize>>,
}

impl WpsMap {
    /// `(b1…br, u)` ↦ `(⊥b1…br, u)`.
    pub fn config(&self, boxes: &[usize], node: usize) -> Configuration {
        let mut stack = alloc::vec![0];
        stack.extend(boxes.iter().map(|&b| self.box_symbol[b]));
        Configuration::new(stack, self.node_state[node])
    }
}

/// The pushdown system with nodes as states and boxes (plus `⊥`) as stack
/// symbols. Internal moves and calls can fire under any top; returns pop
/// the box. A return leading directly into a call goes through a fresh
/// bridge state.
pub fn to_wps(wrg: &Wrg) -> (Wps, WpsMap) {
    let mut alphabet = alloc::vec![BOTTOM.to_string()];
    alphabet.extend(wrg.boxes.iter().map(|b| b.name.clone()));
    let ng = alphabet.len();
    let mut states: Vec<String> = wrg.nodes.iter().map(|n| n.name.clone()).collect();
    let mut state_node: Vec<Option<usize>> = (0..wrg.nodes.len()).map(Some).collect();
    let box_symbol: Vec<Symbol> = (1..=wrg.boxes.len()).collect();
    let mut edges = Vec::new();
    let mut edge_transition = Vec::new();
    let mut push = |e: Edge, t: usize, edges: &mut Vec<Edge>| {
        edges.push(e);
        edge_transition.push(t);
    };
    for (i, t) in wrg.transitions.iter().enumerate() {
        match (t.source, t.target) {
            (Position::Node(u), Target::Node(v)) => {
                for z in 0..ng {
                    push(Edge { from: u, top: z, to: v, command: StackCommand::Skip, weight: t.weight.clone() }, i, &mut edges);
                }
            }
            (Position::Node(u), Target::Call { boxed, entry }) => {
                for z in 0..ng {
                    let e = Edge { from: u, top: z, to: entry, command: StackCommand::Push(box_symbol[boxed]), weight: t.weight.clone() };
                    push(e, i, &mut edges);
                }
            }
            (Position::Return { boxed, exit }, Target::Node(v)) => {
                let e = Edge { from: exit, top: box_symbol[boxed], to: v, command: StackCommand::Pop, weight: t.weight.clone() };
                push(e, i, &mut edges);
            }
            (Position::Return { boxed, exit }, Target::Call { boxed: b2, entry }) => {
                let bridge = states.len();
                states.push(alloc::format!("{}~{}", wrg.position_name(t.source), i));
                state_node.push(None);
                let e = Edge { from: exit, top: box_symbol[boxed], to: bridge, command: StackCommand::Pop, weight: t.weight.clone() };
                push(e, i, &mut edges);
                for z in 0..ng {
                    let e = Edge { from: bridge, top: z, to: entry, command: StackCommand::Push(box_symbol[b2]), weight: BigInt::default() };
                    push(e, i, &mut edges);
                }
            }
        }
    }
    let wps = Wps { states, alphabet, bottom: 0, initial: wrg.initial_entry, edges };
    let node_state = (0..wrg.nodes.len()).collect();
    (wps, WpsMap { node_state, box_symbol, edge_transition, state_node })
}

/// Nodes of the current invocation frame: the configurations at the final
/// stack height since the stack was last below it.
pub fn local_history(wps: &Wps, map: &WpsMap, path: &Path) -> Result<Vec<usize>, crate::model::ModelError> {
    let configs = path.configs(wps)?;
    let h = configs.last().expect("paths have a configuration").height();
    let start = configs.iter().rposition(|c| c.height() < h).map_or(0, |i| i + 1);
    Ok(configs[start..]
        .iter()
        .filter(|c| c.height() == h)
        .filter_map(|c| map.state_node.get(c.state).copied().flatten())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_modules() -> Wrg {
        let mut b = WrgBuilder::new();
        let main = b.module("main");
        let sub = b.module("sub");
        let e = b.entry(main, "e", Player::Two);
        let u = b.node(main, "u", Player::Two);
        let x = b.exit(main, "x", Player::Two);
        let se = b.entry(sub, "se", Player::Two);
        let sx = b.exit(sub, "sx", Player::Two);
        let bx = b.boxed(main, "b", sub, Player::Two);
        b.transition(Position::Node(e), Target::Call { boxed: bx, entry: se }, 1);
        b.transition(Position::Node(se), Target::Node(sx), 2);
        b.transition(Position::Return { boxed: bx, exit: sx }, Target::Node(u), 3);
        b.transition(Position::Node(u), Target::Node(e), 0);
        let _ = x;
        b.initial(main, e);
        b.build()
    }

    #[test]
    fn translation_counts() {
        let w = two_modules();
        let (wps, map) = to_wps(&w);
        assert_eq!(wps.num_states(), 5);
        assert_eq!(wps.num_symbols(), 2);
        assert_eq!(map.edge_transition.len(), wps.edges.len());
    }

    #[test]
    fn call_and_return_history() {
        let w = two_modules();
        let (wps, map) = to_wps(&w);
        // e --call--> se --> sx --return--> u
        let find = |from: &str, top: usize| {
            let q = wps.state_id(from).unwrap();
            wps.edges.iter().position(|e| e.from == q && e.top == top).unwrap()
        };
        let b = map.box_symbol[0];
        let p = Path::new(wps.initial_config(), alloc::vec![find("e", 0), find("se", b), find("sx", b)]);
        let h = local_history(&wps, &map, &p).unwrap();
        assert_eq!(h, alloc::vec![w.node_id("e").unwrap(), w.node_id("u").unwrap()]);
        let inside = Path::new(wps.initial_config(), alloc::vec![find("e", 0), find("se", b)]);
        assert_eq!(local_history(&wps, &map, &inside).unwrap(), alloc::vec![w.node_id("se").unwrap(), w.node_id("sx").unwrap()]);
        assert_eq!(p.weight(&wps), BigInt::from(6));
    }

    #[test]
    fn validation_flags_missing_exit() {
        let mut b = WrgBuilder::new();
        let m = b.module("m");
        let e = b.entry(m, "e", Player::One);
        b.initial(m, e);
        let r = validate_wrg(&b.build());
        assert_eq!(r.violations, alloc::vec![WrgViolation::NoExits { module: "m".into() }]);
    }
}
