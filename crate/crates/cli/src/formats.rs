//! JSON documents for systems, graphs, automata and strategies. Every
//! document carries `"version": "v1"` and a `kind`; weights are decimal
//! strings (plain JSON integers are accepted on input).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use pushmean_core::decide::Lasso;
use pushmean_core::games::Wpg;
use pushmean_core::model::{validate_wps, Edge, StackCommand, Wps};
use pushmean_core::reductions::{GadgetTag, Wfa, WfaGame, WfaTransition};
use pushmean_core::rsm::{validate_wrg, ModularStrategy, Player, Position, Target, Wrg, WrgBuilder};

use crate::{input_err, CliError};

pub const VERSION: &str = "v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight(pub BigInt);

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Weight, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(i) => Ok(Weight(i.into())),
            Repr::Text(s) => {
                s.trim().parse().map(Weight).map_err(|_| D::Error::custom(format!("weight `{s}` is not an integer")))
            }
        }
    }
}

#[derive(Deserialize)]
struct Header {
    version: Option<String>,
    kind: Option<String>,
}

/// Parses `text` as a document of one of `kinds`; returns the kind found.
pub fn read_doc<T: DeserializeOwned>(text: &str, origin: &str, kinds: &[&str]) -> Result<(T, String), CliError> {
    let h: Header = serde_json::from_str(text).map_err(|e| input_err(format!("{origin}: {e}")))?;
    match h.version.as_deref() {
        Some(VERSION) => {}
        Some(v) => return Err(input_err(format!("{origin}: unsupported version `{v}` (expected `{VERSION}`)"))),
        None => return Err(input_err(format!("{origin}: missing `version` field"))),
    }
    let kind = h.kind.ok_or_else(|| input_err(format!("{origin}: missing `kind` field")))?;
    if !kinds.contains(&kind.as_str()) {
        return Err(input_err(format!("{origin}: expected a {} document, found `{kind}`", kinds.join(" or "))));
    }
    let doc = serde_json::from_str(text).map_err(|e| input_err(format!("{origin}: {e}")))?;
    Ok((doc, kind))
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn is_one(p: &u8) -> bool {
    *p == 1
}

fn one() -> u8 {
    1
}

fn player(p: u8, what: &str) -> Result<Player, CliError> {
    match p {
        1 => Ok(Player::One),
        2 => Ok(Player::Two),
        _ => Err(input_err(format!("{what}: player must be 1 or 2, got {p}"))),
    }
}

fn player_num(p: Player) -> u8 {
    match p {
        Player::One => 1,
        Player::Two => 2,
    }
}

fn index_of(names: &[String], what: &str) -> Result<BTreeMap<String, usize>, CliError> {
    let mut map = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            return Err(input_err(format!("{what} `{n}` is declared twice")));
        }
    }
    Ok(map)
}

fn lookup(map: &BTreeMap<String, usize>, name: &str, what: &str, ctx: &str) -> Result<usize, CliError> {
    map.get(name).copied().ok_or_else(|| input_err(format!("{ctx}: unknown {what} `{name}`")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Skip,
    Pop,
    Push,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: String,
    pub top: String,
    pub to: String,
    pub op: Op,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    pub weight: Weight,
    /// Role of the edge in a generated game; informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gadget: Option<String>,
}

/// A pushdown system (`kind: "wps"`) or game (`kind: "wpg"`, where the
/// states listed in `player2` belong to player 2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WpsDoc {
    pub version: String,
    pub kind: String,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub bottom: String,
    pub initial: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub player2: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

impl WpsDoc {
    pub fn to_wps(&self) -> Result<Wps, CliError> {
        let states = index_of(&self.states, "state")?;
        let symbols = index_of(&self.alphabet, "symbol")?;
        let bottom = lookup(&symbols, &self.bottom, "symbol", "bottom")?;
        let initial = lookup(&states, &self.initial, "state", "initial")?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let ctx = format!("edge {i}");
            let command = match (e.op, &e.symbol) {
                (Op::Skip, None) => StackCommand::Skip,
                (Op::Pop, None) => StackCommand::Pop,
                (Op::Push, Some(z)) => StackCommand::Push(lookup(&symbols, z, "symbol", &ctx)?),
                (Op::Push, None) => return Err(input_err(format!("{ctx}: push needs a `symbol`"))),
                (_, Some(_)) => return Err(input_err(format!("{ctx}: only push edges take a `symbol`"))),
            };
            edges.push(Edge {
                from: lookup(&states, &e.from, "state", &ctx)?,
                top: lookup(&symbols, &e.top, "symbol", &ctx)?,
                to: lookup(&states, &e.to, "state", &ctx)?,
                command,
                weight: e.weight.0.clone(),
            });
        }
        let wps = Wps { states: self.states.clone(), alphabet: self.alphabet.clone(), bottom, initial, edges };
        let report = validate_wps(&wps);
        if !report.is_well_formed() {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(input_err(format!("malformed system: {}", msgs.join("; "))));
        }
        Ok(wps)
    }

    pub fn to_wpg(&self) -> Result<Wpg, CliError> {
        let wps = self.to_wps()?;
        let states = index_of(&self.states, "state")?;
        let mut owner = vec![Player::One; wps.num_states()];
        for s in &self.player2 {
            owner[lookup(&states, s, "state", "player2")?] = Player::Two;
        }
        Ok(Wpg { wps, owner })
    }

    pub fn from_wps(wps: &Wps) -> WpsDoc {
        let edges = wps
            .edges
            .iter()
            .map(|e| {
                let (op, symbol) = match e.command {
                    StackCommand::Skip => (Op::Skip, None),
                    StackCommand::Pop => (Op::Pop, None),
                    StackCommand::Push(z) => (Op::Push, Some(wps.alphabet[z].clone())),
                };
                EdgeDoc {
                    from: wps.states[e.from].clone(),
                    top: wps.alphabet[e.top].clone(),
                    to: wps.states[e.to].clone(),
                    op,
                    symbol,
                    weight: Weight(e.weight.clone()),
                    gadget: None,
                }
            })
            .collect();
        WpsDoc {
            version: VERSION.into(),
            kind: "wps".into(),
            states: wps.states.clone(),
            alphabet: wps.alphabet.clone(),
            bottom: wps.alphabet[wps.bottom].clone(),
            initial: wps.states[wps.initial].clone(),
            player2: Vec::new(),
            edges,
        }
    }

    pub fn from_wpg(g: &Wpg) -> WpsDoc {
        let mut doc = WpsDoc::from_wps(&g.wps);
        doc.kind = "wpg".into();
        doc.player2 = g.states_of(Player::Two).into_iter().map(|q| g.wps.states[q].clone()).collect();
        doc
    }

    pub fn from_wfa_game(g: &WfaGame) -> WpsDoc {
        let mut doc = WpsDoc::from_wpg(&g.game);
        for (e, &t) in doc.edges.iter_mut().zip(&g.tags) {
            e.gadget = Some(gadget_name(t));
        }
        doc
    }
}

pub fn gadget_name(t: GadgetTag) -> String {
    match t {
        GadgetTag::DollarLoop => "dollar-loop".into(),
        GadgetTag::DollarToLetters => "dollar-to-letters".into(),
        GadgetTag::LetterPush(i) => format!("letter-push:{i}"),
        GadgetTag::LettersToChoice => "letters-to-choice".into(),
        GadgetTag::ChoiceToShort => "choice-to-short".into(),
        GadgetTag::ChoiceToRun => "choice-to-run".into(),
        GadgetTag::ShortPopLetter => "short-pop-letter".into(),
        GadgetTag::ShortPopDollar => "short-pop-dollar".into(),
        GadgetTag::ShortRestart => "short-restart".into(),
        GadgetTag::RunPop(i) => format!("run-pop:{i}"),
        GadgetTag::RunPopDollar => "run-pop-dollar".into(),
        GadgetTag::RunRestart => "run-restart".into(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Entry,
    Exit,
    #[default]
    Inner,
}

fn is_inner(r: &Role) -> bool {
    *r == Role::Inner
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub name: String,
    pub module: String,
    #[serde(default, skip_serializing_if = "is_inner")]
    pub role: Role,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub player: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDoc {
    pub name: String,
    pub module: String,
    pub callee: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub player: u8,
}

/// A node name, or a return `{"box": b, "exit": x}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PositionDoc {
    Node(String),
    Return {
        #[serde(rename = "box")]
        boxed: String,
        exit: String,
    },
}

/// A node name, or a call `{"box": b, "entry": e}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetDoc {
    Node(String),
    Call {
        #[serde(rename = "box")]
        boxed: String,
        entry: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: PositionDoc,
    pub to: TargetDoc,
    pub weight: Weight,
}

/// A recursive game graph. Node and box lists are global and ordered;
/// a module's entries and exits are its nodes with that role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrgDoc {
    pub version: String,
    pub kind: String,
    pub modules: Vec<String>,
    pub nodes: Vec<NodeDoc>,
    pub boxes: Vec<BoxDoc>,
    pub transitions: Vec<TransitionDoc>,
    pub initial: String,
}

struct WrgNames {
    nodes: BTreeMap<String, usize>,
    boxes: BTreeMap<String, usize>,
}

impl WrgNames {
    fn of(wrg: &Wrg) -> WrgNames {
        WrgNames {
            nodes: wrg.nodes.iter().enumerate().map(|(i, n)| (n.name.clone(), i)).collect(),
            boxes: wrg.boxes.iter().enumerate().map(|(i, b)| (b.name.clone(), i)).collect(),
        }
    }

    fn position(&self, p: &PositionDoc, ctx: &str) -> Result<Position, CliError> {
        Ok(match p {
            PositionDoc::Node(n) => Position::Node(lookup(&self.nodes, n, "node", ctx)?),
            PositionDoc::Return { boxed, exit } => Position::Return {
                boxed: lookup(&self.boxes, boxed, "box", ctx)?,
                exit: lookup(&self.nodes, exit, "node", ctx)?,
            },
        })
    }

    fn target(&self, t: &TargetDoc, ctx: &str) -> Result<Target, CliError> {
        Ok(match t {
            TargetDoc::Node(n) => Target::Node(lookup(&self.nodes, n, "node", ctx)?),
            TargetDoc::Call { boxed, entry } => Target::Call {
                boxed: lookup(&self.boxes, boxed, "box", ctx)?,
                entry: lookup(&self.nodes, entry, "node", ctx)?,
            },
        })
    }
}

pub fn position_doc(wrg: &Wrg, p: Position) -> PositionDoc {
    match p {
        Position::Node(n) => PositionDoc::Node(wrg.nodes[n].name.clone()),
        Position::Return { boxed, exit } => {
            PositionDoc::Return { boxed: wrg.boxes[boxed].name.clone(), exit: wrg.nodes[exit].name.clone() }
        }
    }
}

impl WrgDoc {
    pub fn to_wrg(&self) -> Result<Wrg, CliError> {
        let modules = index_of(&self.modules, "module")?;
        index_of(&self.nodes.iter().map(|n| n.name.clone()).collect::<Vec<_>>(), "node")?;
        index_of(&self.boxes.iter().map(|b| b.name.clone()).collect::<Vec<_>>(), "box")?;
        let mut b = WrgBuilder::new();
        for m in &self.modules {
            b.module(m);
        }
        for n in &self.nodes {
            let ctx = format!("node `{}`", n.name);
            let m = lookup(&modules, &n.module, "module", &ctx)?;
            let owner = player(n.player, &ctx)?;
            match n.role {
                Role::Entry => b.entry(m, &n.name, owner),
                Role::Exit => b.exit(m, &n.name, owner),
                Role::Inner => b.node(m, &n.name, owner),
            };
        }
        for x in &self.boxes {
            let ctx = format!("box `{}`", x.name);
            let m = lookup(&modules, &x.module, "module", &ctx)?;
            let callee = lookup(&modules, &x.callee, "module", &ctx)?;
            b.boxed(m, &x.name, callee, player(x.player, &ctx)?);
        }
        let names = {
            let partial = b.clone().build();
            WrgNames::of(&partial)
        };
        for (i, t) in self.transitions.iter().enumerate() {
            let ctx = format!("transition {i}");
            b.transition(names.position(&t.from, &ctx)?, names.target(&t.to, &ctx)?, t.weight.0.clone());
        }
        let init = lookup(&names.nodes, &self.initial, "node", "initial")?;
        let module = self.nodes[init].module.clone();
        b.initial(modules[&module], init);
        let wrg = b.build();
        let report = validate_wrg(&wrg);
        if !report.is_well_formed() {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(input_err(format!("malformed graph: {}", msgs.join("; "))));
        }
        Ok(wrg)
    }

    pub fn from_wrg(wrg: &Wrg) -> WrgDoc {
        let module_name = |m: usize| wrg.modules[m].name.clone();
        let nodes = wrg
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let m = &wrg.modules[n.module];
                let role = if m.entries.contains(&i) {
                    Role::Entry
                } else if m.exits.contains(&i) {
                    Role::Exit
                } else {
                    Role::Inner
                };
                NodeDoc { name: n.name.clone(), module: module_name(n.module), role, player: player_num(n.owner) }
            })
            .collect();
        let boxes = wrg
            .boxes
            .iter()
            .map(|x| BoxDoc {
                name: x.name.clone(),
                module: module_name(x.module),
                callee: module_name(x.callee),
                player: player_num(x.owner),
            })
            .collect();
        let transitions = wrg
            .transitions
            .iter()
            .map(|t| TransitionDoc {
                from: position_doc(wrg, t.source),
                to: match t.target {
                    Target::Node(v) => TargetDoc::Node(wrg.nodes[v].name.clone()),
                    Target::Call { boxed, entry } => {
                        TargetDoc::Call { boxed: wrg.boxes[boxed].name.clone(), entry: wrg.nodes[entry].name.clone() }
                    }
                },
                weight: Weight(t.weight.clone()),
            })
            .collect();
        WrgDoc {
            version: VERSION.into(),
            kind: "wrg".into(),
            modules: wrg.modules.iter().map(|m| m.name.clone()).collect(),
            nodes,
            boxes,
            transitions,
            initial: wrg.nodes[wrg.initial_entry].name.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceDoc {
    pub module: String,
    pub position: PositionDoc,
    /// Index among the position's outgoing transitions, in file order.
    pub choice: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDoc {
    pub version: String,
    pub kind: String,
    pub choices: Vec<ChoiceDoc>,
}

impl StrategyDoc {
    pub fn to_strategy(&self, wrg: &Wrg) -> Result<ModularStrategy, CliError> {
        let names = WrgNames::of(wrg);
        let mut sigma = ModularStrategy::new();
        for (i, c) in self.choices.iter().enumerate() {
            let ctx = format!("choice {i}");
            let p = names.position(&c.position, &ctx)?;
            let m = &wrg.modules[wrg.module_of(p)].name;
            if *m != c.module {
                return Err(input_err(format!("{ctx}: {} belongs to module `{m}`, not `{}`", wrg.position_name(p), c.module)));
            }
            if sigma.insert(p, c.choice).is_some() {
                return Err(input_err(format!("{ctx}: {} is chosen twice", wrg.position_name(p))));
            }
        }
        Ok(sigma)
    }

    pub fn from_strategy(wrg: &Wrg, sigma: &ModularStrategy) -> StrategyDoc {
        // Canonical position order, so equal strategies print identically.
        let choices = wrg
            .positions()
            .into_iter()
            .filter_map(|p| {
                sigma.get(&p).map(|&choice| ChoiceDoc {
                    module: wrg.modules[wrg.module_of(p)].name.clone(),
                    position: position_doc(wrg, p),
                    choice,
                })
            })
            .collect();
        StrategyDoc { version: VERSION.into(), kind: "strategy".into(), choices }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfaTransitionDoc {
    pub from: String,
    pub letter: String,
    pub to: String,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfaDoc {
    pub version: String,
    pub kind: String,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<WfaTransitionDoc>,
}

impl WfaDoc {
    pub fn to_wfa(&self) -> Result<Wfa, CliError> {
        let states = index_of(&self.states, "state")?;
        let letters = index_of(&self.alphabet, "letter")?;
        let mut ts = Vec::with_capacity(self.transitions.len());
        for (i, t) in self.transitions.iter().enumerate() {
            let ctx = format!("transition {i}");
            let weight = i64::try_from(&t.weight.0).map_err(|_| input_err(format!("{ctx}: weight out of range")))?;
            ts.push(WfaTransition {
                from: lookup(&states, &t.from, "state", &ctx)?,
                letter: lookup(&letters, &t.letter, "letter", &ctx)?,
                to: lookup(&states, &t.to, "state", &ctx)?,
                weight,
            });
        }
        let initial = lookup(&states, &self.initial, "state", "initial")?;
        Wfa::new(self.alphabet.clone(), self.states.len(), initial, ts).map_err(input_err)
    }
}

/// A lasso as edge indices plus readable edges.
#[derive(Clone, Debug, Serialize)]
pub struct LassoDoc {
    pub prefix_edges: Vec<usize>,
    pub cycle_edges: Vec<usize>,
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
    pub cycle_start: String,
    pub cycle_weight: String,
}

impl LassoDoc {
    pub fn new(wps: &Wps, l: &Lasso) -> LassoDoc {
        LassoDoc {
            prefix_edges: l.prefix.edges.clone(),
            cycle_edges: l.cycle.edges.clone(),
            prefix: l.prefix.edges.iter().map(|&e| wps.display_edge(e)).collect(),
            cycle: l.cycle.edges.iter().map(|&e| wps.display_edge(e)).collect(),
            cycle_start: l.cycle.start.display(wps),
            cycle_weight: l.cycle_weight(wps).to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pushmean_core::reductions::{sat_to_wrg, CnfFormula};

    #[test]
    fn wrg_round_trip_keeps_ids() {
        let phi = CnfFormula::new(3, vec![[1, -2, 3], [2, 3, -1]]).unwrap();
        let w = sat_to_wrg(&phi);
        let doc = WrgDoc::from_wrg(&w);
        let text = to_json(&doc);
        let (back, _): (WrgDoc, String) = read_doc(&text, "mem", &["wrg"]).unwrap();
        assert_eq!(back.to_wrg().unwrap(), w);
    }

    #[test]
    fn weights_accept_numbers_and_strings() {
        let w: Weight = serde_json::from_str("-3").unwrap();
        assert_eq!(w.0, BigInt::from(-3));
        let w: Weight = serde_json::from_str("\"123456789012345678901234567890\"").unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), "\"123456789012345678901234567890\"");
        assert!(serde_json::from_str::<Weight>("\"1.5\"").is_err());
    }

    #[test]
    fn header_is_checked() {
        let e = read_doc::<WpsDoc>(r#"{"version":"v2","kind":"wps"}"#, "f", &["wps"]).unwrap_err();
        assert!(e.to_string().contains("unsupported version"));
        let e = read_doc::<WpsDoc>(r#"{"version":"v1","kind":"wrg"}"#, "f", &["wps"]).unwrap_err();
        assert!(e.to_string().contains("expected a wps document"));
        let e = read_doc::<WpsDoc>("{\n  \"version\": \"v1\",\n  \"kind\": \"wps\",\n  \"states\": [1]\n}", "f", &["wps"])
            .unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
    }
}
