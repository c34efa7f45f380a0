//! Instance generators: weighted automata into pushdown games, and 3-CNF
//! formulas into one-player recursive graphs. Also the small oracles that
//! go with them.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::games::{Strategy, Wpg};
use crate::model::{Configuration, Edge, StackCommand, State, Symbol, Wps};
use crate::rsm::{ModularStrategy, Player, Position, Target, Wrg, WrgBuilder};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("automaton weight {0} is outside {{-1, 0, 1}}")]
    WeightOutOfRange(i64),
    #[error("automaton transition {0} refers to a missing state or letter")]
    BadTransition(usize),
    #[error("letter `{0}` is reserved")]
    ReservedLetter(String),
    #[error("clause {0} does not have three distinct literals over the declared variables")]
    BadClause(usize),
    #[error("assignment has {got} values for {want} variables")]
    AssignmentLength { got: usize, want: usize },
    #[error("assignment falsifies clause {0}")]
    AssignmentNotSatisfying(usize),
    #[error("graph was not produced by the 3-CNF construction")]
    NotAGeneratedInstance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfaTransition {
    pub from: usize,
    pub letter: usize,
    pub to: usize,
    pub weight: i64,
}

/// Weighted finite automaton with weights in {−1, 0, 1}; a word's value is
/// the least weight of a run on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wfa {
    pub alphabet: Vec<String>,
    pub num_states: usize,
    pub initial: usize,
    pub transitions: Vec<WfaTransition>,
}

impl Wfa {
    pub fn new(
        alphabet: Vec<String>,
        num_states: usize,
        initial: usize,
        transitions: Vec<WfaTransition>,
    ) -> Result<Wfa, ReductionError> {
        if let Some(a) = alphabet.iter().find(|a| *a == DOLLAR || *a == crate::rsm::BOTTOM) {
            return Err(ReductionError::ReservedLetter(a.clone()));
        }
        for (i, t) in transitions.iter().enumerate() {
            if !(-1..=1).contains(&t.weight) {
                return Err(ReductionError::WeightOutOfRange(t.weight));
            }
            if t.from >= num_states || t.to >= num_states || t.letter >= alphabet.len() {
                return Err(ReductionError::BadTransition(i));
            }
        }
        if initial >= num_states {
            return Err(ReductionError::BadTransition(usize::MAX));
        }
        Ok(Wfa { alphabet, num_states, initial, transitions })
    }

    /// Least run weight from each state to the end of `word`.
    fn completion(&self, word: &[usize]) -> Vec<Vec<Option<i64>>> {
        let mut best = alloc::vec![alloc::vec![None; self.num_states]; word.len() + 1];
        best[word.len()] = alloc::vec![Some(0); self.num_states];
        for i in (0..word.len()).rev() {
            for t in self.transitions.iter().filter(|t| t.letter == word[i]) {
                if let Some(rest) = best[i + 1][t.to] {
                    let v = rest + t.weight;
                    let cell = &mut best[i][t.from];
                    if cell.is_none_or(|c| v < c) {
                        *cell = Some(v);
                    }
                }
            }
        }
        best
    }

    /// Least run weights after reading one more letter.
    fn advance(&self, from: &[Option<i64>], letter: usize) -> Vec<Option<i64>> {
        let mut next = alloc::vec![None; self.num_states];
        for t in self.transitions.iter().filter(|t| t.letter == letter) {
            if let Some(v) = from[t.from] {
                let v = v + t.weight;
                if next[t.to].is_none_or(|c| v < c) {
                    next[t.to] = Some(v);
                }
            }
        }
        next
    }
}

/// Least weight over all runs on `word`; `None` if there is no run.
pub fn wfa_value(a: &Wfa, word: &[usize]) -> Option<i64> {
    a.completion(word)[0][a.initial]
}

/// The first word (by length, then lexicographically) of length at most
/// `max_len` whose value is at least `nu`. The empty word has value 0.
pub fn wfa_nonuniversal_bounded(a: &Wfa, nu: i64, max_len: usize) -> Option<Vec<usize>> {
    let mut start = alloc::vec![None; a.num_states];
    start[a.initial] = Some(0);
    for len in 0..=max_len {
        let mut word = Vec::new();
        if let Some(w) = search_words(a, &start, len, nu, &mut word) {
            return Some(w);
        }
    }
    None
}

fn search_words(a: &Wfa, cur: &[Option<i64>], left: usize, nu: i64, word: &mut Vec<usize>) -> Option<Vec<usize>> {
    if left == 0 {
        let value = cur.iter().flatten().min();
        return value.is_some_and(|&v| v >= nu).then(|| word.clone());
    }
    if cur.iter().all(Option::is_none) {
        return None;
    }
    for letter in 0..a.alphabet.len() {
        let next = a.advance(cur, letter);
        word.push(letter);
        let found = search_words(a, &next, left - 1, nu, word);
        word.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

pub const DOLLAR: &str = "$";

/// Which part of the game an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetTag {
    DollarLoop,
    DollarToLetters,
    LetterPush(usize),
    LettersToChoice,
    ChoiceToShort,
    ChoiceToRun,
    ShortPopLetter,
    ShortPopDollar,
    ShortRestart,
    /// The automaton transition with this index.
    RunPop(usize),
    RunPopDollar,
    RunRestart,
}

/// The game built from an automaton, with the roles of its states and
/// symbols and a tag per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfaGame {
    pub game: Wpg,
    pub tags: Vec<GadgetTag>,
    pub dollar: Symbol,
    /// Stack symbol of each letter.
    pub letters: Vec<Symbol>,
    pub q_dollar: State,
    pub q_letters: State,
    pub q_choice: State,
    pub q_short: State,
    /// Run-gadget copy of each automaton state.
    pub run: Vec<State>,
}

/// Player 1 pushes `$`s (weight −10) and then letters (−1); player 2
/// either pops everything (letters 0, `$` +11) or pops along a run of the
/// automaton on the reversed word (transition weight + 1, `$` +10). Both
/// branches restart from `q$` on the empty stack.
pub fn wfa_to_wpg(a: &Wfa) -> WfaGame {
    let ns = 4 + a.num_states;
    let mut states: Vec<String> = ["q$", "qΣ", "qch", "q<$"].iter().map(|s| s.to_string()).collect();
    states.extend((0..a.num_states).map(|q| alloc::format!("r{q}")));
    let mut alphabet = alloc::vec![crate::rsm::BOTTOM.to_string(), DOLLAR.to_string()];
    alphabet.extend(a.alphabet.iter().cloned());
    let (bottom, dollar) = (0, 1);
    let letters: Vec<Symbol> = (0..a.alphabet.len()).map(|i| i + 2).collect();
    let ng = alphabet.len();
    let (qd, qs, qc, ql) = (0, 1, 2, 3);
    let run: Vec<State> = (0..a.num_states).map(|q| q + 4).collect();
    let mut edges = Vec::new();
    let mut tags = Vec::new();
    let mut add = |from, top, to, command, w: i64, tag| {
        edges.push(Edge { from, top, to, command, weight: BigInt::from(w) });
        tags.push(tag);
    };
    for z in 0..ng {
        add(qd, z, qd, StackCommand::Push(dollar), -10, GadgetTag::DollarLoop);
        add(qd, z, qs, StackCommand::Push(dollar), -10, GadgetTag::DollarToLetters);
    }
    for z in 0..ng {
        for (i, &l) in letters.iter().enumerate() {
            add(qs, z, qs, StackCommand::Push(l), -1, GadgetTag::LetterPush(i));
        }
        add(qs, z, qc, StackCommand::Skip, 0, GadgetTag::LettersToChoice);
    }
    for z in 0..ng {
        add(qc, z, ql, StackCommand::Skip, 0, GadgetTag::ChoiceToShort);
        add(qc, z, run[a.initial], StackCommand::Skip, 0, GadgetTag::ChoiceToRun);
    }
    for &l in &letters {
        add(ql, l, ql, StackCommand::Pop, 0, GadgetTag::ShortPopLetter);
    }
    add(ql, dollar, ql, StackCommand::Pop, 11, GadgetTag::ShortPopDollar);
    add(ql, bottom, qd, StackCommand::Skip, 0, GadgetTag::ShortRestart);
    for (i, t) in a.transitions.iter().enumerate() {
        add(run[t.from], letters[t.letter], run[t.to], StackCommand::Pop, t.weight + 1, GadgetTag::RunPop(i));
    }
    for &r in &run {
        add(r, dollar, r, StackCommand::Pop, 10, GadgetTag::RunPopDollar);
        add(r, bottom, qd, StackCommand::Skip, 0, GadgetTag::RunRestart);
    }
    let mut owner = alloc::vec![Player::Two; ns];
    owner[qd] = Player::One;
    owner[qs] = Player::One;
    let wps = Wps { states, alphabet, bottom, initial: qd, edges };
    WfaGame { game: Wpg { wps, owner }, tags, dollar, letters, q_dollar: qd, q_letters: qs, q_choice: qc, q_short: ql, run }
}

fn find_edge(g: &WfaGame, cur: &Configuration, tag: impl Fn(GadgetTag) -> bool, to: Option<State>) -> Option<usize> {
    let wps = &g.game.wps;
    let top = cur.top()?;
    (0..wps.edges.len()).find(|&i| {
        let e = &wps.edges[i];
        e.from == cur.state && e.top == top && tag(g.tags[i]) && to.is_none_or(|t| e.to == t)
    })
}

/// Player 1 pushes `$^{n+1}` and then the reverse of `word` (`n = |word|`)
/// in every iteration, so the run gadget reads `word` itself.
pub fn word_strategy<'g>(g: &'g WfaGame, word: &[usize]) -> impl Strategy + 'g {
    let word = word.to_vec();
    move |_: &Wps, cur: &Configuration, _: &[usize]| {
        let n = word.len();
        let pushed = cur.height() - 1;
        let e = if cur.state == g.q_dollar {
            let tag = if pushed < n { GadgetTag::DollarLoop } else { GadgetTag::DollarToLetters };
            find_edge(g, cur, |t| t == tag, None)
        } else {
            let j = pushed - (n + 1);
            if j < n {
                let l = word[n - 1 - j];
                find_edge(g, cur, |t| t == GadgetTag::LetterPush(l), None)
            } else {
                find_edge(g, cur, |t| t == GadgetTag::LettersToChoice, None)
            }
        };
        e.expect("scripted move exists")
    }
}

/// Player 2's answer: when at most as many `$`s as letters were pushed, pop
/// everything; otherwise follow a least-weight run of the automaton on the
/// letters as they are popped (ties go to the lower target state).
pub fn counter_strategy<'g>(g: &'g WfaGame, a: &'g Wfa) -> impl Strategy + 'g {
    move |wps: &Wps, cur: &Configuration, _: &[usize]| {
        let above: Vec<Symbol> = cur.stack.iter().copied().filter(|&z| z != wps.bottom).collect();
        let dollars = above.iter().filter(|&&z| z == g.dollar).count();
        let any = |cur: &Configuration| find_edge(g, cur, |_| true, None).expect("player 2 has a move");
        if cur.state == g.q_choice {
            let tag = if dollars <= above.len() - dollars { GadgetTag::ChoiceToShort } else { GadgetTag::ChoiceToRun };
            return find_edge(g, cur, |t| t == tag, None).expect("choice edges exist");
        }
        let Some(q) = g.run.iter().position(|&r| r == cur.state) else {
            return any(cur);
        };
        // Letters from the top down to the first `$`.
        let pending: Vec<usize> = cur
            .stack
            .iter()
            .rev()
            .take_while(|&&z| z != g.dollar && z != wps.bottom)
            .map(|&z| g.letters.iter().position(|&l| l == z).expect("letter symbol"))
            .collect();
        if pending.is_empty() {
            return any(cur);
        }
        let best = a.completion(&pending[1..]);
        let choice = a
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| t.from == q && t.letter == pending[0])
            .filter_map(|(i, t)| best[0][t.to].map(|rest| (t.weight + rest, t.to, i)))
            .min();
        match choice {
            Some((_, _, i)) => find_edge(g, cur, |t| t == GadgetTag::RunPop(i), None).expect("run edge exists"),
            None => any(cur),
        }
    }
}

/// A 3-CNF formula; literal `v` is variable `v`, `-v` its negation (`v ≥ 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[i64; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[i64; 3]>) -> Result<CnfFormula, ReductionError> {
        for (i, c) in clauses.iter().enumerate() {
            let distinct = c.iter().collect::<BTreeSet<_>>().len() == 3;
            let in_range = c.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= num_vars);
            if !distinct || !in_range {
                return Err(ReductionError::BadClause(i));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn literal_true(l: i64, x: &[bool]) -> bool {
        x[l.unsigned_abs() as usize - 1] == (l > 0)
    }

    /// Index of the first falsified clause.
    pub fn falsified(&self, x: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|c| !c.iter().any(|&l| Self::literal_true(l, x)))
    }

    pub fn satisfied_by(&self, x: &[bool]) -> bool {
        self.falsified(x).is_none()
    }
}

/// First satisfying assignment, enumerating with `x1` as the most
/// significant position and false before true.
pub fn sat_brute(phi: &CnfFormula) -> Option<Vec<bool>> {
    let n = phi.num_vars;
    assert!(n <= 24, "brute force is limited to 24 variables");
    (0u32..1 << n)
        .map(|k| (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect::<Vec<bool>>())
        .find(|x| phi.satisfied_by(x))
}

fn literal_index(l: i64) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
}

fn literal_name(i: usize) -> String {
    let v = i / 2 + 1;
    if i.is_multiple_of(2) {
        alloc::format!("x{v}")
    } else {
        alloc::format!("~x{v}")
    }
}

struct SatLayout {
    clause_entry: Vec<usize>,
    literal_entry: Vec<usize>,
}

fn build_sat(phi: &CnfFormula) -> (Wrg, SatLayout) {
    let m = phi.clauses.len();
    let mut b = WrgBuilder::new();
    let a0 = b.module("A0");
    let cl: Vec<usize> = (1..=m).map(|i| b.module(&alloc::format!("cl{i}"))).collect();
    let lits: Vec<usize> = (0..2 * phi.num_vars).map(|i| b.module(&literal_name(i))).collect();
    let p = Player::One;
    let a0_en = b.entry(a0, "A0.en", p);
    b.exit(a0, "A0.ex", p);
    let cl_io: Vec<(usize, usize)> = cl
        .iter()
        .enumerate()
        .map(|(i, &c)| (b.entry(c, &alloc::format!("cl{}.en", i + 1), p), b.exit(c, &alloc::format!("cl{}.ex", i + 1), p)))
        .collect();
    let lit_io: Vec<(usize, usize)> = lits
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let name = literal_name(i);
            (b.entry(y, &alloc::format!("{name}.en"), p), b.exit(y, &alloc::format!("{name}.ex"), p))
        })
        .collect();
    // A0 calls cl1..clm in a loop; the last return goes back to the entry.
    if m == 0 {
        b.transition(Position::Node(a0_en), Target::Node(a0_en), 0);
    } else {
        let boxes: Vec<usize> = (0..m).map(|i| b.boxed(a0, &alloc::format!("A0.b{}", i + 1), cl[i], p)).collect();
        b.transition(Position::Node(a0_en), Target::Call { boxed: boxes[0], entry: cl_io[0].0 }, 0);
        for i in 0..m {
            let ret = Position::Return { boxed: boxes[i], exit: cl_io[i].1 };
            if i + 1 < m {
                let mid = b.node(a0, &alloc::format!("A0.a{}", i + 1), p);
                b.transition(ret, Target::Node(mid), 0);
                b.transition(Position::Node(mid), Target::Call { boxed: boxes[i + 1], entry: cl_io[i + 1].0 }, 0);
            } else {
                b.transition(ret, Target::Node(a0_en), 0);
            }
        }
    }
    for (i, c) in phi.clauses.iter().enumerate() {
        let (en, ex) = cl_io[i];
        for (k, &l) in c.iter().enumerate() {
            let y = literal_index(l);
            let bx = b.boxed(cl[i], &alloc::format!("cl{}.b{}", i + 1, k + 1), lits[y], p);
            b.transition(Position::Node(en), Target::Call { boxed: bx, entry: lit_io[y].0 }, 0);
            b.transition(Position::Return { boxed: bx, exit: lit_io[y].1 }, Target::Node(ex), 0);
        }
    }
    for (y, &module) in lits.iter().enumerate() {
        let name = literal_name(y);
        let (en, ex) = lit_io[y];
        let neg = y ^ 1;
        let mid = b.node(module, &alloc::format!("{name}.mid"), p);
        let bx = b.boxed(module, &alloc::format!("{name}.b"), lits[neg], p);
        // False edge first, then the True edge into the negated literal.
        b.transition(Position::Node(en), Target::Node(ex), -1);
        b.transition(Position::Node(en), Target::Call { boxed: bx, entry: lit_io[neg].0 }, -1);
        b.transition(Position::Return { boxed: bx, exit: lit_io[neg].1 }, Target::Node(mid), 1);
        b.transition(Position::Node(mid), Target::Node(ex), 1);
    }
    b.initial(a0, a0_en);
    let layout = SatLayout { clause_entry: cl_io.iter().map(|c| c.0).collect(), literal_entry: lit_io.iter().map(|l| l.0).collect() };
    (b.build(), layout)
}

/// One-player graph with modules `A0, cl1..clm, x1, ~x1, ..., xn, ~xn`.
/// A winning memoryless modular strategy for `LimInfAvg ≥ 0` exists iff
/// the formula is satisfiable.
pub fn sat_to_wrg(phi: &CnfFormula) -> Wrg {
    build_sat(phi).0
}

/// Each clause calls its first true literal; each literal module takes its
/// True edge iff the literal holds.
pub fn strategy_from_assignment(phi: &CnfFormula, x: &[bool]) -> Result<ModularStrategy, ReductionError> {
    if x.len() != phi.num_vars {
        return Err(ReductionError::AssignmentLength { got: x.len(), want: phi.num_vars });
    }
    if let Some(i) = phi.falsified(x) {
        return Err(ReductionError::AssignmentNotSatisfying(i));
    }
    let (wrg, layout) = build_sat(phi);
    let mut sigma: ModularStrategy = wrg.choice_points().into_iter().map(|(p, _)| (p, 0)).collect();
    for (i, c) in phi.clauses.iter().enumerate() {
        let k = c.iter().position(|&l| CnfFormula::literal_true(l, x)).expect("clause is satisfied");
        sigma.insert(Position::Node(layout.clause_entry[i]), k);
    }
    for (y, &en) in layout.literal_entry.iter().enumerate() {
        let l = (y / 2 + 1) as i64 * if y % 2 == 0 { 1 } else { -1 };
        sigma.insert(Position::Node(en), usize::from(CnfFormula::literal_true(l, x)));
    }
    Ok(sigma)
}

/// The same graph with the loop-closing edge of `A0` weighted 1 instead of 0.
pub fn strict_variant(wrg: &Wrg) -> Result<Wrg, ReductionError> {
    let a0 = wrg.module_id("A0").ok_or(ReductionError::NotAGeneratedInstance)?;
    let entry = *wrg.modules[a0].entries.first().ok_or(ReductionError::NotAGeneratedInstance)?;
    let back: Vec<usize> = (0..wrg.transitions.len())
        .filter(|&i| wrg.transitions[i].module == a0 && wrg.transitions[i].target == Target::Node(entry))
        .collect();
    match back[..] {
        [i] if wrg.transitions[i].weight == BigInt::from(0) => {
            let mut out = wrg.clone();
            out.transitions[i].weight = BigInt::from(1);
            Ok(out)
        }
        _ => Err(ReductionError::NotAGeneratedInstance),
    }
}
